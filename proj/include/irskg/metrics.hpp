// SPDX-License-Identifier: Apache-2.0
//
// irskg - simulator for surface-assisted channel-reciprocity key generation
// Copyright (C) 2026 The irskg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "irskg/probing.hpp"

namespace irskg {

/// Fraction of positions where the two sequences differ.
double kdr(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y);

/// Key bits per second per stream: bits / (streams * m * (T_su + L T_p)).
double kgr(std::size_t key_bits, const ProbingSchedule& schedule, std::size_t streams = 1);

/// b / (T_su + L T_p): every configuration yields at most b bits per stream.
double kgr_bound(const ProbingSchedule& schedule, unsigned bits_per_config);

/// Pearson correlation coefficient; nullopt when either series has zero variance.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

/// Dense matrix of optional coefficients, row-major.
struct CorrelationMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::optional<double>> values;

    const std::optional<double>& at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

/// rho(X[r], Y[c]) for every pair of series.
CorrelationMatrix pearson_matrix(std::span<const std::vector<double>> x, std::span<const std::vector<double>> y);

/// Mean |rho| over the defined diagonal entries; nullopt when none is defined.
std::optional<double> avg_abs_corr(const CorrelationMatrix& matrix);

/// Mean |rho(x[s], y[s])| over paired series, skipping undefined pairs.
std::optional<double> avg_abs_corr(std::span<const std::vector<double>> x, std::span<const std::vector<double>> y);

/// Dense CSV grid, empty cells for undefined entries.
void write_matrix_csv(std::ostream& out, const CorrelationMatrix& matrix);

/// Six significant digits, "nan" for missing values.
std::string format_number(double value);
std::string format_number(const std::optional<double>& value);

} // namespace irskg
