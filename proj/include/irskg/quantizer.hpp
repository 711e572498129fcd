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

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace irskg {

/// Equiprobable quantizer: 2^b - 1 thresholds at empirical quantiles.
struct QuantizerSpec {
    unsigned bits = 1;
    std::vector<double> thresholds;

    void validate() const;
};

/// Ordered key bits (values 0/1) with a free-form provenance label.
struct BitSequence {
    std::vector<std::uint8_t> bits;
    std::string origin;

    std::size_t size() const noexcept { return bits.size(); }
};

/// Empirical quantile with linear interpolation between order statistics
/// (position (n - 1) * q on the sorted sample).
double empirical_quantile(std::span<const double> sorted, double q);

/// Thresholds at levels q / 2^b for q = 1 .. 2^b - 1, fitted on the caller's own series.
QuantizerSpec fit_thresholds(std::span<const double> series, unsigned bits);

/// Bin index of one sample: the number of thresholds strictly below it, so
/// samples lying exactly on a threshold fall into the lower bin.
unsigned bin_index(double value, const QuantizerSpec& spec);

constexpr unsigned gray_code(unsigned v) noexcept { return v ^ (v >> 1); }

/// Gray-coded bins, b bits per sample, most significant bit first.
BitSequence quantize(std::span<const double> series, const QuantizerSpec& spec);

/// ASCII '0'/'1' characters without separators, newline terminated.
void write_bits(std::ostream& out, std::span<const std::uint8_t> bits);
std::string bits_to_string(std::span<const std::uint8_t> bits);
/// Reads '0'/'1' characters up to end of stream; whitespace is skipped, anything else is rejected.
std::vector<std::uint8_t> read_bits(std::istream& in);

} // namespace irskg
