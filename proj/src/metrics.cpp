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

#include "irskg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "irskg/error.hpp"

namespace irskg {

double kdr(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y)
{
    if (x.size() != y.size()) {
        throw DimensionMismatch("kdr: sequences differ in length");
    }
    if (x.empty()) {
        throw InvalidArgument("kdr: empty sequences");
    }
    std::size_t errors = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        errors += (x[i] & 1u) != (y[i] & 1u) ? 1 : 0;
    }
    return static_cast<double>(errors) / static_cast<double>(x.size());
}

double kgr(std::size_t key_bits, const ProbingSchedule& schedule, std::size_t streams)
{
    const double configs = static_cast<double>(schedule.configurations) * static_cast<double>(streams);
    if (!(configs > 0.0) || !(schedule.dwell_s() > 0.0)) {
        throw InvalidArgument("kgr: zero probing duration");
    }
    // Bits per configuration first, so a full key reproduces kgr_bound exactly.
    return static_cast<double>(key_bits) / configs / schedule.dwell_s();
}

double kgr_bound(const ProbingSchedule& schedule, unsigned bits_per_config)
{
    const double dwell = schedule.dwell_s();
    if (!(dwell > 0.0)) {
        throw InvalidArgument("kgr_bound: zero configuration dwell");
    }
    return static_cast<double>(bits_per_config) / dwell;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) {
        throw DimensionMismatch("pearson: series differ in length");
    }
    if (x.size() < 2) {
        throw InsufficientLength("pearson: need at least two samples");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) {
        return std::nullopt;
    }
    const double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

CorrelationMatrix pearson_matrix(std::span<const std::vector<double>> x, std::span<const std::vector<double>> y)
{
    CorrelationMatrix out;
    out.rows = x.size();
    out.cols = y.size();
    out.values.reserve(out.rows * out.cols);
    for (const auto& xr : x) {
        for (const auto& yc : y) {
            out.values.push_back(pearson(xr, yc));
        }
    }
    return out;
}

std::optional<double> avg_abs_corr(const CorrelationMatrix& matrix)
{
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t d = 0; d < std::min(matrix.rows, matrix.cols); ++d) {
        if (const auto& v = matrix.at(d, d)) {
            sum += std::abs(*v);
            ++count;
        }
    }
    if (count == 0) {
        return std::nullopt;
    }
    return sum / static_cast<double>(count);
}

std::optional<double> avg_abs_corr(std::span<const std::vector<double>> x, std::span<const std::vector<double>> y)
{
    if (x.size() != y.size()) {
        throw DimensionMismatch("avg_abs_corr: series sets differ in size");
    }
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t s = 0; s < x.size(); ++s) {
        if (x[s].size() < 2 || y[s].size() < 2) {
            continue;
        }
        if (const auto r = pearson(x[s], y[s])) {
            sum += std::abs(*r);
            ++count;
        }
    }
    if (count == 0) {
        return std::nullopt;
    }
    return sum / static_cast<double>(count);
}

std::string format_number(double value)
{
    if (std::isnan(value)) {
        return "nan";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

std::string format_number(const std::optional<double>& value)
{
    return value ? format_number(*value) : std::string("nan");
}

void write_matrix_csv(std::ostream& out, const CorrelationMatrix& matrix)
{
    for (std::size_t r = 0; r < matrix.rows; ++r) {
        for (std::size_t c = 0; c < matrix.cols; ++c) {
            if (c) {
                out << ',';
            }
            if (const auto& v = matrix.at(r, c)) {
                out << format_number(*v);
            }
        }
        out << '\n';
    }
}

} // namespace irskg
