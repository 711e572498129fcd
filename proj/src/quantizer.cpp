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

#include "irskg/quantizer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <iterator>
#include <ostream>

#include "irskg/error.hpp"

namespace irskg {

void QuantizerSpec::validate() const
{
    require(bits >= 1 && bits <= 4, "quantizer resolution must be 1..4 bits");
    require(thresholds.size() == (std::size_t{1} << bits) - 1, "threshold count must be 2^b - 1");
    for (std::size_t i = 1; i < thresholds.size(); ++i) {
        require(thresholds[i - 1] < thresholds[i], "thresholds must be strictly increasing");
    }
}

double empirical_quantile(std::span<const double> sorted, double q)
{
    require(!sorted.empty(), "quantile of an empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lower = static_cast<std::size_t>(std::floor(pos));
    const std::size_t upper = std::min(lower + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lower);
    return sorted[lower] + frac * (sorted[upper] - sorted[lower]);
}

QuantizerSpec fit_thresholds(std::span<const double> series, unsigned bits)
{
    require(bits >= 1 && bits <= 4, "quantizer resolution must be 1..4 bits");
    const std::size_t levels = std::size_t{1} << bits;
    if (series.size() < levels) {
        throw InsufficientLength("need at least 2^b samples to fit thresholds");
    }
    for (double v : series) {
        if (!std::isfinite(v)) {
            throw InvalidArgument("series contains non-finite values");
        }
    }
    std::vector<double> sorted(series.begin(), series.end());
    std::sort(sorted.begin(), sorted.end());

    QuantizerSpec spec;
    spec.bits = bits;
    spec.thresholds.reserve(levels - 1);
    for (std::size_t q = 1; q < levels; ++q) {
        spec.thresholds.push_back(empirical_quantile(sorted, static_cast<double>(q) / static_cast<double>(levels)));
    }
    // Heavily tied samples can interpolate to equal thresholds; nudge them apart
    // so the spec stays strictly increasing.
    for (std::size_t i = 1; i < spec.thresholds.size(); ++i) {
        if (!(spec.thresholds[i] > spec.thresholds[i - 1])) {
            spec.thresholds[i] = std::nextafter(spec.thresholds[i - 1], INFINITY);
        }
    }
    return spec;
}

unsigned bin_index(double value, const QuantizerSpec& spec)
{
    return static_cast<unsigned>(
        std::lower_bound(spec.thresholds.begin(), spec.thresholds.end(), value) - spec.thresholds.begin());
}

BitSequence quantize(std::span<const double> series, const QuantizerSpec& spec)
{
    spec.validate();
    BitSequence out;
    out.bits.reserve(series.size() * spec.bits);
    for (double v : series) {
        const unsigned code = gray_code(bin_index(v, spec));
        for (unsigned b = spec.bits; b-- > 0;) {
            out.bits.push_back(static_cast<std::uint8_t>((code >> b) & 1u));
        }
    }
    return out;
}

std::string bits_to_string(std::span<const std::uint8_t> bits)
{
    std::string s;
    s.reserve(bits.size());
    for (auto b : bits) {
        s.push_back(b ? '1' : '0');
    }
    return s;
}

void write_bits(std::ostream& out, std::span<const std::uint8_t> bits)
{
    out << bits_to_string(bits) << '\n';
    if (!out) {
        throw IoError("failed to write bit sequence");
    }
}

std::vector<std::uint8_t> read_bits(std::istream& in)
{
    std::vector<std::uint8_t> bits;
    for (auto it = std::istreambuf_iterator<char>(in); it != std::istreambuf_iterator<char>(); ++it) {
        const char c = *it;
        if (c == '0' || c == '1') {
            bits.push_back(static_cast<std::uint8_t>(c - '0'));
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            throw InvalidArgument(std::string("unexpected character in bit sequence: '") + c + "'");
        }
    }
    return bits;
}

} // namespace irskg
