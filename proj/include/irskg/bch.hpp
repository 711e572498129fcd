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
#include <optional>
#include <span>
#include <vector>

namespace irskg {

/// Narrow-sense primitive binary BCH code of length 2^m - 1 with designed
/// correction radius t, bounded-distance decoded (Berlekamp-Massey + Chien).
///
/// Bit vectors hold one bit per byte. Index i is the coefficient of x^i; the
/// encoder is systematic with the message in positions n-k .. n-1.
class BchCode {
public:
    BchCode(unsigned m, unsigned t);

    std::size_t n() const noexcept { return n_; }
    std::size_t k() const noexcept { return k_; }
    unsigned t() const noexcept { return t_; }
    unsigned field_degree() const noexcept { return m_; }

    /// Generator polynomial coefficients, lowest degree first.
    const std::vector<std::uint8_t>& generator() const noexcept { return generator_; }

    std::vector<std::uint8_t> encode(std::span<const std::uint8_t> message) const;
    std::vector<std::uint8_t> message_of(std::span<const std::uint8_t> codeword) const;

    /// Nearest codeword within radius t, or nullopt when decoding fails.
    std::optional<std::vector<std::uint8_t>> decode(std::span<const std::uint8_t> word) const;

    bool is_codeword(std::span<const std::uint8_t> word) const;

private:
    std::uint16_t mul(std::uint16_t a, std::uint16_t b) const;
    std::uint16_t inv(std::uint16_t a) const;
    std::uint16_t alpha_pow(long e) const;
    std::vector<std::uint16_t> syndromes(std::span<const std::uint8_t> word) const;

    unsigned m_;
    unsigned t_;
    std::size_t n_;
    std::size_t k_;
    std::vector<std::uint16_t> exp_;
    std::vector<int> log_;
    std::vector<std::uint8_t> generator_;
};

} // namespace irskg
