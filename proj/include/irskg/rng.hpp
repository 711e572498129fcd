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

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string_view>

namespace irskg {

/// 256-bit key identifying one node in the seed hierarchy.
///
/// Children are derived with keyed BLAKE2b over a label and an index, so
/// sibling streams are independent of each other and of how many draws any
/// of them consumes.
class Seed {
public:
    static Seed from_master(std::uint64_t master);

    Seed child(std::string_view label) const;
    Seed child(std::string_view label, std::uint64_t index) const;

    const std::array<std::uint8_t, 32>& bytes() const noexcept { return key_; }

    /// First 8 bytes as a little-endian integer, for echoing in reports.
    std::uint64_t fingerprint() const noexcept;

    friend bool operator==(const Seed&, const Seed&) = default;

private:
    std::array<std::uint8_t, 32> key_{};
};

/// ChaCha20 keystream exposed as a UniformRandomBitGenerator.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(const Seed& seed);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform();
    /// Standard normal deviate.
    double normal();
    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> complex_normal(double variance);
    /// Fair coin.
    bool bit();
    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);

    static constexpr std::string_view generator_name = "ChaCha20 keystream (libsodium), BLAKE2b seed tree";

private:
    void refill();

    std::array<std::uint8_t, 32> key_{};
    std::uint64_t block_counter_ = 0;
    std::array<std::uint8_t, 1024> buffer_{};
    std::size_t position_ = buffer_.size();
    bool has_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

} // namespace irskg
