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
#include <vector>

#include "irskg/bch.hpp"
#include "irskg/rng.hpp"

namespace irskg {

using Bits = std::vector<std::uint8_t>;

/// Public helper data of the code-offset secure sketch for one key block.
struct SketchHelper {
    Bits offset; ///< key block XOR a random codeword
    std::size_t n_code = 0;
    std::size_t k_code = 0;
    unsigned t = 0;
};

/// Helper = block XOR encode(random message).
SketchHelper sketch(std::span<const std::uint8_t> block, const BchCode& code, Rng& rng);

/// Decodes block XOR helper and re-applies the offset; nullopt on decoder failure.
std::optional<Bits> recover(std::span<const std::uint8_t> block, const SketchHelper& helper, const BchCode& code);

/// Public seed of a binary Toeplitz matrix of size output_length x input_length.
struct HashSeed {
    Bits bits; ///< input_length + output_length - 1 entries
    std::size_t input_length = 0;
    std::size_t output_length = 0;

    static HashSeed random(std::size_t input_length, std::size_t output_length, Rng& rng);
};

struct LeakageBudget {
    std::size_t blocks = 0;
    std::size_t redundancy = 0; ///< n_code - k_code per block
    std::size_t margin = 32;
};

/// input_length - blocks * redundancy - margin; throws BudgetExceeded when that is not positive.
std::size_t amplified_length(std::size_t input_length, const LeakageBudget& budget);

/// out[r] = XOR_c T[r][c] * in[c] with T[r][c] = seed[r - c + input_length - 1].
Bits toeplitz_hash(std::span<const std::uint8_t> input, const HashSeed& seed);

/// Hashes the reconciled bits down to the seed's output length after checking
/// it against the leakage budget.
Bits privacy_amplify(std::span<const std::uint8_t> reconciled, const HashSeed& seed, const LeakageBudget& budget);

/// Compares keyed BLAKE2b digests of both keys in constant time.
bool verify_keys(std::span<const std::uint8_t> alice, std::span<const std::uint8_t> bob);

struct ReconciliationResult {
    Bits alice;                  ///< concatenated accepted blocks (padding removed)
    Bits bob;
    std::size_t blocks = 0;      ///< blocks attempted
    std::size_t discarded = 0;   ///< decoder failures plus verification failures
    std::size_t decoder_failures = 0;
    std::size_t undetected = 0;  ///< accepted blocks that still differ (visible only in simulation)
    std::size_t padding_bits = 0;
    std::vector<SketchHelper> transcript;
    std::vector<std::size_t> discarded_blocks;
};

/// Splits both keys into n-bit blocks (the last one zero-padded), runs
/// sketch/recover per block and drops blocks that fail to decode or verify.
ReconciliationResult reconcile(std::span<const std::uint8_t> alice, std::span<const std::uint8_t> bob,
                               const BchCode& code, Rng& rng);

/// Helper transcript format (all integers unsigned 32-bit little-endian):
///   magic "IRSH", version 1, n_code, k_code, t, block count,
///   then per block: bit length, followed by ceil(bits/8) bytes packed MSB first.
void write_transcript(std::ostream& out, std::span<const SketchHelper> helpers);
std::vector<SketchHelper> read_transcript(std::istream& in);

} // namespace irskg
