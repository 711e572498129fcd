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

#include "irskg/postprocess.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <istream>
#include <ostream>
#include <string>

#include <sodium.h>

#include "irskg/error.hpp"

namespace irskg {

SketchHelper sketch(std::span<const std::uint8_t> block, const BchCode& code, Rng& rng)
{
    if (block.size() != code.n()) {
        throw DimensionMismatch("sketch block must have " + std::to_string(code.n()) + " bits");
    }
    Bits message(code.k());
    for (auto& b : message) {
        b = rng.bit() ? 1 : 0;
    }
    const Bits codeword = code.encode(message);
    SketchHelper helper;
    helper.offset.resize(code.n());
    for (std::size_t i = 0; i < code.n(); ++i) {
        helper.offset[i] = static_cast<std::uint8_t>((block[i] ^ codeword[i]) & 1u);
    }
    helper.n_code = code.n();
    helper.k_code = code.k();
    helper.t = code.t();
    return helper;
}

std::optional<Bits> recover(std::span<const std::uint8_t> block, const SketchHelper& helper, const BchCode& code)
{
    if (block.size() != helper.offset.size() || helper.offset.size() != code.n()) {
        throw DimensionMismatch("recover: block, helper and code lengths differ");
    }
    Bits word(code.n());
    for (std::size_t i = 0; i < code.n(); ++i) {
        word[i] = static_cast<std::uint8_t>((block[i] ^ helper.offset[i]) & 1u);
    }
    auto codeword = code.decode(word);
    if (!codeword) {
        return std::nullopt;
    }
    for (std::size_t i = 0; i < code.n(); ++i) {
        (*codeword)[i] ^= helper.offset[i];
    }
    return codeword;
}

HashSeed HashSeed::random(std::size_t input_length, std::size_t output_length, Rng& rng)
{
    require(input_length >= 1 && output_length >= 1, "hash dimensions must be positive");
    HashSeed seed;
    seed.input_length = input_length;
    seed.output_length = output_length;
    seed.bits.resize(input_length + output_length - 1);
    for (auto& b : seed.bits) {
        b = rng.bit() ? 1 : 0;
    }
    return seed;
}

std::size_t amplified_length(std::size_t input_length, const LeakageBudget& budget)
{
    const std::size_t leaked = budget.blocks * budget.redundancy + budget.margin;
    if (input_length <= leaked) {
        throw BudgetExceeded("leakage of " + std::to_string(leaked) + " bits consumes the whole " +
                             std::to_string(input_length) + "-bit input");
    }
    return input_length - leaked;
}

namespace {

std::vector<std::uint64_t> pack_words(std::span<const std::uint8_t> bits, std::size_t extra_words)
{
    std::vector<std::uint64_t> words((bits.size() + 63) / 64 + extra_words, 0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        words[i / 64] |= static_cast<std::uint64_t>(bits[i] & 1u) << (i % 64);
    }
    return words;
}

} // namespace

Bits toeplitz_hash(std::span<const std::uint8_t> input, const HashSeed& seed)
{
    if (input.size() != seed.input_length || seed.bits.size() != seed.input_length + seed.output_length - 1) {
        throw DimensionMismatch("hash seed does not match input length");
    }
    // out[r] = parity(sum_c seed[r + c] * reversed[c]) with reversed[c] = input[n - 1 - c].
    std::vector<std::uint8_t> reversed(input.rbegin(), input.rend());
    const auto u = pack_words(reversed, 0);
    const auto s = pack_words(seed.bits, 1);
    const std::size_t words = u.size();

    Bits out(seed.output_length, 0);
    for (std::size_t r = 0; r < seed.output_length; ++r) {
        const std::size_t base = r / 64;
        const unsigned shift = r % 64;
        std::uint64_t acc = 0;
        for (std::size_t w = 0; w < words; ++w) {
            std::uint64_t window = s[base + w] >> shift;
            if (shift != 0) {
                window |= s[base + w + 1] << (64 - shift);
            }
            acc ^= window & u[w];
        }
        out[r] = static_cast<std::uint8_t>(std::popcount(acc) & 1);
    }
    return out;
}

Bits privacy_amplify(std::span<const std::uint8_t> reconciled, const HashSeed& seed, const LeakageBudget& budget)
{
    const std::size_t allowed = amplified_length(reconciled.size(), budget);
    if (seed.output_length > allowed) {
        throw BudgetExceeded("requested " + std::to_string(seed.output_length) + " output bits, budget allows " +
                             std::to_string(allowed));
    }
    return toeplitz_hash(reconciled, seed);
}

namespace {

std::array<unsigned char, 32> key_digest(std::span<const std::uint8_t> bits)
{
    static constexpr std::string_view domain = "irskg/verify/v1";
    std::array<unsigned char, 32> digest{};
    crypto_generichash_state state;
    crypto_generichash_init(&state, reinterpret_cast<const unsigned char*>(domain.data()), domain.size(),
                            digest.size());
    const std::uint64_t length = bits.size();
    std::array<unsigned char, 8> le{};
    for (int i = 0; i < 8; ++i) {
        le[static_cast<std::size_t>(i)] = static_cast<unsigned char>(length >> (8 * i));
    }
    crypto_generichash_update(&state, le.data(), le.size());
    if (!bits.empty()) {
        crypto_generichash_update(&state, bits.data(), bits.size());
    }
    crypto_generichash_final(&state, digest.data(), digest.size());
    return digest;
}

} // namespace

bool verify_keys(std::span<const std::uint8_t> alice, std::span<const std::uint8_t> bob)
{
    if (sodium_init() < 0) {
        throw Error("libsodium initialisation failed");
    }
    const auto a = key_digest(alice);
    const auto b = key_digest(bob);
    return sodium_memcmp(a.data(), b.data(), a.size()) == 0;
}

ReconciliationResult reconcile(std::span<const std::uint8_t> alice, std::span<const std::uint8_t> bob,
                               const BchCode& code, Rng& rng)
{
    if (alice.size() != bob.size()) {
        throw DimensionMismatch("keys to reconcile differ in length");
    }
    const std::size_t n = code.n();
    ReconciliationResult result;
    result.blocks = (alice.size() + n - 1) / n;
    result.padding_bits = result.blocks * n - alice.size();

    Bits block_a(n), block_b(n);
    for (std::size_t blk = 0; blk < result.blocks; ++blk) {
        const std::size_t begin = blk * n;
        const std::size_t used = std::min(n, alice.size() - begin);
        std::fill(block_a.begin(), block_a.end(), 0);
        std::fill(block_b.begin(), block_b.end(), 0);
        std::copy_n(alice.begin() + static_cast<std::ptrdiff_t>(begin), used, block_a.begin());
        std::copy_n(bob.begin() + static_cast<std::ptrdiff_t>(begin), used, block_b.begin());

        auto helper = sketch(block_a, code, rng);
        const auto recovered = recover(block_b, helper, code);
        result.transcript.push_back(std::move(helper));
        if (!recovered) {
            ++result.decoder_failures;
            ++result.discarded;
            result.discarded_blocks.push_back(blk);
            continue;
        }
        if (!verify_keys(block_a, *recovered)) {
            ++result.discarded;
            result.discarded_blocks.push_back(blk);
            continue;
        }
        if (!std::equal(block_a.begin(), block_a.end(), recovered->begin())) {
            ++result.undetected;
        }
        result.alice.insert(result.alice.end(), block_a.begin(), block_a.begin() + static_cast<std::ptrdiff_t>(used));
        result.bob.insert(result.bob.end(), recovered->begin(), recovered->begin() + static_cast<std::ptrdiff_t>(used));
    }
    return result;
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v)
{
    const char bytes[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                           static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
    out.write(bytes, 4);
}

std::uint32_t get_u32(std::istream& in)
{
    unsigned char bytes[4];
    if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
        throw IoError("truncated helper transcript");
    }
    return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
           (static_cast<std::uint32_t>(bytes[2]) << 16) | (static_cast<std::uint32_t>(bytes[3]) << 24);
}

} // namespace

void write_transcript(std::ostream& out, std::span<const SketchHelper> helpers)
{
    out.write("IRSH", 4);
    put_u32(out, 1);
    const SketchHelper* first = helpers.empty() ? nullptr : &helpers.front();
    put_u32(out, first ? static_cast<std::uint32_t>(first->n_code) : 0);
    put_u32(out, first ? static_cast<std::uint32_t>(first->k_code) : 0);
    put_u32(out, first ? first->t : 0);
    put_u32(out, static_cast<std::uint32_t>(helpers.size()));
    for (const auto& h : helpers) {
        if (first && (h.n_code != first->n_code || h.k_code != first->k_code || h.t != first->t)) {
            throw InvalidArgument("transcript blocks must share one code");
        }
        put_u32(out, static_cast<std::uint32_t>(h.offset.size()));
        std::vector<char> packed((h.offset.size() + 7) / 8, 0);
        for (std::size_t i = 0; i < h.offset.size(); ++i) {
            if (h.offset[i]) {
                packed[i / 8] = static_cast<char>(packed[i / 8] | (0x80 >> (i % 8)));
            }
        }
        out.write(packed.data(), static_cast<std::streamsize>(packed.size()));
    }
    if (!out) {
        throw IoError("failed to write helper transcript");
    }
}

std::vector<SketchHelper> read_transcript(std::istream& in)
{
    char magic[4];
    if (!in.read(magic, 4) || std::string_view(magic, 4) != "IRSH") {
        throw IoError("not a helper transcript");
    }
    if (get_u32(in) != 1) {
        throw IoError("unsupported helper transcript version");
    }
    const std::size_t n_code = get_u32(in);
    const std::size_t k_code = get_u32(in);
    const unsigned t = get_u32(in);
    const std::size_t count = get_u32(in);
    std::vector<SketchHelper> helpers;
    helpers.reserve(count);
    for (std::size_t b = 0; b < count; ++b) {
        SketchHelper h;
        h.n_code = n_code;
        h.k_code = k_code;
        h.t = t;
        const std::size_t bits = get_u32(in);
        std::vector<unsigned char> packed((bits + 7) / 8);
        if (!in.read(reinterpret_cast<char*>(packed.data()), static_cast<std::streamsize>(packed.size()))) {
            throw IoError("truncated helper transcript");
        }
        h.offset.resize(bits);
        for (std::size_t i = 0; i < bits; ++i) {
            h.offset[i] = static_cast<std::uint8_t>((packed[i / 8] >> (7 - i % 8)) & 1u);
        }
        helpers.push_back(std::move(h));
    }
    return helpers;
}

} // namespace irskg
