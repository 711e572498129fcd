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

#include "irskg/rng.hpp"

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

#include <sodium.h>

namespace irskg {

namespace {

void ensure_sodium()
{
    static std::once_flag flag;
    std::call_once(flag, [] {
        if (sodium_init() < 0) {
            throw std::runtime_error("libsodium initialisation failed");
        }
    });
}

void store_le64(std::uint8_t* out, std::uint64_t value)
{
    for (int i = 0; i < 8; ++i) {
        out[i] = static_cast<std::uint8_t>(value >> (8 * i));
    }
}

} // namespace

Seed Seed::from_master(std::uint64_t master)
{
    ensure_sodium();
    static constexpr std::string_view domain = "irskg/master-seed/v1";
    std::array<std::uint8_t, 8> le{};
    store_le64(le.data(), master);

    crypto_generichash_state state;
    crypto_generichash_init(&state, nullptr, 0, 32);
    crypto_generichash_update(&state, reinterpret_cast<const unsigned char*>(domain.data()), domain.size());
    crypto_generichash_update(&state, le.data(), le.size());
    Seed seed;
    crypto_generichash_final(&state, seed.key_.data(), seed.key_.size());
    return seed;
}

Seed Seed::child(std::string_view label) const
{
    return child(label, 0);
}

Seed Seed::child(std::string_view label, std::uint64_t index) const
{
    ensure_sodium();
    std::array<std::uint8_t, 8> le{};
    store_le64(le.data(), index);
    std::array<std::uint8_t, 8> len{};
    store_le64(len.data(), label.size());

    crypto_generichash_state state;
    crypto_generichash_init(&state, key_.data(), key_.size(), 32);
    crypto_generichash_update(&state, len.data(), len.size());
    crypto_generichash_update(&state, reinterpret_cast<const unsigned char*>(label.data()), label.size());
    crypto_generichash_update(&state, le.data(), le.size());
    Seed seed;
    crypto_generichash_final(&state, seed.key_.data(), seed.key_.size());
    return seed;
}

std::uint64_t Seed::fingerprint() const noexcept
{
    std::uint64_t value = 0;
    for (int i = 7; i >= 0; --i) {
        value = (value << 8) | key_[static_cast<std::size_t>(i)];
    }
    return value;
}

Rng::Rng(const Seed& seed) : key_(seed.bytes())
{
    ensure_sodium();
}

void Rng::refill()
{
    static const std::array<std::uint8_t, 1024> zeros{};
    static constexpr std::array<std::uint8_t, crypto_stream_chacha20_NONCEBYTES> nonce{};
    crypto_stream_chacha20_xor_ic(buffer_.data(), zeros.data(), buffer_.size(), nonce.data(), block_counter_,
                                  key_.data());
    block_counter_ += buffer_.size() / 64;
    position_ = 0;
}

Rng::result_type Rng::operator()()
{
    if (position_ + 8 > buffer_.size()) {
        refill();
    }
    std::uint64_t value;
    std::memcpy(&value, buffer_.data() + position_, 8);
    position_ += 8;
    return value;
}

double Rng::uniform()
{
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double Rng::normal()
{
    // Box-Muller; spelled out so streams are identical across standard libraries.
    if (has_spare_normal_) {
        has_spare_normal_ = false;
        return spare_normal_;
    }
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 == 0.0);
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_normal_ = radius * std::sin(angle);
    has_spare_normal_ = true;
    return radius * std::cos(angle);
}

std::complex<double> Rng::complex_normal(double variance)
{
    const double scale = std::sqrt(variance / 2.0);
    const double re = normal();
    const double im = normal();
    return {scale * re, scale * im};
}

bool Rng::bit()
{
    return ((*this)() >> 63) != 0;
}

std::uint64_t Rng::below(std::uint64_t bound)
{
    if (bound == 0) {
        return 0;
    }
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t value;
    do {
        value = (*this)();
    } while (value >= limit);
    return value % bound;
}

} // namespace irskg
