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

#include "irskg/bch.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "irskg/error.hpp"

namespace irskg {

namespace {

// Primitive polynomials indexed by field degree.
std::uint32_t primitive_polynomial(unsigned m)
{
    switch (m) {
    case 3: return 0x0B;
    case 4: return 0x13;
    case 5: return 0x25;
    case 6: return 0x43;
    case 7: return 0x89;
    case 8: return 0x11D;
    case 9: return 0x211;
    case 10: return 0x409;
    default: throw InvalidArgument("BCH field degree must be in 3..10, got " + std::to_string(m));
    }
}

std::vector<std::uint8_t> poly_mul_gf2(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b)
{
    std::vector<std::uint8_t> out(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) {
            continue;
        }
        for (std::size_t j = 0; j < b.size(); ++j) {
            out[i + j] ^= b[j];
        }
    }
    return out;
}

} // namespace

BchCode::BchCode(unsigned m, unsigned t) : m_(m), t_(t)
{
    const std::uint32_t poly = primitive_polynomial(m);
    n_ = (std::size_t{1} << m) - 1;
    require(t >= 1 && 2 * t < n_, "BCH correction radius out of range");

    exp_.resize(2 * n_);
    log_.assign(n_ + 1, -1);
    std::uint32_t x = 1;
    for (std::size_t i = 0; i < n_; ++i) {
        exp_[i] = static_cast<std::uint16_t>(x);
        log_[x] = static_cast<int>(i);
        x <<= 1;
        if (x & (1u << m)) {
            x ^= poly;
        }
    }
    for (std::size_t i = n_; i < 2 * n_; ++i) {
        exp_[i] = exp_[i - n_];
    }

    // Product of the minimal polynomials of alpha^1 .. alpha^2t, one per cyclotomic coset.
    std::set<std::size_t> covered;
    generator_ = {1};
    for (std::size_t i = 1; i <= 2 * t; ++i) {
        if (covered.count(i)) {
            continue;
        }
        std::vector<std::size_t> coset;
        std::size_t e = i;
        do {
            coset.push_back(e);
            covered.insert(e);
            e = (2 * e) % n_;
        } while (e != i);

        // prod (x - alpha^e) over the coset, coefficients in GF(2^m)
        std::vector<std::uint16_t> minimal = {1};
        for (std::size_t root : coset) {
            std::vector<std::uint16_t> next(minimal.size() + 1, 0);
            const std::uint16_t r = exp_[root];
            for (std::size_t d = 0; d < minimal.size(); ++d) {
                next[d + 1] ^= minimal[d];
                next[d] ^= mul(minimal[d], r);
            }
            minimal = std::move(next);
        }
        std::vector<std::uint8_t> binary(minimal.size());
        for (std::size_t d = 0; d < minimal.size(); ++d) {
            if (minimal[d] > 1) {
                throw Error("minimal polynomial has non-binary coefficient");
            }
            binary[d] = static_cast<std::uint8_t>(minimal[d]);
        }
        generator_ = poly_mul_gf2(generator_, binary);
    }
    const std::size_t redundancy = generator_.size() - 1;
    require(redundancy < n_, "BCH code has no message bits");
    k_ = n_ - redundancy;
}

std::uint16_t BchCode::mul(std::uint16_t a, std::uint16_t b) const
{
    if (a == 0 || b == 0) {
        return 0;
    }
    return exp_[static_cast<std::size_t>(log_[a] + log_[b])];
}

std::uint16_t BchCode::inv(std::uint16_t a) const
{
    return exp_[(n_ - static_cast<std::size_t>(log_[a])) % n_];
}

std::uint16_t BchCode::alpha_pow(long e) const
{
    const long n = static_cast<long>(n_);
    return exp_[static_cast<std::size_t>(((e % n) + n) % n)];
}

std::vector<std::uint8_t> BchCode::encode(std::span<const std::uint8_t> message) const
{
    if (message.size() != k_) {
        throw DimensionMismatch("BCH message must have " + std::to_string(k_) + " bits");
    }
    const std::size_t r = n_ - k_;
    std::vector<std::uint8_t> word(n_, 0);
    for (std::size_t i = 0; i < k_; ++i) {
        word[r + i] = message[i] & 1u;
    }
    // Remainder of x^r m(x) modulo g(x), by long division from the top.
    std::vector<std::uint8_t> rem = word;
    for (std::size_t d = n_; d-- > r;) {
        if (!rem[d]) {
            continue;
        }
        for (std::size_t g = 0; g <= r; ++g) {
            rem[d - r + g] ^= generator_[g];
        }
    }
    for (std::size_t i = 0; i < r; ++i) {
        word[i] = rem[i];
    }
    return word;
}

std::vector<std::uint8_t> BchCode::message_of(std::span<const std::uint8_t> codeword) const
{
    if (codeword.size() != n_) {
        throw DimensionMismatch("BCH codeword must have " + std::to_string(n_) + " bits");
    }
    return {codeword.begin() + static_cast<std::ptrdiff_t>(n_ - k_), codeword.end()};
}

std::vector<std::uint16_t> BchCode::syndromes(std::span<const std::uint8_t> word) const
{
    std::vector<std::uint16_t> s(2 * t_ + 1, 0);
    for (std::size_t pos = 0; pos < n_; ++pos) {
        if (!(word[pos] & 1u)) {
            continue;
        }
        for (std::size_t i = 1; i <= 2 * t_; ++i) {
            s[i] ^= exp_[(i * pos) % n_];
        }
    }
    return s;
}

bool BchCode::is_codeword(std::span<const std::uint8_t> word) const
{
    if (word.size() != n_) {
        return false;
    }
    const auto s = syndromes(word);
    return std::all_of(s.begin() + 1, s.end(), [](std::uint16_t v) { return v == 0; });
}

std::optional<std::vector<std::uint8_t>> BchCode::decode(std::span<const std::uint8_t> word) const
{
    if (word.size() != n_) {
        throw DimensionMismatch("BCH word must have " + std::to_string(n_) + " bits");
    }
    std::vector<std::uint8_t> out(word.begin(), word.end());
    const auto s = syndromes(word);
    if (std::all_of(s.begin() + 1, s.end(), [](std::uint16_t v) { return v == 0; })) {
        return out;
    }

    // Berlekamp-Massey for the error locator Lambda(x).
    const std::size_t two_t = 2 * t_;
    std::vector<std::uint16_t> lambda(two_t + 1, 0), prev(two_t + 1, 0);
    lambda[0] = 1;
    prev[0] = 1;
    std::size_t degree = 0;
    std::size_t shift = 1;
    std::uint16_t prev_discrepancy = 1;
    for (std::size_t r = 1; r <= two_t; ++r) {
        std::uint16_t delta = s[r];
        for (std::size_t i = 1; i <= degree; ++i) {
            delta ^= mul(lambda[i], s[r - i]);
        }
        if (delta == 0) {
            ++shift;
            continue;
        }
        const std::uint16_t factor = mul(delta, inv(prev_discrepancy));
        std::vector<std::uint16_t> updated = lambda;
        for (std::size_t i = 0; i + shift <= two_t; ++i) {
            updated[i + shift] ^= mul(factor, prev[i]);
        }
        if (2 * degree <= r - 1) {
            prev = lambda;
            degree = r - degree;
            prev_discrepancy = delta;
            shift = 1;
        } else {
            ++shift;
        }
        lambda = std::move(updated);
    }
    if (degree > t_) {
        return std::nullopt;
    }

    // Chien search: Lambda(alpha^-pos) == 0 marks an error at pos.
    std::size_t found = 0;
    for (std::size_t pos = 0; pos < n_; ++pos) {
        std::uint16_t value = 0;
        for (std::size_t i = 0; i <= degree; ++i) {
            value ^= mul(lambda[i], alpha_pow(-static_cast<long>(i * pos)));
        }
        if (value == 0) {
            out[pos] ^= 1u;
            ++found;
        }
    }
    if (found != degree) {
        return std::nullopt;
    }
    return out;
}

} // namespace irskg
