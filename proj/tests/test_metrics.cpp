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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "irskg/error.hpp"
#include "irskg/metrics.hpp"
#include "irskg/rng.hpp"

using namespace irskg;

namespace {

std::vector<double> normals(std::size_t n, Rng& rng)
{
    std::vector<double> x(n);
    for (auto& v : x) {
        v = rng.normal();
    }
    return x;
}

} // namespace

TEST_CASE("key disagreement rate")
{
    const std::vector<std::uint8_t> x = {0, 1, 1, 0};
    const std::vector<std::uint8_t> y = {1, 0, 0, 1};
    CHECK(kdr(x, x) == 0.0);
    CHECK(kdr(x, y) == 1.0);
    const std::vector<std::uint8_t> z = {0, 1, 0, 0};
    CHECK(kdr(x, z) == 0.25);
    CHECK(kdr(z, x) == kdr(x, z));
    CHECK_THROWS_AS(kdr(x, std::vector<std::uint8_t>{0}), DimensionMismatch);
    CHECK_THROWS_AS(kdr(std::vector<std::uint8_t>{}, std::vector<std::uint8_t>{}), InvalidArgument);

    Rng rng(Seed::from_master(1));
    std::vector<std::uint8_t> a(10000), b(10000);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = rng.bit() ? 1 : 0;
        b[i] = rng.bit() ? 1 : 0;
    }
    CHECK(std::abs(kdr(a, b) - 0.5) <= 0.015);
}

TEST_CASE("key generation rate and its bound")
{
    ProbingSchedule s;
    s.oversampling = 1;
    CHECK(kgr_bound(s, 1) == doctest::Approx(250.0));
    CHECK(237.45 <= kgr_bound(s, 1));
    s.oversampling = 4;
    CHECK(kgr_bound(s, 1) == doctest::Approx(100.0));
    CHECK(97.39 <= kgr_bound(s, 1));
    CHECK(kgr_bound(s, 2) == doctest::Approx(200.0));

    s.configurations = 400;
    CHECK(kgr(400, s) == doctest::Approx(100.0));
    CHECK(kgr(800, s, 2) == doctest::Approx(100.0));
    CHECK(kgr(300, s) == doctest::Approx(kgr_bound(s, 1) * 0.75));
    CHECK_THROWS_AS(kgr(1, s, 0), InvalidArgument);
}

TEST_CASE("Pearson coefficient")
{
    const std::vector<double> x = {1.0, 2.5, -0.3, 4.0, 0.7};
    std::vector<double> neg(x.size()), affine(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        neg[i] = -x[i];
        affine[i] = 3.0 * x[i] + 7.0;
    }
    CHECK(*pearson(x, x) == doctest::Approx(1.0));
    CHECK(*pearson(x, neg) == doctest::Approx(-1.0));
    CHECK(*pearson(x, affine) == doctest::Approx(1.0));
    CHECK_FALSE(pearson(x, std::vector<double>(5, 2.0)).has_value());
    CHECK_THROWS_AS(pearson(x, std::vector<double>{1.0}), DimensionMismatch);

    Rng rng(Seed::from_master(2));
    const auto y = normals(50, rng);
    const auto w = normals(50, rng);
    std::vector<double> y2(50), w2(50);
    for (std::size_t i = 0; i < 50; ++i) {
        y2[i] = 0.5 * y[i] - 2.0;
        w2[i] = 9.0 * w[i] + 1.0;
    }
    CHECK(*pearson(y2, w2) == doctest::Approx(*pearson(y, w)).epsilon(1e-12));
}

TEST_CASE("null distribution of the coefficient")
{
    Rng rng(Seed::from_master(3));
    int small = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto x = normals(400, rng);
        const auto y = normals(400, rng);
        small += std::abs(*pearson(x, y)) < 0.15 ? 1 : 0;
    }
    CHECK(small >= 950);
}

TEST_CASE("matrices and diagonal averaging")
{
    Rng rng(Seed::from_master(4));
    std::vector<std::vector<double>> x = {normals(100, rng), normals(100, rng), normals(100, rng)};
    auto neg = x;
    for (auto& s : neg) {
        for (auto& v : s) {
            v = -v;
        }
    }
    const auto same = pearson_matrix(x, x);
    const auto flipped = pearson_matrix(x, neg);
    CHECK(same.rows == 3);
    CHECK(same.cols == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(*same.at(k, k) == doctest::Approx(1.0));
        CHECK(*flipped.at(k, k) == doctest::Approx(-1.0));
    }
    CHECK(*avg_abs_corr(flipped) == doctest::Approx(1.0));
    CHECK(*avg_abs_corr(x, neg) == doctest::Approx(1.0));

    // A constant series leaves a missing entry that the average skips.
    auto with_constant = x;
    with_constant[1].assign(100, 1.0);
    const auto partial = pearson_matrix(x, with_constant);
    CHECK_FALSE(partial.at(1, 1).has_value());
    CHECK(*avg_abs_corr(partial) == doctest::Approx(1.0));
    std::vector<std::vector<double>> constants = {std::vector<double>(10, 1.0)};
    CHECK_FALSE(avg_abs_corr(pearson_matrix(constants, constants)).has_value());
}

TEST_CASE("CSV output")
{
    CorrelationMatrix m;
    m.rows = 2;
    m.cols = 2;
    m.values = {1.0, std::nullopt, -0.25, 0.5};
    std::ostringstream out;
    write_matrix_csv(out, m);
    CHECK(out.str() == "1,\n-0.25,0.5\n");
    CHECK(format_number(std::optional<double>{}) == "nan");
    CHECK(format_number(1.0 / 3.0) == "0.333333");
}
