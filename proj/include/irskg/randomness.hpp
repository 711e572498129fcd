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
#include <span>
#include <string>
#include <vector>

namespace irskg::nist {

/// Significance level used for pass/fail.
inline constexpr double alpha = 0.01;

using BitView = std::span<const std::uint8_t>;

/// Result of one statistic; most tests produce a single p-value.
struct TestResult {
    std::string name;
    std::vector<std::string> variants; ///< label per p-value
    std::vector<double> p_values;
    double statistic = 0.0;            ///< main test statistic (chi^2, f_n, ...)
    std::string parameters;
    bool skipped = false;
    std::string skip_reason;

    bool passed() const;
};

struct TestReport {
    std::size_t length = 0;
    std::vector<TestResult> results;

    /// True when every test that ran passed; skipped tests neither pass nor fail.
    bool all_passed() const;
    std::size_t skipped() const;
    const TestResult* find(const std::string& name) const;
};

struct SuiteParams {
    std::size_t block_frequency_m = 128;
    std::string template_bits = "000000001";
    std::size_t template_blocks = 8;
    std::size_t serial_m = 0;      ///< 0 picks min(16, floor(log2 n) - 3), at least 2
    std::size_t apen_m = 0;        ///< 0 picks min(10, floor(log2 n) - 6), at least 2
    std::size_t universal_l = 0;   ///< 0 picks L (and Q = 10 * 2^L) from the sequence length
    std::size_t universal_q = 0;
};

// Individual tests. They check only what the formula needs structurally and
// throw InsufficientLength otherwise; recommended minimum lengths are applied
// by run_suite.
TestResult frequency(BitView bits);
TestResult block_frequency(BitView bits, std::size_t block_length);
TestResult runs(BitView bits);
TestResult longest_run(BitView bits);
TestResult matrix_rank(BitView bits);
TestResult spectral(BitView bits);
TestResult non_overlapping_template(BitView bits, std::span<const std::uint8_t> pattern, std::size_t blocks);
TestResult universal(BitView bits, std::size_t block_length, std::size_t init_blocks);
TestResult serial(BitView bits, std::size_t block_length);
TestResult approximate_entropy(BitView bits, std::size_t block_length);
TestResult cumulative_sums(BitView bits);

/// Smallest sequence length the Universal test is applied to.
inline constexpr std::size_t universal_min_length = 387840;

/// Runs every test, marking those whose recommended input size is not met as skipped.
TestReport run_suite(BitView bits, const SuiteParams& params = {});

/// CSV: test,variant,p_value,pass,parameters (skipped tests get p_value "skipped").
void write_report_csv(std::ostream& out, const TestReport& report);

/// Upper regularised incomplete gamma Q(a, x).
double igamc(double a, double x);

} // namespace irskg::nist
