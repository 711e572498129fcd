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

#include "irskg/randomness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>
#include <fftw3.h>

#include "irskg/error.hpp"

namespace irskg::nist {

namespace {

TestResult single(std::string name, double p, double statistic, std::string parameters = {})
{
    TestResult r;
    r.name = std::move(name);
    r.variants = {""};
    r.p_values = {p};
    r.statistic = statistic;
    r.parameters = std::move(parameters);
    return r;
}

void need(bool condition, const char* what)
{
    if (!condition) {
        throw InsufficientLength(what);
    }
}

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

// psi^2_m of the serial test over the cyclically extended sequence.
double psi_squared(BitView bits, std::size_t m)
{
    if (m == 0) {
        return 0.0;
    }
    const std::size_t n = bits.size();
    std::vector<std::size_t> counts(std::size_t{1} << m, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t v = 0;
        for (std::size_t j = 0; j < m; ++j) {
            v = (v << 1) | bits[(i + j) % n];
        }
        ++counts[v];
    }
    double sum = 0.0;
    for (auto c : counts) {
        sum += static_cast<double>(c) * static_cast<double>(c);
    }
    return sum * static_cast<double>(counts.size()) / static_cast<double>(n) - static_cast<double>(n);
}

// phi(m) of the approximate entropy test.
double phi(BitView bits, std::size_t m)
{
    if (m == 0) {
        return 0.0;
    }
    const std::size_t n = bits.size();
    std::vector<std::size_t> counts(std::size_t{1} << m, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t v = 0;
        for (std::size_t j = 0; j < m; ++j) {
            v = (v << 1) | bits[(i + j) % n];
        }
        ++counts[v];
    }
    double sum = 0.0;
    for (auto c : counts) {
        if (c) {
            const double p = static_cast<double>(c) / static_cast<double>(n);
            sum += p * std::log(p);
        }
    }
    return sum;
}

std::size_t rank_gf2(std::array<std::uint32_t, 32> rows)
{
    std::size_t rank = 0;
    for (int col = 31; col >= 0 && rank < 32; --col) {
        const std::uint32_t mask = 1u << col;
        std::size_t pivot = rank;
        while (pivot < 32 && !(rows[pivot] & mask)) {
            ++pivot;
        }
        if (pivot == 32) {
            continue;
        }
        std::swap(rows[rank], rows[pivot]);
        for (std::size_t r = 0; r < 32; ++r) {
            if (r != rank && (rows[r] & mask)) {
                rows[r] ^= rows[rank];
            }
        }
        ++rank;
    }
    return rank;
}

double rank_probability(int r)
{
    double product = 1.0;
    for (int i = 0; i < r; ++i) {
        const double f = 1.0 - std::pow(2.0, i - 32);
        product *= f * f / (1.0 - std::pow(2.0, i - r));
    }
    return std::pow(2.0, r * (64 - r) - 1024) * product;
}

std::size_t floor_log2(std::size_t n)
{
    std::size_t r = 0;
    while (n >>= 1) {
        ++r;
    }
    return r;
}

} // namespace

bool TestResult::passed() const
{
    return !skipped && !p_values.empty() &&
           std::all_of(p_values.begin(), p_values.end(), [](double p) { return p >= alpha; });
}

bool TestReport::all_passed() const
{
    return std::all_of(results.begin(), results.end(), [](const TestResult& r) { return r.skipped || r.passed(); });
}

std::size_t TestReport::skipped() const
{
    return static_cast<std::size_t>(
        std::count_if(results.begin(), results.end(), [](const TestResult& r) { return r.skipped; }));
}

const TestResult* TestReport::find(const std::string& name) const
{
    for (const auto& r : results) {
        if (r.name == name) {
            return &r;
        }
    }
    return nullptr;
}

double igamc(double a, double x)
{
    if (x <= 0.0) {
        return 1.0;
    }
    return boost::math::gamma_q(a, x);
}

TestResult frequency(BitView bits)
{
    need(!bits.empty(), "frequency test needs at least one bit");
    long sum = 0;
    for (auto b : bits) {
        sum += b ? 1 : -1;
    }
    const double s_obs = std::abs(static_cast<double>(sum)) / std::sqrt(static_cast<double>(bits.size()));
    return single("Frequency", std::erfc(s_obs / std::numbers::sqrt2), s_obs);
}

TestResult block_frequency(BitView bits, std::size_t block_length)
{
    need(block_length >= 1 && bits.size() >= block_length, "block frequency test needs at least one block");
    const std::size_t blocks = bits.size() / block_length;
    double chi = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
        std::size_t ones = 0;
        for (std::size_t i = 0; i < block_length; ++i) {
            ones += bits[b * block_length + i];
        }
        const double pi = static_cast<double>(ones) / static_cast<double>(block_length) - 0.5;
        chi += pi * pi;
    }
    chi *= 4.0 * static_cast<double>(block_length);
    return single("BlockFrequency", igamc(static_cast<double>(blocks) / 2.0, chi / 2.0), chi,
                  "M=" + std::to_string(block_length));
}

TestResult runs(BitView bits)
{
    need(bits.size() >= 2, "runs test needs at least two bits");
    const double n = static_cast<double>(bits.size());
    std::size_t ones = 0;
    for (auto b : bits) {
        ones += b;
    }
    const double pi = static_cast<double>(ones) / n;
    // Frequency prerequisite: a badly biased sequence fails outright.
    if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(n)) {
        return single("Runs", 0.0, 0.0, "frequency prerequisite failed");
    }
    std::size_t v = 1;
    for (std::size_t i = 0; i + 1 < bits.size(); ++i) {
        v += bits[i] != bits[i + 1] ? 1 : 0;
    }
    const double vobs = static_cast<double>(v);
    const double p = std::erfc(std::abs(vobs - 2.0 * n * pi * (1.0 - pi)) /
                               (2.0 * std::sqrt(2.0 * n) * pi * (1.0 - pi)));
    return single("Runs", p, vobs);
}

TestResult longest_run(BitView bits)
{
    need(bits.size() >= 128, "longest run test needs at least 128 bits");
    std::size_t block = 0;
    std::size_t lowest = 0;
    std::vector<double> pi;
    if (bits.size() < 6272) {
        block = 8;
        lowest = 1;
        pi = {0.2148, 0.3672, 0.2305, 0.1875};
    } else if (bits.size() < 750000) {
        block = 128;
        lowest = 4;
        pi = {0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124};
    } else {
        block = 10000;
        lowest = 10;
        pi = {0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727};
    }
    const std::size_t classes = pi.size();
    const std::size_t blocks = bits.size() / block;
    std::vector<std::size_t> nu(classes, 0);
    for (std::size_t b = 0; b < blocks; ++b) {
        std::size_t run = 0, longest = 0;
        for (std::size_t i = 0; i < block; ++i) {
            run = bits[b * block + i] ? run + 1 : 0;
            longest = std::max(longest, run);
        }
        const std::size_t cls = std::clamp(longest, lowest, lowest + classes - 1) - lowest;
        ++nu[cls];
    }
    double chi = 0.0;
    for (std::size_t i = 0; i < classes; ++i) {
        const double expected = static_cast<double>(blocks) * pi[i];
        chi += (static_cast<double>(nu[i]) - expected) * (static_cast<double>(nu[i]) - expected) / expected;
    }
    const double k = static_cast<double>(classes - 1);
    return single("LongestRun", igamc(k / 2.0, chi / 2.0), chi, "M=" + std::to_string(block));
}

TestResult matrix_rank(BitView bits)
{
    constexpr std::size_t side = 32;
    need(bits.size() >= side * side, "rank test needs at least one 32x32 matrix");
    const std::size_t matrices = bits.size() / (side * side);
    std::size_t full = 0, minus_one = 0;
    for (std::size_t mtx = 0; mtx < matrices; ++mtx) {
        std::array<std::uint32_t, 32> rows{};
        for (std::size_t r = 0; r < side; ++r) {
            std::uint32_t row = 0;
            for (std::size_t c = 0; c < side; ++c) {
                row = (row << 1) | bits[mtx * side * side + r * side + c];
            }
            rows[r] = row;
        }
        const std::size_t rank = rank_gf2(rows);
        if (rank == side) {
            ++full;
        } else if (rank == side - 1) {
            ++minus_one;
        }
    }
    const double n = static_cast<double>(matrices);
    const double p32 = rank_probability(32);
    const double p31 = rank_probability(31);
    const double p30 = 1.0 - (p32 + p31);
    const double f32 = static_cast<double>(full);
    const double f31 = static_cast<double>(minus_one);
    const double f30 = n - f32 - f31;
    const double chi = (f32 - n * p32) * (f32 - n * p32) / (n * p32) + (f31 - n * p31) * (f31 - n * p31) / (n * p31) +
                       (f30 - n * p30) * (f30 - n * p30) / (n * p30);
    return single("Rank", std::exp(-chi / 2.0), chi, "32x32");
}

TestResult spectral(BitView bits)
{
    need(bits.size() >= 2, "spectral test needs at least two bits");
    const std::size_t n = bits.size();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = bits[i] ? 1.0 : -1.0;
    }
    std::vector<fftw_complex> spectrum(n / 2 + 1);
    // FFTW planning is not thread-safe.
    static std::mutex planner;
    fftw_plan plan = nullptr;
    {
        std::lock_guard lock(planner);
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), x.data(), spectrum.data(), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner);
        fftw_destroy_plan(plan);
    }

    const double nd = static_cast<double>(n);
    const double threshold = std::sqrt(std::log(1.0 / 0.05) * nd);
    std::size_t below = 0;
    for (std::size_t i = 0; i < n / 2; ++i) {
        const double modulus = std::hypot(spectrum[i][0], spectrum[i][1]);
        below += modulus < threshold ? 1 : 0;
    }
    const double expected = 0.95 * nd / 2.0;
    const double d = (static_cast<double>(below) - expected) / std::sqrt(nd * 0.95 * 0.05 / 4.0);
    return single("FFT", std::erfc(std::abs(d) / std::numbers::sqrt2), d);
}

TestResult non_overlapping_template(BitView bits, std::span<const std::uint8_t> pattern, std::size_t blocks)
{
    const std::size_t m = pattern.size();
    need(m >= 1 && blocks >= 1, "template test needs a template and at least one block");
    const std::size_t block = bits.size() / blocks;
    need(block >= m, "template test blocks are shorter than the template");

    const double md = static_cast<double>(m);
    const double mu = static_cast<double>(block - m + 1) / std::pow(2.0, md);
    const double var = static_cast<double>(block) * (1.0 / std::pow(2.0, md) - (2.0 * md - 1.0) / std::pow(2.0, 2.0 * md));
    double chi = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
        const auto* start = bits.data() + b * block;
        std::size_t hits = 0;
        std::size_t i = 0;
        while (i + m <= block) {
            if (std::equal(pattern.begin(), pattern.end(), start + i)) {
                ++hits;
                i += m;
            } else {
                ++i;
            }
        }
        chi += (static_cast<double>(hits) - mu) * (static_cast<double>(hits) - mu) / var;
    }
    std::string tmpl;
    for (auto b : pattern) {
        tmpl.push_back(b ? '1' : '0');
    }
    return single("NonOverlappingTemplate", igamc(static_cast<double>(blocks) / 2.0, chi / 2.0), chi,
                  "B=" + tmpl + " N=" + std::to_string(blocks));
}

TestResult universal(BitView bits, std::size_t block_length, std::size_t init_blocks)
{
    static constexpr std::array<double, 17> expected = {
        0.0,       0.7326495, 1.5374383, 2.4016068, 3.3112247, 4.2534266, 5.2177052, 6.1962507, 7.1836656,
        8.1764248, 9.1723243, 10.170032, 11.168765, 12.168070, 13.167693, 14.167488, 15.167379};
    static constexpr std::array<double, 17> variance = {0.0,   0.690, 1.338, 1.901, 2.358, 2.705,
                                                        2.954, 3.125, 3.238, 3.311, 3.356, 3.384,
                                                        3.401, 3.410, 3.416, 3.419, 3.421};
    const std::size_t L = block_length;
    need(L >= 1 && L <= 16, "universal test block length must be 1..16");
    const std::size_t total = bits.size() / L;
    need(total > init_blocks, "universal test needs test blocks after initialisation");
    const std::size_t Q = init_blocks;
    const std::size_t K = total - Q;

    std::vector<std::size_t> last(std::size_t{1} << L, 0);
    auto block_value = [&](std::size_t index) {
        std::size_t v = 0;
        for (std::size_t j = 0; j < L; ++j) {
            v = (v << 1) | bits[index * L + j];
        }
        return v;
    };
    for (std::size_t i = 1; i <= Q; ++i) {
        last[block_value(i - 1)] = i;
    }
    double sum = 0.0;
    for (std::size_t i = Q + 1; i <= Q + K; ++i) {
        const std::size_t v = block_value(i - 1);
        sum += std::log2(static_cast<double>(i - last[v]));
        last[v] = i;
    }
    const double kd = static_cast<double>(K);
    const double ld = static_cast<double>(L);
    const double fn = sum / kd;
    const double c = 0.7 - 0.8 / ld + (4.0 + 32.0 / ld) * std::pow(kd, -3.0 / ld) / 15.0;
    const double sigma = c * std::sqrt(variance[L] / kd);
    const double p = std::erfc(std::abs(fn - expected[L]) / (std::numbers::sqrt2 * sigma));
    return single("Universal", p, fn, "L=" + std::to_string(L) + " Q=" + std::to_string(Q));
}

TestResult serial(BitView bits, std::size_t block_length)
{
    const std::size_t m = block_length;
    need(m >= 2 && bits.size() >= m, "serial test needs m >= 2 and n >= m");
    const double psi_m = psi_squared(bits, m);
    const double psi_m1 = psi_squared(bits, m - 1);
    const double psi_m2 = psi_squared(bits, m - 2);
    const double del1 = psi_m - psi_m1;
    const double del2 = psi_m - 2.0 * psi_m1 + psi_m2;
    TestResult r;
    r.name = "Serial";
    r.variants = {"1", "2"};
    r.p_values = {igamc(std::pow(2.0, static_cast<double>(m) - 2.0), del1 / 2.0),
                  igamc(std::pow(2.0, static_cast<double>(m) - 3.0), del2 / 2.0)};
    r.statistic = del1;
    r.parameters = "m=" + std::to_string(m);
    return r;
}

TestResult approximate_entropy(BitView bits, std::size_t block_length)
{
    const std::size_t m = block_length;
    need(m >= 1 && bits.size() > m, "approximate entropy test needs n > m");
    const double apen = phi(bits, m) - phi(bits, m + 1);
    const double chi = 2.0 * static_cast<double>(bits.size()) * (std::log(2.0) - apen);
    return single("ApproximateEntropy", igamc(std::pow(2.0, static_cast<double>(m) - 1.0), chi / 2.0), chi,
                  "m=" + std::to_string(m));
}

namespace {

double cusum_p_value(std::size_t n_bits, long z_max)
{
    const double n = static_cast<double>(n_bits);
    const double z = static_cast<double>(z_max);
    const double sqrt_n = std::sqrt(n);
    double sum1 = 0.0;
    for (int k = static_cast<int>((-n / z + 1.0) / 4.0); k <= static_cast<int>((n / z - 1.0) / 4.0); ++k) {
        sum1 += normal_cdf((4.0 * k + 1.0) * z / sqrt_n) - normal_cdf((4.0 * k - 1.0) * z / sqrt_n);
    }
    double sum2 = 0.0;
    for (int k = static_cast<int>((-n / z - 3.0) / 4.0); k <= static_cast<int>((n / z - 1.0) / 4.0); ++k) {
        sum2 += normal_cdf((4.0 * k + 3.0) * z / sqrt_n) - normal_cdf((4.0 * k + 1.0) * z / sqrt_n);
    }
    return 1.0 - sum1 + sum2;
}

} // namespace

TestResult cumulative_sums(BitView bits)
{
    need(!bits.empty(), "cumulative sums test needs at least one bit");
    long s = 0, forward = 0;
    for (auto b : bits) {
        s += b ? 1 : -1;
        forward = std::max(forward, std::abs(s));
    }
    s = 0;
    long reverse = 0;
    for (auto it = bits.rbegin(); it != bits.rend(); ++it) {
        s += *it ? 1 : -1;
        reverse = std::max(reverse, std::abs(s));
    }
    TestResult r;
    r.name = "CumulativeSums";
    r.variants = {"forward", "reverse"};
    r.p_values = {cusum_p_value(bits.size(), forward), cusum_p_value(bits.size(), reverse)};
    r.statistic = static_cast<double>(forward);
    return r;
}

TestReport run_suite(BitView bits, const SuiteParams& params)
{
    const std::size_t n = bits.size();
    const std::size_t log2n = floor_log2(std::max<std::size_t>(n, 1));
    TestReport report;
    report.length = n;

    auto attempt = [&](const char* name, bool applicable, const std::string& reason, auto&& run) {
        if (!applicable) {
            TestResult r;
            r.name = name;
            r.skipped = true;
            r.skip_reason = reason;
            report.results.push_back(std::move(r));
            return;
        }
        try {
            report.results.push_back(run());
        } catch (const InsufficientLength& e) {
            TestResult r;
            r.name = name;
            r.skipped = true;
            r.skip_reason = e.what();
            report.results.push_back(std::move(r));
        }
    };

    std::vector<std::uint8_t> pattern;
    for (char c : params.template_bits) {
        require(c == '0' || c == '1', "template must consist of '0' and '1'");
        pattern.push_back(static_cast<std::uint8_t>(c - '0'));
    }

    const std::size_t serial_m =
        params.serial_m ? params.serial_m : std::max<std::size_t>(2, std::min<std::size_t>(16, log2n >= 3 ? log2n - 3 : 0));
    const std::size_t apen_m =
        params.apen_m ? params.apen_m : std::max<std::size_t>(2, std::min<std::size_t>(10, log2n >= 6 ? log2n - 6 : 0));

    std::size_t uni_l = params.universal_l;
    std::size_t uni_q = params.universal_q;
    if (uni_l == 0) {
        static constexpr std::array<std::size_t, 11> limits = {387840,    904960,    2068480,   4654080,
                                                               10342400,  22753280,  49643520,  107560960,
                                                               231669760, 496435200, 1059061760};
        uni_l = 5;
        for (std::size_t i = 0; i < limits.size() && n >= limits[i]; ++i) {
            uni_l = 6 + i;
        }
        uni_q = 10 * (std::size_t{1} << uni_l);
    } else if (uni_q == 0) {
        uni_q = 10 * (std::size_t{1} << uni_l);
    }
    const bool universal_ok = params.universal_l ? n >= (uni_q + 1) * uni_l : n >= universal_min_length;

    attempt("Frequency", n >= 100, "n < 100", [&] { return frequency(bits); });
    attempt("BlockFrequency", n >= 100, "n < 100", [&] { return block_frequency(bits, params.block_frequency_m); });
    attempt("CumulativeSums", n >= 100, "n < 100", [&] { return cumulative_sums(bits); });
    attempt("Runs", n >= 100, "n < 100", [&] { return runs(bits); });
    attempt("LongestRun", n >= 128, "n < 128", [&] { return longest_run(bits); });
    attempt("Rank", n >= 38912, "n < 38912", [&] { return matrix_rank(bits); });
    attempt("FFT", n >= 1000, "n < 1000", [&] { return spectral(bits); });
    attempt("NonOverlappingTemplate", n >= params.template_blocks * (pattern.size() + 1), "blocks shorter than template",
            [&] { return non_overlapping_template(bits, pattern, params.template_blocks); });
    attempt("Universal", universal_ok, "n < " + std::to_string(universal_min_length),
            [&] { return universal(bits, uni_l, uni_q); });
    attempt("ApproximateEntropy", apen_m + 5 < log2n, "m >= floor(log2 n) - 5",
            [&] { return approximate_entropy(bits, apen_m); });
    attempt("Serial", serial_m + 2 < log2n, "m >= floor(log2 n) - 2", [&] { return serial(bits, serial_m); });
    return report;
}

void write_report_csv(std::ostream& out, const TestReport& report)
{
    out << "test,variant,p_value,pass,parameters\n";
    for (const auto& r : report.results) {
        if (r.skipped) {
            out << r.name << ",,skipped,," << r.skip_reason << '\n';
            continue;
        }
        for (std::size_t i = 0; i < r.p_values.size(); ++i) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.6f", r.p_values[i]);
            out << r.name << ',' << r.variants[i] << ',' << buf << ',' << (r.p_values[i] >= alpha ? "pass" : "fail")
                << ',' << r.parameters << '\n';
        }
    }
}

} // namespace irskg::nist
