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

#include "irskg/probing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "irskg/error.hpp"

namespace irskg {

void ProbingSchedule::validate() const
{
    require(surface_update_s > 0.0, "surface update time must be positive");
    require(probe_interval_s > 0.0, "probe interval must be positive");
    require(oversampling >= 1, "oversampling factor must be >= 1");
    require(configurations >= 1, "need at least one configuration");
    require(sample_offset < oversampling, "sample offset must be smaller than the oversampling factor");
}

double ProbingSchedule::dwell_s() const noexcept
{
    return surface_update_s + static_cast<double>(oversampling) * probe_interval_s;
}

double ProbingSchedule::duration_s() const noexcept
{
    return static_cast<double>(configurations) * dwell_s();
}

PilotSymbols PilotSymbols::random(std::size_t subcarriers, Rng& rng)
{
    static const Complex qpsk[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    PilotSymbols pilots;
    pilots.alice.resize(subcarriers);
    pilots.bob.resize(subcarriers);
    for (auto& x : pilots.alice) {
        x = qpsk[rng.below(4)];
    }
    for (auto& x : pilots.bob) {
        x = qpsk[rng.below(4)];
    }
    return pilots;
}

PilotSymbols PilotSymbols::unit(std::size_t subcarriers)
{
    return {std::vector<Complex>(subcarriers, Complex{1.0, 0.0}), std::vector<Complex>(subcarriers, Complex{1.0, 0.0})};
}

std::vector<StreamId> all_streams(const LinkEnsemble& links)
{
    std::vector<StreamId> streams;
    streams.reserve(links.subcarriers() * links.spatial_channels());
    for (std::size_t j = 0; j < links.spatial_channels(); ++j) {
        for (std::size_t k = 0; k < links.subcarriers(); ++k) {
            streams.push_back({k, j});
        }
    }
    return streams;
}

namespace {

// LS estimate of `channel` from one received pilot.
Complex ls_estimate(Complex channel, Complex pilot, double noise_variance, Rng& rng)
{
    const Complex received = channel * pilot + rng.complex_normal(noise_variance);
    return received / pilot;
}

} // namespace

ChannelEstimates probe_round(const LinkEnsemble& links, const SurfaceConfig& config, const PilotSymbols& pilots,
                             NoiseModel noise, std::size_t k, std::size_t j, Rng& rng)
{
    if (pilots.alice.size() <= k || pilots.bob.size() <= k) {
        throw DimensionMismatch("pilot symbols do not cover subcarrier " + std::to_string(k));
    }
    const Complex h_ab = effective_channel(links, config, k, j, LinkPath::alice_bob);
    const Complex h_eb = effective_channel(links, config, k, j, LinkPath::eve_from_bob);
    ChannelEstimates out;
    out.alice = ls_estimate(h_ab, pilots.bob[k], noise.variance, rng);
    out.bob = ls_estimate(h_ab, pilots.alice[k], noise.variance, rng);
    out.eve = ls_estimate(h_eb, pilots.bob[k], noise.variance, rng);
    return out;
}

std::size_t ObservationSeries::degenerate_streams() const
{
    return static_cast<std::size_t>(
        std::count_if(normalized.begin(), normalized.end(), [](const auto& s) { return s.empty(); }));
}

namespace {

// Effective channel of one stream split into a part fixed by the frozen
// elements and the cascade gains of the active elements.
struct StreamChannel {
    Complex fixed;
    std::vector<Complex> active_gain;

    Complex evaluate(const SurfaceConfig& config, const std::vector<std::size_t>& active) const
    {
        Complex sum{};
        for (std::size_t a = 0; a < active.size(); ++a) {
            sum += active_gain[a] * static_cast<double>(config.c[active[a]]);
        }
        return sum + fixed;
    }
};

StreamChannel split_stream(const LinkEnsemble& links, const SurfaceSchedule& surface, StreamId id, LinkPath path)
{
    const auto& active = surface.active_set();
    const auto& frozen = surface.frozen_config();
    std::vector<bool> is_active(links.elements(), false);
    for (std::size_t i : active) {
        is_active[i] = true;
    }
    StreamChannel out;
    Complex fixed{};
    for (std::size_t i = 0; i < links.elements(); ++i) {
        if (!is_active[i]) {
            fixed += links.cascade(path, i, id.subcarrier, id.spatial) * static_cast<double>(frozen.c[i]);
        }
    }
    out.fixed = fixed + links.direct(path, id.subcarrier, id.spatial);
    out.active_gain.reserve(active.size());
    for (std::size_t i : active) {
        out.active_gain.push_back(links.cascade(path, i, id.subcarrier, id.spatial));
    }
    return out;
}

void finish_series(ObservationSeries& series, std::size_t oversampling, bool keep_raw)
{
    for (std::size_t s = 0; s < series.raw.size(); ++s) {
        const auto mags = magnitudes(series.raw[s]);
        series.averaged[s] = block_average(mags, oversampling);
        try {
            series.normalized[s] = normalize(series.averaged[s]);
        } catch (const DegenerateEntropy&) {
            series.normalized[s].clear();
        } catch (const InsufficientLength&) {
            series.normalized[s].clear();
        }
        if (!keep_raw) {
            series.raw[s].clear();
            series.raw[s].shrink_to_fit();
        }
    }
}

} // namespace

ProbingRun run_probing(const LinkEnsemble& links, const ProbingSchedule& schedule, SurfaceSchedule& surface,
                       Rng& surface_rng, NoiseModel noise, const PilotSymbols& pilots, const Seed& noise_seed,
                       const ProbingOptions& options)
{
    schedule.validate();
    require(noise.variance >= 0.0, "noise variance must be >= 0");
    if (surface.elements() != links.elements()) {
        throw DimensionMismatch("surface schedule and link ensemble disagree on element count");
    }
    const auto streams = options.streams.empty() ? all_streams(links) : options.streams;
    for (const auto& id : streams) {
        if (id.subcarrier >= links.subcarriers() || id.spatial >= links.spatial_channels()) {
            throw DimensionMismatch("selected stream lies outside the link ensemble");
        }
        if (id.subcarrier >= pilots.alice.size() || id.subcarrier >= pilots.bob.size()) {
            throw DimensionMismatch("pilot symbols do not cover the selected streams");
        }
    }

    const std::size_t m = schedule.configurations;
    const std::size_t L = schedule.oversampling;

    ProbingRun run;
    run.configs.reserve(m);
    for (std::size_t n = 0; n < m; ++n) {
        run.configs.push_back(surface.next_config(surface_rng));
    }
    run.duration_s = schedule.duration_s();

    for (auto* series : {&run.alice, &run.bob, &run.eve}) {
        series->oversampling = L;
        series->streams = streams;
        series->raw.assign(streams.size(), {});
        series->averaged.assign(streams.size(), {});
        series->normalized.assign(streams.size(), {});
    }
    run.alice.owner = Party::alice;
    run.bob.owner = Party::bob;
    run.eve.owner = Party::eve;

    const auto& active = surface.active_set();
    const std::size_t shift = (L - schedule.sample_offset) % L;
    std::vector<Complex> h_ab(m);
    std::vector<Complex> h_eb(m);

    for (std::size_t s = 0; s < streams.size(); ++s) {
        const StreamId id = streams[s];
        const auto ab = split_stream(links, surface, id, LinkPath::alice_bob);
        const auto eb = split_stream(links, surface, id, LinkPath::eve_from_bob);
        for (std::size_t n = 0; n < m; ++n) {
            h_ab[n] = ab.evaluate(run.configs[n], active);
            h_eb[n] = eb.evaluate(run.configs[n], active);
        }

        Rng rng(noise_seed.child("stream", id.spatial * links.subcarriers() + id.subcarrier));
        const Complex x_alice = pilots.alice[id.subcarrier];
        const Complex x_bob = pilots.bob[id.subcarrier];
        auto& ra = run.alice.raw[s];
        auto& rb = run.bob.raw[s];
        auto& re = run.eve.raw[s];
        ra.resize(m * L);
        rb.resize(m * L);
        re.resize(m * L);
        for (std::size_t sample = 0; sample < m * L; ++sample) {
            const std::size_t n = std::min(m - 1, (sample + shift) / L);
            ra[sample] = ls_estimate(h_ab[n], x_bob, noise.variance, rng);
            rb[sample] = ls_estimate(h_ab[n], x_alice, noise.variance, rng);
            re[sample] = ls_estimate(h_eb[n], x_bob, noise.variance, rng);
        }
    }

    finish_series(run.alice, L, options.keep_raw);
    finish_series(run.bob, L, options.keep_raw);
    finish_series(run.eve, L, options.keep_raw);
    return run;
}

std::vector<double> magnitudes(std::span<const Complex> values)
{
    std::vector<double> out(values.size());
    std::transform(values.begin(), values.end(), out.begin(), [](Complex v) { return std::abs(v); });
    return out;
}

std::vector<double> block_average(std::span<const double> values, std::size_t oversampling)
{
    require(oversampling >= 1, "oversampling factor must be >= 1");
    if (values.size() % oversampling != 0) {
        throw DimensionMismatch("series length " + std::to_string(values.size()) + " is not divisible by " +
                                std::to_string(oversampling));
    }
    std::vector<double> out(values.size() / oversampling);
    for (std::size_t n = 0; n < out.size(); ++n) {
        double sum = 0.0;
        for (std::size_t l = 0; l < oversampling; ++l) {
            sum += values[n * oversampling + l];
        }
        out[n] = sum / static_cast<double>(oversampling);
    }
    return out;
}

std::vector<double> normalize(std::span<const double> values)
{
    if (values.size() < 2) {
        throw InsufficientLength("normalization needs at least two samples");
    }
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    const double sd = std::sqrt(ss / n);
    if (!(sd > 1e-13 * std::abs(mean)) || sd == 0.0) {
        throw DegenerateEntropy("series has no variance; the channel is static");
    }
    std::vector<double> out(values.size());
    std::transform(values.begin(), values.end(), out.begin(), [&](double v) { return (v - mean) / sd; });
    return out;
}

PeriodEstimate estimate_surface_period(std::span<const double> values, std::size_t max_period)
{
    if (values.size() < 4) {
        throw InsufficientLength("period estimation needs at least four samples");
    }
    std::vector<double> diffs(values.size() - 1);
    for (std::size_t s = 1; s < values.size(); ++s) {
        diffs[s - 1] = std::abs(values[s] - values[s - 1]);
    }
    const auto [lo_it, hi_it] = std::minmax_element(diffs.begin(), diffs.end());
    if (*hi_it <= 0.0) {
        throw DegenerateEntropy("series shows no variation");
    }

    // Two-cluster split of the step sizes: within-block jitter vs. surface switches.
    double threshold = 0.5 * (*lo_it + *hi_it);
    for (int iter = 0; iter < 100; ++iter) {
        double lo_sum = 0.0, hi_sum = 0.0;
        std::size_t lo_n = 0, hi_n = 0;
        for (double d : diffs) {
            if (d > threshold) {
                hi_sum += d;
                ++hi_n;
            } else {
                lo_sum += d;
                ++lo_n;
            }
        }
        const double lo_mean = lo_n ? lo_sum / static_cast<double>(lo_n) : 0.0;
        const double hi_mean = hi_n ? hi_sum / static_cast<double>(hi_n) : 0.0;
        const double next = 0.5 * (lo_mean + hi_mean);
        if (next == threshold) {
            break;
        }
        threshold = next;
    }

    std::vector<std::size_t> changes;
    for (std::size_t s = 1; s < values.size(); ++s) {
        if (diffs[s - 1] > threshold) {
            changes.push_back(s);
        }
    }
    if (changes.size() < 2) {
        throw DegenerateEntropy("too few change points to estimate a period");
    }

    std::map<std::size_t, std::size_t> spacing;
    for (std::size_t c = 1; c < changes.size(); ++c) {
        const std::size_t gap = changes[c] - changes[c - 1];
        if (gap <= max_period) {
            ++spacing[gap];
        }
    }
    std::size_t period = 0;
    std::size_t best = 0;
    for (const auto& [gap, count] : spacing) {
        if (count > best) {
            best = count;
            period = gap;
        }
    }
    if (period < 2) {
        throw DegenerateEntropy("no periodic surface modulation detected");
    }

    std::vector<std::size_t> phase(period, 0);
    for (std::size_t c : changes) {
        ++phase[c % period];
    }
    const auto top = std::max_element(phase.begin(), phase.end());
    if (2 * *top < changes.size()) {
        throw DegenerateEntropy("change points are not phase-locked to a period");
    }
    return {period, static_cast<std::size_t>(top - phase.begin())};
}

} // namespace irskg
