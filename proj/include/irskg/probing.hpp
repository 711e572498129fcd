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
#include <span>
#include <vector>

#include "irskg/channel.hpp"
#include "irskg/rng.hpp"
#include "irskg/surface.hpp"

namespace irskg {

/// Timing of the synchronised ping-pong exchange.
struct ProbingSchedule {
    double surface_update_s = 0.002;
    double probe_interval_s = 0.002;
    std::size_t oversampling = 4;     ///< bidirectional probes per configuration, L
    std::size_t configurations = 400; ///< m
    /// Misalignment of the probe timeline against surface switching, in samples
    /// (0 = perfectly synchronised). Must be smaller than `oversampling`.
    std::size_t sample_offset = 0;

    void validate() const;
    /// Time spent on one configuration: T_su + L * T_p.
    double dwell_s() const noexcept;
    /// m * (T_su + L * T_p).
    double duration_s() const noexcept;
};

struct NoiseModel {
    double variance = 0.0;
};

/// Unit-modulus probe symbols, one per transmitting party and subcarrier.
struct PilotSymbols {
    std::vector<Complex> alice;
    std::vector<Complex> bob;

    /// Random QPSK symbols.
    static PilotSymbols random(std::size_t subcarriers, Rng& rng);
    /// All ones.
    static PilotSymbols unit(std::size_t subcarriers);
};

struct StreamId {
    std::size_t subcarrier = 0;
    std::size_t spatial = 0;

    friend bool operator==(const StreamId&, const StreamId&) = default;
};

/// Every (k, j) pair of an ensemble, spatial-major.
std::vector<StreamId> all_streams(const LinkEnsemble& links);

/// One LS estimate per party for a single probe.
struct ChannelEstimates {
    Complex alice;
    Complex bob;
    Complex eve;
};

/// A single bidirectional exchange on stream (k, j). Alice and Bob each divide
/// their received symbol by the other's pilot; Eve overhears Bob's packet.
/// Noise is drawn from `rng` in the order Alice, Bob, Eve.
ChannelEstimates probe_round(const LinkEnsemble& links, const SurfaceConfig& config, const PilotSymbols& pilots,
                             NoiseModel noise, std::size_t k, std::size_t j, Rng& rng);

/// One party's observations over all selected streams.
struct ObservationSeries {
    Party owner = Party::alice;
    std::size_t oversampling = 1;
    std::vector<StreamId> streams;
    std::vector<std::vector<Complex>> raw;       ///< m * L estimates per stream
    std::vector<std::vector<double>> averaged;   ///< m block-averaged magnitudes per stream
    std::vector<std::vector<double>> normalized; ///< z-scored `averaged`; empty when degenerate

    std::size_t degenerate_streams() const;
};

struct ProbingRun {
    ObservationSeries alice;
    ObservationSeries bob;
    ObservationSeries eve;
    std::vector<SurfaceConfig> configs; ///< kept in memory only
    double duration_s = 0.0;
};

struct ProbingOptions {
    std::vector<StreamId> streams; ///< empty selects every stream
    bool keep_raw = true;
};

/// Runs m configurations with L probes each. Noise for stream (k, j) comes from
/// `noise_seed.child("stream", j * K + k)`, so results do not depend on the
/// order in which streams are processed.
ProbingRun run_probing(const LinkEnsemble& links, const ProbingSchedule& schedule, SurfaceSchedule& surface,
                       Rng& surface_rng, NoiseModel noise, const PilotSymbols& pilots, const Seed& noise_seed,
                       const ProbingOptions& options = {});

std::vector<double> magnitudes(std::span<const Complex> values);

/// Mean of each run of L consecutive samples.
std::vector<double> block_average(std::span<const double> values, std::size_t oversampling);

/// Subtracts the mean and divides by the population standard deviation.
/// Throws DegenerateEntropy for a constant series.
std::vector<double> normalize(std::span<const double> values);

struct PeriodEstimate {
    std::size_t period = 0;
    std::size_t offset = 0; ///< changes occur at samples s with s % period == offset
};

/// Recovers the step period and phase of a piecewise-constant magnitude series
/// from the spacing of its change points.
PeriodEstimate estimate_surface_period(std::span<const double> values, std::size_t max_period = 64);

} // namespace irskg
