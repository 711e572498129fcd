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
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "irskg/channel.hpp"
#include "irskg/metrics.hpp"
#include "irskg/probing.hpp"
#include "irskg/randomness.hpp"
#include "irskg/rng.hpp"

namespace irskg {

struct CodeParams {
    bool enabled = true;
    unsigned field_degree = 7; ///< n = 2^m - 1
    unsigned t = 10;
    std::size_t margin = 32;
};

/// Everything needed to run the pipeline once.
struct PointConfig {
    Scenario scenario;
    ProbingSchedule probing;
    std::size_t active_elements = 128;
    unsigned bits = 1;
    CodeParams code;
    std::vector<std::size_t> subcarriers; ///< empty selects all
    std::vector<std::size_t> spatial;     ///< empty selects all
    std::optional<double> snr_db;         ///< informational once resolved into scenario.noise_variance
    double eve_distance_m = 0.0;          ///< Alice-Eve offset echoed in reports (0 when not swept)
    bool randomness = false;
    bool correlation_matrices = false;
    bool write_bits = false;
    nist::SuiteParams nist;

    void validate() const;
    std::vector<StreamId> streams() const;
};

enum class SweepAxis { none, active_elements, oversampling, bob_distance, eve_distance, snr_db, configurations };

std::string axis_name(SweepAxis axis);
SweepAxis parse_axis(const std::string& name);

struct SweepSpec {
    std::string name;
    SweepAxis axis = SweepAxis::none;
    std::vector<double> values;    ///< axis values; one implicit point for SweepAxis::none
    std::vector<bool> los;         ///< crossed with `values`; empty keeps the base flag
    PointConfig base;              ///< base configuration with this sweep's overrides applied
};

struct RunConfig {
    std::uint64_t master_seed = 1;
    std::size_t repetitions = 1;
    std::size_t workers = 0; ///< 0 = hardware concurrency
    std::string output_dir = "irskg_out";
    /// Length scale of the Eve correlation decay, rho_env = exp(-d_AE / d0).
    double eve_decay_m = 0.5;
    std::vector<SweepSpec> sweeps;
    std::string source; ///< resolved configuration as JSON text, echoed in the manifest

    void validate() const;
    /// Replaces the master seed everywhere it is echoed.
    void set_master_seed(std::uint64_t seed);
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

/// One sweep point after applying the axis value.
struct SweepPoint {
    std::size_t index = 0;
    double value = 0.0;
    PointConfig config;
};

std::vector<SweepPoint> expand_sweep(const SweepSpec& sweep, const RunConfig& run);

/// Seed for one repetition of one sweep point.
Seed repetition_seed(std::uint64_t master_seed, const std::string& sweep, std::size_t point, std::size_t repetition);

struct ExperimentReport {
    std::string sweep;
    std::string axis;
    std::size_t point = 0;
    double value = 0.0;
    std::size_t repetition = 0;
    std::string seed; ///< hex fingerprint of the repetition seed
    PointConfig config;

    std::size_t streams = 0;
    std::size_t degenerate_streams = 0;
    std::size_t key_bits = 0; ///< quantizer output per party
    double kdr_ab = 0.0;
    double kdr_ae = 0.0;
    std::optional<double> corr_ab;
    std::optional<double> corr_ae;

    std::size_t blocks = 0;
    std::size_t discarded = 0;
    std::size_t decoder_failures = 0;
    std::size_t undetected = 0;
    std::size_t reconciled_bits = 0;
    std::size_t final_key_bits = 0;
    bool final_keys_match = false;

    double kgr = 0.0;       ///< reconciled bits per second per stream
    double kgr_bound = 0.0;
    double kgr_final = 0.0; ///< amplified bits per second per stream
    double duration_s = 0.0;

    std::string generator;
    std::optional<nist::TestReport> randomness;
    std::vector<CorrelationMatrix> corr_ab_matrices; ///< K x K per (j, j') pair, row-major over j
    std::vector<CorrelationMatrix> corr_ae_matrices;

    std::vector<std::uint8_t> alice_key; ///< kept only when config.write_bits or randomness is set
    std::vector<std::uint8_t> bob_key;
    std::vector<std::uint8_t> final_key;
};

/// Runs links, probing, quantization, reconciliation and amplification once.
ExperimentReport run_point(const PointConfig& config, const Seed& seed);

struct SweepProgress {
    std::size_t done = 0;
    std::size_t total = 0;
    const ExperimentReport* report = nullptr;
};

/// Runs every point x repetition of the selected sweeps on a worker pool.
/// Reports come back ordered by (sweep, point, repetition).
std::vector<ExperimentReport> run_sweep(const RunConfig& config, const std::vector<std::string>& sweep_filter = {},
                                        const std::function<void(const SweepProgress&)>& progress = {});

/// One row per report with a fixed column order.
void emit_report(std::ostream& out, const std::vector<ExperimentReport>& reports);
/// Mean and standard deviation per sweep point across repetitions.
void emit_aggregate(std::ostream& out, const std::vector<ExperimentReport>& reports);
/// Human-readable overview with per-report property checks.
void emit_summary(std::ostream& out, const std::vector<ExperimentReport>& reports);

/// Writes per-sweep CSVs, bit files, randomness reports, matrices, manifest.json and summary.txt.
void write_outputs(const RunConfig& config, const std::vector<ExperimentReport>& reports);

} // namespace irskg
