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

#include "irskg/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "irskg/bch.hpp"
#include "irskg/error.hpp"
#include "irskg/postprocess.hpp"
#include "irskg/quantizer.hpp"
#include "irskg/surface.hpp"

namespace irskg {

using nlohmann::json;

namespace {

constexpr const char* run_keys[] = {"master_seed", "repetitions", "workers", "output_dir", "eve_decay_m", "sweeps"};

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where)
{
    if (!obj.is_object()) {
        throw InvalidArgument(where + " must be a JSON object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw InvalidArgument("unknown key '" + key + "' in " + where);
        }
    }
}

template <typename T>
void read(const json& obj, const char* key, T& field)
{
    if (!obj.contains(key)) {
        return;
    }
    try {
        field = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("bad value for '") + key + "': " + e.what());
    }
}

void read_count(const json& obj, const char* key, std::size_t& field)
{
    if (!obj.contains(key)) {
        return;
    }
    const auto& v = obj.at(key);
    if (!v.is_number_unsigned()) {
        throw InvalidArgument(std::string("'") + key + "' must be a non-negative integer");
    }
    field = v.get<std::size_t>();
}

double read_rician(const json& v)
{
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "infinity") {
            return std::numeric_limits<double>::infinity();
        }
        throw InvalidArgument("rician_k must be a number or \"inf\"");
    }
    if (!v.is_number()) {
        throw InvalidArgument("rician_k must be a number or \"inf\"");
    }
    return v.get<double>();
}

Scenario parse_scenario(const json& j)
{
    check_keys(j,
               {"elements", "subcarriers", "spatial_channels", "alice_irs_m", "bob_irs_m", "eve_irs_m", "alice_bob_m",
                "alice_eve_m", "bob_eve_m", "line_of_sight", "path_loss_exponent", "rician_k", "taps", "element_gain",
                "eve_correlation", "eve_shares_bob_hop", "noise_variance"},
               "scenario");
    Scenario s;
    read_count(j, "elements", s.elements);
    read_count(j, "subcarriers", s.subcarriers);
    read_count(j, "spatial_channels", s.spatial_channels);
    read(j, "alice_irs_m", s.alice_irs_m);
    read(j, "bob_irs_m", s.bob_irs_m);
    read(j, "eve_irs_m", s.eve_irs_m);
    read(j, "alice_bob_m", s.alice_bob_m);
    read(j, "alice_eve_m", s.alice_eve_m);
    read(j, "bob_eve_m", s.bob_eve_m);
    read(j, "line_of_sight", s.line_of_sight);
    read(j, "path_loss_exponent", s.path_loss_exponent);
    if (j.contains("rician_k")) {
        s.rician_k = read_rician(j.at("rician_k"));
    }
    read_count(j, "taps", s.taps);
    read(j, "element_gain", s.element_gain);
    read(j, "eve_correlation", s.eve_correlation);
    read(j, "eve_shares_bob_hop", s.eve_shares_bob_hop);
    read(j, "noise_variance", s.noise_variance);
    return s;
}

ProbingSchedule parse_probing(const json& j)
{
    check_keys(j, {"surface_update_s", "probe_interval_s", "oversampling", "configurations", "sample_offset"},
               "probing");
    ProbingSchedule p;
    read(j, "surface_update_s", p.surface_update_s);
    read(j, "probe_interval_s", p.probe_interval_s);
    read_count(j, "oversampling", p.oversampling);
    read_count(j, "configurations", p.configurations);
    read_count(j, "sample_offset", p.sample_offset);
    return p;
}

CodeParams parse_code(const json& j)
{
    check_keys(j, {"enabled", "m", "t", "margin"}, "code");
    CodeParams c;
    read(j, "enabled", c.enabled);
    read(j, "m", c.field_degree);
    read(j, "t", c.t);
    read_count(j, "margin", c.margin);
    return c;
}

nist::SuiteParams parse_nist(const json& j)
{
    check_keys(j,
               {"block_frequency_m", "template_bits", "template_blocks", "serial_m", "apen_m", "universal_l",
                "universal_q"},
               "nist");
    nist::SuiteParams p;
    read_count(j, "block_frequency_m", p.block_frequency_m);
    read(j, "template_bits", p.template_bits);
    read_count(j, "template_blocks", p.template_blocks);
    read_count(j, "serial_m", p.serial_m);
    read_count(j, "apen_m", p.apen_m);
    read_count(j, "universal_l", p.universal_l);
    read_count(j, "universal_q", p.universal_q);
    return p;
}

std::vector<std::size_t> read_indices(const json& j, const char* key)
{
    std::vector<std::size_t> out;
    if (!j.contains(key)) {
        return out;
    }
    const auto& v = j.at(key);
    if (!v.is_array()) {
        throw InvalidArgument(std::string("'") + key + "' must be an array of indices");
    }
    for (const auto& e : v) {
        if (!e.is_number_unsigned()) {
            throw InvalidArgument(std::string("'") + key + "' must contain non-negative integers");
        }
        out.push_back(e.get<std::size_t>());
    }
    return out;
}

PointConfig parse_point(const json& j)
{
    check_keys(j,
               {"scenario", "probing", "active_elements", "bits", "code", "snr_db", "subcarriers", "spatial",
                "randomness", "correlation_matrices", "write_bits", "nist"},
               "point configuration");
    PointConfig p;
    if (j.contains("scenario")) {
        p.scenario = parse_scenario(j.at("scenario"));
    }
    if (j.contains("probing")) {
        p.probing = parse_probing(j.at("probing"));
    }
    p.active_elements = p.scenario.elements;
    read_count(j, "active_elements", p.active_elements);
    read(j, "bits", p.bits);
    if (j.contains("code")) {
        p.code = parse_code(j.at("code"));
    }
    if (j.contains("snr_db")) {
        if (j.contains("scenario") && j.at("scenario").contains("noise_variance")) {
            throw InvalidArgument("give either snr_db or scenario.noise_variance, not both");
        }
        double snr = 0.0;
        read(j, "snr_db", snr);
        p.snr_db = snr;
        p.scenario.noise_variance = noise_variance_for_snr(p.scenario, snr);
    }
    p.subcarriers = read_indices(j, "subcarriers");
    p.spatial = read_indices(j, "spatial");
    read(j, "randomness", p.randomness);
    read(j, "correlation_matrices", p.correlation_matrices);
    read(j, "write_bits", p.write_bits);
    if (j.contains("nist")) {
        p.nist = parse_nist(j.at("nist"));
    }
    return p;
}

json scenario_json(const Scenario& s)
{
    json j;
    j["elements"] = s.elements;
    j["subcarriers"] = s.subcarriers;
    j["spatial_channels"] = s.spatial_channels;
    j["alice_irs_m"] = s.alice_irs_m;
    j["bob_irs_m"] = s.bob_irs_m;
    j["eve_irs_m"] = s.eve_irs_m;
    j["alice_bob_m"] = s.alice_bob_m;
    j["alice_eve_m"] = s.alice_eve_m;
    j["bob_eve_m"] = s.bob_eve_m;
    j["line_of_sight"] = s.line_of_sight;
    j["path_loss_exponent"] = s.path_loss_exponent;
    if (std::isinf(s.rician_k)) {
        j["rician_k"] = "inf";
    } else {
        j["rician_k"] = s.rician_k;
    }
    j["taps"] = s.taps;
    j["element_gain"] = s.element_gain;
    j["eve_correlation"] = s.eve_correlation;
    j["eve_shares_bob_hop"] = s.eve_shares_bob_hop;
    j["noise_variance"] = s.noise_variance;
    return j;
}

json point_json(const PointConfig& p)
{
    json j;
    j["scenario"] = scenario_json(p.scenario);
    j["probing"] = {{"surface_update_s", p.probing.surface_update_s},
                    {"probe_interval_s", p.probing.probe_interval_s},
                    {"oversampling", p.probing.oversampling},
                    {"configurations", p.probing.configurations},
                    {"sample_offset", p.probing.sample_offset}};
    j["active_elements"] = p.active_elements;
    j["bits"] = p.bits;
    j["code"] = {{"enabled", p.code.enabled}, {"m", p.code.field_degree}, {"t", p.code.t}, {"margin", p.code.margin}};
    if (p.snr_db) {
        j["snr_db"] = *p.snr_db;
    }
    j["subcarriers"] = p.subcarriers;
    j["spatial"] = p.spatial;
    j["randomness"] = p.randomness;
    j["correlation_matrices"] = p.correlation_matrices;
    j["write_bits"] = p.write_bits;
    j["nist"] = {{"block_frequency_m", p.nist.block_frequency_m}, {"template_bits", p.nist.template_bits},
                 {"template_blocks", p.nist.template_blocks},     {"serial_m", p.nist.serial_m},
                 {"apen_m", p.nist.apen_m},                       {"universal_l", p.nist.universal_l},
                 {"universal_q", p.nist.universal_q}};
    return j;
}

std::size_t as_count(double v, const char* what)
{
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e12) {
        throw InvalidArgument(std::string(what) + " values must be non-negative integers");
    }
    return static_cast<std::size_t>(v);
}

} // namespace

void PointConfig::validate() const
{
    scenario.validate();
    probing.validate();
    require(active_elements <= scenario.elements, "active element count exceeds the surface size");
    require(bits >= 1 && bits <= 4, "quantizer resolution must be 1..4 bits");
    for (auto k : subcarriers) {
        require(k < scenario.subcarriers, "selected subcarrier is out of range");
    }
    for (auto j : spatial) {
        require(j < scenario.spatial_channels, "selected spatial channel is out of range");
    }
    if (code.enabled) {
        require(code.field_degree >= 3 && code.field_degree <= 10, "code field degree must be 3..10");
        require(code.t >= 1, "code must correct at least one error");
    }
}

std::vector<StreamId> PointConfig::streams() const
{
    std::vector<std::size_t> ks = subcarriers;
    std::vector<std::size_t> js = spatial;
    if (ks.empty()) {
        ks.resize(scenario.subcarriers);
        std::iota(ks.begin(), ks.end(), std::size_t{0});
    }
    if (js.empty()) {
        js.resize(scenario.spatial_channels);
        std::iota(js.begin(), js.end(), std::size_t{0});
    }
    std::vector<StreamId> out;
    out.reserve(ks.size() * js.size());
    for (auto j : js) {
        for (auto k : ks) {
            out.push_back({k, j});
        }
    }
    return out;
}

std::string axis_name(SweepAxis axis)
{
    switch (axis) {
    case SweepAxis::none: return "none";
    case SweepAxis::active_elements: return "active_elements";
    case SweepAxis::oversampling: return "oversampling";
    case SweepAxis::bob_distance: return "bob_distance";
    case SweepAxis::eve_distance: return "eve_distance";
    case SweepAxis::snr_db: return "snr_db";
    case SweepAxis::configurations: return "configurations";
    }
    return "none";
}

SweepAxis parse_axis(const std::string& name)
{
    for (auto axis : {SweepAxis::none, SweepAxis::active_elements, SweepAxis::oversampling, SweepAxis::bob_distance,
                      SweepAxis::eve_distance, SweepAxis::snr_db, SweepAxis::configurations}) {
        if (axis_name(axis) == name) {
            return axis;
        }
    }
    throw InvalidArgument("unknown sweep axis '" + name + "'");
}

void RunConfig::validate() const
{
    require(repetitions >= 1, "repetitions must be >= 1");
    require(eve_decay_m > 0.0, "eve_decay_m must be positive");
    require(!sweeps.empty(), "no sweeps configured");
    for (const auto& s : sweeps) {
        require(!s.name.empty(), "sweep names must be non-empty");
        require(s.axis == SweepAxis::none || !s.values.empty(), "sweep '" + s.name + "' has no values");
        require(s.name.find_first_of("/\\ ") == std::string::npos, "sweep name '" + s.name + "' is not a file name");
        for (const auto& p : expand_sweep(s, *this)) {
            p.config.validate();
        }
    }
    for (std::size_t a = 0; a < sweeps.size(); ++a) {
        for (std::size_t b = a + 1; b < sweeps.size(); ++b) {
            require(sweeps[a].name != sweeps[b].name, "duplicate sweep name '" + sweeps[a].name + "'");
        }
    }
}

void RunConfig::set_master_seed(std::uint64_t seed)
{
    master_seed = seed;
    for (auto& s : sweeps) {
        s.base.scenario.master_seed = seed;
    }
    auto resolved = json::parse(source);
    resolved["master_seed"] = seed;
    source = resolved.dump(2);
}

RunConfig parse_run_config(const std::string& json_text)
{
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(std::string("configuration is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) {
        throw InvalidArgument("configuration must be a JSON object");
    }

    RunConfig run;
    if (root.contains("master_seed")) {
        if (!root.at("master_seed").is_number_unsigned()) {
            throw InvalidArgument("master_seed must be a non-negative integer");
        }
        run.master_seed = root.at("master_seed").get<std::uint64_t>();
    }
    read_count(root, "repetitions", run.repetitions);
    read_count(root, "workers", run.workers);
    read(root, "output_dir", run.output_dir);
    read(root, "eve_decay_m", run.eve_decay_m);

    json base = root;
    for (const char* key : run_keys) {
        base.erase(key);
    }

    json sweeps = root.contains("sweeps") ? root.at("sweeps") : json::array();
    if (!sweeps.is_array()) {
        throw InvalidArgument("'sweeps' must be an array");
    }
    if (sweeps.empty()) {
        sweeps.push_back({{"name", "point"}});
    }
    for (const auto& s : sweeps) {
        check_keys(s, {"name", "axis", "values", "los", "set"}, "sweep");
        SweepSpec spec;
        read(s, "name", spec.name);
        std::string axis = "none";
        read(s, "axis", axis);
        spec.axis = parse_axis(axis);
        read(s, "values", spec.values);
        read(s, "los", spec.los);
        json point = base;
        if (s.contains("set")) {
            check_keys(s.at("set"),
                       {"scenario", "probing", "active_elements", "bits", "code", "snr_db", "subcarriers", "spatial",
                        "randomness", "correlation_matrices", "write_bits", "nist"},
                       "sweep '" + spec.name + "' set");
            point.merge_patch(s.at("set"));
        }
        spec.base = parse_point(point);
        spec.base.scenario.master_seed = run.master_seed;
        run.sweeps.push_back(std::move(spec));
    }

    json resolved;
    resolved["master_seed"] = run.master_seed;
    resolved["repetitions"] = run.repetitions;
    resolved["eve_decay_m"] = run.eve_decay_m;
    resolved["sweeps"] = json::array();
    for (const auto& s : run.sweeps) {
        resolved["sweeps"].push_back(
            {{"name", s.name}, {"axis", axis_name(s.axis)}, {"values", s.values}, {"los", s.los}, {"base", point_json(s.base)}});
    }
    run.source = resolved.dump(2);
    run.validate();
    return run;
}

RunConfig load_run_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open configuration file '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_run_config(text.str());
}

std::vector<SweepPoint> expand_sweep(const SweepSpec& sweep, const RunConfig& run)
{
    const std::vector<double> values = sweep.axis == SweepAxis::none ? std::vector<double>{0.0} : sweep.values;
    std::vector<std::optional<bool>> los_flags;
    if (sweep.los.empty()) {
        los_flags.push_back(std::nullopt);
    } else {
        los_flags.assign(sweep.los.begin(), sweep.los.end());
    }

    std::vector<SweepPoint> points;
    for (const auto& los : los_flags) {
        for (double v : values) {
            SweepPoint p;
            p.index = points.size();
            p.value = v;
            p.config = sweep.base;
            auto& c = p.config;
            if (los) {
                c.scenario.line_of_sight = *los;
            }
            switch (sweep.axis) {
            case SweepAxis::none: break;
            case SweepAxis::active_elements: c.active_elements = as_count(v, "active_elements"); break;
            case SweepAxis::oversampling: c.probing.oversampling = as_count(v, "oversampling"); break;
            case SweepAxis::configurations: c.probing.configurations = as_count(v, "configurations"); break;
            case SweepAxis::bob_distance: c.scenario.bob_irs_m = v; break;
            case SweepAxis::eve_distance: {
                require(v > 0.0, "eve_distance values must be positive");
                auto& s = c.scenario;
                s.alice_eve_m = v;
                s.eve_irs_m = std::hypot(sweep.base.scenario.alice_irs_m, v);
                s.bob_eve_m = std::hypot(sweep.base.scenario.alice_bob_m, v);
                s.eve_correlation = std::exp(-v / run.eve_decay_m);
                c.eve_distance_m = v;
                break;
            }
            case SweepAxis::snr_db:
                c.snr_db = v;
                c.scenario.noise_variance = noise_variance_for_snr(sweep.base.scenario, v);
                break;
            }
            points.push_back(std::move(p));
        }
    }
    return points;
}

Seed repetition_seed(std::uint64_t master_seed, const std::string& sweep, std::size_t point, std::size_t repetition)
{
    return Seed::from_master(master_seed).child("sweep:" + sweep).child("point", point).child("repetition", repetition);
}

namespace {

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Correlation matrices per (j, j') pair over the selected subcarriers.
std::vector<CorrelationMatrix> pair_matrices(const PointConfig& config, const ObservationSeries& x,
                                             const ObservationSeries& y)
{
    const auto streams = config.streams();
    std::vector<std::size_t> js;
    for (const auto& s : streams) {
        if (std::find(js.begin(), js.end(), s.spatial) == js.end()) {
            js.push_back(s.spatial);
        }
    }
    std::vector<CorrelationMatrix> out;
    for (auto ja : js) {
        for (auto jb : js) {
            std::vector<std::vector<double>> xs, ys;
            for (std::size_t s = 0; s < streams.size(); ++s) {
                if (streams[s].spatial == ja) {
                    xs.push_back(x.averaged[s]);
                }
                if (streams[s].spatial == jb) {
                    ys.push_back(y.averaged[s]);
                }
            }
            out.push_back(pearson_matrix(xs, ys));
        }
    }
    return out;
}

} // namespace

ExperimentReport run_point(const PointConfig& config, const Seed& seed)
{
    config.validate();
    ExperimentReport report;
    report.config = config;
    report.seed = hex64(seed.fingerprint());
    report.generator = std::string(Rng::generator_name);

    const auto& s = config.scenario;
    Rng link_rng(seed.child("links"));
    const auto links = draw_links(s, link_rng);
    Rng setup_rng(seed.child("surface-setup"));
    SurfaceSchedule surface(s.elements, config.active_elements, config.probing.configurations, setup_rng);
    Rng pilot_rng(seed.child("pilots"));
    const auto pilots = PilotSymbols::random(s.subcarriers, pilot_rng);
    Rng surface_rng(seed.child("surface"));

    ProbingOptions options;
    options.streams = config.streams();
    options.keep_raw = false;
    const auto run = run_probing(links, config.probing, surface, surface_rng, NoiseModel{s.noise_variance}, pilots,
                                 seed.child("noise"), options);
    report.duration_s = run.duration_s;
    report.streams = options.streams.size();

    std::vector<std::uint8_t> key_a, key_b, key_ae, key_e;
    for (std::size_t i = 0; i < report.streams; ++i) {
        const auto& za = run.alice.normalized[i];
        const auto& zb = run.bob.normalized[i];
        const auto& ze = run.eve.normalized[i];
        if (za.empty() || zb.empty()) {
            ++report.degenerate_streams;
            continue;
        }
        const auto ba = quantize(za, fit_thresholds(za, config.bits));
        const auto bb = quantize(zb, fit_thresholds(zb, config.bits));
        key_a.insert(key_a.end(), ba.bits.begin(), ba.bits.end());
        key_b.insert(key_b.end(), bb.bits.begin(), bb.bits.end());
        if (!ze.empty()) {
            const auto be = quantize(ze, fit_thresholds(ze, config.bits));
            key_ae.insert(key_ae.end(), ba.bits.begin(), ba.bits.end());
            key_e.insert(key_e.end(), be.bits.begin(), be.bits.end());
        }
    }
    report.key_bits = key_a.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    report.kdr_ab = key_a.empty() ? nan : kdr(key_a, key_b);
    report.kdr_ae = key_e.empty() ? nan : kdr(key_ae, key_e);
    report.corr_ab = avg_abs_corr(run.alice.averaged, run.bob.averaged);
    report.corr_ae = avg_abs_corr(run.alice.averaged, run.eve.averaged);
    if (config.correlation_matrices) {
        report.corr_ab_matrices = pair_matrices(config, run.alice, run.bob);
        report.corr_ae_matrices = pair_matrices(config, run.alice, run.eve);
    }

    std::vector<std::uint8_t> final_a, final_b;
    if (config.code.enabled && !key_a.empty()) {
        const BchCode code(config.code.field_degree, config.code.t);
        Rng sketch_rng(seed.child("sketch"));
        const auto rec = reconcile(key_a, key_b, code, sketch_rng);
        report.blocks = rec.blocks;
        report.discarded = rec.discarded;
        report.decoder_failures = rec.decoder_failures;
        report.undetected = rec.undetected;
        report.reconciled_bits = rec.alice.size();
        const LeakageBudget budget{rec.blocks - rec.discarded, code.n() - code.k(), config.code.margin};
        try {
            const auto length = amplified_length(rec.alice.size(), budget);
            Rng hash_rng(seed.child("hash"));
            const auto hash = HashSeed::random(rec.alice.size(), length, hash_rng);
            final_a = privacy_amplify(rec.alice, hash, budget);
            final_b = privacy_amplify(rec.bob, hash, budget);
        } catch (const BudgetExceeded&) {
            final_a.clear();
            final_b.clear();
        }
    } else {
        report.reconciled_bits = key_a.size();
        final_a = key_a;
        final_b = key_b;
    }
    report.final_key_bits = final_a.size();
    report.final_keys_match = verify_keys(final_a, final_b);

    report.kgr = kgr(report.reconciled_bits, config.probing, report.streams);
    report.kgr_final = kgr(report.final_key_bits, config.probing, report.streams);
    report.kgr_bound = kgr_bound(config.probing, config.bits);

    if (config.randomness) {
        report.randomness = nist::run_suite(key_a, config.nist);
    }
    if (config.write_bits || config.randomness) {
        report.alice_key = std::move(key_a);
        report.bob_key = std::move(key_b);
        report.final_key = std::move(final_a);
    }
    return report;
}

std::vector<ExperimentReport> run_sweep(const RunConfig& config, const std::vector<std::string>& sweep_filter,
                                        const std::function<void(const SweepProgress&)>& progress)
{
    config.validate();
    for (const auto& name : sweep_filter) {
        const bool known = std::any_of(config.sweeps.begin(), config.sweeps.end(),
                                       [&](const SweepSpec& s) { return s.name == name; });
        require(known, "sweep filter names unknown sweep '" + name + "'");
    }

    struct Task {
        const SweepSpec* sweep;
        SweepPoint point;
        std::size_t repetition;
    };
    std::vector<Task> tasks;
    for (const auto& sweep : config.sweeps) {
        if (!sweep_filter.empty() &&
            std::find(sweep_filter.begin(), sweep_filter.end(), sweep.name) == sweep_filter.end()) {
            continue;
        }
        for (const auto& point : expand_sweep(sweep, config)) {
            for (std::size_t r = 0; r < config.repetitions; ++r) {
                tasks.push_back({&sweep, point, r});
            }
        }
    }

    std::vector<ExperimentReport> reports(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    std::size_t done = 0;
    std::mutex progress_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) {
                return;
            }
            const auto& task = tasks[i];
            try {
                auto report = run_point(task.point.config, repetition_seed(config.master_seed, task.sweep->name,
                                                                           task.point.index, task.repetition));
                report.sweep = task.sweep->name;
                report.axis = axis_name(task.sweep->axis);
                report.point = task.point.index;
                report.value = task.point.value;
                report.repetition = task.repetition;
                reports[i] = std::move(report);
            } catch (...) {
                errors[i] = std::current_exception();
            }
            if (progress) {
                std::lock_guard lock(progress_mutex);
                progress({++done, tasks.size(), errors[i] ? nullptr : &reports[i]});
            }
        }
    };

    std::size_t workers = config.workers ? config.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, std::max<std::size_t>(tasks.size(), 1));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return reports;
}

namespace {

std::string join_indices(const std::vector<std::size_t>& v)
{
    if (v.empty()) {
        return "all";
    }
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? ";" : "") + std::to_string(v[i]);
    }
    return out;
}

std::optional<double> defined(double v)
{
    return std::isnan(v) ? std::nullopt : std::optional<double>(v);
}

struct Column {
    const char* name;
    std::function<std::string(const ExperimentReport&)> value;
};

std::string num(double v) { return format_number(v); }
std::string num(std::size_t v) { return std::to_string(v); }

const std::vector<Column>& report_columns()
{
    static const std::vector<Column> columns = {
        {"sweep", [](const auto& r) { return r.sweep; }},
        {"axis", [](const auto& r) { return r.axis; }},
        {"point", [](const auto& r) { return num(r.point); }},
        {"value", [](const auto& r) { return num(r.value); }},
        {"repetition", [](const auto& r) { return num(r.repetition); }},
        {"master_seed", [](const auto& r) { return std::to_string(r.config.scenario.master_seed); }},
        {"seed", [](const auto& r) { return r.seed; }},
        {"elements", [](const auto& r) { return num(r.config.scenario.elements); }},
        {"active_elements", [](const auto& r) { return num(r.config.active_elements); }},
        {"subcarriers_total", [](const auto& r) { return num(r.config.scenario.subcarriers); }},
        {"spatial_total", [](const auto& r) { return num(r.config.scenario.spatial_channels); }},
        {"subcarriers", [](const auto& r) { return join_indices(r.config.subcarriers); }},
        {"spatial", [](const auto& r) { return join_indices(r.config.spatial); }},
        {"streams", [](const auto& r) { return num(r.streams); }},
        {"oversampling", [](const auto& r) { return num(r.config.probing.oversampling); }},
        {"configurations", [](const auto& r) { return num(r.config.probing.configurations); }},
        {"sample_offset", [](const auto& r) { return num(r.config.probing.sample_offset); }},
        {"t_su_s", [](const auto& r) { return num(r.config.probing.surface_update_s); }},
        {"t_p_s", [](const auto& r) { return num(r.config.probing.probe_interval_s); }},
        {"bits", [](const auto& r) { return num(std::size_t{r.config.bits}); }},
        {"snr_db", [](const auto& r) { return format_number(r.config.snr_db); }},
        {"noise_variance", [](const auto& r) { return num(r.config.scenario.noise_variance); }},
        {"los", [](const auto& r) { return std::string(r.config.scenario.line_of_sight ? "1" : "0"); }},
        {"rician_k", [](const auto& r) { return num(r.config.scenario.rician_k); }},
        {"taps", [](const auto& r) { return num(r.config.scenario.taps); }},
        {"path_loss_exponent", [](const auto& r) { return num(r.config.scenario.path_loss_exponent); }},
        {"element_gain", [](const auto& r) { return num(r.config.scenario.element_gain); }},
        {"d_ai_m", [](const auto& r) { return num(r.config.scenario.alice_irs_m); }},
        {"d_bi_m", [](const auto& r) { return num(r.config.scenario.bob_irs_m); }},
        {"d_ei_m", [](const auto& r) { return num(r.config.scenario.eve_irs_m); }},
        {"d_ab_m", [](const auto& r) { return num(r.config.scenario.alice_bob_m); }},
        {"d_ae_m", [](const auto& r) { return num(r.config.scenario.alice_eve_m); }},
        {"d_be_m", [](const auto& r) { return num(r.config.scenario.bob_eve_m); }},
        {"total_irs_distance_m",
         [](const auto& r) { return num(r.config.scenario.alice_irs_m + r.config.scenario.bob_irs_m); }},
        {"eve_distance_m", [](const auto& r) { return num(r.config.eve_distance_m); }},
        {"eve_correlation", [](const auto& r) { return num(r.config.scenario.eve_correlation); }},
        {"eve_shares_bob_hop", [](const auto& r) { return std::string(r.config.scenario.eve_shares_bob_hop ? "1" : "0"); }},
        {"degenerate_streams", [](const auto& r) { return num(r.degenerate_streams); }},
        {"key_bits", [](const auto& r) { return num(r.key_bits); }},
        {"kdr_ab", [](const auto& r) { return format_number(defined(r.kdr_ab)); }},
        {"kdr_ae", [](const auto& r) { return format_number(defined(r.kdr_ae)); }},
        {"avg_abs_corr_ab", [](const auto& r) { return format_number(r.corr_ab); }},
        {"avg_abs_corr_ae", [](const auto& r) { return format_number(r.corr_ae); }},
        {"code_enabled", [](const auto& r) { return std::string(r.config.code.enabled ? "1" : "0"); }},
        {"code_m", [](const auto& r) { return num(std::size_t{r.config.code.field_degree}); }},
        {"code_t", [](const auto& r) { return num(std::size_t{r.config.code.t}); }},
        {"margin", [](const auto& r) { return num(r.config.code.margin); }},
        {"blocks", [](const auto& r) { return num(r.blocks); }},
        {"discarded", [](const auto& r) { return num(r.discarded); }},
        {"decoder_failures", [](const auto& r) { return num(r.decoder_failures); }},
        {"undetected", [](const auto& r) { return num(r.undetected); }},
        {"reconciled_bits", [](const auto& r) { return num(r.reconciled_bits); }},
        {"final_key_bits", [](const auto& r) { return num(r.final_key_bits); }},
        {"final_keys_match", [](const auto& r) { return std::string(r.final_keys_match ? "1" : "0"); }},
        {"duration_s", [](const auto& r) { return num(r.duration_s); }},
        {"kgr_bps", [](const auto& r) { return num(r.kgr); }},
        {"kgr_bound_bps", [](const auto& r) { return num(r.kgr_bound); }},
        {"kgr_final_bps", [](const auto& r) { return num(r.kgr_final); }},
        {"nist_run", [](const auto& r) {
             if (!r.randomness) {
                 return std::string("0");
             }
             const auto& res = r.randomness->results;
             return num(static_cast<std::size_t>(
                 std::count_if(res.begin(), res.end(), [](const auto& t) { return !t.skipped; })));
         }},
        {"nist_passed", [](const auto& r) {
             if (!r.randomness) {
                 return std::string("0");
             }
             const auto& res = r.randomness->results;
             return num(static_cast<std::size_t>(
                 std::count_if(res.begin(), res.end(), [](const auto& t) { return !t.skipped && t.passed(); })));
         }},
    };
    return columns;
}

struct Metric {
    const char* name;
    std::function<std::optional<double>(const ExperimentReport&)> value;
};

const std::vector<Metric>& aggregate_metrics()
{
    static const std::vector<Metric> metrics = {
        {"kdr_ab", [](const auto& r) { return defined(r.kdr_ab); }},
        {"kdr_ae", [](const auto& r) { return defined(r.kdr_ae); }},
        {"avg_abs_corr_ab", [](const auto& r) { return r.corr_ab; }},
        {"avg_abs_corr_ae", [](const auto& r) { return r.corr_ae; }},
        {"kgr_bps", [](const auto& r) { return std::optional<double>(r.kgr); }},
        {"kgr_final_bps", [](const auto& r) { return std::optional<double>(r.kgr_final); }},
        {"discarded_fraction",
         [](const auto& r) {
             return r.blocks ? std::optional<double>(static_cast<double>(r.discarded) / static_cast<double>(r.blocks))
                             : std::nullopt;
         }},
        {"final_key_bits", [](const auto& r) { return std::optional<double>(static_cast<double>(r.final_key_bits)); }},
    };
    return metrics;
}

// Consecutive runs of reports sharing (sweep, point).
std::vector<std::pair<std::size_t, std::size_t>> point_groups(const std::vector<ExperimentReport>& reports)
{
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= reports.size(); ++i) {
        if (i == reports.size() || reports[i].sweep != reports[begin].sweep ||
            reports[i].point != reports[begin].point) {
            groups.emplace_back(begin, i);
            begin = i;
        }
    }
    return groups;
}

std::pair<std::optional<double>, std::optional<double>> mean_std(const std::vector<double>& v)
{
    if (v.empty()) {
        return {std::nullopt, std::nullopt};
    }
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) {
        ss += (x - mean) * (x - mean);
    }
    return {mean, v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0};
}

} // namespace

void emit_report(std::ostream& out, const std::vector<ExperimentReport>& reports)
{
    if (reports.empty()) {
        throw InvalidArgument("no reports to emit");
    }
    const auto& columns = report_columns();
    for (std::size_t c = 0; c < columns.size(); ++c) {
        out << (c ? "," : "") << columns[c].name;
    }
    out << '\n';
    for (const auto& r : reports) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            out << (c ? "," : "") << columns[c].value(r);
        }
        out << '\n';
    }
}

void emit_aggregate(std::ostream& out, const std::vector<ExperimentReport>& reports)
{
    if (reports.empty()) {
        throw InvalidArgument("no reports to aggregate");
    }
    out << "sweep,axis,point,value,los,active_elements,oversampling,snr_db,eve_distance_m,repetitions";
    for (const auto& m : aggregate_metrics()) {
        out << ',' << m.name << "_mean," << m.name << "_std";
    }
    out << '\n';
    for (const auto& [begin, end] : point_groups(reports)) {
        const auto& r = reports[begin];
        out << r.sweep << ',' << r.axis << ',' << r.point << ',' << format_number(r.value) << ','
            << (r.config.scenario.line_of_sight ? 1 : 0) << ',' << r.config.active_elements << ','
            << r.config.probing.oversampling << ',' << format_number(r.config.snr_db) << ','
            << format_number(r.config.eve_distance_m) << ',' << (end - begin);
        for (const auto& m : aggregate_metrics()) {
            std::vector<double> values;
            for (std::size_t i = begin; i < end; ++i) {
                if (const auto v = m.value(reports[i])) {
                    values.push_back(*v);
                }
            }
            const auto [mean, sd] = mean_std(values);
            out << ',' << format_number(mean) << ',' << format_number(sd);
        }
        out << '\n';
    }
}

void emit_summary(std::ostream& out, const std::vector<ExperimentReport>& reports)
{
    if (reports.empty()) {
        throw InvalidArgument("no reports to summarise");
    }
    out << "generator: " << reports.front().generator << '\n';
    out << "reports: " << reports.size() << "\n\n";

    std::string sweep;
    for (const auto& [begin, end] : point_groups(reports)) {
        const auto& r = reports[begin];
        if (r.sweep != sweep) {
            sweep = r.sweep;
            out << "sweep " << sweep << " (axis " << r.axis << ")\n";
        }
        std::vector<double> kdr_ab, kdr_ae, kgr;
        for (std::size_t i = begin; i < end; ++i) {
            if (!std::isnan(reports[i].kdr_ab)) {
                kdr_ab.push_back(reports[i].kdr_ab);
            }
            if (!std::isnan(reports[i].kdr_ae)) {
                kdr_ae.push_back(reports[i].kdr_ae);
            }
            kgr.push_back(reports[i].kgr);
        }
        const auto ab = mean_std(kdr_ab);
        const auto ae = mean_std(kdr_ae);
        out << "  point " << r.point << " value " << format_number(r.value) << " los "
            << (r.config.scenario.line_of_sight ? 1 : 0) << ": KDR(A,B) " << format_number(ab.first) << " +- "
            << format_number(ab.second) << ", KDR(A,E) " << format_number(ae.first) << ", KGR "
            << format_number(mean_std(kgr).first) << " bit/s (bound " << format_number(r.kgr_bound) << ")\n";
    }

    struct Property {
        const char* name;
        std::function<bool(const ExperimentReport&)> holds;
    };
    const Property properties[] = {
        {"0 <= KDR <= 1",
         [](const auto& r) {
             auto ok = [](double v) { return std::isnan(v) || (v >= 0.0 && v <= 1.0); };
             return ok(r.kdr_ab) && ok(r.kdr_ae);
         }},
        {"KGR <= KGR bound", [](const auto& r) { return r.kgr <= r.kgr_bound * (1.0 + 1e-12); }},
        {"|correlation| <= 1",
         [](const auto& r) {
             auto ok = [](const std::optional<double>& v) { return !v || std::abs(*v) <= 1.0; };
             return ok(r.corr_ab) && ok(r.corr_ae);
         }},
        {"final keys verified equal", [](const auto& r) { return r.final_keys_match; }},
        {"randomness tests pass",
         [](const auto& r) { return !r.randomness || r.randomness->all_passed(); }},
    };
    out << "\nproperties\n";
    for (const auto& p : properties) {
        const auto held = static_cast<std::size_t>(std::count_if(reports.begin(), reports.end(), p.holds));
        out << "  " << (held == reports.size() ? "PASS" : "FAIL") << "  " << p.name << " (" << held << "/"
            << reports.size() << ")\n";
    }
}

namespace {

std::ofstream open_output(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    return out;
}

void close_output(std::ofstream& out, const std::filesystem::path& path)
{
    out.close();
    if (!out) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

} // namespace

void write_outputs(const RunConfig& config, const std::vector<ExperimentReport>& reports)
{
    if (reports.empty()) {
        throw InvalidArgument("no reports to write");
    }
    namespace fs = std::filesystem;
    const fs::path dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError("cannot create output directory '" + dir.string() + "'");
    }

    std::vector<std::string> files;
    auto write_file = [&](const std::string& name, const std::function<void(std::ostream&)>& body) {
        const auto path = dir / name;
        auto out = open_output(path);
        body(out);
        close_output(out, path);
        files.push_back(name);
    };

    for (const auto& [begin, end] : [&] {
             std::vector<std::pair<std::size_t, std::size_t>> sweeps;
             std::size_t b = 0;
             for (std::size_t i = 1; i <= reports.size(); ++i) {
                 if (i == reports.size() || reports[i].sweep != reports[b].sweep) {
                     sweeps.emplace_back(b, i);
                     b = i;
                 }
             }
             return sweeps;
         }()) {
        const std::vector<ExperimentReport> group(reports.begin() + static_cast<std::ptrdiff_t>(begin),
                                                  reports.begin() + static_cast<std::ptrdiff_t>(end));
        const auto& name = group.front().sweep;
        write_file(name + ".csv", [&](std::ostream& o) { emit_report(o, group); });
        write_file(name + "_aggregate.csv", [&](std::ostream& o) { emit_aggregate(o, group); });

        for (const auto& r : group) {
            const std::string stem = name + "_p" + std::to_string(r.point) + "_r" + std::to_string(r.repetition);
            if (!r.alice_key.empty() || !r.final_key.empty()) {
                write_file(stem + "_alice.txt", [&](std::ostream& o) { write_bits(o, r.alice_key); });
                write_file(stem + "_bob.txt", [&](std::ostream& o) { write_bits(o, r.bob_key); });
                write_file(stem + "_final.txt", [&](std::ostream& o) { write_bits(o, r.final_key); });
            }
            if (r.randomness) {
                write_file(stem + "_nist.csv", [&](std::ostream& o) { nist::write_report_csv(o, *r.randomness); });
            }
            for (std::size_t m = 0; m < r.corr_ab_matrices.size(); ++m) {
                const std::size_t js = static_cast<std::size_t>(std::lround(std::sqrt(r.corr_ab_matrices.size())));
                const std::string pair = "_j" + std::to_string(m / js) + "_" + std::to_string(m % js);
                write_file(stem + "_corr_ab" + pair + ".csv",
                           [&](std::ostream& o) { write_matrix_csv(o, r.corr_ab_matrices[m]); });
                write_file(stem + "_corr_ae" + pair + ".csv",
                           [&](std::ostream& o) { write_matrix_csv(o, r.corr_ae_matrices[m]); });
            }
        }
    }
    write_file("summary.txt", [&](std::ostream& o) { emit_summary(o, reports); });

    json manifest;
    manifest["generator"] = reports.front().generator;
    manifest["configuration"] = json::parse(config.source);
    manifest["files"] = files;
    write_file("manifest.json", [&](std::ostream& o) { o << manifest.dump(2) << '\n'; });
}

} // namespace irskg
