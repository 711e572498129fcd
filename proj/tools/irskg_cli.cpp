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

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "irskg/error.hpp"
#include "irskg/experiment.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"IRS-assisted channel-reciprocity key generation simulator"};
    app.set_version_flag("--version", "irskg 1.0.0");

    std::string config_path;
    std::string output_dir;
    std::uint64_t seed = 0;
    std::size_t workers = 0;
    std::vector<std::string> sweeps;
    int verbosity = 0;
    bool list_only = false;

    app.add_option("-c,--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    auto* out_opt = app.add_option("-o,--out", output_dir, "Output directory (overrides output_dir)");
    auto* seed_opt = app.add_option("-s,--seed", seed, "Master seed (overrides master_seed)");
    auto* workers_opt = app.add_option("-j,--workers", workers, "Worker threads, 0 = all cores");
    app.add_option("--sweep", sweeps, "Run only the named sweep (repeatable)");
    app.add_flag("--list", list_only, "Print the sweep points and exit");
    app.add_flag("-v,--verbose", verbosity, "Report progress on stderr (repeat for per-run lines)");

    CLI11_PARSE(app, argc, argv);

    try {
        auto config = irskg::load_run_config(config_path);
        if (*out_opt) {
            config.output_dir = output_dir;
        }
        if (*seed_opt) {
            config.set_master_seed(seed);
        }
        if (*workers_opt) {
            config.workers = workers;
        }

        if (list_only) {
            for (const auto& s : config.sweeps) {
                for (const auto& p : irskg::expand_sweep(s, config)) {
                    std::cout << s.name << " point " << p.index << " " << irskg::axis_name(s.axis) << "="
                              << irskg::format_number(p.value)
                              << " los=" << (p.config.scenario.line_of_sight ? 1 : 0) << '\n';
                }
            }
            return EXIT_SUCCESS;
        }

        const auto reports = irskg::run_sweep(config, sweeps, [&](const irskg::SweepProgress& p) {
            if (verbosity >= 2 && p.report) {
                std::cerr << "[" << p.done << "/" << p.total << "] " << p.report->sweep << " point "
                          << p.report->point << " rep " << p.report->repetition
                          << " KDR(A,B)=" << irskg::format_number(p.report->kdr_ab) << '\n';
            } else if (verbosity == 1 && (p.done == p.total || p.done % 10 == 0)) {
                std::cerr << "\r" << p.done << "/" << p.total << " runs" << (p.done == p.total ? "\n" : "")
                          << std::flush;
            }
        });
        irskg::write_outputs(config, reports);
        if (verbosity >= 1) {
            std::cerr << "wrote " << reports.size() << " reports to " << config.output_dir << '\n';
        }
    } catch (const irskg::Error& e) {
        std::cerr << "irskg: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "irskg: unexpected error: " << e.what() << '\n';
        return 3;
    }
    return EXIT_SUCCESS;
}
