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
#include <span>
#include <vector>

#include "irskg/rng.hpp"

namespace irskg {

/// One binary surface state: every entry is -1 or +1.
struct SurfaceConfig {
    std::vector<std::int8_t> c;
    std::uint64_t index = 0;

    std::size_t size() const noexcept { return c.size(); }

    friend bool operator==(const SurfaceConfig&, const SurfaceConfig&) = default;
};

/// Produces the random configuration sequence. Only the elements in the
/// active set toggle; the rest hold a random pattern fixed at construction.
class SurfaceSchedule {
public:
    /// Picks `active` distinct elements out of `elements` and a random frozen
    /// pattern, both from `setup`.
    SurfaceSchedule(std::size_t elements, std::size_t active, std::size_t configurations, Rng& setup);

    SurfaceSchedule(std::vector<std::size_t> active_set, SurfaceConfig frozen, std::size_t configurations);

    /// Fresh fair draws on the active set, frozen values elsewhere.
    SurfaceConfig next_config(Rng& rng);

    std::size_t elements() const noexcept { return frozen_.size(); }
    std::size_t configurations() const noexcept { return configurations_; }
    std::size_t issued() const noexcept { return next_index_; }
    const std::vector<std::size_t>& active_set() const noexcept { return active_set_; }
    const SurfaceConfig& frozen_config() const noexcept { return frozen_; }

private:
    std::vector<std::size_t> active_set_;
    SurfaceConfig frozen_;
    std::size_t configurations_;
    std::uint64_t next_index_ = 0;
};

/// Fraction of +1 entries per element over the given configurations.
std::vector<double> verify_balance(std::span<const SurfaceConfig> configs);

/// Largest deviation from 0.5 tolerated for m fair draws: 3 / sqrt(4 m).
double balance_tolerance(std::size_t configurations);

} // namespace irskg
