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

#include "irskg/surface.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "irskg/error.hpp"

namespace irskg {

SurfaceSchedule::SurfaceSchedule(std::size_t elements, std::size_t active, std::size_t configurations, Rng& setup)
    : configurations_(configurations)
{
    require(active <= elements, "active element count exceeds surface size");
    std::vector<std::size_t> order(elements);
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Partial Fisher-Yates: the first `active` slots form the active set.
    for (std::size_t i = 0; i < active; ++i) {
        const std::size_t pick = i + static_cast<std::size_t>(setup.below(elements - i));
        std::swap(order[i], order[pick]);
    }
    active_set_.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(active));
    std::sort(active_set_.begin(), active_set_.end());

    frozen_.c.resize(elements);
    for (auto& v : frozen_.c) {
        v = setup.bit() ? 1 : -1;
    }
}

SurfaceSchedule::SurfaceSchedule(std::vector<std::size_t> active_set, SurfaceConfig frozen,
                                 std::size_t configurations)
    : active_set_(std::move(active_set)), frozen_(std::move(frozen)), configurations_(configurations)
{
    std::sort(active_set_.begin(), active_set_.end());
    require(std::adjacent_find(active_set_.begin(), active_set_.end()) == active_set_.end(),
            "active set contains duplicates");
    require(active_set_.empty() || active_set_.back() < frozen_.size(), "active element index out of range");
    for (auto v : frozen_.c) {
        require(v == 1 || v == -1, "surface entries must be -1 or +1");
    }
}

SurfaceConfig SurfaceSchedule::next_config(Rng& rng)
{
    SurfaceConfig config = frozen_;
    for (std::size_t i : active_set_) {
        config.c[i] = rng.bit() ? 1 : -1;
    }
    config.index = next_index_++;
    return config;
}

std::vector<double> verify_balance(std::span<const SurfaceConfig> configs)
{
    if (configs.empty()) {
        throw InvalidArgument("verify_balance needs at least one configuration");
    }
    const std::size_t n = configs.front().size();
    std::vector<std::size_t> plus(n, 0);
    for (const auto& config : configs) {
        if (config.size() != n) {
            throw DimensionMismatch("configurations differ in length");
        }
        for (std::size_t i = 0; i < n; ++i) {
            plus[i] += config.c[i] > 0 ? 1 : 0;
        }
    }
    std::vector<double> fraction(n);
    for (std::size_t i = 0; i < n; ++i) {
        fraction[i] = static_cast<double>(plus[i]) / static_cast<double>(configs.size());
    }
    return fraction;
}

double balance_tolerance(std::size_t configurations)
{
    return 3.0 / std::sqrt(4.0 * static_cast<double>(configurations));
}

} // namespace irskg
