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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "irskg/rng.hpp"

namespace irskg {

using Complex = std::complex<double>;

struct SurfaceConfig;

enum class Party { alice, bob, eve };

const char* party_name(Party party) noexcept;

/// Geometry, propagation and noise parameters of one simulated deployment.
struct Scenario {
    std::size_t elements = 128;        ///< surface element count N
    std::size_t subcarriers = 114;     ///< OFDM subcarriers K
    std::size_t spatial_channels = 4;  ///< MIMO entries J
    double alice_irs_m = 3.0;
    double bob_irs_m = 1.5;
    double eve_irs_m = 3.0;
    double alice_bob_m = 3.0;
    double alice_eve_m = 1.0;
    double bob_eve_m = 3.0;
    bool line_of_sight = true;
    double path_loss_exponent = 2.0;
    /// Power ratio of the deterministic to the diffuse part of direct links under LOS.
    /// May be +infinity for a purely deterministic direct path.
    double rician_k = 4.0;
    std::size_t taps = 8;
    /// Power gain of one surface element hop, applied to every link touching the surface.
    double element_gain = 0.1;
    /// Mixing weight of Alice's small-scale links into Eve's (0 = independent, 1 = collocated).
    double eve_correlation = 0.0;
    /// Route Eve's copy of Bob's transmission over Bob's own element links
    /// instead of an independently drawn replica.
    bool eve_shares_bob_hop = false;
    double noise_variance = 1e-3;
    std::uint64_t master_seed = 1;

    void validate() const;
};

/// Which transmission a party observes.
enum class LinkPath {
    alice_bob,      ///< the reciprocal Alice <-> Bob channel
    eve_from_bob,   ///< Eve overhearing Bob's transmissions
    eve_from_alice, ///< Eve overhearing Alice's transmissions
};

/// All static link gains of one spatial channel. Element links are stored
/// row-major as [element * K + subcarrier].
struct SpatialLinks {
    std::vector<Complex> alice_irs;
    std::vector<Complex> bob_irs;
    std::vector<Complex> eve_irs;
    std::vector<Complex> bob_irs_eve; ///< Bob's surface hop on the path Bob -> IRS -> Eve
    std::vector<Complex> alice_bob;
    std::vector<Complex> eve_alice;
    std::vector<Complex> eve_bob;
};

/// Complete static propagation environment. The same object serves both
/// probing directions of a pair, which is what makes the channel reciprocal.
class LinkEnsemble {
public:
    LinkEnsemble(std::size_t elements, std::size_t subcarriers, std::size_t spatial_channels);

    std::size_t elements() const noexcept { return elements_; }
    std::size_t subcarriers() const noexcept { return subcarriers_; }
    std::size_t spatial_channels() const noexcept { return channels_.size(); }

    SpatialLinks& channel(std::size_t j) { return channels_.at(j); }
    const SpatialLinks& channel(std::size_t j) const { return channels_.at(j); }

    /// Cascaded gain of element i for subcarrier k on the given path, i.e. the
    /// factor multiplying c_i in the effective channel.
    Complex cascade(LinkPath path, std::size_t i, std::size_t k, std::size_t j) const;
    /// Direct (surface-independent) component on the given path.
    Complex direct(LinkPath path, std::size_t k, std::size_t j) const;

private:
    std::size_t elements_;
    std::size_t subcarriers_;
    std::vector<SpatialLinks> channels_;
};

/// Normalised exponential power-delay profile, tap t power proportional to exp(-t/2).
std::vector<double> tap_power_profile(std::size_t taps);

/// Frequency response of a tapped delay line sampled at `subcarriers` DFT bins.
std::vector<Complex> frequency_response(const std::vector<Complex>& taps, std::size_t subcarriers);

/// Draws every link of the scenario from `rng`.
LinkEnsemble draw_links(const Scenario& scenario, Rng& rng);

/// Sum over elements of cascade * c_i plus the direct component.
Complex effective_channel(const LinkEnsemble& links, const SurfaceConfig& config, std::size_t k, std::size_t j,
                          LinkPath path = LinkPath::alice_bob);

/// Amplitude factor d^(-eta/2).
double path_amplitude(double distance_m, double exponent);

/// Expected |H|^2 of the Alice-Bob effective channel over links and random configurations.
double mean_channel_power(const Scenario& scenario);

/// Noise variance that yields the requested mean SNR on the Alice-Bob channel.
double noise_variance_for_snr(const Scenario& scenario, double snr_db);

} // namespace irskg
