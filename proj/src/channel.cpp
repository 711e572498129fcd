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

#include "irskg/channel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "irskg/error.hpp"
#include "irskg/surface.hpp"

namespace irskg {

const char* party_name(Party party) noexcept
{
    switch (party) {
    case Party::alice:
        return "alice";
    case Party::bob:
        return "bob";
    case Party::eve:
        return "eve";
    }
    return "?";
}

void Scenario::validate() const
{
    require(subcarriers >= 1, "scenario needs at least one subcarrier");
    require(spatial_channels >= 1, "scenario needs at least one spatial channel");
    require(taps >= 1, "scenario needs at least one tap");
    for (double d : {alice_irs_m, bob_irs_m, eve_irs_m, alice_bob_m, alice_eve_m, bob_eve_m}) {
        require(d > 0.0 && std::isfinite(d), "distances must be positive and finite");
    }
    require(noise_variance >= 0.0 && std::isfinite(noise_variance), "noise variance must be >= 0");
    require(path_loss_exponent >= 0.0, "path loss exponent must be >= 0");
    require(rician_k >= 0.0, "rician K factor must be >= 0");
    require(element_gain >= 0.0 && std::isfinite(element_gain), "element gain must be >= 0");
    require(eve_correlation >= 0.0 && eve_correlation <= 1.0, "eve correlation must lie in [0, 1]");
}

LinkEnsemble::LinkEnsemble(std::size_t elements, std::size_t subcarriers, std::size_t spatial_channels)
    : elements_(elements), subcarriers_(subcarriers), channels_(spatial_channels)
{
    for (auto& ch : channels_) {
        ch.alice_irs.assign(elements * subcarriers, Complex{});
        ch.bob_irs.assign(elements * subcarriers, Complex{});
        ch.eve_irs.assign(elements * subcarriers, Complex{});
        ch.bob_irs_eve.assign(elements * subcarriers, Complex{});
        ch.alice_bob.assign(subcarriers, Complex{});
        ch.eve_alice.assign(subcarriers, Complex{});
        ch.eve_bob.assign(subcarriers, Complex{});
    }
}

Complex LinkEnsemble::cascade(LinkPath path, std::size_t i, std::size_t k, std::size_t j) const
{
    const auto& ch = channels_[j];
    const std::size_t at = i * subcarriers_ + k;
    switch (path) {
    case LinkPath::alice_bob:
        return ch.alice_irs[at] * ch.bob_irs[at];
    case LinkPath::eve_from_bob:
        return ch.bob_irs_eve[at] * ch.eve_irs[at];
    case LinkPath::eve_from_alice:
        return ch.alice_irs[at] * ch.eve_irs[at];
    }
    return {};
}

Complex LinkEnsemble::direct(LinkPath path, std::size_t k, std::size_t j) const
{
    const auto& ch = channels_[j];
    switch (path) {
    case LinkPath::alice_bob:
        return ch.alice_bob[k];
    case LinkPath::eve_from_bob:
        return ch.eve_bob[k];
    case LinkPath::eve_from_alice:
        return ch.eve_alice[k];
    }
    return {};
}

std::vector<double> tap_power_profile(std::size_t taps)
{
    std::vector<double> power(taps);
    double total = 0.0;
    for (std::size_t t = 0; t < taps; ++t) {
        power[t] = std::exp(-static_cast<double>(t) / 2.0);
        total += power[t];
    }
    for (auto& p : power) {
        p /= total;
    }
    return power;
}

std::vector<Complex> frequency_response(const std::vector<Complex>& taps, std::size_t subcarriers)
{
    std::vector<Complex> response(subcarriers);
    const double step = -2.0 * std::numbers::pi / static_cast<double>(subcarriers);
    for (std::size_t k = 0; k < subcarriers; ++k) {
        Complex acc{};
        for (std::size_t t = 0; t < taps.size(); ++t) {
            acc += taps[t] * std::polar(1.0, step * static_cast<double>(k * t % subcarriers));
        }
        response[k] = acc;
    }
    return response;
}

double path_amplitude(double distance_m, double exponent)
{
    return std::pow(distance_m, -exponent / 2.0);
}

namespace {

// Unit-power small-scale link over all subcarriers.
std::vector<Complex> draw_diffuse(const std::vector<double>& profile, std::size_t subcarriers, Rng& rng)
{
    std::vector<Complex> taps(profile.size());
    for (std::size_t t = 0; t < profile.size(); ++t) {
        taps[t] = rng.complex_normal(profile[t]);
    }
    return frequency_response(taps, subcarriers);
}

// Unit-power direct link, Rician under LOS.
std::vector<Complex> draw_direct(const Scenario& s, const std::vector<double>& profile, Rng& rng)
{
    auto diffuse = draw_diffuse(profile, s.subcarriers, rng);
    const double phase = 2.0 * std::numbers::pi * rng.uniform();
    if (!s.line_of_sight) {
        return diffuse;
    }
    double los_weight = 1.0;
    double diffuse_weight = 0.0;
    if (std::isfinite(s.rician_k)) {
        los_weight = std::sqrt(s.rician_k / (s.rician_k + 1.0));
        diffuse_weight = std::sqrt(1.0 / (s.rician_k + 1.0));
    }
    const Complex los = std::polar(los_weight, phase);
    for (auto& v : diffuse) {
        v = los + diffuse_weight * v;
    }
    return diffuse;
}

void scale(std::vector<Complex>& values, double factor)
{
    for (auto& v : values) {
        v *= factor;
    }
}

std::vector<Complex> mix(const std::vector<Complex>& shared, const std::vector<Complex>& own, double rho)
{
    const double own_weight = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    std::vector<Complex> out(shared.size());
    for (std::size_t i = 0; i < shared.size(); ++i) {
        out[i] = rho * shared[i] + own_weight * own[i];
    }
    return out;
}

std::vector<Complex> draw_element_links(const Scenario& s, const std::vector<double>& profile, Rng& rng)
{
    std::vector<Complex> links;
    links.reserve(s.elements * s.subcarriers);
    for (std::size_t i = 0; i < s.elements; ++i) {
        auto response = draw_diffuse(profile, s.subcarriers, rng);
        links.insert(links.end(), response.begin(), response.end());
    }
    return links;
}

} // namespace

LinkEnsemble draw_links(const Scenario& s, Rng& rng)
{
    s.validate();
    const auto profile = tap_power_profile(s.taps);
    const double eta = s.path_loss_exponent;
    const double hop = std::sqrt(s.element_gain);

    LinkEnsemble links(s.elements, s.subcarriers, s.spatial_channels);
    for (std::size_t j = 0; j < s.spatial_channels; ++j) {
        auto alice_irs = draw_element_links(s, profile, rng);
        auto bob_irs = draw_element_links(s, profile, rng);
        auto alice_bob = draw_direct(s, profile, rng);
        auto eve_irs_own = draw_element_links(s, profile, rng);
        auto eve_bob_own = draw_direct(s, profile, rng);
        auto eve_alice = draw_direct(s, profile, rng);
        auto bob_hop_own = draw_element_links(s, profile, rng);

        auto eve_irs = mix(alice_irs, eve_irs_own, s.eve_correlation);
        auto eve_bob = mix(alice_bob, eve_bob_own, s.eve_correlation);
        auto bob_irs_eve = s.eve_shares_bob_hop ? bob_irs : mix(bob_irs, bob_hop_own, s.eve_correlation);

        scale(alice_irs, hop * path_amplitude(s.alice_irs_m, eta));
        scale(bob_irs, hop * path_amplitude(s.bob_irs_m, eta));
        scale(eve_irs, hop * path_amplitude(s.eve_irs_m, eta));
        scale(bob_irs_eve, hop * path_amplitude(s.bob_irs_m, eta));
        scale(alice_bob, path_amplitude(s.alice_bob_m, eta));
        scale(eve_bob, path_amplitude(s.bob_eve_m, eta));
        scale(eve_alice, path_amplitude(s.alice_eve_m, eta));

        auto& ch = links.channel(j);
        ch.alice_irs = std::move(alice_irs);
        ch.bob_irs = std::move(bob_irs);
        ch.eve_irs = std::move(eve_irs);
        ch.bob_irs_eve = std::move(bob_irs_eve);
        ch.alice_bob = std::move(alice_bob);
        ch.eve_bob = std::move(eve_bob);
        ch.eve_alice = std::move(eve_alice);
    }
    return links;
}

Complex effective_channel(const LinkEnsemble& links, const SurfaceConfig& config, std::size_t k, std::size_t j,
                          LinkPath path)
{
    if (config.size() != links.elements()) {
        throw DimensionMismatch("surface config has " + std::to_string(config.size()) + " entries, ensemble has " +
                                std::to_string(links.elements()) + " elements");
    }
    if (k >= links.subcarriers() || j >= links.spatial_channels()) {
        throw DimensionMismatch("subcarrier or spatial index out of range");
    }
    Complex sum{};
    for (std::size_t i = 0; i < links.elements(); ++i) {
        sum += links.cascade(path, i, k, j) * static_cast<double>(config.c[i]);
    }
    return sum + links.direct(path, k, j);
}

double mean_channel_power(const Scenario& s)
{
    const double eta = s.path_loss_exponent;
    const double hop = s.element_gain;
    const double reflected = static_cast<double>(s.elements) * hop * hop * std::pow(s.alice_irs_m, -eta) *
                             std::pow(s.bob_irs_m, -eta);
    return reflected + std::pow(s.alice_bob_m, -eta);
}

double noise_variance_for_snr(const Scenario& s, double snr_db)
{
    return mean_channel_power(s) / std::pow(10.0, snr_db / 10.0);
}

} // namespace irskg
