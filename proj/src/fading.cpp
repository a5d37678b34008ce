// SPDX-License-Identifier: Apache-2.0
//
// coupled-ris: RIS channel optimization with electromagnetic mutual coupling
// Copyright (C) 2026 The coupled-ris Authors
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

#include "coupled_ris/fading.hpp"

#include <cmath>
#include <numbers>

namespace coupled_ris {

namespace {

constexpr double kRxLosStep = 0.17;
constexpr double kTxLosStep = 0.31;

}  // namespace

void FadingSpec::validate() const {
    if (!(rho_ri >= 0.0) || !(rho_it >= 0.0) || !std::isfinite(rho_ri) || !std::isfinite(rho_it)) {
        throw InvalidArgument("path gains must be finite and non-negative");
    }
    if (model == FadingModel::Rician && (!(k_factor >= 0.0) || !std::isfinite(k_factor))) {
        throw InvalidArgument("Rician K-factor must be finite and non-negative");
    }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

ChannelTriple sample_channels(const FadingSpec& fading, Index n, Rng& rng) {
    fading.validate();
    if (n < 1) {
        throw InvalidArgument("channel length must be at least 1");
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double s_ri = std::sqrt(fading.rho_ri / 2.0);
    const double s_it = std::sqrt(fading.rho_it / 2.0);

    ChannelTriple chan;
    chan.representation = Representation::Impedance;
    chan.ris_to_rx.resize(n);
    chan.tx_to_ris.resize(n);
    for (Index i = 0; i < n; ++i) {
        const double re = gauss(rng);
        chan.ris_to_rx(i) = s_ri * Complex(re, gauss(rng));
    }
    for (Index i = 0; i < n; ++i) {
        const double re = gauss(rng);
        chan.tx_to_ris(i) = s_it * Complex(re, gauss(rng));
    }

    if (fading.model == FadingModel::Rician && fading.k_factor > 0.0) {
        const double los = std::sqrt(fading.k_factor / (fading.k_factor + 1.0));
        const double nlos = std::sqrt(1.0 / (fading.k_factor + 1.0));
        for (Index i = 0; i < n; ++i) {
            const double step = 2.0 * std::numbers::pi * static_cast<double>(i);
            chan.ris_to_rx(i) = nlos * chan.ris_to_rx(i) +
                                los * std::sqrt(fading.rho_ri) * std::polar(1.0, kRxLosStep * step);
            chan.tx_to_ris(i) = nlos * chan.tx_to_ris(i) +
                                los * std::sqrt(fading.rho_it) * std::polar(1.0, kTxLosStep * step);
        }
    }
    return chan;
}

}  // namespace coupled_ris
