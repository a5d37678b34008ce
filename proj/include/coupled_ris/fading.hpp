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

#pragma once

#include <cstdint>
#include <random>

#include "coupled_ris/types.hpp"

namespace coupled_ris {

enum class FadingModel { Rayleigh, Rician };

/// Path gains of the RIS-to-receiver and transmitter-to-RIS links and the fading model.
struct FadingSpec {
    double rho_ri = 1.0;
    double rho_it = 1.0;
    FadingModel model = FadingModel::Rayleigh;
    double k_factor = 0.0;  // Rician only

    void validate() const;
};

using Rng = std::mt19937_64;

/// Counter-based seed derivation (splitmix64 finalizer over seed and stream id).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Impedance-form channels with an obstructed direct link (z_RT = 0). Entries are i.i.d.
/// CN(0, rho); the Rician model adds a fixed unit-modulus line-of-sight component with weight
/// sqrt(K/(K+1)) and scales the scattered part by sqrt(1/(K+1)). The Gaussian draws are the same
/// for both models, so K = 0 reproduces the Rayleigh stream.
ChannelTriple sample_channels(const FadingSpec& fading, Index n, Rng& rng);

}  // namespace coupled_ris
