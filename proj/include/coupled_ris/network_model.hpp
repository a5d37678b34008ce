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

#include "coupled_ris/coupling.hpp"
#include "coupled_ris/types.hpp"

namespace coupled_ris {

// Multiport channel algebra under the unilateral approximation with the transmitter and
// receiver matched to Z0.

/// h = (z_RT - z_RI (jX + Z_II)^-1 z_IT) / (2 Z0).
Complex channel_z(const ChannelTriple& chan, const LoadMatrix& x, const CouplingMatrix& z_ii,
                  const ReferenceImpedance& ref);

/// h = (-y_RT + y_RI (jB + Y_II)^-1 y_IT) / (2 Y0).
Complex channel_y(const ChannelTriple& chan, const LoadMatrix& b, const CouplingMatrix& y_ii,
                  const ReferenceImpedance& ref);

struct AdmittanceModel {
    ChannelTriple channels;
    CouplingMatrix y_ii;
};

/// Transmission admittances and Y_II = Z_II^-1 from impedance-form data.
AdmittanceModel z_to_y(const ChannelTriple& chan, const CouplingMatrix& z_ii, const ReferenceImpedance& ref);

/// Decoupled channels: ris_to_rx * Re{M}^-1/2 * sqrt(R) and sqrt(R) * Re{M}^-1/2 * tx_to_ris, with R the
/// reference of the representation. The direct term is passed through unchanged.
ChannelTriple effective_channels(const ChannelTriple& chan, const CouplingMatrix& coupling,
                                 const ReferenceImpedance& ref);

/// Scattering-domain channels from decoupled channels; theta is left empty.
ScatteringState to_scattering(const ChannelTriple& effective, const ReferenceImpedance& ref);

/// Reactance: (jX + Z0 I)^-1 (jX - Z0 I). Susceptance: (Y0 I + jB)^-1 (Y0 I - jB).
Eigen::MatrixXcd cayley(const LoadMatrix& load, const ReferenceImpedance& ref);

/// Inverse of cayley(). Throws CayleyPole when theta has an eigenvalue within 1e-10 of the pole
/// (+1 for reactance, -1 for susceptance) and NumericalError when the result is not real.
LoadMatrix cayley_inv(const Eigen::MatrixXcd& theta, const ReferenceImpedance& ref, LoadKind kind);

/// Barred (decoupled) load from the physical one:
/// Xbar = R Re{M}^-1/2 (X + Im{M}) Re{M}^-1/2.
LoadMatrix decouple_load(const LoadMatrix& physical, const CouplingMatrix& coupling, const ReferenceImpedance& ref);

/// Physical load from the barred one: X = (1/R) Re{M}^1/2 Xbar Re{M}^1/2 - Im{M}.
LoadMatrix recover_load(const LoadMatrix& barred, const CouplingMatrix& coupling, const ReferenceImpedance& ref);

}  // namespace coupled_ris
