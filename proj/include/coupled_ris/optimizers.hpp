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

#include <vector>

#include "coupled_ris/coupling.hpp"
#include "coupled_ris/network_model.hpp"
#include "coupled_ris/types.hpp"

namespace coupled_ris {

/// An optimized RIS: physical load plus the gain it achieves and the bound it is compared to.
struct RisConfiguration {
    Architecture architecture = Architecture::FullyConnected;
    LoadMatrix load;
    double achieved_gain = 0.0;  // |h|^2
    double bound_gain = 0.0;     // |h*|^2 of the model the solver was given
    double residual = 0.0;       // alignment residual (BD-RIS) or last relative improvement (D-RIS)
    int sweeps = 0;              // coordinate-ascent sweeps, D-RIS aware only
};

/// One linear alignment problem M a = b over real symmetric M.
struct AlignmentEquations {
    Eigen::VectorXcd alpha;
    Eigen::VectorXcd beta;
};

/// Alignment condition theta * s_it_hat = e^{j phase} * s_ri_hat^H written as linear systems on the
/// barred load (decoupled variables) and on the physical load.
struct AlignmentSystem {
    Representation domain = Representation::Impedance;
    Architecture pattern = Architecture::FullyConnected;
    double phase = 0.0;
    Eigen::VectorXcd s_it_hat;
    Eigen::VectorXcd target;  // e^{j phase} s_ri_hat^H
    AlignmentEquations barred;
    AlignmentEquations physical;
};

/// (1/4Z0^2) (|z_RT - z_RI Re^-1 z_IT / 2| + ||z_RI Re^-1/2|| ||Re^-1/2 z_IT|| / 2)^2.
double upper_bound_fc(const ChannelTriple& chan, const CouplingMatrix& z_ii, const ReferenceImpedance& ref);

/// Admittance-form twin of upper_bound_fc.
double upper_bound_tc(const ChannelTriple& chan, const CouplingMatrix& y_ii, const ReferenceImpedance& ref);

/// Builds the alignment system for scattering-domain channels. The domain follows the coupling
/// representation. Throws DegenerateChannel when a RIS-side channel vanishes.
AlignmentSystem build_alignment(const ScatteringState& scat, const CouplingMatrix& coupling,
                                const ReferenceImpedance& ref, Architecture pattern = Architecture::FullyConnected);

/// Real coefficient matrix of M a = b stacked as [Re; Im] rows over the free entries of M
/// (upper triangle column by column for a full pattern; diagonal then first superdiagonal for
/// a tridiagonal one; diagonal only for a diagonal one).
Eigen::MatrixXd stacked_alignment_matrix(const Eigen::VectorXcd& alpha, Architecture pattern);

/// Minimum Frobenius-norm real symmetric M with M a = b. Throws AlignmentInfeasible when the
/// residual exceeds 1e-8 ||b||.
LoadMatrix solve_symmetric_alignment(const AlignmentEquations& eq, LoadKind kind);

/// Minimum-norm tridiagonal symmetric M with M a = b (2N-1 real unknowns, 2N real equations).
LoadMatrix solve_tridiagonal_alignment(const AlignmentEquations& eq, LoadKind kind);

/// ||cayley(barred) * s_it_hat - target||.
double alignment_residual(const LoadMatrix& barred, const AlignmentSystem& sys, const ReferenceImpedance& ref);

/// Globally optimal fully-connected reactance for the given coupling.
RisConfiguration optimize_fully_connected(const ChannelTriple& chan, const CouplingMatrix& z_ii,
                                          const ReferenceImpedance& ref);

/// Globally optimal tridiagonal susceptance for the given coupling (solved in the admittance domain).
RisConfiguration optimize_tree_connected(const ChannelTriple& chan, const CouplingMatrix& z_ii,
                                         const ReferenceImpedance& ref);

/// Per-element phases arg(s_RT) - arg(s_RI,n s_IT,n) for scattering channels computed as if
/// Z_II = Z0 I, wrapped to (-pi, pi]. Elements with a zero product take arg(s_RT).
Eigen::VectorXd dris_unaware_phases(const ChannelTriple& chan, const ReferenceImpedance& ref);

/// Diagonal RIS realizing dris_unaware_phases with x_n = Z0 cot(theta_n / 2). A phase within 1e-8
/// of zero is moved to 1e-8 so the reactance stays finite.
RisConfiguration optimize_dris_unaware(const ChannelTriple& chan, const ReferenceImpedance& ref);

struct DrisOptions {
    int grid = 256;
    int max_sweeps = 100;
    double tolerance = 1e-6;
};

struct DrisTrace {
    RisConfiguration config;
    std::vector<double> sweep_gains;  // gain after initialization, then after each sweep
};

/// Element-wise coordinate ascent over reactances x = Z0 cot(theta/2) on a phase grid,
/// started from the unaware solution and evaluated under the true coupling.
DrisTrace optimize_dris_aware_traced(const ChannelTriple& chan, const CouplingMatrix& z_ii,
                                     const ReferenceImpedance& ref, const DrisOptions& opts = {});

RisConfiguration optimize_dris_aware(const ChannelTriple& chan, const CouplingMatrix& z_ii,
                                     const ReferenceImpedance& ref, const DrisOptions& opts = {});

/// BD-RIS optimized under the assumption Z_II = Z0 I (coupling-unaware).
RisConfiguration optimize_unaware(Architecture arch, const ChannelTriple& chan, const ReferenceImpedance& ref);

/// |h|^2 of a fixed configuration under the true coupling matrix (impedance form).
double evaluate_under(const RisConfiguration& config, const ChannelTriple& chan, const CouplingMatrix& z_ii_true,
                      const ReferenceImpedance& ref);

}  // namespace coupled_ris
