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
#include <string>
#include <string_view>
#include <vector>

#include "coupled_ris/coupling.hpp"
#include "coupled_ris/fading.hpp"
#include "coupled_ris/types.hpp"

namespace coupled_ris {

/// Average optimal channel gain with coupling under Rayleigh fading and an obstructed direct link:
/// rho_ri rho_it / (16 Z0^2) * (T2 + T1^2 + sqrt(pi T2) T1), T1 = Tr(Re^-1), T2 = Tr(Re^-2).
double scaling_mc(const FadingSpec& fading, const CouplingMatrix& z_ii, const ReferenceImpedance& ref);

/// Same law without coupling: rho_ri rho_it / (16 Z0^2 Zs^2) * (N + N^2 + sqrt(pi N) N).
double scaling_nomc(const FadingSpec& fading, double z_self, Index n, const ReferenceImpedance& ref);

/// Gamma(n + 1/2) / Gamma(n), the exact mean of a chi variable with 2n degrees of freedom
/// (per unit sqrt(rho)), evaluated through log-Gamma.
double chi_mean_ratio(double n);

struct TermEstimate {
    std::string name;
    double closed_form = 0.0;
    double estimate = 0.0;
    double std_error = 0.0;
    bool asymptotic = false;  // closed form relies on channel hardening or the large-N Gamma ratio

    double z_score() const;
};

struct ScalingReport {
    double closed_form = 0.0;          // scaling_mc
    double monte_carlo_mean = 0.0;     // sample mean of the coupled optimal gain
    double monte_carlo_stderr = 0.0;
    double nomc_closed_form = 0.0;     // scaling_nomc with the array's self-resistance
    double nomc_monte_carlo_mean = 0.0;
    double nomc_monte_carlo_stderr = 0.0;
    double condition_number = 0.0;     // of Re{Z_II}^-1, diagnostic only
    double cross_norm_correlation = 0.0;  // corr(|z_RI Re^-1 z_IT|, ||z_RI Re^-1/2||)
    double chi_mean_exact = 0.0;       // sqrt(rho_ri) Gamma(N+1/2)/Gamma(N)
    std::vector<TermEstimate> per_term;

    /// Throws InvalidArgument for an unknown name.
    const TermEstimate& term(std::string_view name) const;
};

/// Names of the per-term entries, in report order.
const std::vector<std::string>& scaling_term_names();

/// Monte Carlo estimates of every expectation term and of both optimal gains. Trials use
/// derive_seed(seed, trial) streams and are reduced in trial order, so results do not depend on
/// the thread count.
ScalingReport estimate_terms(const FadingSpec& fading, const CouplingMatrix& z_ii, const ReferenceImpedance& ref,
                             std::size_t trials, std::uint64_t seed, unsigned threads = 1);

struct LemmaMargins {
    double trace_inverse = 0.0;          // Tr(M^-1) - N/a
    double trace_inverse_squared = 0.0;  // Tr(M^-2) - N/a^2
};

/// Throws NonConstantDiagonal when diagonal entries differ by more than 1e-9 relative.
LemmaMargins lemma_checks(const Eigen::MatrixXd& m);

/// scaling_mc - scaling_nomc for the same N and self-resistance.
double coupling_benefit_margin(const FadingSpec& fading, const CouplingMatrix& z_ii, const ReferenceImpedance& ref);

}  // namespace coupled_ris
