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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "coupled_ris/scaling_laws.hpp"
#include "test_support.hpp"

using namespace coupled_ris;
using namespace test_support;

namespace {

FadingSpec unit_fading() {
    FadingSpec f;
    f.rho_ri = 1.0;
    f.rho_it = 1.0;
    return f;
}

/// Gamma(n + 1/2) / Gamma(n) by the recurrence r(n + 1) = r(n) (n + 1/2) / n.
double chi_ratio_recurrence(int n) {
    double r = std::sqrt(std::numbers::pi) / 2.0;
    for (int k = 1; k < n; ++k) {
        r *= (k + 0.5) / k;
    }
    return r;
}

/// Monte Carlo mean of the optimal gain with no direct link, using R^-1 from an LU inverse.
double monte_carlo_gain(const Eigen::MatrixXd& r, double rho, double z0, int trials, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(rho / 2.0));
    const Index n = r.rows();
    const Eigen::MatrixXcd rinv = r.fullPivLu().inverse().cast<Complex>();
    double sum = 0.0;
    for (int t = 0; t < trials; ++t) {
        Eigen::RowVectorXcd rx(n);
        Eigen::VectorXcd tx(n);
        for (Index i = 0; i < n; ++i) {
            const double re = g(rng);
            rx(i) = Complex(re, g(rng));
        }
        for (Index i = 0; i < n; ++i) {
            const double re = g(rng);
            tx(i) = Complex(re, g(rng));
        }
        const double c = std::abs((rx * rinv * tx)(0, 0));
        const double a = (rx * rinv * rx.adjoint())(0, 0).real();
        const double b = (tx.adjoint() * rinv * tx)(0, 0).real();
        const double v = (c + std::sqrt(a * b)) / (4.0 * z0);
        sum += v * v;
    }
    return sum / trials;
}

}  // namespace

TEST_CASE("closed-form values") {
    const ReferenceImpedance unit(1.0);
    const auto identity = CouplingMatrix::scaled_identity(64, 1.0, Representation::Impedance);
    const double expected = (64.0 + 4096.0 + std::sqrt(64.0 * std::numbers::pi) * 64.0) / 16.0;
    CHECK(expected == doctest::Approx(316.72).epsilon(0.01 / 316.72));
    CHECK(scaling_mc(unit_fading(), identity, unit) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(scaling_nomc(unit_fading(), 1.0, 64, unit) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(scaling_nomc(unit_fading(), 1.0, 1, unit) ==
          doctest::Approx((2.0 + std::sqrt(std::numbers::pi)) / 16.0).epsilon(1e-14));
    CHECK(scaling_nomc(unit_fading(), 1.0, 1, unit) == doctest::Approx(0.23578).epsilon(1e-5 / 0.23578));
}

TEST_CASE("identity coupling reduces the coupled law to the uncoupled one") {
    const ReferenceImpedance ref(50.0);
    FadingSpec f;
    f.rho_ri = 1e-4;
    f.rho_it = 3e-4;
    for (Index n : {1, 16, 64}) {
        for (double self : {50.0, 73.0}) {
            const auto z = CouplingMatrix::scaled_identity(n, self, Representation::Impedance);
            CHECK(scaling_mc(f, z, ref) == doctest::Approx(scaling_nomc(f, self, n, ref)).epsilon(1e-13));
            CHECK(std::abs(coupling_benefit_margin(f, z, ref)) <= 1e-13 * scaling_mc(f, z, ref));
        }
    }
}

TEST_CASE("laws are linear in the path-gain product") {
    const ReferenceImpedance ref(50.0);
    const auto z = build_coupling_matrix(DipoleArrayGeometry::uniform_planar(16, 0.25));
    FadingSpec a;
    a.rho_ri = 2e-4;
    a.rho_it = 5e-4;
    FadingSpec b = a;
    b.rho_ri *= 3.0;
    CHECK(scaling_mc(b, z, ref) == doctest::Approx(3.0 * scaling_mc(a, z, ref)).epsilon(1e-13));
    CHECK(scaling_nomc(b, 50.0, 16, ref) == doctest::Approx(3.0 * scaling_nomc(a, 50.0, 16, ref)).epsilon(1e-13));
    CHECK_THROWS_AS(scaling_nomc(a, 0.0, 16, ref), InvalidArgument);
    CHECK_THROWS_AS(scaling_nomc(a, 50.0, 0, ref), InvalidArgument);
}

TEST_CASE("chi mean ratio") {
    for (int n : {1, 2, 5, 16, 64, 100}) {
        CHECK(chi_mean_ratio(n) == doctest::Approx(chi_ratio_recurrence(n)).epsilon(1e-12));
    }
    CHECK(chi_mean_ratio(64.0) == doctest::Approx(7.9844).epsilon(1e-4));
    CHECK(std::abs(chi_mean_ratio(64.0) / 8.0 - 1.0) < 2e-3);
    CHECK(chi_mean_ratio(1e6) == doctest::Approx(1000.0).epsilon(1e-6));
    CHECK_THROWS_AS(chi_mean_ratio(0.0), InvalidArgument);
}

TEST_CASE("uncoupled norm term with many trials") {
    const ReferenceImpedance ref(50.0);
    const auto z = CouplingMatrix::scaled_identity(64, 50.0, Representation::Impedance);
    const ScalingReport report = estimate_terms(unit_fading(), z, ref, 10000, 3);
    const TermEstimate& t = report.term("nomc_norm_sq_rx");
    CHECK(t.closed_form == doctest::Approx(64.0));
    CHECK(std::abs(t.z_score()) <= 3.0);
    CHECK(report.chi_mean_exact == doctest::Approx(chi_mean_ratio(64.0)));
    CHECK(report.term("nomc_norm_rx").estimate == doctest::Approx(report.chi_mean_exact).epsilon(0.01));
}

TEST_CASE("coupled expectation terms match their closed forms") {
    const ReferenceImpedance ref(50.0);
    const auto z = build_coupling_matrix(DipoleArrayGeometry::uniform_planar(16, 0.25));
    FadingSpec f;
    f.rho_ri = 1e-4;
    f.rho_it = 1e-4;
    const ScalingReport report = estimate_terms(f, z, ref, 4000, 11);
    REQUIRE(report.per_term.size() == scaling_term_names().size());

    const Eigen::MatrixXd rinv = z.real_part().fullPivLu().inverse();
    const double t1 = rinv.trace();
    const double t2 = (rinv * rinv).trace();
    CHECK(report.term("cross_sq").closed_form == doctest::Approx(1e-8 * t2).epsilon(1e-10));
    CHECK(report.term("norm_sq_rx").closed_form == doctest::Approx(1e-4 * t1).epsilon(1e-10));
    CHECK(report.term("norm_sq_tx").closed_form == doctest::Approx(1e-4 * t1).epsilon(1e-10));
    CHECK(report.term("cross_abs").closed_form ==
          doctest::Approx(std::sqrt(std::numbers::pi * 1e-8 * t2 / 4.0)).epsilon(1e-10));

    for (const TermEstimate& term : report.per_term) {
        CAPTURE(term.name);
        if (!term.asymptotic) {
            CHECK(std::abs(term.z_score()) <= 3.0);
        } else {
            CHECK(std::abs(term.estimate / term.closed_form - 1.0) <= 0.05);
        }
    }
    CHECK(report.condition_number > 1.0);
    CHECK(report.closed_form == doctest::Approx(scaling_mc(f, z, ref)));
    CHECK_THROWS_AS(report.term("missing"), InvalidArgument);
}

TEST_CASE("cross-term and norm correlation under white channels") {
    // With Re{Z_II} = R I, |z_RI z_IT| = ||z_RI|| W with W Rayleigh and independent of ||z_RI||.
    // For X = ||z_RI|| (E X^2 = N, E X = m) and E W = sqrt(pi)/2, E W^2 = 1:
    // corr = E[W] Var(X) / sqrt(Var(X W) Var(X)).
    const ReferenceImpedance ref(50.0);
    const auto z = CouplingMatrix::scaled_identity(64, 50.0, Representation::Impedance);
    const ScalingReport report = estimate_terms(unit_fading(), z, ref, 10000, 13);
    const double n = 64.0;
    const double m = chi_ratio_recurrence(64);
    const double ew = std::sqrt(std::numbers::pi) / 2.0;
    const double expected = ew * (n - m * m) / std::sqrt((n - ew * ew * m * m) * (n - m * m));
    CHECK(expected == doctest::Approx(0.1186).epsilon(1e-3));
    CHECK(std::abs(report.cross_norm_correlation - expected) <= 0.03);
}

TEST_CASE("coupled law against an independent Monte Carlo") {
    const ReferenceImpedance ref(50.0);
    const auto z = build_coupling_matrix(DipoleArrayGeometry::uniform_planar(16, 0.25));
    FadingSpec f;
    f.rho_ri = 1e-4;
    f.rho_it = 1e-4;
    const double closed = scaling_mc(f, z, ref);
    const double mc = monte_carlo_gain(z.real_part(), 1e-4, 50.0, 3000, 99);
    CHECK(std::abs(mc / closed - 1.0) <= 0.03);
    const ScalingReport report = estimate_terms(f, z, ref, 3000, 5);
    CHECK(std::abs(report.monte_carlo_mean / closed - 1.0) <= 0.03);
    CHECK(std::abs(report.nomc_monte_carlo_mean / report.nomc_closed_form - 1.0) <= 0.03);
}

TEST_CASE("estimates do not depend on the thread count") {
    const ReferenceImpedance ref(50.0);
    const auto z = build_coupling_matrix(DipoleArrayGeometry::uniform_planar(8, 0.25));
    const ScalingReport one = estimate_terms(unit_fading(), z, ref, 300, 21, 1);
    const ScalingReport four = estimate_terms(unit_fading(), z, ref, 300, 21, 4);
    CHECK(one.monte_carlo_mean == four.monte_carlo_mean);
    for (std::size_t i = 0; i < one.per_term.size(); ++i) {
        CHECK(one.per_term[i].estimate == four.per_term[i].estimate);
        CHECK(one.per_term[i].std_error == four.per_term[i].std_error);
    }
    CHECK_THROWS_AS(estimate_terms(unit_fading(), z, ref, 99, 21), InvalidArgument);
}

TEST_CASE("trace lemmas") {
    CHECK(lemma_checks(3.0 * Eigen::MatrixXd::Identity(5, 5)).trace_inverse == doctest::Approx(0.0));
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXd m = random_spd(8, rng, 1.0);
        const Eigen::VectorXd d = m.diagonal().cwiseSqrt().cwiseInverse();
        m = d.asDiagonal() * m * d.asDiagonal() * 50.0;
        const LemmaMargins margins = lemma_checks(m);
        CHECK(margins.trace_inverse >= -1e-12);
        CHECK(margins.trace_inverse_squared >= -1e-12);
    }
    Eigen::MatrixXd uneven = Eigen::MatrixXd::Identity(3, 3);
    uneven(2, 2) = 2.0;
    CHECK_THROWS_AS(lemma_checks(uneven), NonConstantDiagonal);
    const CouplingMatrix z(uneven.cast<Complex>(), Representation::Impedance);
    CHECK_THROWS_AS(coupling_benefit_margin(unit_fading(), z, ReferenceImpedance(50.0)), NonConstantDiagonal);
}

TEST_CASE("coupling benefit grows as the spacing shrinks") {
    const ReferenceImpedance ref(50.0);
    FadingSpec f;
    f.rho_ri = 1e-4;
    f.rho_it = 1e-4;
    double previous = -1.0;
    for (double d : {0.5, 0.4, 0.3, 0.25, 0.2}) {
        const auto z = build_coupling_matrix(DipoleArrayGeometry::uniform_planar(32, d));
        const double margin = coupling_benefit_margin(f, z, ref);
        CHECK(margin >= -1e-12 * scaling_mc(f, z, ref));
        CHECK(margin > previous);
        previous = margin;
    }
}

TEST_CASE("Rician channels keep the coupled law ordering") {
    const ReferenceImpedance ref(50.0);
    const auto z = build_coupling_matrix(DipoleArrayGeometry::uniform_planar(16, 0.25));
    FadingSpec f;
    f.rho_ri = 1e-4;
    f.rho_it = 1e-4;
    f.model = FadingModel::Rician;
    f.k_factor = 3.0;
    const ScalingReport report = estimate_terms(f, z, ref, 1000, 8);
    CHECK(report.monte_carlo_mean > report.nomc_monte_carlo_mean);
}
