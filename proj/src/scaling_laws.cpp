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

#include "coupled_ris/scaling_laws.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "parallel.hpp"

namespace coupled_ris {

namespace {

struct TraceStats {
    double t1 = 0.0;  // Tr(Re^-1)
    double t2 = 0.0;  // Tr(Re^-2)
};

TraceStats trace_stats(const Eigen::VectorXd& eigenvalues) {
    return {eigenvalues.cwiseInverse().sum(), eigenvalues.cwiseInverse().squaredNorm()};
}

double law(double rho_product, double z0, double t1, double t2) {
    return rho_product / (16.0 * z0 * z0) * (t2 + t1 * t1 + std::sqrt(std::numbers::pi * t2) * t1);
}

void require_constant_diagonal(const Eigen::VectorXcd& d, const char* what) {
    const double scale = std::abs(d(0));
    for (Index i = 1; i < d.size(); ++i) {
        if (std::abs(d(i) - d(0)) > 1e-9 * scale) {
            throw NonConstantDiagonal(std::string(what) + " has unequal diagonal entries");
        }
    }
}

// Per-trial samples, one slot per accumulated quantity.
enum Sample : std::size_t {
    kCrossSq,
    kNormSqRx,
    kNormSqTx,
    kCrossAbs,
    kNormRx,
    kNormTx,
    kNomcCrossSq,
    kNomcNormSqRx,
    kNomcNormSqTx,
    kNomcCrossAbs,
    kNomcNormRx,
    kNomcNormTx,
    kGain,
    kNomcGain,
    kSampleCount
};

struct Moments {
    double mean = 0.0;
    double stderr_ = 0.0;
};

Moments moments(const std::vector<std::array<double, kSampleCount>>& rows, std::size_t slot) {
    const auto n = static_cast<double>(rows.size());
    double sum = 0.0;
    for (const auto& r : rows) {
        sum += r[slot];
    }
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& r : rows) {
        ss += (r[slot] - mean) * (r[slot] - mean);
    }
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

double correlation(const std::vector<std::array<double, kSampleCount>>& rows, std::size_t a, std::size_t b) {
    const double ma = moments(rows, a).mean;
    const double mb = moments(rows, b).mean;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (const auto& r : rows) {
        sab += (r[a] - ma) * (r[b] - mb);
        saa += (r[a] - ma) * (r[a] - ma);
        sbb += (r[b] - mb) * (r[b] - mb);
    }
    return (saa > 0.0 && sbb > 0.0) ? sab / std::sqrt(saa * sbb) : 0.0;
}

double optimal_gain(double cross_abs, double norm_rx, double norm_tx, double z0) {
    const double amplitude = 0.5 * cross_abs + 0.5 * norm_rx * norm_tx;
    return amplitude * amplitude / (4.0 * z0 * z0);
}

}  // namespace

double scaling_mc(const FadingSpec& fading, const CouplingMatrix& z_ii, const ReferenceImpedance& ref) {
    fading.validate();
    if (z_ii.representation() != Representation::Impedance) {
        throw RepresentationError("scaling_mc needs Z_II");
    }
    const TraceStats t = trace_stats(z_ii.real_factors().eigenvalues);
    return law(fading.rho_ri * fading.rho_it, ref.z0(), t.t1, t.t2);
}

double scaling_nomc(const FadingSpec& fading, double z_self, Index n, const ReferenceImpedance& ref) {
    fading.validate();
    if (!(z_self > 0.0) || n < 1) {
        throw InvalidArgument("scaling_nomc needs a positive self-resistance and N >= 1");
    }
    const auto nn = static_cast<double>(n);
    return law(fading.rho_ri * fading.rho_it, ref.z0(), nn / z_self, nn / (z_self * z_self));
}

double chi_mean_ratio(double n) {
    if (!(n > 0.0)) {
        throw InvalidArgument("chi_mean_ratio needs n > 0");
    }
    return std::exp(std::lgamma(n + 0.5) - std::lgamma(n));
}

double TermEstimate::z_score() const {
    if (std_error > 0.0) {
        return (estimate - closed_form) / std_error;
    }
    return estimate == closed_form ? 0.0 : std::numeric_limits<double>::infinity();
}

const TermEstimate& ScalingReport::term(std::string_view name) const {
    for (const auto& t : per_term) {
        if (t.name == name) {
            return t;
        }
    }
    throw InvalidArgument("unknown scaling term '" + std::string(name) + "'");
}

const std::vector<std::string>& scaling_term_names() {
    static const std::vector<std::string> names = {
        "cross_sq",      "norm_sq_rx",      "norm_sq_tx",      "cross_abs",      "norm_rx",      "norm_tx",
        "nomc_cross_sq", "nomc_norm_sq_rx", "nomc_norm_sq_tx", "nomc_cross_abs", "nomc_norm_rx", "nomc_norm_tx"};
    return names;
}

ScalingReport estimate_terms(const FadingSpec& fading, const CouplingMatrix& z_ii, const ReferenceImpedance& ref,
                             std::size_t trials, std::uint64_t seed, unsigned threads) {
    fading.validate();
    if (trials < 100) {
        throw InvalidArgument("estimate_terms needs at least 100 trials");
    }
    if (z_ii.representation() != Representation::Impedance) {
        throw RepresentationError("estimate_terms needs Z_II");
    }
    const Index n = z_ii.size();
    const SpdFactors& f = z_ii.real_factors();
    const Eigen::MatrixXcd inv_sqrt = f.inv_sqrt.cast<Complex>();
    const double r_self = z_ii.values()(0, 0).real();
    const double nomc_scale = 1.0 / std::sqrt(r_self);
    const double z0 = ref.z0();

    std::vector<std::array<double, kSampleCount>> rows(trials);
    detail::parallel_for(trials, threads, [&](std::size_t k) {
        Rng rng(derive_seed(seed, k));
        const ChannelTriple chan = sample_channels(fading, n, rng);
        const Eigen::RowVectorXcd rx = chan.ris_to_rx * inv_sqrt;
        const Eigen::VectorXcd tx = inv_sqrt * chan.tx_to_ris;
        const Complex cross = (rx * tx)(0, 0);
        const Complex nomc_cross = (chan.ris_to_rx * chan.tx_to_ris)(0, 0);

        auto& r = rows[k];
        r[kCrossSq] = std::norm(cross);
        r[kNormSqRx] = rx.squaredNorm();
        r[kNormSqTx] = tx.squaredNorm();
        r[kCrossAbs] = std::abs(cross);
        r[kNormRx] = rx.norm();
        r[kNormTx] = tx.norm();
        r[kNomcCrossSq] = std::norm(nomc_cross);
        r[kNomcNormSqRx] = chan.ris_to_rx.squaredNorm();
        r[kNomcNormSqTx] = chan.tx_to_ris.squaredNorm();
        r[kNomcCrossAbs] = std::abs(nomc_cross);
        r[kNomcNormRx] = chan.ris_to_rx.norm();
        r[kNomcNormTx] = chan.tx_to_ris.norm();
        r[kGain] = optimal_gain(r[kCrossAbs], r[kNormRx], r[kNormTx], z0);
        r[kNomcGain] = optimal_gain(r[kNomcCrossAbs] * nomc_scale * nomc_scale, r[kNomcNormRx] * nomc_scale,
                                    r[kNomcNormTx] * nomc_scale, z0);
    });

    const TraceStats t = trace_stats(f.eigenvalues);
    const auto nn = static_cast<double>(n);
    const double rri = fading.rho_ri;
    const double rit = fading.rho_it;
    const double pi = std::numbers::pi;
    const std::array<std::pair<double, bool>, 12> closed = {{
        {rri * rit * t.t2, false},
        {rri * t.t1, false},
        {rit * t.t1, false},
        {std::sqrt(pi * rri * rit * t.t2 / 4.0), true},
        {std::sqrt(rri * t.t1), true},
        {std::sqrt(rit * t.t1), true},
        {rri * rit * nn, false},
        {rri * nn, false},
        {rit * nn, false},
        {std::sqrt(pi * rri * rit * nn / 4.0), true},
        {std::sqrt(rri * nn), true},
        {std::sqrt(rit * nn), true},
    }};

    ScalingReport report;
    const auto& names = scaling_term_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        const Moments m = moments(rows, i);
        report.per_term.push_back({names[i], closed[i].first, m.mean, m.stderr_, closed[i].second});
    }
    const Moments gain = moments(rows, kGain);
    const Moments nomc_gain = moments(rows, kNomcGain);
    report.closed_form = law(rri * rit, z0, t.t1, t.t2);
    report.monte_carlo_mean = gain.mean;
    report.monte_carlo_stderr = gain.stderr_;
    report.nomc_closed_form = scaling_nomc(fading, r_self, n, ref);
    report.nomc_monte_carlo_mean = nomc_gain.mean;
    report.nomc_monte_carlo_stderr = nomc_gain.stderr_;
    report.condition_number = f.condition_number();
    report.cross_norm_correlation = correlation(rows, kCrossAbs, kNormRx);
    report.chi_mean_exact = std::sqrt(rri) * chi_mean_ratio(nn);
    return report;
}

LemmaMargins lemma_checks(const Eigen::MatrixXd& m) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
        throw DimensionError("lemma_checks needs a non-empty square matrix");
    }
    require_constant_diagonal(m.diagonal().cast<Complex>(), "matrix");
    const double a = m(0, 0);
    const TraceStats t = trace_stats(spd_inv_sqrt(m).eigenvalues);
    const auto n = static_cast<double>(m.rows());
    return {t.t1 - n / a, t.t2 - n / (a * a)};
}

double coupling_benefit_margin(const FadingSpec& fading, const CouplingMatrix& z_ii, const ReferenceImpedance& ref) {
    require_constant_diagonal(z_ii.values().diagonal(), "coupling matrix");
    return scaling_mc(fading, z_ii, ref) - scaling_nomc(fading, z_ii.values()(0, 0).real(), z_ii.size(), ref);
}

}  // namespace coupled_ris
