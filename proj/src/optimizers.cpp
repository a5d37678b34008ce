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

#include "coupled_ris/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "linalg.hpp"

namespace coupled_ris {

namespace {

constexpr double kAlignmentTolerance = 1e-8;
constexpr double kRankThreshold = 1e-10;
constexpr double kPolePerturbation = 1e-8;

/// (|s_RT| + ||s_RI|| ||s_IT||)^2 for decoupled scattering channels.
double scattering_bound(const ChannelTriple& chan, const CouplingMatrix& coupling, const ReferenceImpedance& ref) {
    const ScatteringState s = to_scattering(effective_channels(chan, coupling, ref), ref);
    const double value = std::abs(s.s_rt) + s.s_ri.norm() * s.s_it.norm();
    return value * value;
}

double wrap_phase(double t) {
    return std::remainder(t, 2.0 * std::numbers::pi);
}

/// Free entries of a symmetric pattern in the order used by stacked_alignment_matrix.
std::vector<std::pair<Index, Index>> pattern_entries(Index n, Architecture pattern) {
    std::vector<std::pair<Index, Index>> entries;
    switch (pattern) {
        case Architecture::FullyConnected:
            for (Index j = 0; j < n; ++j) {
                for (Index i = 0; i <= j; ++i) {
                    entries.emplace_back(i, j);
                }
            }
            break;
        case Architecture::TreeTridiagonal:
            for (Index i = 0; i < n; ++i) {
                entries.emplace_back(i, i);
            }
            for (Index i = 0; i + 1 < n; ++i) {
                entries.emplace_back(i, i + 1);
            }
            break;
        case Architecture::Diagonal:
            for (Index i = 0; i < n; ++i) {
                entries.emplace_back(i, i);
            }
            break;
    }
    return entries;
}

void check_equations(const AlignmentEquations& eq) {
    if (eq.alpha.size() == 0 || eq.alpha.size() != eq.beta.size()) {
        throw DimensionError("alignment vectors must be non-empty and of equal length");
    }
    if (!eq.alpha.allFinite() || !eq.beta.allFinite()) {
        throw InvalidArgument("alignment vectors contain non-finite entries");
    }
}

void check_residual(const Eigen::MatrixXd& m, const AlignmentEquations& eq) {
    const double residual = (m.cast<Complex>() * eq.alpha - eq.beta).norm();
    const double scale = eq.beta.norm();
    if (!(residual <= kAlignmentTolerance * scale) && !(scale == 0.0 && residual == 0.0)) {
        throw AlignmentInfeasible("alignment system has no solution in the requested pattern (residual " +
                                      std::to_string(residual) + ", |beta| " + std::to_string(scale) + ")",
                                  residual);
    }
}

/// Minimum-norm least-squares solve of the stacked real system over the pattern's free entries.
LoadMatrix solve_pattern_alignment(const AlignmentEquations& eq, Architecture pattern, LoadKind kind) {
    check_equations(eq);
    const Index n = eq.alpha.size();
    const Eigen::MatrixXd a = stacked_alignment_matrix(eq.alpha, pattern);
    Eigen::VectorXd rhs(2 * n);
    rhs << eq.beta.real(), eq.beta.imag();

    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(kRankThreshold);
    const Eigen::VectorXd x = svd.solve(rhs);

    const auto entries = pattern_entries(n, pattern);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto [i, j] = entries[k];
        m(i, j) = x(static_cast<Index>(k));
        m(j, i) = x(static_cast<Index>(k));
    }
    check_residual(m, eq);
    return LoadMatrix(kind, m);
}

AlignmentSystem alignment_with_phase(const ScatteringState& scat, const CouplingMatrix& coupling,
                                     const ReferenceImpedance& ref, Architecture pattern, double phase) {
    AlignmentSystem sys;
    sys.domain = coupling.representation();
    sys.pattern = pattern;
    sys.phase = phase;
    sys.s_it_hat = scat.s_it / scat.s_it.norm();
    sys.target = std::polar(1.0, phase) * scat.s_ri.adjoint() / scat.s_ri.norm();

    const Eigen::VectorXcd& u = sys.s_it_hat;
    const Eigen::VectorXcd& v = sys.target;
    const double r = ref.reference(sys.domain);
    if (sys.domain == Representation::Impedance) {
        sys.barred.alpha = kJ * (u - v);
        sys.barred.beta = r * (u + v);
    } else {
        sys.barred.alpha = kJ * (u + v);
        sys.barred.beta = r * (u - v);
    }

    const SpdFactors& f = coupling.real_factors();
    sys.physical.alpha = f.inv_sqrt.cast<Complex>() * sys.barred.alpha;
    sys.physical.beta =
        f.sqrt.cast<Complex>() * sys.barred.beta / r - coupling.imag_part().cast<Complex>() * sys.physical.alpha;
    return sys;
}

RisConfiguration finish(Architecture arch, LoadMatrix load, double gain, double bound, double residual) {
    RisConfiguration config;
    config.architecture = arch;
    config.load = std::move(load);
    config.achieved_gain = gain;
    config.bound_gain = bound;
    config.residual = residual;
    return config;
}

}  // namespace

double upper_bound_fc(const ChannelTriple& chan, const CouplingMatrix& z_ii, const ReferenceImpedance& ref) {
    if (chan.representation != Representation::Impedance || z_ii.representation() != Representation::Impedance) {
        throw RepresentationError("upper_bound_fc needs impedance-form channels and Z_II");
    }
    return scattering_bound(chan, z_ii, ref);
}

double upper_bound_tc(const ChannelTriple& chan, const CouplingMatrix& y_ii, const ReferenceImpedance& ref) {
    if (chan.representation != Representation::Admittance || y_ii.representation() != Representation::Admittance) {
        throw RepresentationError("upper_bound_tc needs admittance-form channels and Y_II");
    }
    return scattering_bound(chan, y_ii, ref);
}

AlignmentSystem build_alignment(const ScatteringState& scat, const CouplingMatrix& coupling,
                                const ReferenceImpedance& ref, Architecture pattern) {
    if (scat.s_ri.size() != scat.s_it.size() || scat.s_it.size() != coupling.size()) {
        throw DimensionError("scattering channels and coupling sizes differ");
    }
    if (scat.s_ri.norm() == 0.0 || scat.s_it.norm() == 0.0) {
        throw DegenerateChannel("a RIS channel vector is zero; every load is optimal");
    }
    const double phase = std::abs(scat.s_rt) == 0.0 ? 0.0 : std::arg(scat.s_rt);
    AlignmentSystem sys = alignment_with_phase(scat, coupling, ref, pattern, phase);
    if (sys.barred.alpha.norm() < 1e-10) {
        sys = alignment_with_phase(scat, coupling, ref, pattern, phase + kPolePerturbation);
    }
    return sys;
}

Eigen::MatrixXd stacked_alignment_matrix(const Eigen::VectorXcd& alpha, Architecture pattern) {
    const Index n = alpha.size();
    const auto entries = pattern_entries(n, pattern);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, static_cast<Index>(entries.size()));
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto [i, j] = entries[k];
        const auto col = static_cast<Index>(k);
        a(i, col) += alpha(j).real();
        a(n + i, col) += alpha(j).imag();
        if (i != j) {
            a(j, col) += alpha(i).real();
            a(n + j, col) += alpha(i).imag();
        }
    }
    return a;
}

LoadMatrix solve_symmetric_alignment(const AlignmentEquations& eq, LoadKind kind) {
    check_equations(eq);
    const Index n = eq.alpha.size();
    Eigen::MatrixXd a(n, 2);
    Eigen::MatrixXd b(n, 2);
    a << eq.alpha.real(), eq.alpha.imag();
    b << eq.beta.real(), eq.beta.imag();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(kRankThreshold);
    Eigen::MatrixXd pinv = Eigen::MatrixXd::Zero(2, n);
    const Eigen::VectorXd& sigma = svd.singularValues();
    for (Index k = 0; k < svd.rank(); ++k) {
        pinv += svd.matrixV().col(k) * svd.matrixU().col(k).transpose() / sigma(k);
    }

    const Eigen::MatrixXd bp = b * pinv;
    const Eigen::MatrixXd m = bp + bp.transpose() - pinv.transpose() * (a.transpose() * bp);
    check_residual(m, eq);
    return LoadMatrix(kind, m);
}

LoadMatrix solve_tridiagonal_alignment(const AlignmentEquations& eq, LoadKind kind) {
    return solve_pattern_alignment(eq, Architecture::TreeTridiagonal, kind);
}

double alignment_residual(const LoadMatrix& barred, const AlignmentSystem& sys, const ReferenceImpedance& ref) {
    if (barred.kind() != load_kind_for(sys.domain)) {
        throw RepresentationError("load kind does not match the alignment domain");
    }
    return (cayley(barred, ref) * sys.s_it_hat - sys.target).norm();
}

RisConfiguration optimize_fully_connected(const ChannelTriple& chan, const CouplingMatrix& z_ii,
                                          const ReferenceImpedance& ref) {
    if (chan.representation != Representation::Impedance || z_ii.representation() != Representation::Impedance) {
        throw RepresentationError("optimize_fully_connected needs impedance-form channels and Z_II");
    }
    const ScatteringState scat = to_scattering(effective_channels(chan, z_ii, ref), ref);
    const double bound = upper_bound_fc(chan, z_ii, ref);
    if (scat.s_ri.norm() == 0.0 || scat.s_it.norm() == 0.0) {
        const LoadMatrix zero = LoadMatrix::zeros(LoadKind::Reactance, chan.size());
        return finish(Architecture::FullyConnected, zero, std::norm(channel_z(chan, zero, z_ii, ref)), bound, 0.0);
    }
    const AlignmentSystem sys = build_alignment(scat, z_ii, ref, Architecture::FullyConnected);
    const LoadMatrix barred = solve_symmetric_alignment(sys.barred, LoadKind::Reactance);
    LoadMatrix load = recover_load(barred, z_ii, ref);
    const double gain = std::norm(channel_z(chan, load, z_ii, ref));
    return finish(Architecture::FullyConnected, std::move(load), gain, bound, alignment_residual(barred, sys, ref));
}

RisConfiguration optimize_tree_connected(const ChannelTriple& chan, const CouplingMatrix& z_ii,
                                         const ReferenceImpedance& ref) {
    if (chan.representation != Representation::Impedance || z_ii.representation() != Representation::Impedance) {
        throw RepresentationError("optimize_tree_connected needs impedance-form channels and Z_II");
    }
    const AdmittanceModel adm = z_to_y(chan, z_ii, ref);
    const ScatteringState scat = to_scattering(effective_channels(adm.channels, adm.y_ii, ref), ref);
    const double bound = upper_bound_tc(adm.channels, adm.y_ii, ref);
    if (scat.s_ri.norm() == 0.0 || scat.s_it.norm() == 0.0) {
        const LoadMatrix zero = LoadMatrix::zeros(LoadKind::Susceptance, chan.size());
        return finish(Architecture::TreeTridiagonal, zero, std::norm(channel_y(adm.channels, zero, adm.y_ii, ref)),
                      bound, 0.0);
    }
    const AlignmentSystem sys = build_alignment(scat, adm.y_ii, ref, Architecture::TreeTridiagonal);
    LoadMatrix load = solve_tridiagonal_alignment(sys.physical, LoadKind::Susceptance);
    const LoadMatrix barred = decouple_load(load, adm.y_ii, ref);
    const double gain = std::norm(channel_y(adm.channels, load, adm.y_ii, ref));
    return finish(Architecture::TreeTridiagonal, std::move(load), gain, bound, alignment_residual(barred, sys, ref));
}

Eigen::VectorXd dris_unaware_phases(const ChannelTriple& chan, const ReferenceImpedance& ref) {
    if (chan.representation != Representation::Impedance) {
        throw RepresentationError("dris_unaware_phases needs impedance-form channels");
    }
    chan.validate();
    const CouplingMatrix ideal = CouplingMatrix::scaled_identity(chan.size(), ref.z0(), Representation::Impedance);
    const ScatteringState s = to_scattering(effective_channels(chan, ideal, ref), ref);
    const double target = std::abs(s.s_rt) == 0.0 ? 0.0 : std::arg(s.s_rt);
    Eigen::VectorXd theta(chan.size());
    for (Index n = 0; n < chan.size(); ++n) {
        const Complex product = s.s_ri(n) * s.s_it(n);
        theta(n) = wrap_phase(product == Complex{} ? target : target - std::arg(product));
    }
    return theta;
}

RisConfiguration optimize_dris_unaware(const ChannelTriple& chan, const ReferenceImpedance& ref) {
    const Eigen::VectorXd theta = dris_unaware_phases(chan, ref);
    const Index n = theta.size();
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        double t = theta(i);
        if (std::abs(t) < kPolePerturbation) {
            t = std::signbit(t) ? -kPolePerturbation : kPolePerturbation;
        }
        x(i, i) = ref.z0() / std::tan(0.5 * t);
    }
    const CouplingMatrix ideal = CouplingMatrix::scaled_identity(n, ref.z0(), Representation::Impedance);
    LoadMatrix load(LoadKind::Reactance, x);
    const double gain = std::norm(channel_z(chan, load, ideal, ref));
    return finish(Architecture::Diagonal, std::move(load), gain, upper_bound_fc(chan, ideal, ref), 0.0);
}

DrisTrace optimize_dris_aware_traced(const ChannelTriple& chan, const CouplingMatrix& z_ii,
                                     const ReferenceImpedance& ref, const DrisOptions& opts) {
    if (opts.grid < 1 || opts.max_sweeps < 0 || !(opts.tolerance >= 0.0)) {
        throw InvalidArgument("D-RIS options need grid >= 1, max_sweeps >= 0 and tolerance >= 0");
    }
    if (z_ii.representation() != Representation::Impedance) {
        throw RepresentationError("optimize_dris_aware needs Z_II");
    }
    const Index n = chan.size();
    std::vector<double> candidates(static_cast<std::size_t>(opts.grid));
    for (int k = 0; k < opts.grid; ++k) {
        const double t = 2.0 * std::numbers::pi * (k + 0.5) / opts.grid;
        candidates[static_cast<std::size_t>(k)] = ref.z0() / std::tan(0.5 * t);
    }

    Eigen::VectorXd x = optimize_dris_unaware(chan, ref).load.values().diagonal();
    const double scale = 1.0 / (2.0 * ref.z0());
    auto evaluate = [&](const Eigen::VectorXd& diag) {
        return std::norm(channel_z(chan, LoadMatrix(LoadKind::Reactance, diag.asDiagonal().toDenseMatrix()), z_ii, ref));
    };

    DrisTrace trace;
    double gain = evaluate(x);
    trace.sweep_gains.push_back(gain);
    double improvement = 0.0;
    int sweeps = 0;
    for (; sweeps < opts.max_sweeps;) {
        Eigen::MatrixXcd a = z_ii.values();
        a.diagonal() += kJ * x.cast<Complex>();
        Eigen::MatrixXcd g = detail::checked_inverse(a, "jX_I + Z_II");
        Eigen::RowVectorXcd p = chan.ris_to_rx * g;
        Eigen::VectorXcd q = g * chan.tx_to_ris;
        Complex cascade = (chan.ris_to_rx * q)(0, 0);

        for (Index e = 0; e < n; ++e) {
            double best_gain = std::norm((chan.direct - cascade) * scale);
            double best_x = x(e);
            Complex best_update{};
            for (double c : candidates) {
                const double delta = c - x(e);
                const Complex denom = 1.0 + kJ * delta * g(e, e);
                const Complex update = -kJ * delta * p(e) * q(e) / denom;
                const double trial = std::norm((chan.direct - (cascade + update)) * scale);
                if (trial > best_gain) {
                    best_gain = trial;
                    best_x = c;
                    best_update = update;
                }
            }
            if (best_x == x(e)) {
                continue;
            }
            const Complex jd = kJ * (best_x - x(e));
            const Complex denom = 1.0 + jd * g(e, e);
            const Eigen::VectorXcd col = g.col(e);
            const Eigen::RowVectorXcd row = g.row(e);
            g.noalias() -= (jd / denom) * col * row;
            p = chan.ris_to_rx * g;
            q = g * chan.tx_to_ris;
            cascade += best_update;
            x(e) = best_x;
        }
        ++sweeps;
        const double next = evaluate(x);
        improvement = gain > 0.0 ? (next - gain) / gain : (next > 0.0 ? 1.0 : 0.0);
        gain = next;
        trace.sweep_gains.push_back(gain);
        if (improvement < opts.tolerance) {
            break;
        }
    }

    trace.config = finish(Architecture::Diagonal, LoadMatrix(LoadKind::Reactance, x.asDiagonal().toDenseMatrix()), gain, upper_bound_fc(chan, z_ii, ref), std::max(improvement, 0.0));
    trace.config.sweeps = sweeps;
    return trace;
}

RisConfiguration optimize_dris_aware(const ChannelTriple& chan, const CouplingMatrix& z_ii,
                                     const ReferenceImpedance& ref, const DrisOptions& opts) {
    return optimize_dris_aware_traced(chan, z_ii, ref, opts).config;
}

RisConfiguration optimize_unaware(Architecture arch, const ChannelTriple& chan, const ReferenceImpedance& ref) {
    const CouplingMatrix ideal = CouplingMatrix::scaled_identity(chan.size(), ref.z0(), Representation::Impedance);
    switch (arch) {
        case Architecture::FullyConnected:
            return optimize_fully_connected(chan, ideal, ref);
        case Architecture::TreeTridiagonal:
            return optimize_tree_connected(chan, ideal, ref);
        case Architecture::Diagonal:
            return optimize_dris_unaware(chan, ref);
    }
    throw InvalidArgument("unknown architecture");
}

double evaluate_under(const RisConfiguration& config, const ChannelTriple& chan, const CouplingMatrix& z_ii_true,
                      const ReferenceImpedance& ref) {
    if (z_ii_true.representation() != Representation::Impedance) {
        throw RepresentationError("evaluate_under needs the true Z_II");
    }
    if (config.load.kind() == LoadKind::Reactance) {
        return std::norm(channel_z(chan, config.load, z_ii_true, ref));
    }
    const AdmittanceModel adm = z_to_y(chan, z_ii_true, ref);
    return std::norm(channel_y(adm.channels, config.load, adm.y_ii, ref));
}

}  // namespace coupled_ris
