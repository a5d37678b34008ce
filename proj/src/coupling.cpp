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

#include "coupled_ris/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "parallel.hpp"

namespace coupled_ris {

namespace detail {

GaussRule gauss_legendre(int n) {
    if (n < 1) {
        throw InvalidArgument("Gauss-Legendre rule needs at least one node");
    }
    GaussRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            // p1 = P_n(x), p0 = P_{n-1}(x)
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return rule;
}

}  // namespace detail

// ---------------------------------------------------------------------------------------------
// Geometry

double DipoleArrayGeometry::wavenumber() const noexcept {
    return 2.0 * std::numbers::pi / wavelength();
}

std::pair<double, double> DipoleArrayGeometry::position(std::size_t n) const {
    if (n >= size()) {
        throw GeometryError("element index " + std::to_string(n) + " out of range");
    }
    return {static_cast<double>(n % n_x) * spacing, static_cast<double>(n / n_x) * spacing};
}

void DipoleArrayGeometry::validate() const {
    if (n_x == 0 || n_y == 0) {
        throw GeometryError("array must have at least one element");
    }
    if (!(frequency > 0.0) || !std::isfinite(frequency)) {
        throw GeometryError("frequency must be positive");
    }
    if (!(spacing > 0.0)) {
        throw GeometryError("inter-element spacing must be positive");
    }
    if (!(dipole_length > 0.0) || dipole_length >= wavelength()) {
        throw GeometryError("dipole length must lie in (0, lambda)");
    }
    if (!(wire_radius > 0.0) || wire_radius >= 0.1 * dipole_length) {
        throw GeometryError("wire radius must be positive and much smaller than the dipole length");
    }
    if (std::abs(std::sin(wavenumber() * dipole_length / 2.0)) < 1e-12) {
        throw GeometryError("dipole length places a current null at the feed");
    }
}

DipoleArrayGeometry DipoleArrayGeometry::uniform_planar(std::size_t n, double spacing_in_wavelengths,
                                                        double frequency, std::size_t n_x) {
    if (n > 0 && n < n_x) {
        n_x = n;
    }
    if (n_x == 0 || n == 0 || n % n_x != 0) {
        throw GeometryError("element count " + std::to_string(n) + " is not a multiple of n_x = " +
                            std::to_string(n_x));
    }
    DipoleArrayGeometry geom;
    geom.n_x = n_x;
    geom.n_y = n / n_x;
    geom.frequency = frequency;
    const double lambda = geom.wavelength();
    geom.spacing = spacing_in_wavelengths * lambda;
    geom.dipole_length = lambda / 4.0;
    geom.wire_radius = lambda / 500.0;
    geom.validate();
    return geom;
}

// ---------------------------------------------------------------------------------------------
// Mutual impedance

namespace {

// Field kernel of the double integral as a function of t = y'' - y'.
struct FieldKernel {
    double k0;
    double dx;
    double reg2;  // squared wire radius for collinear overlapping wires, 0 otherwise
    Complex scale;

    Complex operator()(double t) const {
        const double d2 = dx * dx + t * t + reg2;
        const double d = std::sqrt(d2);
        const Complex bracket = (t * t / d2) * Complex(3.0 / d2 - k0 * k0, 3.0 * k0 / d) -
                                Complex(1.0 / d, k0) / d + k0 * k0;
        return scale * bracket * std::exp(Complex(0.0, -k0 * d)) / d;
    }
};

// W(tau) = integral of g(s) g(s + tau) ds with the normalized sinusoidal current g.
struct CurrentOverlap {
    double k0;
    double half;
    double inv_feed;  // 1 / sin(k0 half)
    detail::GaussRule rule;

    double current(double s) const { return std::sin(k0 * (half - std::abs(s))) * inv_feed; }

    double operator()(double tau) const {
        const double lo = std::max(-half, -half - tau);
        const double hi = std::min(half, half - tau);
        if (hi <= lo) {
            return 0.0;
        }
        double cuts[4] = {lo, 0.0, -tau, hi};
        std::sort(cuts + 1, cuts + 3);
        double total = 0.0;
        for (int k = 0; k < 3; ++k) {
            const double a = std::clamp(cuts[k], lo, hi);
            const double b = std::clamp(cuts[k + 1], lo, hi);
            if (b <= a) {
                continue;
            }
            const double mid = 0.5 * (a + b);
            const double rad = 0.5 * (b - a);
            double piece = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const double s = mid + rad * rule.nodes[i];
                piece += rule.weights[i] * current(s) * current(s + tau);
            }
            total += rad * piece;
        }
        return total;
    }
};

struct Panel {
    double a;
    double b;
};

// Panels over [lo, hi] graded towards `near` (an endpoint) so that each panel is at most half as
// wide as its effective distance to the kernel peak.
void graded_panels(double lo, double hi, double near, double peak_offset, double cap, std::vector<Panel>& out) {
    const double length = hi - lo;
    if (length <= 0.0) {
        return;
    }
    const bool from_low = std::abs(near - lo) <= std::abs(near - hi);
    double walked = 0.0;
    while (walked < length) {
        const double effective = std::hypot(peak_offset, walked);
        double width = std::min(cap, 0.5 * effective);
        width = std::max(width, length * 1e-12);
        if (walked + width > length * (1.0 - 1e-12)) {
            width = length - walked;
        }
        if (from_low) {
            out.push_back({lo + walked, lo + walked + width});
        } else {
            out.push_back({hi - walked - width, hi - walked});
        }
        walked += width;
    }
}

Complex integrate_panels(const std::vector<Panel>& panels, const detail::GaussRule& rule, const FieldKernel& kernel,
                         const CurrentOverlap& overlap, double dy) {
    Complex total{0.0, 0.0};
    for (const Panel& p : panels) {
        const double mid = 0.5 * (p.a + p.b);
        const double rad = 0.5 * (p.b - p.a);
        Complex piece{0.0, 0.0};
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double tau = mid + rad * rule.nodes[i];
            piece += rule.weights[i] * kernel(tau + dy) * overlap(tau);
        }
        total += rad * piece;
    }
    return total;
}

}  // namespace

Complex mutual_impedance_offset(const DipoleArrayGeometry& geom, double dx, double dy, const QuadratureOptions& opts) {
    geom.validate();
    const double lambda = geom.wavelength();
    const double len = geom.dipole_length;
    if (std::abs(dx) < 1e-12 * lambda && std::abs(dy) < 1e-12 * lambda) {
        throw GeometryError("coincident dipoles have no mutual impedance");
    }
    if (opts.nodes < 2 || !(opts.tolerance > 0.0)) {
        throw InvalidArgument("quadrature needs at least two nodes and a positive tolerance");
    }

    const double k0 = geom.wavenumber();
    const bool collinear = std::abs(dx) < 1e-12 * lambda;
    const bool overlapping = collinear && std::abs(dy) <= len * (1.0 + 1e-9);
    const double reg2 = overlapping ? geom.wire_radius * geom.wire_radius : 0.0;

    const FieldKernel kernel{k0, dx, reg2, kJ * kFreeSpaceImpedance / (4.0 * std::numbers::pi * k0)};
    const double half = len / 2.0;
    const CurrentOverlap overlap{k0, half, 1.0 / std::sin(k0 * half), detail::gauss_legendre(20)};

    // Breakpoints: support ends, the overlap kink at tau = 0 and the point nearest to t = 0.
    const double peak = -dy;
    const double near = std::clamp(peak, -len, len);
    const double scale = std::sqrt(dx * dx + reg2);
    std::vector<double> cuts{-len, 0.0, near, len};
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(), [len](double a, double b) { return std::abs(a - b) < 1e-14 * len; }),
               cuts.end());

    std::vector<Panel> panels;
    const double cap = lambda / 16.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double lo = cuts[k];
        const double hi = cuts[k + 1];
        const double anchor = std::abs(near - lo) <= std::abs(near - hi) ? lo : hi;
        const double offset = std::hypot(scale, anchor - peak);
        graded_panels(lo, hi, anchor, offset, cap, panels);
    }

    const Complex coarse = integrate_panels(panels, detail::gauss_legendre(opts.nodes), kernel, overlap, dy);
    const Complex fine = integrate_panels(panels, detail::gauss_legendre(2 * opts.nodes), kernel, overlap, dy);
    const double change = std::abs(fine - coarse);
    if (!(change <= opts.tolerance * std::abs(fine))) {
        throw QuadratureError("mutual impedance quadrature did not converge at dx = " + std::to_string(dx) +
                                  " m, dy = " + std::to_string(dy) + " m",
                              std::abs(fine), change);
    }
    return fine;
}

Complex mutual_impedance(const DipoleArrayGeometry& geom, std::size_t p, std::size_t q, const QuadratureOptions& opts) {
    geom.validate();
    if (p == q) {
        throw GeometryError("mutual impedance needs two distinct elements");
    }
    const auto [xp, yp] = geom.position(p);
    const auto [xq, yq] = geom.position(q);
    return mutual_impedance_offset(geom, xq - xp, yq - yp, opts);
}

// ---------------------------------------------------------------------------------------------
// SPD factors

namespace {

SpdFactors factors_from_eigen(const Eigen::VectorXd& eigenvalues, const Eigen::MatrixXd& eigenvectors) {
    SpdFactors f;
    f.eigenvalues = eigenvalues;
    f.eigenvectors = eigenvectors;
    f.lambda_min = eigenvalues.minCoeff();
    f.lambda_max = eigenvalues.maxCoeff();
    if (!(f.lambda_max > 0.0) || f.lambda_min <= 1e-12 * f.lambda_max) {
        throw NotPositiveDefinite("matrix is not positive definite (lambda_min = " + std::to_string(f.lambda_min) +
                                  ", lambda_max = " + std::to_string(f.lambda_max) + ")");
    }
    const Eigen::ArrayXd lam = eigenvalues.array();
    const Eigen::MatrixXd& q = eigenvectors;
    f.inv_sqrt = detail::symmetrized(q * lam.rsqrt().matrix().asDiagonal() * q.transpose());
    f.sqrt = detail::symmetrized(q * lam.sqrt().matrix().asDiagonal() * q.transpose());
    f.inv = detail::symmetrized(q * lam.inverse().matrix().asDiagonal() * q.transpose());
    return f;
}

}  // namespace

SpdFactors spd_inv_sqrt(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw DimensionError("SPD factorization needs a non-empty square matrix");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(detail::symmetrized(m));
    if (eig.info() != Eigen::Success) {
        throw NumericalError("symmetric eigendecomposition failed");
    }
    return factors_from_eigen(eig.eigenvalues(), eig.eigenvectors());
}

// ---------------------------------------------------------------------------------------------
// CouplingMatrix

struct CouplingMatrix::State {
    Eigen::MatrixXcd values;
    Representation rep = Representation::Impedance;
    PassivityPolicy policy = PassivityPolicy::Enforce;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    bool passive = true;
    std::optional<SpdFactors> factors;
    std::string factor_error;

    std::once_flag dual_once;
    std::unique_ptr<CouplingMatrix> dual;
};

CouplingMatrix::CouplingMatrix(const Eigen::MatrixXcd& values, Representation rep, PassivityPolicy policy)
    : state_(std::make_shared<State>()) {
    if (values.rows() != values.cols() || values.rows() == 0) {
        throw DimensionError("coupling matrix must be square and non-empty");
    }
    if (!values.allFinite()) {
        throw InvalidArgument("coupling matrix entries must be finite");
    }
    const double scale = values.cwiseAbs().maxCoeff();
    const double asym = (values - values.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale) {
        throw InvalidArgument("coupling matrix is not symmetric (reciprocity violated)");
    }
    state_->values = detail::symmetrized(values);
    state_->rep = rep;
    state_->policy = policy;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(state_->values.real());
    if (eig.info() != Eigen::Success) {
        throw NumericalError("eigendecomposition of the coupling real part failed");
    }
    state_->lambda_min = eig.eigenvalues().minCoeff();
    state_->lambda_max = eig.eigenvalues().maxCoeff();
    state_->passive = state_->lambda_min >= -1e-9 * std::abs(state_->lambda_max);
    if (!state_->passive && policy == PassivityPolicy::Enforce) {
        throw PassivityError("real part of the " + std::string(to_string(rep)) +
                                 " matrix is not positive semi-definite",
                             state_->lambda_min, state_->lambda_max);
    }
    try {
        state_->factors = factors_from_eigen(eig.eigenvalues(), eig.eigenvectors());
    } catch (const NotPositiveDefinite& e) {
        state_->factor_error = e.what();
    }
}

CouplingMatrix CouplingMatrix::scaled_identity(Index n, Complex diagonal, Representation rep) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    m.diagonal().setConstant(diagonal);
    return CouplingMatrix(m, rep);
}

const Eigen::MatrixXcd& CouplingMatrix::values() const noexcept { return state_->values; }
Representation CouplingMatrix::representation() const noexcept { return state_->rep; }
Index CouplingMatrix::size() const noexcept { return state_->values.rows(); }
double CouplingMatrix::real_lambda_min() const noexcept { return state_->lambda_min; }
double CouplingMatrix::real_lambda_max() const noexcept { return state_->lambda_max; }
bool CouplingMatrix::passive() const noexcept { return state_->passive; }

const SpdFactors& CouplingMatrix::real_factors() const {
    if (!state_->factors) {
        throw NotPositiveDefinite("real part of the coupling matrix is not invertible: " + state_->factor_error);
    }
    return *state_->factors;
}

const CouplingMatrix& CouplingMatrix::dual() const {
    std::call_once(state_->dual_once, [this] {
        const Eigen::MatrixXcd inv = detail::symmetrized(detail::checked_inverse(state_->values, "Z_II"));
        const Representation other = state_->rep == Representation::Impedance ? Representation::Admittance
                                                                               : Representation::Impedance;
        state_->dual = std::make_unique<CouplingMatrix>(inv, other, state_->policy);
    });
    return *state_->dual;
}

// ---------------------------------------------------------------------------------------------
// Matrix assembly

CouplingMatrix build_coupling_matrix(const DipoleArrayGeometry& geom, Complex self_impedance,
                                     const CouplingBuildOptions& opts) {
    geom.validate();
    if (!(self_impedance.real() > 0.0)) {
        throw InvalidArgument("self-impedance must have a positive real part");
    }
    const std::size_t n = geom.size();

    // Entries depend only on |column offset| and |row offset|.
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> slot_of;
    std::vector<std::pair<std::size_t, std::size_t>> offsets;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            const std::size_t cx = p % geom.n_x > q % geom.n_x ? p % geom.n_x - q % geom.n_x : q % geom.n_x - p % geom.n_x;
            const std::size_t cy = q / geom.n_x - p / geom.n_x;
            if (slot_of.emplace(std::pair{cx, cy}, offsets.size()).second) {
                offsets.emplace_back(cx, cy);
            }
        }
    }

    std::vector<Complex> values(offsets.size());
    detail::parallel_for(offsets.size(), opts.threads, [&](std::size_t k) {
        values[k] = mutual_impedance_offset(geom, static_cast<double>(offsets[k].first) * geom.spacing,
                                            static_cast<double>(offsets[k].second) * geom.spacing, opts.quadrature);
    });

    Eigen::MatrixXcd z(static_cast<Index>(n), static_cast<Index>(n));
    for (std::size_t p = 0; p < n; ++p) {
        z(static_cast<Index>(p), static_cast<Index>(p)) = self_impedance;
        for (std::size_t q = p + 1; q < n; ++q) {
            const std::size_t cx = p % geom.n_x > q % geom.n_x ? p % geom.n_x - q % geom.n_x : q % geom.n_x - p % geom.n_x;
            const std::size_t cy = q / geom.n_x - p / geom.n_x;
            const Complex v = values[slot_of.at({cx, cy})];
            z(static_cast<Index>(p), static_cast<Index>(q)) = v;
            z(static_cast<Index>(q), static_cast<Index>(p)) = v;
        }
    }
    return CouplingMatrix(z, Representation::Impedance, opts.passivity);
}

}  // namespace coupled_ris
