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

#include <cstddef>
#include <memory>
#include <utility>

#include <Eigen/Dense>

#include "coupled_ris/types.hpp"

namespace coupled_ris {

inline constexpr double kSpeedOfLight = 299792458.0;   // m/s
inline constexpr double kFreeSpaceImpedance = 376.730;  // ohm

/// Uniform planar array of thin-wire dipoles parallel to the y axis.
/// Element n sits at x = (n mod n_x) * spacing, y = floor(n / n_x) * spacing.
struct DipoleArrayGeometry {
    std::size_t n_x = 8;
    std::size_t n_y = 1;
    double spacing = 0.0;        // m
    double dipole_length = 0.0;  // m
    double wire_radius = 0.0;    // m
    double frequency = 28e9;     // Hz

    std::size_t size() const noexcept { return n_x * n_y; }
    double wavelength() const noexcept { return kSpeedOfLight / frequency; }
    double wavenumber() const noexcept;

    std::pair<double, double> position(std::size_t n) const;

    /// Throws GeometryError when a structural invariant is violated.
    void validate() const;

    /// Dipoles of length lambda/4 and radius lambda/500 on an n_x-column grid.
    /// Arrays smaller than n_x form a single row; otherwise n must be a multiple of n_x.
    static DipoleArrayGeometry uniform_planar(std::size_t n, double spacing_in_wavelengths,
                                              double frequency = 28e9, std::size_t n_x = 8);
};

struct QuadratureOptions {
    int nodes = 32;            // Gauss-Legendre nodes per panel
    double tolerance = 1e-6;   // relative change allowed when the node count is doubled
};

/// Mutual impedance (ohm) between dipoles p and q via the induced-EMF double integral.
std::complex<double> mutual_impedance(const DipoleArrayGeometry& geom, std::size_t p, std::size_t q,
                                      const QuadratureOptions& opts = {});

/// Same integral for two dipoles whose centers differ by (dx, dy) metres.
std::complex<double> mutual_impedance_offset(const DipoleArrayGeometry& geom, double dx, double dy,
                                             const QuadratureOptions& opts = {});

/// Eigen-based functions of a real symmetric positive definite matrix.
struct SpdFactors {
    Eigen::MatrixXd inv_sqrt;
    Eigen::MatrixXd sqrt;
    Eigen::MatrixXd inv;
    Eigen::VectorXd eigenvalues;  // ascending
    Eigen::MatrixXd eigenvectors;
    double lambda_min = 0.0;
    double lambda_max = 0.0;

    double condition_number() const noexcept { return lambda_max / lambda_min; }
};

/// Throws NotPositiveDefinite when lambda_min <= 1e-12 * lambda_max.
SpdFactors spd_inv_sqrt(const Eigen::MatrixXd& m);

enum class PassivityPolicy { Enforce, Report };

/// Complex symmetric N x N array matrix (Z_II in ohms or Y_II in siemens) with cached
/// factorizations of its real part. Copies share the cache, which is read-only after construction
/// apart from the lazily built dual representation.
class CouplingMatrix {
public:
    CouplingMatrix(const Eigen::MatrixXcd& values, Representation rep,
                   PassivityPolicy policy = PassivityPolicy::Enforce);

    static CouplingMatrix scaled_identity(Index n, Complex diagonal, Representation rep);

    const Eigen::MatrixXcd& values() const noexcept;
    Representation representation() const noexcept;
    Index size() const noexcept;

    Eigen::MatrixXd real_part() const { return values().real(); }
    Eigen::MatrixXd imag_part() const { return values().imag(); }

    /// Extreme eigenvalues of the real part, always available.
    double real_lambda_min() const noexcept;
    double real_lambda_max() const noexcept;

    /// False only for matrices built under PassivityPolicy::Report that violate passivity.
    bool passive() const noexcept;

    /// Throws NotPositiveDefinite when the real part is not invertible.
    const SpdFactors& real_factors() const;

    /// Inverse matrix in the other representation (Y_II for Z_II and vice versa), built once.
    const CouplingMatrix& dual() const;

private:
    struct State;
    std::shared_ptr<State> state_;
};

struct CouplingBuildOptions {
    QuadratureOptions quadrature{};
    PassivityPolicy passivity = PassivityPolicy::Enforce;
    unsigned threads = 1;
};

/// Z_II for the array: configured self-impedance on the diagonal, mutual impedances elsewhere.
/// Entries depend only on the grid offset between elements and are computed once per offset.
CouplingMatrix build_coupling_matrix(const DipoleArrayGeometry& geom, Complex self_impedance = {50.0, 0.0},
                                     const CouplingBuildOptions& opts = {});

}  // namespace coupled_ris
