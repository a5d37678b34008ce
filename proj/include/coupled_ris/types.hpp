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

#include <complex>
#include <cstddef>
#include <string_view>

#include <Eigen/Dense>

#include "coupled_ris/errors.hpp"

namespace coupled_ris {

using Complex = std::complex<double>;
using Index = Eigen::Index;

inline constexpr Complex kJ{0.0, 1.0};

/// Which multiport description a quantity belongs to.
enum class Representation { Impedance, Admittance };

std::string_view to_string(Representation rep);

/// RIS interconnection architecture; fixes the sparsity pattern of the load matrix.
enum class Architecture { FullyConnected, TreeTridiagonal, Diagonal };

std::string_view to_string(Architecture arch);

/// Reference (port) impedance Z0 in ohms and its admittance Y0 = 1/Z0 in siemens.
class ReferenceImpedance {
public:
    explicit ReferenceImpedance(double z0 = 50.0);

    double z0() const noexcept { return z0_; }
    double y0() const noexcept { return y0_; }

    /// Z0 for impedance-form quantities, Y0 for admittance-form quantities.
    double reference(Representation rep) const noexcept {
        return rep == Representation::Impedance ? z0_ : y0_;
    }

private:
    double z0_;
    double y0_;
};

/// The three transmission links of the cascaded channel in one representation:
/// direct (z_RT / y_RT), RIS to receiver (row vector) and transmitter to RIS (column vector).
struct ChannelTriple {
    Complex direct{0.0, 0.0};
    Eigen::RowVectorXcd ris_to_rx;
    Eigen::VectorXcd tx_to_ris;
    Representation representation = Representation::Impedance;

    Index size() const noexcept { return tx_to_ris.size(); }

    /// Throws DimensionError on mismatched or empty vectors and InvalidArgument on non-finite entries.
    void validate() const;
};

enum class LoadKind { Reactance, Susceptance };

/// Real symmetric load matrix: reactance X (ohms) of Z_I = jX, or susceptance B (siemens) of Y_I = jB.
/// Construction mirrors the upper triangle, so the stored matrix is exactly symmetric.
class LoadMatrix {
public:
    LoadMatrix() = default;
    LoadMatrix(LoadKind kind, const Eigen::MatrixXd& values);

    static LoadMatrix zeros(LoadKind kind, Index n);

    LoadKind kind() const noexcept { return kind_; }
    const Eigen::MatrixXd& values() const noexcept { return values_; }
    Index size() const noexcept { return values_.rows(); }
    double operator()(Index i, Index j) const { return values_(i, j); }

    /// True when every entry outside the architecture's pattern is exactly zero.
    bool follows(Architecture arch) const;

private:
    LoadKind kind_ = LoadKind::Reactance;
    Eigen::MatrixXd values_;
};

/// Load kind that pairs with a coupling representation (Z <-> X, Y <-> B).
inline LoadKind load_kind_for(Representation rep) {
    return rep == Representation::Impedance ? LoadKind::Reactance : LoadKind::Susceptance;
}

/// Channels mapped to the scattering domain, plus the scattering matrix when one is set.
struct ScatteringState {
    Complex s_rt{0.0, 0.0};
    Eigen::RowVectorXcd s_ri;
    Eigen::VectorXcd s_it;
    Eigen::MatrixXcd theta;  // empty until a configuration is attached

    /// s_rt + s_ri * theta * s_it.
    Complex channel() const;
    Complex channel(const Eigen::MatrixXcd& scattering) const;
};

}  // namespace coupled_ris
