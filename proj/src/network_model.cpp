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

#include "coupled_ris/network_model.hpp"

#include <cmath>
#include <string>

#include "linalg.hpp"

namespace coupled_ris {

namespace {

void require(bool ok, const char* what) {
    if (!ok) {
        throw RepresentationError(what);
    }
}

void check_sizes(const ChannelTriple& chan, Index load_size, const CouplingMatrix& coupling) {
    chan.validate();
    if (load_size != chan.size() || coupling.size() != chan.size()) {
        throw DimensionError("channel length " + std::to_string(chan.size()) + ", load size " +
                             std::to_string(load_size) + " and coupling size " + std::to_string(coupling.size()) +
                             " disagree");
    }
}

}  // namespace

Complex channel_z(const ChannelTriple& chan, const LoadMatrix& x, const CouplingMatrix& z_ii,
                  const ReferenceImpedance& ref) {
    require(chan.representation == Representation::Impedance, "channel_z needs impedance-form channels");
    require(x.kind() == LoadKind::Reactance, "channel_z needs a reactance load");
    require(z_ii.representation() == Representation::Impedance, "channel_z needs Z_II");
    check_sizes(chan, x.size(), z_ii);

    const Eigen::MatrixXcd a = kJ * x.values().cast<Complex>() + z_ii.values();
    const Eigen::VectorXcd w = detail::checked_solve(a, chan.tx_to_ris, "jX_I + Z_II");
    return (chan.direct - (chan.ris_to_rx * w)(0, 0)) / (2.0 * ref.z0());
}

Complex channel_y(const ChannelTriple& chan, const LoadMatrix& b, const CouplingMatrix& y_ii,
                  const ReferenceImpedance& ref) {
    require(chan.representation == Representation::Admittance, "channel_y needs admittance-form channels");
    require(b.kind() == LoadKind::Susceptance, "channel_y needs a susceptance load");
    require(y_ii.representation() == Representation::Admittance, "channel_y needs Y_II");
    check_sizes(chan, b.size(), y_ii);

    const Eigen::MatrixXcd a = kJ * b.values().cast<Complex>() + y_ii.values();
    const Eigen::VectorXcd w = detail::checked_solve(a, chan.tx_to_ris, "jB_I + Y_II");
    return (-chan.direct + (chan.ris_to_rx * w)(0, 0)) / (2.0 * ref.y0());
}

AdmittanceModel z_to_y(const ChannelTriple& chan, const CouplingMatrix& z_ii, const ReferenceImpedance& ref) {
    require(chan.representation == Representation::Impedance, "z_to_y needs impedance-form channels");
    require(z_ii.representation() == Representation::Impedance, "z_to_y needs Z_II");
    check_sizes(chan, z_ii.size(), z_ii);

    const CouplingMatrix& y_ii = z_ii.dual();
    const Eigen::MatrixXcd& z_inv = y_ii.values();
    const double z0 = ref.z0();

    ChannelTriple out;
    out.representation = Representation::Admittance;
    out.ris_to_rx = -(chan.ris_to_rx * z_inv) / z0;
    out.tx_to_ris = -(z_inv * chan.tx_to_ris) / z0;
    out.direct = (-chan.direct + (chan.ris_to_rx * z_inv * chan.tx_to_ris)(0, 0)) / (z0 * z0);
    return {out, y_ii};
}

ChannelTriple effective_channels(const ChannelTriple& chan, const CouplingMatrix& coupling,
                                 const ReferenceImpedance& ref) {
    if (chan.representation != coupling.representation()) {
        throw RepresentationError("channels are in " + std::string(to_string(chan.representation)) +
                                  " form but the coupling factor is in " +
                                  std::string(to_string(coupling.representation())) + " form");
    }
    check_sizes(chan, coupling.size(), coupling);
    const Eigen::MatrixXcd inv_sqrt = coupling.real_factors().inv_sqrt.cast<Complex>();
    const double root = std::sqrt(ref.reference(chan.representation));

    ChannelTriple out = chan;
    out.ris_to_rx = (chan.ris_to_rx * inv_sqrt) * root;
    out.tx_to_ris = root * (inv_sqrt * chan.tx_to_ris);
    return out;
}

ScatteringState to_scattering(const ChannelTriple& effective, const ReferenceImpedance& ref) {
    effective.validate();
    const double r = ref.reference(effective.representation);
    const Complex product = (effective.ris_to_rx * effective.tx_to_ris)(0, 0);

    ScatteringState s;
    if (effective.representation == Representation::Impedance) {
        s.s_ri = effective.ris_to_rx / (2.0 * r);
        s.s_it = effective.tx_to_ris / (2.0 * r);
        s.s_rt = (effective.direct - product / (2.0 * r)) / (2.0 * r);
    } else {
        s.s_ri = -effective.ris_to_rx / (2.0 * r);
        s.s_it = -effective.tx_to_ris / (2.0 * r);
        s.s_rt = -(effective.direct - product / (2.0 * r)) / (2.0 * r);
    }
    return s;
}

Eigen::MatrixXcd cayley(const LoadMatrix& load, const ReferenceImpedance& ref) {
    const Index n = load.size();
    if (n == 0) {
        throw DimensionError("cayley needs a non-empty load");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(load.values());
    if (eig.info() != Eigen::Success) {
        throw NumericalError("eigendecomposition of the load failed");
    }
    Eigen::VectorXcd phases(n);
    for (Index i = 0; i < n; ++i) {
        const double v = eig.eigenvalues()(i);
        if (load.kind() == LoadKind::Reactance) {
            phases(i) = Complex(-ref.z0(), v) / Complex(ref.z0(), v);
        } else {
            phases(i) = Complex(ref.y0(), -v) / Complex(ref.y0(), v);
        }
    }
    const Eigen::MatrixXcd q = eig.eigenvectors().cast<Complex>();
    return detail::symmetrized(q * phases.asDiagonal() * q.transpose());
}

LoadMatrix cayley_inv(const Eigen::MatrixXcd& theta, const ReferenceImpedance& ref, LoadKind kind) {
    const Index n = theta.rows();
    if (n == 0 || theta.cols() != n) {
        throw DimensionError("scattering matrix must be square and non-empty");
    }
    const double pole = kind == LoadKind::Reactance ? 1.0 : -1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(theta, false);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("eigenvalues of the scattering matrix could not be computed");
    }
    const double distance = (eig.eigenvalues().array() - pole).abs().minCoeff();
    if (distance < 1e-10) {
        throw CayleyPole("scattering matrix has an eigenvalue at " + std::to_string(pole) +
                         " (distance " + std::to_string(distance) + ")");
    }

    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd m;
    double r = 0.0;
    if (kind == LoadKind::Reactance) {
        r = ref.z0();
        m = -kJ * r * detail::checked_solve(eye - theta, eye + theta, "I - Theta");
    } else {
        r = ref.y0();
        m = -kJ * r * detail::checked_solve(eye + theta, eye - theta, "I + Theta");
    }
    const Eigen::MatrixXd real = m.real();
    const double residue = m.imag().cwiseAbs().maxCoeff();
    if (residue > 1e-9 * (real.cwiseAbs().maxCoeff() + r)) {
        throw NumericalError("inverse Cayley transform is not real; input is not unitary and symmetric");
    }
    return LoadMatrix(kind, detail::symmetrized(real));
}

LoadMatrix decouple_load(const LoadMatrix& physical, const CouplingMatrix& coupling, const ReferenceImpedance& ref) {
    if (physical.kind() != load_kind_for(coupling.representation())) {
        throw RepresentationError("load kind does not match the coupling representation");
    }
    if (physical.size() != coupling.size()) {
        throw DimensionError("load and coupling sizes differ");
    }
    const SpdFactors& f = coupling.real_factors();
    const double r = ref.reference(coupling.representation());
    return LoadMatrix(physical.kind(), r * f.inv_sqrt * (physical.values() + coupling.imag_part()) * f.inv_sqrt);
}

LoadMatrix recover_load(const LoadMatrix& barred, const CouplingMatrix& coupling, const ReferenceImpedance& ref) {
    if (barred.kind() != load_kind_for(coupling.representation())) {
        throw RepresentationError("load kind does not match the coupling representation");
    }
    if (barred.size() != coupling.size()) {
        throw DimensionError("load and coupling sizes differ");
    }
    const SpdFactors& f = coupling.real_factors();
    const double r = ref.reference(coupling.representation());
    return LoadMatrix(barred.kind(), (f.sqrt * barred.values() * f.sqrt) / r - coupling.imag_part());
}

}  // namespace coupled_ris
