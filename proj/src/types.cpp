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

#include "coupled_ris/types.hpp"

#include <cmath>

namespace coupled_ris {

std::string_view to_string(Representation rep) {
    return rep == Representation::Impedance ? "impedance" : "admittance";
}

std::string_view to_string(Architecture arch) {
    switch (arch) {
        case Architecture::FullyConnected: return "FC";
        case Architecture::TreeTridiagonal: return "TC";
        case Architecture::Diagonal: return "DRIS";
    }
    return "?";
}

ReferenceImpedance::ReferenceImpedance(double z0) : z0_(z0), y0_(1.0 / z0) {
    if (!(z0 > 0.0) || !std::isfinite(z0)) {
        throw InvalidArgument("reference impedance must be positive and finite");
    }
}

void ChannelTriple::validate() const {
    if (tx_to_ris.size() == 0) {
        throw DimensionError("channel vectors must have at least one entry");
    }
    if (ris_to_rx.size() != tx_to_ris.size()) {
        throw DimensionError("RIS-to-receiver and transmitter-to-RIS channels differ in length");
    }
    const bool finite = std::isfinite(direct.real()) && std::isfinite(direct.imag()) &&
                        ris_to_rx.allFinite() && tx_to_ris.allFinite();
    if (!finite) {
        throw InvalidArgument("channel entries must be finite");
    }
}

LoadMatrix::LoadMatrix(LoadKind kind, const Eigen::MatrixXd& values) : kind_(kind) {
    if (values.rows() != values.cols()) {
        throw DimensionError("load matrix must be square");
    }
    values_ = values.triangularView<Eigen::Upper>();
    values_.triangularView<Eigen::StrictlyLower>() = values_.transpose().triangularView<Eigen::StrictlyLower>();
}

LoadMatrix LoadMatrix::zeros(LoadKind kind, Index n) {
    return LoadMatrix(kind, Eigen::MatrixXd::Zero(n, n));
}

bool LoadMatrix::follows(Architecture arch) const {
    const Index n = size();
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            const Index gap = i > j ? i - j : j - i;
            const bool free = arch == Architecture::FullyConnected ||
                              (arch == Architecture::TreeTridiagonal && gap <= 1) || gap == 0;
            if (!free && values_(i, j) != 0.0) {
                return false;
            }
        }
    }
    return true;
}

Complex ScatteringState::channel() const { return channel(theta); }

Complex ScatteringState::channel(const Eigen::MatrixXcd& scattering) const {
    if (scattering.rows() != s_it.size() || scattering.cols() != s_it.size()) {
        throw DimensionError("scattering matrix does not match the channel length");
    }
    return s_rt + (s_ri * scattering * s_it)(0, 0);
}

}  // namespace coupled_ris
