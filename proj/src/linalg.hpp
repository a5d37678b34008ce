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

// Internal helpers shared by the library sources.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coupled_ris/errors.hpp"

namespace coupled_ris::detail {

inline constexpr double kSingularRcond = 1e-14;

/// Solves a x = b by LU with partial pivoting; throws SingularSystem when the reciprocal
/// condition estimate falls below 1e-14.
template <typename Rhs>
Eigen::MatrixXcd checked_solve(const Eigen::MatrixXcd& a, const Rhs& b, const std::string& name) {
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    const double rcond = lu.rcond();
    if (!(rcond > kSingularRcond)) {
        throw SingularSystem("matrix " + name + " is singular (rcond " + std::to_string(rcond) + ")");
    }
    return lu.solve(b);
}

inline Eigen::MatrixXcd checked_inverse(const Eigen::MatrixXcd& a, const std::string& name) {
    return checked_solve(a, Eigen::MatrixXcd::Identity(a.rows(), a.cols()), name);
}

template <typename Derived>
auto symmetrized(const Eigen::MatrixBase<Derived>& m) {
    return (0.5 * (m + m.transpose())).eval();
}

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

}  // namespace coupled_ris::detail
