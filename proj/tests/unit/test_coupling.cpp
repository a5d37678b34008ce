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
#include <random>

#include "coupled_ris/coupling.hpp"
#include "test_support.hpp"

using namespace coupled_ris;
using namespace test_support;

namespace {

DipoleArrayGeometry pair_geometry(double spacing_wl) {
    return DipoleArrayGeometry::uniform_planar(2, spacing_wl);
}

}  // namespace

TEST_CASE("uniform planar geometry") {
    const auto geom = DipoleArrayGeometry::uniform_planar(64, 0.25);
    CHECK(geom.n_x == 8);
    CHECK(geom.n_y == 8);
    CHECK(geom.size() == 64);
    const double lambda = geom.wavelength();
    CHECK(std::abs(geom.spacing - lambda / 4.0) < 1e-15);
    CHECK(std::abs(geom.dipole_length - lambda / 4.0) < 1e-15);
    CHECK(std::abs(geom.wire_radius - lambda / 500.0) < 1e-15);
    const auto [x, y] = geom.position(9);
    CHECK(std::abs(x - geom.spacing) < 1e-15);
    CHECK(std::abs(y - geom.spacing) < 1e-15);

    const auto small = DipoleArrayGeometry::uniform_planar(4, 0.5);
    CHECK(small.n_x == 4);
    CHECK(small.n_y == 1);

    CHECK_THROWS_AS(DipoleArrayGeometry::uniform_planar(12, 0.5), GeometryError);
    CHECK_THROWS_AS(DipoleArrayGeometry::uniform_planar(0, 0.5), GeometryError);
    CHECK_THROWS_AS(DipoleArrayGeometry::uniform_planar(8, 0.0), GeometryError);
    CHECK_THROWS_AS(geom.position(64), GeometryError);
}

TEST_CASE("mutual impedance is reciprocal") {
    const auto geom = DipoleArrayGeometry::uniform_planar(16, 0.3);
    for (std::size_t p = 0; p < 16; p += 3) {
        for (std::size_t q = p + 1; q < 16; q += 5) {
            const Complex a = mutual_impedance(geom, p, q);
            const Complex b = mutual_impedance(geom, q, p);
            CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
        }
    }
}

TEST_CASE("mutual impedance matches a tensor-product quadrature of the double integral") {
    const auto geom = pair_geometry(0.5);
    const double lambda = geom.wavelength();
    const double f = geom.frequency;
    const double len = geom.dipole_length;

    SUBCASE("side by side at half a wavelength") {
        const Complex lib = mutual_impedance(geom, 0, 1);
        const Complex ref = mutual_impedance_tensor(f, len, 0.5 * lambda, 0.0, 48);
        CHECK(std::abs(lib - ref) <= 1e-6 * std::abs(ref));
    }
    SUBCASE("collinear at half a wavelength") {
        const Complex lib = mutual_impedance_offset(geom, 0.0, 0.5 * lambda);
        const Complex ref = mutual_impedance_tensor(f, len, 0.0, 0.5 * lambda, 64);
        CHECK(std::abs(lib - ref) <= 1e-6 * std::abs(ref));
    }
    SUBCASE("diagonal offset") {
        const Complex lib = mutual_impedance_offset(geom, 0.4 * lambda, 0.7 * lambda);
        const Complex ref = mutual_impedance_tensor(f, len, 0.4 * lambda, 0.7 * lambda, 48);
        CHECK(std::abs(lib - ref) <= 1e-6 * std::abs(ref));
    }
    SUBCASE("close side by side pair") {
        const Complex lib = mutual_impedance_offset(geom, 0.125 * lambda, 0.0);
        const Complex ref = mutual_impedance_tensor(f, len, 0.125 * lambda, 0.0, 64);
        CHECK(std::abs(lib - ref) <= 1e-6 * std::abs(ref));
    }
}

TEST_CASE("half-wave dipoles reproduce the classic side-by-side mutual impedance") {
    // Tabulated induced-EMF value for two parallel half-wave dipoles half a wavelength apart.
    auto geom = pair_geometry(0.5);
    geom.dipole_length = geom.wavelength() / 2.0;
    const Complex z = mutual_impedance(geom, 0, 1);
    CHECK(z.real() == doctest::Approx(-12.5).epsilon(0.03));
    CHECK(z.imag() == doctest::Approx(-29.9).epsilon(0.03));
}

TEST_CASE("mutual impedance decays with distance") {
    const auto geom = pair_geometry(0.5);
    const double lambda = geom.wavelength();
    const double near = std::abs(mutual_impedance_offset(geom, 0.5 * lambda, 0.0));
    const double far = std::abs(mutual_impedance_offset(geom, 10.0 * lambda, 0.0));
    CHECK(far < near);
    CHECK(far / near < 0.1);

    double previous = 0.0;
    for (double d : {8.0, 4.0, 2.0, 1.0}) {
        const double mag = std::abs(mutual_impedance_offset(geom, d * lambda, 0.0));
        CHECK(mag > previous);
        previous = mag;
        // Far-field side-by-side coupling falls as 1/d.
        CHECK(mag * d == doctest::Approx(std::abs(mutual_impedance_offset(geom, 8.0 * lambda, 0.0)) * 8.0).epsilon(0.25));
    }
}

TEST_CASE("quadrature converges under node doubling") {
    const auto geom = pair_geometry(0.25);
    const double lambda = geom.wavelength();
    for (double dx : {0.125, 0.25, 0.5}) {
        QuadratureOptions coarse;
        coarse.nodes = 16;
        QuadratureOptions fine;
        fine.nodes = 64;
        const Complex a = mutual_impedance_offset(geom, dx * lambda, 0.0, coarse);
        const Complex b = mutual_impedance_offset(geom, dx * lambda, 0.0, fine);
        CHECK(std::abs(a - b) <= 1e-6 * std::abs(b));
    }
    // Collinear overlapping wires use the thin-wire regularization and still converge.
    const Complex overlap = mutual_impedance_offset(geom, 0.0, 0.125 * lambda);
    CHECK(std::isfinite(overlap.real()));
    CHECK(overlap.real() > 0.0);
}

TEST_CASE("quadrature failures are reported") {
    const auto geom = pair_geometry(0.5);
    QuadratureOptions bad;
    bad.nodes = 1;
    CHECK_THROWS_AS(mutual_impedance_offset(geom, geom.spacing, 0.0, bad), InvalidArgument);
    QuadratureOptions strict;
    strict.nodes = 2;
    strict.tolerance = 1e-15;
    CHECK_THROWS_AS(mutual_impedance_offset(geom, 0.0, 0.2 * geom.wavelength(), strict), QuadratureError);
    CHECK_THROWS_AS(mutual_impedance(geom, 1, 1), GeometryError);
    CHECK_THROWS_AS(mutual_impedance_offset(geom, 0.0, 0.0), GeometryError);
}

TEST_CASE("coupling matrix structure") {
    SUBCASE("single element") {
        const auto geom = DipoleArrayGeometry::uniform_planar(1, 0.5);
        const CouplingMatrix z = build_coupling_matrix(geom);
        REQUIRE(z.size() == 1);
        CHECK(z.values()(0, 0) == Complex(50.0, 0.0));
    }
    SUBCASE("diagonal, symmetry and shift invariance") {
        const auto geom = DipoleArrayGeometry::uniform_planar(16, 0.25);
        const CouplingMatrix z = build_coupling_matrix(geom);
        const Eigen::MatrixXcd& m = z.values();
        for (Index i = 0; i < 16; ++i) {
            CHECK(m(i, i) == Complex(50.0, 0.0));
        }
        CHECK(max_abs(Eigen::MatrixXcd(m - m.transpose())) <= 1e-12 * max_abs(m));
        // Pairs with equal offsets share one value.
        CHECK(std::abs(m(0, 1) - m(5, 6)) <= 1e-12 * std::abs(m(0, 1)));
        CHECK(std::abs(m(0, 8) - m(3, 11)) <= 1e-12 * std::abs(m(0, 8)));
        CHECK(std::abs(m(0, 1) - mutual_impedance(geom, 0, 1)) <= 1e-12 * std::abs(m(0, 1)));
    }
}

TEST_CASE("coupling matrices are passive in both representations") {
    for (double d : {0.5, 1.0 / 3.0, 0.25}) {
        const auto geom = DipoleArrayGeometry::uniform_planar(64, d);
        const CouplingMatrix z = build_coupling_matrix(geom);
        CHECK(z.passive());
        CHECK(z.real_lambda_min() > 0.0);
        const CouplingMatrix& y = z.dual();
        CHECK(y.representation() == Representation::Admittance);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(y.real_part());
        CHECK(eig.eigenvalues().minCoeff() > 0.0);
        const Eigen::MatrixXcd prod = z.values() * y.values();
        CHECK(max_abs(Eigen::MatrixXcd(prod - Eigen::MatrixXcd::Identity(64, 64))) < 1e-9);
    }
}

TEST_CASE("passivity policy") {
    Eigen::MatrixXcd m(2, 2);
    m << Complex(1.0, 0.0), Complex(2.0, 0.0), Complex(2.0, 0.0), Complex(1.0, 0.0);
    CHECK_THROWS_AS(CouplingMatrix(m, Representation::Impedance), PassivityError);
    try {
        CouplingMatrix bad(m, Representation::Impedance);
    } catch (const PassivityError& e) {
        CHECK(e.lambda_min() == doctest::Approx(-1.0));
        CHECK(e.lambda_max() == doctest::Approx(3.0));
    }
    const CouplingMatrix reported(m, Representation::Impedance, PassivityPolicy::Report);
    CHECK_FALSE(reported.passive());
    CHECK(reported.real_lambda_min() == doctest::Approx(-1.0));
    CHECK_THROWS_AS(reported.real_factors(), NotPositiveDefinite);

    Eigen::MatrixXcd asym = Eigen::MatrixXcd::Identity(2, 2);
    asym(0, 1) = 0.5;
    CHECK_THROWS_AS(CouplingMatrix(asym, Representation::Impedance), InvalidArgument);
}

TEST_CASE("spd_inv_sqrt") {
    SUBCASE("diagonal example") {
        Eigen::MatrixXd m = Eigen::Vector2d(4.0, 9.0).asDiagonal();
        const SpdFactors f = spd_inv_sqrt(m);
        CHECK(f.inv_sqrt(0, 0) == doctest::Approx(0.5));
        CHECK(f.inv_sqrt(1, 1) == doctest::Approx(1.0 / 3.0));
        CHECK(std::abs(f.inv_sqrt(0, 1)) < 1e-15);
        CHECK(f.condition_number() == doctest::Approx(2.25));
    }
    SUBCASE("scaled identity") {
        const SpdFactors f = spd_inv_sqrt(50.0 * Eigen::MatrixXd::Identity(3, 3));
        CHECK(max_abs(Eigen::MatrixXd(f.inv_sqrt - Eigen::MatrixXd::Identity(3, 3) / std::sqrt(50.0))) < 1e-15);
    }
    SUBCASE("random SPD identities") {
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 10; ++trial) {
            const Eigen::MatrixXd m = random_spd(12, rng, 50.0);
            const SpdFactors f = spd_inv_sqrt(m);
            const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(12, 12);
            CHECK(max_abs(Eigen::MatrixXd(f.inv_sqrt * m * f.inv_sqrt - id)) < 1e-12);
            CHECK(max_abs(Eigen::MatrixXd(f.sqrt * f.sqrt - m)) < 1e-10 * max_abs(m));
            CHECK(max_abs(Eigen::MatrixXd(f.inv * m - id)) < 1e-12);
        }
    }
    SUBCASE("rejects indefinite and singular input") {
        Eigen::Matrix2d m;
        m << 1.0, 2.0, 2.0, 1.0;
        CHECK_THROWS_AS(spd_inv_sqrt(m), NotPositiveDefinite);
        CHECK_THROWS_AS(spd_inv_sqrt(Eigen::MatrixXd::Zero(2, 2)), NotPositiveDefinite);
        CHECK_THROWS_AS(spd_inv_sqrt(Eigen::MatrixXd::Zero(2, 3)), DimensionError);
    }
}

TEST_CASE("parallel assembly is deterministic") {
    const auto geom = DipoleArrayGeometry::uniform_planar(32, 0.25);
    CouplingBuildOptions one;
    one.threads = 1;
    CouplingBuildOptions four;
    four.threads = 4;
    const CouplingMatrix a = build_coupling_matrix(geom, {50.0, 0.0}, one);
    const CouplingMatrix b = build_coupling_matrix(geom, {50.0, 0.0}, four);
    CHECK((a.values().array() == b.values().array()).all());
}
