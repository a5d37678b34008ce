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

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "coupled_ris/fading.hpp"
#include "coupled_ris/harness.hpp"
#include "coupled_ris/network_model.hpp"
#include "coupled_ris/optimizers.hpp"
#include "coupled_ris/scaling_laws.hpp"

namespace py = pybind11;
using namespace coupled_ris;

namespace {

ChannelTriple make_channels(Complex direct, const Eigen::VectorXcd& ris_to_rx, const Eigen::VectorXcd& tx_to_ris,
                            Representation rep) {
    ChannelTriple chan;
    chan.direct = direct;
    chan.ris_to_rx = ris_to_rx.transpose();
    chan.tx_to_ris = tx_to_ris;
    chan.representation = rep;
    chan.validate();
    return chan;
}

LoadKind parse_kind(const std::string& kind) {
    if (kind == "reactance") {
        return LoadKind::Reactance;
    }
    if (kind == "susceptance") {
        return LoadKind::Susceptance;
    }
    throw InvalidArgument("kind must be 'reactance' or 'susceptance'");
}

Architecture parse_architecture(const std::string& arch) {
    if (arch == "FC") {
        return Architecture::FullyConnected;
    }
    if (arch == "TC") {
        return Architecture::TreeTridiagonal;
    }
    if (arch == "DRIS") {
        return Architecture::Diagonal;
    }
    throw InvalidArgument("architecture must be 'FC', 'TC' or 'DRIS'");
}

FadingSpec fading(double rho_ri, double rho_it, double k_factor) {
    FadingSpec f{rho_ri, rho_it, k_factor > 0.0 ? FadingModel::Rician : FadingModel::Rayleigh, k_factor};
    f.validate();
    return f;
}

py::dict config_dict(const RisConfiguration& c, double gain) {
    py::dict d;
    d["architecture"] = std::string(to_string(c.architecture));
    d["kind"] = c.load.kind() == LoadKind::Reactance ? "reactance" : "susceptance";
    d["load"] = c.load.values();
    d["achieved_gain"] = gain;
    d["bound_gain"] = c.bound_gain;
    d["residual"] = c.residual;
    d["sweeps"] = c.sweeps;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "RIS channel optimization with electromagnetic mutual coupling";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<SingularSystem>(m, "SingularSystem", base.ptr());
    py::register_exception<NotPositiveDefinite>(m, "NotPositiveDefinite", base.ptr());
    py::register_exception<CayleyPole>(m, "CayleyPole", base.ptr());
    py::register_exception<AlignmentInfeasible>(m, "AlignmentInfeasible", base.ptr());
    py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
    py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());

    m.def(
        "build_coupling_matrix",
        [](std::size_t n, double spacing_wl, double frequency_hz, std::size_t n_x, Complex self_impedance,
           unsigned threads) {
            CouplingBuildOptions opts;
            opts.threads = threads;
            return build_coupling_matrix(DipoleArrayGeometry::uniform_planar(n, spacing_wl, frequency_hz, n_x),
                                         self_impedance, opts)
                .values();
        },
        py::arg("n"), py::arg("spacing_wl"), py::arg("frequency_hz") = 28e9, py::arg("n_x") = 8,
        py::arg("self_impedance") = Complex(50.0, 0.0), py::arg("threads") = 1,
        "Z_II (ohm) of a planar array of lambda/4 dipoles.");

    m.def(
        "channel_z",
        [](Complex direct, const Eigen::VectorXcd& ris_to_rx, const Eigen::VectorXcd& tx_to_ris,
           const Eigen::MatrixXd& x, const Eigen::MatrixXcd& z_ii, double z0) {
            return channel_z(make_channels(direct, ris_to_rx, tx_to_ris, Representation::Impedance),
                             LoadMatrix(LoadKind::Reactance, x), CouplingMatrix(z_ii, Representation::Impedance),
                             ReferenceImpedance(z0));
        },
        py::arg("direct"), py::arg("ris_to_rx"), py::arg("tx_to_ris"), py::arg("x"), py::arg("z_ii"),
        py::arg("z0") = 50.0);

    m.def(
        "channel_y",
        [](Complex direct, const Eigen::VectorXcd& ris_to_rx, const Eigen::VectorXcd& tx_to_ris,
           const Eigen::MatrixXd& b, const Eigen::MatrixXcd& y_ii, double z0) {
            return channel_y(make_channels(direct, ris_to_rx, tx_to_ris, Representation::Admittance),
                             LoadMatrix(LoadKind::Susceptance, b), CouplingMatrix(y_ii, Representation::Admittance),
                             ReferenceImpedance(z0));
        },
        py::arg("direct"), py::arg("ris_to_rx"), py::arg("tx_to_ris"), py::arg("b"), py::arg("y_ii"),
        py::arg("z0") = 50.0);

    m.def(
        "z_to_y",
        [](Complex direct, const Eigen::VectorXcd& ris_to_rx, const Eigen::VectorXcd& tx_to_ris,
           const Eigen::MatrixXcd& z_ii, double z0) {
            const AdmittanceModel adm =
                z_to_y(make_channels(direct, ris_to_rx, tx_to_ris, Representation::Impedance),
                       CouplingMatrix(z_ii, Representation::Impedance), ReferenceImpedance(z0));
            return py::make_tuple(adm.channels.direct, Eigen::VectorXcd(adm.channels.ris_to_rx.transpose()),
                                  adm.channels.tx_to_ris, adm.y_ii.values());
        },
        py::arg("direct"), py::arg("ris_to_rx"), py::arg("tx_to_ris"), py::arg("z_ii"), py::arg("z0") = 50.0,
        "Returns (y_RT, y_RI, y_IT, Y_II).");

    m.def(
        "cayley",
        [](const Eigen::MatrixXd& load, const std::string& kind, double z0) {
            return cayley(LoadMatrix(parse_kind(kind), load), ReferenceImpedance(z0));
        },
        py::arg("load"), py::arg("kind") = "reactance", py::arg("z0") = 50.0);

    m.def(
        "cayley_inv",
        [](const Eigen::MatrixXcd& theta, const std::string& kind, double z0) {
            return cayley_inv(theta, ReferenceImpedance(z0), parse_kind(kind)).values();
        },
        py::arg("theta"), py::arg("kind") = "reactance", py::arg("z0") = 50.0);

    m.def(
        "upper_bound",
        [](Complex direct, const Eigen::VectorXcd& ris_to_rx, const Eigen::VectorXcd& tx_to_ris,
           const Eigen::MatrixXcd& z_ii, double z0) {
            return upper_bound_fc(make_channels(direct, ris_to_rx, tx_to_ris, Representation::Impedance),
                                  CouplingMatrix(z_ii, Representation::Impedance), ReferenceImpedance(z0));
        },
        py::arg("direct"), py::arg("ris_to_rx"), py::arg("tx_to_ris"), py::arg("z_ii"), py::arg("z0") = 50.0);

    m.def(
        "optimize",
        [](const std::string& architecture, Complex direct, const Eigen::VectorXcd& ris_to_rx,
           const Eigen::VectorXcd& tx_to_ris, const Eigen::MatrixXcd& z_ii, double z0, bool aware) {
            const ChannelTriple chan = make_channels(direct, ris_to_rx, tx_to_ris, Representation::Impedance);
            const CouplingMatrix coupling(z_ii, Representation::Impedance);
            const ReferenceImpedance ref(z0);
            const Architecture arch = parse_architecture(architecture);
            if (!aware) {
                RisConfiguration c = optimize_unaware(arch, chan, ref);
                c.bound_gain = upper_bound_fc(chan, coupling, ref);
                return config_dict(c, evaluate_under(c, chan, coupling, ref));
            }
            RisConfiguration c;
            switch (arch) {
                case Architecture::FullyConnected:
                    c = optimize_fully_connected(chan, coupling, ref);
                    break;
                case Architecture::TreeTridiagonal:
                    c = optimize_tree_connected(chan, coupling, ref);
                    break;
                case Architecture::Diagonal:
                    c = optimize_dris_aware(chan, coupling, ref);
                    break;
            }
            return config_dict(c, c.achieved_gain);
        },
        py::arg("architecture"), py::arg("direct"), py::arg("ris_to_rx"), py::arg("tx_to_ris"), py::arg("z_ii"),
        py::arg("z0") = 50.0, py::arg("aware") = true,
        "Optimizes an FC, TC or DRIS load; unaware configurations are evaluated under z_ii.");

    m.def(
        "sample_channels",
        [](Index n, std::uint64_t seed, std::uint64_t stream, double rho_ri, double rho_it, double k_factor) {
            Rng rng(derive_seed(seed, stream));
            const ChannelTriple chan = sample_channels(fading(rho_ri, rho_it, k_factor), n, rng);
            return py::make_tuple(chan.direct, Eigen::VectorXcd(chan.ris_to_rx.transpose()), chan.tx_to_ris);
        },
        py::arg("n"), py::arg("seed"), py::arg("stream") = 0, py::arg("rho_ri") = 1.0, py::arg("rho_it") = 1.0,
        py::arg("k_factor") = 0.0, "Returns (z_RT, z_RI, z_IT).");

    m.def(
        "scaling_mc",
        [](const Eigen::MatrixXcd& z_ii, double rho_ri, double rho_it, double z0) {
            return scaling_mc(fading(rho_ri, rho_it, 0.0), CouplingMatrix(z_ii, Representation::Impedance),
                              ReferenceImpedance(z0));
        },
        py::arg("z_ii"), py::arg("rho_ri") = 1.0, py::arg("rho_it") = 1.0, py::arg("z0") = 50.0);

    m.def(
        "scaling_nomc",
        [](double z_self, Index n, double rho_ri, double rho_it, double z0) {
            return scaling_nomc(fading(rho_ri, rho_it, 0.0), z_self, n, ReferenceImpedance(z0));
        },
        py::arg("z_self"), py::arg("n"), py::arg("rho_ri") = 1.0, py::arg("rho_it") = 1.0, py::arg("z0") = 50.0);

    m.def(
        "coupling_benefit_margin",
        [](const Eigen::MatrixXcd& z_ii, double rho_ri, double rho_it, double z0) {
            return coupling_benefit_margin(fading(rho_ri, rho_it, 0.0),
                                           CouplingMatrix(z_ii, Representation::Impedance), ReferenceImpedance(z0));
        },
        py::arg("z_ii"), py::arg("rho_ri") = 1.0, py::arg("rho_it") = 1.0, py::arg("z0") = 50.0);

    m.def(
        "lemma_checks",
        [](const Eigen::MatrixXd& matrix) {
            const LemmaMargins margins = lemma_checks(matrix);
            return py::make_tuple(margins.trace_inverse, margins.trace_inverse_squared);
        },
        py::arg("m"));

    m.def(
        "estimate_terms",
        [](const Eigen::MatrixXcd& z_ii, std::size_t trials, std::uint64_t seed, double rho_ri, double rho_it,
           double z0, unsigned threads) {
            const FadingSpec spec = fading(rho_ri, rho_it, 0.0);
            const CouplingMatrix coupling(z_ii, Representation::Impedance);
            ScalingReport r;
            {
                py::gil_scoped_release release;
                r = estimate_terms(spec, coupling, ReferenceImpedance(z0), trials, seed, threads);
            }
            py::dict terms;
            for (const auto& t : r.per_term) {
                py::dict entry;
                entry["closed_form"] = t.closed_form;
                entry["estimate"] = t.estimate;
                entry["std_error"] = t.std_error;
                entry["asymptotic"] = t.asymptotic;
                terms[py::str(t.name)] = entry;
            }
            py::dict d;
            d["closed_form"] = r.closed_form;
            d["monte_carlo_mean"] = r.monte_carlo_mean;
            d["monte_carlo_stderr"] = r.monte_carlo_stderr;
            d["nomc_closed_form"] = r.nomc_closed_form;
            d["nomc_monte_carlo_mean"] = r.nomc_monte_carlo_mean;
            d["nomc_monte_carlo_stderr"] = r.nomc_monte_carlo_stderr;
            d["condition_number"] = r.condition_number;
            d["cross_norm_correlation"] = r.cross_norm_correlation;
            d["chi_mean_exact"] = r.chi_mean_exact;
            d["terms"] = terms;
            return d;
        },
        py::arg("z_ii"), py::arg("trials"), py::arg("seed") = 1, py::arg("rho_ri") = 1.0, py::arg("rho_it") = 1.0,
        py::arg("z0") = 50.0, py::arg("threads") = 1);

    m.def(
        "selftest",
        [](std::uint64_t seed) {
            std::ostringstream out;
            const bool ok = run_selftest(out, seed);
            return py::make_tuple(ok, out.str());
        },
        py::arg("seed") = 1, "Returns (all_passed, report_text).");
}
