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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "coupled_ris/coupling.hpp"
#include "coupled_ris/fading.hpp"
#include "coupled_ris/optimizers.hpp"
#include "coupled_ris/scaling_laws.hpp"
#include "coupled_ris/types.hpp"

namespace coupled_ris {

enum class ExperimentKind { SweepN, SweepSpacing, ScalingValidation, SingleInstance, SelfTest };

/// Which coupling model the optimizer sees and which one the result is evaluated under.
/// Aware: both use the true Z_II. Unaware: optimized for Z_II = Z0 I, evaluated under the true Z_II.
/// NoCoupling: the truth itself is Z_II = Zs I.
enum class Awareness { Aware, Unaware, NoCoupling };

std::string_view to_string(ExperimentKind kind);
std::string_view to_string(Awareness awareness);

/// Declarative description of a sweep. Geometry lengths are given in wavelengths.
struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::SweepN;
    std::string id = "experiment";
    std::vector<std::size_t> n_list{16, 32, 48, 64};
    std::vector<double> spacing_list{0.5, 0.25};
    std::size_t n_x = 8;
    double frequency_hz = 28e9;
    double dipole_length_wl = 0.25;
    double wire_radius_wl = 0.002;
    Complex self_impedance{50.0, 0.0};
    double z0 = 50.0;
    FadingSpec fading{4.0 * 50.0 * 50.0 * 1e-8, 4.0 * 50.0 * 50.0 * 1e-8, FadingModel::Rayleigh, 0.0};
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    std::vector<Architecture> architectures{Architecture::FullyConnected, Architecture::TreeTridiagonal};
    std::vector<Awareness> awareness{Awareness::Aware};
    DrisOptions dris;
    QuadratureOptions quadrature;
    unsigned threads = 1;
    bool record_runtime = false;  // runtime_ms is written as 0 unless enabled

    /// Throws ConfigError on an inconsistent spec.
    void validate() const;

    /// Array geometry for one (n, spacing) point.
    DipoleArrayGeometry geometry(std::size_t n, double spacing_wl) const;
};

/// Defaults for each experiment kind (figure-style parameter sets).
ExperimentSpec default_spec(ExperimentKind kind);

/// Applies the keys of a JSON config on top of default_spec(kind). Unknown keys, wrong types and a
/// "kind" entry that disagrees with `kind` raise ConfigError.
ExperimentSpec parse_spec(std::string_view json_text, ExperimentKind kind);
ExperimentSpec load_spec(const std::filesystem::path& path, ExperimentKind kind);

struct TrialRecord {
    std::string experiment;
    std::size_t n = 0;
    double spacing_wl = 0.0;
    Architecture architecture = Architecture::FullyConnected;
    Awareness awareness = Awareness::Aware;
    std::size_t trial = 0;
    double gain_linear = 0.0;
    double gain_db = 0.0;
    double bound_linear = 0.0;
    double residual = 0.0;
    double runtime_ms = 0.0;
    std::string error;  // empty on success
};

struct SummaryRow {
    std::string experiment;
    std::size_t n = 0;
    double spacing_wl = 0.0;
    Architecture architecture = Architecture::FullyConnected;
    Awareness awareness = Awareness::Aware;
    std::size_t trials = 0;
    std::size_t failures = 0;
    double mean_gain_linear = 0.0;
    double stderr_gain_linear = 0.0;
    double mean_gain_db = 0.0;    // 10 log10 of the mean linear gain
    double stderr_gain_db = 0.0;  // delta-method standard error of mean_gain_db
    double mean_bound_linear = 0.0;
    double law_mc = 0.0;
    double law_nomc = 0.0;
};

struct ExperimentResult {
    ExperimentSpec spec;
    std::vector<TrialRecord> records;
    std::vector<SummaryRow> summary;
    std::size_t failures = 0;

    double failure_fraction() const;
};

/// Runs every (n, spacing, architecture, awareness, trial) combination of a SweepN or SweepSpacing
/// spec. Channels depend only on (seed, n, trial), so every architecture, awareness and spacing sees
/// the same realizations. Per-record failures are stored in the error column.
ExperimentResult run_experiment(const ExperimentSpec& spec);

struct ScalingRow {
    std::size_t n = 0;
    double spacing_wl = 0.0;
    ScalingReport report;
};

/// Scaling-law validation for every (n, spacing) of the spec.
std::vector<ScalingRow> run_scaling(const ExperimentSpec& spec);

inline constexpr std::string_view kTrialsHeader =
    "experiment,n,spacing_wl,architecture,awareness,trial,gain_linear,gain_db,bound_linear,residual,runtime_ms,error";

/// Writes trials.csv, summary.csv and plot_spec.json into `dir` (created if missing).
void emit_outputs(const ExperimentResult& result, const std::filesystem::path& dir);

/// Writes scaling.csv into `dir`.
void emit_scaling(const std::vector<ScalingRow>& rows, const std::filesystem::path& dir);

/// Writes coupling.csv (row, col, re_ohm, im_ohm) and coupling.json for one geometry.
void emit_coupling(const CouplingMatrix& z_ii, const DipoleArrayGeometry& geom, const std::filesystem::path& dir);

/// Solves one instance described by a JSON document (channels, coupling or geometry, architecture,
/// aware flag) and returns the JSON result text.
std::string optimize_instance(std::string_view json_text, unsigned threads = 1);

/// Short end-to-end checks of every module; prints one PASS/FAIL line per check and returns true
/// when all pass.
bool run_selftest(std::ostream& out, std::uint64_t seed = 1, unsigned threads = 1);

}  // namespace coupled_ris
