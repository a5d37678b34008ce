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

#include "coupled_ris/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "coupled_ris/network_model.hpp"
#include "parallel.hpp"

namespace coupled_ris {

using json = nlohmann::json;

namespace {

// ---------------------------------------------------------------------------------------------
// Formatting

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += "\"\"";
        } else if (c == '\n' || c == '\r') {
            out += ' ';
        } else {
            out += c;
        }
    }
    return out + "\"";
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    return out;
}

void close_output(std::ofstream& out, const std::filesystem::path& path) {
    out.close();
    if (!out) {
        throw IoError("failed while writing " + path.string());
    }
}

void make_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
    }
}

double to_db(double linear) {
    return 10.0 * std::log10(linear);
}

// ---------------------------------------------------------------------------------------------
// Config parsing

Architecture parse_architecture(const std::string& s) {
    if (s == "FC") {
        return Architecture::FullyConnected;
    }
    if (s == "TC") {
        return Architecture::TreeTridiagonal;
    }
    if (s == "DRIS") {
        return Architecture::Diagonal;
    }
    throw ConfigError("unknown architecture '" + s + "' (expected FC, TC or DRIS)");
}

Awareness parse_awareness(const std::string& s) {
    if (s == "aware") {
        return Awareness::Aware;
    }
    if (s == "unaware") {
        return Awareness::Unaware;
    }
    if (s == "nocoupling") {
        return Awareness::NoCoupling;
    }
    throw ConfigError("unknown awareness '" + s + "' (expected aware, unaware or nocoupling)");
}

ExperimentKind parse_kind(const std::string& s) {
    for (auto k : {ExperimentKind::SweepN, ExperimentKind::SweepSpacing, ExperimentKind::ScalingValidation,
                   ExperimentKind::SingleInstance, ExperimentKind::SelfTest}) {
        if (s == to_string(k)) {
            return k;
        }
    }
    throw ConfigError("unknown experiment kind '" + s + "'");
}

template <typename T>
T get(const json& j, const std::string& key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config key '" + key + "': " + e.what());
    }
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) {
        throw ConfigError(where + " must be a JSON object");
    }
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key())) {
            throw ConfigError("unknown key '" + item.key() + "' in " + where);
        }
    }
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
}

Complex parse_complex(const json& j, const std::string& key) {
    const auto v = get<std::vector<double>>(j, key);
    if (v.size() != 2) {
        throw ConfigError("config key '" + key + "' must be [re, im]");
    }
    return {v[0], v[1]};
}

template <typename Vec>
Vec parse_complex_vector(const json& j, const std::string& key) {
    const json& node = j.contains(key) ? j.at(key) : throw ConfigError("missing key '" + key + "'");
    reject_unknown(node, {"re", "im"}, key);
    const auto re = get<std::vector<double>>(node, "re");
    const auto im = get<std::vector<double>>(node, "im");
    if (re.size() != im.size() || re.empty()) {
        throw ConfigError("'" + key + "' needs non-empty re and im arrays of equal length");
    }
    Vec out(static_cast<Index>(re.size()));
    for (std::size_t i = 0; i < re.size(); ++i) {
        out(static_cast<Index>(i)) = Complex(re[i], im[i]);
    }
    return out;
}

Eigen::MatrixXcd parse_complex_matrix(const json& node, Index n) {
    reject_unknown(node, {"re", "im"}, "coupling");
    const auto re = get<std::vector<std::vector<double>>>(node, "re");
    const auto im = get<std::vector<std::vector<double>>>(node, "im");
    if (static_cast<Index>(re.size()) != n || static_cast<Index>(im.size()) != n) {
        throw ConfigError("coupling matrix must be " + std::to_string(n) + " x " + std::to_string(n));
    }
    Eigen::MatrixXcd m(n, n);
    for (Index i = 0; i < n; ++i) {
        const auto& r = re[static_cast<std::size_t>(i)];
        const auto& c = im[static_cast<std::size_t>(i)];
        if (static_cast<Index>(r.size()) != n || static_cast<Index>(c.size()) != n) {
            throw ConfigError("coupling matrix row " + std::to_string(i) + " has the wrong length");
        }
        for (Index k = 0; k < n; ++k) {
            m(i, k) = Complex(r[static_cast<std::size_t>(k)], c[static_cast<std::size_t>(k)]);
        }
    }
    return m;
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index k = 0; k < m.cols(); ++k) {
            row.push_back(m(i, k));
        }
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------------------------
// Trial execution

struct TrialOutcome {
    double gain = 0.0;
    double residual = 0.0;
};

TrialOutcome run_one(Architecture arch, Awareness awareness, const ChannelTriple& chan, const CouplingMatrix& truth,
                     const ReferenceImpedance& ref, const DrisOptions& dris) {
    if (awareness == Awareness::Unaware) {
        const RisConfiguration config = optimize_unaware(arch, chan, ref);
        return {evaluate_under(config, chan, truth, ref), config.residual};
    }
    RisConfiguration config;
    switch (arch) {
        case Architecture::FullyConnected:
            config = optimize_fully_connected(chan, truth, ref);
            break;
        case Architecture::TreeTridiagonal:
            config = optimize_tree_connected(chan, truth, ref);
            break;
        case Architecture::Diagonal:
            config = optimize_dris_aware(chan, truth, ref, dris);
            break;
    }
    return {config.achieved_gain, config.residual};
}

Rng trial_rng(std::uint64_t seed, std::size_t n, std::size_t trial) {
    return Rng(derive_seed(derive_seed(seed, n), trial));
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// Spec

std::string_view to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::SweepN:
            return "sweep-n";
        case ExperimentKind::SweepSpacing:
            return "sweep-d";
        case ExperimentKind::ScalingValidation:
            return "scaling";
        case ExperimentKind::SingleInstance:
            return "optimize";
        case ExperimentKind::SelfTest:
            return "selftest";
    }
    return "unknown";
}

std::string_view to_string(Awareness awareness) {
    switch (awareness) {
        case Awareness::Aware:
            return "aware";
        case Awareness::Unaware:
            return "unaware";
        case Awareness::NoCoupling:
            return "nocoupling";
    }
    return "unknown";
}

void ExperimentSpec::validate() const {
    if (n_list.empty() || spacing_list.empty()) {
        throw ConfigError("n_list and spacing_list must be non-empty");
    }
    if (n_x == 0) {
        throw ConfigError("n_x must be positive");
    }
    for (std::size_t n : n_list) {
        if (n == 0 || (n >= n_x && n % n_x != 0)) {
            throw ConfigError("N = " + std::to_string(n) + " is not a multiple of n_x = " + std::to_string(n_x));
        }
    }
    for (double d : spacing_list) {
        if (!(d > 0.0) || !std::isfinite(d)) {
            throw ConfigError("spacings must be positive");
        }
    }
    if (!(frequency_hz > 0.0) || !(dipole_length_wl > 0.0 && dipole_length_wl < 1.0) ||
        !(wire_radius_wl > 0.0 && wire_radius_wl < dipole_length_wl)) {
        throw ConfigError("need frequency > 0, 0 < dipole_length_wl < 1 and 0 < wire_radius_wl < dipole_length_wl");
    }
    if (!(z0 > 0.0) || !(self_impedance.real() > 0.0)) {
        throw ConfigError("z0 and the real part of the self-impedance must be positive");
    }
    if (trials == 0) {
        throw ConfigError("trials must be at least 1");
    }
    if (kind == ExperimentKind::ScalingValidation && trials < 100) {
        throw ConfigError("scaling validation needs at least 100 trials");
    }
    if (architectures.empty() || awareness.empty()) {
        throw ConfigError("architectures and awareness must be non-empty");
    }
    if (dris.grid < 1 || dris.max_sweeps < 0 || !(dris.tolerance >= 0.0)) {
        throw ConfigError("dris needs grid >= 1, max_sweeps >= 0 and tolerance >= 0");
    }
    if (quadrature.nodes < 2 || !(quadrature.tolerance > 0.0)) {
        throw ConfigError("quadrature needs nodes >= 2 and tolerance > 0");
    }
    try {
        fading.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
}

DipoleArrayGeometry ExperimentSpec::geometry(std::size_t n, double spacing_wl) const {
    DipoleArrayGeometry geom = DipoleArrayGeometry::uniform_planar(n, spacing_wl, frequency_hz, n_x);
    geom.dipole_length = dipole_length_wl * geom.wavelength();
    geom.wire_radius = wire_radius_wl * geom.wavelength();
    geom.validate();
    return geom;
}

ExperimentSpec default_spec(ExperimentKind kind) {
    ExperimentSpec spec;
    spec.kind = kind;
    spec.id = std::string(to_string(kind));
    switch (kind) {
        case ExperimentKind::SweepN:
            spec.awareness = {Awareness::Aware, Awareness::NoCoupling};
            break;
        case ExperimentKind::SweepSpacing:
            spec.n_list = {64};
            spec.spacing_list = {0.5, 0.4, 0.33, 0.25, 0.2, 0.167, 0.125};
            spec.architectures = {Architecture::FullyConnected, Architecture::TreeTridiagonal, Architecture::Diagonal};
            spec.awareness = {Awareness::Aware, Awareness::Unaware};
            break;
        case ExperimentKind::ScalingValidation:
            spec.n_list = {16, 32, 64};
            spec.spacing_list = {0.5, 0.25};
            spec.trials = 2000;
            break;
        case ExperimentKind::SingleInstance:
        case ExperimentKind::SelfTest:
            spec.n_list = {16};
            spec.spacing_list = {0.25};
            spec.trials = 20;
            break;
    }
    return spec;
}

ExperimentSpec parse_spec(std::string_view json_text, ExperimentKind kind) {
    const json j = parse_json(json_text);
    reject_unknown(j,
                   {"kind", "id", "n_list", "spacing_list", "n_x", "frequency_hz", "dipole_length_wl",
                    "wire_radius_wl", "self_impedance", "z0", "rho_ri", "rho_it", "fading", "k_factor", "trials",
                    "seed", "architectures", "awareness", "dris", "quadrature", "threads", "record_runtime"},
                   "config");
    if (j.contains("kind") && parse_kind(get<std::string>(j, "kind")) != kind) {
        throw ConfigError("config kind '" + get<std::string>(j, "kind") + "' does not match the subcommand '" +
                          std::string(to_string(kind)) + "'");
    }
    ExperimentSpec spec = default_spec(kind);
    if (j.contains("id")) {
        spec.id = get<std::string>(j, "id");
    }
    if (j.contains("n_list")) {
        spec.n_list = get<std::vector<std::size_t>>(j, "n_list");
    }
    if (j.contains("spacing_list")) {
        spec.spacing_list = get<std::vector<double>>(j, "spacing_list");
    }
    if (j.contains("n_x")) {
        spec.n_x = get<std::size_t>(j, "n_x");
    }
    if (j.contains("frequency_hz")) {
        spec.frequency_hz = get<double>(j, "frequency_hz");
    }
    if (j.contains("dipole_length_wl")) {
        spec.dipole_length_wl = get<double>(j, "dipole_length_wl");
    }
    if (j.contains("wire_radius_wl")) {
        spec.wire_radius_wl = get<double>(j, "wire_radius_wl");
    }
    if (j.contains("self_impedance")) {
        spec.self_impedance = parse_complex(j, "self_impedance");
    }
    if (j.contains("z0")) {
        spec.z0 = get<double>(j, "z0");
    }
    if (j.contains("rho_ri")) {
        spec.fading.rho_ri = get<double>(j, "rho_ri");
    }
    if (j.contains("rho_it")) {
        spec.fading.rho_it = get<double>(j, "rho_it");
    }
    if (j.contains("fading")) {
        const auto model = get<std::string>(j, "fading");
        if (model == "rayleigh") {
            spec.fading.model = FadingModel::Rayleigh;
        } else if (model == "rician") {
            spec.fading.model = FadingModel::Rician;
        } else {
            throw ConfigError("fading must be 'rayleigh' or 'rician'");
        }
    }
    if (j.contains("k_factor")) {
        spec.fading.k_factor = get<double>(j, "k_factor");
    }
    if (j.contains("trials")) {
        spec.trials = get<std::size_t>(j, "trials");
    }
    if (j.contains("seed")) {
        spec.seed = get<std::uint64_t>(j, "seed");
    }
    if (j.contains("architectures")) {
        spec.architectures.clear();
        for (const auto& s : get<std::vector<std::string>>(j, "architectures")) {
            spec.architectures.push_back(parse_architecture(s));
        }
    }
    if (j.contains("awareness")) {
        spec.awareness.clear();
        for (const auto& s : get<std::vector<std::string>>(j, "awareness")) {
            spec.awareness.push_back(parse_awareness(s));
        }
    }
    if (j.contains("dris")) {
        const json& d = j.at("dris");
        reject_unknown(d, {"grid", "max_sweeps", "tolerance"}, "dris");
        if (d.contains("grid")) {
            spec.dris.grid = get<int>(d, "grid");
        }
        if (d.contains("max_sweeps")) {
            spec.dris.max_sweeps = get<int>(d, "max_sweeps");
        }
        if (d.contains("tolerance")) {
            spec.dris.tolerance = get<double>(d, "tolerance");
        }
    }
    if (j.contains("quadrature")) {
        const json& q = j.at("quadrature");
        reject_unknown(q, {"nodes", "tolerance"}, "quadrature");
        if (q.contains("nodes")) {
            spec.quadrature.nodes = get<int>(q, "nodes");
        }
        if (q.contains("tolerance")) {
            spec.quadrature.tolerance = get<double>(q, "tolerance");
        }
    }
    if (j.contains("threads")) {
        spec.threads = get<unsigned>(j, "threads");
    }
    if (j.contains("record_runtime")) {
        spec.record_runtime = get<bool>(j, "record_runtime");
    }
    spec.validate();
    return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& path, ExperimentKind kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_spec(text.str(), kind);
}

// ---------------------------------------------------------------------------------------------
// Experiments

double ExperimentResult::failure_fraction() const {
    return records.empty() ? 0.0 : static_cast<double>(failures) / static_cast<double>(records.size());
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    if (spec.kind != ExperimentKind::SweepN && spec.kind != ExperimentKind::SweepSpacing) {
        throw ConfigError("run_experiment handles sweep-n and sweep-d specs only");
    }
    const ReferenceImpedance ref(spec.z0);
    ExperimentResult result;
    result.spec = spec;

    struct Combo {
        Architecture arch;
        Awareness awareness;
    };
    std::vector<Combo> combos;
    for (auto arch : spec.architectures) {
        for (auto aw : spec.awareness) {
            combos.push_back({arch, aw});
        }
    }

    for (std::size_t n : spec.n_list) {
        const auto nn = static_cast<Index>(n);
        const CouplingMatrix ideal = CouplingMatrix::scaled_identity(nn, spec.self_impedance, Representation::Impedance);
        for (double spacing : spec.spacing_list) {
            CouplingBuildOptions build;
            build.quadrature = spec.quadrature;
            build.threads = spec.threads;
            const CouplingMatrix coupled = build_coupling_matrix(spec.geometry(n, spacing), spec.self_impedance, build);

            std::vector<TrialRecord> block(spec.trials * combos.size());
            detail::parallel_for(spec.trials, spec.threads, [&](std::size_t trial) {
                Rng rng = trial_rng(spec.seed, n, trial);
                const ChannelTriple chan = sample_channels(spec.fading, nn, rng);
                for (std::size_t c = 0; c < combos.size(); ++c) {
                    TrialRecord& rec = block[trial * combos.size() + c];
                    rec.experiment = spec.id;
                    rec.n = n;
                    rec.spacing_wl = spacing;
                    rec.architecture = combos[c].arch;
                    rec.awareness = combos[c].awareness;
                    rec.trial = trial;
                    const CouplingMatrix& truth = combos[c].awareness == Awareness::NoCoupling ? ideal : coupled;
                    const auto start = std::chrono::steady_clock::now();
                    try {
                        const TrialOutcome out = run_one(rec.architecture, rec.awareness, chan, truth, ref, spec.dris);
                        rec.bound_linear = upper_bound_fc(chan, truth, ref);
                        rec.gain_linear = out.gain;
                        rec.gain_db = to_db(out.gain);
                        rec.residual = out.residual;
                        if (!std::isfinite(out.gain) || out.gain > rec.bound_linear * (1.0 + 1e-8)) {
                            rec.error = "gain " + num(out.gain) + " exceeds the bound " + num(rec.bound_linear);
                        }
                    } catch (const std::exception& e) {
                        rec.error = e.what();
                    }
                    if (spec.record_runtime) {
                        rec.runtime_ms = std::chrono::duration<double, std::milli>(
                                             std::chrono::steady_clock::now() - start)
                                             .count();
                    }
                }
            });

            for (std::size_t c = 0; c < combos.size(); ++c) {
                SummaryRow row;
                row.experiment = spec.id;
                row.n = n;
                row.spacing_wl = spacing;
                row.architecture = combos[c].arch;
                row.awareness = combos[c].awareness;
                double sum = 0.0;
                double sum_sq = 0.0;
                double bound_sum = 0.0;
                for (std::size_t t = 0; t < spec.trials; ++t) {
                    const TrialRecord& rec = block[t * combos.size() + c];
                    if (!rec.error.empty()) {
                        ++row.failures;
                        continue;
                    }
                    ++row.trials;
                    sum += rec.gain_linear;
                    sum_sq += rec.gain_linear * rec.gain_linear;
                    bound_sum += rec.bound_linear;
                }
                if (row.trials > 0) {
                    const auto k = static_cast<double>(row.trials);
                    row.mean_gain_linear = sum / k;
                    row.mean_bound_linear = bound_sum / k;
                    const double var = row.trials > 1 ? std::max(0.0, (sum_sq - k * row.mean_gain_linear * row.mean_gain_linear) / (k - 1.0)) : 0.0;
                    row.stderr_gain_linear = std::sqrt(var / k);
                    row.mean_gain_db = to_db(row.mean_gain_linear);
                    row.stderr_gain_db = 10.0 / std::log(10.0) * row.stderr_gain_linear / row.mean_gain_linear;
                }
                const CouplingMatrix& truth = combos[c].awareness == Awareness::NoCoupling ? ideal : coupled;
                row.law_mc = scaling_mc(spec.fading, truth, ref);
                row.law_nomc = scaling_nomc(spec.fading, spec.self_impedance.real(), nn, ref);
                result.failures += row.failures;
                result.summary.push_back(row);
            }
            std::move(block.begin(), block.end(), std::back_inserter(result.records));
        }
    }
    return result;
}

std::vector<ScalingRow> run_scaling(const ExperimentSpec& spec) {
    spec.validate();
    const ReferenceImpedance ref(spec.z0);
    std::vector<ScalingRow> rows;
    for (std::size_t n : spec.n_list) {
        for (double spacing : spec.spacing_list) {
            CouplingBuildOptions build;
            build.quadrature = spec.quadrature;
            build.threads = spec.threads;
            const CouplingMatrix z = build_coupling_matrix(spec.geometry(n, spacing), spec.self_impedance, build);
            rows.push_back({n, spacing, estimate_terms(spec.fading, z, ref, spec.trials, derive_seed(spec.seed, n), spec.threads)});
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------------------------
// Outputs

void emit_outputs(const ExperimentResult& result, const std::filesystem::path& dir) {
    if (result.records.empty()) {
        throw InvalidArgument("no records to write");
    }
    make_directory(dir);

    const auto trials_path = dir / "trials.csv";
    std::ofstream trials = open_output(trials_path);
    trials << kTrialsHeader << '\n';
    for (const auto& r : result.records) {
        trials << csv_field(r.experiment) << ',' << r.n << ',' << num(r.spacing_wl) << ',' << to_string(r.architecture)
               << ',' << to_string(r.awareness) << ',' << r.trial << ',' << num(r.gain_linear) << ','
               << num(r.gain_db) << ',' << num(r.bound_linear) << ',' << num(r.residual) << ','
               << num(r.runtime_ms) << ',' << csv_field(r.error) << '\n';
    }
    close_output(trials, trials_path);

    const auto summary_path = dir / "summary.csv";
    std::ofstream summary = open_output(summary_path);
    summary << "experiment,n,spacing_wl,architecture,awareness,trials,failures,mean_gain_linear,stderr_gain_linear,"
               "mean_gain_db,stderr_gain_db,mean_bound_linear,law_mc,law_nomc\n";
    for (const auto& s : result.summary) {
        summary << csv_field(s.experiment) << ',' << s.n << ',' << num(s.spacing_wl) << ','
                << to_string(s.architecture) << ',' << to_string(s.awareness) << ',' << s.trials << ','
                << s.failures << ',' << num(s.mean_gain_linear) << ',' << num(s.stderr_gain_linear) << ','
                << num(s.mean_gain_db) << ',' << num(s.stderr_gain_db) << ',' << num(s.mean_bound_linear) << ','
                << num(s.law_mc) << ',' << num(s.law_nomc) << '\n';
    }
    close_output(summary, summary_path);

    const bool by_spacing = result.spec.kind == ExperimentKind::SweepSpacing;
    json plot;
    plot["experiment"] = result.spec.id;
    plot["kind"] = std::string(to_string(result.spec.kind));
    plot["source"] = "summary.csv";
    plot["x"] = by_spacing ? json{{"field", "spacing_wl"}, {"order", "descending"}, {"label", "inter-element distance d / lambda"}}
                           : json{{"field", "n"}, {"order", "ascending"}, {"label", "number of RIS elements N"}};
    plot["y"] = {{"field", "mean_gain_db"}, {"error", "stderr_gain_db"}, {"label", "average channel gain [dB]"}};
    json series = json::array();
    for (auto arch : result.spec.architectures) {
        for (auto aw : result.spec.awareness) {
            const std::string label = std::string(to_string(arch)) + " " + std::string(to_string(aw));
            if (by_spacing) {
                for (std::size_t n : result.spec.n_list) {
                    json filter = {{"architecture", to_string(arch)}, {"awareness", to_string(aw)}, {"n", n}};
                    series.push_back({{"label", result.spec.n_list.size() > 1 ? label + " N=" + std::to_string(n) : label},
                                      {"filter", filter}});
                }
            } else {
                for (double d : result.spec.spacing_list) {
                    json filter = {{"architecture", to_string(arch)}, {"awareness", to_string(aw)}, {"spacing_wl", d}};
                    series.push_back({{"label", label + " d=" + num(d)}, {"filter", filter}});
                }
            }
        }
    }
    plot["series"] = series;
    const auto plot_path = dir / "plot_spec.json";
    std::ofstream plot_out = open_output(plot_path);
    plot_out << plot.dump(2) << '\n';
    close_output(plot_out, plot_path);
}

void emit_scaling(const std::vector<ScalingRow>& rows, const std::filesystem::path& dir) {
    if (rows.empty()) {
        throw InvalidArgument("no scaling rows to write");
    }
    make_directory(dir);
    const auto path = dir / "scaling.csv";
    std::ofstream out = open_output(path);
    out << "n,spacing_wl,law_mc,law_nomc,mc_estimate,stderr,nomc_estimate,nomc_stderr,condition_number,"
           "cross_norm_correlation,chi_mean_exact";
    for (const auto& name : scaling_term_names()) {
        out << ',' << name << "_closed," << name << "_estimate," << name << "_stderr";
    }
    out << '\n';
    for (const auto& row : rows) {
        const ScalingReport& r = row.report;
        out << row.n << ',' << num(row.spacing_wl) << ',' << num(r.closed_form) << ',' << num(r.nomc_closed_form) << ','
            << num(r.monte_carlo_mean) << ',' << num(r.monte_carlo_stderr) << ',' << num(r.nomc_monte_carlo_mean)
            << ',' << num(r.nomc_monte_carlo_stderr) << ',' << num(r.condition_number) << ','
            << num(r.cross_norm_correlation) << ',' << num(r.chi_mean_exact);
        for (const auto& t : r.per_term) {
            out << ',' << num(t.closed_form) << ',' << num(t.estimate) << ',' << num(t.std_error);
        }
        out << '\n';
    }
    close_output(out, path);
}

void emit_coupling(const CouplingMatrix& z_ii, const DipoleArrayGeometry& geom, const std::filesystem::path& dir) {
    make_directory(dir);
    const auto csv_path = dir / "coupling.csv";
    std::ofstream csv = open_output(csv_path);
    csv << "row,col,re_ohm,im_ohm\n";
    const Eigen::MatrixXcd& m = z_ii.values();
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index k = 0; k < m.cols(); ++k) {
            csv << i << ',' << k << ',' << num(m(i, k).real()) << ',' << num(m(i, k).imag()) << '\n';
        }
    }
    close_output(csv, csv_path);

    const json meta = {
        {"n", geom.size()},
        {"n_x", geom.n_x},
        {"n_y", geom.n_y},
        {"frequency_hz", geom.frequency},
        {"wavelength_m", geom.wavelength()},
        {"spacing_m", geom.spacing},
        {"spacing_wl", geom.spacing / geom.wavelength()},
        {"dipole_length_m", geom.dipole_length},
        {"wire_radius_m", geom.wire_radius},
        {"free_space_impedance_ohm", kFreeSpaceImpedance},
        {"self_impedance_ohm", {m(0, 0).real(), m(0, 0).imag()}},
        {"real_lambda_min", z_ii.real_lambda_min()},
        {"real_lambda_max", z_ii.real_lambda_max()},
        {"passive", z_ii.passive()},
    };
    const auto json_path = dir / "coupling.json";
    std::ofstream out = open_output(json_path);
    out << meta.dump(2) << '\n';
    close_output(out, json_path);
}

std::string optimize_instance(std::string_view json_text, unsigned threads) {
    const json j = parse_json(json_text);
    reject_unknown(j, {"z0", "architecture", "aware", "channels", "coupling", "geometry", "dris"}, "instance");
    const ReferenceImpedance ref(j.contains("z0") ? get<double>(j, "z0") : 50.0);
    const Architecture arch = parse_architecture(get<std::string>(j, "architecture"));
    const bool aware = j.contains("aware") ? get<bool>(j, "aware") : true;

    if (!j.contains("channels")) {
        throw ConfigError("instance needs a 'channels' object");
    }
    const json& c = j.at("channels");
    reject_unknown(c, {"direct", "ris_to_rx", "tx_to_ris"}, "channels");
    ChannelTriple chan;
    chan.representation = Representation::Impedance;
    chan.direct = c.contains("direct") ? parse_complex(c, "direct") : Complex{};
    chan.ris_to_rx = parse_complex_vector<Eigen::RowVectorXcd>(c, "ris_to_rx");
    chan.tx_to_ris = parse_complex_vector<Eigen::VectorXcd>(c, "tx_to_ris");
    if (chan.ris_to_rx.size() != chan.tx_to_ris.size()) {
        throw ConfigError("ris_to_rx and tx_to_ris lengths differ");
    }
    const Index n = chan.size();

    if (j.contains("coupling") == j.contains("geometry")) {
        throw ConfigError("instance needs exactly one of 'coupling' or 'geometry'");
    }
    std::optional<CouplingMatrix> z_ii;
    if (j.contains("coupling")) {
        z_ii.emplace(parse_complex_matrix(j.at("coupling"), n), Representation::Impedance);
    } else {
        const json& g = j.at("geometry");
        reject_unknown(g, {"spacing_wl", "n_x", "frequency_hz", "dipole_length_wl", "wire_radius_wl", "self_impedance"},
                       "geometry");
        ExperimentSpec spec = default_spec(ExperimentKind::SingleInstance);
        spec.n_list = {static_cast<std::size_t>(n)};
        spec.spacing_list = {get<double>(g, "spacing_wl")};
        if (g.contains("n_x")) {
            spec.n_x = get<std::size_t>(g, "n_x");
        }
        if (g.contains("frequency_hz")) {
            spec.frequency_hz = get<double>(g, "frequency_hz");
        }
        if (g.contains("dipole_length_wl")) {
            spec.dipole_length_wl = get<double>(g, "dipole_length_wl");
        }
        if (g.contains("wire_radius_wl")) {
            spec.wire_radius_wl = get<double>(g, "wire_radius_wl");
        }
        if (g.contains("self_impedance")) {
            spec.self_impedance = parse_complex(g, "self_impedance");
        }
        spec.validate();
        CouplingBuildOptions build;
        build.threads = threads;
        z_ii.emplace(build_coupling_matrix(spec.geometry(spec.n_list[0], spec.spacing_list[0]), spec.self_impedance, build));
    }

    DrisOptions dris;
    if (j.contains("dris")) {
        const json& d = j.at("dris");
        reject_unknown(d, {"grid", "max_sweeps", "tolerance"}, "dris");
        dris.grid = d.contains("grid") ? get<int>(d, "grid") : dris.grid;
        dris.max_sweeps = d.contains("max_sweeps") ? get<int>(d, "max_sweeps") : dris.max_sweeps;
        dris.tolerance = d.contains("tolerance") ? get<double>(d, "tolerance") : dris.tolerance;
    }

    RisConfiguration config;
    double gain = 0.0;
    if (aware) {
        switch (arch) {
            case Architecture::FullyConnected:
                config = optimize_fully_connected(chan, *z_ii, ref);
                break;
            case Architecture::TreeTridiagonal:
                config = optimize_tree_connected(chan, *z_ii, ref);
                break;
            case Architecture::Diagonal:
                config = optimize_dris_aware(chan, *z_ii, ref, dris);
                break;
        }
        gain = config.achieved_gain;
    } else {
        config = optimize_unaware(arch, chan, ref);
        gain = evaluate_under(config, chan, *z_ii, ref);
    }
    const double bound = upper_bound_fc(chan, *z_ii, ref);

    const json out = {
        {"architecture", to_string(arch)},
        {"aware", aware},
        {"n", n},
        {"load", {{"kind", config.load.kind() == LoadKind::Reactance ? "reactance_ohm" : "susceptance_siemens"},
                  {"values", matrix_json(config.load.values())}}},
        {"achieved_gain", gain},
        {"achieved_gain_db", to_db(gain)},
        {"bound_gain", bound},
        {"bound_gain_db", to_db(bound)},
        {"residual", config.residual},
        {"sweeps", config.sweeps},
    };
    return out.dump(2);
}

// ---------------------------------------------------------------------------------------------
// Self test

bool run_selftest(std::ostream& out, std::uint64_t seed, unsigned threads) {
    bool all = true;
    auto report = [&](const std::string& name, bool ok, const std::string& detail) {
        out << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
        all = all && ok;
    };
    auto guarded = [&](const std::string& name, auto&& check) {
        try {
            check();
        } catch (const std::exception& e) {
            report(name, false, std::string("exception: ") + e.what());
        }
    };
    const ReferenceImpedance ref(50.0);
    FadingSpec fading{1e-4, 1e-4, FadingModel::Rayleigh, 0.0};

    guarded("cayley_round_trip", [&] {
        Rng rng(derive_seed(seed, 1));
        std::normal_distribution<double> g(0.0, 50.0);
        Eigen::MatrixXd x(8, 8);
        for (Index i = 0; i < x.size(); ++i) {
            x.data()[i] = g(rng);
        }
        const LoadMatrix load(LoadKind::Reactance, x);
        const Eigen::MatrixXcd theta = cayley(load, ref);
        const double unitary = (theta.adjoint() * theta - Eigen::MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff();
        const double round = (cayley_inv(theta, ref, LoadKind::Reactance).values() - load.values()).cwiseAbs().maxCoeff();
        report("cayley_round_trip", unitary <= 1e-10 && round <= 1e-9,
               "unitarity " + num(unitary) + ", round trip " + num(round));
    });

    CouplingBuildOptions build;
    build.threads = threads;
    std::optional<CouplingMatrix> z;
    guarded("coupling_passive", [&] {
        z.emplace(build_coupling_matrix(DipoleArrayGeometry::uniform_planar(16, 0.25), {50.0, 0.0}, build));
        const double lmin_y = z->dual().real_lambda_min();
        report("coupling_passive", z->passive() && lmin_y >= 0.0,
               "lambda_min(Re Z) " + num(z->real_lambda_min()) + ", lambda_min(Re Y) " + num(lmin_y));
    });
    if (!z.has_value()) {
        return false;
    }

    guarded("bound_achieved", [&] {
        double worst = 0.0;
        double gap = 0.0;
        for (std::size_t t = 0; t < 20; ++t) {
            Rng rng(derive_seed(seed, 100 + t));
            const ChannelTriple chan = sample_channels(fading, 16, rng);
            const RisConfiguration fc = optimize_fully_connected(chan, *z, ref);
            const RisConfiguration tc = optimize_tree_connected(chan, *z, ref);
            worst = std::max({worst, std::abs(fc.achieved_gain / fc.bound_gain - 1.0),
                              std::abs(tc.achieved_gain / tc.bound_gain - 1.0)});
            gap = std::max(gap, std::abs(tc.bound_gain / fc.bound_gain - 1.0));
        }
        report("bound_achieved", worst <= 1e-8 && gap <= 1e-10,
               "max |gain/bound - 1| " + num(worst) + ", max bound mismatch " + num(gap));
    });

    guarded("scaling_law", [&] {
        const ScalingReport r = estimate_terms(fading, *z, ref, 500, seed, threads);
        const double rel = std::abs(r.monte_carlo_mean / r.closed_form - 1.0);
        report("scaling_law", rel <= 0.05, "relative gap to closed form " + num(rel) + " over 500 trials");
    });

    guarded("coupling_benefit", [&] {
        const double margin = coupling_benefit_margin(fading, *z, ref);
        report("coupling_benefit", margin >= 0.0, "margin " + num(margin));
    });
    return all;
}

}  // namespace coupled_ris
