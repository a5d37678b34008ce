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

// Command-line front end: coupled-ris coupling|optimize|sweep-n|sweep-d|scaling|selftest

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "coupled_ris/harness.hpp"

namespace cr = coupled_ris;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonOptions {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    bool timing = false;
};

void add_common(CLI::App* sub, CommonOptions& opts, bool config_required) {
    auto* config = sub->add_option("--config", opts.config, "JSON config file");
    if (config_required) {
        config->required();
    }
    config->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out, "output directory")->capture_default_str();
    sub->add_option("--seed", opts.seed, "64-bit seed (overrides the config)");
    sub->add_option("--threads", opts.threads, "worker threads (COUPLED_RIS_THREADS overrides)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
}

unsigned resolve_threads(unsigned requested) {
    const char* env = std::getenv("COUPLED_RIS_THREADS");
    if (env == nullptr || *env == '\0') {
        return requested;
    }
    try {
        std::size_t used = 0;
        const unsigned long value = std::stoul(env, &used);
        if (used != std::string(env).size() || value == 0) {
            throw std::invalid_argument(env);
        }
        return static_cast<unsigned>(value);
    } catch (const std::exception&) {
        throw cr::ConfigError(std::string("COUPLED_RIS_THREADS must be a positive integer, got '") + env + "'");
    }
}

cr::ExperimentSpec resolve_spec(const CommonOptions& opts, cr::ExperimentKind kind) {
    cr::ExperimentSpec spec = opts.config.empty() ? cr::default_spec(kind) : cr::load_spec(opts.config, kind);
    if (opts.seed) {
        spec.seed = *opts.seed;
    }
    spec.threads = resolve_threads(opts.threads);
    spec.record_runtime = spec.record_runtime || opts.timing;
    spec.validate();
    return spec;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw cr::ConfigError("cannot read " + path);
    }
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

int run_sweep(const CommonOptions& opts, cr::ExperimentKind kind) {
    const cr::ExperimentSpec spec = resolve_spec(opts, kind);
    const cr::ExperimentResult result = cr::run_experiment(spec);
    cr::emit_outputs(result, opts.out);
    for (const auto& row : result.summary) {
        std::printf("n=%-4zu d=%-6.3f %-4s %-10s mean %9.3f dB  (stderr %.3f dB, %zu trials, %zu failed)\n", row.n,
                    row.spacing_wl, std::string(cr::to_string(row.architecture)).c_str(),
                    std::string(cr::to_string(row.awareness)).c_str(), row.mean_gain_db, row.stderr_gain_db,
                    row.trials, row.failures);
    }
    std::printf("wrote %zu records to %s\n", result.records.size(), opts.out.c_str());
    if (result.failure_fraction() > 0.01) {
        std::fprintf(stderr, "error: %zu of %zu trials failed\n", result.failures, result.records.size());
        return kExitNumerical;
    }
    return 0;
}

int run_scaling(const CommonOptions& opts) {
    const cr::ExperimentSpec spec = resolve_spec(opts, cr::ExperimentKind::ScalingValidation);
    const auto rows = cr::run_scaling(spec);
    cr::emit_scaling(rows, opts.out);
    for (const auto& row : rows) {
        const auto& r = row.report;
        std::printf("n=%-4zu d=%-6.3f law_mc %.6g  monte carlo %.6g +- %.2g  (%+.2f%%)  law_nomc %.6g\n", row.n,
                    row.spacing_wl, r.closed_form, r.monte_carlo_mean, r.monte_carlo_stderr,
                    100.0 * (r.monte_carlo_mean / r.closed_form - 1.0), r.nomc_closed_form);
    }
    std::printf("wrote %s\n", (std::filesystem::path(opts.out) / "scaling.csv").string().c_str());
    return 0;
}

int run_coupling(const CommonOptions& opts) {
    const cr::ExperimentSpec spec = resolve_spec(opts, cr::ExperimentKind::SingleInstance);
    const bool nested = spec.n_list.size() * spec.spacing_list.size() > 1;
    for (std::size_t n : spec.n_list) {
        for (double d : spec.spacing_list) {
            const cr::DipoleArrayGeometry geom = spec.geometry(n, d);
            cr::CouplingBuildOptions build;
            build.quadrature = spec.quadrature;
            build.threads = spec.threads;
            build.passivity = cr::PassivityPolicy::Report;
            const cr::CouplingMatrix z = cr::build_coupling_matrix(geom, spec.self_impedance, build);
            std::filesystem::path dir = opts.out;
            if (nested) {
                char name[64];
                std::snprintf(name, sizeof name, "n%zu_d%.4g", n, d);
                dir /= name;
            }
            cr::emit_coupling(z, geom, dir);
            std::printf("n=%zu d=%.4g lambda: Re{Z_II} eigenvalues in [%.6g, %.6g] ohm -> %s\n", n, d,
                        z.real_lambda_min(), z.real_lambda_max(), dir.string().c_str());
            if (!z.passive()) {
                std::fprintf(stderr, "error: real part is not positive semi-definite\n");
                return kExitNumerical;
            }
        }
    }
    return 0;
}

int run_optimize(const CommonOptions& opts) {
    const std::string result = cr::optimize_instance(read_file(opts.config), resolve_threads(opts.threads));
    std::filesystem::create_directories(opts.out);
    const auto path = std::filesystem::path(opts.out) / "result.json";
    std::ofstream out(path, std::ios::binary);
    out << result << '\n';
    if (!out) {
        throw cr::IoError("failed to write " + path.string());
    }
    std::cout << result << '\n';
    return 0;
}

int run_selftest(const CommonOptions& opts) {
    const bool ok = cr::run_selftest(std::cout, opts.seed.value_or(1), resolve_threads(opts.threads));
    return ok ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RIS channel optimization and Monte Carlo experiments with mutual coupling", "coupled-ris"};
    app.require_subcommand(1);

    CommonOptions opts;
    auto* coupling = app.add_subcommand("coupling", "build Z_II for a dipole array and write it as CSV");
    auto* optimize = app.add_subcommand("optimize", "optimize one instance described by a JSON file");
    auto* sweep_n = app.add_subcommand("sweep-n", "average gain versus the number of elements");
    auto* sweep_d = app.add_subcommand("sweep-d", "average gain versus the inter-element distance");
    auto* scaling = app.add_subcommand("scaling", "closed-form scaling laws against Monte Carlo");
    auto* selftest = app.add_subcommand("selftest", "quick end-to-end checks");
    add_common(coupling, opts, false);
    add_common(optimize, opts, true);
    add_common(sweep_n, opts, false);
    add_common(sweep_d, opts, false);
    add_common(scaling, opts, false);
    add_common(selftest, opts, false);
    for (auto* sub : {sweep_n, sweep_d}) {
        sub->add_flag("--timing", opts.timing, "record per-trial runtime (makes outputs run-dependent)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*coupling) {
            return run_coupling(opts);
        }
        if (*optimize) {
            return run_optimize(opts);
        }
        if (*sweep_n) {
            return run_sweep(opts, cr::ExperimentKind::SweepN);
        }
        if (*sweep_d) {
            return run_sweep(opts, cr::ExperimentKind::SweepSpacing);
        }
        if (*scaling) {
            return run_scaling(opts);
        }
        if (*selftest) {
            return run_selftest(opts);
        }
    } catch (const cr::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const cr::GeometryError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const cr::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const cr::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
