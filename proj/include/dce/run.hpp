// Copyright 2026 The dce-qfi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Run orchestration: trajectory CSV, photon-distribution snapshots,
// checkpoints, resume and parameter sweeps.

#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dce/checkpoint.hpp"
#include "dce/config.hpp"
#include "dce/errors.hpp"
#include "dce/trajectory.hpp"

#ifndef DCE_BUILD_ID
#define DCE_BUILD_ID "dce-qfi (unversioned build)"
#endif

namespace dce::cli {

namespace fs = std::filesystem;

inline constexpr const char* kBuildId = DCE_BUILD_ID;
inline constexpr const char* kCsvSchema = "dce-trajectory/1";
inline constexpr const char* kCsvColumns =
    "t,P_e,n_mean,n_std,S_L,negativity,F_ph,r,M_av,M_opt,trace_error,tail_population";

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitTruncation = 4 };

inline std::string format_value(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", x);
    return buf;
}

inline std::string csv_row(const TrajectoryRecord& r) {
    std::string s = format_value(r.t);
    for (double v : {r.P_e, r.n_mean, r.n_std, r.S_L, r.negativity, r.F_ph}) s += "," + format_value(v);
    s += "," + (r.r ? format_value(*r.r) : std::string("NA"));
    for (double v : {r.M_av, r.M_opt, r.trace_error, r.tail_population}) s += "," + format_value(v);
    return s;
}

/// Comment block that precedes every output file: schema, build, hash and
/// the full resolved configuration.
inline std::string provenance_header(const RunConfig& cfg, const std::string& schema) {
    std::ostringstream os;
    os << "# schema = " << schema << "\n";
    os << "# build = " << kBuildId << "\n";
    os << "# config_hash = " << hex64(config_hash(cfg)) << "\n";
    if (cfg.preset) os << "# preset = " << *cfg.preset << "\n";
    std::istringstream lines(canonical_text(cfg));
    for (std::string line; std::getline(lines, line);) os << "# config: " << line << "\n";
    return os.str();
}

inline std::string snapshot_filename(double t) { return "snapshot_t" + format_double(t) + ".txt"; }

inline void write_snapshot(const fs::path& path, const PhotonDistribution& dist, const RunConfig& cfg) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << "# photon number distribution\n";
    os << "# t = " << format_double(dist.t) << "\n";
    os << "# config_hash = " << hex64(config_hash(cfg)) << "\n";
    os << "# build = " << kBuildId << "\n";
    os << "m probability\n";
    for (std::size_t m = 0; m < dist.probabilities.size(); ++m)
        os << m << " " << format_value(dist.probabilities[m]) << "\n";
}

/// Reads a snapshot file back as (t, probabilities).
inline PhotonDistribution read_snapshot(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path.string());
    PhotonDistribution dist;
    for (std::string line; std::getline(is, line);) {
        if (line.rfind("# t = ", 0) == 0) dist.t = std::stod(line.substr(6));
        if (line.empty() || line[0] == '#' || line[0] == 'm') continue;
        std::istringstream ss(line);
        std::size_t m = 0;
        double p = 0.0;
        ss >> m >> p;
        dist.probabilities.push_back(p);
    }
    return dist;
}

/// Generated matplotlib script that renders the run's panels from the CSV.
inline std::string plot_script() {
    return R"PY(#!/usr/bin/env python3
# Generated by dce. Renders trajectory.csv and snapshot_t*.txt in this directory.
import glob
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

here = os.path.dirname(os.path.abspath(__file__))
data = np.genfromtxt(os.path.join(here, "trajectory.csv"), delimiter=",", comments="#",
                     names=True, missing_values="NA", filling_values=np.nan)
t = data["t"]
panels = [
    ("a", "P_e", [("P_e", "P_e")]),
    ("b", "S_L", [("S_L", "S_L")]),
    ("c", "photons", [("n_mean", "<n>"), ("n_std", "dn")]),
    ("d", "negativity", [("negativity", "N")]),
    ("e", "F_ph", [("F_ph", "F_ph"), ("n_mean", "<n>")]),
    ("f", "M_av", [("M_av", "M_av")]),
    ("g", "r", [("r", "r")]),
    ("h", "M_opt", [("M_opt", "M_opt")]),
]
fig, axes = plt.subplots(4, 2, figsize=(10, 12), sharex=True)
for ax, (tag, title, series) in zip(axes.flat, panels):
    for column, label in series:
        ax.plot(t, data[column], lw=0.6, label=label)
    ax.set_title(f"{tag}) {title}")
    if len(series) > 1:
        ax.legend()
for ax in axes[-1]:
    ax.set_xlabel("nu t")
fig.tight_layout()
fig.savefig(os.path.join(here, "trajectory.png"), dpi=150)

snaps = sorted(glob.glob(os.path.join(here, "snapshot_t*.txt")))
if snaps:
    fig, ax = plt.subplots(figsize=(6, 4))
    for path in snaps:
        m, p = np.loadtxt(path, comments="#", skiprows=1, unpack=True)
        label = os.path.basename(path)[len("snapshot_t"):-len(".txt")]
        ax.semilogy(m, np.clip(p, 1e-16, None), marker=".", lw=0.5, label=f"nu t = {label}")
    ax.set_xlabel("n")
    ax.set_ylabel("P(n)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(os.path.join(here, "photon_distribution.png"), dpi=150)
sys.exit(0)
)PY";
}

struct RunOutcome {
    int exit_code = kExitOk;
    std::string message;
    std::vector<TrajectoryRecord> records;
};

inline SimulationSetup simulation_setup(const RunConfig& cfg) {
    SimulationSetup s;
    s.params = cfg.effective_params();
    s.hilbert = cfg.hilbert;
    s.integrator = cfg.integrator;
    s.snapshot_times = cfg.snapshot_times;
    return s;
}

namespace detail {

/// Keeps the comment header out and the data rows with t <= t_max.
inline std::vector<std::string> csv_rows_until(const fs::path& csv, double t_max) {
    std::vector<std::string> rows;
    std::ifstream is(csv);
    for (std::string line; std::getline(is, line);) {
        if (line.empty() || line[0] == '#' || line[0] == 't') continue;
        const double t = std::stod(line.substr(0, line.find(',')));
        if (t <= t_max || same_time(t, t_max)) rows.push_back(line);
    }
    return rows;
}

/// Shared body of run and resume: integrates from `state`, streaming rows,
/// snapshots and periodic checkpoints into cfg.output_dir.
inline RunOutcome execute(const RunConfig& cfg, IntegratorState state, bool fresh, std::ofstream& csv,
                          std::ostream& log) {
    RunOutcome out;
    const fs::path dir(cfg.output_dir);
    const SimulationSetup setup = simulation_setup(cfg);
    const std::string text = canonical_text(cfg);
    const std::uint64_t hash = fnv1a(text);
    auto checkpoint = [&](const IntegratorState& s) {
        Checkpoint ck{s, cfg.hilbert.n_fock, cfg.integrator.frame, hash, text};
        save_checkpoint((dir / "checkpoint.bin").string(), ck);
    };
    double next_checkpoint = cfg.checkpoint_interval > 0.0
                                 ? (std::floor(state.t / cfg.checkpoint_interval) + 1.0) * cfg.checkpoint_interval
                                 : std::numeric_limits<double>::infinity();
    const double progress_every = std::max(cfg.integrator.t_final / 10.0, cfg.integrator.sample_stride);
    double next_progress = state.t + progress_every;

    auto sink = [&](const TrajectoryRecord& rec, const IntegratorState& s) {
        csv << csv_row(rec) << "\n";
        csv.flush();
        if (rec.photon_distribution) write_snapshot(dir / snapshot_filename(rec.t), *rec.photon_distribution, cfg);
        if (rec.t >= next_checkpoint || same_time(rec.t, next_checkpoint)) {
            checkpoint(s);
            next_checkpoint += cfg.checkpoint_interval;
        }
        if (rec.t >= next_progress) {
            log << "[dce] t = " << rec.t << "  n_mean = " << rec.n_mean << "  F_ph = " << rec.F_ph
                << "  steps = " << s.accepted << "\n";
            next_progress += progress_every;
        }
    };

    try {
        out.records = continue_trajectory(state, setup, sink, fresh);
        if (cfg.checkpoint_interval > 0.0) checkpoint(state);
    } catch (const TruncationError& e) {
        out.exit_code = kExitTruncation;
        out.message = std::string("truncation breach: ") + e.what() + " (increase n_fock)";
    } catch (const NumericalError& e) {
        out.exit_code = kExitNumerical;
        out.message = std::string("numerical failure: ") + e.what();
    }
    if (out.exit_code != kExitOk) log << "[dce] " << out.message << "; CSV kept up to the failure\n";
    return out;
}

} // namespace detail

inline void prepare_output_dir(const RunConfig& cfg) {
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    std::ofstream(dir / "run_config.txt", std::ios::trunc)
        << provenance_header(cfg, "dce-config/1") << canonical_text(cfg);
    std::ofstream(dir / "plot_trajectory.py", std::ios::trunc) << plot_script();
}

/// Integrates from |g,0> and writes trajectory.csv, snapshots, checkpoint.bin,
/// run_config.txt and plot_trajectory.py into cfg.output_dir.
inline RunOutcome run(const RunConfig& cfg, std::ostream& log) {
    for (const auto& w : cfg.warnings) log << "[dce] warning: " << w << "\n";
    prepare_output_dir(cfg);
    const fs::path dir(cfg.output_dir);
    std::ofstream csv(dir / "trajectory.csv", std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot write " + (dir / "trajectory.csv").string());
    csv << provenance_header(cfg, kCsvSchema) << kCsvColumns << "\n";

    IntegratorState state;
    state.rho = ground_vacuum(cfg.hilbert);
    state.h = cfg.integrator.initial_step;
    log << "[dce] run " << (cfg.preset ? *cfg.preset : std::string("custom")) << " -> " << cfg.output_dir
        << " (n_fock = " << cfg.hilbert.n_fock << ", frame = " << to_string(cfg.integrator.frame)
        << ", t_final = " << cfg.integrator.t_final << ")\n";
    return detail::execute(cfg, std::move(state), true, csv, log);
}

/// Keys that may change when resuming; everything else is fixed by the checkpoint.
inline bool resume_overridable(const std::string& key) {
    return key == "t_final" || key == "output_dir" || key == "checkpoint_interval" || key == "snapshot_times";
}

/// Continues a checkpointed run. Rows of an existing trajectory.csv beyond
/// the checkpoint time are discarded before new rows are appended.
inline RunOutcome resume(const std::string& checkpoint_path, const KeyValues& overrides, std::ostream& log) {
    Checkpoint ck;
    try {
        ck = load_checkpoint(checkpoint_path);
    } catch (const std::runtime_error& e) {
        throw ConfigError(std::string("cannot resume: ") + e.what());
    }
    if (fnv1a(ck.config_text) != ck.config_hash) throw ConfigError("checkpoint config hash mismatch (corrupt file)");
    for (const auto& [k, v] : overrides)
        if (!resume_overridable(k)) throw ConfigError("key '" + k + "' cannot be changed when resuming");
    std::istringstream is(ck.config_text);
    KeyValues kv = parse_key_values(is, checkpoint_path);
    RunConfig cfg = resolve_config(kv, overrides, checkpoint_path);
    bool dir_given = false;
    for (const auto& [k, v] : overrides) dir_given = dir_given || k == "output_dir";
    if (!dir_given) cfg.output_dir = fs::path(checkpoint_path).parent_path().string();
    if (cfg.output_dir.empty()) cfg.output_dir = ".";
    if (cfg.hilbert.n_fock != ck.n_fock || cfg.integrator.frame != ck.frame)
        throw ConfigError("checkpoint header disagrees with its embedded configuration");
    if (ck.state.t > cfg.integrator.t_final && !same_time(ck.state.t, cfg.integrator.t_final))
        throw ConfigError("checkpoint time lies beyond t_final");

    const fs::path dir(cfg.output_dir);
    const fs::path csv_path = dir / "trajectory.csv";
    std::vector<std::string> kept;
    if (fs::exists(csv_path)) kept = detail::csv_rows_until(csv_path, ck.state.t);
    prepare_output_dir(cfg);
    std::ofstream csv(csv_path, std::ios::trunc);
    csv << provenance_header(cfg, kCsvSchema) << "# resumed_at = " << format_double(ck.state.t) << "\n"
        << kCsvColumns << "\n";
    for (const auto& row : kept) csv << row << "\n";
    log << "[dce] resume at t = " << ck.state.t << " -> t_final = " << cfg.integrator.t_final << "\n";
    return detail::execute(cfg, std::move(ck.state), false, csv, log);
}

// ------------------------------------------------------------------ sweep

struct SweepEntry {
    std::string value;
    RunConfig config;
    int exit_code = kExitOk;
    std::string message;
    std::optional<TrajectoryRecord> final_record;
};

struct SweepResult {
    int exit_code = kExitOk;
    std::vector<SweepEntry> entries;
};

/// One independent run per value, executed by up to `workers` threads.
/// Every configuration is resolved before any run starts; a failing run does
/// not stop its siblings. Writes index.csv (and convergence.txt for an
/// n_fock axis) into out_root.
inline SweepResult sweep(const RunConfig& base, const std::string& axis, const std::vector<std::string>& values,
                         const std::string& out_root, int workers, std::ostream& log) {
    const auto& keys = sweepable_keys();
    if (std::find(keys.begin(), keys.end(), axis) == keys.end()) {
        std::string msg = "sweep axis '" + axis + "' is not a parameter or integrator key; valid:";
        for (const auto& k : keys) msg += " " + k;
        throw ConfigError(msg);
    }
    if (values.empty()) throw ConfigError("sweep needs at least one value");
    if (workers < 1) throw ConfigError("workers must be >= 1");

    SweepResult result;
    for (std::size_t i = 0; i < values.size(); ++i) {
        SweepEntry e;
        e.value = values[i];
        e.config = with_override(base, axis, values[i]);
        e.config.output_dir = (fs::path(out_root) / (axis + "_" + std::to_string(i))).string();
        result.entries.push_back(std::move(e));
    }
    fs::create_directories(out_root);

    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < result.entries.size(); i = next++) {
            SweepEntry& e = result.entries[i];
            fs::create_directories(e.config.output_dir);
            std::ofstream run_log(fs::path(e.config.output_dir) / "run.log", std::ios::trunc);
            try {
                RunOutcome o = run(e.config, run_log);
                e.exit_code = o.exit_code;
                e.message = o.message;
                if (!o.records.empty()) e.final_record = o.records.back();
            } catch (const std::exception& ex) {
                e.exit_code = kExitNumerical;
                e.message = ex.what();
            }
            std::lock_guard<std::mutex> lock(log_mutex);
            log << "[dce] sweep " << axis << " = " << e.value << ": "
                << (e.exit_code == kExitOk ? "ok" : e.message) << "\n";
        }
    };
    std::vector<std::thread> pool;
    const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(workers), values.size());
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    std::ofstream index(fs::path(out_root) / "index.csv", std::ios::trunc);
    index << "# build = " << kBuildId << "\n# axis = " << axis << "\n";
    index << "index,value,directory,exit_code,config_hash,t,n_mean,F_ph,r,M_av,M_opt\n";
    for (std::size_t i = 0; i < result.entries.size(); ++i) {
        const SweepEntry& e = result.entries[i];
        index << i << "," << e.value << "," << fs::path(e.config.output_dir).filename().string() << ","
              << e.exit_code << "," << hex64(config_hash(e.config));
        if (e.final_record) {
            const auto& r = *e.final_record;
            index << "," << format_value(r.t) << "," << format_value(r.n_mean) << "," << format_value(r.F_ph)
                  << "," << (r.r ? format_value(*r.r) : std::string("NA")) << "," << format_value(r.M_av) << ","
                  << format_value(r.M_opt);
        } else {
            index << ",NA,NA,NA,NA,NA,NA";
        }
        index << "\n";
        if (e.exit_code != kExitOk && result.exit_code == kExitOk) result.exit_code = e.exit_code;
    }

    if (axis == "n_fock") {
        // Relative change of the final n_mean and F_ph against the largest truncation.
        const SweepEntry* ref = nullptr;
        for (const auto& e : result.entries)
            if (e.final_record && (!ref || e.config.hilbert.n_fock > ref->config.hilbert.n_fock)) ref = &e;
        std::ofstream conv(fs::path(out_root) / "convergence.txt", std::ios::trunc);
        conv << "# truncation convergence against the largest n_fock\n";
        conv << "n_fock t n_mean F_ph rel_change_n_mean rel_change_F_ph\n";
        for (const auto& e : result.entries) {
            if (!e.final_record || !ref) continue;
            const auto& r = *e.final_record;
            const auto& rr = *ref->final_record;
            auto rel = [](double a, double b) { return b != 0.0 ? std::abs(a - b) / std::abs(b) : std::abs(a - b); };
            conv << e.config.hilbert.n_fock << " " << format_value(r.t) << " " << format_value(r.n_mean) << " "
                 << format_value(r.F_ph) << " " << format_value(rel(r.n_mean, rr.n_mean)) << " "
                 << format_value(rel(r.F_ph, rr.F_ph)) << "\n";
        }
    }
    std::size_t failed = 0;
    for (const auto& e : result.entries) failed += e.exit_code != kExitOk;
    log << "[dce] sweep finished: " << result.entries.size() - failed << " ok, " << failed << " failed\n";
    return result;
}

} // namespace dce::cli
