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

// dce: command-line driver.
//
//   dce run      [config] [-s key=value ...] [-o dir]
//   dce sweep    [config] --axis key --values v1,v2,... [--workers n] [-o dir]
//   dce resume   checkpoint.bin [--t-final t] [-o dir]
//   dce validate [config] [-s key=value ...]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 truncation breach.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "dce/config.hpp"
#include "dce/run.hpp"

namespace {

using namespace dce::cli;

KeyValues collect_overrides(const std::vector<std::string>& sets, const std::string& out) {
    KeyValues kv;
    for (const auto& s : sets) {
        auto assignment = parse_assignment(s);
        for (const auto& [k, v] : kv)
            if (k == assignment.first) throw dce::ConfigError("key '" + k + "' set twice on the command line");
        kv.push_back(std::move(assignment));
    }
    if (!out.empty()) kv.emplace_back("output_dir", out);
    return kv;
}

RunConfig load(const std::string& path, const KeyValues& overrides) {
    if (path.empty()) return resolve_config({}, overrides, "command line");
    return load_config(path, overrides);
}

std::vector<std::string> split_values(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    for (char ch : text + ",") {
        if (ch == ',') {
            item = trim(item);
            if (!item.empty()) out.push_back(item);
            item.clear();
        } else {
            item += ch;
        }
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-qubit dynamical Casimir effect: master-equation simulation and quantum Fisher information"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kBuildId));

    std::string config_path, out_dir, checkpoint_path, axis, values_text;
    std::vector<std::string> sets;
    int workers = 0;
    double t_final = -1.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "key = value configuration file (optional with -s preset=...)");
        sub->add_option("-s,--set", sets, "override a configuration key, key=value (repeatable)");
        sub->add_option("-o,--out", out_dir, "output directory");
    };
    CLI::App* run_cmd = app.add_subcommand("run", "integrate one configuration");
    add_common(run_cmd);
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "independent runs over one parameter axis");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--axis", axis, "parameter or integrator key to vary")->required();
    sweep_cmd->add_option("--values", values_text, "comma-separated values")->required();
    sweep_cmd->add_option("--workers", workers, "parallel runs (default: config 'workers')");
    CLI::App* resume_cmd = app.add_subcommand("resume", "continue a run from its checkpoint");
    resume_cmd->add_option("checkpoint", checkpoint_path, "checkpoint.bin written by run")->required();
    resume_cmd->add_option("--t-final", t_final, "new final time");
    resume_cmd->add_option("-o,--out", out_dir, "output directory (default: the checkpoint's directory)");
    CLI::App* validate_cmd = app.add_subcommand("validate", "check a configuration and print it resolved");
    validate_cmd->add_option("config", config_path, "configuration file");
    validate_cmd->add_option("-s,--set", sets, "override a configuration key, key=value (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*validate_cmd) {
            const RunConfig cfg = load(config_path, collect_overrides(sets, ""));
            for (const auto& w : cfg.warnings) std::cerr << "[dce] warning: " << w << "\n";
            std::cout << provenance_header(cfg, "dce-config/1") << canonical_text(cfg);
            return kExitOk;
        }
        if (*run_cmd) {
            const RunConfig cfg = load(config_path, collect_overrides(sets, out_dir));
            const RunOutcome outcome = run(cfg, std::cerr);
            return outcome.exit_code;
        }
        if (*sweep_cmd) {
            const RunConfig base = load(config_path, collect_overrides(sets, ""));
            for (const auto& w : base.warnings) std::cerr << "[dce] warning: " << w << "\n";
            const std::string root = out_dir.empty() ? base.output_dir : out_dir;
            const SweepResult result =
                sweep(base, axis, split_values(values_text), root, workers > 0 ? workers : base.workers, std::cerr);
            return result.exit_code;
        }
        if (*resume_cmd) {
            KeyValues overrides;
            if (t_final >= 0.0) overrides.emplace_back("t_final", format_double(t_final));
            if (!out_dir.empty()) overrides.emplace_back("output_dir", out_dir);
            return resume(checkpoint_path, overrides, std::cerr).exit_code;
        }
    } catch (const dce::ConfigError& e) {
        std::cerr << "[dce] configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const dce::TruncationError& e) {
        std::cerr << "[dce] truncation breach: " << e.what() << "\n";
        return kExitTruncation;
    } catch (const dce::NumericalError& e) {
        std::cerr << "[dce] numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "[dce] error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
