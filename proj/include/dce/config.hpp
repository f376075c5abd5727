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

// Run configuration: key = value text files, figure presets and the
// canonical resolved form echoed into every output file.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dce/errors.hpp"
#include "dce/hilbert.hpp"
#include "dce/integrator.hpp"
#include "dce/model.hpp"

namespace dce::cli {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

inline const std::vector<std::string>& valid_keys() {
    static const std::vector<std::string> keys = {
        "preset", "nu", "g", "omega0", "eps", "eps_rel", "eta0", "alpha", "gamma", "gamma_phi", "kappa",
        "dissipation_on", "n_fock", "rtol", "atol", "max_step", "initial_step", "t_final",
        "sample_stride", "frame", "snapshot_times", "checkpoint_interval", "output_dir", "workers"};
    return keys;
}

/// Keys a sweep may vary: physical parameters, truncation and integrator controls.
inline const std::vector<std::string>& sweepable_keys() {
    static const std::vector<std::string> keys = {
        "nu", "g", "omega0", "eps", "eps_rel", "eta0", "alpha", "gamma", "gamma_phi", "kappa",
        "n_fock", "rtol", "atol", "max_step", "initial_step", "t_final", "sample_stride", "frame"};
    return keys;
}

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"fig1", "fig2", "fig4", "fig5"};
    return names;
}

/// Parameter sets of the published figures. Rates are in units of nu.
inline KeyValues preset_values(const std::string& name) {
    // Two-photon regime near eta = 2 nu.
    KeyValues two_photon = {{"g", "0.05"},      {"omega0", "0.5"}, {"eps_rel", "0.08"},
                            {"eta0", "2.00655"}, {"alpha", "2e-8"}, {"gamma", "1e-6"},
                            {"gamma_phi", "1e-6"}, {"kappa", "1e-6"}, {"t_final", "30000"},
                            {"snapshot_times", "20000, 30000"}};
    // Four-photon regime near eta = 4 nu.
    KeyValues four_photon = {{"g", "0.15"},      {"omega0", "2.9"}, {"eps_rel", "0.08"},
                             {"eta0", "3.931"},  {"alpha", "8e-7"}, {"gamma", "1e-6"},
                             {"gamma_phi", "1e-6"}, {"kappa", "1e-6"}, {"t_final", "30000"},
                             {"snapshot_times", "20000, 30000"}};
    auto set = [](KeyValues& kv, const std::string& k, const std::string& v) {
        for (auto& [key, value] : kv)
            if (key == k) value = v;
    };
    if (name == "fig1") return two_photon;
    if (name == "fig2") {
        set(two_photon, "eta0", "2.00715");
        set(two_photon, "alpha", "-5e-8");
        return two_photon;
    }
    if (name == "fig4") return four_photon;
    if (name == "fig5") {
        set(four_photon, "alpha", "2e-6");
        return four_photon;
    }
    std::string msg = "unknown preset '" + name + "' (valid:";
    for (const auto& n : preset_names()) msg += " " + n;
    throw ConfigError(msg + ")");
}

struct RunConfig {
    SystemParams params; // eps resolved to an absolute amplitude
    std::optional<double> eps_rel;
    HilbertConfig hilbert;
    IntegratorConfig integrator;
    std::vector<double> snapshot_times;
    std::optional<std::string> preset;
    bool dissipation_on = true;
    double checkpoint_interval = 5000.0;
    std::string output_dir = "dce_out";
    int workers = 1;
    std::vector<std::string> warnings;

    /// Parameters actually integrated: all rates zero when dissipation is off.
    SystemParams effective_params() const {
        return dissipation_on ? params : params.without_dissipation();
    }
};

// ---------------------------------------------------------------- parsing

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

/// `key = value` lines; '#' starts a comment; blank lines ignored.
inline KeyValues parse_key_values(std::istream& is, const std::string& source = "<input>") {
    KeyValues kv;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
        for (const auto& [k, v] : kv)
            if (k == key) throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        kv.emplace_back(std::move(key), std::move(value));
    }
    return kv;
}

/// Parses "key=value" command-line overrides.
inline std::pair<std::string, std::string> parse_assignment(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + text + "'");
    return {trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
}

inline double parse_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const char* first = v.data();
    const char* last = v.data() + v.size();
    if (!v.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last || !std::isfinite(out))
        throw ConfigError("key '" + key + "': '" + v + "' is not a finite number");
    return out;
}

inline int parse_int(const std::string& key, const std::string& v) {
    const double d = parse_double(key, v);
    if (d != std::floor(d) || std::abs(d) > 1e9) throw ConfigError("key '" + key + "': '" + v + "' is not an integer");
    return static_cast<int>(d);
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    std::string s = v;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError("key '" + key + "': '" + v + "' is not a boolean");
}

inline Frame parse_frame(const std::string& v) {
    if (v == "lab") return Frame::lab;
    if (v == "rotating") return Frame::rotating;
    throw ConfigError("key 'frame': expected 'lab' or 'rotating', got '" + v + "'");
}

/// Comma- or whitespace-separated list of numbers.
inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::string item;
    std::istringstream ss(v);
    while (std::getline(ss, item, ',')) {
        std::istringstream ws(item);
        std::string tok;
        while (ws >> tok) out.push_back(parse_double(key, tok));
    }
    return out;
}

/// Shortest representation that round-trips.
inline std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
}

// -------------------------------------------------------------- resolving

inline bool is_valid_key(const std::string& key) {
    const auto& keys = valid_keys();
    return std::find(keys.begin(), keys.end(), key) != keys.end();
}

inline void require_known_keys(const KeyValues& kv, const std::string& source) {
    for (const auto& [k, v] : kv)
        if (!is_valid_key(k)) {
            std::string msg = source + ": unknown key '" + k + "'; valid keys:";
            for (const auto& key : valid_keys()) msg += " " + key;
            throw ConfigError(msg);
        }
}

/// Resolves file keys and command-line overrides (which win) into a
/// validated RunConfig. A preset supplies defaults for the physical keys;
/// explicit keys override it with a warning.
inline RunConfig resolve_config(const KeyValues& file, const KeyValues& overrides = {},
                                const std::string& source = "<config>") {
    require_known_keys(file, source);
    require_known_keys(overrides, "command line");
    std::map<std::string, std::string> explicit_keys;
    for (const auto& [k, v] : file) explicit_keys[k] = v;
    for (const auto& [k, v] : overrides) {
        if (k == "eps" || k == "eps_rel") explicit_keys.erase(k == "eps" ? "eps_rel" : "eps");
        explicit_keys[k] = v;
    }
    if (explicit_keys.count("eps") && explicit_keys.count("eps_rel"))
        throw ConfigError("both 'eps' and 'eps_rel' given; specify exactly one");

    RunConfig cfg;
    std::map<std::string, std::string> values;
    if (auto it = explicit_keys.find("preset"); it != explicit_keys.end()) {
        cfg.preset = it->second;
        for (const auto& [k, v] : preset_values(it->second)) values[k] = v;
        if (explicit_keys.count("eps")) values.erase("eps_rel");
        for (const auto& [k, v] : explicit_keys) {
            auto pv = values.find(k);
            if (pv != values.end() && pv->second != v)
                cfg.warnings.push_back("key '" + k + "' = " + v + " overrides preset " + it->second +
                                       " value " + pv->second);
        }
    }
    for (const auto& [k, v] : explicit_keys) values[k] = v;
    values.erase("preset");

    std::vector<std::string> missing;
    for (const char* k : {"g", "omega0", "eta0", "alpha", "gamma", "gamma_phi", "kappa", "t_final"})
        if (!values.count(k)) missing.emplace_back(k);
    if (!values.count("eps") && !values.count("eps_rel")) missing.emplace_back("eps | eps_rel");
    if (!missing.empty()) {
        std::string msg = "missing required keys:";
        for (const auto& k : missing) msg += " " + k;
        throw ConfigError(msg);
    }

    auto num = [&](const char* k) { return parse_double(k, values.at(k)); };
    auto has = [&](const char* k) { return values.count(k) > 0; };
    SystemParams& p = cfg.params;
    if (has("nu")) p.nu = num("nu");
    p.g = num("g");
    p.omega0 = num("omega0");
    p.eta0 = num("eta0");
    p.alpha = num("alpha");
    p.gamma = num("gamma");
    p.gamma_phi = num("gamma_phi");
    p.kappa = num("kappa");
    if (has("eps_rel")) {
        cfg.eps_rel = num("eps_rel");
        p.eps = *cfg.eps_rel * p.omega0;
    } else {
        p.eps = num("eps");
    }
    if (has("dissipation_on")) cfg.dissipation_on = parse_bool("dissipation_on", values.at("dissipation_on"));
    if (has("n_fock")) cfg.hilbert.n_fock = parse_int("n_fock", values.at("n_fock"));
    IntegratorConfig& ic = cfg.integrator;
    if (has("rtol")) ic.rtol = num("rtol");
    if (has("atol")) ic.atol = num("atol");
    if (has("max_step")) ic.max_step = num("max_step");
    if (has("initial_step")) ic.initial_step = num("initial_step");
    ic.t_final = num("t_final");
    if (has("sample_stride")) ic.sample_stride = num("sample_stride");
    if (has("frame")) ic.frame = parse_frame(values.at("frame"));
    if (has("snapshot_times")) cfg.snapshot_times = parse_list("snapshot_times", values.at("snapshot_times"));
    if (has("checkpoint_interval")) cfg.checkpoint_interval = num("checkpoint_interval");
    if (has("output_dir")) cfg.output_dir = values.at("output_dir");
    if (has("workers")) cfg.workers = parse_int("workers", values.at("workers"));

    try {
        for (auto& w : p.validate()) cfg.warnings.push_back(std::move(w));
        cfg.hilbert.validate();
        ic.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    for (double s : cfg.snapshot_times)
        if (s < 0.0) throw ConfigError("snapshot_times must be >= 0");
    if (cfg.checkpoint_interval < 0.0) throw ConfigError("checkpoint_interval must be >= 0 (0 disables)");
    if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
    if (cfg.output_dir.empty()) throw ConfigError("output_dir must not be empty");
    return cfg;
}

inline RunConfig load_config(const std::string& path, const KeyValues& overrides = {}) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file '" + path + "'");
    return resolve_config(parse_key_values(is, path), overrides, path);
}

/// Every key that determines the numerical result, in a fixed order, one
/// `key = value` line each. Parsing this text reproduces the configuration.
/// Output location and worker count are excluded.
inline std::string canonical_text(const RunConfig& c) {
    std::ostringstream os;
    auto line = [&](const char* k, const std::string& v) { os << k << " = " << v << "\n"; };
    const SystemParams& p = c.params;
    line("nu", format_double(p.nu));
    line("g", format_double(p.g));
    line("omega0", format_double(p.omega0));
    if (c.eps_rel) line("eps_rel", format_double(*c.eps_rel));
    else line("eps", format_double(p.eps));
    line("eta0", format_double(p.eta0));
    line("alpha", format_double(p.alpha));
    line("gamma", format_double(p.gamma));
    line("gamma_phi", format_double(p.gamma_phi));
    line("kappa", format_double(p.kappa));
    line("dissipation_on", c.dissipation_on ? "true" : "false");
    line("n_fock", std::to_string(c.hilbert.n_fock));
    const IntegratorConfig& ic = c.integrator;
    line("rtol", format_double(ic.rtol));
    line("atol", format_double(ic.atol));
    line("max_step", format_double(ic.max_step));
    line("initial_step", format_double(ic.initial_step));
    line("t_final", format_double(ic.t_final));
    line("sample_stride", format_double(ic.sample_stride));
    line("frame", to_string(ic.frame));
    std::string snaps;
    for (std::size_t i = 0; i < c.snapshot_times.size(); ++i)
        snaps += (i ? ", " : "") + format_double(c.snapshot_times[i]);
    line("snapshot_times", snaps);
    line("checkpoint_interval", format_double(c.checkpoint_interval));
    return os.str();
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t config_hash(const RunConfig& c) { return fnv1a(canonical_text(c)); }

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return s;
}

/// Re-resolves a configuration with one key replaced (used by sweeps and resume).
inline RunConfig with_override(const RunConfig& base, const std::string& key, const std::string& value) {
    std::istringstream is(canonical_text(base));
    KeyValues kv = parse_key_values(is, "<resolved>");
    RunConfig out = resolve_config(kv, {{key, value}}, "<resolved>");
    out.preset = base.preset;
    out.output_dir = base.output_dir;
    out.workers = base.workers;
    return out;
}

} // namespace dce::cli
