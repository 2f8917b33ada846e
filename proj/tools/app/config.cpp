// config.cpp - key = value parsing and run configuration assembly

#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "qdent/errors.hpp"

namespace qdent::app {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(const std::string& text, const std::string& key)
{
    double value = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw ConfigError("config key '" + key + "': '" + text + "' is not a finite number");
    }
    return value;
}

std::vector<std::string> split_commas(const std::string& text)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(trim(item));
    return parts;
}

} // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& source)
{
    KeyValueConfig cfg;
    cfg.source_ = source;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = source + ":" + std::to_string(number);
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": empty key");
        if (value.empty()) throw ConfigError(where + ": key '" + key + "' has no value");
        if (!cfg.values_.emplace(key, value).second) throw ConfigError(where + ": duplicate key '" + key + "'");
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    return parse(in, path.string());
}

std::optional<std::string> KeyValueConfig::text(const std::string& key) const
{
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    used_.insert(key);
    return it->second;
}

std::optional<double> KeyValueConfig::number(const std::string& key) const
{
    const auto t = text(key);
    if (!t) return std::nullopt;
    return to_double(*t, key);
}

std::optional<std::int64_t> KeyValueConfig::integer(const std::string& key) const
{
    const auto t = text(key);
    if (!t) return std::nullopt;
    std::int64_t value = 0;
    const char* end = t->data() + t->size();
    const auto [ptr, ec] = std::from_chars(t->data(), end, value);
    if (ec != std::errc() || ptr != end) throw ConfigError("config key '" + key + "': '" + *t + "' is not an integer");
    return value;
}

std::optional<bool> KeyValueConfig::flag(const std::string& key) const
{
    const auto t = text(key);
    if (!t) return std::nullopt;
    if (*t == "true" || *t == "1" || *t == "yes" || *t == "on") return true;
    if (*t == "false" || *t == "0" || *t == "no" || *t == "off") return false;
    throw ConfigError("config key '" + key + "': '" + *t + "' is not a boolean");
}

std::vector<double> KeyValueConfig::numbers(const std::string& key) const
{
    const auto t = text(key);
    std::vector<double> out;
    if (!t) return out;
    for (const auto& part : split_commas(*t)) out.push_back(to_double(part, key));
    return out;
}

std::vector<std::string> KeyValueConfig::keys_with_prefix(const std::string& prefix) const
{
    std::vector<std::string> keys;
    for (auto it = values_.lower_bound(prefix); it != values_.end() && it->first.starts_with(prefix); ++it) {
        keys.push_back(it->first);
        used_.insert(it->first);
    }
    return keys;
}

void KeyValueConfig::reject_unused() const
{
    for (const auto& [key, value] : values_) {
        if (!used_.count(key)) throw ConfigError(source_ + ": unknown or unused key '" + key + "'");
    }
}

std::uint64_t KeyValueConfig::hash() const
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& [key, value] : values_) mix(key + "=" + value + "\n");
    return h;
}

Command parse_command(const std::string& name)
{
    if (name == "simulate") return Command::Simulate;
    if (name == "sweep") return Command::Sweep;
    if (name == "optimize") return Command::Optimize;
    if (name == "analytic") return Command::Analytic;
    throw ConfigError("unknown command '" + name + "'");
}

std::string command_name(Command command)
{
    switch (command) {
    case Command::Simulate: return "simulate";
    case Command::Sweep: return "sweep";
    case Command::Optimize: return "optimize";
    case Command::Analytic: return "analytic";
    }
    return "unknown";
}

double SweepAxis::value(std::size_t k) const
{
    if (steps <= 1) return min;
    return min + (max - min) * static_cast<double>(k) / static_cast<double>(steps - 1);
}

namespace {

std::size_t positive_count(const KeyValueConfig& kv, const std::string& key, std::size_t fallback, bool allow_zero)
{
    const auto v = kv.integer(key);
    if (!v) return fallback;
    if (*v < 0 || (*v == 0 && !allow_zero)) {
        throw ConfigError("config key '" + key + "' must be " + (allow_zero ? ">= 0" : ">= 1"));
    }
    return static_cast<std::size_t>(*v);
}

void read_analytic(const KeyValueConfig& kv, AnalyticSettings& a)
{
    const auto mode = kv.text("analytic.mode");
    if (!mode) throw ConfigError("analytic runs need analytic.mode (analytic-dark or scaling)");
    if (*mode == "analytic-dark" || *mode == "contour") {
        a.mode = AnalyticSettings::Mode::Contour;
    } else if (*mode == "scaling") {
        a.mode = AnalyticSettings::Mode::Scaling;
    } else {
        throw ConfigError("analytic.mode must be analytic-dark or scaling, got '" + *mode + "'");
    }
    a.ratio_min = kv.number("analytic.ratio_min").value_or(a.ratio_min);
    a.ratio_max = kv.number("analytic.ratio_max").value_or(a.ratio_max);
    a.steps = positive_count(kv, "analytic.steps", a.steps, false);
    if (!(a.ratio_min > 0.0) || !(a.ratio_max >= a.ratio_min)) {
        throw ConfigError("analytic ratios need 0 < ratio_min <= ratio_max");
    }
    const auto ns = kv.numbers("analytic.n_values");
    if (!ns.empty()) {
        a.n_values.clear();
        for (double n : ns) {
            if (n < 2.0 || n != std::floor(n) || n > 2000.0) {
                throw ConfigError("analytic.n_values entries must be integers in [2, 2000]");
            }
            a.n_values.push_back(static_cast<std::size_t>(n));
        }
    }
}

void read_system(const KeyValueConfig& kv, Scenario& s)
{
    const auto n_qd = kv.integer("system.n_qd");
    if (!n_qd) throw ConfigError("config needs system.n_qd");
    if (*n_qd < 1 || *n_qd > 12) throw ConfigError("system.n_qd must be in [1, 12]");
    s.system = SystemSpec{};
    s.system.qds.assign(static_cast<std::size_t>(*n_qd), QDParams{});

    std::vector<std::string> ordered;
    if (kv.has("system.eps_med")) ordered.push_back("system.eps_med");
    for (const auto& k : kv.keys_with_prefix("plasmon.")) ordered.push_back(k);
    for (const auto& k : kv.keys_with_prefix("qd.all.")) ordered.push_back(k);
    for (const auto& k : kv.keys_with_prefix("qd.")) {
        if (!k.starts_with("qd.all.")) ordered.push_back(k);
    }
    for (const auto& k : kv.keys_with_prefix("pulse.")) ordered.push_back(k);
    for (const auto& k : ordered) apply_parameter(s.system, s.pulse, k, *kv.number(k));

    const std::string kind = kv.text("initial.kind").value_or(s.pulse ? "ground" : "single_qd");
    const auto qd = kv.integer("initial.qd").value_or(1);
    if (qd < 1 || static_cast<std::size_t>(qd) > s.system.n_qd()) {
        throw ConfigError("initial.qd must be in [1, system.n_qd]");
    }
    switch (parse_initial_kind(kind)) {
    case InitialState::Kind::AllGround: s.initial = InitialState::ground(); break;
    case InitialState::Kind::SingleQdExcited:
        s.initial = InitialState::single_qd_excited(static_cast<std::size_t>(qd - 1));
        break;
    case InitialState::Kind::CustomKet: throw ConfigError("initial.kind = custom is only available from the library");
    }

    auto& integ = s.integrator;
    if (const auto m = kv.text("integrator.method")) integ.method = parse_integrator_method(*m);
    integ.rtol = kv.number("integrator.rtol").value_or(integ.rtol);
    integ.atol = kv.number("integrator.atol").value_or(integ.atol);
    integ.stride_fs = kv.number("integrator.stride_fs").value_or(integ.stride_fs);
    integ.t_start_fs = kv.number("integrator.t_start_fs").value_or(integ.t_start_fs);
    integ.t_end_fs = kv.number("integrator.t_end_fs").value_or(integ.t_end_fs);
    integ.max_step_fs = kv.number("integrator.max_step_fs").value_or(integ.max_step_fs);
    integ.fixed_step_fs = kv.number("integrator.fixed_step_fs").value_or(integ.fixed_step_fs);
    integ.dense_limit = positive_count(kv, "integrator.dense_limit", integ.dense_limit, false);
    integ.check_positivity = kv.flag("integrator.check_positivity").value_or(integ.check_positivity);
    integ.truncation_tolerance = kv.number("integrator.truncation_tolerance").value_or(integ.truncation_tolerance);
    s.window_start_fs = kv.number("window.start_fs").value_or(integ.t_start_fs);
    s.window_end_fs = kv.number("window.end_fs");
    s.after_pulse_fs = kv.number("window.after_pulse_fs");
    if (s.after_pulse_fs && !(*s.after_pulse_fs > 0.0)) throw ConfigError("window.after_pulse_fs must be > 0");

    s.system.validate();
    if (s.pulse) s.pulse->validate();
    integ.validate();
    if (s.window_end() < s.window_start_fs) throw ConfigError("window.end_fs precedes window.start_fs");
}

void read_sweep(const KeyValueConfig& kv, RunConfig& rc)
{
    for (int axis = 1; axis <= 3; ++axis) {
        const std::string prefix = "sweep.axis" + std::to_string(axis) + ".";
        const auto param = kv.text(prefix + "param");
        if (!param) continue;
        if (axis == 3) throw ConfigError("sweeps support at most two axes");
        SweepAxis a;
        a.param = *param;
        const auto lo = kv.number(prefix + "min");
        const auto hi = kv.number(prefix + "max");
        if (!lo || !hi) throw ConfigError(prefix + "min and " + prefix + "max are required");
        a.min = *lo;
        a.max = *hi;
        a.steps = positive_count(kv, prefix + "steps", 11, false);
        SystemSpec probe = rc.scenario.system;
        auto pulse = rc.scenario.pulse;
        apply_parameter(probe, pulse, a.param, a.min);
        rc.axes.push_back(a);
    }
    if (rc.axes.empty()) throw ConfigError("sweep runs need sweep.axis1.param, min, max and steps");
}

void read_optimize(const KeyValueConfig& kv, RunConfig& rc)
{
    const std::size_t n_qd = rc.scenario.system.n_qd();
    if (n_qd < 2) throw ConfigError("optimize runs need system.n_qd >= 2");

    Bounds bounds;
    const auto bound_keys = kv.keys_with_prefix("optimize.bound.");
    if (bound_keys.empty()) {
        bounds = Bounds::physical_defaults(n_qd);
    } else {
        for (const auto& key : bound_keys) {
            const auto range = kv.numbers(key);
            if (range.size() != 2) throw ConfigError("config key '" + key + "' needs 'lower, upper'");
            bounds.add(key.substr(std::string("optimize.bound.").size()), range[0], range[1]);
        }
    }
    for (const auto& key : kv.keys_with_prefix("optimize.fixed.")) {
        const std::string name = key.substr(std::string("optimize.fixed.").size());
        const double value = *kv.number(key);
        const bool known = std::ranges::any_of(bounds.params(), [&](const auto& p) { return p.name == name; });
        if (!known) bounds.add(name, value, value);
        bounds.fix(name, value);
    }
    bounds.validate();
    EntanglementObjective check(rc.scenario, bounds.names());
    if (!rc.scenario.pulse) {
        for (const auto& name : bounds.names()) {
            if (name.starts_with("pulse.")) throw ConfigError("optimizing '" + name + "' needs a pulse.* section");
        }
    }

    auto& ms = rc.optimize.multistart;
    ms.samples = positive_count(kv, "optimize.samples", ms.samples, false);
    ms.cluster_radius = kv.number("optimize.radius").value_or(ms.cluster_radius);
    ms.local.max_evaluations = positive_count(kv, "optimize.local_budget", ms.local.max_evaluations, true);
    ms.max_local_runs = positive_count(kv, "optimize.max_local_runs", ms.max_local_runs, true);
    ms.dedupe_distance = kv.number("optimize.dedupe").value_or(ms.dedupe_distance);
    rc.optimize.report = positive_count(kv, "optimize.report", rc.optimize.report, true);
    ms.validate();
    rc.optimize.bounds = std::move(bounds);
}

} // namespace

RunConfig build_run_config(const KeyValueConfig& kv, Command command)
{
    if (kv.empty()) throw ConfigError("config file is empty");
    RunConfig rc;
    rc.command = command;
    rc.config_hash = kv.hash();
    if (const auto seed = kv.integer("seed")) {
        if (*seed < 0) throw ConfigError("seed must be >= 0");
        rc.seed = static_cast<std::uint64_t>(*seed);
    }
    if (const auto threads = kv.integer("threads")) {
        if (*threads < 0 || *threads > 1024) throw ConfigError("threads must be in [0, 1024]");
        rc.threads = static_cast<unsigned>(*threads);
    }

    if (command == Command::Analytic) {
        read_analytic(kv, rc.analytic);
    } else {
        read_system(kv, rc.scenario);
        if (command == Command::Sweep) read_sweep(kv, rc);
        if (command == Command::Optimize) read_optimize(kv, rc);
    }
    kv.reject_unused();
    rc.optimize.multistart.seed = rc.seed;
    rc.optimize.multistart.threads = rc.threads;
    return rc;
}

} // namespace qdent::app
