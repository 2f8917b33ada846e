// config.hpp - flat key = value run configuration

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qdent/analytic.hpp"
#include "qdent/optimizer.hpp"
#include "qdent/scenario.hpp"

namespace qdent::app {

/// Parsed `key = value` lines. '#' starts a comment, blank lines are ignored,
/// keys are case-sensitive and may appear once.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::istream& in, const std::string& source = "<config>");
    static KeyValueConfig load(const std::filesystem::path& path);

    bool empty() const { return values_.empty(); }
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& values() const { return values_; }

    /// Typed getters mark the key as used; a present but malformed value throws ConfigError.
    std::optional<std::string> text(const std::string& key) const;
    std::optional<double> number(const std::string& key) const;
    std::optional<std::int64_t> integer(const std::string& key) const;
    std::optional<bool> flag(const std::string& key) const;
    std::vector<double> numbers(const std::string& key) const;  // comma separated

    /// Keys starting with prefix, in sorted order; marks them used.
    std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

    /// Throws ConfigError naming the first key no getter asked for.
    void reject_unused() const;

    /// 64-bit FNV-1a of the canonical "key=value\n" listing.
    std::uint64_t hash() const;

private:
    std::string source_;
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> used_;
};

enum class Command { Simulate, Sweep, Optimize, Analytic };

Command parse_command(const std::string& name);
std::string command_name(Command command);

struct SweepAxis {
    std::string param;
    double min{0.0};
    double max{0.0};
    std::size_t steps{1};

    double value(std::size_t k) const;
};

struct AnalyticSettings {
    enum class Mode { Contour, Scaling };
    Mode mode{Mode::Contour};
    double ratio_min{0.5};
    double ratio_max{2.0};
    std::size_t steps{151};
    std::vector<std::size_t> n_values{2, 3, 4, 5, 10, 20, 50, 100, 150};
};

struct OptimizeSettings {
    Bounds bounds;
    MultistartConfig multistart;
    std::size_t report{3};  // optima re-simulated with full trajectories
};

struct RunConfig {
    Command command{Command::Simulate};
    Scenario scenario;
    std::vector<SweepAxis> axes;
    OptimizeSettings optimize;
    AnalyticSettings analytic;
    std::uint64_t seed{1};
    unsigned threads{0};
    std::uint64_t config_hash{0};
};

/// Validates the keys relevant to `command` and builds the run. Unknown or
/// unused keys are rejected so typos surface as config errors.
RunConfig build_run_config(const KeyValueConfig& kv, Command command);

} // namespace qdent::app
