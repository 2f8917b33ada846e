// multistart.cpp - sample, cluster, solve locally from the best basins

#include <algorithm>
#include <iomanip>
#include <locale>
#include <numeric>
#include <ostream>

#include "qdent/errors.hpp"
#include "qdent/optimizer.hpp"
#include "qdent/parallel.hpp"

namespace qdent {

void MultistartConfig::validate() const
{
    if (samples == 0) throw ConfigError("multistart needs at least one sample");
    if (!(cluster_radius >= 0.0)) throw ConfigError("clustering radius must be >= 0");
    if (!(dedupe_distance >= 0.0)) throw ConfigError("deduplication distance must be >= 0");
    local.validate();
}

MultistartResult multistart(const ResidualFunction& fn, const Bounds& bounds, const MultistartConfig& config)
{
    bounds.validate();
    config.validate();

    MultistartResult result;
    const auto starts = sample_uniform(bounds, config.samples, config.seed);
    result.samples.resize(starts.size());
    parallel_for(starts.size(), config.threads, [&](std::size_t k) {
        result.samples[k] = evaluate_point(fn, bounds, bounds.to_unit(starts[k]));
        result.samples[k].eval_id = k;
    });
    result.clusters = cluster_basins(result.samples, config.cluster_radius);

    std::size_t runs = result.clusters.clusters.size();
    if (config.max_local_runs > 0) runs = std::min(runs, config.max_local_runs);
    std::vector<LocalResult> locals(runs);
    parallel_for(runs, config.threads, [&](std::size_t c) {
        const EvaluatedPoint& start = result.samples[result.clusters.clusters[c].best];
        locals[c] = solve_least_squares(fn, start, bounds, config.local);
    });

    for (const auto& s : result.samples) {
        result.log.push_back({s.eval_id, s.params, s.residuals, s.objective, s.failed, "sample",
                              result.clusters.assignment[s.eval_id]});
    }
    std::size_t next_id = result.samples.size();
    for (std::size_t c = 0; c < runs; ++c) {
        for (const auto& h : locals[c].history) {
            result.log.push_back({next_id++, h.params, h.residuals, h.objective, h.failed, "local", c});
        }
        LocalOptimum opt;
        opt.point = locals[c].best;
        opt.cluster_id = c;
        opt.evaluations = locals[c].evaluations;
        opt.converged = locals[c].converged;
        result.optima.push_back(std::move(opt));
    }

    std::stable_sort(result.optima.begin(), result.optima.end(), [](const LocalOptimum& a, const LocalOptimum& b) {
        return a.point.objective < b.point.objective;
    });
    std::vector<LocalOptimum> unique;
    for (auto& opt : result.optima) {
        const bool duplicate = std::any_of(unique.begin(), unique.end(), [&](const LocalOptimum& kept) {
            return (kept.point.scaled - opt.point.scaled).norm() < config.dedupe_distance;
        });
        if (!duplicate) unique.push_back(std::move(opt));
    }
    result.optima = std::move(unique);
    return result;
}

void write_optimizer_log(std::ostream& out, const std::vector<LogEntry>& log, const std::vector<std::string>& names,
                         const std::vector<std::string>& header_lines)
{
    const std::locale saved = out.imbue(std::locale::classic());
    const auto saved_precision = out.precision(12);

    Eigen::Index n_res = 0;
    for (const auto& e : log) n_res = std::max(n_res, e.residuals.size());

    for (const auto& line : header_lines) out << (line.starts_with("#") ? "" : "# ") << line << '\n';
    out << "eval_id";
    for (const auto& n : names) out << ',' << n;
    for (Eigen::Index r = 0; r < n_res; ++r) out << ",r" << r + 1;
    out << ",objective,phase,cluster_id\n";
    for (const auto& e : log) {
        out << e.eval_id;
        for (Eigen::Index k = 0; k < e.params.size(); ++k) out << ',' << e.params(k);
        for (Eigen::Index r = 0; r < n_res; ++r) {
            out << ',';
            if (!e.failed && r < e.residuals.size()) out << e.residuals(r);
        }
        out << ',';
        if (e.failed) {
            out << "nan";
        } else {
            out << e.objective;
        }
        out << ',' << e.phase << ',';
        if (e.cluster_id == npos) {
            out << -1;
        } else {
            out << e.cluster_id;
        }
        out << '\n';
    }
    out.precision(saved_precision);
    out.imbue(saved);
}

} // namespace qdent
