// commands.cpp - run drivers and CSV writers for the command-line tool

#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <locale>
#include <sstream>

#include "qdent/errors.hpp"
#include "qdent/parallel.hpp"

#ifndef QDENT_VERSION
#define QDENT_VERSION "unknown"
#endif

namespace qdent::app {

namespace {

struct PendingFile {
    std::string name;
    std::string contents;
};

std::ostringstream csv_stream()
{
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out << std::setprecision(10);
    return out;
}

void write_header(std::ostream& out, const std::vector<std::string>& header)
{
    for (const auto& line : header) out << line << '\n';
}

RunOutcome commit(const std::filesystem::path& out_dir, const std::vector<PendingFile>& files)
{
    std::filesystem::create_directories(out_dir);
    RunOutcome outcome;
    for (const auto& f : files) {
        const auto path = out_dir / f.name;
        std::ofstream out(path, std::ios::binary);
        out << f.contents;
        if (!out) throw std::runtime_error("failed to write " + path.string());
        outcome.files.push_back(path);
    }
    return outcome;
}

std::string pair_label(const std::pair<std::size_t, std::size_t>& p)
{
    return "C_" + std::to_string(p.first + 1) + "_" + std::to_string(p.second + 1);
}

void collect_warnings(const Trajectory& traj, const std::string& what, std::vector<std::string>& warnings)
{
    if (traj.diagnostics.truncation_warning) {
        std::ostringstream msg;
        msg << what << ": top plasmon level reached population " << traj.diagnostics.max_top_level_population
            << "; consider raising plasmon.n_levels";
        warnings.push_back(msg.str());
    }
}

std::string trajectory_csv(const Trajectory& traj, const std::vector<std::string>& header)
{
    auto out = csv_stream();
    write_trajectory_csv(out, traj, header);
    return out.str();
}

std::string simulate_summary(const Trajectory& traj, const Scenario& s, const std::vector<std::string>& header)
{
    auto out = csv_stream();
    write_header(out, header);
    out << "quantity,value\n";
    for (std::size_t k = 0; k < traj.pairs.size(); ++k) {
        double best = -1.0, t_best = 0.0;
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            const double t = traj.times[i];
            if (t < s.window_start_fs || t > s.window_end()) continue;
            if (traj.concurrence[i][k] > best) {
                best = traj.concurrence[i][k];
                t_best = t;
            }
        }
        const std::string label = pair_label(traj.pairs[k]);
        out << "max_" << label << ',' << std::max(best, 0.0) << '\n';
        out << "t_max_" << label << "_fs," << t_best << '\n';
        out << "final_" << label << ',' << traj.concurrence.back()[k] << '\n';
    }
    const auto cm = traj.max_concurrence(s.window_start_fs, s.window_end());
    out << "figure_of_merit," << figure_of_merit(cm) << '\n';
    for (std::size_t q = 0; q < traj.n_qd; ++q) out << "final_P_qd" << q + 1 << ',' << traj.qd_population.back()[q] << '\n';
    out << "final_plasmon_n," << traj.plasmon_mean.back() << '\n';
    out << "max_trace_error," << traj.diagnostics.max_trace_error << '\n';
    out << "max_hermiticity_residual," << traj.diagnostics.max_hermiticity_residual << '\n';
    out << "max_top_level_population," << traj.diagnostics.max_top_level_population << '\n';
    out << "accepted_steps," << traj.diagnostics.accepted_steps << '\n';
    out << "rejected_steps," << traj.diagnostics.rejected_steps << '\n';
    return out.str();
}

} // namespace

std::vector<std::string> provenance_header(const RunConfig& rc)
{
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(rc.config_hash));
    return {std::string("# qdent ") + QDENT_VERSION, "# command: " + command_name(rc.command),
            std::string("# config_hash: fnv1a64:") + hash, "# seed: " + std::to_string(rc.seed)};
}

RunOutcome run(const RunConfig& rc, const std::filesystem::path& out_dir)
{
    switch (rc.command) {
    case Command::Simulate: return run_simulate(rc, out_dir);
    case Command::Sweep: return run_sweep(rc, out_dir);
    case Command::Optimize: return run_optimize(rc, out_dir);
    case Command::Analytic: return run_analytic(rc, out_dir);
    }
    throw ConfigError("unknown command");
}

RunOutcome run_simulate(const RunConfig& rc, const std::filesystem::path& out_dir)
{
    const auto header = provenance_header(rc);
    const Trajectory traj = simulate(rc.scenario);
    std::vector<std::string> warnings;
    collect_warnings(traj, "simulate", warnings);
    RunOutcome outcome = commit(out_dir, {{"trajectory.csv", trajectory_csv(traj, header)},
                                          {"summary.csv", simulate_summary(traj, rc.scenario, header)}});
    outcome.warnings = std::move(warnings);
    return outcome;
}

RunOutcome run_sweep(const RunConfig& rc, const std::filesystem::path& out_dir)
{
    const auto header = provenance_header(rc);
    const std::size_t n1 = rc.axes.at(0).steps;
    const std::size_t n2 = rc.axes.size() > 1 ? rc.axes[1].steps : 1;
    const std::size_t n_qd = rc.scenario.system.n_qd();
    const auto pairs = qd_pairs(n_qd);

    struct Row {
        std::vector<double> coords;
        ConcurrenceMatrix cmax;
        double max_plasmon{0.0};
        std::vector<double> final_pop;
        bool truncated{false};
    };
    std::vector<Row> rows(n1 * n2);
    parallel_for(rows.size(), rc.threads, [&](std::size_t idx) {
        Scenario s = rc.scenario;
        Row& row = rows[idx];
        const std::size_t index[2] = {idx / n2, idx % n2};
        for (std::size_t a = 0; a < rc.axes.size(); ++a) {
            const double v = rc.axes[a].value(index[a]);
            row.coords.push_back(v);
            apply_parameter(s.system, s.pulse, rc.axes[a].param, v);
        }
        s.integrator.keep_final_state = false;
        PropagationOptions options;
        options.use_default_observables = false;
        const Trajectory traj = simulate(s, options);
        row.cmax = traj.max_concurrence(s.window_start_fs, s.window_end());
        for (double n : traj.plasmon_mean) row.max_plasmon = std::max(row.max_plasmon, n);
        row.final_pop = traj.qd_population.back();
        row.truncated = traj.diagnostics.truncation_warning;
    });

    auto out = csv_stream();
    write_header(out, header);
    for (const auto& a : rc.axes) out << a.param << ',';
    out << "fom";
    for (const auto& p : pairs) out << ",max_" << pair_label(p);
    out << ",max_plasmon_n";
    for (std::size_t q = 0; q < n_qd; ++q) out << ",final_P_qd" << q + 1;
    out << '\n';
    std::size_t truncated = 0;
    for (const auto& row : rows) {
        for (double c : row.coords) out << c << ',';
        out << figure_of_merit(row.cmax);
        for (const auto& [i, j] : pairs) out << ',' << row.cmax(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        out << ',' << row.max_plasmon;
        for (double p : row.final_pop) out << ',' << p;
        out << '\n';
        truncated += row.truncated ? 1 : 0;
    }
    RunOutcome outcome = commit(out_dir, {{"sweep.csv", out.str()}});
    if (truncated > 0) {
        outcome.warnings.push_back("sweep: " + std::to_string(truncated) +
                                   " grid points populated the top plasmon level; consider raising plasmon.n_levels");
    }
    return outcome;
}

RunOutcome run_optimize(const RunConfig& rc, const std::filesystem::path& out_dir)
{
    const auto header = provenance_header(rc);
    const Bounds& bounds = rc.optimize.bounds;
    const EntanglementObjective objective(rc.scenario, bounds.names());
    const MultistartResult result = multistart(objective.as_function(), bounds, rc.optimize.multistart);

    std::vector<PendingFile> files;
    auto log = csv_stream();
    write_optimizer_log(log, result.log, bounds.names(), header);
    files.push_back({"optimizer_log.csv", log.str()});

    const auto pairs = qd_pairs(rc.scenario.system.n_qd());
    auto optima = csv_stream();
    write_header(optima, header);
    optima << "rank,cluster_id";
    for (const auto& n : bounds.names()) optima << ',' << n;
    optima << ",objective";
    for (const auto& p : pairs) optima << ",max_" << pair_label(p);
    optima << ",summed_concurrence,evaluations,converged\n";

    std::vector<std::string> warnings;
    for (std::size_t r = 0; r < result.optima.size(); ++r) {
        const auto& opt = result.optima[r];
        optima << r + 1 << ',' << opt.cluster_id;
        for (Eigen::Index k = 0; k < opt.point.params.size(); ++k) optima << ',' << opt.point.params(k);
        optima << ',' << opt.point.objective;
        double summed = 0.0;
        for (Eigen::Index k = 0; k < opt.point.residuals.size(); ++k) {
            const double c = 1.0 - opt.point.residuals(k);
            summed += c;
            optima << ',' << c;
        }
        optima << ',' << summed << ',' << opt.evaluations << ',' << (opt.converged ? 1 : 0) << '\n';

        if (r < rc.optimize.report && !opt.point.failed) {
            const Scenario s = objective.scenario_at(opt.point.params);
            const Trajectory traj = simulate(s);
            collect_warnings(traj, "optimum " + std::to_string(r + 1), warnings);
            files.push_back({"optimum_" + std::to_string(r + 1) + "_trajectory.csv", trajectory_csv(traj, header)});
        }
    }
    files.insert(files.begin() + 1, {"optima.csv", optima.str()});
    RunOutcome outcome = commit(out_dir, files);
    outcome.warnings = std::move(warnings);
    return outcome;
}

RunOutcome run_analytic(const RunConfig& rc, const std::filesystem::path& out_dir)
{
    const auto header = provenance_header(rc);
    const auto& a = rc.analytic;
    auto out = csv_stream();
    write_header(out, header);
    if (a.mode == AnalyticSettings::Mode::Contour) {
        const auto grid = ndark_contour(a.ratio_min, a.ratio_max, a.steps, rc.threads);
        out << "ratio2,ratio3,fom,C12,C13,C23\n";
        for (const auto& p : grid) {
            out << p.ratio2 << ',' << p.ratio3 << ',' << p.fom << ',' << p.c12 << ',' << p.c13 << ',' << p.c23 << '\n';
        }
        return commit(out_dir, {{"contour.csv", out.str()}});
    }
    std::vector<OptimalRatio> rows(a.n_values.size());
    parallel_for(rows.size(), rc.threads, [&](std::size_t k) { rows[k] = ndark_optimal_ratio(a.n_values[k]); });
    out << "n,x_star,c_maj,c_min,fom\n";
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out << a.n_values[k] << ',' << rows[k].x_star << ',' << rows[k].c_major << ',' << rows[k].c_minor << ','
            << rows[k].fom << '\n';
    }
    return commit(out_dir, {{"scaling.csv", out.str()}});
}

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const ConfigError*>(&e)) return 2;
    if (dynamic_cast<const NumericalError*>(&e)) return 3;
    return 1;
}

} // namespace qdent::app
