// acceptance.cpp - end-to-end acceptance checks, one PASS/FAIL line per criterion
//
// Usage: qdent_acceptance [--long] [criterion numbers...]
// Without numbers every criterion runs. The multistart part of criterion 12
// takes hours on one core and only runs with --long; without it the line
// reports SKIP for that part. The exit code is non-zero if any line FAILs.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qdent/analytic.hpp"
#include "qdent/dynamics.hpp"
#include "qdent/entanglement.hpp"
#include "qdent/optimizer.hpp"
#include "qdent/scenario.hpp"
#include "qdent/units.hpp"

using namespace qdent;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
    Status status{Status::Fail};
    std::string detail;
};

Outcome verdict(bool ok, std::string detail) { return {ok ? Status::Pass : Status::Fail, std::move(detail)}; }

std::string fmt(const char* format, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

// Diagnostics of every master-equation run, inspected by criterion 10.
struct RecordedRun {
    std::string name;
    TrajectoryDiagnostics diag;
};
std::vector<RecordedRun> g_runs;

IntegratorConfig checked_integrator(double t_end, double stride = 1.0)
{
    IntegratorConfig c;
    c.t_end_fs = t_end;
    c.stride_fs = stride;
    c.check_positivity = true;
    return c;
}

Trajectory run_recorded(const std::string& name, const DenseMatrix& rho0, const Model& model,
                        const std::optional<PulseSpec>& pulse, const IntegratorConfig& cfg,
                        const PropagationOptions& opts = {})
{
    Trajectory tr = cfg.method == IntegratorConfig::Method::ExpmOracle
                        ? propagate_expm_oracle(rho0, model, pulse, cfg, opts)
                        : propagate(rho0, model, pulse, cfg, opts);
    g_runs.push_back({name, tr.diagnostics});
    return tr;
}

// ---------------------------------------------------------------------------

Outcome criterion_1()
{
    const double target = 3.0 * std::sqrt(3.0) / 8.0;
    double worst = 0.0;
    double lo = 1.0, hi = 0.0;
    for (double gamma_s : {10.0, 100.0, 300.0}) {
        for (double g1 : {5.0, 12.5, 25.0}) {
            const double c = three_state_asymptotic(ThreeStateModel::from_gamma(g1, std::sqrt(3.0) * g1, gamma_s)).concurrence;
            worst = std::max(worst, std::abs(c - 0.6495));
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
    }
    return verdict(worst <= 5e-4 && hi - lo < 1e-12,
                   fmt("C(inf) in [%.6f, %.6f] over 9 (gamma_s, g1) pairs, closed form %.6f", lo, hi, target));
}

Outcome criterion_2()
{
    const double analytic = three_state_asymptotic(ThreeStateModel::from_gamma(15.0, 15.0, 100.0)).concurrence;
    const double dark = ndark_asymptotic(ndark_build({15.0, 15.0}, 100.0)).concurrence(0, 1);

    const SystemSpec spec = make_system({15.0, 15.0}, 100.0, 0.0, 3);
    const Model model(spec);
    const Trajectory tr = run_recorded("symmetric dark", initial_state(InitialState::single_qd_excited(0), spec),
                                       model, std::nullopt, checked_integrator(600.0));
    const double steady = tr.concurrence.back()[0];
    const bool ok = std::abs(analytic - 0.5) <= 1e-3 && std::abs(dark - 0.5) <= 1e-3 && std::abs(steady - 0.5) <= 1e-3;
    return verdict(ok, fmt("three-state %.6f, N-dark %.6f, master equation at 600 fs %.6f", analytic, dark, steady));
}

Outcome criterion_3()
{
    const double g1 = 12.5, g2 = 12.5 * std::sqrt(3.0), gamma_s = 100.0;
    const SystemSpec spec = make_system({g1, g2}, gamma_s, 0.0, 3);
    const Model model(spec);
    const Trajectory tr = run_recorded("dark sqrt3", initial_state(InitialState::single_qd_excited(0), spec), model,
                                       std::nullopt, checked_integrator(800.0, 0.5));
    const double c_inf = three_state_asymptotic(ThreeStateModel::from_gamma(g1, g2, gamma_s)).concurrence;
    const double steady = tr.concurrence.back()[0];

    const ThreeStateModel m = ThreeStateModel::from_gamma(g1, g2, gamma_s);
    const auto s0 = tr.observable_series("obs_S0");
    const auto a0 = tr.observable_series("obs_A0");
    const auto vac = tr.observable_series("obs_vac1");
    double dev = 0.0;
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        const ThreeStateAmplitudes a = three_state_evolve(m, ThreeStateAmplitudes::qd1_excited(), tr.times[k]);
        dev = std::max({dev, std::abs(s0[k] - std::norm(a.aS)), std::abs(a0[k] - std::norm(a.aA)),
                        std::abs(vac[k] - std::norm(a.a0))});
    }
    return verdict(std::abs(steady - c_inf) <= 0.01 && dev <= 1e-4,
                   fmt("C(800 fs) = %.6f vs %.6f; max population deviation %.2e over %zu samples", steady, c_inf, dev,
                       tr.times.size()));
}

// First local maximum of a sampled series, or npos.
std::size_t first_peak(const std::vector<double>& v)
{
    for (std::size_t k = 1; k + 1 < v.size(); ++k) {
        if (v[k] >= v[k - 1] && v[k] > v[k + 1] && v[k] > 0.5) return k;
    }
    return npos;
}

Outcome criterion_4()
{
    const double g2 = 25.0;
    auto run = [&](double ratio, const char* name) {
        const SystemSpec spec = make_system({ratio * g2, g2}, 0.0, 0.0, 3);
        return run_recorded(name, initial_state(InitialState::single_qd_excited(0), spec), Model(spec), std::nullopt,
                            checked_integrator(300.0, 0.02));
    };
    const Trajectory minus = run(std::sqrt(2.0) - 1.0, "lossless sqrt2-1");
    const auto pa = minus.observable_series("obs_A0");
    const std::size_t ka = first_peak(pa);
    const Trajectory plus = run(std::sqrt(2.0) + 1.0, "lossless sqrt2+1");
    const auto ps = plus.observable_series("obs_S0");
    const std::size_t ks = first_peak(ps);
    if (ka == npos || ks == npos) return verdict(false, "no population maximum found");
    const double c = minus.concurrence[ka][0];
    return verdict(pa[ka] >= 0.999 && c >= 0.99 && ps[ks] >= 0.999,
                   fmt("P_A = %.6f and C = %.6f at t = %.2f fs; P_S = %.6f at t = %.2f fs", pa[ka], c, minus.times[ka],
                       ps[ks], plus.times[ks]));
}

Outcome criterion_5()
{
    const double g1 = 12.5, g2 = 25.0;
    const SystemSpec spec = make_system({g1, g2}, 0.0, 0.0, 3);
    const Model model(spec);
    IntegratorConfig cfg = checked_integrator(30.0, 0.25);
    cfg.rtol = 1e-12;
    cfg.atol = 1e-14;
    cfg.keep_states = true;
    const Trajectory tr = run_recorded("short time", initial_state(InitialState::single_qd_excited(0), spec), model,
                                       std::nullopt, cfg);
    const BasisMap& b = model.basis;
    const auto r = static_cast<Eigen::Index>(b.index(1, 0));
    std::vector<double> log_t, log_e;
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        const double t = tr.times[k];
        if (t < 1.0) continue;
        const DenseMatrix& rho = tr.states[k];
        // amplitudes with the QD1 amplitude's phase removed; the plasmon sign follows the analytic gauge
        const double norm = std::sqrt(rho(r, r).real());
        const cplx b1 = rho(r, r) / norm;
        const cplx b2 = rho(static_cast<Eigen::Index>(b.index(2, 0)), r) / norm;
        const cplx p = -rho(static_cast<Eigen::Index>(b.index(0, 1)), r) / norm;
        const ThreeStateAmplitudes approx = short_time_amplitudes(g1, g2, t);
        const double err = std::sqrt(std::norm(p - approx.a0) + std::norm((b1 + b2) / std::sqrt(2.0) - approx.aS) +
                                     std::norm((b1 - b2) / std::sqrt(2.0) - approx.aA));
        log_t.push_back(std::log(t));
        log_e.push_back(std::log(err));
    }
    const auto n = static_cast<double>(log_t.size());
    double st = 0, se = 0, stt = 0, ste = 0;
    for (std::size_t k = 0; k < log_t.size(); ++k) {
        st += log_t[k];
        se += log_e[k];
        stt += log_t[k] * log_t[k];
        ste += log_t[k] * log_e[k];
    }
    const double slope = (n * ste - st * se) / (n * stt - st * st);
    return verdict(slope >= 2.9, fmt("fitted error exponent %.3f over %zu points in [1, 30] fs (err(1 fs) = %.2e)", slope,
                                     log_t.size(), std::exp(log_e.front())));
}

Outcome criterion_6()
{
    const auto grid = ndark_contour(0.5, 2.0, 151, 0);
    const auto best = std::min_element(grid.begin(), grid.end(),
                                       [](const ContourPoint& a, const ContourPoint& b) { return a.fom < b.fom; });
    const bool ok = std::abs(best->ratio2 - 1.05) <= 0.02 && std::abs(best->ratio3 - 1.05) <= 0.02 &&
                    std::abs(best->c12 - 0.450) <= 0.005 && std::abs(best->c13 - 0.450) <= 0.005 &&
                    std::abs(best->c23 - 0.215) <= 0.005;
    return verdict(ok, fmt("minimum at (%.3f, %.3f): C12 = %.4f, C13 = %.4f, C23 = %.4f", best->ratio2, best->ratio3,
                           best->c12, best->c13, best->c23));
}

Outcome criterion_7()
{
    const double n = 150.0;
    const OptimalRatio r = ndark_optimal_ratio(150);
    const double x_law = 1.09 / std::sqrt(n), maj_law = 0.54 / std::sqrt(n), min_law = 0.50 / n;
    auto rel = [](double a, double b) { return std::abs(a - b) / b; };
    const bool ok = rel(r.x_star, x_law) <= 0.1 && rel(r.c_major, maj_law) <= 0.1 && rel(r.c_minor, min_law) <= 0.1;
    return verdict(ok, fmt("x* = %.5f (law %.5f), C_maj = %.5f (law %.5f), C_min = %.6f (law %.6f)", r.x_star, x_law,
                           r.c_major, maj_law, r.c_minor, min_law));
}

Outcome criterion_8()
{
    auto run = [](double gamma_d) {
        SystemSpec spec = make_system({12.8, 24.9}, 186.0, gamma_d, 25, 1.9e-4);
        PulseSpec pulse;
        pulse.fluence_njcm2 = 263.4;
        pulse.tau_fs = 12.5;
        pulse.carrier_mev = 2050.0;
        const Model model(spec, pulse.carrier_mev);
        const Trajectory tr = run_recorded(fmt("pulsed gamma_d=%g", gamma_d), initial_state(InitialState::ground(), spec),
                                           model, pulse, checked_integrator(1000.0));
        double best = 0.0;
        for (const auto& c : tr.concurrence) best = std::max(best, c[0]);
        return std::make_pair(best, tr.diagnostics.max_top_level_population);
    };
    const auto [c0, top0] = run(0.0);
    const auto [c2, top2] = run(2.0);
    const double drop = 1.0 - c2 / c0;
    const bool ok = std::abs(c0 - 0.60) <= 0.06 && drop >= 0.40 && drop <= 0.60;
    return verdict(ok, fmt("max C = %.4f (gamma_d = 0), %.4f (gamma_d = 2 meV), drop %.1f%%; top level %.1e", c0, c2,
                           100.0 * drop, std::max(top0, top2)));
}

Outcome criterion_9()
{
    std::mt19937_64 rng(20240917);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    std::string dims;
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n_qd = 1 + trial % 3;
        const int max_levels = static_cast<int>(48 / (std::size_t{1} << n_qd));
        const int levels = 2 + static_cast<int>(u(rng) * (max_levels - 1));
        std::vector<double> g(n_qd);
        for (auto& gi : g) gi = 5.0 + 20.0 * u(rng);
        SystemSpec spec = make_system(g, 300.0 * u(rng), 3.0 * u(rng), std::min(levels, max_levels), u(rng));
        for (auto& q : spec.qds) q.omega_mev += 40.0 * (u(rng) - 0.5);
        const Model model(spec);

        const auto dim = static_cast<Eigen::Index>(model.basis.size());
        std::normal_distribution<double> gauss;
        DenseMatrix a(dim, 2);
        for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = cplx(gauss(rng), gauss(rng));
        DenseMatrix rho0 = a * a.adjoint();
        rho0 /= rho0.trace();

        IntegratorConfig cfg = checked_integrator(200.0, 2.0);
        cfg.keep_states = true;
        const Trajectory rk = run_recorded(fmt("random dark %d", trial), rho0, model, std::nullopt, cfg);
        cfg.method = IntegratorConfig::Method::ExpmOracle;
        cfg.check_positivity = false;
        const Trajectory ex = propagate_expm_oracle(rho0, model, std::nullopt, cfg);
        for (std::size_t k = 0; k < rk.states.size(); ++k) {
            worst = std::max(worst, (rk.states[k] - ex.states[k]).cwiseAbs().maxCoeff());
        }
        dims += (trial ? "," : "") + std::to_string(dim);
    }
    return verdict(worst < 1e-7, fmt("max element deviation %.2e over 10 systems, M = {%s}", worst, dims.c_str()));
}

Outcome criterion_10()
{
    if (g_runs.empty()) {
        criterion_3();
        criterion_4();
    }
    double trace = 0.0, herm = 0.0, min_eig = 1.0;
    bool all_checked = true;
    for (const auto& r : g_runs) {
        trace = std::max(trace, r.diag.max_trace_error);
        herm = std::max(herm, r.diag.max_hermiticity_residual);
        min_eig = std::min(min_eig, r.diag.min_eigenvalue);
        all_checked = all_checked && r.diag.positivity_checked;
    }
    const bool ok = all_checked && trace < 1e-6 && herm < 1e-9 && min_eig >= -1e-6;
    return verdict(ok, fmt("%zu trajectories: max |tr-1| = %.1e, max Hermiticity residual = %.1e, min eigenvalue = %.1e",
                           g_runs.size(), trace, herm, min_eig));
}

ReducedDM projector(const Eigen::Vector4cd& psi) { return psi.normalized() * psi.normalized().adjoint(); }

// Square roots of the rho * rho_tilde spectrum taken directly.
double direct_concurrence(const ReducedDM& rho)
{
    Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
    yy(0, 3) = -1.0;
    yy(1, 2) = 1.0;
    yy(2, 1) = 1.0;
    yy(3, 0) = -1.0;
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(rho * (yy * rho.conjugate() * yy));
    std::array<double, 4> l{};
    for (int k = 0; k < 4; ++k) l[k] = std::sqrt(std::max(0.0, es.eigenvalues()(k).real()));
    std::sort(l.begin(), l.end(), std::greater<>());
    return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

Outcome criterion_11()
{
    const double r = 1.0 / std::sqrt(2.0);
    double bell = 1.0;
    for (const Eigen::Vector4cd& psi : {Eigen::Vector4cd(r, 0, 0, r), Eigen::Vector4cd(r, 0, 0, -r),
                                        Eigen::Vector4cd(0, r, r, 0), Eigen::Vector4cd(0, r, -r, 0)}) {
        bell = std::min(bell, concurrence(projector(psi)));
    }

    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss;
    auto random_ket = [&](int n) {
        Eigen::VectorXcd v(n);
        for (int k = 0; k < n; ++k) v(k) = cplx(gauss(rng), gauss(rng));
        return Eigen::VectorXcd(v.normalized());
    };
    double product = 0.0;
    for (int k = 0; k < 100; ++k) {
        const Eigen::Vector2cd a = random_ket(2), b = random_ket(2);
        const Eigen::Vector4cd psi(a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1));
        product = std::max(product, concurrence(projector(psi)));
    }

    const ReducedDM singlet = projector(Eigen::Vector4cd(0, r, -r, 0));
    double werner = 0.0;
    bool threshold_ok = true;
    for (int k = 0; k <= 200; ++k) {
        const double p = k / 200.0;
        const ReducedDM rho = p * singlet + (1.0 - p) * ReducedDM::Identity() / 4.0;
        const double c = concurrence(rho);
        werner = std::max(werner, std::abs(c - direct_concurrence(rho)));
        if ((p <= 1.0 / 3.0 && c != 0.0) || (p > 1.0 / 3.0 + 1e-9 && !(c > 0.0))) threshold_ok = false;
    }
    const double half = concurrence(0.5 * singlet + 0.125 * ReducedDM::Identity());

    double pure = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const Eigen::Vector4cd psi = random_ket(4);
        pure = std::max(pure, std::abs(concurrence(projector(psi)) - 2.0 * std::abs(psi(0) * psi(3) - psi(1) * psi(2))));
    }
    const bool ok = std::abs(bell - 1.0) < 1e-10 && product < 1e-10 && werner < 1e-10 && threshold_ok &&
                    std::abs(half - 0.25) < 1e-12 && pure < 1e-10;
    return verdict(ok, fmt("Bell min %.12f, product max %.1e, Werner vs direct %.1e (p=0.5: %.12f), pure 2|ad-bc| %.1e",
                           bell, product, werner, half, pure));
}

Eigen::VectorXd rosenbrock(const Eigen::VectorXd& x) { return Eigen::Vector2d(10.0 * (x(1) - x(0) * x(0)), 1.0 - x(0)); }

Eigen::VectorXd bimodal(const Eigen::VectorXd& x)
{
    const Eigen::Vector2d a(0.25, 0.3), b(0.75, 0.7);
    return Eigen::VectorXd::Constant(1, 4.0 * (x - a).squaredNorm() * (x - b).squaredNorm());
}

Outcome two_qd_multistart(std::string& detail)
{
    Scenario s;
    s.system = make_system({10.0, 10.0}, 100.0, 2.0, 25, 1.9e-4);
    s.pulse = PulseSpec{};
    s.pulse->fluence_njcm2 = 200.0;
    s.pulse->carrier_mev = 2050.0;
    s.initial = InitialState::ground();
    s.after_pulse_fs = 500.0;
    const Bounds bounds = Bounds::physical_defaults(2);
    const EntanglementObjective objective(s, bounds.names());
    MultistartConfig cfg;  // module defaults: 200 samples, d = 0.1, 150 evaluations per local run
    cfg.seed = 7;
    const MultistartResult r = multistart(objective.as_function(), bounds, cfg);
    if (r.optima.empty()) {
        detail = "multistart produced no optimum";
        return {Status::Fail, detail};
    }
    const auto& best = r.optima.front().point;
    const double summed = 1.0 - best.residuals(0);
    std::ostringstream p;
    for (std::size_t k = 0; k < bounds.size(); ++k) p << (k ? ", " : "") << bounds[k].name << '=' << best.params(k);
    detail = fmt("multistart summed C = %.4f after %zu evaluations (%s)", summed, r.log.size(), p.str().c_str());
    return {summed >= 0.55 ? Status::Pass : Status::Fail, detail};
}

Outcome criterion_12(bool long_run)
{
    Bounds box;
    box.add("x", -2.0, 2.0).add("y", -2.0, 2.0);
    const LocalResult rb = solve_least_squares(rosenbrock, Eigen::Vector2d(-1.2, 1.0), box);
    const bool rosen_ok = rb.best.objective < 1e-8 && rb.evaluations <= 150;

    Bounds square;
    square.add("x", 0.0, 1.0).add("y", 0.0, 1.0);
    MultistartConfig toy;
    toy.samples = 1000;
    toy.cluster_radius = 0.1;
    toy.seed = 3;
    const MultistartResult bm = multistart(bimodal, square, toy);
    const std::size_t clusters = bm.clusters.clusters.size();

    std::string quick = fmt("Rosenbrock objective %.1e in %zu evaluations; bimodal toy %zu clusters at d = 0.1",
                            rb.best.objective, rb.evaluations, clusters);
    const bool quick_ok = rosen_ok && clusters == 2;
    if (!long_run) {
        if (!quick_ok) return verdict(false, quick);
        return {Status::Skip, quick + "; two-QD multistart not run (needs --long)"};
    }
    std::string detail;
    const Outcome ms = two_qd_multistart(detail);
    return verdict(quick_ok && ms.status == Status::Pass, quick + "; " + detail);
}

} // namespace

int main(int argc, char** argv)
{
    bool long_run = false;
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--long") {
            long_run = true;
        } else {
            try {
                selected.insert(std::stoi(arg));
            } catch (const std::exception&) {
                std::fprintf(stderr, "usage: %s [--long] [criterion numbers 1-12]\n", argv[0]);
                return 2;
            }
        }
    }

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"analytic optimum", criterion_1},
        {"symmetric baseline", criterion_2},
        {"full model vs analytic", criterion_3},
        {"lossless cyclic entanglement", criterion_4},
        {"short-time law", criterion_5},
        {"three-QD dark optimum", criterion_6},
        {"N-scaling at N = 150", criterion_7},
        {"pulsed two-QD reproduction", criterion_8},
        {"oracle equivalence", criterion_9},
        {"physicality", criterion_10},
        {"concurrence suite", criterion_11},
        {"optimizer suite", [long_run] { return criterion_12(long_run); }},
    };

    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k + 1);
        if (!selected.empty() && !selected.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[k].second();
        } catch (const std::exception& e) {
            out = {Status::Fail, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const char* tag = out.status == Status::Pass ? "PASS" : out.status == Status::Skip ? "SKIP" : "FAIL";
        if (out.status == Status::Fail) ++failures;
        std::printf("%s %2d %s: %s (%.1f s)\n", tag, id, criteria[k].first.c_str(), out.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
