// test_optimizer.cpp - bounds, sampling, clustering, trust region and multistart

#include <atomic>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "qdent/errors.hpp"
#include "qdent/optimizer.hpp"

using namespace qdent;

namespace {

Eigen::VectorXd rosenbrock(const Eigen::VectorXd& x)
{
    return Eigen::Vector2d(10.0 * (x(1) - x(0) * x(0)), 1.0 - x(0));
}

// Two zero-objective basins centred on a and b in a unit square.
Eigen::VectorXd bimodal(const Eigen::VectorXd& x)
{
    const Eigen::Vector2d a(0.25, 0.3);
    const Eigen::Vector2d b(0.75, 0.7);
    return Eigen::VectorXd::Constant(1, 4.0 * (x - a).squaredNorm() * (x - b).squaredNorm());
}

Bounds unit_square()
{
    Bounds b;
    b.add("x", 0.0, 1.0).add("y", 0.0, 1.0);
    return b;
}

EvaluatedPoint at(double x, double y, double objective, std::size_t id)
{
    EvaluatedPoint p;
    p.eval_id = id;
    p.scaled = Eigen::Vector2d(x, y);
    p.params = p.scaled;
    p.objective = objective;
    return p;
}

} // namespace

TEST_CASE("bounds map between physical and unit coordinates")
{
    Bounds b;
    b.add("a", -2.0, 2.0).add("b", 10.0, 20.0).add("c", 0.0, 1.0);
    b.fix("b", 12.0);
    CHECK(b.free_count() == 2);
    CHECK(b.index_of("c") == 2);
    CHECK_THROWS_AS(b.index_of("zzz"), ConfigError);
    const Eigen::Vector3d x(1.0, 12.0, 0.25);
    const Eigen::VectorXd u = b.to_unit(x);
    REQUIRE(u.size() == 2);
    CHECK(u(0) == doctest::Approx(0.75));
    CHECK(u(1) == doctest::Approx(0.25));
    CHECK((b.from_unit(u) - x).norm() < 1e-15);
    CHECK(b.contains(x));
    CHECK_FALSE(b.contains(Eigen::Vector3d(3.0, 12.0, 0.5)));
    CHECK_NOTHROW(b.validate());
    CHECK_THROWS_AS(b.add("a", 0.0, 1.0), ConfigError);

    Bounds bad;
    bad.add("a", 1.0, 0.0);
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    Bounds outside;
    outside.add("a", 0.0, 1.0).fix("a", 2.0);
    CHECK_THROWS_AS(outside.validate(), ConfigError);
    Bounds all_fixed;
    all_fixed.add("a", 0.0, 1.0).fix("a", 0.5);
    CHECK_THROWS_AS(all_fixed.validate(), ConfigError);
}

TEST_CASE("default physical search space")
{
    const Bounds b = Bounds::physical_defaults(3);
    const auto names = b.names();
    REQUIRE(names.size() == 7);
    CHECK(names[0] == "qd.1.g_mev");
    CHECK(names[2] == "qd.3.g_mev");
    CHECK(b[b.index_of("pulse.fluence_njcm2")].upper == 700.0);
    CHECK(b[b.index_of("plasmon.gamma_mev")].lower == 100.0);
}

TEST_CASE("uniform sampling is seeded and respects fixed values")
{
    Bounds b;
    b.add("a", -1.0, 1.0).add("b", 5.0, 6.0).add("c", 0.0, 3.0);
    b.fix("c", 2.5);
    const auto s1 = sample_uniform(b, 64, 42);
    const auto s2 = sample_uniform(b, 64, 42);
    const auto s3 = sample_uniform(b, 64, 43);
    REQUIRE(s1.size() == 64);
    bool differs = false;
    for (std::size_t k = 0; k < s1.size(); ++k) {
        CHECK(s1[k] == s2[k]);
        CHECK(b.contains(s1[k]));
        CHECK(s1[k](2) == 2.5);
        differs = differs || s1[k] != s3[k];
    }
    CHECK(differs);
}

TEST_CASE("failed evaluations")
{
    const Bounds b = unit_square();
    const ResidualFunction throws = [](const Eigen::VectorXd&) -> Eigen::VectorXd {
        throw std::runtime_error("boom");
    };
    const ResidualFunction nan = [](const Eigen::VectorXd&) {
        return Eigen::VectorXd::Constant(1, std::nan(""));
    };
    const EvaluatedPoint p = evaluate_point(throws, b, Eigen::Vector2d(0.5, 0.5));
    CHECK(p.failed);
    CHECK(std::isinf(p.objective));
    CHECK(evaluate_point(nan, b, Eigen::Vector2d(0.5, 0.5)).failed);
    CHECK_FALSE(evaluate_point(rosenbrock, b, Eigen::Vector2d(0.5, 0.5)).failed);
}

TEST_CASE("clustering joins the nearest better point")
{
    std::vector<EvaluatedPoint> pts{
        at(0.10, 0.10, 0.0, 0), at(0.15, 0.10, 1.0, 1), at(0.20, 0.10, 2.0, 2),  // a chain
        at(0.80, 0.80, 0.5, 3), at(0.85, 0.80, 1.5, 4),                           // a second basin
        at(0.50, 0.50, 3.0, 5),                                                   // isolated
    };
    EvaluatedPoint failed = at(0.11, 0.10, 0.0, 6);
    failed.failed = true;
    failed.objective = std::numeric_limits<double>::infinity();
    pts.push_back(failed);

    const ClusterSet cs = cluster_basins(pts, 0.1);
    REQUIRE(cs.clusters.size() == 3);
    CHECK(cs.clusters[0].best == 0);
    CHECK(cs.clusters[0].members == std::vector<std::size_t>{0, 1, 2});
    CHECK(cs.clusters[1].best == 3);
    CHECK(cs.clusters[2].best == 5);
    CHECK(cs.assignment[4] == 1);
    CHECK(cs.assignment[6] == npos);

    // a larger radius merges everything into the global basin
    CHECK(cluster_basins(pts, 2.0).clusters.size() == 1);
    CHECK(cluster_basins({}, 0.1).clusters.empty());
    CHECK_THROWS_AS(cluster_basins(pts, -1.0), ConfigError);
}

TEST_CASE("trust region solves Rosenbrock least squares")
{
    Bounds b;
    b.add("x", -2.0, 2.0).add("y", -2.0, 2.0);
    const LocalResult r = solve_least_squares(rosenbrock, Eigen::Vector2d(-1.2, 1.0), b);
    CHECK(r.best.objective < 1e-8);
    CHECK(r.evaluations <= 150);
    CHECK(r.history.size() == r.evaluations);
    CHECK((r.best.params - Eigen::Vector2d(1.0, 1.0)).norm() < 1e-3);
    for (const auto& p : r.history) CHECK(b.contains(p.params));
}

TEST_CASE("linear least squares with inactive bounds matches QR")
{
    Eigen::MatrixXd a(5, 3);
    a << 1, 2, 0, 0, 1, 1, 3, 0, 1, 1, 1, 1, 2, -1, 0.5;
    const Eigen::VectorXd rhs = (Eigen::VectorXd(5) << 1, -2, 0.5, 3, 1).finished();
    const Eigen::VectorXd exact = a.colPivHouseholderQr().solve(rhs);
    Bounds b;
    b.add("p", -10, 10).add("q", -10, 10).add("r", -10, 10);
    const ResidualFunction fn = [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(a * x - rhs); };
    const LocalResult r = solve_least_squares(fn, Eigen::Vector3d(0, 0, 0), b);
    CHECK((r.best.params - exact).norm() < 1e-5);
    CHECK(r.best.objective == doctest::Approx((a * exact - rhs).squaredNorm()).epsilon(1e-8));
}

TEST_CASE("active bounds satisfy the KKT sign conditions")
{
    // unconstrained minimum at (3, -3), box [0, 1]^2: solution (1, 0)
    Bounds b = unit_square();
    const ResidualFunction fn = [](const Eigen::VectorXd& x) { return Eigen::VectorXd(x - Eigen::Vector2d(3, -3)); };
    const LocalResult r = solve_least_squares(fn, Eigen::Vector2d(0.5, 0.5), b);
    CHECK(r.best.params(0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(r.best.params(1)) < 1e-6);
    const Eigen::Vector2d grad = 2.0 * (r.best.params - Eigen::Vector2d(3, -3));
    CHECK(grad(0) < 0.0);  // at the upper bound the gradient points outward
    CHECK(grad(1) > 0.0);  // at the lower bound likewise
}

TEST_CASE("trust region stops at the target and honours the budget")
{
    Bounds b;
    b.add("x", -2.0, 2.0).add("y", -2.0, 2.0);
    TrustRegionConfig cfg;
    cfg.max_evaluations = 12;
    const LocalResult r = solve_least_squares(rosenbrock, Eigen::Vector2d(-1.2, 1.0), b, cfg);
    CHECK(r.evaluations <= 12);
    CHECK(r.budget_exhausted);
    cfg.max_evaluations = 150;
    cfg.target_objective = 1e-2;
    const LocalResult t = solve_least_squares(rosenbrock, Eigen::Vector2d(-1.2, 1.0), b, cfg);
    CHECK(t.best.objective <= 1e-2);
    CHECK(t.converged);
    cfg.max_evaluations = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("multistart on a bimodal landscape")
{
    const Bounds b = unit_square();
    MultistartConfig cfg;
    cfg.samples = 1000;  // 200 samples leave isolated points that seed spurious clusters
    cfg.cluster_radius = 0.1;
    cfg.seed = 7;
    cfg.threads = 1;
    const MultistartResult r1 = multistart(bimodal, b, cfg);
    CHECK(r1.clusters.clusters.size() == 2);
    REQUIRE(r1.optima.size() == 2);
    for (const auto& opt : r1.optima) CHECK(opt.point.objective < 1e-10);
    const double d0 = (r1.optima[0].point.params - Eigen::Vector2d(0.25, 0.3)).norm();
    const double d1 = (r1.optima[1].point.params - Eigen::Vector2d(0.25, 0.3)).norm();
    CHECK(std::min(d0, d1) < 1e-3);

    // the log does not depend on the worker count
    cfg.threads = 4;
    const MultistartResult r4 = multistart(bimodal, b, cfg);
    REQUIRE(r4.log.size() == r1.log.size());
    for (std::size_t k = 0; k < r1.log.size(); ++k) {
        CHECK(r4.log[k].eval_id == r1.log[k].eval_id);
        CHECK(r4.log[k].params == r1.log[k].params);
        CHECK(r4.log[k].phase == r1.log[k].phase);
    }
    CHECK(r1.log.front().phase == "sample");
    CHECK(r1.log.back().phase == "local");
}

TEST_CASE("multistart limits local runs and skips failed samples")
{
    const Bounds b = unit_square();
    std::atomic<int> calls{0};
    const ResidualFunction flaky = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        ++calls;
        if (x(0) > 0.9) throw std::runtime_error("unstable");
        return bimodal(x);
    };
    MultistartConfig cfg;
    cfg.samples = 100;
    cfg.max_local_runs = 1;
    cfg.threads = 2;
    const MultistartResult r = multistart(flaky, b, cfg);
    CHECK(r.optima.size() == 1);
    CHECK(static_cast<std::size_t>(calls.load()) == r.log.size());
    for (const auto& e : r.log) {
        if (e.failed) {
            CHECK(e.cluster_id == npos);
        }
    }
    cfg.samples = 0;
    CHECK_THROWS_AS(multistart(flaky, b, cfg), ConfigError);
}

TEST_CASE("optimizer log layout")
{
    LogEntry ok;
    ok.eval_id = 0;
    ok.params = Eigen::Vector2d(1.5, 2.0);
    ok.residuals = Eigen::Vector2d(0.5, 0.25);
    ok.objective = 0.3125;
    ok.phase = "sample";
    ok.cluster_id = 0;
    LogEntry bad = ok;
    bad.eval_id = 1;
    bad.failed = true;
    bad.residuals.resize(0);
    bad.cluster_id = npos;
    std::ostringstream out;
    write_optimizer_log(out, {ok, bad}, {"x", "y"}, {"# seed: 1"});
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "# seed: 1");
    std::getline(in, line);
    CHECK(line == "eval_id,x,y,r1,r2,objective,phase,cluster_id");
    std::getline(in, line);
    CHECK(line.rfind("0,1.5,2,0.5,0.25,0.3125,sample,0", 0) == 0);
    std::getline(in, line);
    CHECK(line.find("nan") != std::string::npos);
    CHECK(line.find(",-1") != std::string::npos);
}
