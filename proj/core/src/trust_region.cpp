// trust_region.cpp - model-based derivative-free trust region for sum of squares
//
// Each residual gets a quadratic interpolation model with minimum Frobenius
// norm Hessian. The models are combined into a Gauss-Newton style model of
// the objective, which is minimized over the box-constrained infinity-norm
// trust region.

#include <algorithm>
#include <cmath>

#include "qdent/errors.hpp"
#include "qdent/optimizer.hpp"

namespace qdent {

void TrustRegionConfig::validate() const
{
    if (max_evaluations == 0) throw ConfigError("local optimizer budget must be >= 1 evaluation");
    if (!(radius_min > 0.0) || !(radius_initial >= radius_min) || !(radius_max >= radius_initial)) {
        throw ConfigError("trust region radii must satisfy 0 < min <= initial <= max");
    }
    if (!(accept_ratio >= 0.0) || !(expand_ratio > accept_ratio) || expand_ratio >= 1.0) {
        throw ConfigError("trust region ratios must satisfy 0 <= accept < expand < 1");
    }
    if (!(affine_threshold > 0.0) || affine_threshold >= 1.0) {
        throw ConfigError("affine threshold must be in (0, 1)");
    }
}

namespace {

struct QuadraticModel {
    Eigen::VectorXd gradient;  // of the objective, in normalized step units
    Eigen::MatrixXd hessian;
};

/// min g.s + s'Bs/2 over lo <= s <= hi by projected gradient steps followed
/// by Newton steps on the free variables.
Eigen::VectorXd solve_box_qp(const Eigen::VectorXd& g, const Eigen::MatrixXd& b, const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi)
{
    const auto n = g.size();
    auto value = [&](const Eigen::VectorXd& s) { return g.dot(s) + 0.5 * s.dot(b * s); };
    auto project = [&](Eigen::VectorXd s) { return s.cwiseMax(lo).cwiseMin(hi).eval(); };

    Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
    double q = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        const Eigen::VectorXd grad = g + b * s;
        if ((project(s - grad) - s).lpNorm<Eigen::Infinity>() < 1e-13) break;
        const Eigen::VectorXd s_start = s;

        // projected gradient with backtracking
        const double curv = grad.dot(b * grad);
        double t = curv > 0.0 ? grad.squaredNorm() / curv : 2.0 * std::sqrt(static_cast<double>(n)) / grad.norm();
        for (int k = 0; k < 60; ++k, t *= 0.5) {
            const Eigen::VectorXd trial = project(s - t * grad);
            const double qt = value(trial);
            if (qt <= q + 1e-4 * grad.dot(trial - s)) {
                s = trial;
                q = qt;
                break;
            }
        }

        // Newton on variables strictly inside the box
        std::vector<Eigen::Index> free;
        const Eigen::VectorXd grad2 = g + b * s;
        for (Eigen::Index i = 0; i < n; ++i) {
            const bool at_lo = s(i) <= lo(i) + 1e-12 && grad2(i) > 0.0;
            const bool at_hi = s(i) >= hi(i) - 1e-12 && grad2(i) < 0.0;
            if (!at_lo && !at_hi) free.push_back(i);
        }
        if (!free.empty()) {
            const auto nf = static_cast<Eigen::Index>(free.size());
            Eigen::MatrixXd bf(nf, nf);
            Eigen::VectorXd gf(nf);
            for (Eigen::Index a = 0; a < nf; ++a) {
                gf(a) = grad2(free[a]);
                for (Eigen::Index c = 0; c < nf; ++c) bf(a, c) = b(free[a], free[c]);
            }
            Eigen::LDLT<Eigen::MatrixXd> ldlt(bf);
            if (ldlt.info() == Eigen::Success && ldlt.isPositive() && (ldlt.vectorD().array() > 1e-14).all()) {
                const Eigen::VectorXd df = ldlt.solve(-gf);
                Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
                for (Eigen::Index a = 0; a < nf; ++a) d(free[a]) = df(a);
                for (double alpha = 1.0; alpha > 1e-6; alpha *= 0.5) {
                    const Eigen::VectorXd trial = project(s + alpha * d);
                    const double qt = value(trial);
                    if (qt < q) {
                        s = trial;
                        q = qt;
                        break;
                    }
                }
            }
        }
        if ((s - s_start).lpNorm<Eigen::Infinity>() < 1e-15) break;
    }
    return s;
}

class Solver {
public:
    Solver(const ResidualFunction& fn, const Bounds& bounds, const TrustRegionConfig& cfg)
        : fn_(fn), bounds_(bounds), cfg_(cfg), n_(static_cast<Eigen::Index>(bounds.free_count()))
    {
    }

    LocalResult run(const EvaluatedPoint& start)
    {
        result_.best = start;
        if (start.failed) return finish(0.0);
        points_.push_back(start);
        std::size_t center = 0;
        double radius = cfg_.radius_initial;

        for (;;) {
            if (points_[center].objective <= cfg_.target_objective || radius < cfg_.radius_min) {
                result_.converged = true;
                break;
            }
            if (!budget_left()) {
                result_.budget_exhausted = true;
                break;
            }
            ++result_.iterations;

            const std::size_t before = points_.size();
            const auto selected = select_points(center, radius);
            // a geometry point that improves on the center becomes the center
            const std::size_t better = best_since(before, center);
            if (better != center) {
                center = better;
                continue;
            }
            if (selected.size() < static_cast<std::size_t>(n_) + 1 && !budget_left()) {
                result_.budget_exhausted = true;
                break;
            }

            const QuadraticModel model = build_model(center, selected, radius);
            const Eigen::VectorXd& xc = points_[center].scaled;
            const Eigen::VectorXd lo = (-xc / radius).cwiseMax(-1.0);
            const Eigen::VectorXd hi = ((Eigen::VectorXd::Ones(n_) - xc) / radius).cwiseMin(1.0);
            const Eigen::VectorXd step = solve_box_qp(model.gradient, model.hessian, lo, hi);
            const double predicted = -(model.gradient.dot(step) + 0.5 * step.dot(model.hessian * step));

            if (!(predicted > 1e-14 * std::max(1.0, points_[center].objective)) ||
                step.lpNorm<Eigen::Infinity>() < 1e-10) {
                radius *= 0.5;
                continue;
            }
            if (!budget_left()) {
                result_.budget_exhausted = true;
                break;
            }
            const EvaluatedPoint& trial = evaluate((xc + radius * step).cwiseMax(0.0).cwiseMin(1.0));
            const double actual = points_[center].objective - trial.objective;
            const double ratio = trial.failed ? -1.0 : actual / predicted;
            if (ratio > cfg_.accept_ratio) {
                center = points_.size() - 1;
                if (ratio > cfg_.expand_ratio && step.lpNorm<Eigen::Infinity>() >= 0.99) {
                    radius = std::min(2.0 * radius, cfg_.radius_max);
                }
            } else {
                radius *= 0.5;
            }
        }
        return finish(radius);
    }

    LocalResult run_from(const Eigen::VectorXd& unit)
    {
        if (!budget_left()) throw ConfigError("local optimizer budget must be >= 1 evaluation");
        const EvaluatedPoint start = evaluate(unit);
        return run(start);
    }

private:
    bool budget_left() const { return result_.evaluations < cfg_.max_evaluations; }

    const EvaluatedPoint& evaluate(const Eigen::VectorXd& unit)
    {
        EvaluatedPoint pt = evaluate_point(fn_, bounds_, unit);
        pt.eval_id = result_.evaluations++;
        result_.history.push_back(pt);
        if (!pt.failed && pt.objective < result_.best.objective) result_.best = pt;
        if (!pt.failed) {
            points_.push_back(std::move(pt));
            return points_.back();
        }
        failed_ = std::move(pt);
        return failed_;
    }

    std::size_t best_since(std::size_t first, std::size_t center) const
    {
        std::size_t best = center;
        for (std::size_t k = first; k < points_.size(); ++k) {
            if (points_[k].objective < points_[best].objective) best = k;
        }
        return best;
    }

    /// Picks n affinely independent points near the center (adding geometry
    /// points when needed), then extra points up to a full quadratic.
    std::vector<std::size_t> select_points(std::size_t center, double radius)
    {
        const Eigen::VectorXd xc = points_[center].scaled;
        std::vector<std::pair<double, std::size_t>> candidates;
        for (std::size_t k = 0; k < points_.size(); ++k) {
            if (k == center) continue;
            const Eigen::VectorXd y = points_[k].scaled - xc;
            if (y.lpNorm<Eigen::Infinity>() <= 2.0 * radius && y.norm() > 0.0) candidates.emplace_back(y.norm(), k);
        }
        std::sort(candidates.begin(), candidates.end());

        std::vector<std::size_t> selected{center};
        std::vector<bool> used(points_.size(), false);
        Eigen::MatrixXd q(n_, 0);
        auto residual_of = [&](const Eigen::VectorXd& v) {
            Eigen::VectorXd r = v;
            for (int pass = 0; pass < 2; ++pass) r -= q * (q.transpose() * r);
            return r;
        };
        auto push_direction = [&](const Eigen::VectorXd& r) {
            q.conservativeResize(Eigen::NoChange, q.cols() + 1);
            q.col(q.cols() - 1) = r.normalized();
        };

        for (const auto& [dist, k] : candidates) {
            if (q.cols() == n_) break;
            const Eigen::VectorXd r = residual_of((points_[k].scaled - xc) / radius);
            if (r.norm() >= cfg_.affine_threshold) {
                push_direction(r);
                selected.push_back(k);
                used[k] = true;
            }
        }

        while (q.cols() < n_ && budget_left()) {
            // complement direction with the largest coordinate component
            Eigen::VectorXd dir;
            double best = -1.0;
            for (Eigen::Index i = 0; i < n_; ++i) {
                const Eigen::VectorXd r = residual_of(Eigen::VectorXd::Unit(n_, i));
                if (r.norm() > best) {
                    best = r.norm();
                    dir = r.normalized();
                }
            }
            Eigen::VectorXd target;
            double target_pivot = -1.0;
            for (double sign : {1.0, -1.0}) {
                const Eigen::VectorXd cand = (xc + sign * radius * dir).cwiseMax(0.0).cwiseMin(1.0);
                const double pivot = residual_of((cand - xc) / radius).norm();
                if (pivot > target_pivot) {
                    target_pivot = pivot;
                    target = cand;
                }
            }
            if (target_pivot < cfg_.affine_threshold) break;  // box too thin around the center
            const EvaluatedPoint& pt = evaluate(target);
            if (pt.failed) continue;
            push_direction(residual_of((pt.scaled - xc) / radius));
            selected.push_back(points_.size() - 1);
            used.push_back(true);
        }

        const std::size_t full = static_cast<std::size_t>((n_ + 1) * (n_ + 2) / 2);
        for (const auto& [dist, k] : candidates) {
            if (selected.size() >= full) break;
            if (used[k]) continue;
            bool duplicate = false;
            for (std::size_t s : selected) {
                if ((points_[s].scaled - points_[k].scaled).norm() < 1e-10 * radius) duplicate = true;
            }
            if (!duplicate) selected.push_back(k);
        }
        return selected;
    }

    QuadraticModel build_model(std::size_t center, const std::vector<std::size_t>& selected, double radius) const
    {
        const auto p = static_cast<Eigen::Index>(selected.size());
        const Eigen::VectorXd& xc = points_[center].scaled;
        const Eigen::VectorXd& rc = points_[center].residuals;
        const auto m = rc.size();

        Eigen::MatrixXd y(p, n_);
        Eigen::MatrixXd f(p, m);
        for (Eigen::Index i = 0; i < p; ++i) {
            const auto& pt = points_[selected[static_cast<std::size_t>(i)]];
            y.row(i) = ((pt.scaled - xc) / radius).transpose();
            f.row(i) = (pt.residuals - rc).transpose();
        }

        // KKT system of the minimum Frobenius norm interpolation problem
        const Eigen::Index dim = p + 1 + n_;
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(dim, dim);
        const Eigen::MatrixXd gram = y * y.transpose();
        kkt.topLeftCorner(p, p) = 0.5 * gram.array().square().matrix();
        kkt.block(0, p, p, 1).setOnes();
        kkt.block(0, p + 1, p, n_) = y;
        kkt.block(p, 0, 1, p).setOnes();
        kkt.block(p + 1, 0, n_, p) = y.transpose();
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(dim, m);
        rhs.topRows(p) = f;
        const Eigen::MatrixXd sol = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(kkt).solve(rhs);

        const Eigen::MatrixXd jac = sol.bottomRows(n_).transpose();  // m x n, normalized units
        Eigen::MatrixXd hess = jac.transpose() * jac;
        for (Eigen::Index r = 0; r < m; ++r) {
            const Eigen::VectorXd lambda = sol.col(r).head(p);
            hess += rc(r) * (y.transpose() * lambda.asDiagonal() * y);
        }
        QuadraticModel model;
        model.gradient = 2.0 * jac.transpose() * rc;
        model.hessian = 2.0 * 0.5 * (hess + hess.transpose());
        return model;
    }

    LocalResult finish(double radius)
    {
        result_.final_radius = radius;
        return std::move(result_);
    }

    const ResidualFunction& fn_;
    const Bounds& bounds_;
    const TrustRegionConfig& cfg_;
    Eigen::Index n_;
    std::vector<EvaluatedPoint> points_;  // successful evaluations only
    EvaluatedPoint failed_;
    LocalResult result_;
};

} // namespace

LocalResult solve_least_squares(const ResidualFunction& fn, const Eigen::VectorXd& x0, const Bounds& bounds,
                                const TrustRegionConfig& config)
{
    bounds.validate();
    config.validate();
    if (!bounds.contains(x0, 1e-12)) throw ConfigError("local optimizer start point lies outside the bounds");
    Solver solver(fn, bounds, config);
    return solver.run_from(bounds.to_unit(x0));
}

LocalResult solve_least_squares(const ResidualFunction& fn, const EvaluatedPoint& start, const Bounds& bounds,
                                const TrustRegionConfig& config)
{
    bounds.validate();
    config.validate();
    Solver solver(fn, bounds, config);
    return solver.run(start);
}

} // namespace qdent
