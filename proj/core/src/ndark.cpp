// ndark.cpp - N QDs coupled to one lossy plasmon, single-excitation manifold

#include <cmath>
#include <random>
#include <stdexcept>

#include "analytic_detail.hpp"
#include "qdent/analytic.hpp"
#include "qdent/entanglement.hpp"
#include "qdent/parallel.hpp"
#include "qdent/units.hpp"

namespace qdent {

using cd = std::complex<double>;

namespace {

/// N-1 orthonormal vectors in R^N orthogonal to g. Returns false on rank loss.
bool zero_modes(const Eigen::VectorXd& g, std::uint64_t seed, Eigen::MatrixXd& basis)
{
    const auto n = g.size();
    basis.resize(n, n);
    basis.col(0) = g.normalized();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    for (Eigen::Index k = 1; k < n; ++k) {
        Eigen::VectorXd u(n);
        for (Eigen::Index i = 0; i < n; ++i) u(i) = normal(rng);
        const double start = u.norm();
        // two Gram-Schmidt passes
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index j = 0; j < k; ++j) u -= basis.col(j).dot(u) * basis.col(j);
        }
        const double left = u.norm();
        if (!(left > 1e-8 * start)) return false;
        basis.col(k) = u / left;
    }
    return true;
}

} // namespace

Eigen::MatrixXcd DarkModel::matrix() const
{
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n + 1, n + 1);
    m(0, 0) = cd(0.0, -epsilon);
    for (Eigen::Index j = 0; j < n; ++j) m(0, j + 1) = m(j + 1, 0) = g[static_cast<std::size_t>(j)];
    return m;
}

DarkModel ndark_build(const std::vector<double>& g_mev, double gamma_s_mev, std::uint64_t seed)
{
    if (g_mev.empty()) throw std::invalid_argument("ndark_build: need at least one QD");
    for (double g : g_mev) {
        if (!(g > 0.0)) throw std::invalid_argument("ndark_build: couplings must be > 0");
    }
    if (gamma_s_mev < 0.0) throw std::invalid_argument("ndark_build: gamma_s must be >= 0");

    DarkModel model;
    model.g = g_mev;
    model.epsilon = 0.5 * gamma_s_mev;
    const auto n = static_cast<Eigen::Index>(g_mev.size());
    const Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(g_mev.data(), n);
    const double big_g = g.squaredNorm();

    Eigen::MatrixXd qd_basis;
    int attempts = 0;
    while (!zero_modes(g, seed, qd_basis)) {
        if (++attempts > 16) throw std::runtime_error("ndark_build: could not span the zero-energy subspace");
        ++seed;
    }
    model.seed = seed;

    model.w = Eigen::VectorXcd::Zero(n + 1);
    model.v = Eigen::MatrixXcd::Zero(n + 1, n + 1);
    model.norms = Eigen::VectorXcd::Ones(n + 1);
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        model.v.col(k).tail(n) = qd_basis.col(k + 1).cast<cd>();
    }

    const cd root = std::sqrt(cd(4.0 * big_g - model.epsilon * model.epsilon, 0.0));
    const cd shift(0.0, -model.epsilon);
    const double g_last = g(n - 1);
    for (int branch = 0; branch < 2; ++branch) {
        const Eigen::Index k = n - 1 + branch;
        const cd w = 0.5 * (shift + (branch == 0 ? -root : root));
        model.w(k) = w;
        model.v.col(k)(0) = w / g_last;
        model.v.col(k).tail(n) = (g / g_last).cast<cd>();
        model.norms(k) = (w * w + big_g) / (g_last * g_last);
    }
    return model;
}

Eigen::VectorXcd ndark_qd_excited(std::size_t n_qd, std::size_t qd)
{
    if (qd >= n_qd) throw std::invalid_argument("ndark_qd_excited: QD index out of range");
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n_qd) + 1);
    b(static_cast<Eigen::Index>(qd) + 1) = 1.0;
    return b;
}

Eigen::VectorXcd ndark_evolve(const DarkModel& model, const Eigen::VectorXcd& b0, double t_fs)
{
    const auto n = static_cast<Eigen::Index>(model.g.size());
    if (b0.size() != n + 1) throw std::invalid_argument("ndark_evolve: amplitude vector has wrong size");
    if (t_fs < 0.0) throw std::invalid_argument("ndark_evolve: t must be >= 0");
    const double tau = t_fs / units::hbar_mev_fs;

    const Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(model.g.data(), n);
    const double big_g = g.squaredNorm();
    const double disc = 4.0 * big_g - model.epsilon * model.epsilon;
    if (std::abs(disc) < 1e-6 * big_g) {
        const Eigen::VectorXcd g_hat = (g / std::sqrt(big_g)).cast<cd>();
        const cd bright = g_hat.dot(b0.tail(n));
        const Eigen::VectorXcd dark = b0.tail(n) - bright * g_hat;
        const auto [p, b] = detail::bright_block(b0(0), bright, std::sqrt(big_g), model.epsilon, tau);
        Eigen::VectorXcd out(n + 1);
        out(0) = p;
        out.tail(n) = dark + b * g_hat;
        return out;
    }

    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n + 1);
    for (Eigen::Index k = 0; k <= n; ++k) {
        const auto vk = model.v.col(k);
        const cd proj = (vk.transpose() * b0)(0) / model.norms(k);
        out += std::exp(cd(0.0, -1.0) * model.w(k) * tau) * proj * vk;
    }
    return out;
}

DarkAsymptote ndark_asymptotic(const DarkModel& model, const Eigen::VectorXcd& b0)
{
    if (!(model.epsilon > 0.0)) throw std::invalid_argument("ndark_asymptotic: epsilon must be > 0");
    const auto n = static_cast<Eigen::Index>(model.g.size());
    if (b0.size() != n + 1) throw std::invalid_argument("ndark_asymptotic: amplitude vector has wrong size");

    DarkAsymptote out;
    out.amplitudes = Eigen::VectorXcd::Zero(n + 1);
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        const auto vk = model.v.col(k);
        out.amplitudes += ((vk.transpose() * b0)(0) / model.norms(k)) * vk;
    }
    out.population = out.amplitudes.tail(n).cwiseAbs2();
    out.concurrence = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            out.concurrence(i, j) = out.concurrence(j, i) = 2.0 * std::sqrt(out.population(i) * out.population(j));
        }
    }
    return out;
}

DarkAsymptote ndark_asymptotic(const DarkModel& model)
{
    return ndark_asymptotic(model, ndark_qd_excited(model.g.size(), 0));
}

std::vector<double> common_ratio_couplings(std::size_t n_qd, double x, double g1)
{
    std::vector<double> g(n_qd, x * g1);
    if (!g.empty()) g[0] = g1;
    return g;
}

OptimalRatio ndark_common_ratio(std::size_t n_qd, double x)
{
    if (n_qd < 2) throw std::invalid_argument("ndark_common_ratio: need at least two QDs");
    // the asymptote does not depend on gamma_s > 0 or on the coupling scale
    const DarkModel model = ndark_build(common_ratio_couplings(n_qd, x), 2.0);
    const DarkAsymptote asym = ndark_asymptotic(model);
    OptimalRatio out;
    out.x_star = x;
    out.c_major = asym.concurrence(0, 1);
    out.c_minor = n_qd >= 3 ? asym.concurrence(1, 2) : 0.0;
    out.fom = figure_of_merit(asym.concurrence);
    return out;
}

OptimalRatio ndark_optimal_ratio(std::size_t n_qd, double tol)
{
    if (n_qd < 2) throw std::invalid_argument("ndark_optimal_ratio: need at least two QDs");
    constexpr double x_min = 1e-3, x_max = 10.0;
    constexpr int coarse = 241;
    std::vector<double> xs(coarse), fs(coarse);
    std::size_t best = 0;
    for (int k = 0; k < coarse; ++k) {
        xs[k] = x_min * std::pow(x_max / x_min, static_cast<double>(k) / (coarse - 1));
        fs[k] = ndark_common_ratio(n_qd, xs[k]).fom;
        if (fs[k] < fs[best]) best = static_cast<std::size_t>(k);
    }
    double lo = xs[best == 0 ? 0 : best - 1];
    double hi = xs[std::min<std::size_t>(best + 1, coarse - 1)];

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - inv_phi * (hi - lo), b = lo + inv_phi * (hi - lo);
    double fa = ndark_common_ratio(n_qd, a).fom, fb = ndark_common_ratio(n_qd, b).fom;
    while (hi - lo > tol) {
        if (fa < fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = ndark_common_ratio(n_qd, a).fom;
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = ndark_common_ratio(n_qd, b).fom;
        }
    }
    return ndark_common_ratio(n_qd, 0.5 * (lo + hi));
}

std::vector<ContourPoint> ndark_contour(double ratio_min, double ratio_max, std::size_t steps, unsigned threads)
{
    if (!(ratio_min > 0.0) || !(ratio_max >= ratio_min)) {
        throw std::invalid_argument("ndark_contour: need 0 < ratio_min <= ratio_max");
    }
    if (steps == 0) throw std::invalid_argument("ndark_contour: steps must be >= 1");
    auto ratio = [&](std::size_t k) {
        return steps == 1 ? ratio_min : ratio_min + (ratio_max - ratio_min) * static_cast<double>(k) / (steps - 1);
    };
    std::vector<ContourPoint> grid(steps * steps);
    parallel_for(grid.size(), threads, [&](std::size_t idx) {
        const double r2 = ratio(idx / steps);
        const double r3 = ratio(idx % steps);
        const DarkAsymptote asym = ndark_asymptotic(ndark_build({1.0, r2, r3}, 2.0));
        grid[idx] = {r2, r3, figure_of_merit(asym.concurrence), asym.concurrence(0, 1), asym.concurrence(0, 2),
                     asym.concurrence(1, 2)};
    });
    return grid;
}

} // namespace qdent
