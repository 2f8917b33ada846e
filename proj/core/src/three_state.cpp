// three_state.cpp - two QDs and one lossy plasmon in the single-excitation manifold

#include <cmath>
#include <stdexcept>

#include "analytic_detail.hpp"
#include "qdent/analytic.hpp"
#include "qdent/units.hpp"

namespace qdent {

using cd = std::complex<double>;

namespace detail {

std::pair<cd, cd> bright_block(cd plasmon, cd bright, double eta, double eps, double tau)
{
    // M = mu I + N with mu = -i eps/2 and N^2 = (eta^2 - eps^2/4) I, so
    // exp(-i M tau) = exp(-eps tau/2) [cos(W tau) I - i tau sinc(W tau) N].
    const cd z = (eta * eta - 0.25 * eps * eps) * tau * tau;
    cd cos_part, sinc_part;
    if (std::abs(z) < 1e-3) {
        cos_part = 1.0 - z / 2.0 + z * z / 24.0 - z * z * z / 720.0 + z * z * z * z / 40320.0;
        sinc_part = 1.0 - z / 6.0 + z * z / 120.0 - z * z * z / 5040.0 + z * z * z * z / 362880.0;
    } else {
        const cd root = std::sqrt(z);
        cos_part = std::cos(root);
        sinc_part = std::sin(root) / root;
    }
    const double damp = std::exp(-0.5 * eps * tau);
    const cd i(0.0, 1.0);
    const cd n00(0.0, -0.5 * eps), n11(0.0, 0.5 * eps);
    const cd s = -i * tau * sinc_part;
    const cd p = damp * (cos_part * plasmon + s * (n00 * plasmon + eta * bright));
    const cd b = damp * (cos_part * bright + s * (eta * plasmon + n11 * bright));
    return {p, b};
}

} // namespace detail

double ThreeStateModel::alpha() const { return (g1 + g2) / std::sqrt(2.0); }
double ThreeStateModel::beta() const { return (g1 - g2) / std::sqrt(2.0); }
double ThreeStateModel::eta() const { return std::hypot(alpha(), beta()); }

double ThreeStateModel::x() const
{
    const double a = alpha();
    if (a == 0.0) throw std::invalid_argument("three-state model: x undefined for g1 + g2 = 0");
    return beta() / a;
}

ThreeStateAmplitudes ThreeStateAmplitudes::qd1_excited()
{
    const double r = 1.0 / std::sqrt(2.0);
    return {0.0, r, r};
}

double three_state_concurrence(const ThreeStateAmplitudes& amps)
{
    return std::abs(amps.aS * amps.aS - amps.aA * amps.aA);
}

std::array<cd, 3> three_state_eigenvalues(const ThreeStateModel& model)
{
    const double eta = model.eta();
    const cd root = std::sqrt(cd(4.0 * eta * eta - model.epsilon * model.epsilon, 0.0));
    const cd shift(0.0, -model.epsilon);
    return {cd(0.0), 0.5 * (shift - root), 0.5 * (shift + root)};
}

ThreeStateAmplitudes three_state_evolve(const ThreeStateModel& model, const ThreeStateAmplitudes& init, double t_fs)
{
    if (t_fs < 0.0) throw std::invalid_argument("three_state_evolve: t must be >= 0");
    if (model.epsilon < 0.0) throw std::invalid_argument("three_state_evolve: epsilon must be >= 0");
    const double tau = t_fs / units::hbar_mev_fs;
    const double alpha = model.alpha();
    const double beta = model.beta();
    const double eta = model.eta();
    const double eps = model.epsilon;

    if (eta == 0.0) return {init.a0 * std::exp(-eps * tau), init.aS, init.aA};

    const double disc = 4.0 * eta * eta - eps * eps;
    if (std::abs(disc) < 1e-6 * eta * eta) {
        const cd dark = (-beta * init.aS + alpha * init.aA) / eta;
        const cd bright = (alpha * init.aS + beta * init.aA) / eta;
        const auto [p, b] = detail::bright_block(init.a0, bright, eta, eps, tau);
        return {p, (alpha * b - beta * dark) / eta, (beta * b + alpha * dark) / eta};
    }

    // U = sum_k phi_k phi_k^T exp(-i w_k tau) / n_k with bilinear norms
    const auto w = three_state_eigenvalues(model);
    const cd dark = (-beta * init.aS + alpha * init.aA) / (eta * eta);
    ThreeStateAmplitudes out{0.0, -beta * dark, alpha * dark};
    for (int k = 1; k < 3; ++k) {
        const cd n = w[k] * w[k] + eta * eta;
        const cd proj = (w[k] * init.a0 + alpha * init.aS + beta * init.aA) / n;
        const cd phase = std::exp(cd(0.0, -1.0) * w[k] * tau);
        out.a0 += phase * proj * w[k];
        out.aS += phase * proj * alpha;
        out.aA += phase * proj * beta;
    }
    return out;
}

ThreeStateAmplitudes three_state_lossless(const ThreeStateModel& model, const ThreeStateAmplitudes& init, double t_fs)
{
    if (model.epsilon != 0.0) throw std::invalid_argument("three_state_lossless: epsilon must be 0");
    const double eta = model.eta();
    if (eta == 0.0) return init;
    const double alpha = model.alpha() / eta;
    const double beta = model.beta() / eta;
    const double phase = eta * t_fs / units::hbar_mev_fs;
    const double c = std::cos(phase);
    const cd is(0.0, std::sin(phase));

    const cd dark = -beta * init.aS + alpha * init.aA;
    const cd bright = alpha * init.aS + beta * init.aA;
    const cd bright_t = c * bright - is * init.a0;
    return {c * init.a0 - is * bright, alpha * bright_t - beta * dark, beta * bright_t + alpha * dark};
}

ThreeStateAsymptote three_state_asymptotic(const ThreeStateModel& model)
{
    if (!(model.epsilon > 0.0)) throw std::invalid_argument("three_state_asymptotic: epsilon must be > 0");
    const double x = model.x();
    const double denom = std::sqrt(2.0) * (1.0 + x * x);
    ThreeStateAsymptote out;
    out.aS = -x * (1.0 - x) / denom;
    out.aA = (1.0 - x) / denom;
    out.concurrence = (1.0 - x) * (1.0 - x) * (1.0 - x * x) / (2.0 * (1.0 + x * x) * (1.0 + x * x));
    return out;
}

ThreeStateAmplitudes short_time_amplitudes(double g1, double g2, double t_fs)
{
    const double r2 = std::sqrt(2.0);
    const double tau = t_fs / units::hbar_mev_fs;
    return {cd(0.0, -g1 * tau), 1.0 / r2 - g1 * (g1 + g2) * tau * tau / (2.0 * r2),
            1.0 / r2 + g1 * (g2 - g1) * tau * tau / (2.0 * r2)};
}

double rabi_ratio(int m, int n)
{
    if (m < 1 || n < 1) throw std::invalid_argument("rabi_ratio: m and n must be positive integers");
    return n / (m - 0.5);
}

} // namespace qdent
