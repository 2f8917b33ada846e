// dynamics.cpp - master-equation generator, Runge-Kutta propagation, sampling

#include "qdent/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qdent/entanglement.hpp"
#include "recorder.hpp"
#include "qdent/errors.hpp"
#include "qdent/units.hpp"

namespace qdent {

InitialState::Kind parse_initial_kind(const std::string& name)
{
    if (name == "ground" || name == "all_ground" || name == "all-ground") return InitialState::Kind::AllGround;
    if (name == "single_qd" || name == "single-qd-excited" || name == "single_qd_excited") {
        return InitialState::Kind::SingleQdExcited;
    }
    if (name == "custom") return InitialState::Kind::CustomKet;
    throw ConfigError("unknown initial state kind '" + name + "'");
}

DenseMatrix initial_state(const InitialState& init, const SystemSpec& spec)
{
    const BasisMap basis = build_basis(spec);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()));
    switch (init.kind) {
    case InitialState::Kind::AllGround:
        psi(static_cast<Eigen::Index>(basis.index(0, 0))) = 1.0;
        break;
    case InitialState::Kind::SingleQdExcited:
        if (init.qd >= spec.n_qd()) throw ConfigError("initial state: excited QD index out of range");
        psi(static_cast<Eigen::Index>(basis.index(std::size_t{1} << init.qd, 0))) = 1.0;
        break;
    case InitialState::Kind::CustomKet: {
        if (init.ket.size() != psi.size()) throw ConfigError("initial state: custom ket has wrong dimension");
        const double norm = init.ket.norm();
        if (!(norm > 0.0)) throw ConfigError("initial state: custom ket has zero norm");
        psi = init.ket / norm;
        break;
    }
    }
    return psi * psi.adjoint();
}

// ---------------------------------------------------------------------------

MasterEquation::MasterEquation(const Model& model, std::optional<PulseSpec> pulse)
    : model_(&model), pulse_(std::move(pulse))
{
    if (pulse_) {
        pulse_->validate();
        if (std::abs(pulse_->carrier_mev - model.frame_mev) > 1e-9 * pulse_->carrier_mev) {
            throw ConfigError("model must be built in the frame rotating at the pulse carrier");
        }
        const double e0 = fluence_to_amplitude(*pulse_, model.spec.eps_med);
        drive_energy_mev_ = -0.5 * units::dipole_field_energy_mev(1.0, e0);
    }

    const cplx minus_i_over_hbar(0.0, -1.0 / units::hbar_mev_fs);
    k_static_ = minus_i_over_hbar * model.hamiltonian;
    k_drive_ = minus_i_over_hbar * model.dipole;

    const auto dim = static_cast<Eigen::Index>(model.basis.size());
    diagonal_jump_weights_ = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& jump : model.jumps) {
        SparseOperator number = jump.op_dag * jump.op;
        k_static_ -= (0.5 * jump.rate_per_fs) * number;

        bool diagonal = true;
        for (Eigen::Index r = 0; r < jump.op.outerSize() && diagonal; ++r) {
            for (SparseOperator::InnerIterator it(jump.op, r); it; ++it) {
                if (it.row() != it.col()) {
                    diagonal = false;
                    break;
                }
            }
        }
        if (diagonal) {
            const Eigen::VectorXd d = DenseMatrix(jump.op).diagonal().real();
            diagonal_jump_weights_.noalias() += jump.rate_per_fs * (d * d.transpose());
            has_diagonal_jumps_ = true;
        } else {
            offdiagonal_jumps_.push_back(&jump);
        }
    }
    k_static_.makeCompressed();
}

double MasterEquation::drive_coefficient(double t_fs) const
{
    if (!pulse_) return 0.0;
    return drive_energy_mev_ * pulse_envelope(*pulse_, t_fs);
}

void MasterEquation::apply(double t_fs, const DenseMatrix& rho, DenseMatrix& out) const
{
    const auto dim = k_static_.rows();
    if (rho.rows() != dim || rho.cols() != dim) {
        throw std::invalid_argument("master equation: density matrix dimension mismatch");
    }
    out.resize(dim, dim);
    out.noalias() = k_static_ * rho;
    const double c = drive_coefficient(t_fs);
    if (c != 0.0) out.noalias() += c * (k_drive_ * rho);

    // K rho + rho K^+ = K rho + (K rho)^+ for Hermitian rho
    for (Eigen::Index col = 0; col < dim; ++col) {
        out(col, col) = 2.0 * out(col, col).real();
        for (Eigen::Index row = col + 1; row < dim; ++row) {
            const cplx s = out(row, col) + std::conj(out(col, row));
            out(row, col) = s;
            out(col, row) = std::conj(s);
        }
    }

    if (has_diagonal_jumps_) {
        out.array() += rho.array() * diagonal_jump_weights_.array().cast<cplx>();
    }
    // A rho A^+ = A (A rho)^+ for Hermitian rho; keeps both products sparse * dense
    DenseMatrix a_rho, a_rho_adj;
    for (const JumpOperator* jump : offdiagonal_jumps_) {
        a_rho.noalias() = jump->op * rho;
        a_rho_adj = a_rho.adjoint();
        out.noalias() += jump->rate_per_fs * (jump->op * a_rho_adj);
    }
}

DenseMatrix MasterEquation::operator()(double t_fs, const DenseMatrix& rho) const
{
    DenseMatrix out;
    apply(t_fs, rho, out);
    return out;
}

std::vector<double> MasterEquation::breakpoints() const
{
    if (!pulse_) return {};
    const double half = pulse_->cutoff_k * pulse_->tau_fs;
    return {pulse_->center() - half, pulse_->center() + half};
}

DenseMatrix rhs(double t_fs, const DenseMatrix& rho, const Model& model, const std::optional<PulseSpec>& pulse)
{
    return MasterEquation(model, pulse)(t_fs, rho);
}

// ---------------------------------------------------------------------------

void IntegratorConfig::validate() const
{
    if (!(rtol > 0.0) || !(atol > 0.0)) throw ConfigError("integrator tolerances must be > 0");
    if (!(stride_fs > 0.0)) throw ConfigError("integrator output stride must be > 0");
    if (!(t_end_fs >= t_start_fs)) throw ConfigError("integrator end time precedes start time");
    if (!(fixed_step_fs > 0.0)) throw ConfigError("integrator fixed step must be > 0");
    if (max_step_fs < 0.0) throw ConfigError("integrator max step must be >= 0");
}

IntegratorConfig::Method parse_integrator_method(const std::string& name)
{
    if (name == "rk45" || name == "adaptive" || name == "dopri5") return IntegratorConfig::Method::AdaptiveRK45;
    if (name == "rk4") return IntegratorConfig::Method::FixedRK4;
    if (name == "expm" || name == "oracle") return IntegratorConfig::Method::ExpmOracle;
    throw ConfigError("unknown integrator method '" + name + "'");
}

std::vector<Observable> default_observables(const BasisMap& basis)
{
    std::vector<Observable> obs;
    const auto dim = static_cast<Eigen::Index>(basis.size());
    const std::size_t n = basis.n_qd();
    using Triplet = Eigen::Triplet<cplx>;

    auto projector = [dim](const std::vector<Triplet>& entries) {
        SparseOperator op(dim, dim);
        op.setFromTriplets(entries.begin(), entries.end());
        op.makeCompressed();
        return op;
    };
    auto add_pair_block = [](std::vector<Triplet>& entries, std::size_t u, std::size_t v, double sign) {
        const auto iu = static_cast<Eigen::Index>(u);
        const auto iv = static_cast<Eigen::Index>(v);
        entries.emplace_back(iu, iu, 0.5);
        entries.emplace_back(iv, iv, 0.5);
        entries.emplace_back(iu, iv, 0.5 * sign);
        entries.emplace_back(iv, iu, 0.5 * sign);
    };

    for (std::size_t j = 1; j < n; ++j) {
        const std::string suffix = n == 2 ? "" : "_1_" + std::to_string(j + 1);
        const std::size_t bit_1 = 1;
        const std::size_t bit_j = std::size_t{1} << j;
        for (double sign : {1.0, -1.0}) {
            const std::string tag = sign > 0 ? "S" : "A";
            std::vector<Triplet> zero_order;
            add_pair_block(zero_order, basis.index(bit_1, 0), basis.index(bit_j, 0), sign);
            obs.push_back({"obs_" + tag + "0" + suffix, projector(zero_order)});

            std::vector<Triplet> traced;
            for (std::size_t rest = 0; rest < (std::size_t{1} << n); ++rest) {
                if (rest & (bit_1 | bit_j)) continue;
                for (int s = 0; s < basis.n_levels(); ++s) {
                    add_pair_block(traced, basis.index(rest | bit_1, s), basis.index(rest | bit_j, s), sign);
                }
            }
            obs.push_back({"obs_" + tag + suffix, projector(traced)});
        }
    }
    if (basis.n_levels() >= 2) {
        const auto idx = static_cast<Eigen::Index>(basis.index(0, 1));
        obs.push_back({"obs_vac1", projector({Triplet(idx, idx, 1.0)})});
    }
    return obs;
}

// ---------------------------------------------------------------------------
// Trajectory helpers

std::size_t Trajectory::pair_index(std::size_t i, std::size_t j) const
{
    if (i > j) std::swap(i, j);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        if (pairs[k].first == i && pairs[k].second == j) return k;
    }
    throw std::out_of_range("trajectory: no such QD pair");
}

Eigen::MatrixXd Trajectory::concurrence_matrix(std::size_t sample) const
{
    const auto n = static_cast<Eigen::Index>(n_qd);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(pairs[k].first);
        const auto j = static_cast<Eigen::Index>(pairs[k].second);
        c(i, j) = c(j, i) = concurrence.at(sample)[k];
    }
    return c;
}

Eigen::MatrixXd Trajectory::max_concurrence(double t0, double t1) const
{
    const auto n = static_cast<Eigen::Index>(n_qd);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t s = 0; s < times.size(); ++s) {
        if (times[s] < t0 || times[s] > t1) continue;
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const auto i = static_cast<Eigen::Index>(pairs[k].first);
            const auto j = static_cast<Eigen::Index>(pairs[k].second);
            c(i, j) = c(j, i) = std::max(c(i, j), concurrence[s][k]);
        }
    }
    return c;
}

Eigen::MatrixXd Trajectory::max_concurrence() const
{
    return max_concurrence(-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
}

std::size_t Trajectory::observable_index(const std::string& name) const
{
    const auto it = std::find(observable_names.begin(), observable_names.end(), name);
    if (it == observable_names.end()) throw std::out_of_range("trajectory: unknown observable " + name);
    return static_cast<std::size_t>(it - observable_names.begin());
}

std::vector<double> Trajectory::observable_series(const std::string& name) const
{
    const std::size_t k = observable_index(name);
    std::vector<double> series;
    series.reserve(observables.size());
    for (const auto& row : observables) series.push_back(row[k]);
    return series;
}

// ---------------------------------------------------------------------------
// Propagation

namespace detail {

Recorder::Recorder(const Model& model, const IntegratorConfig& integ, const PropagationOptions& options)
    : model_(model), integ_(integ)
{
    if (options.use_default_observables) observables_ = default_observables(model.basis);
    observables_.insert(observables_.end(), options.observables.begin(), options.observables.end());

    traj_.n_qd = model.spec.n_qd();
    traj_.pairs = qd_pairs(traj_.n_qd);
    for (const auto& o : observables_) traj_.observable_names.push_back(o.name);
    traj_.diagnostics.min_eigenvalue = std::numeric_limits<double>::infinity();
}

void Recorder::record(double t, DenseMatrix& rho)
{
    const BasisMap& basis = model_.basis;
    const auto dim = static_cast<Eigen::Index>(basis.size());
    if (!rho.allFinite()) {
        std::ostringstream msg;
        msg << "non-finite density matrix at t = " << t << " fs";
        throw NumericalError(msg.str());
    }

    auto& diag = traj_.diagnostics;
    diag.max_hermiticity_residual =
        std::max(diag.max_hermiticity_residual, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
    rho = (0.5 * (rho + rho.adjoint())).eval();

    const cplx trace = rho.trace();
    diag.max_trace_error = std::max(diag.max_trace_error, std::abs(trace - 1.0));

    std::vector<double> pops(basis.n_qd(), 0.0);
    double plasmon = 0.0;
    double top = 0.0;
    for (Eigen::Index k = 0; k < dim; ++k) {
        const double p = rho(k, k).real();
        const auto idx = static_cast<std::size_t>(k);
        for (std::size_t q = 0; q < basis.n_qd(); ++q) {
            if (basis.occupation(idx, q)) pops[q] += p;
        }
        const int s = basis.plasmon_level(idx);
        plasmon += s * p;
        if (s == basis.n_levels() - 1) top += p;
    }
    diag.max_top_level_population = std::max(diag.max_top_level_population, top);
    if (top > integ_.truncation_tolerance) diag.truncation_warning = true;

    std::vector<double> conc;
    conc.reserve(traj_.pairs.size());
    for (const auto& [i, j] : traj_.pairs) conc.push_back(concurrence(partial_trace_pair(rho, i, j, basis)));

    std::vector<double> obs;
    obs.reserve(observables_.size());
    for (const auto& o : observables_) {
        cplx acc = 0.0;
        for (Eigen::Index r = 0; r < o.op.outerSize(); ++r) {
            for (SparseOperator::InnerIterator it(o.op, r); it; ++it) acc += it.value() * rho(it.col(), it.row());
        }
        obs.push_back(acc.real());
    }

    if (integ_.check_positivity) {
        Eigen::SelfAdjointEigenSolver<DenseMatrix> es(rho, Eigen::EigenvaluesOnly);
        diag.min_eigenvalue = std::min(diag.min_eigenvalue, es.eigenvalues().minCoeff());
        diag.positivity_checked = true;
    }

    traj_.times.push_back(t);
    traj_.qd_population.push_back(std::move(pops));
    traj_.plasmon_mean.push_back(plasmon);
    traj_.concurrence.push_back(std::move(conc));
    traj_.observables.push_back(std::move(obs));
    if (integ_.keep_states) traj_.states.push_back(rho);
}

Trajectory Recorder::finish(const DenseMatrix& final_rho)
{
    if (integ_.keep_final_state) traj_.final_state = final_rho;
    if (!traj_.diagnostics.positivity_checked) traj_.diagnostics.min_eigenvalue = 0.0;
    return std::move(traj_);
}

std::vector<double> sample_times(const IntegratorConfig& integ)
{
    std::vector<double> times;
    const double span = integ.t_end_fs - integ.t_start_fs;
    const auto count = static_cast<std::size_t>(std::floor(span / integ.stride_fs + 1e-9)) + 1;
    times.reserve(count);
    for (std::size_t k = 0; k < count; ++k) times.push_back(integ.t_start_fs + static_cast<double>(k) * integ.stride_fs);
    return times;
}

std::vector<Stop> build_stops(const IntegratorConfig& integ, const std::vector<double>& breakpoints)
{
    std::vector<Stop> stops;
    const auto times = sample_times(integ);
    for (std::size_t k = 1; k < times.size(); ++k) stops.push_back({times[k], true});
    for (double b : breakpoints) {
        if (b > integ.t_start_fs && b < integ.t_end_fs) stops.push_back({b, false});
    }
    std::sort(stops.begin(), stops.end(), [](const Stop& a, const Stop& b) { return a.t < b.t; });
    std::vector<Stop> merged;
    for (const auto& s : stops) {
        if (!merged.empty() && std::abs(merged.back().t - s.t) <= 1e-12 * std::max(1.0, std::abs(s.t))) {
            merged.back().sample = merged.back().sample || s.sample;
        } else {
            merged.push_back(s);
        }
    }
    return merged;
}

} // namespace detail

namespace {

using detail::Recorder;
using detail::Stop;
using detail::build_stops;

double scaled_error(const DenseMatrix& y0, const DenseMatrix& y1, const DenseMatrix& err, double atol, double rtol)
{
    const Eigen::ArrayXXd scale = atol + rtol * y0.array().abs().max(y1.array().abs());
    return std::sqrt((err.array().abs() / scale).square().mean());
}

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

Trajectory integrate_rk45(const DenseMatrix& rho0, const Model& model, const MasterEquation& eq,
                          const IntegratorConfig& integ, const PropagationOptions& options)
{
    Recorder rec(model, integ, options);
    auto& diag = rec.diagnostics();

    DenseMatrix y = rho0;
    double t = integ.t_start_fs;
    rec.record(t, y);

    const auto stops = build_stops(integ, eq.breakpoints());
    if (stops.empty()) return rec.finish(y);

    DenseMatrix k1, k2, k3, k4, k5, k6, k7, stage, y_new, err;
    eq.apply(t, y, k1);
    ++diag.rhs_evaluations;

    // Starting step from the magnitudes of y and f.
    const double d0 = y.cwiseAbs().maxCoeff();
    const double d1 = k1.cwiseAbs().maxCoeff();
    double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-3 : 0.01 * d0 / d1;
    h = std::min(h, integ.stride_fs);
    if (integ.max_step_fs > 0.0) h = std::min(h, integ.max_step_fs);

    constexpr double safety = 0.9, alpha = 0.17, beta = 0.04;
    double err_prev = 1e-4;
    bool last_rejected = false;
    std::size_t steps = 0;

    for (const Stop& stop : stops) {
        while (t < stop.t) {
            if (++steps > integ.max_steps) throw NumericalError("integrator exceeded max_steps");
            const double remaining = stop.t - t;
            const bool clipped = h >= remaining;
            const double step = clipped ? remaining : h;

            stage = y + step * a21 * k1;
            eq.apply(t + c2 * step, stage, k2);
            stage = y + step * (a31 * k1 + a32 * k2);
            eq.apply(t + c3 * step, stage, k3);
            stage = y + step * (a41 * k1 + a42 * k2 + a43 * k3);
            eq.apply(t + c4 * step, stage, k4);
            stage = y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            eq.apply(t + c5 * step, stage, k5);
            stage = y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            eq.apply(t + step, stage, k6);
            y_new = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            eq.apply(t + step, y_new, k7);
            diag.rhs_evaluations += 6;

            err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            const double e = scaled_error(y, y_new, err, integ.atol, integ.rtol);
            if (!std::isfinite(e)) throw NumericalError("integrator produced a non-finite error estimate");

            if (e <= 1.0) {
                double factor = safety * std::pow(std::max(e, 1e-10), -alpha) * std::pow(err_prev, beta);
                factor = std::clamp(factor, 0.2, 5.0);
                if (last_rejected) factor = std::min(factor, 1.0);
                const double proposal = step * factor;
                h = clipped ? std::max(h, proposal) : proposal;
                if (integ.max_step_fs > 0.0) h = std::min(h, integ.max_step_fs);
                t = clipped ? stop.t : t + step;
                y.swap(y_new);
                k1.swap(k7);
                err_prev = std::max(e, 1e-4);
                last_rejected = false;
                ++diag.accepted_steps;
            } else {
                h = step * std::max(0.2, safety * std::pow(e, -0.2));
                last_rejected = true;
                ++diag.rejected_steps;
            }
            if (h < 1e-12 * std::max(1.0, std::abs(t))) {
                std::ostringstream msg;
                msg << "step size underflow at t = " << t << " fs";
                throw NumericalError(msg.str());
            }
        }
        if (stop.sample) rec.record(t, y);
    }
    return rec.finish(y);
}

Trajectory integrate_rk4(const DenseMatrix& rho0, const Model& model, const MasterEquation& eq,
                         const IntegratorConfig& integ, const PropagationOptions& options)
{
    Recorder rec(model, integ, options);
    auto& diag = rec.diagnostics();
    DenseMatrix y = rho0;
    double t = integ.t_start_fs;
    rec.record(t, y);

    DenseMatrix k1, k2, k3, k4, stage;
    for (const Stop& stop : build_stops(integ, eq.breakpoints())) {
        while (t < stop.t) {
            const double remaining = stop.t - t;
            const bool last = integ.fixed_step_fs >= remaining * (1.0 - 1e-12);
            const double h = last ? remaining : integ.fixed_step_fs;
            eq.apply(t, y, k1);
            stage = y + 0.5 * h * k1;
            eq.apply(t + 0.5 * h, stage, k2);
            stage = y + 0.5 * h * k2;
            eq.apply(t + 0.5 * h, stage, k3);
            stage = y + h * k3;
            eq.apply(t + h, stage, k4);
            y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            diag.rhs_evaluations += 4;
            ++diag.accepted_steps;
            t = last ? stop.t : t + h;
        }
        if (stop.sample) rec.record(t, y);
    }
    return rec.finish(y);
}

} // namespace

Trajectory propagate(const DenseMatrix& rho0, const Model& model, const std::optional<PulseSpec>& pulse,
                     const IntegratorConfig& integ, const PropagationOptions& options)
{
    integ.validate();
    if (static_cast<std::size_t>(rho0.rows()) != model.basis.size() || rho0.rows() != rho0.cols()) {
        throw ConfigError("initial density matrix has the wrong dimension");
    }
    const MasterEquation eq(model, pulse);
    switch (integ.method) {
    case IntegratorConfig::Method::AdaptiveRK45:
        return integrate_rk45(rho0, model, eq, integ, options);
    case IntegratorConfig::Method::FixedRK4:
        return integrate_rk4(rho0, model, eq, integ, options);
    case IntegratorConfig::Method::ExpmOracle:
        return propagate_expm_oracle(rho0, model, pulse, integ, options);
    }
    throw ConfigError("unknown integrator method");
}

} // namespace qdent
