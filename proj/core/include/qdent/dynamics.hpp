// dynamics.hpp - master-equation propagation with optional Gaussian drive
//
// The equation of motion in the rotating frame is
//   d rho/dt = -(i/hbar)[H + H_d(t), rho] + L(rho),
//   H_d(t)   = -(E0 G(t) / 2) D
// where D is the dipole operator from build_drive. The frame rotates at the
// pulse carrier when a pulse is present and at the plasmon frequency otherwise.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qdent/model.hpp"

namespace qdent {

// ---------------------------------------------------------------------------
// Pulse

struct PulseSpec {
    double fluence_njcm2{0.0};
    double tau_fs{20.0};                 // FWHM of E^2(t)
    double carrier_mev{2050.0};
    std::optional<double> center_fs;     // defaults to 3*tau
    double cutoff_k{3.0};                // envelope is zero for |t - t_c| > k*tau

    double center() const { return center_fs.value_or(3.0 * tau_fs); }
    double end_time() const { return center() + cutoff_k * tau_fs; }
    void validate() const;
};

/// Peak field E0 (V/m) such that F = int sqrt(eps) c eps0 E(t)^2 dt for
/// E(t) = G(t) E0 cos(w0 t), with the fast cos^2 averaged to 1/2.
double fluence_to_amplitude(const PulseSpec& pulse, double eps_med);

/// G(t): Gaussian with FWHM(G^2) = tau, peak 1 at t_c, truncated at k*tau.
double pulse_envelope(const PulseSpec& pulse, double t_fs);

/// Frame frequency used for a run: the pulse carrier when driven, else w_s.
double rotating_frame_mev(const SystemSpec& spec, const std::optional<PulseSpec>& pulse);

// ---------------------------------------------------------------------------
// Initial states

struct InitialState {
    enum class Kind { AllGround, SingleQdExcited, CustomKet };

    Kind kind{Kind::AllGround};
    std::size_t qd{0};       // 0-based, used by SingleQdExcited
    Eigen::VectorXcd ket;    // used by CustomKet; normalized on use

    static InitialState ground() { return {}; }
    static InitialState single_qd_excited(std::size_t qd) { return {Kind::SingleQdExcited, qd, {}}; }
    static InitialState custom(Eigen::VectorXcd ket) { return {Kind::CustomKet, 0, std::move(ket)}; }
};

/// Parses "ground", "single_qd" (qd index supplied separately) or "custom".
InitialState::Kind parse_initial_kind(const std::string& name);

/// Pure-state projector with the plasmon in s = 0.
DenseMatrix initial_state(const InitialState& init, const SystemSpec& spec);

// ---------------------------------------------------------------------------
// Right-hand side

/// Evaluates the master-equation generator for a fixed model and pulse.
/// Holds no mutable state; one instance may be shared by several threads.
class MasterEquation {
public:
    MasterEquation(const Model& model, std::optional<PulseSpec> pulse);

    const Model& model() const { return *model_; }
    const std::optional<PulseSpec>& pulse() const { return pulse_; }
    bool driven() const { return pulse_.has_value() && drive_energy_mev_ != 0.0; }

    /// Drive energy prefactor at t (meV): H_d(t) = drive_coefficient(t) * D.
    double drive_coefficient(double t_fs) const;

    /// out = d rho / dt at time t (1/fs).
    void apply(double t_fs, const DenseMatrix& rho, DenseMatrix& out) const;
    DenseMatrix operator()(double t_fs, const DenseMatrix& rho) const;

    /// Times where the generator is not smooth (pulse support edges).
    std::vector<double> breakpoints() const;

private:
    const Model* model_;
    std::optional<PulseSpec> pulse_;
    double drive_energy_mev_{0.0};  // -E0/2 * (1 Debye * V/m -> meV)
    SparseOperator k_static_;       // -(i/hbar) H - 1/2 sum c A^+A
    SparseOperator k_drive_;        // -(i/hbar) D
    Eigen::MatrixXd diagonal_jump_weights_;  // sum_k c_k n_k(a) n_k(b) over diagonal A_k
    bool has_diagonal_jumps_{false};
    std::vector<const JumpOperator*> offdiagonal_jumps_;
};

/// Free-function form of the generator.
DenseMatrix rhs(double t_fs, const DenseMatrix& rho, const Model& model,
                const std::optional<PulseSpec>& pulse);

// ---------------------------------------------------------------------------
// Integration and trajectories

struct IntegratorConfig {
    enum class Method { AdaptiveRK45, FixedRK4, ExpmOracle };

    Method method{Method::AdaptiveRK45};
    double rtol{1e-8};
    double atol{1e-10};
    double max_step_fs{0.0};      // 0 = unlimited
    double fixed_step_fs{0.05};   // FixedRK4 and the piecewise-constant oracle
    double t_start_fs{0.0};
    double t_end_fs{2000.0};
    double stride_fs{1.0};
    std::size_t max_steps{50'000'000};
    std::size_t dense_limit{64};  // ExpmOracle refuses M above this

    bool check_positivity{false};       // eigen-decompose every sample
    double truncation_tolerance{1e-6};
    bool keep_final_state{true};
    bool keep_states{false};            // store every sampled rho

    void validate() const;
};

IntegratorConfig::Method parse_integrator_method(const std::string& name);

/// Named expectation value <O> recorded along a trajectory.
struct Observable {
    std::string name;
    SparseOperator op;
};

/// Projectors onto |S;0>, |A;0> and the pair S/A populations traced over the
/// plasmon and remaining QDs for every pair (1, j), plus |0..0;1>.
/// For two QDs the names are obs_S0, obs_A0, obs_S, obs_A, obs_vac1.
std::vector<Observable> default_observables(const BasisMap& basis);

struct TrajectoryDiagnostics {
    double max_trace_error{0.0};
    double max_hermiticity_residual{0.0};
    double min_eigenvalue{0.0};           // only when check_positivity
    bool positivity_checked{false};
    double max_top_level_population{0.0};
    bool truncation_warning{false};
    std::size_t accepted_steps{0};
    std::size_t rejected_steps{0};
    std::size_t rhs_evaluations{0};
};

struct Trajectory {
    std::size_t n_qd{0};
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // 0-based (i, j), i < j
    std::vector<double> times;
    std::vector<std::vector<double>> qd_population;   // [sample][qd]
    std::vector<double> plasmon_mean;                  // [sample]
    std::vector<std::vector<double>> concurrence;     // [sample][pair]
    std::vector<std::string> observable_names;
    std::vector<std::vector<double>> observables;     // [sample][observable]
    std::vector<DenseMatrix> states;                   // when keep_states
    std::optional<DenseMatrix> final_state;
    TrajectoryDiagnostics diagnostics;

    std::size_t pair_index(std::size_t i, std::size_t j) const;
    /// Symmetric N x N matrix with zero diagonal.
    Eigen::MatrixXd concurrence_matrix(std::size_t sample) const;
    /// Per-pair maximum over samples with t in [t0, t1].
    Eigen::MatrixXd max_concurrence(double t0, double t1) const;
    Eigen::MatrixXd max_concurrence() const;
    std::size_t observable_index(const std::string& name) const;
    std::vector<double> observable_series(const std::string& name) const;
};

/// Extra observables recorded alongside the defaults.
struct PropagationOptions {
    std::vector<Observable> observables;
    bool use_default_observables{true};
};

/// Integrates from rho0 over [t_start, t_end], sampling every stride.
/// Throws NumericalError on step-size underflow or a non-finite state.
Trajectory propagate(const DenseMatrix& rho0, const Model& model,
                     const std::optional<PulseSpec>& pulse, const IntegratorConfig& integ,
                     const PropagationOptions& options = {});

/// Exact propagation through the dense M^2 x M^2 Liouvillian exponential.
/// Drives are handled as piecewise constant over fixed_step_fs.
/// Throws ConfigError when M exceeds integ.dense_limit.
Trajectory propagate_expm_oracle(const DenseMatrix& rho0, const Model& model,
                                 const std::optional<PulseSpec>& pulse, const IntegratorConfig& integ,
                                 const PropagationOptions& options = {});

/// Dense Liouvillian acting on column-stacked vec(rho), built from Kronecker
/// products independently of MasterEquation::apply.
DenseMatrix dense_liouvillian(const Model& model, double drive_coefficient_mev = 0.0);

/// Writes the trajectory CSV (t_fs,P_qd1..,plasmon_n,C_i_j...,obs_*).
/// Header lines starting with '#' are written first.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const std::vector<std::string>& header_lines = {});

} // namespace qdent
