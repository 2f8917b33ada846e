// analytic.hpp - closed-form dark evolution of QDs sharing one lossy plasmon
//
// These models work in the single-excitation manifold with QD dephasing
// neglected. Plasmon loss enters as an imaginary energy -i*eps on the plasmon
// amplitude, eps = gamma_s / 2. Energies are in meV, times in fs.
//
// Sign convention: the effective Hamiltonians here couple with +g, while the
// master-equation model uses -g. The two differ by the sign of the plasmon
// amplitude only, so populations and concurrences agree.

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qdent {

// ---------------------------------------------------------------------------
// Two QDs: basis {|0,0;1>, |S;0>, |A;0>}, S/A = (|0,1> +- |1,0>)/sqrt(2)

struct ThreeStateModel {
    double g1{0.0};
    double g2{0.0};
    double epsilon{0.0};

    static ThreeStateModel from_gamma(double g1, double g2, double gamma_s) { return {g1, g2, 0.5 * gamma_s}; }

    double alpha() const;   // (g1 + g2) / sqrt(2)
    double beta() const;    // (g1 - g2) / sqrt(2)
    double eta() const;     // sqrt(alpha^2 + beta^2)
    double x() const;       // beta / alpha
};

struct ThreeStateAmplitudes {
    std::complex<double> a0;  // |0,0;1>
    std::complex<double> aS;  // |S;0>
    std::complex<double> aA;  // |A;0>

    double norm_squared() const { return std::norm(a0) + std::norm(aS) + std::norm(aA); }
    /// QD1 excited, QD2 and plasmon empty: (0, 1/sqrt2, 1/sqrt2).
    static ThreeStateAmplitudes qd1_excited();
};

/// Pair concurrence of a single-excitation state: |aS^2 - aA^2|.
double three_state_concurrence(const ThreeStateAmplitudes& amps);

/// Eigenvalues (meV) of the effective matrix: {0, w_2, w_3} with
/// w_{2,3} = (-i eps -+ sqrt(4 eta^2 - eps^2)) / 2.
std::array<std::complex<double>, 3> three_state_eigenvalues(const ThreeStateModel& model);

/// Amplitudes at time t via the eigen-expansion with complex bilinear norms.
/// At the exceptional point 4 eta^2 = eps^2 the norms vanish, and a closed
/// form for the 2x2 bright block is used instead. eta = 0 is free evolution.
ThreeStateAmplitudes three_state_evolve(const ThreeStateModel& model, const ThreeStateAmplitudes& init, double t_fs);

/// Explicit cos/sin form for eps = 0. Throws std::invalid_argument if eps != 0.
ThreeStateAmplitudes three_state_lossless(const ThreeStateModel& model, const ThreeStateAmplitudes& init, double t_fs);

struct ThreeStateAsymptote {
    double aS{0.0};
    double aA{0.0};
    double concurrence{0.0};
};

/// t -> infinity limit for QD1 initially excited. Requires eps > 0.
ThreeStateAsymptote three_state_asymptotic(const ThreeStateModel& model);

/// Second-order expansion for QD1 excited and eps = 0.
ThreeStateAmplitudes short_time_amplitudes(double g1, double g2, double t_fs);

// ---------------------------------------------------------------------------
// N QDs: basis {plasmon, QD1, ..., QDN} with W(0,0) = -i eps, W(0,j) = W(j,0) = g_j

struct DarkModel {
    std::vector<double> g;          // meV, all > 0
    double epsilon{0.0};            // meV
    Eigen::VectorXcd w;             // N+1 eigenvalues; first N-1 are exactly 0
    Eigen::MatrixXcd v;             // column k is eigenvector k
    Eigen::VectorXcd norms;         // n_k = sum_j (v_j^k)^2, no conjugation
    std::uint64_t seed{0};          // seed that produced the degenerate basis

    std::size_t n_qd() const { return g.size(); }
    Eigen::MatrixXcd matrix() const;  // W
};

inline constexpr std::uint64_t kDarkModelSeed = 0x5eed'da4c'0001ULL;

/// Builds W's eigen-system. The N-1 zero modes come from seeded random
/// vectors orthogonalized against the coupling vector and each other; a
/// rank loss retries with the next seed.
DarkModel ndark_build(const std::vector<double>& g_mev, double gamma_s_mev, std::uint64_t seed = kDarkModelSeed);

/// b(t) = sum_k exp(-i w_k t / hbar) K_{.,k} for initial amplitudes b0
/// (b0[0] plasmon, b0[j] QDj). Falls back to the bright-block closed form at
/// the exceptional point.
Eigen::VectorXcd ndark_evolve(const DarkModel& model, const Eigen::VectorXcd& b0, double t_fs);

/// Unit amplitude on QD `qd` (0-based).
Eigen::VectorXcd ndark_qd_excited(std::size_t n_qd, std::size_t qd = 0);

struct DarkAsymptote {
    Eigen::VectorXcd amplitudes;   // b(infinity), N+1 entries
    Eigen::VectorXd population;    // P_i, N entries
    Eigen::MatrixXd concurrence;   // 2 sqrt(P_i P_j), zero diagonal
};

/// Keeps only the zero-energy contributions. Requires eps > 0.
DarkAsymptote ndark_asymptotic(const DarkModel& model, const Eigen::VectorXcd& b0);
DarkAsymptote ndark_asymptotic(const DarkModel& model);  // QD1 excited

/// Couplings (1, x, ..., x) scaled by g1.
std::vector<double> common_ratio_couplings(std::size_t n_qd, double x, double g1 = 1.0);

struct OptimalRatio {
    double x_star{0.0};
    double c_major{0.0};   // C_{1,j}
    double c_minor{0.0};   // C_{i,j}, i,j > 1 (0 for N = 2)
    double fom{0.0};
};

/// Asymptotic figure of merit for the common-ratio family at ratio x.
OptimalRatio ndark_common_ratio(std::size_t n_qd, double x);

/// Minimizes the asymptotic figure of merit over x in (0, 10]: a log-spaced
/// coarse scan followed by golden-section refinement to tol.
OptimalRatio ndark_optimal_ratio(std::size_t n_qd, double tol = 1e-6);

struct ContourPoint {
    double ratio2{0.0};
    double ratio3{0.0};
    double fom{0.0};
    double c12{0.0};
    double c13{0.0};
    double c23{0.0};
};

/// Three-QD asymptotic scan over g2/g1 and g3/g1 on a steps x steps grid,
/// row-major in ratio2. Grid points are evaluated on `threads` workers.
std::vector<ContourPoint> ndark_contour(double ratio_min, double ratio_max, std::size_t steps,
                                        unsigned threads = 1);

// ---------------------------------------------------------------------------
// Pulsed excitation estimates

/// g2/g1 that leaves QD1 excited after m - 1/2 Rabi cycles while QD2
/// completes n: n / (m - 1/2).
double rabi_ratio(int m, int n);

struct LocalField {
    double e0_local_vm{0.0};        // amplitude of the plasmon-induced field at the QD
    double rabi_per_fs{0.0};        // Omega_R in rad/fs
    double rabi_energy_mev{0.0};    // hbar * Omega_R
    // classical coupled-dipole parameters, SI units
    double coupling_j{0.0};         // J = hbar g / (d_s d_q)
    double a_s{0.0};                // 2 d_s^2 w_s / hbar
    double a_q{0.0};                // 2 d_q^2 w_q / hbar
    double gamma_q_per_s{0.0};      // 2 gamma_d
};

struct SystemSpec;

/// Local field and Rabi frequency for QD `qd` (0-based) under incident peak
/// field e0_vm. Throws ConfigError when gamma_s = 0.
LocalField local_field(const SystemSpec& spec, std::size_t qd, double e0_vm);

/// Classical coupled dipoles driven at frequency omega:
///   mu_s'' + w_s^2 mu_s + gamma_s mu_s' = A_s (E0 cos(omega t) + J mu_q)
///   mu_q'' + w_q^2 mu_q + gamma_q mu_q' = A_q (E0 cos(omega t) + J mu_s)
/// Units are whatever the caller chooses, as long as they are consistent.
struct CoupledDipoles {
    double omega_s{1.0}, gamma_s{0.0}, a_s{0.0};
    double omega_q{1.0}, gamma_q{0.0}, a_q{0.0};
    double coupling_j{0.0};
    double e0{0.0};
    double omega{1.0};

    /// d/dt of (mu_s, mu_s', mu_q, mu_q').
    Eigen::Vector4d derivative(double t, const Eigen::Vector4d& y) const;
    /// Uncoupled resonant steady-state amplitude A_s E0 / (w_s gamma_s).
    double plasmon_amplitude() const { return a_s * e0 / (omega_s * gamma_s); }
};

} // namespace qdent
