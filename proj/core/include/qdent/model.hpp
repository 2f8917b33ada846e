// model.hpp - composite QD/plasmon Hilbert space and the operators acting on it
//
// Basis ordering: the flat index of |q_N,...,q_1; s> is
//     index = (sum_i q_i 2^(i-1)) * n_levels + s
// so the plasmon level s varies fastest and QD1 is the least significant
// qubit. QDs are addressed 0-based in the API (qd 0 is QD1).

#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace qdent {

using cplx = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using SparseOperator = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

struct QDParams {
    double omega_mev{2050.0};     // transition energy
    double dipole_debye{13.0};
    double gamma_p_mev{1.9e-4};   // population decay, hbar*gamma_p
    double gamma_d_mev{2.0};      // dephasing, hbar*gamma_d
    double g_mev{10.0};           // plasmon coupling, hbar*g
};

struct PlasmonParams {
    double omega_mev{2050.0};
    double dipole_debye{4000.0};
    double gamma_mev{100.0};      // hbar*gamma_s
    int n_levels{3};              // levels s = 0 .. n_levels-1
};

struct SystemSpec {
    std::vector<QDParams> qds;
    PlasmonParams plasmon;
    double eps_med{2.25};

    std::size_t n_qd() const { return qds.size(); }
    std::size_t dimension() const;

    /// Throws ConfigError when an invariant is violated or the dense
    /// density matrix (dimension^2 complex entries) would exceed max_dimension^2.
    void validate(std::size_t max_dimension = 4096) const;
};

/// Convenience constructor: N identical QDs with the given couplings and
/// shared rates; remaining fields keep their defaults.
SystemSpec make_system(const std::vector<double>& g_mev, double gamma_s_mev, double gamma_d_mev,
                       int n_levels, double gamma_p_mev = 0.0);

struct BasisState {
    std::vector<int> q;  // q[0] is QD1
    int s{0};
    bool operator==(const BasisState&) const = default;
};

class BasisMap {
public:
    BasisMap(std::size_t n_qd, int n_levels);

    std::size_t size() const { return size_; }
    std::size_t n_qd() const { return n_qd_; }
    int n_levels() const { return n_levels_; }

    std::size_t index(std::size_t qd_bits, int s) const
    {
        return qd_bits * static_cast<std::size_t>(n_levels_) + static_cast<std::size_t>(s);
    }
    std::size_t index(const BasisState& state) const;
    BasisState state(std::size_t index) const;

    std::size_t qd_bits(std::size_t index) const { return index / static_cast<std::size_t>(n_levels_); }
    int plasmon_level(std::size_t index) const { return static_cast<int>(index % static_cast<std::size_t>(n_levels_)); }
    int occupation(std::size_t index, std::size_t qd) const { return static_cast<int>((qd_bits(index) >> qd) & 1u); }

    /// "|q_N,...,q_1;s>" label used in logs and CSV headers.
    std::string label(std::size_t index) const;

private:
    std::size_t n_qd_;
    int n_levels_;
    std::size_t size_;
};

BasisMap build_basis(const SystemSpec& spec);

struct Operators {
    std::vector<SparseOperator> sigma;      // QD lowering operators
    std::vector<SparseOperator> sigma_dag;
    SparseOperator b;                       // plasmon annihilation, truncated
    SparseOperator b_dag;
    SparseOperator identity;
};

Operators build_operators(const SystemSpec& spec, const BasisMap& basis);

/// Static Hamiltonian (meV) in the frame rotating at frame_mev:
///   sum_i (w_i - w0) s_i^+ s_i + (w_s - w0) b^+ b - sum_i g_i (s_i^+ b + s_i b^+)
SparseOperator build_hamiltonian(const SystemSpec& spec, const Operators& ops, double frame_mev);
inline SparseOperator build_hamiltonian(const SystemSpec& spec, const Operators& ops)
{
    return build_hamiltonian(spec, ops, spec.plasmon.omega_mev);
}

/// Dipole operator D = sum_i d_i (s_i + s_i^+) + d_s (b + b^+), in Debye.
SparseOperator build_drive(const SystemSpec& spec, const Operators& ops);

struct JumpOperator {
    SparseOperator op;
    SparseOperator op_dag;
    double rate_per_fs{0.0};
    std::string label;
};

/// GKSL channels: b at gamma_s, s_i at gamma_p, s_i^+ s_i at 2*gamma_d.
/// Channels with zero rate are omitted.
std::vector<JumpOperator> build_jump_operators(const SystemSpec& spec, const Operators& ops);

/// L(rho) = sum_k c_k (A rho A^+ - {A^+ A, rho}/2), in 1/fs.
DenseMatrix apply_lindblad(const SystemSpec& spec, const Operators& ops, const DenseMatrix& rho);
DenseMatrix apply_lindblad(const std::vector<JumpOperator>& jumps, const DenseMatrix& rho);

/// Everything needed to evaluate the master equation for one system.
/// Immutable after construction; safe to share between threads.
struct Model {
    SystemSpec spec;
    BasisMap basis;
    Operators ops;
    double frame_mev;
    SparseOperator hamiltonian;  // meV
    SparseOperator dipole;       // Debye
    std::vector<JumpOperator> jumps;

    Model(SystemSpec spec, double frame_mev);
    explicit Model(SystemSpec spec) : Model(spec, spec.plasmon.omega_mev) {}
};

} // namespace qdent
