// model.cpp - basis, ladder operators, Hamiltonian, dipole and dissipators

#include "qdent/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qdent/errors.hpp"
#include "qdent/units.hpp"

namespace qdent {

namespace {

using Triplet = Eigen::Triplet<cplx>;

SparseOperator from_triplets(std::size_t dim, const std::vector<Triplet>& entries)
{
    const auto n = static_cast<Eigen::Index>(dim);
    SparseOperator op(n, n);
    op.setFromTriplets(entries.begin(), entries.end());
    op.makeCompressed();
    return op;
}

SparseOperator adjoint_of(const SparseOperator& op)
{
    SparseOperator adj = op.adjoint();
    adj.makeCompressed();
    return adj;
}

SystemSpec validated(SystemSpec spec)
{
    spec.validate();
    return spec;
}

} // namespace

std::size_t SystemSpec::dimension() const
{
    if (qds.size() >= std::numeric_limits<std::size_t>::digits - 8 || plasmon.n_levels < 0) {
        throw ConfigError("system dimension overflows");
    }
    return (std::size_t{1} << qds.size()) * static_cast<std::size_t>(plasmon.n_levels);
}

void SystemSpec::validate(std::size_t max_dimension) const
{
    if (qds.empty()) throw ConfigError("system needs at least one quantum dot");
    if (qds.size() > 20) throw ConfigError("too many quantum dots for a dense density matrix");
    if (plasmon.n_levels < 2) throw ConfigError("plasmon.n_levels must be >= 2");
    if (plasmon.gamma_mev < 0.0) throw ConfigError("plasmon decay rate must be >= 0");
    if (!(eps_med > 0.0)) throw ConfigError("eps_med must be positive");
    for (std::size_t i = 0; i < qds.size(); ++i) {
        const auto& qd = qds[i];
        std::ostringstream who;
        who << "qd." << i + 1 << ": ";
        if (!(qd.omega_mev > 0.0)) throw ConfigError(who.str() + "omega must be positive");
        if (qd.gamma_p_mev < 0.0 || qd.gamma_d_mev < 0.0) throw ConfigError(who.str() + "rates must be >= 0");
        if (qd.g_mev < 0.0) throw ConfigError(who.str() + "coupling must be >= 0");
    }
    const std::size_t dim = dimension();
    if (dim > max_dimension) {
        std::ostringstream msg;
        msg << "dimension M = " << dim << " exceeds the configured limit " << max_dimension;
        throw ConfigError(msg.str());
    }
}

SystemSpec make_system(const std::vector<double>& g_mev, double gamma_s_mev, double gamma_d_mev,
                       int n_levels, double gamma_p_mev)
{
    SystemSpec spec;
    spec.plasmon.gamma_mev = gamma_s_mev;
    spec.plasmon.n_levels = n_levels;
    for (double g : g_mev) {
        QDParams qd;
        qd.g_mev = g;
        qd.gamma_d_mev = gamma_d_mev;
        qd.gamma_p_mev = gamma_p_mev;
        spec.qds.push_back(qd);
    }
    return spec;
}

BasisMap::BasisMap(std::size_t n_qd, int n_levels)
    : n_qd_(n_qd), n_levels_(n_levels), size_((std::size_t{1} << n_qd) * static_cast<std::size_t>(n_levels))
{
    if (n_levels < 1) throw ConfigError("basis needs at least one plasmon level");
}

std::size_t BasisMap::index(const BasisState& st) const
{
    if (st.q.size() != n_qd_ || st.s < 0 || st.s >= n_levels_) {
        throw std::out_of_range("basis state does not belong to this basis");
    }
    std::size_t bits = 0;
    for (std::size_t i = 0; i < n_qd_; ++i) {
        if (st.q[i] != 0 && st.q[i] != 1) throw std::out_of_range("QD occupation must be 0 or 1");
        bits |= static_cast<std::size_t>(st.q[i]) << i;
    }
    return index(bits, st.s);
}

BasisState BasisMap::state(std::size_t idx) const
{
    if (idx >= size_) throw std::out_of_range("basis index out of range");
    BasisState st;
    st.q.resize(n_qd_);
    for (std::size_t i = 0; i < n_qd_; ++i) st.q[i] = occupation(idx, i);
    st.s = plasmon_level(idx);
    return st;
}

std::string BasisMap::label(std::size_t idx) const
{
    const BasisState st = state(idx);
    std::ostringstream out;
    out << '|';
    for (std::size_t k = n_qd_; k-- > 0;) {
        out << st.q[k];
        if (k != 0) out << ',';
    }
    out << ';' << st.s << '>';
    return out.str();
}

BasisMap build_basis(const SystemSpec& spec)
{
    spec.dimension();
    return BasisMap(spec.n_qd(), spec.plasmon.n_levels);
}

Operators build_operators(const SystemSpec& spec, const BasisMap& basis)
{
    const std::size_t dim = basis.size();
    Operators ops;

    for (std::size_t qd = 0; qd < spec.n_qd(); ++qd) {
        std::vector<Triplet> entries;
        entries.reserve(dim / 2);
        const std::size_t bit = std::size_t{1} << qd;
        for (std::size_t col = 0; col < dim; ++col) {
            const std::size_t bits = basis.qd_bits(col);
            if ((bits & bit) == 0) continue;
            const std::size_t row = basis.index(bits & ~bit, basis.plasmon_level(col));
            entries.emplace_back(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col), 1.0);
        }
        ops.sigma.push_back(from_triplets(dim, entries));
        ops.sigma_dag.push_back(adjoint_of(ops.sigma.back()));
    }

    std::vector<Triplet> entries;
    entries.reserve(dim);
    for (std::size_t col = 0; col < dim; ++col) {
        const int s = basis.plasmon_level(col);
        if (s == 0) continue;
        const std::size_t row = basis.index(basis.qd_bits(col), s - 1);
        entries.emplace_back(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col),
                             std::sqrt(static_cast<double>(s)));
    }
    ops.b = from_triplets(dim, entries);
    ops.b_dag = adjoint_of(ops.b);

    ops.identity = SparseOperator(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    ops.identity.setIdentity();
    return ops;
}

SparseOperator build_hamiltonian(const SystemSpec& spec, const Operators& ops, double frame_mev)
{
    const auto dim = ops.b.rows();
    SparseOperator h(dim, dim);
    const double plasmon_detuning = spec.plasmon.omega_mev - frame_mev;
    if (plasmon_detuning != 0.0) h += plasmon_detuning * SparseOperator(ops.b_dag * ops.b);
    for (std::size_t i = 0; i < spec.n_qd(); ++i) {
        const auto& qd = spec.qds[i];
        const double detuning = qd.omega_mev - frame_mev;
        if (detuning != 0.0) h += detuning * SparseOperator(ops.sigma_dag[i] * ops.sigma[i]);
        if (qd.g_mev != 0.0) {
            SparseOperator exchange = SparseOperator(ops.sigma_dag[i] * ops.b) + SparseOperator(ops.sigma[i] * ops.b_dag);
            h -= qd.g_mev * exchange;
        }
    }
    h.prune(cplx(0.0));
    h.makeCompressed();
    return h;
}

SparseOperator build_drive(const SystemSpec& spec, const Operators& ops)
{
    const auto dim = ops.b.rows();
    SparseOperator d(dim, dim);
    if (spec.plasmon.dipole_debye != 0.0) {
        d += spec.plasmon.dipole_debye * SparseOperator(ops.b + ops.b_dag);
    }
    for (std::size_t i = 0; i < spec.n_qd(); ++i) {
        const double di = spec.qds[i].dipole_debye;
        if (di != 0.0) d += di * SparseOperator(ops.sigma[i] + ops.sigma_dag[i]);
    }
    d.prune(cplx(0.0));
    d.makeCompressed();
    return d;
}

std::vector<JumpOperator> build_jump_operators(const SystemSpec& spec, const Operators& ops)
{
    std::vector<JumpOperator> jumps;
    auto add = [&jumps](SparseOperator op, double rate_mev, std::string label) {
        if (rate_mev <= 0.0) return;
        op.makeCompressed();
        JumpOperator j;
        j.op_dag = adjoint_of(op);
        j.op = std::move(op);
        j.rate_per_fs = units::angular_frequency(rate_mev);
        j.label = std::move(label);
        jumps.push_back(std::move(j));
    };
    add(ops.b, spec.plasmon.gamma_mev, "plasmon_decay");
    for (std::size_t i = 0; i < spec.n_qd(); ++i) {
        const auto& qd = spec.qds[i];
        const std::string tag = std::to_string(i + 1);
        add(ops.sigma[i], qd.gamma_p_mev, "qd" + tag + "_decay");
        add(SparseOperator(ops.sigma_dag[i] * ops.sigma[i]), 2.0 * qd.gamma_d_mev, "qd" + tag + "_dephasing");
    }
    return jumps;
}

DenseMatrix apply_lindblad(const std::vector<JumpOperator>& jumps, const DenseMatrix& rho)
{
    DenseMatrix out = DenseMatrix::Zero(rho.rows(), rho.cols());
    for (const auto& j : jumps) {
        if (j.op.rows() != rho.rows() || rho.rows() != rho.cols()) {
            throw std::invalid_argument("apply_lindblad: density matrix dimension mismatch");
        }
        const SparseOperator number = j.op_dag * j.op;
        DenseMatrix a_rho = j.op * rho;
        DenseMatrix n_rho = number * rho;
        out.noalias() += j.rate_per_fs * (a_rho * j.op_dag);
        out.noalias() -= 0.5 * j.rate_per_fs * n_rho;
        out.noalias() -= 0.5 * j.rate_per_fs * (rho * number);
    }
    return out;
}

DenseMatrix apply_lindblad(const SystemSpec& spec, const Operators& ops, const DenseMatrix& rho)
{
    if (rho.rows() != ops.b.rows() || rho.cols() != ops.b.cols()) {
        throw std::invalid_argument("apply_lindblad: density matrix dimension mismatch");
    }
    return apply_lindblad(build_jump_operators(spec, ops), rho);
}

Model::Model(SystemSpec s, double frame)
    : spec(validated(std::move(s))),
      basis(build_basis(spec)),
      ops(build_operators(spec, basis)),
      frame_mev(frame),
      hamiltonian(build_hamiltonian(spec, ops, frame)),
      dipole(build_drive(spec, ops)),
      jumps(build_jump_operators(spec, ops))
{
}

} // namespace qdent
