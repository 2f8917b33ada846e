// expm_oracle.cpp - dense Liouvillian exponential used as a reference propagator

#include <cmath>
#include <map>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "qdent/dynamics.hpp"
#include "qdent/errors.hpp"
#include "qdent/units.hpp"
#include "recorder.hpp"

namespace qdent {

namespace {

Eigen::VectorXcd vec(const DenseMatrix& rho)
{
    return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

DenseMatrix unvec(const Eigen::VectorXcd& v, Eigen::Index dim)
{
    return Eigen::Map<const DenseMatrix>(v.data(), dim, dim);
}

} // namespace

DenseMatrix dense_liouvillian(const Model& model, double drive_coefficient_mev)
{
    const auto dim = static_cast<Eigen::Index>(model.basis.size());
    const DenseMatrix id = DenseMatrix::Identity(dim, dim);
    DenseMatrix h = DenseMatrix(model.hamiltonian);
    if (drive_coefficient_mev != 0.0) h += drive_coefficient_mev * DenseMatrix(model.dipole);

    // vec(A rho B) = (B^T kron A) vec(rho) for column-stacked vec
    const cplx minus_i_over_hbar(0.0, -1.0 / units::hbar_mev_fs);
    DenseMatrix l = minus_i_over_hbar * (Eigen::kroneckerProduct(id, h).eval() -
                                         Eigen::kroneckerProduct(h.transpose(), id).eval());
    for (const auto& jump : model.jumps) {
        const DenseMatrix a = DenseMatrix(jump.op);
        const DenseMatrix n = a.adjoint() * a;
        l += jump.rate_per_fs * (Eigen::kroneckerProduct(a.conjugate(), a).eval() -
                                 0.5 * Eigen::kroneckerProduct(id, n).eval() -
                                 0.5 * Eigen::kroneckerProduct(n.transpose(), id).eval());
    }
    return l;
}

Trajectory propagate_expm_oracle(const DenseMatrix& rho0, const Model& model,
                                 const std::optional<PulseSpec>& pulse, const IntegratorConfig& integ,
                                 const PropagationOptions& options)
{
    integ.validate();
    const std::size_t m = model.basis.size();
    if (m > integ.dense_limit) {
        std::ostringstream msg;
        msg << "expm oracle: dimension M = " << m << " exceeds dense_limit " << integ.dense_limit;
        throw ConfigError(msg.str());
    }
    if (static_cast<std::size_t>(rho0.rows()) != m || rho0.rows() != rho0.cols()) {
        throw ConfigError("initial density matrix has the wrong dimension");
    }

    const MasterEquation eq(model, pulse);
    const auto dim = rho0.rows();
    const DenseMatrix l0 = dense_liouvillian(model);
    std::map<double, DenseMatrix> free_cache;
    auto free_propagator = [&](double dt) -> const DenseMatrix& {
        auto it = free_cache.find(dt);
        if (it == free_cache.end()) it = free_cache.emplace(dt, (l0 * dt).exp()).first;
        return it->second;
    };

    detail::Recorder rec(model, integ, options);
    auto& diag = rec.diagnostics();
    DenseMatrix rho = rho0;
    double t = integ.t_start_fs;
    rec.record(t, rho);

    double support_lo = 0.0, support_hi = 0.0;
    if (eq.driven()) {
        const auto bp = eq.breakpoints();
        support_lo = bp.front();
        support_hi = bp.back();
    }

    for (const auto& stop : detail::build_stops(integ, eq.breakpoints())) {
        const double dt = stop.t - t;
        Eigen::VectorXcd v = vec(rho);
        const bool in_pulse = eq.driven() && t < support_hi && stop.t > support_lo;
        if (!in_pulse) {
            v = free_propagator(dt) * v;
            ++diag.accepted_steps;
        } else {
            // piecewise-constant drive at the midpoint of each substep
            const auto n_sub = static_cast<int>(std::ceil(dt / integ.fixed_step_fs - 1e-9));
            const double h = dt / n_sub;
            for (int k = 0; k < n_sub; ++k) {
                const double c = eq.drive_coefficient(t + (k + 0.5) * h);
                const DenseMatrix step = (dense_liouvillian(model, c) * h).exp();
                v = step * v;
                ++diag.accepted_steps;
            }
        }
        rho = unvec(v, dim);
        t = stop.t;
        if (stop.sample) rec.record(t, rho);
    }
    return rec.finish(rho);
}

} // namespace qdent
