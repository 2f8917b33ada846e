// local_field.cpp - plasmon-enhanced field at a QD and the coupled-dipole picture

#include <cmath>

#include "qdent/analytic.hpp"
#include "qdent/errors.hpp"
#include "qdent/model.hpp"
#include "qdent/units.hpp"

namespace qdent {

LocalField local_field(const SystemSpec& spec, std::size_t qd, double e0_vm)
{
    if (qd >= spec.n_qd()) throw ConfigError("local_field: QD index out of range");
    const double gamma_s = spec.plasmon.gamma_mev;
    if (!(gamma_s > 0.0)) throw ConfigError("local_field: plasmon decay rate must be > 0");
    const QDParams& q = spec.qds[qd];
    const double d_s = spec.plasmon.dipole_debye;
    const double d_q = q.dipole_debye;
    if (!(d_q > 0.0) || !(d_s > 0.0)) throw ConfigError("local_field: dipoles must be > 0");

    LocalField out;
    out.e0_local_vm = 2.0 * (d_s / d_q) * (q.g_mev / gamma_s) * e0_vm;
    out.rabi_energy_mev = 2.0 * (q.g_mev / gamma_s) * units::dipole_field_energy_mev(d_s, e0_vm);
    out.rabi_per_fs = out.rabi_energy_mev / units::hbar_mev_fs;

    const double hbar = units::hbar_joule_s;
    const double ds_si = d_s * units::debye_coulomb_meter;
    const double dq_si = d_q * units::debye_coulomb_meter;
    const double omega_s = spec.plasmon.omega_mev * units::joule_per_mev / hbar;  // rad/s
    const double omega_q = q.omega_mev * units::joule_per_mev / hbar;
    out.coupling_j = q.g_mev * units::joule_per_mev / (ds_si * dq_si);
    out.a_s = 2.0 * ds_si * ds_si * omega_s / hbar;
    out.a_q = 2.0 * dq_si * dq_si * omega_q / hbar;
    out.gamma_q_per_s = 2.0 * q.gamma_d_mev * units::joule_per_mev / hbar;
    return out;
}

Eigen::Vector4d CoupledDipoles::derivative(double t, const Eigen::Vector4d& y) const
{
    const double field = e0 * std::cos(omega * t);
    Eigen::Vector4d dy;
    dy(0) = y(1);
    dy(1) = a_s * (field + coupling_j * y(2)) - omega_s * omega_s * y(0) - gamma_s * y(1);
    dy(2) = y(3);
    dy(3) = a_q * (field + coupling_j * y(0)) - omega_q * omega_q * y(2) - gamma_q * y(3);
    return dy;
}

} // namespace qdent
