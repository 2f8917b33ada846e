// pulse.cpp - Gaussian envelope and fluence normalization

#include <cmath>
#include <numbers>

#include "qdent/dynamics.hpp"
#include "qdent/errors.hpp"
#include "qdent/units.hpp"

namespace qdent {

void PulseSpec::validate() const
{
    if (!(fluence_njcm2 >= 0.0)) throw ConfigError("pulse fluence must be >= 0");
    if (!(tau_fs > 0.0)) throw ConfigError("pulse duration tau must be > 0");
    if (!(cutoff_k >= 3.0)) throw ConfigError("pulse cutoff_k must be >= 3");
    if (!(carrier_mev > 0.0)) throw ConfigError("pulse carrier must be > 0");
}

double fluence_to_amplitude(const PulseSpec& pulse, double eps_med)
{
    pulse.validate();
    if (!(eps_med > 0.0)) throw ConfigError("eps_med must be positive");
    // int G^2 dt for G^2 = exp(-4 ln2 (t - tc)^2 / tau^2)
    const double envelope_area_s =
        pulse.tau_fs * units::fs_to_s * std::sqrt(std::numbers::pi / (4.0 * std::numbers::ln2));
    const double fluence_si = pulse.fluence_njcm2 * units::njcm2_to_jm2;
    const double impedance_factor = std::sqrt(eps_med) * units::speed_of_light * units::vacuum_permittivity;
    return std::sqrt(fluence_si / (impedance_factor * 0.5 * envelope_area_s));
}

double pulse_envelope(const PulseSpec& pulse, double t_fs)
{
    const double dt = t_fs - pulse.center();
    if (std::abs(dt) > pulse.cutoff_k * pulse.tau_fs) return 0.0;
    return std::exp(-2.0 * std::numbers::ln2 * dt * dt / (pulse.tau_fs * pulse.tau_fs));
}

double rotating_frame_mev(const SystemSpec& spec, const std::optional<PulseSpec>& pulse)
{
    return pulse ? pulse->carrier_mev : spec.plasmon.omega_mev;
}

} // namespace qdent
