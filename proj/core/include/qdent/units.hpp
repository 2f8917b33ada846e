// units.hpp - unit conventions shared by every module
//
// Energies (and rates quoted as hbar*gamma, couplings as hbar*g) are in meV,
// times in fs. Dipoles are in Debye and are converted to SI only when they
// multiply an electric field. Fluence is in nJ/cm^2, fields in V/m.

#pragma once

namespace qdent::units {

inline constexpr double hbar_mev_fs = 658.2119569;  // meV * fs
inline constexpr double debye_coulomb_meter = 3.33564095198152e-30;
inline constexpr double joule_per_mev = 1.602176634e-22;
inline constexpr double speed_of_light = 299792458.0;      // m/s
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double njcm2_to_jm2 = 1e-5;
inline constexpr double fs_to_s = 1e-15;
inline constexpr double hbar_joule_s = 1.054571817e-34;

/// Interaction energy d*E in meV for a dipole in Debye and a field in V/m.
inline constexpr double dipole_field_energy_mev(double dipole_debye, double field_v_per_m)
{
    return dipole_debye * debye_coulomb_meter * field_v_per_m / joule_per_mev;
}

/// Angular frequency (rad/fs) of an energy quoted in meV.
inline constexpr double angular_frequency(double energy_mev) { return energy_mev / hbar_mev_fs; }

} // namespace qdent::units
