// trajectory_io.cpp - CSV output for trajectories

#include <iomanip>
#include <locale>
#include <ostream>

#include "qdent/dynamics.hpp"

namespace qdent {

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const std::vector<std::string>& header_lines)
{
    const std::locale saved = out.imbue(std::locale::classic());
    const auto saved_precision = out.precision(10);

    for (const auto& line : header_lines) out << (line.starts_with("#") ? "" : "# ") << line << '\n';

    out << "t_fs";
    for (std::size_t q = 0; q < traj.n_qd; ++q) out << ",P_qd" << q + 1;
    out << ",plasmon_n";
    for (const auto& [i, j] : traj.pairs) out << ",C_" << i + 1 << '_' << j + 1;
    for (const auto& name : traj.observable_names) out << ',' << name;
    out << '\n';

    for (std::size_t s = 0; s < traj.times.size(); ++s) {
        out << traj.times[s];
        for (double p : traj.qd_population[s]) out << ',' << p;
        out << ',' << traj.plasmon_mean[s];
        for (double c : traj.concurrence[s]) out << ',' << c;
        for (double o : traj.observables[s]) out << ',' << o;
        out << '\n';
    }
    out.precision(saved_precision);
    out.imbue(saved);
}

} // namespace qdent
