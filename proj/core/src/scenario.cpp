// scenario.cpp - dotted parameter access, one-call simulation, objective

#include "qdent/scenario.hpp"

#include <cmath>

#include "qdent/errors.hpp"

namespace qdent {

namespace {

struct ParamName {
    std::string section;  // qd, plasmon, pulse, system
    std::string qd;       // index or "all" for qd.*
    std::string field;
};

ParamName split_name(const std::string& name)
{
    ParamName out;
    const auto first = name.find('.');
    if (first == std::string::npos) throw ConfigError("parameter name '" + name + "' has no section");
    out.section = name.substr(0, first);
    std::string rest = name.substr(first + 1);
    if (out.section == "qd") {
        const auto second = rest.find('.');
        if (second == std::string::npos) throw ConfigError("parameter name '" + name + "' needs qd.<i>.<field>");
        out.qd = rest.substr(0, second);
        rest = rest.substr(second + 1);
    }
    out.field = rest;
    return out;
}

std::vector<std::size_t> qd_targets(const SystemSpec& system, const std::string& who, const std::string& name)
{
    if (who == "all") {
        std::vector<std::size_t> all(system.n_qd());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        return all;
    }
    std::size_t pos = 0;
    long idx = 0;
    try {
        idx = std::stol(who, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != who.size() || idx < 1 || static_cast<std::size_t>(idx) > system.n_qd()) {
        throw ConfigError("parameter '" + name + "': QD index must be 1.." + std::to_string(system.n_qd()));
    }
    return {static_cast<std::size_t>(idx - 1)};
}

double* qd_field(QDParams& qd, const std::string& field)
{
    if (field == "g_mev") return &qd.g_mev;
    if (field == "omega_mev") return &qd.omega_mev;
    if (field == "dipole_debye") return &qd.dipole_debye;
    if (field == "gamma_p_mev") return &qd.gamma_p_mev;
    if (field == "gamma_d_mev") return &qd.gamma_d_mev;
    return nullptr;
}

double* plasmon_field(PlasmonParams& p, const std::string& field)
{
    if (field == "omega_mev") return &p.omega_mev;
    if (field == "dipole_debye") return &p.dipole_debye;
    if (field == "gamma_mev") return &p.gamma_mev;
    return nullptr;
}

double* pulse_field(PulseSpec& p, const std::string& field)
{
    if (field == "fluence_njcm2") return &p.fluence_njcm2;
    if (field == "tau_fs") return &p.tau_fs;
    if (field == "carrier_mev") return &p.carrier_mev;
    if (field == "cutoff_k") return &p.cutoff_k;
    return nullptr;
}

int as_level_count(double value, const std::string& name)
{
    if (!(value >= 2.0) || value != std::floor(value) || value > 1e6) {
        throw ConfigError("parameter '" + name + "' must be an integer >= 2");
    }
    return static_cast<int>(value);
}

} // namespace

void apply_parameter(SystemSpec& system, std::optional<PulseSpec>& pulse, const std::string& name, double value)
{
    if (!std::isfinite(value)) throw ConfigError("parameter '" + name + "' is not finite");
    const ParamName p = split_name(name);
    if (p.section == "qd") {
        for (std::size_t i : qd_targets(system, p.qd, name)) {
            double* slot = qd_field(system.qds[i], p.field);
            if (!slot) throw ConfigError("unknown QD parameter '" + name + "'");
            *slot = value;
        }
        return;
    }
    if (p.section == "plasmon") {
        if (p.field == "n_levels") {
            system.plasmon.n_levels = as_level_count(value, name);
            return;
        }
        double* slot = plasmon_field(system.plasmon, p.field);
        if (!slot) throw ConfigError("unknown plasmon parameter '" + name + "'");
        *slot = value;
        return;
    }
    if (p.section == "pulse") {
        if (!pulse) pulse.emplace();
        if (p.field == "center_fs") {
            pulse->center_fs = value;
            return;
        }
        double* slot = pulse_field(*pulse, p.field);
        if (!slot) throw ConfigError("unknown pulse parameter '" + name + "'");
        *slot = value;
        return;
    }
    if (p.section == "system" && p.field == "eps_med") {
        system.eps_med = value;
        return;
    }
    throw ConfigError("unknown parameter '" + name + "'");
}

double read_parameter(const SystemSpec& system, const std::optional<PulseSpec>& pulse, const std::string& name)
{
    SystemSpec copy = system;
    std::optional<PulseSpec> pulse_copy = pulse;
    const ParamName p = split_name(name);
    if (p.section == "qd") {
        const auto targets = qd_targets(copy, p.qd, name);
        if (targets.empty()) throw ConfigError("parameter '" + name + "': no QDs");
        double* slot = qd_field(copy.qds[targets.front()], p.field);
        if (!slot) throw ConfigError("unknown QD parameter '" + name + "'");
        return *slot;
    }
    if (p.section == "plasmon") {
        if (p.field == "n_levels") return copy.plasmon.n_levels;
        double* slot = plasmon_field(copy.plasmon, p.field);
        if (!slot) throw ConfigError("unknown plasmon parameter '" + name + "'");
        return *slot;
    }
    if (p.section == "pulse") {
        if (!pulse_copy) throw ConfigError("parameter '" + name + "' read without a pulse");
        if (p.field == "center_fs") return pulse_copy->center();
        double* slot = pulse_field(*pulse_copy, p.field);
        if (!slot) throw ConfigError("unknown pulse parameter '" + name + "'");
        return *slot;
    }
    if (p.section == "system" && p.field == "eps_med") return copy.eps_med;
    throw ConfigError("unknown parameter '" + name + "'");
}

IntegratorConfig Scenario::effective_integrator() const
{
    IntegratorConfig integ = integrator;
    if (after_pulse_fs && pulse) integ.t_end_fs = pulse->end_time() + *after_pulse_fs;
    return integ;
}

Trajectory simulate(const Scenario& scenario, const PropagationOptions& options)
{
    const Model model(scenario.system, rotating_frame_mev(scenario.system, scenario.pulse));
    const DenseMatrix rho0 = initial_state(scenario.initial, model.spec);
    return propagate(rho0, model, scenario.pulse, scenario.effective_integrator(), options);
}

EntanglementObjective::EntanglementObjective(Scenario base, std::vector<std::string> parameter_names)
    : base_(std::move(base)), names_(std::move(parameter_names))
{
    if (base_.system.n_qd() < 2) throw ConfigError("the entanglement objective needs at least two QDs");
    // reject unknown names up front rather than on the first evaluation
    for (const auto& n : names_) {
        SystemSpec s = base_.system;
        auto p = base_.pulse;
        apply_parameter(s, p, n, 1.0);
    }
}

Scenario EntanglementObjective::scenario_at(const Eigen::VectorXd& params) const
{
    if (static_cast<std::size_t>(params.size()) != names_.size()) {
        throw std::invalid_argument("objective: parameter vector has wrong size");
    }
    Scenario s = base_;
    for (std::size_t k = 0; k < names_.size(); ++k) {
        apply_parameter(s.system, s.pulse, names_[k], params(static_cast<Eigen::Index>(k)));
    }
    return s;
}

ConcurrenceMatrix EntanglementObjective::max_concurrence(const Eigen::VectorXd& params) const
{
    Scenario s = scenario_at(params);
    s.integrator.keep_states = false;
    s.integrator.keep_final_state = false;
    PropagationOptions options;
    options.use_default_observables = false;
    const Trajectory traj = simulate(s, options);
    return traj.max_concurrence(s.window_start_fs, s.window_end());
}

Eigen::VectorXd EntanglementObjective::residuals(const Eigen::VectorXd& params) const
{
    return concurrence_residuals(max_concurrence(params));
}

ResidualFunction EntanglementObjective::as_function() const
{
    return [this](const Eigen::VectorXd& params) { return residuals(params); };
}

} // namespace qdent
