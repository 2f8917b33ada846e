// scenario.hpp - a complete simulation setup and the entanglement objective

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qdent/dynamics.hpp"
#include "qdent/entanglement.hpp"
#include "qdent/optimizer.hpp"

namespace qdent {

struct Scenario {
    SystemSpec system;
    std::optional<PulseSpec> pulse;
    InitialState initial;
    IntegratorConfig integrator;
    double window_start_fs{0.0};
    std::optional<double> window_end_fs;   // defaults to the integrator end
    std::optional<double> after_pulse_fs;  // if set, runs end this long after the pulse support

    /// Integrator settings with t_end moved to pulse end + after_pulse_fs when requested.
    IntegratorConfig effective_integrator() const;
    double window_end() const { return window_end_fs.value_or(effective_integrator().t_end_fs); }
};

/// Sets a parameter addressed by its dotted config name, e.g. "qd.2.g_mev",
/// "qd.all.gamma_d_mev", "plasmon.gamma_mev", "pulse.tau_fs", "system.eps_med".
/// Setting a pulse.* key creates a default pulse if none exists.
/// Throws ConfigError for unknown names, bad QD indices or non-integer levels.
void apply_parameter(SystemSpec& system, std::optional<PulseSpec>& pulse, const std::string& name, double value);

/// Reads the current value of a parameter ("qd.all.*" reads QD1).
double read_parameter(const SystemSpec& system, const std::optional<PulseSpec>& pulse, const std::string& name);

/// Builds the model in the appropriate rotating frame and propagates.
Trajectory simulate(const Scenario& scenario, const PropagationOptions& options = {});

/// Residuals 1 - max_t C_ij(t) over the scenario window, one per pair in
/// qd_pairs order; the objective is the figure of merit.
class EntanglementObjective {
public:
    EntanglementObjective(Scenario base, std::vector<std::string> parameter_names);

    const Scenario& base() const { return base_; }
    const std::vector<std::string>& parameter_names() const { return names_; }

    Scenario scenario_at(const Eigen::VectorXd& params) const;
    ConcurrenceMatrix max_concurrence(const Eigen::VectorXd& params) const;
    Eigen::VectorXd residuals(const Eigen::VectorXd& params) const;
    ResidualFunction as_function() const;

private:
    Scenario base_;
    std::vector<std::string> names_;
};

} // namespace qdent
