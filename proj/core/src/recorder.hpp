// recorder.hpp - trajectory sampling shared by the Runge-Kutta and oracle paths

#pragma once

#include <vector>

#include "qdent/dynamics.hpp"

namespace qdent::detail {

class Recorder {
public:
    Recorder(const Model& model, const IntegratorConfig& integ, const PropagationOptions& options);

    /// Symmetrizes rho in place and appends one sample.
    void record(double t, DenseMatrix& rho);
    Trajectory finish(const DenseMatrix& final_rho);
    TrajectoryDiagnostics& diagnostics() { return traj_.diagnostics; }

private:
    const Model& model_;
    const IntegratorConfig& integ_;
    std::vector<Observable> observables_;
    Trajectory traj_;
};

std::vector<double> sample_times(const IntegratorConfig& integ);

struct Stop {
    double t;
    bool sample;
};

/// Sample times after t_start merged with generator breakpoints, ascending.
std::vector<Stop> build_stops(const IntegratorConfig& integ, const std::vector<double>& breakpoints);

} // namespace qdent::detail
