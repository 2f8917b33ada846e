// optimizer.hpp - bounded derivative-free least squares with multistart
//
// Every distance and trust-region radius below lives in the unit hypercube of
// the free parameters, obtained by an affine map from the physical bounds.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qdent {

struct ParameterBound {
    std::string name;
    double lower{0.0};
    double upper{1.0};
    std::optional<double> fixed;  // held at this value, not optimized
};

class Bounds {
public:
    Bounds() = default;
    explicit Bounds(std::vector<ParameterBound> params);

    /// Couplings qd.<i>.g_mev for i = 1..n_qd, pulse fluence and width,
    /// shared dephasing and plasmon decay with their usual search ranges.
    static Bounds physical_defaults(std::size_t n_qd);

    Bounds& add(std::string name, double lower, double upper);
    Bounds& fix(const std::string& name, double value);
    Bounds& set_range(const std::string& name, double lower, double upper);

    std::size_t size() const { return params_.size(); }
    std::size_t free_count() const;
    const std::vector<ParameterBound>& params() const { return params_; }
    const ParameterBound& operator[](std::size_t k) const { return params_.at(k); }
    std::size_t index_of(const std::string& name) const;
    std::vector<std::string> names() const;

    /// Full physical vector -> free unit coordinates.
    Eigen::VectorXd to_unit(const Eigen::VectorXd& physical) const;
    /// Free unit coordinates -> full physical vector (fixed entries filled in).
    Eigen::VectorXd from_unit(const Eigen::VectorXd& unit) const;
    bool contains(const Eigen::VectorXd& physical, double slack = 0.0) const;

    /// Throws ConfigError if a range is inverted, a fixed value lies outside
    /// its range, or nothing is free.
    void validate() const;

private:
    std::vector<ParameterBound> params_;
};

struct EvaluatedPoint {
    std::size_t eval_id{0};
    Eigen::VectorXd params;     // physical
    Eigen::VectorXd scaled;     // free unit coordinates
    Eigen::VectorXd residuals;
    double objective{std::numeric_limits<double>::infinity()};
    bool failed{false};
};

/// Maps physical parameters to residuals. May throw to signal a failed
/// evaluation. Must be safe to call concurrently when used with threads > 1.
using ResidualFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd& physical)>;

/// Evaluates one point; exceptions turn into a failed point.
EvaluatedPoint evaluate_point(const ResidualFunction& fn, const Bounds& bounds, const Eigen::VectorXd& unit);

/// `count` physical vectors drawn uniformly within the bounds from a
/// mt19937_64 stream seeded with `seed`.
std::vector<Eigen::VectorXd> sample_uniform(const Bounds& bounds, std::size_t count, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Basin clustering

struct Cluster {
    std::size_t best{0};                 // index into the input points
    std::vector<std::size_t> members;    // ascending objective, ties by index
};

struct ClusterSet {
    double radius{0.1};
    std::vector<Cluster> clusters;       // ordered by best objective
    std::vector<std::size_t> assignment; // point index -> cluster index
};

/// Visits points from best to worst. A point joins the cluster of its nearest
/// better point within distance d; if there is none it starts a new cluster.
/// Failed points form no clusters and are assigned npos.
ClusterSet cluster_basins(const std::vector<EvaluatedPoint>& points, double d);

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

// ---------------------------------------------------------------------------
// Trust-region least squares

struct TrustRegionConfig {
    double radius_initial{0.1};
    double radius_min{1e-6};
    double radius_max{0.5};
    std::size_t max_evaluations{150};  // includes the start point
    double accept_ratio{0.1};
    double expand_ratio{0.75};
    double target_objective{0.0};      // stop once the objective is at or below this
    double affine_threshold{1e-3};     // minimum normalized pivot for interpolation points

    void validate() const;
};

struct LocalResult {
    EvaluatedPoint best;
    std::vector<EvaluatedPoint> history;  // in evaluation order
    std::size_t evaluations{0};
    std::size_t iterations{0};
    double final_radius{0.0};
    bool converged{false};         // radius fell below radius_min or target reached
    bool budget_exhausted{false};
};

/// Minimizes sum r_i(x)^2 over the box from x0 (physical). The returned point
/// is the best evaluated one. Evaluations never leave the bounds.
LocalResult solve_least_squares(const ResidualFunction& fn, const Eigen::VectorXd& x0, const Bounds& bounds,
                                const TrustRegionConfig& config = {});

/// Same, starting from an already evaluated point (no re-evaluation).
LocalResult solve_least_squares(const ResidualFunction& fn, const EvaluatedPoint& start, const Bounds& bounds,
                                const TrustRegionConfig& config = {});

// ---------------------------------------------------------------------------
// Multistart

struct MultistartConfig {
    std::size_t samples{200};
    double cluster_radius{0.1};
    std::uint64_t seed{1};
    TrustRegionConfig local;
    std::size_t max_local_runs{10};   // best clusters only; 0 runs one per cluster
    double dedupe_distance{1e-3};
    unsigned threads{0};              // 0 = hardware concurrency

    void validate() const;
};

struct LocalOptimum {
    EvaluatedPoint point;
    std::size_t cluster_id{0};
    std::size_t evaluations{0};
    bool converged{false};
};

struct LogEntry {
    std::size_t eval_id{0};
    Eigen::VectorXd params;
    Eigen::VectorXd residuals;
    double objective{0.0};
    bool failed{false};
    std::string phase;         // "sample" or "local"
    std::size_t cluster_id{npos};
};

struct MultistartResult {
    std::vector<LocalOptimum> optima;   // ranked by objective, deduplicated
    std::vector<EvaluatedPoint> samples;
    ClusterSet clusters;
    std::vector<LogEntry> log;          // deterministic order
};

/// Sample, evaluate in parallel, cluster, run local solves from the best
/// clusters in parallel, then deduplicate and rank the optima.
MultistartResult multistart(const ResidualFunction& fn, const Bounds& bounds, const MultistartConfig& config);

/// eval_id,<names...>,r1..rm,objective,phase,cluster_id
void write_optimizer_log(std::ostream& out, const std::vector<LogEntry>& log, const std::vector<std::string>& names,
                         const std::vector<std::string>& header_lines = {});

} // namespace qdent
