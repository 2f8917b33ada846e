// sampling.cpp - parameter bounds, unit-cube scaling and uniform sampling

#include <cmath>
#include <exception>
#include <random>

#include "qdent/errors.hpp"
#include "qdent/optimizer.hpp"

namespace qdent {

Bounds::Bounds(std::vector<ParameterBound> params) : params_(std::move(params)) {}

Bounds Bounds::physical_defaults(std::size_t n_qd)
{
    Bounds b;
    for (std::size_t i = 0; i < n_qd; ++i) b.add("qd." + std::to_string(i + 1) + ".g_mev", 0.0, 25.0);
    b.add("pulse.fluence_njcm2", 0.0, 700.0);
    b.add("pulse.tau_fs", 10.0, 200.0);
    b.add("qd.all.gamma_d_mev", 0.0, 5.0);
    b.add("plasmon.gamma_mev", 100.0, 300.0);
    return b;
}

Bounds& Bounds::add(std::string name, double lower, double upper)
{
    for (const auto& p : params_) {
        if (p.name == name) throw ConfigError("duplicate optimization parameter '" + name + "'");
    }
    params_.push_back({std::move(name), lower, upper, std::nullopt});
    return *this;
}

Bounds& Bounds::fix(const std::string& name, double value)
{
    params_.at(index_of(name)).fixed = value;
    return *this;
}

Bounds& Bounds::set_range(const std::string& name, double lower, double upper)
{
    auto& p = params_.at(index_of(name));
    p.lower = lower;
    p.upper = upper;
    return *this;
}

std::size_t Bounds::free_count() const
{
    std::size_t n = 0;
    for (const auto& p : params_) n += p.fixed ? 0 : 1;
    return n;
}

std::size_t Bounds::index_of(const std::string& name) const
{
    for (std::size_t k = 0; k < params_.size(); ++k) {
        if (params_[k].name == name) return k;
    }
    throw ConfigError("unknown optimization parameter '" + name + "'");
}

std::vector<std::string> Bounds::names() const
{
    std::vector<std::string> out;
    for (const auto& p : params_) out.push_back(p.name);
    return out;
}

Eigen::VectorXd Bounds::to_unit(const Eigen::VectorXd& physical) const
{
    if (static_cast<std::size_t>(physical.size()) != params_.size()) {
        throw std::invalid_argument("Bounds::to_unit: vector has wrong size");
    }
    Eigen::VectorXd u(static_cast<Eigen::Index>(free_count()));
    Eigen::Index k = 0;
    for (std::size_t i = 0; i < params_.size(); ++i) {
        const auto& p = params_[i];
        if (p.fixed) continue;
        u(k++) = (physical(static_cast<Eigen::Index>(i)) - p.lower) / (p.upper - p.lower);
    }
    return u;
}

Eigen::VectorXd Bounds::from_unit(const Eigen::VectorXd& unit) const
{
    if (static_cast<std::size_t>(unit.size()) != free_count()) {
        throw std::invalid_argument("Bounds::from_unit: vector has wrong size");
    }
    Eigen::VectorXd x(static_cast<Eigen::Index>(params_.size()));
    Eigen::Index k = 0;
    for (std::size_t i = 0; i < params_.size(); ++i) {
        const auto& p = params_[i];
        const auto ii = static_cast<Eigen::Index>(i);
        if (p.fixed) {
            x(ii) = *p.fixed;
        } else {
            const double u = std::clamp(unit(k++), 0.0, 1.0);
            x(ii) = u == 1.0 ? p.upper : p.lower + u * (p.upper - p.lower);
        }
    }
    return x;
}

bool Bounds::contains(const Eigen::VectorXd& physical, double slack) const
{
    if (static_cast<std::size_t>(physical.size()) != params_.size()) return false;
    for (std::size_t i = 0; i < params_.size(); ++i) {
        const auto& p = params_[i];
        const double v = physical(static_cast<Eigen::Index>(i));
        if (p.fixed) {
            if (v != *p.fixed) return false;
        } else if (v < p.lower - slack || v > p.upper + slack) {
            return false;
        }
    }
    return true;
}

void Bounds::validate() const
{
    for (const auto& p : params_) {
        if (!std::isfinite(p.lower) || !std::isfinite(p.upper)) {
            throw ConfigError("optimization bound for '" + p.name + "' is not finite");
        }
        if (p.fixed) {
            if (!std::isfinite(*p.fixed)) throw ConfigError("fixed value for '" + p.name + "' is not finite");
        } else if (!(p.lower < p.upper)) {
            throw ConfigError("optimization bound for '" + p.name + "' needs lower < upper");
        }
    }
    if (free_count() == 0) throw ConfigError("optimization needs at least one free parameter");
}

EvaluatedPoint evaluate_point(const ResidualFunction& fn, const Bounds& bounds, const Eigen::VectorXd& unit)
{
    EvaluatedPoint pt;
    pt.scaled = unit.cwiseMax(0.0).cwiseMin(1.0);
    pt.params = bounds.from_unit(pt.scaled);
    try {
        pt.residuals = fn(pt.params);
        pt.objective = pt.residuals.squaredNorm();
        pt.failed = !std::isfinite(pt.objective);
    } catch (const std::exception&) {
        pt.failed = true;
    }
    if (pt.failed) pt.objective = std::numeric_limits<double>::infinity();
    return pt;
}

std::vector<Eigen::VectorXd> sample_uniform(const Bounds& bounds, std::size_t count, std::uint64_t seed)
{
    bounds.validate();
    if (count == 0) throw ConfigError("sample count must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const auto n = static_cast<Eigen::Index>(bounds.free_count());
    std::vector<Eigen::VectorXd> out;
    out.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        Eigen::VectorXd u(n);
        for (Eigen::Index k = 0; k < n; ++k) u(k) = uniform(rng);
        out.push_back(bounds.from_unit(u));
    }
    return out;
}

} // namespace qdent
