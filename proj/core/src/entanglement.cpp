// entanglement.cpp - partial traces and Wootters concurrence

#include "qdent/entanglement.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include <Eigen/SVD>

namespace qdent {

namespace {

Eigen::Matrix4cd sigma_y_pair()
{
    Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
    yy(0, 3) = -1.0;
    yy(1, 2) = 1.0;
    yy(2, 1) = 1.0;
    yy(3, 0) = -1.0;
    return yy;
}

} // namespace

ReducedDM partial_trace_pair(const DenseMatrix& rho, std::size_t i, std::size_t j, const BasisMap& basis)
{
    if (i == j) throw std::out_of_range("partial_trace_pair: QD indices must differ");
    if (i >= basis.n_qd() || j >= basis.n_qd()) throw std::out_of_range("partial_trace_pair: QD index out of range");
    if (static_cast<std::size_t>(rho.rows()) != basis.size() || rho.rows() != rho.cols()) {
        throw std::invalid_argument("partial_trace_pair: density matrix dimension mismatch");
    }

    const std::size_t bit_i = std::size_t{1} << i;
    const std::size_t bit_j = std::size_t{1} << j;
    ReducedDM red = ReducedDM::Zero();
    for (std::size_t row = 0; row < basis.size(); ++row) {
        const std::size_t bits = basis.qd_bits(row);
        const int s = basis.plasmon_level(row);
        const std::size_t rest = bits & ~(bit_i | bit_j);
        const int a = static_cast<int>(((bits & bit_i) ? 2 : 0) | ((bits & bit_j) ? 1 : 0));
        for (int b = 0; b < 4; ++b) {
            const std::size_t col_bits = rest | ((b & 2) ? bit_i : 0) | ((b & 1) ? bit_j : 0);
            const std::size_t col = basis.index(col_bits, s);
            red(a, b) += rho(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
        }
    }
    return red;
}

ReducedDM spin_flip(const ReducedDM& rho)
{
    const Eigen::Matrix4cd yy = sigma_y_pair();
    return yy * rho.conjugate() * yy;
}

double concurrence(const ReducedDM& rho_in)
{
    const double scale = std::max(1.0, rho_in.cwiseAbs().maxCoeff());
    if ((rho_in - rho_in.adjoint()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
        throw std::invalid_argument("concurrence: reduced density matrix is not Hermitian");
    }
    const ReducedDM rho = 0.5 * (rho_in + rho_in.adjoint());

    // rho = W W^+ with W = V sqrt(p); the lambdas are the singular values of
    // W^T (sy x sy) W, which avoids square roots of the rho * rho_tilde spectrum.
    // Eigenvalues of rho at the rounding level are treated as exact zeros.
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho);
    const Eigen::Vector4d p = es.eigenvalues();
    const double cutoff = 16.0 * std::numeric_limits<double>::epsilon() * std::max(p.maxCoeff(), 0.0);
    Eigen::Vector4d root_p;
    for (int k = 0; k < 4; ++k) root_p(k) = p(k) > cutoff ? std::sqrt(p(k)) : 0.0;
    const Eigen::Matrix4cd w = es.eigenvectors() * root_p.asDiagonal();
    const Eigen::Matrix4cd yy = sigma_y_pair();
    const Eigen::Matrix4cd tau = w.transpose() * yy * w;
    const Eigen::Vector4d sv = Eigen::JacobiSVD<Eigen::Matrix4cd>(tau).singularValues();  // descending
    return std::max(0.0, sv(0) - sv(1) - sv(2) - sv(3));
}

std::vector<std::pair<std::size_t, std::size_t>> qd_pairs(std::size_t n_qd)
{
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n_qd; ++i) {
        for (std::size_t j = i + 1; j < n_qd; ++j) pairs.emplace_back(i, j);
    }
    return pairs;
}

ConcurrenceMatrix pairwise_concurrences(const DenseMatrix& rho, const BasisMap& basis)
{
    const auto n = static_cast<Eigen::Index>(basis.n_qd());
    ConcurrenceMatrix c = ConcurrenceMatrix::Zero(n, n);
    for (const auto& [i, j] : qd_pairs(basis.n_qd())) {
        const double value = concurrence(partial_trace_pair(rho, i, j, basis));
        c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
        c(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = value;
    }
    return c;
}

Eigen::VectorXd concurrence_residuals(const ConcurrenceMatrix& c)
{
    const auto pairs = qd_pairs(static_cast<std::size_t>(c.rows()));
    Eigen::VectorXd r(static_cast<Eigen::Index>(pairs.size()));
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        r(static_cast<Eigen::Index>(k)) =
            1.0 - c(static_cast<Eigen::Index>(pairs[k].first), static_cast<Eigen::Index>(pairs[k].second));
    }
    return r;
}

double figure_of_merit(const ConcurrenceMatrix& c) { return concurrence_residuals(c).squaredNorm(); }

} // namespace qdent
