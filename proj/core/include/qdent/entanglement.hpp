// entanglement.hpp - two-QD reduced states, Wootters concurrence, figure of merit

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qdent/model.hpp"

namespace qdent {

/// Reduced state of a QD pair (i, j) in the basis |q_i q_j> ordered
/// {|00>, |01>, |10>, |11>}: QD i is the high bit, QD j the low bit.
using ReducedDM = Eigen::Matrix4cd;

/// Symmetric N x N, zero diagonal, entries in [0, 1].
using ConcurrenceMatrix = Eigen::MatrixXd;

/// Traces out the plasmon and every QD except i and j (0-based, i != j).
ReducedDM partial_trace_pair(const DenseMatrix& rho, std::size_t i, std::size_t j, const BasisMap& basis);

/// C = max(0, l1 - l2 - l3 - l4) with l the descending square roots of the
/// eigenvalues of rho * rho_tilde, computed as singular values of W^T (sy x sy) W
/// for rho = W W^+.
/// Throws std::invalid_argument if rho deviates from Hermitian by more than 1e-8.
double concurrence(const ReducedDM& rho);

/// (sigma_y x sigma_y) rho^* (sigma_y x sigma_y)
ReducedDM spin_flip(const ReducedDM& rho);

ConcurrenceMatrix pairwise_concurrences(const DenseMatrix& rho, const BasisMap& basis);

/// All (i, j) with i < j, lexicographic. This is the residual order everywhere.
std::vector<std::pair<std::size_t, std::size_t>> qd_pairs(std::size_t n_qd);

/// sum_{i<j} (1 - C_ij)^2
double figure_of_merit(const ConcurrenceMatrix& c);

/// {1 - C_ij} in qd_pairs order; figure_of_merit is their squared norm.
Eigen::VectorXd concurrence_residuals(const ConcurrenceMatrix& c);

} // namespace qdent
