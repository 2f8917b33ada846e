// analytic_detail.hpp - bright-block propagator shared by the dark models

#pragma once

#include <complex>
#include <utility>

namespace qdent::detail {

/// Propagates (plasmon, bright) amplitudes under M = [[-i eps, eta], [eta, 0]]
/// for tau = t / hbar (1/meV). Valid for any eps >= 0, including 4 eta^2 = eps^2.
std::pair<std::complex<double>, std::complex<double>> bright_block(std::complex<double> plasmon,
                                                                   std::complex<double> bright, double eta,
                                                                   double eps, double tau);

} // namespace qdent::detail
