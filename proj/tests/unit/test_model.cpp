// test_model.cpp - basis, operators, Hamiltonian, dissipators, pulse

#include <cmath>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include "doctest.h"
#include "qdent/dynamics.hpp"
#include "qdent/errors.hpp"
#include "qdent/model.hpp"
#include "qdent/scenario.hpp"
#include "qdent/units.hpp"

using namespace qdent;

namespace {

DenseMatrix dense(const SparseOperator& op) { return DenseMatrix(op); }

DenseMatrix random_density(Eigen::Index dim, std::mt19937& rng)
{
    std::normal_distribution<double> n;
    DenseMatrix a(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = cplx(n(rng), n(rng));
    DenseMatrix rho = a * a.adjoint();
    return rho / rho.trace();
}

// Tensor-product construction with QD N most significant and the plasmon fastest.
DenseMatrix kron_sigma(std::size_t n_qd, std::size_t qd, int levels)
{
    Eigen::Matrix2cd lower;
    lower << 0, 1, 0, 0;
    DenseMatrix op = DenseMatrix::Identity(1, 1);
    for (std::size_t k = n_qd; k-- > 0;) {
        const DenseMatrix factor = k == qd ? DenseMatrix(lower) : DenseMatrix::Identity(2, 2);
        op = Eigen::kroneckerProduct(op, factor).eval();
    }
    return Eigen::kroneckerProduct(op, DenseMatrix::Identity(levels, levels)).eval();
}

DenseMatrix kron_b(std::size_t n_qd, int levels)
{
    DenseMatrix a = DenseMatrix::Zero(levels, levels);
    for (int s = 1; s < levels; ++s) a(s - 1, s) = std::sqrt(static_cast<double>(s));
    const auto qd_dim = static_cast<Eigen::Index>(std::size_t{1} << n_qd);
    return Eigen::kroneckerProduct(DenseMatrix::Identity(qd_dim, qd_dim), a).eval();
}

} // namespace

TEST_CASE("basis index round trip and labels")
{
    const BasisMap basis(2, 3);
    CHECK(basis.size() == 12);
    CHECK(basis.index(BasisState{{1, 0}, 0}) == 3);
    CHECK(basis.label(3) == "|0,1;0>");
    CHECK(basis.label(basis.index(BasisState{{1, 1}, 2})) == "|1,1;2>");
    for (std::size_t k = 0; k < basis.size(); ++k) CHECK(basis.index(basis.state(k)) == k);
    CHECK_THROWS_AS(basis.index(BasisState{{2, 0}, 0}), std::out_of_range);
    CHECK_THROWS_AS(basis.state(12), std::out_of_range);
}

TEST_CASE("ladder operators match the tensor-product construction")
{
    for (std::size_t n_qd : {1u, 2u, 3u}) {
        for (int levels : {2, 3, 5}) {
            const SystemSpec spec = make_system(std::vector<double>(n_qd, 10.0), 100.0, 1.0, levels);
            const Operators ops = build_operators(spec, build_basis(spec));
            CHECK((dense(ops.b) - kron_b(n_qd, levels)).norm() == doctest::Approx(0.0));
            for (std::size_t q = 0; q < n_qd; ++q) {
                CHECK((dense(ops.sigma[q]) - kron_sigma(n_qd, q, levels)).norm() == doctest::Approx(0.0));
                CHECK((dense(ops.sigma_dag[q]) - dense(ops.sigma[q]).adjoint()).norm() == doctest::Approx(0.0));
            }
        }
    }
}

TEST_CASE("Hamiltonian is Hermitian with the expected couplings")
{
    SystemSpec spec = make_system({12.5, 25.0}, 100.0, 0.0, 3);
    spec.qds[1].omega_mev = 2060.0;
    const Model model(spec);
    const DenseMatrix h = dense(model.hamiltonian);
    CHECK((h - h.adjoint()).norm() == doctest::Approx(0.0));
    const BasisMap& b = model.basis;
    // <0,0;1| H |0,1;0> = -g1 ; QD2 detuned by +10 meV from the plasmon frame
    CHECK(h(b.index(0, 1), b.index(1, 0)).real() == doctest::Approx(-12.5));
    CHECK(h(b.index(0, 1), b.index(2, 0)).real() == doctest::Approx(-25.0));
    CHECK(h(b.index(2, 0), b.index(2, 0)).real() == doctest::Approx(10.0));
    CHECK(h(b.index(0, 2), b.index(0, 2)).real() == doctest::Approx(0.0));
}

TEST_CASE("dipole operator and jump operators")
{
    SystemSpec spec = make_system({10.0, 10.0}, 100.0, 2.0, 3, 1e-3);
    const Model model(spec);
    const DenseMatrix d = dense(model.dipole);
    CHECK(d(model.basis.index(0, 0), model.basis.index(0, 1)).real() == doctest::Approx(4000.0));
    CHECK(d(model.basis.index(0, 0), model.basis.index(1, 0)).real() == doctest::Approx(13.0));
    CHECK(model.jumps.size() == 5);

    spec.plasmon.gamma_mev = 0.0;
    for (auto& q : spec.qds) q.gamma_p_mev = 0.0;
    CHECK(Model(spec).jumps.size() == 2);  // zero rates are omitted
    CHECK(Model(spec).jumps[0].rate_per_fs == doctest::Approx(4.0 / units::hbar_mev_fs));
}

TEST_CASE("Lindblad term is trace preserving and Hermiticity preserving")
{
    std::mt19937 rng(3);
    const SystemSpec spec = make_system({7.0, 11.0}, 120.0, 1.5, 4, 0.5);
    const Model model(spec);
    for (int trial = 0; trial < 5; ++trial) {
        const DenseMatrix rho = random_density(static_cast<Eigen::Index>(model.basis.size()), rng);
        const DenseMatrix l = apply_lindblad(model.jumps, rho);
        CHECK(std::abs(l.trace()) < 1e-14);
        CHECK((l - l.adjoint()).norm() < 1e-14);
        CHECK((apply_lindblad(spec, model.ops, rho) - l).norm() < 1e-14);
    }
}

TEST_CASE("system validation rejects bad inputs")
{
    SystemSpec spec = make_system({10.0}, 100.0, 0.0, 3);
    CHECK_NOTHROW(spec.validate());
    spec.plasmon.n_levels = 1;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = make_system({-1.0}, 100.0, 0.0, 3);
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = make_system({1.0, 1.0, 1.0}, 100.0, 0.0, 30);
    CHECK_THROWS_AS(spec.validate(100), ConfigError);
    CHECK_THROWS_AS(Model(SystemSpec{}), ConfigError);
}

TEST_CASE("fluence to field amplitude matches a numerical quadrature oracle")
{
    PulseSpec p;
    p.fluence_njcm2 = 263.4;
    p.tau_fs = 12.5;
    // frozen reference value
    CHECK(fluence_to_amplitude(p, 2.25) == doctest::Approx(9971751.005195204).epsilon(1e-3));

    // independent check: integrate sqrt(eps) c eps0 E(t)^2 with cos^2 averaged
    const double e0 = fluence_to_amplitude(p, 2.25);
    double sum = 0.0;
    const double h = 0.001;
    for (double t = -200.0; t <= 200.0; t += h) {
        const double g = std::exp(-2.0 * std::log(2.0) * t * t / (p.tau_fs * p.tau_fs));
        sum += 0.5 * g * g * e0 * e0 * h * units::fs_to_s;
    }
    const double fluence = std::sqrt(2.25) * units::speed_of_light * units::vacuum_permittivity * sum;
    CHECK(fluence / units::njcm2_to_jm2 == doctest::Approx(263.4).epsilon(1e-9));
}

TEST_CASE("pulse envelope shape")
{
    PulseSpec p;
    p.tau_fs = 20.0;
    CHECK(p.center() == doctest::Approx(60.0));
    CHECK(pulse_envelope(p, 60.0) == doctest::Approx(1.0));
    // FWHM of G^2 equals tau
    CHECK(std::pow(pulse_envelope(p, 70.0), 2) == doctest::Approx(0.5));
    CHECK(pulse_envelope(p, 60.0 + 60.0 + 1e-9) == 0.0);
    CHECK(pulse_envelope(p, -1.0) == 0.0);
    p.cutoff_k = 2.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("parameter access by dotted name")
{
    SystemSpec spec = make_system({1.0, 2.0, 3.0}, 100.0, 0.0, 3);
    std::optional<PulseSpec> pulse;
    apply_parameter(spec, pulse, "qd.2.g_mev", 7.5);
    apply_parameter(spec, pulse, "qd.all.gamma_d_mev", 0.2);
    apply_parameter(spec, pulse, "plasmon.n_levels", 6);
    CHECK(spec.qds[1].g_mev == 7.5);
    CHECK(spec.qds[2].gamma_d_mev == 0.2);
    CHECK(spec.plasmon.n_levels == 6);
    CHECK_FALSE(pulse.has_value());
    apply_parameter(spec, pulse, "pulse.tau_fs", 30.0);
    REQUIRE(pulse.has_value());
    CHECK(read_parameter(spec, pulse, "pulse.center_fs") == doctest::Approx(90.0));
    CHECK(read_parameter(spec, pulse, "qd.2.g_mev") == 7.5);
    CHECK_THROWS_AS(apply_parameter(spec, pulse, "qd.4.g_mev", 1.0), ConfigError);
    CHECK_THROWS_AS(apply_parameter(spec, pulse, "qd.1.colour", 1.0), ConfigError);
    CHECK_THROWS_AS(apply_parameter(spec, pulse, "plasmon.n_levels", 2.5), ConfigError);
    CHECK_THROWS_AS(apply_parameter(spec, pulse, "nonsense", 1.0), ConfigError);
}
