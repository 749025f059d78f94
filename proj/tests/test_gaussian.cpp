#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nonmarkov/gaussian.hpp"
#include "oracles.hpp"

using namespace nonmarkov;

namespace {

BathSpec small_spec(int modes, double t_max, double temperature = 0.0) {
    BathSpec spec;
    spec.modes = modes;
    spec.omega_min = 0.5;
    spec.omega_max = 4.5;
    spec.temperature = temperature;
    spec.horizon = t_max;
    return spec;
}

}  // namespace

TEST_CASE("spectral densities") {
    const SpectralDensity ohmic = SpectralDensity::ohmic(0.1, 3.0);
    CHECK(ohmic(0.0) == 0.0);
    CHECK(ohmic(1.0) == doctest::Approx(0.1 * std::exp(-1.0 / 3.0)));
    const SpectralDensity super = SpectralDensity::super_ohmic(0.1, 3.0);
    CHECK(super(2.0) == doctest::Approx(0.1 * 8.0 * std::exp(-2.0 / 3.0)));
}

TEST_CASE("bath spec validation enforces the recurrence constraint") {
    BathSpec spec = small_spec(4, 1.0);
    CHECK_NOTHROW(spec.validate());
    spec.horizon = 10.0;  // recurrence 2 pi / 1 = 6.28
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.horizon = 1.0;
    spec.temperature = -0.1;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.temperature = 0.0;
    spec.modes = 0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("discretize: zero coupling and the midpoint formula") {
    const BathSpec spec = small_spec(4, 1.0);
    const BathDiscretization zero =
        discretize(SpectralDensity::ohmic(0.0, 3.0), spec);
    for (double g : zero.couplings) CHECK(g == 0.0);

    const BathDiscretization disc =
        discretize(SpectralDensity::ohmic(0.01, 3.0), spec);
    REQUIRE(disc.frequencies.size() == 4);
    CHECK(disc.frequencies[0] == doctest::Approx(1.0));
    CHECK(disc.couplings[0] ==
          doctest::Approx(std::sqrt(0.01 * std::exp(-1.0 / 3.0))).epsilon(1e-12));
    CHECK(disc.couplings[0] == doctest::Approx(0.0846481724890614).epsilon(1e-10));
}

TEST_CASE("discretize: coupling weights converge to the J integral") {
    BathSpec spec = small_spec(200, 1.0);
    spec.omega_min = 0.003;
    spec.omega_max = 30.0;
    const SpectralDensity density = SpectralDensity::ohmic(0.05, 3.0);
    const BathDiscretization disc = discretize(density, spec);
    double sum = 0.0;
    for (double g : disc.couplings) sum += g * g;
    // Independent quadrature of J over the window on a much finer grid.
    double integral = 0.0;
    const int fine = 200000;
    const double h = (spec.omega_max - spec.omega_min) / fine;
    for (int i = 0; i <= fine; ++i) {
        const double w = spec.omega_min + i * h;
        integral += density(w) * h * ((i == 0 || i == fine) ? 0.5 : 1.0);
    }
    CHECK(sum == doctest::Approx(integral).epsilon(0.02));
}

TEST_CASE("initial covariance: vacuum, TMSV moments, thermal tail") {
    const BathSpec spec = small_spec(4, 1.0);
    const BathDiscretization disc = discretize(SpectralDensity::ohmic(0.01, 3.0), spec);

    const ComplexCovariance vac = initial_covariance(0.0, spec, disc.frequencies);
    CHECK(vac.occupations.cwiseAbs().maxCoeff() == 0.0);
    CHECK(vac.pairings.cwiseAbs().maxCoeff() == 0.0);

    const ComplexCovariance tmsv = initial_covariance(1.0, spec, disc.frequencies);
    const oracles::TmsvMoments oracle = oracles::tmsv_moments(1.0, 60);
    CHECK(tmsv.occupations(0, 0).real() == doctest::Approx(oracle.occupation).epsilon(1e-10));
    CHECK(tmsv.occupations(5, 5).real() == doctest::Approx(oracle.occupation).epsilon(1e-10));
    CHECK(tmsv.pairings(0, 5).real() == doctest::Approx(oracle.pairing).epsilon(1e-10));
    CHECK(tmsv.occupations(0, 0).real() == doctest::Approx(std::sinh(1.0) * std::sinh(1.0)));
    CHECK(tmsv.pairings(0, 5).real() == doctest::Approx(std::sinh(1.0) * std::cosh(1.0)));

    BathSpec hot = small_spec(4, 1.0, 500.0);
    const ComplexCovariance thermal = initial_covariance(0.0, hot, disc.frequencies);
    for (int j = 0; j < 4; ++j) {
        const double occupancy = thermal.occupations(j + 1, j + 1).real();
        CHECK(occupancy * disc.frequencies[j] / hot.temperature ==
              doctest::Approx(1.0).epsilon(0.01));
    }
    CHECK_THROWS_AS(initial_covariance(-0.5, spec, disc.frequencies),
                    std::invalid_argument);
}

TEST_CASE("mode transform is unitary and conserves excitation number") {
    const BathSpec spec = small_spec(6, 1.0, 1.5);
    const BathDiscretization disc = discretize(SpectralDensity::ohmic(0.05, 3.0), spec);
    const ModeNetwork net = ModeNetwork::build(1.0, disc, 1.0);
    const GaussianEvolver evolver(net);
    const ComplexCovariance cov0 = initial_covariance(0.8, spec, disc.frequencies);
    for (double t : {0.3, 1.7, 9.4}) {
        const Eigen::MatrixXcd u = evolver.mode_transform(t);
        CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff() <
              1e-10);
        const ComplexCovariance cov = evolver.evolve(cov0, t);
        CHECK(std::abs(cov.occupations.trace() - cov0.occupations.trace()) < 1e-8);
        CHECK((cov.occupations - cov.occupations.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((cov.pairings - cov.pairings.transpose()).cwiseAbs().maxCoeff() < 1e-10);
        // Decoupled ancilla marginal never changes.
        CHECK(std::abs(cov.occupations(7, 7) - cov0.occupations(7, 7)) < 1e-10);
    }
}

TEST_CASE("zero coupling leaves occupations and entanglement constant") {
    const BathSpec spec = small_spec(4, 1.0);
    const BathDiscretization disc = discretize(SpectralDensity::ohmic(0.0, 3.0), spec);
    const ModeNetwork net = ModeNetwork::build(1.0, disc, 1.3);
    const GaussianEvolver evolver(net);
    const ComplexCovariance cov0 = initial_covariance(1.0, spec, disc.frequencies);
    const EntanglementSeries series =
        entanglement_series(evolver, cov0, uniform_grid(0.9, 30));
    for (double value : series.values) {
        CHECK(value == doctest::Approx(series.values.front()).epsilon(1e-10));
    }
    const ComplexCovariance cov = evolver.evolve(cov0, 0.7);
    CHECK((cov.occupations.diagonal() - cov0.occupations.diagonal()).cwiseAbs().maxCoeff() <
          1e-12);
}

TEST_CASE("reduce_and_quadrature: vacuum, TMSV and thermal blocks") {
    const BathSpec spec = small_spec(2, 1.0);
    const std::vector<double> freqs = {1.0, 2.0};
    const ComplexCovariance vac = initial_covariance(0.0, spec, freqs);
    const Eigen::Matrix4d sigma_vac = reduce_and_quadrature(vac, 0, 3);
    CHECK((sigma_vac - 0.5 * Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-14);

    const double r = 0.8;
    const ComplexCovariance tmsv = initial_covariance(r, spec, freqs);
    const Eigen::Matrix4d sigma = reduce_and_quadrature(tmsv, 0, 3);
    for (int i = 0; i < 4; ++i) {
        CHECK(sigma(i, i) == doctest::Approx(0.5 * std::cosh(2.0 * r)).epsilon(1e-12));
    }
    CHECK(sigma(0, 2) == doctest::Approx(0.5 * std::sinh(2.0 * r)).epsilon(1e-12));
    CHECK(sigma(1, 3) == doctest::Approx(-0.5 * std::sinh(2.0 * r)).epsilon(1e-12));
    CHECK(sigma(0, 3) == doctest::Approx(0.0));
    CHECK(physicality_defect(sigma) > -1e-10);

    // Thermal mode: diagonal block (2 nbar + 1) / 2.
    BathSpec hot = small_spec(2, 1.0, 2.0);
    const ComplexCovariance thermal = initial_covariance(0.0, hot, freqs);
    const Eigen::Matrix4d sigma_th = reduce_and_quadrature(thermal, 1, 3);
    const double nbar = 1.0 / std::expm1(freqs[0] / 2.0);
    CHECK(sigma_th(0, 0) == doctest::Approx(0.5 * (2.0 * nbar + 1.0)).epsilon(1e-12));
    CHECK(sigma_th(1, 1) == doctest::Approx(0.5 * (2.0 * nbar + 1.0)).epsilon(1e-12));
}

TEST_CASE("log_negativity: product states are separable, TMSV is 2r/ln2") {
    CHECK(log_negativity(0.5 * Eigen::Matrix4d::Identity()) == 0.0);

    const BathSpec spec = small_spec(2, 1.0);
    const std::vector<double> freqs = {1.0, 2.0};
    for (double r : {0.5, 1.0, 2.0, 3.0}) {
        const ComplexCovariance tmsv = initial_covariance(r, spec, freqs);
        const Eigen::Matrix4d sigma = reduce_and_quadrature(tmsv, 0, 3);
        CHECK(log_negativity(sigma) ==
              doctest::Approx(2.0 * r / std::numbers::ln2).epsilon(1e-7));
    }
    // Slope in r is exactly 2 log2(e).
    const auto en = [&](double r) {
        return log_negativity(
            reduce_and_quadrature(initial_covariance(r, spec, freqs), 0, 3));
    };
    CHECK((en(3.0) - en(2.0)) == doctest::Approx(2.0 / std::numbers::ln2).epsilon(1e-6));
}

TEST_CASE("log_negativity matches the Fock-basis partial transpose brute force") {
    // n <= 60 keeps the TMSV tail below 1e-11 for r <= 0.8.
    for (double r : {0.25, 0.8}) {
        const double brute = oracles::tmsv_log_negativity(r, 60);
        CHECK(2.0 * r / std::numbers::ln2 == doctest::Approx(brute).epsilon(1e-8));
    }
}

TEST_CASE("three-mode pipeline matches truncated-Fock evolution") {
    const double omega_bath = 1.15, omega_anc = 0.9, coupling = 0.12, r = 0.4;
    BathDiscretization single;
    single.frequencies = {omega_bath};
    single.couplings = {coupling};
    const ModeNetwork net = ModeNetwork::build(1.0, single, omega_anc);
    const GaussianEvolver evolver(net);
    BathSpec spec = small_spec(1, 1.0);
    const ComplexCovariance cov0 = initial_covariance(r, spec, single.frequencies);

    const oracles::ThreeModeFock fock(1.0, omega_bath, omega_anc, coupling, r, 10);
    for (double t : {0.5, 2.0, 5.0}) {
        const ComplexCovariance cov = evolver.evolve(cov0, t);
        const oracles::ThreeModeFock::Moments m = fock.moments(t);
        // Gaussian modes (S, bath, ancilla) = indices (0, 1, 2); same order in Fock.
        for (int j : {0, 1, 2}) {
            for (int k : {0, 1, 2}) {
                CHECK(std::abs(cov.occupations(j, k) - m.occupations(j, k)) < 1e-6);
                CHECK(std::abs(cov.pairings(j, k) - m.pairings(j, k)) < 1e-6);
            }
        }
    }
}

TEST_CASE("single resonant bath mode produces non-monotone entanglement") {
    BathDiscretization single;
    single.frequencies = {1.0};
    single.couplings = {0.25};
    const ModeNetwork net = ModeNetwork::build(1.0, single, 1.0);
    const GaussianEvolver evolver(net);
    BathSpec spec = small_spec(1, 1.0);
    const ComplexCovariance cov0 = initial_covariance(1.0, spec, single.frequencies);
    const EntanglementSeries series =
        entanglement_series(evolver, cov0, uniform_grid(30.0, 400));
    double max_rise = 0.0;
    for (std::size_t k = 0; k + 1 < series.values.size(); ++k) {
        max_rise = std::max(max_rise, series.values[k + 1] - series.values[k]);
    }
    CHECK(max_rise > 0.01);
    // Two-mode Rabi exchange: E_N returns near its initial value each period.
    CHECK(series.values.front() == doctest::Approx(2.0 / std::numbers::ln2).epsilon(1e-9));
}

TEST_CASE("entanglement series is invariant under ancilla frequency changes") {
    const BathSpec spec = small_spec(8, 1.0, 1.0);
    const BathDiscretization disc = discretize(SpectralDensity::ohmic(0.05, 3.0), spec);
    const ComplexCovariance cov0 = initial_covariance(1.0, spec, disc.frequencies);
    const std::vector<double> grid = uniform_grid(6.0, 60);
    const EntanglementSeries a = entanglement_series(
        GaussianEvolver(ModeNetwork::build(1.0, disc, 1.0)), cov0, grid);
    const EntanglementSeries b = entanglement_series(
        GaussianEvolver(ModeNetwork::build(1.0, disc, 2.5)), cov0, grid);
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        CHECK(std::abs(a.values[k] - b.values[k]) < 1e-9);
    }
}

TEST_CASE("reduced_sigma fast path equals the full evolution") {
    const BathSpec spec = small_spec(10, 1.0, 0.5);
    const BathDiscretization disc = discretize(SpectralDensity::ohmic(0.08, 3.0), spec);
    const ModeNetwork net = ModeNetwork::build(1.0, disc, 1.0);
    const GaussianEvolver evolver(net);
    const ComplexCovariance cov0 = initial_covariance(0.7, spec, disc.frequencies);
    for (double t : {0.0, 0.9, 4.2}) {
        const Eigen::Matrix4d fast = evolver.reduced_sigma(cov0, t);
        const ComplexCovariance full = evolver.evolve(cov0, t);
        const Eigen::Matrix4d slow =
            reduce_and_quadrature(full, net.system_index(), net.ancilla_index());
        CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("weak-coupling Ohmic decay is monotone non-increasing") {
    BathSpec spec;
    spec.modes = 300;
    spec.omega_min = 0.003;
    spec.omega_max = 30.0;
    spec.temperature = 0.0;
    spec.horizon = 40.0;
    const BathDiscretization disc = discretize(SpectralDensity::ohmic(1e-3, 3.0), spec);
    const ModeNetwork net = ModeNetwork::build(1.0, disc, 1.0);
    const GaussianEvolver evolver(net);
    const ComplexCovariance cov0 = initial_covariance(1.0, spec, disc.frequencies);
    const EntanglementSeries series =
        entanglement_series(evolver, cov0, uniform_grid(spec.horizon, 500));
    for (std::size_t k = 0; k + 1 < series.values.size(); ++k) {
        CHECK(series.values[k + 1] <= series.values[k] + 1e-6);
    }
}
