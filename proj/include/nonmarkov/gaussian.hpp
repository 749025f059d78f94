// Exact Gaussian simulation of a damped harmonic oscillator coupled to a
// discretized bosonic bath, with a decoupled ancilla initially two-mode
// squeezed with the system. Produces system-ancilla logarithmic negativity
// time series.
//
// Units: hbar = k_B = 1, frequencies in units of the system frequency.
// Mode ordering: 0 = system, 1..M = bath, M+1 = ancilla.

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "nonmarkov/operator_core.hpp"

namespace nonmarkov {

enum class SpectralKind { Ohmic, SuperOhmic, Generic };

// J(omega) = alpha * omega^s * exp(-omega / omega_c), s = 1 (Ohmic),
// s = 3 (super-Ohmic) or a generic exponent.
struct SpectralDensity {
    SpectralKind kind = SpectralKind::Ohmic;
    double alpha = 0.0;
    double omega_c = 1.0;
    double exponent = 1.0;   // s; fixed by kind unless Generic

    static SpectralDensity ohmic(double alpha, double omega_c);
    static SpectralDensity super_ohmic(double alpha, double omega_c);

    double operator()(double omega) const;
};

struct BathSpec {
    int modes = 0;           // M
    double omega_min = 0.0;
    double omega_max = 0.0;
    double temperature = 0.0;
    double horizon = 0.0;    // t_max, must stay below the recurrence time

    // Throws unless M >= 1, 0 < omega_min < omega_max, T >= 0 and
    // horizon < 2*pi / delta_omega.
    void validate() const;

    double delta_omega() const { return (omega_max - omega_min) / modes; }
    double recurrence_time() const;
};

struct BathDiscretization {
    std::vector<double> frequencies;  // omega_j, midpoint grid
    std::vector<double> couplings;    // g_j = sqrt(J(omega_j) * delta_omega)
};

// System + bath + ancilla frequency matrix. Ancilla row/column carries no
// coupling.
struct ModeNetwork {
    Eigen::MatrixXd frequency_matrix;  // (M+2) x (M+2) real symmetric

    static ModeNetwork build(double omega_system, const BathDiscretization& bath,
                             double omega_ancilla);

    int mode_count() const { return static_cast<int>(frequency_matrix.rows()); }
    int system_index() const { return 0; }
    int ancilla_index() const { return mode_count() - 1; }
};

// Second moments of a zero-mean Gaussian state of all modes:
// N_jk = <a_j^dag a_k> (Hermitian PSD), M_jk = <a_j a_k> (symmetric).
struct ComplexCovariance {
    Matrix occupations;   // N
    Matrix pairings;      // M
};

BathDiscretization discretize(const SpectralDensity& density, const BathSpec& spec);

// TMSV(r) on (system, ancilla), thermal bath at spec.temperature.
ComplexCovariance initial_covariance(double squeezing, const BathSpec& spec,
                                     const std::vector<double>& frequencies);

// Precomputes the eigendecomposition of the frequency matrix once; every
// query at time t reuses it. Mode operators evolve as
// a_j(t) = sum_k U_jk a_k(0) with U = exp(-i Omega t), so
// N(t) = conj(U) N(0) U^T and M(t) = U M(0) U^T.
class GaussianEvolver {
public:
    explicit GaussianEvolver(const ModeNetwork& net);

    Eigen::MatrixXcd mode_transform(double t) const;               // U(t), full
    ComplexCovariance evolve(const ComplexCovariance& cov0, double t) const;

    // 4x4 quadrature covariance of the (system, ancilla) pair at time t,
    // computed from the two needed rows of U(t) only.
    Eigen::Matrix4d reduced_sigma(const ComplexCovariance& cov0, double t) const;

private:
    Eigen::MatrixXd vectors_;
    Eigen::VectorXd frequencies_;
    int system_;
    int ancilla_;
};

// Quadrature covariance of two retained modes, ordering (x1, p1, x2, p2) with
// vacuum variance 1/2.
Eigen::Matrix4d reduce_and_quadrature(const ComplexCovariance& cov, int mode_a,
                                      int mode_b);

// E_N = max(0, -log2(2 * nu_minus)) from the partially transposed symplectic
// eigenvalue of a 4x4 two-mode covariance matrix.
double log_negativity(const Eigen::Matrix4d& sigma);

// Smallest eigenvalue of sigma + (i/2) J_symp; >= 0 (up to tolerance) for
// physical states.
double physicality_defect(const Eigen::Matrix4d& sigma);

struct EntanglementSeries {
    std::vector<double> times;
    std::vector<double> values;  // E_N in bits
};

EntanglementSeries entanglement_series(const GaussianEvolver& evolver,
                                       const ComplexCovariance& cov0,
                                       const std::vector<double>& t_grid);

std::vector<double> uniform_grid(double t_max, int samples);

}  // namespace nonmarkov
