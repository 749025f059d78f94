#include "nonmarkov/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace nonmarkov {

SpectralDensity SpectralDensity::ohmic(double alpha, double omega_c) {
    return {SpectralKind::Ohmic, alpha, omega_c, 1.0};
}

SpectralDensity SpectralDensity::super_ohmic(double alpha, double omega_c) {
    return {SpectralKind::SuperOhmic, alpha, omega_c, 3.0};
}

double SpectralDensity::operator()(double omega) const {
    double s = exponent;
    if (kind == SpectralKind::Ohmic) s = 1.0;
    if (kind == SpectralKind::SuperOhmic) s = 3.0;
    return alpha * std::pow(omega, s) * std::exp(-omega / omega_c);
}

void BathSpec::validate() const {
    if (modes < 1) throw std::invalid_argument("BathSpec: M >= 1 required");
    if (!(0.0 < omega_min && omega_min < omega_max)) {
        throw std::invalid_argument("BathSpec: need 0 < omega_min < omega_max");
    }
    if (temperature < 0.0) throw std::invalid_argument("BathSpec: T >= 0 required");
    if (horizon <= 0.0) throw std::invalid_argument("BathSpec: horizon > 0 required");
    if (horizon >= recurrence_time()) {
        throw std::invalid_argument(
            "BathSpec: horizon " + std::to_string(horizon) +
            " reaches the bath recurrence time " + std::to_string(recurrence_time()) +
            "; increase M or shorten the horizon");
    }
}

double BathSpec::recurrence_time() const {
    return 2.0 * std::numbers::pi / delta_omega();
}

BathDiscretization discretize(const SpectralDensity& density, const BathSpec& spec) {
    spec.validate();
    if (density.alpha < 0.0) {
        throw std::invalid_argument("discretize: negative coupling strength");
    }
    const double dw = spec.delta_omega();
    BathDiscretization disc;
    disc.frequencies.reserve(spec.modes);
    disc.couplings.reserve(spec.modes);
    for (int j = 1; j <= spec.modes; ++j) {
        const double omega = spec.omega_min + (j - 0.5) * dw;
        const double j_of_omega = density(omega);
        if (j_of_omega < 0.0) {
            throw std::invalid_argument("discretize: negative spectral density");
        }
        disc.frequencies.push_back(omega);
        disc.couplings.push_back(std::sqrt(j_of_omega * dw));
    }
    return disc;
}

ModeNetwork ModeNetwork::build(double omega_system, const BathDiscretization& bath,
                               double omega_ancilla) {
    const int m = static_cast<int>(bath.frequencies.size());
    ModeNetwork net;
    net.frequency_matrix = Eigen::MatrixXd::Zero(m + 2, m + 2);
    net.frequency_matrix(0, 0) = omega_system;
    for (int j = 0; j < m; ++j) {
        net.frequency_matrix(j + 1, j + 1) = bath.frequencies[j];
        net.frequency_matrix(0, j + 1) = bath.couplings[j];
        net.frequency_matrix(j + 1, 0) = bath.couplings[j];
    }
    net.frequency_matrix(m + 1, m + 1) = omega_ancilla;
    return net;
}

ComplexCovariance initial_covariance(double squeezing, const BathSpec& spec,
                                     const std::vector<double>& frequencies) {
    if (squeezing < 0.0) {
        throw std::invalid_argument("initial_covariance: r >= 0 required");
    }
    if (spec.temperature < 0.0) {
        throw std::invalid_argument("initial_covariance: T >= 0 required");
    }
    const int m = static_cast<int>(frequencies.size());
    const int total = m + 2;
    const int sys = 0;
    const int anc = total - 1;
    ComplexCovariance cov;
    cov.occupations = Matrix::Zero(total, total);
    cov.pairings = Matrix::Zero(total, total);
    const double sh = std::sinh(squeezing);
    const double ch = std::cosh(squeezing);
    cov.occupations(sys, sys) = sh * sh;
    cov.occupations(anc, anc) = sh * sh;
    cov.pairings(sys, anc) = sh * ch;
    cov.pairings(anc, sys) = sh * ch;
    for (int j = 0; j < m; ++j) {
        if (spec.temperature > 0.0) {
            cov.occupations(j + 1, j + 1) =
                1.0 / std::expm1(frequencies[j] / spec.temperature);
        }
    }
    return cov;
}

GaussianEvolver::GaussianEvolver(const ModeNetwork& net) {
    const Eigen::MatrixXd& omega = net.frequency_matrix;
    if ((omega - omega.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw std::invalid_argument("GaussianEvolver: frequency matrix not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(omega);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("GaussianEvolver: eigendecomposition failed");
    }
    vectors_ = es.eigenvectors();
    frequencies_ = es.eigenvalues();
    system_ = net.system_index();
    ancilla_ = net.ancilla_index();
}

Eigen::MatrixXcd GaussianEvolver::mode_transform(double t) const {
    const Eigen::VectorXcd phases =
        (Complex(0.0, -1.0) * t * frequencies_.cast<Complex>()).array().exp();
    return vectors_.cast<Complex>() * phases.asDiagonal() *
           vectors_.transpose().cast<Complex>();
}

ComplexCovariance GaussianEvolver::evolve(const ComplexCovariance& cov0, double t) const {
    const Eigen::MatrixXcd u = mode_transform(t);
    ComplexCovariance cov;
    cov.occupations = u.conjugate() * cov0.occupations * u.transpose();
    cov.pairings = u * cov0.pairings * u.transpose();
    return cov;
}

namespace {

Eigen::Matrix4d sigma_from_blocks(const Eigen::Matrix2cd& n_block,
                                  const Eigen::Matrix2cd& m_block) {
    // x = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2)), vacuum variance 1/2:
    //   sigma_xx = 1/2 delta + Re N + Re M
    //   sigma_pp = 1/2 delta + Re N - Re M
    //   sigma_xp = Im N + Im M
    Eigen::Matrix4d sigma;
    for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
            const double delta = (j == k) ? 0.5 : 0.0;
            const Complex n = n_block(j, k);
            const Complex mm = m_block(j, k);
            sigma(2 * j, 2 * k) = delta + n.real() + mm.real();
            sigma(2 * j + 1, 2 * k + 1) = delta + n.real() - mm.real();
            sigma(2 * j, 2 * k + 1) = n.imag() + mm.imag();
            sigma(2 * j + 1, 2 * k) = -n.imag() + mm.imag();
        }
    }
    return 0.5 * (sigma + sigma.transpose().eval());
}

}  // namespace

Eigen::Matrix4d GaussianEvolver::reduced_sigma(const ComplexCovariance& cov0,
                                               double t) const {
    // Only the system and ancilla rows of U(t) enter the reduced second moments.
    const Eigen::VectorXcd phases =
        (Complex(0.0, -1.0) * t * frequencies_.cast<Complex>()).array().exp();
    Eigen::MatrixXcd rows(2, vectors_.rows());
    rows.row(0) = vectors_.row(system_).cast<Complex>();
    rows.row(1) = vectors_.row(ancilla_).cast<Complex>();
    rows = rows * phases.asDiagonal() * vectors_.transpose().cast<Complex>();
    const Eigen::Matrix2cd n_block =
        rows.conjugate() * cov0.occupations * rows.transpose();
    const Eigen::Matrix2cd m_block = rows * cov0.pairings * rows.transpose();
    return sigma_from_blocks(n_block, m_block);
}

Eigen::Matrix4d reduce_and_quadrature(const ComplexCovariance& cov, int mode_a,
                                      int mode_b) {
    Eigen::Matrix2cd n_block, m_block;
    const int idx[2] = {mode_a, mode_b};
    for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
            n_block(j, k) = cov.occupations(idx[j], idx[k]);
            m_block(j, k) = cov.pairings(idx[j], idx[k]);
        }
    }
    const Eigen::Matrix4d sigma = sigma_from_blocks(n_block, m_block);
    const double defect = physicality_defect(sigma);
    if (defect < -1e-8) {
        throw std::runtime_error("reduce_and_quadrature: unphysical covariance, "
                                 "uncertainty defect " + std::to_string(defect));
    }
    return sigma;
}

double physicality_defect(const Eigen::Matrix4d& sigma) {
    Eigen::Matrix4cd m = sigma.cast<Complex>();
    // Symplectic form for ordering (x1, p1, x2, p2).
    Eigen::Matrix4d j_symp = Eigen::Matrix4d::Zero();
    j_symp(0, 1) = 1.0;
    j_symp(1, 0) = -1.0;
    j_symp(2, 3) = 1.0;
    j_symp(3, 2) = -1.0;
    m += Complex(0.0, 0.5) * j_symp.cast<Complex>();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double log_negativity(const Eigen::Matrix4d& sigma) {
    const Eigen::Matrix2d a = sigma.block<2, 2>(0, 0);
    const Eigen::Matrix2d b = sigma.block<2, 2>(2, 2);
    const Eigen::Matrix2d c = sigma.block<2, 2>(0, 2);
    const double delta_pt = a.determinant() + b.determinant() - 2.0 * c.determinant();
    const double det_sigma = sigma.determinant();
    const double disc = delta_pt * delta_pt - 4.0 * det_sigma;
    if (disc < -1e-10 * std::max(1.0, delta_pt * delta_pt)) {
        throw std::runtime_error("log_negativity: unphysical covariance matrix");
    }
    const double nu_sq = 0.5 * (delta_pt - std::sqrt(std::max(0.0, disc)));
    if (nu_sq <= 0.0) {
        throw std::runtime_error("log_negativity: nonpositive symplectic eigenvalue");
    }
    const double nu = std::sqrt(nu_sq);
    return std::max(0.0, -std::log2(2.0 * nu));
}

EntanglementSeries entanglement_series(const GaussianEvolver& evolver,
                                       const ComplexCovariance& cov0,
                                       const std::vector<double>& t_grid) {
    EntanglementSeries series;
    series.times = t_grid;
    series.values.reserve(t_grid.size());
    for (double t : t_grid) {
        const Eigen::Matrix4d sigma = evolver.reduced_sigma(cov0, t);
        const double defect = physicality_defect(sigma);
        if (defect < -1e-8) {
            throw std::runtime_error("entanglement_series: unphysical covariance at t = " +
                                     std::to_string(t));
        }
        series.values.push_back(log_negativity(sigma));
    }
    return series;
}

std::vector<double> uniform_grid(double t_max, int samples) {
    if (samples < 2 || t_max <= 0.0) {
        throw std::invalid_argument("uniform_grid: need samples >= 2, t_max > 0");
    }
    std::vector<double> grid(samples);
    for (int i = 0; i < samples; ++i) {
        grid[i] = t_max * i / (samples - 1);
    }
    return grid;
}

}  // namespace nonmarkov
