#include "nonmarkov/operator_core.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

namespace nonmarkov {

namespace {

double max_abs(const Matrix& a) {
    return a.cwiseAbs().maxCoeff();
}

}  // namespace

DensityMatrix::DensityMatrix(Matrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() < 1) {
        throw std::invalid_argument("DensityMatrix: square matrix required");
    }
    const double asym = max_abs(entries_ - entries_.adjoint());
    if (asym > 1e-12) {
        throw std::invalid_argument("DensityMatrix: not Hermitian, asymmetry " +
                                    std::to_string(asym));
    }
    entries_ = 0.5 * (entries_ + entries_.adjoint()).eval();
    const double trace_defect = std::abs(entries_.trace() - Complex(1.0, 0.0));
    if (trace_defect > 1e-12) {
        throw std::invalid_argument("DensityMatrix: trace defect " +
                                    std::to_string(trace_defect));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(entries_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) {
        throw std::invalid_argument("DensityMatrix: negative eigenvalue " +
                                    std::to_string(es.eigenvalues().minCoeff()));
    }
}

DensityMatrix DensityMatrix::maximally_mixed(int d) {
    return DensityMatrix(Matrix::Identity(d, d) / static_cast<double>(d));
}

Superoperator Superoperator::identity(int d) {
    return {d, Matrix::Identity(d * d, d * d)};
}

Superoperator Superoperator::from_left_right(const Matrix& a, const Matrix& b) {
    const int d = static_cast<int>(a.rows());
    Matrix m = Eigen::kroneckerProduct(b.transpose(), a);
    return {d, std::move(m)};
}

Superoperator Superoperator::from_kraus(const std::vector<Matrix>& kraus) {
    if (kraus.empty()) {
        throw std::invalid_argument("from_kraus: empty Kraus set");
    }
    const int d = static_cast<int>(kraus.front().rows());
    Matrix m = Matrix::Zero(d * d, d * d);
    for (const Matrix& k : kraus) {
        m += Eigen::kroneckerProduct(k.conjugate(), k).eval();
    }
    return {d, std::move(m)};
}

Matrix Superoperator::apply(const Matrix& rho) const {
    return unvectorize(matrix * vectorize(rho), dim, dim);
}

double Superoperator::trace_preservation_defect() const {
    const Vector id_vec = vectorize(Matrix::Identity(dim, dim));
    return (matrix.adjoint() * id_vec - id_vec).cwiseAbs().maxCoeff();
}

double ChoiMatrix::min_eigenvalue() const {
    const Matrix h = 0.5 * (entries + entries.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

Vector vectorize(const Matrix& a) {
    return Eigen::Map<const Vector>(a.data(), a.size());
}

Matrix unvectorize(const Vector& v, int rows, int cols) {
    return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

double trace_norm(const Matrix& a, double herm_tol) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("trace_norm: square matrix required");
    }
    const double asym = max_abs(a - a.adjoint());
    if (asym > herm_tol) {
        throw std::invalid_argument("trace_norm: non-Hermitian input, asymmetry " +
                                    std::to_string(asym));
    }
    const Matrix h = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

MaxEntangledState max_entangled(int d) {
    if (d < 2) {
        throw std::invalid_argument("max_entangled: d >= 2 required");
    }
    MaxEntangledState phi;
    phi.dim = d;
    phi.state = Vector::Zero(d * d);
    const double amp = 1.0 / std::sqrt(static_cast<double>(d));
    for (int n = 0; n < d; ++n) {
        phi.state(n * d + n) = amp;  // |n>|n> with A (x) B index a*d + b
    }
    phi.projector = phi.state * phi.state.adjoint();
    return phi;
}

ChoiMatrix choi_of(const Superoperator& map) {
    const int d = map.dim;
    ChoiMatrix choi;
    choi.dim = d;
    choi.entries = Matrix::Zero(d * d, d * d);
    // Apply the map to the first tensor factor of |Phi><Phi| basis by basis:
    // |Phi><Phi| = (1/d) sum_{ij} |i><j| (x) |i><j|.
    Matrix basis = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            basis(i, j) = 1.0;
            const Matrix mapped = map.apply(basis);
            basis(i, j) = 0.0;
            for (int k = 0; k < d; ++k) {
                for (int l = 0; l < d; ++l) {
                    choi.entries(k * d + i, l * d + j) += mapped(k, l) / static_cast<double>(d);
                }
            }
        }
    }
    return choi;
}

Matrix partial_transpose(const Matrix& rho, int dim_a, int dim_b, Subsystem which) {
    if (rho.rows() != rho.cols() ||
        rho.rows() != static_cast<Eigen::Index>(dim_a) * dim_b) {
        throw std::invalid_argument("partial_transpose: dimension mismatch");
    }
    Matrix out(rho.rows(), rho.cols());
    for (int a1 = 0; a1 < dim_a; ++a1) {
        for (int b1 = 0; b1 < dim_b; ++b1) {
            for (int a2 = 0; a2 < dim_a; ++a2) {
                for (int b2 = 0; b2 < dim_b; ++b2) {
                    const int row = a1 * dim_b + b1;
                    const int col = a2 * dim_b + b2;
                    const int src_row = (which == Subsystem::A ? a2 : a1) * dim_b +
                                        (which == Subsystem::B ? b2 : b1);
                    const int src_col = (which == Subsystem::A ? a1 : a2) * dim_b +
                                        (which == Subsystem::B ? b1 : b2);
                    out(row, col) = rho(src_row, src_col);
                }
            }
        }
    }
    return out;
}

Superoperator compose(const Superoperator& a, const Superoperator& b) {
    if (a.dim != b.dim) {
        throw std::invalid_argument("compose: dimension mismatch");
    }
    return {a.dim, a.matrix * b.matrix};
}

InversionResult invert(const Superoperator& a, double cond_threshold) {
    Eigen::JacobiSVD<Matrix> svd(a.matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    InversionResult result;
    result.condition_number = (smin > 0.0) ? smax / smin
                                           : std::numeric_limits<double>::infinity();
    if (result.condition_number < cond_threshold) {
        result.inverse = {a.dim, a.matrix.inverse()};
        result.used_pseudoinverse = false;
    } else {
        // Moore-Penrose pseudoinverse with singular values below
        // smax/cond_threshold treated as zero.
        Eigen::VectorXd inv_sv = Eigen::VectorXd::Zero(sv.size());
        const double cutoff = smax / cond_threshold;
        for (Eigen::Index i = 0; i < sv.size(); ++i) {
            if (sv(i) > cutoff) inv_sv(i) = 1.0 / sv(i);
        }
        result.inverse = {a.dim, svd.matrixV() * inv_sv.asDiagonal() *
                                     svd.matrixU().adjoint()};
        result.used_pseudoinverse = true;
    }
    return result;
}

Matrix partial_trace(const Matrix& rho, int dim_a, int dim_b, Subsystem traced_out) {
    if (rho.rows() != rho.cols() ||
        rho.rows() != static_cast<Eigen::Index>(dim_a) * dim_b) {
        throw std::invalid_argument("partial_trace: dimension mismatch");
    }
    if (traced_out == Subsystem::B) {
        Matrix out = Matrix::Zero(dim_a, dim_a);
        for (int a1 = 0; a1 < dim_a; ++a1) {
            for (int a2 = 0; a2 < dim_a; ++a2) {
                for (int b = 0; b < dim_b; ++b) {
                    out(a1, a2) += rho(a1 * dim_b + b, a2 * dim_b + b);
                }
            }
        }
        return out;
    }
    Matrix out = Matrix::Zero(dim_b, dim_b);
    for (int b1 = 0; b1 < dim_b; ++b1) {
        for (int b2 = 0; b2 < dim_b; ++b2) {
            for (int a = 0; a < dim_a; ++a) {
                out(b1, b2) += rho(a * dim_b + b1, a * dim_b + b2);
            }
        }
    }
    return out;
}

}  // namespace nonmarkov
