// Dense complex operator algebra shared by all modules: states, superoperators,
// Choi matrices, trace norm and partial transposition.
//
// Vectorization convention (fixed project-wide): vec(rho) stacks the COLUMNS of
// rho, so that vec(A rho B) = (B^T (x) A) vec(rho). Every superoperator matrix
// in this code base is expressed in this convention.

#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nonmarkov {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// d x d complex Hermitian, unit-trace, positive semidefinite state.
class DensityMatrix {
public:
    // Validates Hermiticity (1e-12), unit trace (1e-12) and min eigenvalue
    // >= -1e-10; throws std::invalid_argument otherwise.
    explicit DensityMatrix(Matrix entries);

    int dim() const { return static_cast<int>(entries_.rows()); }
    const Matrix& entries() const { return entries_; }

    static DensityMatrix maximally_mixed(int d);

private:
    Matrix entries_;
};

// d^2 x d^2 matrix acting on column-stacked operators.
struct Superoperator {
    int dim = 0;       // Hilbert space dimension d
    Matrix matrix;     // d^2 x d^2

    static Superoperator identity(int d);

    // Superoperator of rho -> A rho B under column stacking: B^T (x) A.
    static Superoperator from_left_right(const Matrix& a, const Matrix& b);

    // Sum_i conj(K_i) (x) K_i for a Kraus set.
    static Superoperator from_kraus(const std::vector<Matrix>& kraus);

    Matrix apply(const Matrix& rho) const;

    // max_j |(vec(1)^dag S)_j - vec(1)^dag_j|
    double trace_preservation_defect() const;
};

// (E (x) 1)(|Phi><Phi|) for the normalized maximally entangled |Phi>.
struct ChoiMatrix {
    int dim = 0;       // local dimension d
    Matrix entries;    // d^2 x d^2, Hermitian for Hermiticity-preserving maps

    double min_eigenvalue() const;
    bool is_cp(double tol = 1e-10) const { return min_eigenvalue() >= -tol; }
};

// |Phi> = (1/sqrt(d)) sum_n |n>|n> and its projector.
struct MaxEntangledState {
    int dim = 0;
    Vector state;      // d^2 vector
    Matrix projector;  // d^2 x d^2
};

enum class Subsystem { A, B };

// Column-stacking helpers.
Vector vectorize(const Matrix& a);
Matrix unvectorize(const Vector& v, int rows, int cols);

// Sum of absolute eigenvalues of a Hermitian matrix. Inputs with asymmetry
// ||A - A^dag||_max above `herm_tol` are rejected (diagnostic carries the
// asymmetry norm); below it the matrix is symmetrized before the
// eigendecomposition.
double trace_norm(const Matrix& a, double herm_tol = 1e-12);

MaxEntangledState max_entangled(int d);

ChoiMatrix choi_of(const Superoperator& map);

// Index transposition on one tensor factor of a (dA*dB) x (dA*dB) matrix.
Matrix partial_transpose(const Matrix& rho, int dim_a, int dim_b, Subsystem which);

// a after b: matrix product a.matrix * b.matrix.
Superoperator compose(const Superoperator& a, const Superoperator& b);

struct InversionResult {
    Superoperator inverse;
    bool used_pseudoinverse = false;
    double condition_number = 0.0;
};

// Exact inverse while the SVD condition number stays below cond_threshold;
// above it, the Moore-Penrose pseudoinverse with the singularity flag set.
InversionResult invert(const Superoperator& a, double cond_threshold = 1e8);

// Partial trace over one factor of a (dA*dB) x (dA*dB) matrix.
Matrix partial_trace(const Matrix& rho, int dim_a, int dim_b, Subsystem traced_out);

}  // namespace nonmarkov
