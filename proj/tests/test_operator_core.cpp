#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "nonmarkov/operator_core.hpp"
#include "oracles.hpp"

using namespace nonmarkov;

namespace {

Superoperator transposition_map(int d) {
    // rho -> rho^T column by column.
    Superoperator t = Superoperator::identity(d);
    t.matrix.setZero();
    Matrix basis = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            basis(i, j) = 1.0;
            t.matrix.col(i + j * d) = vectorize(basis.transpose().eval());
            basis(i, j) = 0.0;
        }
    }
    return t;
}

Superoperator dephasing_map(int d) {
    Superoperator m = Superoperator::identity(d);
    m.matrix.setZero();
    for (int i = 0; i < d; ++i) {
        m.matrix(i + i * d, i + i * d) = 1.0;
    }
    return m;
}

}  // namespace

TEST_CASE("trace_norm on simple spectra") {
    Matrix diag = Matrix::Zero(2, 2);
    diag(0, 0) = 1.0;
    diag(1, 1) = -1.0;
    CHECK(trace_norm(diag) == doctest::Approx(2.0).epsilon(1e-12));

    for (int d : {2, 3, 5}) {
        CHECK(trace_norm(max_entangled(d).projector) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("trace_norm matches independent Jacobi eigensolver") {
    std::mt19937 rng(12345);
    const Matrix a = oracles::random_hermitian(6, rng);
    std::vector<double> eigenvalues = oracles::jacobi_eigenvalues(a);
    double expected = 0.0;
    for (double lambda : eigenvalues) expected += std::abs(lambda);
    CHECK(trace_norm(a) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("trace_norm rejects non-Hermitian input") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 1) = 1.0;
    CHECK_THROWS_AS(trace_norm(a), std::invalid_argument);
}

TEST_CASE("max_entangled structure") {
    CHECK_THROWS_AS(max_entangled(1), std::invalid_argument);

    const MaxEntangledState phi2 = max_entangled(2);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            const bool corner = (r == 0 || r == 3) && (c == 0 || c == 3);
            CHECK(std::abs(phi2.projector(r, c) - (corner ? 0.5 : 0.0)) < 1e-15);
        }
    }

    const MaxEntangledState phi3 = max_entangled(3);
    CHECK(phi3.projector.trace().real() == doctest::Approx(1.0));
    CHECK((phi3.projector * phi3.projector - phi3.projector).cwiseAbs().maxCoeff() < 1e-14);

    for (int d : {2, 3, 4}) {
        const MaxEntangledState phi = max_entangled(d);
        for (Subsystem side : {Subsystem::A, Subsystem::B}) {
            const Matrix reduced = partial_trace(phi.projector, d, d, side);
            CHECK((reduced - Matrix::Identity(d, d) / d).cwiseAbs().maxCoeff() < 1e-14);
        }
    }
}

TEST_CASE("choi_of identity, transposition and dephasing") {
    const ChoiMatrix id_choi = choi_of(Superoperator::identity(2));
    CHECK((id_choi.entries - max_entangled(2).projector).cwiseAbs().maxCoeff() < 1e-14);

    const ChoiMatrix t_choi = choi_of(transposition_map(2));
    Matrix swap = Matrix::Zero(4, 4);
    swap(0, 0) = swap(3, 3) = swap(1, 2) = swap(2, 1) = 1.0;
    CHECK((t_choi.entries - 0.5 * swap).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(trace_norm(t_choi.entries) == doctest::Approx(2.0).epsilon(1e-12));

    const ChoiMatrix d_choi = choi_of(dephasing_map(2));
    Matrix expected = Matrix::Zero(4, 4);
    expected(0, 0) = expected(3, 3) = 0.5;
    CHECK((d_choi.entries - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("choi reshuffle consistency on random basis states") {
    std::mt19937 rng(99);
    for (int d : {2, 3}) {
        const Superoperator a = oracles::random_cptp_map(d, 3, rng);
        const Superoperator b = oracles::random_cptp_map(d, 2, rng);
        const Superoperator ab = compose(a, b);
        for (int trial = 0; trial < 20; ++trial) {
            Matrix rho = oracles::random_hermitian(d, rng);
            rho = (rho * rho).eval();
            rho /= rho.trace();
            const Matrix direct = a.apply(b.apply(rho));
            const Matrix composed = ab.apply(rho);
            CHECK((direct - composed).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("CP-TP maps have PSD unit-trace-norm Choi") {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = (trial % 2 == 0) ? 2 : 3;
        const Superoperator map = oracles::random_cptp_map(d, 1 + trial % 4, rng);
        CHECK(map.trace_preservation_defect() < 1e-12);
        const ChoiMatrix choi = choi_of(map);
        CHECK(trace_norm(choi.entries, 1e-10) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(choi.min_eigenvalue() > -1e-10);
    }
}

TEST_CASE("CP test: PSD Choi iff trace norm equals trace") {
    std::mt19937 rng(5);
    const Superoperator cp = oracles::random_cptp_map(2, 3, rng);
    const ChoiMatrix cp_choi = choi_of(cp);
    CHECK(std::abs(trace_norm(cp_choi.entries, 1e-10) - cp_choi.entries.trace().real()) < 1e-9);

    const ChoiMatrix ncp_choi = choi_of(transposition_map(2));
    CHECK(ncp_choi.min_eigenvalue() < -0.4);
    CHECK(trace_norm(ncp_choi.entries) - ncp_choi.entries.trace().real() > 0.9);
}

TEST_CASE("partial_transpose basics") {
    std::mt19937 rng(7);
    Matrix rho_a = oracles::random_hermitian(2, rng);
    Matrix rho_b = oracles::random_hermitian(3, rng);
    const Matrix product = Eigen::kroneckerProduct(rho_a, rho_b).eval();
    const Matrix expected = Eigen::kroneckerProduct(rho_a.transpose().eval(), rho_b).eval();
    CHECK((partial_transpose(product, 2, 3, Subsystem::A) - expected).cwiseAbs().maxCoeff() <
          1e-14);

    const Matrix phi_pt = partial_transpose(max_entangled(2).projector, 2, 2, Subsystem::A);
    std::vector<double> eigenvalues = oracles::jacobi_eigenvalues(phi_pt);
    std::sort(eigenvalues.begin(), eigenvalues.end());
    CHECK(eigenvalues.front() == doctest::Approx(-0.5).epsilon(1e-10));
    CHECK(eigenvalues.back() == doctest::Approx(0.5).epsilon(1e-10));

    const Matrix random = oracles::random_hermitian(6, rng);
    const Matrix once = partial_transpose(random, 2, 3, Subsystem::B);
    CHECK(std::abs(once.trace() - random.trace()) < 1e-15);
    CHECK((once - once.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((partial_transpose(once, 2, 3, Subsystem::B) - random).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(partial_transpose(random, 2, 2, Subsystem::A), std::invalid_argument);
}

TEST_CASE("compose and invert") {
    std::mt19937 rng(31);
    const Superoperator e = oracles::random_cptp_map(2, 3, rng);
    const Superoperator id = Superoperator::identity(2);
    CHECK((compose(e, id).matrix - e.matrix).cwiseAbs().maxCoeff() < 1e-14);

    const InversionResult inv_id = invert(id);
    CHECK_FALSE(inv_id.used_pseudoinverse);
    CHECK((inv_id.inverse.matrix - id.matrix).cwiseAbs().maxCoeff() < 1e-12);

    // Constant-generator semigroup: invert(E_t) E_{t+s} = E_s.
    Matrix sz(2, 2);
    sz << 1.0, 0.0, 0.0, -1.0;
    Matrix l = Eigen::kroneckerProduct(sz.conjugate().eval(), sz).eval() -
               Matrix::Identity(4, 4);
    const double t = 0.4, s = 0.7;
    const Superoperator e_t{2, (l * t).exp()};
    const Superoperator e_ts{2, (l * (t + s)).exp()};
    const Superoperator e_s{2, (l * s).exp()};
    const Superoperator extracted = compose(e_ts, invert(e_t).inverse);
    CHECK((extracted.matrix - e_s.matrix).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("invert flags singular maps") {
    Superoperator singular = Superoperator::identity(2);
    singular.matrix(3, 3) = 0.0;
    const InversionResult result = invert(singular);
    CHECK(result.used_pseudoinverse);
    // Pseudoinverse of a diagonal projector is itself.
    CHECK((result.inverse.matrix - singular.matrix).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("density matrix validation") {
    CHECK_THROWS_AS(DensityMatrix(Matrix::Identity(2, 2)), std::invalid_argument);
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 0) = 1.5;
    bad(1, 1) = -0.5;
    CHECK_THROWS_AS(DensityMatrix{bad}, std::invalid_argument);
    CHECK(DensityMatrix::maximally_mixed(3).dim() == 3);
}

TEST_CASE("vectorization round trip fixes the column-stacking convention") {
    Matrix a(2, 2);
    a << Complex(1, 0), Complex(3, 0), Complex(2, 0), Complex(4, 0);
    const Vector v = vectorize(a);
    CHECK(v(0).real() == 1.0);  // column-stacking: (0,0), (1,0), (0,1), (1,1)
    CHECK(v(1).real() == 2.0);
    CHECK(v(2).real() == 3.0);
    CHECK(v(3).real() == 4.0);
    CHECK((unvectorize(v, 2, 2) - a).cwiseAbs().maxCoeff() == 0.0);

    std::mt19937 rng(3);
    const Matrix x = oracles::random_hermitian(3, rng);
    const Matrix b = oracles::random_hermitian(3, rng);
    const Matrix c = oracles::random_hermitian(3, rng);
    const Superoperator lr = Superoperator::from_left_right(b, c);
    CHECK((lr.apply(x) - b * x * c).cwiseAbs().maxCoeff() < 1e-12);
}
