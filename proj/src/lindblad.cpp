#include "nonmarkov/lindblad.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace nonmarkov {

namespace {

double condition_of(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    return smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
}

}  // namespace

LindbladGenerator LindbladGenerator::pure_dephasing(std::function<double(double)> gamma) {
    Matrix sz(2, 2);
    sz << 1.0, 0.0, 0.0, -1.0;
    LindbladGenerator gen;
    gen.dim = 2;
    gen.hamiltonian = [](double) { return Matrix::Zero(2, 2); };
    gen.channels.push_back({std::move(gamma), [sz](double) { return sz; }});
    return gen;
}

Superoperator generator_matrix(const LindbladGenerator& gen, double t) {
    const int d = gen.dim;
    const Matrix id = Matrix::Identity(d, d);
    Matrix h = gen.hamiltonian ? gen.hamiltonian(t) : Matrix::Zero(d, d);
    Matrix m = Complex(0.0, -1.0) *
               (Superoperator::from_left_right(h, id).matrix -
                Superoperator::from_left_right(id, h).matrix);
    for (const auto& ch : gen.channels) {
        const double gamma = ch.rate(t);
        const Matrix v = ch.op(t);
        const Matrix vdv = v.adjoint() * v;
        m += gamma * (Superoperator::from_left_right(v, v.adjoint()).matrix -
                      0.5 * Superoperator::from_left_right(vdv, id).matrix -
                      0.5 * Superoperator::from_left_right(id, vdv).matrix);
    }
    return {d, std::move(m)};
}

PropagatorFamily propagate(const LindbladGenerator& gen, double horizon, int steps) {
    if (steps < 1) {
        throw std::invalid_argument("propagate: steps >= 1 required");
    }
    if (horizon <= 0.0) {
        throw std::invalid_argument("propagate: horizon > 0 required");
    }
    const int d = gen.dim;
    const double dt = horizon / steps;
    PropagatorFamily family;
    family.dim = d;
    family.dt = dt;
    family.times.reserve(steps + 1);
    family.props.reserve(steps + 1);
    family.condition.reserve(steps + 1);
    family.times.push_back(0.0);
    family.props.push_back(Superoperator::identity(d));
    family.condition.push_back(1.0);
    for (int k = 0; k < steps; ++k) {
        const double t_mid = (k + 0.5) * dt;
        const Matrix step = (generator_matrix(gen, t_mid).matrix * dt).exp();
        Matrix next = step * family.props.back().matrix;
        if (next.cwiseAbs().maxCoeff() > 1e6) {
            throw std::runtime_error("propagate: propagator norm exploded at t = " +
                                     std::to_string((k + 1) * dt));
        }
        family.times.push_back((k + 1) * dt);
        family.condition.push_back(condition_of(next));
        family.props.push_back({d, std::move(next)});
    }
    return family;
}

IntermediateMap intermediate_map(const PropagatorFamily& family, int k,
                                 double cond_threshold) {
    if (k < 0 || k + 1 >= static_cast<int>(family.props.size())) {
        throw std::invalid_argument("intermediate_map: index out of grid");
    }
    const InversionResult inv = invert(family.props[k], cond_threshold);
    IntermediateMap window;
    window.map = compose(family.props[k + 1], inv.inverse);
    window.flagged = inv.used_pseudoinverse;
    window.residual = (window.map.matrix * family.props[k].matrix -
                       family.props[k + 1].matrix)
                          .cwiseAbs()
                          .maxCoeff();
    if (window.flagged && window.residual > 1e-6) {
        // Not enough information to define the window from the family alone.
        window.flagged = true;
    }
    return window;
}

StateTrajectory evolve_state(const LindbladGenerator& gen, const DensityMatrix& rho0,
                             double horizon, int steps) {
    if (steps < 1) {
        throw std::invalid_argument("evolve_state: steps >= 1 required");
    }
    const int d = gen.dim;
    const double dt = horizon / steps;
    StateTrajectory traj;
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(rho0.entries());
    Vector v = vectorize(rho0.entries());
    for (int k = 0; k < steps; ++k) {
        const double t_mid = (k + 0.5) * dt;
        const Matrix step = (generator_matrix(gen, t_mid).matrix * dt).exp();
        v = step * v;
        if (v.cwiseAbs().maxCoeff() > 1e6) {
            throw std::runtime_error("evolve_state: state norm exploded");
        }
        traj.times.push_back((k + 1) * dt);
        traj.states.push_back(unvectorize(v, d, d));
    }
    return traj;
}

void write_propagator_table(std::ostream& out, const PropagatorFamily& family) {
    out << "# propagator-family v1\n";
    out << "dim," << family.dim << "\n";
    char buf[128];
    for (std::size_t i = 0; i < family.times.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "t,%zu,%.12g", i, family.times[i]);
        out << buf << "\n";
    }
    const int n = family.dim * family.dim;
    for (std::size_t i = 0; i < family.props.size(); ++i) {
        const Matrix& m = family.props[i].matrix;
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                std::snprintf(buf, sizeof(buf), "e,%zu,%d,%d,%.17g,%.17g", i, r, c,
                              m(r, c).real(), m(r, c).imag());
                out << buf << "\n";
            }
        }
    }
}

namespace {

[[noreturn]] void parse_fail(int line_no, const std::string& what) {
    throw std::runtime_error("propagator table, line " + std::to_string(line_no) +
                             ": " + what);
}

}  // namespace

PropagatorFamily read_propagator_table(std::istream& in) {
    PropagatorFamily family;
    std::string line;
    int line_no = 0;
    int dim = 0;
    std::vector<double> times;
    std::vector<Matrix> mats;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string field;
        std::getline(ss, field, ',');
        if (field == "dim") {
            if (!(ss >> dim) || dim < 2) parse_fail(line_no, "bad dimension");
        } else if (field == "t") {
            if (dim == 0) parse_fail(line_no, "grid line before dim");
            std::size_t idx;
            double t;
            char comma;
            if (!(ss >> idx >> comma >> t) || comma != ',') {
                parse_fail(line_no, "malformed grid line");
            }
            if (idx != times.size()) parse_fail(line_no, "grid indices out of order");
            times.push_back(t);
        } else if (field == "e") {
            if (dim == 0) parse_fail(line_no, "entry line before dim");
            std::size_t idx;
            int r, c;
            double re, im;
            char c1, c2, c3, c4;
            if (!(ss >> idx >> c1 >> r >> c2 >> c >> c3 >> re >> c4 >> im) ||
                c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',') {
                parse_fail(line_no, "malformed entry line");
            }
            const int n = dim * dim;
            if (idx >= times.size()) parse_fail(line_no, "entry for unknown grid index");
            if (r < 0 || r >= n || c < 0 || c >= n) {
                parse_fail(line_no, "entry index out of range");
            }
            if (mats.size() < times.size()) {
                mats.resize(times.size(), Matrix::Zero(n, n));
            }
            mats[idx](r, c) = Complex(re, im);
        } else {
            parse_fail(line_no, "unknown record '" + field + "'");
        }
    }
    if (dim == 0 || times.size() < 2) {
        throw std::runtime_error("propagator table: need dim and at least two grid points");
    }
    if (mats.size() != times.size()) {
        throw std::runtime_error("propagator table: missing propagator entries");
    }
    if (std::abs(times.front()) > 1e-12) {
        throw std::runtime_error("propagator table: grid must start at t = 0");
    }
    const double dt = times[1] - times[0];
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (std::abs((times[i] - times[i - 1]) - dt) > 1e-9 * std::max(1.0, dt)) {
            throw std::runtime_error("propagator table: non-uniform grid at index " +
                                     std::to_string(i));
        }
    }
    family.dim = dim;
    family.dt = dt;
    family.times = std::move(times);
    for (Matrix& m : mats) {
        family.condition.push_back(condition_of(m));
        family.props.push_back({dim, std::move(m)});
    }
    return family;
}

}  // namespace nonmarkov
