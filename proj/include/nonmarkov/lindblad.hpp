// Time-dependent Lindblad generators, master-equation propagation and
// intermediate-map extraction, plus the propagator-table file format used to
// feed externally reconstructed (tomographic) dynamics into the same pipeline.

#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "nonmarkov/operator_core.hpp"

namespace nonmarkov {

// One dissipation channel: rate gamma_k(t) (may be negative) and operator V_k(t).
struct DissipationChannel {
    std::function<double(double)> rate;
    std::function<Matrix(double)> op;
};

struct LindbladGenerator {
    int dim = 0;
    std::function<Matrix(double)> hamiltonian;  // t -> d x d Hermitian
    std::vector<DissipationChannel> channels;

    static LindbladGenerator pure_dephasing(std::function<double(double)> gamma);
};

// E_{(t_k,0)} on a uniform grid t_0 = 0 < t_1 < ... < t_K.
struct PropagatorFamily {
    int dim = 0;
    double dt = 0.0;
    std::vector<double> times;            // size K+1, times[0] == 0
    std::vector<Superoperator> props;     // props[0] == identity
    std::vector<double> condition;        // SVD condition number per point

    int steps() const { return static_cast<int>(times.size()) - 1; }
};

struct IntermediateMap {
    Superoperator map;                    // E_{(t_{k+1}, t_k)}
    bool flagged = false;                 // pseudoinverse path was taken
    double residual = 0.0;                // ||E_win E_{(t_k,0)} - E_{(t_{k+1},0)}||_max
};

// Superoperator matrix of rho -> -i[H,rho] + sum_k gamma_k (V rho V^dag
// - {V^dag V, rho}/2) at time t, in the column-stacking convention.
Superoperator generator_matrix(const LindbladGenerator& gen, double t);

// Midpoint-sampled exponential stepping:
// E_{(t_{k+1},0)} = exp(L(t_k + dt/2) dt) E_{(t_k,0)}.
// Aborts (std::runtime_error) if the propagator norm exceeds 1e6.
PropagatorFamily propagate(const LindbladGenerator& gen, double horizon, int steps);

// E_{(t_{k+1},t_k)} = E_{(t_{k+1},0)} invert(E_{(t_k,0)}). A pseudoinverse
// fallback with residual above 1e-6 marks the window ill-defined (flagged).
IntermediateMap intermediate_map(const PropagatorFamily& family, int k,
                                 double cond_threshold = 1e8);

struct StateTrajectory {
    std::vector<double> times;
    std::vector<Matrix> states;
};

StateTrajectory evolve_state(const LindbladGenerator& gen, const DensityMatrix& rho0,
                             double horizon, int steps);

// Propagator-table text format (see README): header line
//   # propagator-family v1
// then "dim,<d>", one "t,<index>,<time>" line per grid point and one
// "e,<index>,<row>,<col>,<re>,<im>" line per superoperator entry.
void write_propagator_table(std::ostream& out, const PropagatorFamily& family);
PropagatorFamily read_propagator_table(std::istream& in);

}  // namespace nonmarkov
