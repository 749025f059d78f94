// Divisibility-based non-Markovianity measure: the non-CP witness f_NCP of
// intermediate maps, its right derivative g(t), the integral measure I and the
// normalization D_NM = I / (I + 1).

#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "nonmarkov/lindblad.hpp"
#include "nonmarkov/operator_core.hpp"

namespace nonmarkov {

struct GSamples {
    std::vector<double> times;
    std::vector<double> g;           // >= 0 after clamping
    std::vector<char> flagged;       // ill-defined windows (pseudoinverse path)
    double dt = 0.0;
    int clamped_count = 0;           // samples lifted to 0 from small negatives
    double min_preclamp = 0.0;       // most negative raw sample seen
};

struct RhpResult {
    double integral = 0.0;           // I over the sampled horizon
    double normalized = 0.0;         // D_NM = I / (I + 1)
    int flagged_windows = 0;         // samples excluded from the integral
    double horizon = 0.0;
    bool truncated_lower_bound = false;  // tail of g not decreasing
};

// Trace norm of the Choi matrix of a trace-preserving map; 1 iff CP, > 1
// otherwise. Rejects maps whose trace-preservation defect exceeds tp_tol.
double f_ncp(const Superoperator& map, double tp_tol = 1e-6,
             double herm_tol = 1e-8);

// g(t_k) = (f_NCP(E_{(t_{k+1},t_k)}) - 1) / dt for every window of the family.
GSamples g_from_family(const PropagatorFamily& family);

struct GeneratorGSample {
    double g = 0.0;
    bool flagged = false;   // Richardson extrapolation did not converge
};

// Finite-difference evaluation of g(t) from the generator:
// (||[1 + (L_t (x) 1) eps]|Phi><Phi>||_1 - 1) / eps at each eps, Richardson
// extrapolated to eps -> 0+.
// The default sequence is fine enough that completely positive generators
// extrapolate to zero below 1e-8 despite the non-polynomial eps dependence of
// the clipped-eigenvalue sum.
GeneratorGSample g_from_generator(const LindbladGenerator& gen, double t,
                                  const std::vector<double>& eps_sequence = {
                                      1e-4, 5e-5, 2.5e-5});

// Trapezoidal I over the sampled horizon plus D_NM; flagged samples are
// excluded and counted.
RhpResult rhp_integral(const GSamples& samples);

// Analytic pure-dephasing reference: -2 * integral of gamma(t) where
// gamma(t) < 0, by trapezoidal quadrature on the same uniform grid.
double dephasing_oracle(const std::function<double(double)>& gamma,
                        double horizon, int steps);

struct NonMarkovReport {
    GSamples samples;
    RhpResult result;
};

NonMarkovReport analyze_family(const PropagatorFamily& family);

// Text export: "t,g,I_cumulative" rows plus a trailing summary line.
void write_report(std::ostream& out, const NonMarkovReport& report);

}  // namespace nonmarkov
