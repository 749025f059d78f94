// Model-free non-Markovianity witness I^(E): twice the summed rises of a
// sampled entanglement trajectory, equal to (total variation) - (net decrease)
// on the sampled path. Zero iff the series never increases.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nonmarkov/gaussian.hpp"

namespace nonmarkov {

// Detection threshold used in sweep summaries; below it float and
// discretization noise dominates. Reported, never applied to raw values.
inline constexpr double kDetectionThreshold = 1e-4;

double i_entanglement(const EntanglementSeries& series);

struct SweepConfig {
    SpectralKind kind = SpectralKind::Ohmic;
    double omega_c = 3.0;
    int modes = 300;
    double squeezing = 1.0;
    double omega_ancilla = 1.0;
    // <= 0 selects the constraint-satisfying defaults: window
    // [1e-3 omega_c, 10 omega_c] (Ohmic) or [1e-3 omega_c, 15 omega_c]
    // (super-Ohmic), t_max = min(0.8 * 2 pi / delta_omega, 50).
    double omega_min = 0.0;
    double omega_max = 0.0;
    double t_max = 0.0;
    int samples = 1000;
    int jobs = 1;

    double resolved_omega_min() const;
    double resolved_omega_max() const;
    double resolved_t_max() const;
};

struct SweepCell {
    double alpha = 0.0;
    double temperature = 0.0;
    double i_e = 0.0;
    bool failed = false;
    std::string error;
    std::optional<EntanglementSeries> series;  // kept only when requested
};

// One Gaussian simulation per (alpha, T); rows ordered by (T, alpha).
// Per-cell failures are recorded and the sweep continues.
std::vector<SweepCell> sweep_i_entanglement(const std::vector<double>& alphas,
                                            const std::vector<double>& temperatures,
                                            const SweepConfig& config,
                                            bool keep_series = false);

}  // namespace nonmarkov
