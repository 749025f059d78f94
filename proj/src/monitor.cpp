#include "nonmarkov/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <stdexcept>

namespace nonmarkov {

double i_entanglement(const EntanglementSeries& series) {
    if (series.values.size() < 2) {
        throw std::invalid_argument("i_entanglement: need at least two samples");
    }
    for (std::size_t k = 1; k < series.times.size(); ++k) {
        if (series.times[k] <= series.times[k - 1]) {
            throw std::invalid_argument("i_entanglement: grid not strictly increasing");
        }
    }
    double rises = 0.0;
    for (std::size_t k = 0; k + 1 < series.values.size(); ++k) {
        rises += std::max(0.0, series.values[k + 1] - series.values[k]);
    }
    return 2.0 * rises;
}

double SweepConfig::resolved_omega_min() const {
    return omega_min > 0.0 ? omega_min : 1e-3 * omega_c;
}

double SweepConfig::resolved_omega_max() const {
    if (omega_max > 0.0) return omega_max;
    return (kind == SpectralKind::SuperOhmic ? 15.0 : 10.0) * omega_c;
}

double SweepConfig::resolved_t_max() const {
    if (t_max > 0.0) return t_max;
    const double dw = (resolved_omega_max() - resolved_omega_min()) / modes;
    return std::min(0.8 * 2.0 * std::numbers::pi / dw, 50.0);
}

namespace {

SweepCell run_cell(double alpha, double temperature, const SweepConfig& config,
                   bool keep_series) {
    SweepCell cell;
    cell.alpha = alpha;
    cell.temperature = temperature;
    try {
        SpectralDensity density{config.kind, alpha, config.omega_c,
                                config.kind == SpectralKind::SuperOhmic ? 3.0 : 1.0};
        BathSpec spec;
        spec.modes = config.modes;
        spec.omega_min = config.resolved_omega_min();
        spec.omega_max = config.resolved_omega_max();
        spec.temperature = temperature;
        spec.horizon = config.resolved_t_max();
        const BathDiscretization disc = discretize(density, spec);
        const ModeNetwork net = ModeNetwork::build(1.0, disc, config.omega_ancilla);
        const GaussianEvolver evolver(net);
        const ComplexCovariance cov0 =
            initial_covariance(config.squeezing, spec, disc.frequencies);
        EntanglementSeries series = entanglement_series(
            evolver, cov0, uniform_grid(spec.horizon, config.samples));
        cell.i_e = i_entanglement(series);
        if (keep_series) cell.series = std::move(series);
    } catch (const std::exception& e) {
        cell.failed = true;
        cell.error = e.what();
    }
    return cell;
}

}  // namespace

std::vector<SweepCell> sweep_i_entanglement(const std::vector<double>& alphas,
                                            const std::vector<double>& temperatures,
                                            const SweepConfig& config,
                                            bool keep_series) {
    struct Job {
        double alpha;
        double temperature;
    };
    std::vector<Job> jobs;
    for (double t : temperatures) {
        for (double a : alphas) {
            jobs.push_back({a, t});
        }
    }
    std::vector<SweepCell> cells(jobs.size());
    const int workers = std::max(1, config.jobs);
    std::size_t next = 0;
    while (next < jobs.size()) {
        const std::size_t batch = std::min<std::size_t>(workers, jobs.size() - next);
        std::vector<std::future<SweepCell>> futures;
        futures.reserve(batch);
        for (std::size_t i = 0; i < batch; ++i) {
            const Job& job = jobs[next + i];
            futures.push_back(std::async(std::launch::async, run_cell, job.alpha,
                                         job.temperature, std::cref(config),
                                         keep_series));
        }
        for (std::size_t i = 0; i < batch; ++i) {
            cells[next + i] = futures[i].get();
        }
        next += batch;
    }
    return cells;
}

}  // namespace nonmarkov
