#include "nonmarkov/rhp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

namespace nonmarkov {

double f_ncp(const Superoperator& map, double tp_tol, double herm_tol) {
    const double defect = map.trace_preservation_defect();
    if (defect > tp_tol) {
        throw std::invalid_argument("f_ncp: map not trace preserving, defect " +
                                    std::to_string(defect));
    }
    return trace_norm(choi_of(map).entries, herm_tol);
}

GSamples g_from_family(const PropagatorFamily& family) {
    GSamples out;
    out.dt = family.dt;
    const int windows = family.steps();
    out.times.reserve(windows);
    out.g.reserve(windows);
    out.flagged.reserve(windows);
    for (int k = 0; k < windows; ++k) {
        const IntermediateMap window = intermediate_map(family, k);
        out.times.push_back(family.times[k]);
        if (window.flagged) {
            out.g.push_back(0.0);
            out.flagged.push_back(1);
            continue;
        }
        double value = (f_ncp(window.map) - 1.0) / family.dt;
        out.min_preclamp = std::min(out.min_preclamp, value);
        if (value < 0.0) {
            ++out.clamped_count;
            value = 0.0;
        }
        out.g.push_back(value);
        out.flagged.push_back(0);
    }
    return out;
}

GeneratorGSample g_from_generator(const LindbladGenerator& gen, double t,
                                  const std::vector<double>& eps_sequence) {
    if (eps_sequence.size() < 2) {
        throw std::invalid_argument("g_from_generator: need at least two eps values");
    }
    for (std::size_t i = 0; i < eps_sequence.size(); ++i) {
        if (eps_sequence[i] < 1e-8 ||
            (i > 0 && eps_sequence[i] >= eps_sequence[i - 1])) {
            throw std::invalid_argument(
                "g_from_generator: eps sequence must be decreasing and >= 1e-8");
        }
    }
    const Superoperator gen_matrix = generator_matrix(gen, t);
    const int n2 = gen.dim * gen.dim;
    std::vector<double> quotients;
    quotients.reserve(eps_sequence.size());
    for (double eps : eps_sequence) {
        const Superoperator step{gen.dim,
                                 Matrix::Identity(n2, n2) + eps * gen_matrix.matrix};
        const double norm = trace_norm(choi_of(step).entries, 1e-8);
        quotients.push_back((norm - 1.0) / eps);
    }
    // Neville extrapolation of the quotient to eps -> 0+.
    std::vector<double> table = quotients;
    double previous = table.front();
    double estimate = table.front();
    const int n = static_cast<int>(table.size());
    for (int j = 1; j < n; ++j) {
        for (int i = n - 1; i >= j; --i) {
            const double e_hi = eps_sequence[i - j];
            const double e_lo = eps_sequence[i];
            table[i] = (e_hi * table[i] - e_lo * table[i - 1]) / (e_hi - e_lo);
        }
        previous = estimate;
        estimate = table[n - 1];
    }
    GeneratorGSample sample;
    const double diff = std::abs(estimate - previous);
    // Relative convergence check with an absolute floor for the g ~ 0 case.
    sample.flagged = diff > std::max(1e-4 * std::abs(estimate), 1e-5);
    sample.g = std::max(0.0, estimate);
    return sample;
}

RhpResult rhp_integral(const GSamples& samples) {
    if (samples.g.empty()) {
        throw std::invalid_argument("rhp_integral: empty sample set");
    }
    RhpResult result;
    result.flagged_windows =
        static_cast<int>(std::count(samples.flagged.begin(), samples.flagged.end(), 1));
    double integral = 0.0;
    for (std::size_t k = 0; k + 1 < samples.g.size(); ++k) {
        if (samples.flagged[k] || samples.flagged[k + 1]) continue;
        integral += 0.5 * (samples.g[k] + samples.g[k + 1]) *
                    (samples.times[k + 1] - samples.times[k]);
    }
    // Trailing window closed with its own width (right derivative samples).
    if (!samples.flagged.back()) {
        integral += samples.g.back() * samples.dt * 0.5;
    }
    result.integral = integral;
    result.normalized = integral / (integral + 1.0);
    result.horizon = samples.times.back() + samples.dt;
    // Divergence heuristic: if the tail average of g is not decreasing, the
    // integral is only a truncated lower bound.
    const std::size_t window = std::max<std::size_t>(1, samples.g.size() / 10);
    if (samples.g.size() >= 2 * window) {
        const auto mean = [&](std::size_t begin, std::size_t end) {
            double s = 0.0;
            for (std::size_t i = begin; i < end; ++i) s += samples.g[i];
            return s / static_cast<double>(end - begin);
        };
        const double tail = mean(samples.g.size() - window, samples.g.size());
        const double prev = mean(samples.g.size() - 2 * window, samples.g.size() - window);
        result.truncated_lower_bound = tail > 1e-8 && tail >= prev * (1.0 - 1e-6);
    }
    return result;
}

double dephasing_oracle(const std::function<double(double)>& gamma, double horizon,
                        int steps) {
    if (steps < 1 || horizon <= 0.0) {
        throw std::invalid_argument("dephasing_oracle: bad grid");
    }
    const double h = horizon / steps;
    double integral = 0.0;
    double prev = std::max(0.0, -gamma(0.0));
    for (int i = 1; i <= steps; ++i) {
        const double cur = std::max(0.0, -gamma(i * h));
        integral += 0.5 * (prev + cur) * h;
        prev = cur;
    }
    return 2.0 * integral;
}

NonMarkovReport analyze_family(const PropagatorFamily& family) {
    NonMarkovReport report;
    report.samples = g_from_family(family);
    report.result = rhp_integral(report.samples);
    return report;
}

void write_report(std::ostream& out, const NonMarkovReport& report) {
    out << "t,g,I_cumulative\n";
    char buf[160];
    double cumulative = 0.0;
    const auto& s = report.samples;
    for (std::size_t k = 0; k < s.g.size(); ++k) {
        if (k > 0 && !s.flagged[k] && !s.flagged[k - 1]) {
            cumulative += 0.5 * (s.g[k - 1] + s.g[k]) * (s.times[k] - s.times[k - 1]);
        }
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g", s.times[k], s.g[k],
                      cumulative);
        out << buf << "\n";
    }
    std::snprintf(buf, sizeof(buf),
                  "summary: I=%.12g D_NM=%.12g flagged_windows=%d horizon=%.12g%s",
                  report.result.integral, report.result.normalized,
                  report.result.flagged_windows, report.result.horizon,
                  report.result.truncated_lower_bound ? " truncated_lower_bound" : "");
    out << buf << "\n";
}

}  // namespace nonmarkov
