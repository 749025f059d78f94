#include "nonmarkov/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

#include "nonmarkov/lindblad.hpp"
#include "nonmarkov/monitor.hpp"
#include "nonmarkov/rhp.hpp"

namespace nonmarkov::harness {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double to_double(const KeyValues& kv, const std::string& key) {
    const std::string& raw = kv.at(key);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(raw, &used);
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' is not numeric: " + raw);
    }
    if (used != raw.size()) {
        throw ConfigError("config: key '" + key + "' is not numeric: " + raw);
    }
    return v;
}

int to_int(const KeyValues& kv, const std::string& key) {
    const double v = to_double(kv, key);
    if (v != std::floor(v)) {
        throw ConfigError("config: key '" + key + "' must be an integer");
    }
    return static_cast<int>(v);
}

std::vector<double> to_list(const std::string& raw, const std::string& key) {
    std::vector<double> values;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            values.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("config: key '" + key + "' has non-numeric entry: " + item);
        }
    }
    if (values.empty()) {
        throw ConfigError("config: key '" + key + "' is empty");
    }
    return values;
}

void check_keys(const KeyValues& kv, const std::set<std::string>& allowed,
                const std::set<std::string>& required) {
    for (const auto& [key, value] : kv) {
        if (!allowed.count(key)) {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }
    for (const std::string& key : required) {
        if (!kv.count(key)) {
            throw ConfigError("config: missing required key '" + key + "'");
        }
    }
}

void write_resolved_config(const fs::path& out_dir, const KeyValues& resolved) {
    std::ofstream out(out_dir / "config_resolved.txt");
    for (const auto& [key, value] : resolved) {
        out << key << " = " << value << "\n";
    }
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw NumericError("cannot open output file " + path.string());
    }
    return out;
}

std::function<double(double)> make_rate_profile(const KeyValues& kv,
                                                KeyValues& resolved) {
    const std::string profile = kv.at("profile");
    if (profile == "constant") {
        const double gamma = kv.count("gamma") ? to_double(kv, "gamma") : 1.0;
        resolved["gamma"] = std::to_string(gamma);
        return [gamma](double) { return gamma; };
    }
    if (profile == "sin") {
        const double amplitude = kv.count("amplitude") ? to_double(kv, "amplitude") : 1.0;
        const double frequency = kv.count("frequency") ? to_double(kv, "frequency") : 1.0;
        resolved["amplitude"] = std::to_string(amplitude);
        resolved["frequency"] = std::to_string(frequency);
        return [amplitude, frequency](double t) { return amplitude * std::sin(frequency * t); };
    }
    if (profile == "table") {
        if (!kv.count("rate_file")) {
            throw ConfigError("config: profile=table requires rate_file");
        }
        std::ifstream in(kv.at("rate_file"));
        if (!in) {
            throw ConfigError("config: cannot open rate_file " + kv.at("rate_file"));
        }
        auto times = std::make_shared<std::vector<double>>();
        auto rates = std::make_shared<std::vector<double>>();
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            line = trim(line);
            if (line.empty() || line[0] == '#') continue;
            std::stringstream ss(line);
            double t, g;
            char comma;
            if (!(ss >> t >> comma >> g) || comma != ',') {
                throw ConfigError("rate_file line " + std::to_string(line_no) +
                                  ": expected 't,gamma'");
            }
            if (!times->empty() && t <= times->back()) {
                throw ConfigError("rate_file line " + std::to_string(line_no) +
                                  ": times must increase");
            }
            times->push_back(t);
            rates->push_back(g);
        }
        if (times->size() < 2) {
            throw ConfigError("rate_file: need at least two rows");
        }
        return [times, rates](double t) {
            // Linear interpolation, clamped at the table edges.
            if (t <= times->front()) return rates->front();
            if (t >= times->back()) return rates->back();
            const auto it = std::upper_bound(times->begin(), times->end(), t);
            const std::size_t i = static_cast<std::size_t>(it - times->begin());
            const double w = (t - (*times)[i - 1]) / ((*times)[i] - (*times)[i - 1]);
            return (1.0 - w) * (*rates)[i - 1] + w * (*rates)[i];
        };
    }
    throw ConfigError("config: unknown profile '" + profile +
                      "' (expected constant | sin | table)");
}

}  // namespace

KeyValues parse_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    KeyValues kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": empty key or value");
        }
        if (kv.count(key)) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": duplicate key '" + key + "'");
        }
        kv[key] = value;
    }
    return kv;
}

std::string format_csv_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

int run_dephasing(const KeyValues& config, const fs::path& out_dir) {
    check_keys(config,
               {"profile", "gamma", "amplitude", "frequency", "rate_file", "horizon",
                "steps"},
               {"profile", "horizon", "steps"});
    const double horizon = to_double(config, "horizon");
    const int steps = to_int(config, "steps");
    if (horizon <= 0.0) throw ConfigError("config: horizon > 0 required");
    if (steps < 2) throw ConfigError("config: steps >= 2 required");

    KeyValues resolved = config;
    auto gamma = make_rate_profile(config, resolved);

    NonMarkovReport report;
    double oracle = 0.0;
    try {
        const LindbladGenerator gen = LindbladGenerator::pure_dephasing(gamma);
        report = analyze_family(propagate(gen, horizon, steps));
        oracle = dephasing_oracle(gamma, horizon, steps);
    } catch (const std::exception& e) {
        throw NumericError(e.what());
    }

    fs::create_directories(out_dir);
    write_resolved_config(out_dir, resolved);

    auto series = open_output(out_dir / "g_series.csv");
    series << "t,gamma,g,I_cumulative\n";
    double cumulative = 0.0;
    const auto& s = report.samples;
    for (std::size_t k = 0; k < s.g.size(); ++k) {
        if (k > 0 && !s.flagged[k] && !s.flagged[k - 1]) {
            cumulative += 0.5 * (s.g[k - 1] + s.g[k]) * (s.times[k] - s.times[k - 1]);
        }
        series << format_csv_value(s.times[k]) << ',' << format_csv_value(gamma(s.times[k]))
               << ',' << format_csv_value(s.g[k]) << ',' << format_csv_value(cumulative)
               << "\n";
    }

    auto summary = open_output(out_dir / "summary.txt");
    const double rel_err =
        oracle > 0.0 ? std::abs(report.result.integral - oracle) / oracle : 0.0;
    summary << "I = " << format_csv_value(report.result.integral) << "\n";
    summary << "I_oracle = " << format_csv_value(oracle) << "\n";
    summary << "relative_error = " << format_csv_value(rel_err) << "\n";
    summary << "D_NM = " << format_csv_value(report.result.normalized) << "\n";
    summary << "flagged_windows = " << report.result.flagged_windows << "\n";
    summary << "horizon = " << format_csv_value(report.result.horizon) << "\n";
    if (report.result.truncated_lower_bound) {
        summary << "note = I is a truncated lower bound (g tail not decreasing)\n";
    }
    return report.result.flagged_windows > 0 ? 3 : 0;
}

namespace {

SpectralKind parse_kind(const std::string& raw) {
    if (raw == "ohmic") return SpectralKind::Ohmic;
    if (raw == "super_ohmic") return SpectralKind::SuperOhmic;
    throw ConfigError("config: kind must be ohmic or super_ohmic, got '" + raw + "'");
}

void write_plot_script(const fs::path& out_dir) {
    std::ofstream out(out_dir / "plot_sweep.py");
    out << "#!/usr/bin/env python3\n"
           "# Renders I^(E) versus alpha, one curve per temperature.\n"
           "import csv\n"
           "from collections import defaultdict\n"
           "import matplotlib.pyplot as plt\n"
           "\n"
           "curves = defaultdict(list)\n"
           "with open('sweep.csv') as fh:\n"
           "    for row in csv.DictReader(fh):\n"
           "        curves[float(row['T'])].append((float(row['alpha']), float(row['I_E'])))\n"
           "for temperature, points in sorted(curves.items()):\n"
           "    points.sort()\n"
           "    plt.plot([p[0] for p in points], [p[1] for p in points],\n"
           "             marker='o', label=f'T = {temperature:g}')\n"
           "plt.xscale('log')\n"
           "plt.xlabel('coupling strength alpha')\n"
           "plt.ylabel('I^(E)')\n"
           "plt.legend()\n"
           "plt.tight_layout()\n"
           "plt.savefig('sweep.png', dpi=160)\n";
}

}  // namespace

int run_gaussian_sweep(const KeyValues& config, const fs::path& out_dir, int jobs,
                       bool emit_plots) {
    check_keys(config,
               {"kind", "alpha_grid", "alpha_min", "alpha_max", "alpha_points",
                "T_grid", "omega_c", "M", "r", "omega_min", "omega_max", "t_max",
                "samples", "omega_ancilla", "write_series"},
               {"kind", "T_grid"});

    SweepConfig sweep;
    sweep.kind = parse_kind(config.at("kind"));
    sweep.omega_c = config.count("omega_c") ? to_double(config, "omega_c") : 3.0;
    sweep.modes = config.count("M") ? to_int(config, "M") : 300;
    sweep.squeezing = config.count("r") ? to_double(config, "r") : 1.0;
    sweep.omega_ancilla =
        config.count("omega_ancilla") ? to_double(config, "omega_ancilla") : 1.0;
    if (config.count("omega_min")) sweep.omega_min = to_double(config, "omega_min");
    if (config.count("omega_max")) sweep.omega_max = to_double(config, "omega_max");
    if (config.count("t_max")) sweep.t_max = to_double(config, "t_max");
    sweep.samples = config.count("samples") ? to_int(config, "samples") : 1000;
    sweep.jobs = jobs;
    if (sweep.modes < 1) throw ConfigError("config: M >= 1 required");
    if (sweep.samples < 2) throw ConfigError("config: samples >= 2 required");

    // Refuse horizons reaching the recurrence time and report the M that fixes it.
    {
        const double dw = (sweep.resolved_omega_max() - sweep.resolved_omega_min()) /
                          sweep.modes;
        const double recurrence = 2.0 * std::numbers::pi / dw;
        if (sweep.resolved_t_max() >= recurrence) {
            const int needed = static_cast<int>(std::ceil(
                sweep.resolved_t_max() * (sweep.resolved_omega_max() -
                                          sweep.resolved_omega_min()) /
                (0.8 * 2.0 * std::numbers::pi)));
            throw ConfigError(
                "config: t_max " + std::to_string(sweep.resolved_t_max()) +
                " reaches the bath recurrence time " + std::to_string(recurrence) +
                "; use M >= " + std::to_string(needed) + " or shorten t_max");
        }
    }

    std::vector<double> alphas;
    if (config.count("alpha_grid")) {
        if (config.count("alpha_min") || config.count("alpha_max") ||
            config.count("alpha_points")) {
            throw ConfigError("config: alpha_grid excludes alpha_min/alpha_max/alpha_points");
        }
        alphas = to_list(config.at("alpha_grid"), "alpha_grid");
    } else {
        if (!config.count("alpha_min") || !config.count("alpha_max") ||
            !config.count("alpha_points")) {
            throw ConfigError("config: need alpha_grid or alpha_min/alpha_max/alpha_points");
        }
        const double lo = to_double(config, "alpha_min");
        const double hi = to_double(config, "alpha_max");
        const int n = to_int(config, "alpha_points");
        if (!(0.0 < lo && lo < hi) || n < 2) {
            throw ConfigError("config: need 0 < alpha_min < alpha_max, alpha_points >= 2");
        }
        for (int i = 0; i < n; ++i) {
            alphas.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
        }
    }
    const std::vector<double> temperatures = to_list(config.at("T_grid"), "T_grid");
    for (double t : temperatures) {
        if (t < 0.0) throw ConfigError("config: temperatures must be >= 0");
    }
    const bool write_series = config.count("write_series") &&
                              to_int(config, "write_series") != 0;

    KeyValues resolved = config;
    resolved["kind"] = config.at("kind");
    resolved["omega_c"] = format_csv_value(sweep.omega_c);
    resolved["M"] = std::to_string(sweep.modes);
    resolved["r"] = format_csv_value(sweep.squeezing);
    resolved["omega_ancilla"] = format_csv_value(sweep.omega_ancilla);
    resolved["omega_min"] = format_csv_value(sweep.resolved_omega_min());
    resolved["omega_max"] = format_csv_value(sweep.resolved_omega_max());
    resolved["t_max"] = format_csv_value(sweep.resolved_t_max());
    resolved["samples"] = std::to_string(sweep.samples);
    resolved["write_series"] = write_series ? "1" : "0";

    const std::vector<SweepCell> cells =
        sweep_i_entanglement(alphas, temperatures, sweep, write_series);

    fs::create_directories(out_dir);
    write_resolved_config(out_dir, resolved);

    auto out = open_output(out_dir / "sweep.csv");
    out << "alpha,T,I_E\n";
    int failures = 0;
    for (const SweepCell& cell : cells) {
        if (cell.failed) {
            ++failures;
            continue;
        }
        out << format_csv_value(cell.alpha) << ',' << format_csv_value(cell.temperature)
            << ',' << format_csv_value(cell.i_e) << "\n";
        if (write_series && cell.series) {
            auto series = open_output(
                out_dir / ("series_" + format_csv_value(cell.alpha) + "_" +
                           format_csv_value(cell.temperature) + ".csv"));
            series << "t,E_N\n";
            for (std::size_t k = 0; k < cell.series->times.size(); ++k) {
                series << format_csv_value(cell.series->times[k]) << ','
                       << format_csv_value(cell.series->values[k]) << "\n";
            }
        }
    }
    if (failures > 0) {
        auto errors = open_output(out_dir / "failures.txt");
        for (const SweepCell& cell : cells) {
            if (cell.failed) {
                errors << "alpha=" << format_csv_value(cell.alpha)
                       << " T=" << format_csv_value(cell.temperature) << ": "
                       << cell.error << "\n";
            }
        }
    }
    if (emit_plots) write_plot_script(out_dir);
    return failures > 0 ? 3 : 0;
}

int run_divisibility(const KeyValues& config, const fs::path& out_dir) {
    check_keys(config, {"input"}, {"input"});
    std::ifstream in(config.at("input"));
    if (!in) {
        throw ConfigError("config: cannot open tomography file " + config.at("input"));
    }
    NonMarkovReport report;
    try {
        report = analyze_family(read_propagator_table(in));
    } catch (const std::exception& e) {
        throw NumericError(e.what());
    }
    fs::create_directories(out_dir);
    write_resolved_config(out_dir, config);
    auto out = open_output(out_dir / "report.csv");
    write_report(out, report);
    if (report.result.flagged_windows > 0) {
        auto flags = open_output(out_dir / "flagged_windows.txt");
        for (std::size_t k = 0; k < report.samples.flagged.size(); ++k) {
            if (report.samples.flagged[k]) {
                flags << "window " << k << " at t = "
                      << format_csv_value(report.samples.times[k])
                      << ": ill-defined (pseudoinverse path)\n";
            }
        }
    }
    return report.result.flagged_windows > 0 ? 3 : 0;
}

}  // namespace nonmarkov::harness
