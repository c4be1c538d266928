#pragma once

// Front end shared by the command-line binary and the tests: a flat key=value
// configuration, named presets for the standard parameter sets, and the seven
// subcommand drivers.  All emission is deterministic: 12 significant digits,
// LF endings, rows in grid order regardless of worker count, run metadata in
// a sidecar manifest so data files never carry timestamps.

#include "adiabatic.hpp"
#include "dynamics.hpp"
#include "lindblad.hpp"
#include "model.hpp"
#include "spectral.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace ptqrm::cli {

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct RunConfig {
    // model
    double delta = 0.5;
    double epsilon = 0.0;
    double omega = 1.0;
    double g = 0.0;
    int n_max = 60;
    std::string representation = "barez";  // barez | rotatedx | passivex
    // parameter grid (spectrum, aa, ep seeds, dynamics fan-out)
    std::string axis;  // "" | g | epsilon | delta
    double axis_start = 0.0;
    double axis_stop = 1.0;
    int axis_count = 0;
    // spectral
    int pairs = 4;
    double im_tol = -1.0;  // < 0: default 1e-9 * omega
    double eig_tol = 1e-10;
    // ep / juddian
    int pair = 0;
    double bracket_pad = 0.03;
    double g_max = 1.0;
    // dynamics
    double t_max = 628.318530717958648;  // 200 pi
    double dt = 1e-3;
    int record_stride = 100;
    double norm_guard = 1e6;
    int state_n = 0;
    std::string state_qubit = "+";
    int state_index = -1;        // >= 0: start from that exact eigenstate
    std::string method = "rk4";  // rk4 | eigenbasis
    // lindblad
    bool jump = true;
    // converge
    std::string n_max_list = "100,120";
    int levels = 22;
    // io
    std::string out = "-";
    std::string format = "csv";
    int workers = 1;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not a number: '" + v + "'");
    }
}

inline int to_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not an integer: '" + v + "'");
    }
}

inline bool to_bool(const std::string& key, const std::string& v) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw ConfigError("config key '" + key + "': expected on/off: '" + v + "'");
}

inline std::string fmt(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.12g", v);
    return b;
}

}  // namespace detail

inline void apply_key(RunConfig& c, const std::string& key, const std::string& value) {
    using detail::to_bool;
    using detail::to_double;
    using detail::to_int;
    if (key == "delta") c.delta = to_double(key, value);
    else if (key == "epsilon") c.epsilon = to_double(key, value);
    else if (key == "omega") c.omega = to_double(key, value);
    else if (key == "g") c.g = to_double(key, value);
    else if (key == "n_max") c.n_max = to_int(key, value);
    else if (key == "representation") c.representation = value;
    else if (key == "axis") c.axis = value;
    else if (key == "axis_start") c.axis_start = to_double(key, value);
    else if (key == "axis_stop") c.axis_stop = to_double(key, value);
    else if (key == "axis_count") c.axis_count = to_int(key, value);
    else if (key == "pairs") c.pairs = to_int(key, value);
    else if (key == "im_tol") c.im_tol = to_double(key, value);
    else if (key == "eig_tol") c.eig_tol = to_double(key, value);
    else if (key == "pair") c.pair = to_int(key, value);
    else if (key == "bracket_pad") c.bracket_pad = to_double(key, value);
    else if (key == "g_max") c.g_max = to_double(key, value);
    else if (key == "t_max") c.t_max = to_double(key, value);
    else if (key == "dt") c.dt = to_double(key, value);
    else if (key == "record_stride") c.record_stride = to_int(key, value);
    else if (key == "norm_guard") c.norm_guard = to_double(key, value);
    else if (key == "state_n") c.state_n = to_int(key, value);
    else if (key == "state_qubit") c.state_qubit = value;
    else if (key == "state_index") c.state_index = to_int(key, value);
    else if (key == "method") c.method = value;
    else if (key == "jump") c.jump = to_bool(key, value);
    else if (key == "n_max_list") c.n_max_list = value;
    else if (key == "levels") c.levels = to_int(key, value);
    else if (key == "out") c.out = value;
    else if (key == "format") c.format = value;
    else if (key == "workers") c.workers = to_int(key, value);
    else throw ConfigError("unknown config key: '" + key + "'");
}

inline void apply_config_file(RunConfig& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key=value");
        apply_key(c, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
}

// Parameter sets of the reference figures.  fig2a-fig2d sweep the gain/loss
// rate at fixed coupling; fig3a/fig3b sweep the coupling; fig4 fans a
// strong-coupling quench over a gain/loss grid; fig5 is the long ultrastrong
// run whose late stage needs the eigenbasis method.
inline RunConfig preset_config(const std::string& name) {
    RunConfig c;
    c.delta = 0.5;
    if (name == "fig2a" || name == "fig2b" || name == "fig2c" || name == "fig2d") {
        c.axis = "epsilon";
        c.axis_start = 0.0;
        c.axis_stop = 0.7;
        c.axis_count = 141;
        c.n_max = 40;
        c.pairs = 6;
        if (name == "fig2b") c.g = 0.2;
        if (name == "fig2c") c.g = 0.5;
        if (name == "fig2d") {
            c.g = 1.8;
            c.n_max = 140;
        }
    } else if (name == "fig3a" || name == "fig3b") {
        c.axis = "g";
        c.axis_start = 0.0;
        c.axis_stop = 1.0;
        c.axis_count = 201;
        c.n_max = 80;
        c.pairs = 4;
        c.epsilon = (name == "fig3b") ? 0.1 : 0.0;
    } else if (name == "fig4") {
        c.g = 0.05;
        c.axis = "epsilon";
        c.axis_start = 0.0;
        c.axis_stop = 0.7;
        c.axis_count = 8;
        c.n_max = 20;
        c.state_n = 0;
        c.state_qubit = "+";
        c.t_max = 200.0 * 3.14159265358979323846;
        c.dt = 1e-3;
        c.record_stride = 100;
        c.method = "rk4";
    } else if (name == "fig5") {
        c.g = 0.7;
        c.epsilon = 0.1;
        c.n_max = 110;
        c.state_n = 4;
        c.state_qubit = "+";
        c.t_max = 80000.0;
        c.dt = 1e-3;
        c.record_stride = 1000;
        c.method = "eigenbasis";
    } else {
        throw ConfigError("unknown preset: '" + name + "'");
    }
    return c;
}

inline Representation parse_representation(const std::string& s) {
    if (s == "barez") return Representation::BareZ;
    if (s == "rotatedx") return Representation::RotatedX;
    if (s == "passivex") return Representation::PassiveX;
    throw ConfigError("unknown representation: '" + s + "'");
}

inline SweepAxis parse_axis(const std::string& s) {
    if (s == "g") return SweepAxis::Coupling;
    if (s == "epsilon") return SweepAxis::GainLoss;
    if (s == "delta") return SweepAxis::Splitting;
    throw ConfigError("unknown axis: '" + s + "'");
}

inline ModelParams model_params(const RunConfig& c) {
    ModelParams p{c.delta, c.epsilon, c.omega, c.g};
    p.validate();
    return p;
}

namespace detail {

inline void validate_common(const RunConfig& c) {
    model_params(c);
    parse_representation(c.representation);
    if (c.n_max < 0) throw ConfigError("n_max must be >= 0");
    if (c.format != "csv" && c.format != "json") throw ConfigError("format must be csv or json");
    if (c.workers < 1) throw ConfigError("workers must be >= 1");
    if (c.im_tol <= 0.0 && c.im_tol != -1.0) throw ConfigError("im_tol must be positive");
    if (c.eig_tol <= 0.0) throw ConfigError("eig_tol must be positive");
    if (c.dt <= 0.0) throw ConfigError("dt must be positive");
    if (c.t_max < 0.0) throw ConfigError("t_max must be >= 0");
    if (c.record_stride < 1) throw ConfigError("record_stride must be >= 1");
    if (c.norm_guard <= 1.0) throw ConfigError("norm_guard must exceed 1");
    if (c.bracket_pad <= 0.0) throw ConfigError("bracket_pad must be positive");
    if (c.pair < 0) throw ConfigError("pair must be >= 0");
    if (c.pairs < 1) throw ConfigError("pairs must be >= 1");
    if (c.out.empty()) throw ConfigError("out must not be empty");
}

inline void validate_grid(const RunConfig& c) {
    if (c.axis.empty()) throw ConfigError("this command needs an axis (g, epsilon, or delta)");
    parse_axis(c.axis);
    if (c.axis_count < 2) throw ConfigError("axis_count must be >= 2");
    if (!(c.axis_start < c.axis_stop)) throw ConfigError("axis_start must be below axis_stop");
    if (c.axis_start < 0.0) throw ConfigError("axis values must be non-negative");
}

inline std::vector<double> grid_values(const RunConfig& c) {
    std::vector<double> v(c.axis_count);
    for (int i = 0; i < c.axis_count; ++i)
        v[i] = c.axis_start + (c.axis_stop - c.axis_start) * i / (c.axis_count - 1);
    return v;
}

// Output sink: file or stdout, one final write, LF endings throughout.
inline void write_text(const std::string& out, const std::string& body) {
    if (out == "-") {
        std::cout << body;
        std::cout.flush();
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file: " + out);
    f << body;
    if (!f) throw ConfigError("write failed: " + out);
}

inline std::string with_suffix(const std::string& path, int index) {
    const auto dot = path.find_last_of('.');
    const auto slash = path.find_last_of('/');
    const std::string tag = "_" + std::to_string(index);
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + tag;
    return path.substr(0, dot) + tag + path.substr(dot);
}

inline const char* phase_name(Phase ph) { return ph == Phase::Symmetric ? "PTS" : "PTB"; }

struct SpectrumRow {
    double axis_value;
    int pair;
    cxd e_plus, e_minus;
    const char* phase;
    double fidelity, photon_plus, photon_minus, w_plus, w_minus;
};

inline std::string spectrum_table(const std::vector<SpectrumRow>& rows,
                                  const std::string& format) {
    if (format == "csv") {
        std::string s =
            "axis_value,pair,re_E_plus,im_E_plus,re_E_minus,im_E_minus,phase,fidelity,"
            "photon_plus,photon_minus,W_plus,W_minus\n";
        for (const auto& r : rows) {
            s += fmt(r.axis_value);
            s += ',' + std::to_string(r.pair);
            s += ',' + fmt(r.e_plus.real()) + ',' + fmt(r.e_plus.imag());
            s += ',' + fmt(r.e_minus.real()) + ',' + fmt(r.e_minus.imag());
            s += ',';
            s += r.phase;
            s += ',' + fmt(r.fidelity);
            s += ',' + fmt(r.photon_plus) + ',' + fmt(r.photon_minus);
            s += ',' + fmt(r.w_plus) + ',' + fmt(r.w_minus);
            s += '\n';
        }
        return s;
    }
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows)
        j.push_back({{"axis_value", r.axis_value},
                     {"pair", r.pair},
                     {"re_E_plus", r.e_plus.real()},
                     {"im_E_plus", r.e_plus.imag()},
                     {"re_E_minus", r.e_minus.real()},
                     {"im_E_minus", r.e_minus.imag()},
                     {"phase", r.phase},
                     {"fidelity", r.fidelity},
                     {"photon_plus", r.photon_plus},
                     {"photon_minus", r.photon_minus},
                     {"W_plus", r.w_plus},
                     {"W_minus", r.w_minus}});
    return j.dump(2) + "\n";
}

inline std::string series_table(const TimeSeries& ts, const std::string& format) {
    if (format == "csv") {
        std::string s = "t,norm,log_norm,photon,population\n";
        for (size_t i = 0; i < ts.times.size(); ++i) {
            s += fmt(ts.times[i]);
            s += ',' + fmt(ts.norms[i]) + ',' + fmt(ts.log_norms[i]);
            s += ',' + fmt(ts.photons[i]) + ',' + fmt(ts.populations[i]);
            s += '\n';
        }
        return s;
    }
    nlohmann::json j = nlohmann::json::array();
    for (size_t i = 0; i < ts.times.size(); ++i)
        j.push_back({{"t", ts.times[i]},
                     {"norm", ts.norms[i]},
                     {"log_norm", ts.log_norms[i]},
                     {"photon", ts.photons[i]},
                     {"population", ts.populations[i]}});
    return j.dump(2) + "\n";
}

inline std::string lme_table(const LMESeries& ts, const std::string& format) {
    // norm and trace coincide for a density matrix; both emitted so the
    // column layout stays a superset of the Schrodinger series.
    if (format == "csv") {
        std::string s = "t,norm,log_norm,photon,population,trace,sink\n";
        for (size_t i = 0; i < ts.times.size(); ++i) {
            s += fmt(ts.times[i]);
            s += ',' + fmt(ts.traces[i]) + ',' + fmt(std::log(ts.traces[i]));
            s += ',' + fmt(ts.photons[i]) + ',' + fmt(ts.populations[i]);
            s += ',' + fmt(ts.traces[i]) + ',' + fmt(ts.sinks[i]);
            s += '\n';
        }
        return s;
    }
    nlohmann::json j = nlohmann::json::array();
    for (size_t i = 0; i < ts.times.size(); ++i)
        j.push_back({{"t", ts.times[i]},
                     {"norm", ts.traces[i]},
                     {"log_norm", std::log(ts.traces[i])},
                     {"photon", ts.photons[i]},
                     {"population", ts.populations[i]},
                     {"trace", ts.traces[i]},
                     {"sink", ts.sinks[i]}});
    return j.dump(2) + "\n";
}

}  // namespace detail

inline std::vector<std::string> run_spectrum(const RunConfig& c) {
    detail::validate_common(c);
    detail::validate_grid(c);
    if (c.n_max < 1) throw ConfigError("spectrum needs n_max >= 1");
    const auto points =
        sweep(model_params(c), parse_axis(c.axis), detail::grid_values(c),
              parse_representation(c.representation), FockTruncation{c.n_max}, c.pairs, c.im_tol,
              c.workers);
    std::vector<detail::SpectrumRow> rows;
    rows.reserve(points.size() * c.pairs);
    for (const auto& pt : points)
        for (const auto& lp : pt.pairs)
            rows.push_back({pt.axis_value, lp.index, lp.e_plus, lp.e_minus,
                            detail::phase_name(lp.phase), lp.fidelity, lp.photon_plus,
                            lp.photon_minus, lp.w_plus, lp.w_minus});
    detail::write_text(c.out, detail::spectrum_table(rows, c.format));
    return {c.out};
}

inline std::vector<std::string> run_aa(const RunConfig& c) {
    detail::validate_common(c);
    detail::validate_grid(c);
    const ModelParams base = model_params(c);
    const SweepAxis axis = parse_axis(c.axis);
    std::vector<detail::SpectrumRow> rows;
    for (const double x : detail::grid_values(c)) {
        const ModelParams p = with_axis(base, axis, x);
        for (int n = 0; n < c.pairs; ++n) {
            const AAPair a = aa_pair(p, n);
            const bool broken = std::abs(a.omega_n) < p.epsilon;
            rows.push_back({x, n, a.e_plus, a.e_minus, broken ? "PTB" : "PTS", a.fidelity,
                            a.photon, a.photon, a.w_plus, a.w_minus});
        }
    }
    detail::write_text(c.out, detail::spectrum_table(rows, c.format));
    return {c.out};
}

inline std::vector<std::string> run_ep(const RunConfig& c) {
    detail::validate_common(c);
    if (c.axis.empty()) throw ConfigError("ep needs an axis (epsilon, g, or delta)");
    const SweepAxis axis = parse_axis(c.axis);
    const ModelParams base = model_params(c);
    const Representation rep = parse_representation(c.representation);
    const FockTruncation trunc{c.n_max};
    nlohmann::json entries = nlohmann::json::array();
    auto locate = [&](int n, double seed) {
        entries.push_back(
            {{"pair", n}, {"axis", c.axis}, {"location", seed}, {"method", "aa"}});
        const double lo = std::max(0.0, seed - c.bracket_pad);
        const EPResult ep = find_ep(base, axis, lo, seed + c.bracket_pad, n, rep, trunc, c.im_tol);
        entries.push_back(
            {{"pair", n}, {"axis", c.axis}, {"location", ep.location}, {"method", "exact"}});
    };
    for (int n = 0; n < c.pairs; ++n) {
        if (axis == SweepAxis::GainLoss) {
            locate(n, aa_ep_epsilon(base, n));
        } else if (axis == SweepAxis::Splitting) {
            const ModelParams unit_delta = with_axis(base, SweepAxis::Splitting, 1.0);
            const double r = aa_tunneling(unit_delta, n);  // Omega_n at Delta = 1
            if (r == 0.0)
                throw SearchError("find_ep: pair " + std::to_string(n) +
                                  " has no splitting-axis seed (tunneling vanishes)");
            locate(n, base.epsilon / std::abs(r));
        } else {
            const auto seeds = aa_ep_couplings(base, n, c.g_max);
            for (const double s : seeds)
                if (s >= c.axis_start && s <= c.axis_stop) locate(n, s);
        }
    }
    detail::write_text(c.out, entries.dump(2) + "\n");
    return {c.out};
}

inline std::vector<std::string> run_juddian(const RunConfig& c) {
    detail::validate_common(c);
    if (c.g_max <= 0.0) throw ConfigError("g_max must be positive");
    const auto roots = juddian_points(c.pair, c.omega, c.g_max);
    if (c.format == "csv") {
        std::string s = "pair,g\n";
        for (const double g : roots) s += std::to_string(c.pair) + ',' + detail::fmt(g) + '\n';
        detail::write_text(c.out, s);
    } else {
        nlohmann::json j = nlohmann::json::array();
        for (const double g : roots) j.push_back({{"pair", c.pair}, {"g", g}});
        detail::write_text(c.out, j.dump(2) + "\n");
    }
    return {c.out};
}

namespace detail {

inline TimeSeries run_one_dynamics(const RunConfig& c, const ModelParams& p) {
    const FockTruncation trunc{c.n_max};
    const Matrix H = build_hamiltonian(p, parse_representation(c.representation), trunc);
    Vector psi0;
    if (c.state_index >= 0) {
        if (c.state_index >= trunc.full_dim())
            throw ConfigError("state_index outside the truncated space");
        psi0 = eigendecompose(H, c.eig_tol).vectors.col(c.state_index);
    } else {
        const int q = (c.state_qubit == "+" || c.state_qubit == "1") ? 1
                      : (c.state_qubit == "-" || c.state_qubit == "0")
                          ? 0
                          : throw ConfigError("state_qubit must be + or -");
        psi0 = bare_state(c.state_n, q, trunc);
    }
    if (c.method == "rk4")
        return propagate(H, psi0, c.t_max, c.dt, c.record_stride, c.norm_guard);
    if (c.method == "eigenbasis")
        return propagate_eigenbasis(H, psi0, c.t_max, c.dt * c.record_stride);
    throw ConfigError("method must be rk4 or eigenbasis");
}

}  // namespace detail

inline std::vector<std::string> run_dynamics(const RunConfig& c) {
    detail::validate_common(c);
    if (c.state_n < 0 || c.state_n > c.n_max)
        throw ConfigError("state_n must lie within the truncation");
    if (c.axis_count == 0) {
        const TimeSeries ts = detail::run_one_dynamics(c, model_params(c));
        detail::write_text(c.out, detail::series_table(ts, c.format));
        return {c.out};
    }
    detail::validate_grid(c);
    if (c.out == "-") throw ConfigError("grid dynamics needs an output file, not stdout");
    const SweepAxis axis = parse_axis(c.axis);
    const ModelParams base = model_params(c);
    const auto values = detail::grid_values(c);
    std::vector<std::string> outputs(values.size());
    std::vector<std::exception_ptr> errors(values.size());
    std::atomic<size_t> next{0};
    auto work = [&]() {
        for (size_t i = next.fetch_add(1); i < values.size(); i = next.fetch_add(1)) {
            try {
                const ModelParams p = with_axis(base, axis, values[i]);
                const TimeSeries ts = detail::run_one_dynamics(c, p);
                outputs[i] = detail::with_suffix(c.out, int(i));
                detail::write_text(outputs[i], detail::series_table(ts, c.format));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (c.workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < std::min<int>(c.workers, int(values.size())); ++w)
            pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return outputs;
}

inline std::vector<std::string> run_lindblad(const RunConfig& c) {
    detail::validate_common(c);
    if (c.state_index >= 0)
        throw ConfigError("lindblad starts from a bare product state, not an eigenstate");
    if (c.state_n < 0 || c.state_n > c.n_max)
        throw ConfigError("state_n must lie within the truncation");
    const int q = (c.state_qubit == "+" || c.state_qubit == "1") ? 1
                  : (c.state_qubit == "-" || c.state_qubit == "0")
                      ? 0
                      : throw ConfigError("state_qubit must be + or -");
    auto run_one = [&](const ModelParams& p) {
        const FockTruncation trunc{c.n_max};
        const ThreeLevelSystem sys = build_three_level_system(p, trunc);
        const Vector psi0 = embed_rotated_state(bare_state(c.state_n, q, trunc), trunc);
        const Matrix rho0 = psi0 * psi0.adjoint();
        return propagate_lme(sys, rho0, 2.0 * p.epsilon, c.jump, c.t_max, c.dt, c.record_stride);
    };
    if (c.axis_count == 0) {
        detail::write_text(c.out, detail::lme_table(run_one(model_params(c)), c.format));
        return {c.out};
    }
    detail::validate_grid(c);
    if (c.out == "-") throw ConfigError("grid lindblad needs an output file, not stdout");
    const SweepAxis axis = parse_axis(c.axis);
    const auto values = detail::grid_values(c);
    std::vector<std::string> outputs(values.size());
    for (size_t i = 0; i < values.size(); ++i) {
        const ModelParams p = with_axis(model_params(c), axis, values[i]);
        outputs[i] = detail::with_suffix(c.out, int(i));
        detail::write_text(outputs[i], detail::lme_table(run_one(p), c.format));
    }
    return outputs;
}

inline std::vector<std::string> run_converge(const RunConfig& c) {
    detail::validate_common(c);
    std::vector<int> n_values;
    std::stringstream ss(c.n_max_list);
    std::string tok;
    while (std::getline(ss, tok, ','))
        n_values.push_back(detail::to_int("n_max_list", detail::trim(tok)));
    if (n_values.size() < 2) throw ConfigError("n_max_list needs at least two values");
    for (size_t i = 1; i < n_values.size(); ++i)
        if (n_values[i] <= n_values[i - 1])
            throw ConfigError("n_max_list must be strictly increasing");
    if (c.levels < 1 || c.levels > 2 * (n_values.front() + 1))
        throw ConfigError("levels must fit inside the smallest truncation");
    const auto report =
        convergence_check(model_params(c), parse_representation(c.representation), n_values,
                          c.levels, c.im_tol > 0.0 ? c.im_tol : -1.0);
    if (c.format == "csv") {
        std::string s = "n_max,drift\n";
        for (size_t i = 1; i < n_values.size(); ++i)
            s += std::to_string(n_values[i]) + ',' + detail::fmt(report.drifts[i - 1]) + '\n';
        detail::write_text(c.out, s);
    } else {
        nlohmann::json j = {{"n_max", report.n_max_values},
                            {"drifts", report.drifts},
                            {"max_drift", report.max_drift},
                            {"levels", c.levels},
                            {"converged", report.converged}};
        detail::write_text(c.out, j.dump(2) + "\n");
    }
    return {c.out};
}

inline nlohmann::json config_manifest(const RunConfig& c) {
    using detail::fmt;
    return {{"delta", fmt(c.delta)},
            {"epsilon", fmt(c.epsilon)},
            {"omega", fmt(c.omega)},
            {"g", fmt(c.g)},
            {"n_max", c.n_max},
            {"representation", c.representation},
            {"axis", c.axis},
            {"axis_start", fmt(c.axis_start)},
            {"axis_stop", fmt(c.axis_stop)},
            {"axis_count", c.axis_count},
            {"pairs", c.pairs},
            {"im_tol", fmt(c.im_tol)},
            {"eig_tol", fmt(c.eig_tol)},
            {"pair", c.pair},
            {"bracket_pad", fmt(c.bracket_pad)},
            {"g_max", fmt(c.g_max)},
            {"t_max", fmt(c.t_max)},
            {"dt", fmt(c.dt)},
            {"record_stride", c.record_stride},
            {"norm_guard", fmt(c.norm_guard)},
            {"state_n", c.state_n},
            {"state_qubit", c.state_qubit},
            {"state_index", c.state_index},
            {"method", c.method},
            {"jump", c.jump},
            {"n_max_list", c.n_max_list},
            {"levels", c.levels},
            {"out", c.out},
            {"format", c.format},
            {"workers", c.workers}};
}

// Runs one subcommand and, for file outputs, drops a metadata manifest next
// to the data so the data files themselves stay byte-identical across runs.
inline std::vector<std::string> dispatch(const std::string& command, const RunConfig& c) {
    std::vector<std::string> outputs;
    if (command == "spectrum") outputs = run_spectrum(c);
    else if (command == "aa") outputs = run_aa(c);
    else if (command == "ep") outputs = run_ep(c);
    else if (command == "juddian") outputs = run_juddian(c);
    else if (command == "dynamics") outputs = run_dynamics(c);
    else if (command == "lindblad") outputs = run_lindblad(c);
    else if (command == "converge") outputs = run_converge(c);
    else throw ConfigError("unknown command: '" + command + "'");
    if (c.out != "-") {
        nlohmann::json manifest = {
            {"command", command}, {"config", config_manifest(c)}, {"outputs", outputs}};
        if (!c.axis.empty() && c.axis_count >= 2) manifest["axis_values"] = detail::grid_values(c);
        detail::write_text(c.out + ".manifest.json", manifest.dump(2) + "\n");
    }
    return outputs;
}

}  // namespace ptqrm::cli
