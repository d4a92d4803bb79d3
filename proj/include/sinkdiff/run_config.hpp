#pragma once

// Run configuration: the dotted-key text format consumed by the CLI, its
// parser and canonical serializer, and the mapping onto a Problem plus
// grids. See the README for the full schema.

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "sinkdiff/csv.hpp"
#include "sinkdiff/model.hpp"

namespace sinkdiff {

struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    double diffusion_coefficient = 1.0;

    std::string sink_type = "zero";  // zero|constant|linear|inverse_time|exponential|tabulated
    double sink_k0 = 0.0;
    double sink_alpha = 0.0;
    double sink_beta = 0.0;
    double sink_decay = 0.0;
    std::vector<double> sink_times;
    std::vector<double> sink_values;

    std::string ic_type = "delta";  // delta|gaussian|tabulated
    double ic_x0 = -1.0;
    double ic_center = 0.0;
    double ic_width = 1.0;
    std::vector<double> ic_xs;
    std::vector<double> ic_densities;

    double grid_t_max = 4.0;
    int grid_n_steps = 4096;
    double grid_half_width = 12.0;
    int grid_n_points = 961;

    // optional finer resolution for the finite-difference method (0 = inherit)
    int fd_n_steps = 0;
    int fd_n_points = 0;

    std::string method = "volterra";  // volterra|laplace|analytic|fdoracle

    double tol_cross_method = 1e-3;
    double tol_balance = 1e-5;
    double tol_fd = 0.01;

    bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw parse_error("");
        return d;
    } catch (...) {
        throw parse_error("config: value of '" + key + "' is not a number: '" + v + "'");
    }
}

inline int parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const int n = std::stoi(v, &used);
        if (used != v.size()) throw parse_error("");
        return n;
    } catch (...) {
        throw parse_error("config: value of '" + key + "' is not an integer: '" + v + "'");
    }
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
    if (out.empty()) throw parse_error("config: value of '" + key + "' is an empty list");
    return out;
}

inline std::string join_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += format_g17(v[i]);
    }
    return out;
}

}  // namespace detail

inline RunConfig parse_config_text(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
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
            throw parse_error("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (value.empty())
            throw parse_error("config line " + std::to_string(line_no) + ": empty value for '" + key + "'");

        if (key == "diffusion_coefficient") c.diffusion_coefficient = detail::parse_double(key, value);
        else if (key == "sink.type") c.sink_type = value;
        else if (key == "sink.k0") c.sink_k0 = detail::parse_double(key, value);
        else if (key == "sink.alpha") c.sink_alpha = detail::parse_double(key, value);
        else if (key == "sink.beta") c.sink_beta = detail::parse_double(key, value);
        else if (key == "sink.decay") c.sink_decay = detail::parse_double(key, value);
        else if (key == "sink.times") c.sink_times = detail::parse_list(key, value);
        else if (key == "sink.values") c.sink_values = detail::parse_list(key, value);
        else if (key == "ic.type") c.ic_type = value;
        else if (key == "ic.x0") c.ic_x0 = detail::parse_double(key, value);
        else if (key == "ic.center") c.ic_center = detail::parse_double(key, value);
        else if (key == "ic.width") c.ic_width = detail::parse_double(key, value);
        else if (key == "ic.xs") c.ic_xs = detail::parse_list(key, value);
        else if (key == "ic.densities") c.ic_densities = detail::parse_list(key, value);
        else if (key == "grid.t_max") c.grid_t_max = detail::parse_double(key, value);
        else if (key == "grid.n_steps") c.grid_n_steps = detail::parse_int(key, value);
        else if (key == "grid.half_width") c.grid_half_width = detail::parse_double(key, value);
        else if (key == "grid.n_points") c.grid_n_points = detail::parse_int(key, value);
        else if (key == "fd.n_steps") c.fd_n_steps = detail::parse_int(key, value);
        else if (key == "fd.n_points") c.fd_n_points = detail::parse_int(key, value);
        else if (key == "method") c.method = value;
        else if (key == "tolerances.cross_method") c.tol_cross_method = detail::parse_double(key, value);
        else if (key == "tolerances.balance") c.tol_balance = detail::parse_double(key, value);
        else if (key == "tolerances.fd") c.tol_fd = detail::parse_double(key, value);
        else throw parse_error("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    return c;
}

inline RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

/// Canonical serialization; parse_config_text(to_config_text(c)) == c.
inline std::string to_config_text(const RunConfig& c) {
    std::string out;
    auto kv = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
    kv("diffusion_coefficient", format_g17(c.diffusion_coefficient));
    kv("sink.type", c.sink_type);
    if (c.sink_type == "constant") kv("sink.k0", format_g17(c.sink_k0));
    if (c.sink_type == "linear" || c.sink_type == "inverse_time")
        kv("sink.alpha", format_g17(c.sink_alpha));
    if (c.sink_type == "exponential") {
        kv("sink.beta", format_g17(c.sink_beta));
        kv("sink.decay", format_g17(c.sink_decay));
    }
    if (c.sink_type == "tabulated") {
        kv("sink.times", detail::join_list(c.sink_times));
        kv("sink.values", detail::join_list(c.sink_values));
    }
    kv("ic.type", c.ic_type);
    if (c.ic_type == "delta") kv("ic.x0", format_g17(c.ic_x0));
    if (c.ic_type == "gaussian") {
        kv("ic.center", format_g17(c.ic_center));
        kv("ic.width", format_g17(c.ic_width));
    }
    if (c.ic_type == "tabulated") {
        kv("ic.xs", detail::join_list(c.ic_xs));
        kv("ic.densities", detail::join_list(c.ic_densities));
    }
    kv("grid.t_max", format_g17(c.grid_t_max));
    kv("grid.n_steps", std::to_string(c.grid_n_steps));
    kv("grid.half_width", format_g17(c.grid_half_width));
    kv("grid.n_points", std::to_string(c.grid_n_points));
    if (c.fd_n_steps > 0) kv("fd.n_steps", std::to_string(c.fd_n_steps));
    if (c.fd_n_points > 0) kv("fd.n_points", std::to_string(c.fd_n_points));
    kv("method", c.method);
    kv("tolerances.cross_method", format_g17(c.tol_cross_method));
    kv("tolerances.balance", format_g17(c.tol_balance));
    kv("tolerances.fd", format_g17(c.tol_fd));
    return out;
}

/// Builds the Problem described by the config. Unknown enum strings are
/// parse errors; physical violations surface via validate_problem.
inline Problem make_problem(const RunConfig& c) {
    Problem p;
    p.diffusion = c.diffusion_coefficient;

    if (c.sink_type == "zero") p.sink = ZeroSink{};
    else if (c.sink_type == "constant") p.sink = ConstantSink{c.sink_k0};
    else if (c.sink_type == "linear") p.sink = LinearSink{c.sink_alpha};
    else if (c.sink_type == "inverse_time") p.sink = InverseTimeSink{c.sink_alpha};
    else if (c.sink_type == "exponential") p.sink = ExponentialSink{c.sink_beta, c.sink_decay};
    else if (c.sink_type == "tabulated") p.sink = TabulatedSink{c.sink_times, c.sink_values};
    else throw parse_error("config: unknown sink.type '" + c.sink_type + "'");

    if (c.ic_type == "delta") p.ic = DeltaAt{c.ic_x0};
    else if (c.ic_type == "gaussian") p.ic = GaussianIc{c.ic_center, c.ic_width};
    else if (c.ic_type == "tabulated") p.ic = tabulated_ic(c.ic_xs, c.ic_densities);
    else throw parse_error("config: unknown ic.type '" + c.ic_type + "'");

    return p;
}

inline TimeGrid make_time_grid(const RunConfig& c) { return {c.grid_t_max, c.grid_n_steps}; }
inline SpaceGrid make_space_grid(const RunConfig& c) { return {c.grid_half_width, c.grid_n_points}; }

inline TimeGrid make_fd_time_grid(const RunConfig& c) {
    return {c.grid_t_max, c.fd_n_steps > 0 ? c.fd_n_steps : c.grid_n_steps};
}

inline SpaceGrid make_fd_space_grid(const RunConfig& c) {
    return {c.grid_half_width, c.fd_n_points > 0 ? c.fd_n_points : c.grid_n_points};
}

/// Which solver can handle which sink law.
inline bool method_supports(const std::string& method, const std::string& sink_type) {
    if (method == "volterra" || method == "fdoracle") return true;
    if (method == "analytic")
        return sink_type == "zero" || sink_type == "constant" || sink_type == "inverse_time";
    if (method == "laplace")
        return sink_type == "zero" || sink_type == "constant" || sink_type == "linear" ||
               sink_type == "exponential";
    return false;
}

/// Grid and method checks that are not Problem invariants.
inline std::vector<std::string> validate_config(const RunConfig& c) {
    std::vector<std::string> issues;
    if (!(c.grid_t_max > 0.0)) issues.push_back("grid.t_max must be > 0");
    if (c.grid_n_steps < 2) issues.push_back("grid.n_steps must be >= 2");
    if (!(c.grid_half_width > 0.0)) issues.push_back("grid.half_width must be > 0");
    if (c.grid_n_points < 5 || c.grid_n_points % 2 == 0)
        issues.push_back("grid.n_points must be an odd integer >= 5");
    if (c.fd_n_points != 0 && (c.fd_n_points < 5 || c.fd_n_points % 2 == 0))
        issues.push_back("fd.n_points must be an odd integer >= 5");
    if (c.fd_n_steps < 0) issues.push_back("fd.n_steps must be >= 0");

    if (c.method != "volterra" && c.method != "laplace" && c.method != "analytic" &&
        c.method != "fdoracle")
        issues.push_back("method must be one of volterra|laplace|analytic|fdoracle");
    else if (!method_supports(c.method, c.sink_type))
        issues.push_back("method '" + c.method + "' does not support sink '" + c.sink_type + "'");
    return issues;
}

}  // namespace sinkdiff
