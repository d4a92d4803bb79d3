// Command-line front end: configure a problem from a key-value file, run the
// solvers, cross-validate the applicable methods, and emit CSV/JSON.
//
// Exit codes: 0 success, 2 config parse failure, 3 validation failure,
// 4 accuracy failure, 5 domain-truncation failure, 1 internal error.

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sinkdiff/sinkdiff.hpp"

namespace {

using nlohmann::ordered_json;
using namespace sinkdiff;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitAccuracy = 4;
constexpr int kExitTruncation = 5;

struct validation_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOptions {
    std::string config_path;
    std::string out_path;
    std::string method_override;
    bool quiet = false;
};

void note(const CommonOptions& opt, const std::string& msg) {
    if (!opt.quiet) std::cerr << "sinkdiff: " << msg << "\n";
}

RunConfig load_config(const CommonOptions& opt) {
    RunConfig cfg = parse_config_file(opt.config_path);
    if (!opt.method_override.empty()) cfg.method = opt.method_override;
    auto issues = validate_config(cfg);
    const Problem p = make_problem(cfg);  // may throw parse_error for bad enums
    for (const auto& issue : validate_problem(p))
        issues.push_back(std::string(validation_code_name(issue.code)) + ": " + issue.message);
    if (!issues.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& s : issues) msg += "\n  - " + s;
        throw validation_failure(msg);
    }
    return cfg;
}

// output goes to --out when given, stdout otherwise
class OutputTarget {
public:
    explicit OutputTarget(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw std::runtime_error("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

int node_index_or_fail(const TimeGrid& grid, double t, const std::string& what) {
    const double h = grid.step();
    const double pos = t / h;
    const int n = static_cast<int>(std::lround(pos));
    if (n >= 0 && n <= grid.n_steps && std::abs(pos - n) <= 1e-9 * std::max(1.0, pos)) return n;
    const int lo = std::max(0, std::min(grid.n_steps, static_cast<int>(std::floor(pos))));
    const int hi = std::max(0, std::min(grid.n_steps, lo + 1));
    throw validation_failure(what + ": t = " + format_g17(t) +
                             " is not a grid node; nearest nodes are " + format_g17(grid.node(lo)) +
                             " and " + format_g17(grid.node(hi)));
}

// P(0, t_n) under the chosen method, on the given grid
std::vector<double> origin_series(const RunConfig& cfg, const Problem& p,
                                  const std::string& method, const TimeGrid& grid) {
    if (!method_supports(method, cfg.sink_type))
        throw validation_failure("method '" + method + "' does not support sink '" +
                                 cfg.sink_type + "'");

    if (method == "volterra") return solve_origin(p, grid).values;

    if (method == "analytic") {
        const auto* delta = std::get_if<DeltaAt>(&p.ic);
        if (!delta && !std::holds_alternative<ZeroSink>(p.sink))
            throw validation_failure(
                "method 'analytic' needs a point-mass initial condition for sinked runs");
        std::vector<double> out(grid.n_nodes());
        for (int n = 0; n < grid.n_nodes(); ++n) {
            const double t = grid.node(n);
            if (std::holds_alternative<ZeroSink>(p.sink)) {
                out[n] = free_origin_forcing(p, t);
            } else if (const auto* c = std::get_if<ConstantSink>(&p.sink)) {
                out[n] = t == 0.0 ? free_origin_forcing(p, 0.0)
                                  : constant_sink_propagator(
                                        {0.0, delta->x0, t, p.diffusion, c->k0});
            } else {
                const auto* it = std::get_if<InverseTimeSink>(&p.sink);
                out[n] = t == 0.0 ? free_origin_forcing(p, 0.0)
                                  : inverse_time_propagator(
                                        {0.0, delta->x0, t, p.diffusion, it->alpha});
            }
        }
        return out;
    }

    if (method == "laplace") {
        std::function<Complex(Complex)> transform;
        InversionAlgorithm alg = InversionAlgorithm::talbot;
        if (std::holds_alternative<ZeroSink>(p.sink)) {
            transform = [&p](Complex s) { return forcing_transform(p, s).value; };
        } else if (std::holds_alternative<ConstantSink>(p.sink)) {
            transform = [&p](Complex s) { return constant_sink_transform(p, s).value; };
        } else if (std::holds_alternative<LinearSink>(p.sink)) {
            // the decaying-integral form is only valid in the right half
            // plane, which the de Hoog contour never leaves
            transform = [&p](Complex s) { return linear_sink_transform(p, s).value; };
            alg = InversionAlgorithm::de_hoog;
        } else {
            transform = [&p](Complex s) {
                return exponential_sink_series(p, s, 1e-12).value;
            };
        }
        std::vector<double> times;
        for (int n = 1; n < grid.n_nodes(); ++n) times.push_back(grid.node(n));
        const auto pts = invert(transform, {alg, times, 1e-8});
        std::vector<double> out(grid.n_nodes());
        out[0] = free_origin_forcing(p, 0.0);
        for (int n = 1; n < grid.n_nodes(); ++n) out[n] = pts[n - 1].value;
        return out;
    }

    // fdoracle, possibly on finer internal grids; sampled back at the output nodes
    const TimeGrid fd_time{grid.t_max, cfg.fd_n_steps > 0 ? cfg.fd_n_steps : grid.n_steps};
    const SpaceGrid fd_space = make_fd_space_grid(cfg);
    const auto fh = cn_solve(p, {fd_space, fd_time, {}});
    std::vector<double> out(grid.n_nodes());
    for (int n = 0; n < grid.n_nodes(); ++n) {
        const int m = static_cast<int>(std::lround(grid.node(n) / fd_time.step()));
        out[n] = fh.origin[std::min(m, fd_time.n_steps)];
    }
    return out;
}

int cmd_origin(const CommonOptions& opt) {
    const RunConfig cfg = load_config(opt);
    const Problem p = make_problem(cfg);
    const TimeGrid grid = make_time_grid(cfg);
    note(opt, "origin series via method '" + cfg.method + "'");
    const auto values = origin_series(cfg, p, cfg.method, grid);

    OutputTarget out(opt.out_path);
    CsvWriter csv(out.stream(), {"t", "origin_density", "free_forcing"});
    for (int n = 0; n < grid.n_nodes(); ++n)
        csv.row(std::vector<double>{grid.node(n), values[n], free_origin_forcing(p, grid.node(n))});
    return kExitOk;
}

int cmd_field(const CommonOptions& opt, const std::vector<double>& times) {
    const RunConfig cfg = load_config(opt);
    const Problem p = make_problem(cfg);
    if (times.empty()) throw validation_failure("field: at least one --times value is required");
    if (cfg.method == "laplace")
        throw validation_failure("field: the laplace method only covers the origin series");
    const SpaceGrid sgrid = make_space_grid(cfg);

    std::vector<FieldSnapshot> snaps;
    if (cfg.method == "volterra") {
        const TimeGrid grid = make_time_grid(cfg);
        for (double t : times) node_index_or_fail(grid, t, "field");
        const auto oh = solve_origin(p, grid);
        for (double t : times) snaps.push_back(snapshot(p, oh, sgrid, t));
    } else if (cfg.method == "analytic") {
        const auto* delta = std::get_if<DeltaAt>(&p.ic);
        if (!delta) throw validation_failure("field: method 'analytic' needs a point-mass ic");
        for (double t : times) {
            FieldSnapshot snap{sgrid, t, {}};
            snap.values.resize(sgrid.n_points);
            for (int i = 0; i < sgrid.n_points; ++i) {
                const PropagatorQuery q{sgrid.node(i), delta->x0, t, p.diffusion,
                                        std::holds_alternative<ConstantSink>(p.sink)
                                            ? std::get<ConstantSink>(p.sink).k0
                                            : (std::holds_alternative<InverseTimeSink>(p.sink)
                                                   ? std::get<InverseTimeSink>(p.sink).alpha
                                                   : 0.0)};
                if (std::holds_alternative<ZeroSink>(p.sink))
                    snap.values[i] = free_propagator(q);
                else if (std::holds_alternative<ConstantSink>(p.sink))
                    snap.values[i] = constant_sink_propagator(q);
                else
                    snap.values[i] = inverse_time_propagator(q);
            }
            snaps.push_back(std::move(snap));
        }
    } else {
        const TimeGrid fd_time = make_fd_time_grid(cfg);
        for (double t : times) node_index_or_fail(fd_time, t, "field");
        const auto fh = cn_solve(p, {make_fd_space_grid(cfg), fd_time, times});
        // fd snapshots come back on the fd space grid; sample onto the output grid
        for (const auto& fd_snap : fh.snapshots) {
            FieldSnapshot snap{sgrid, fd_snap.time, {}};
            snap.values.resize(sgrid.n_points);
            for (int i = 0; i < sgrid.n_points; ++i) {
                const double x = sgrid.node(i);
                const double pos = (x + fd_snap.grid.half_width) / fd_snap.grid.spacing();
                const int j =
                    std::max(0, std::min(static_cast<int>(pos), fd_snap.grid.n_points - 2));
                double w = pos - j;
                if (w < 1e-9) w = 0.0;
                if (w > 1.0 - 1e-9) w = 1.0;
                snap.values[i] = fd_snap.values[j] * (1.0 - w) + fd_snap.values[j + 1] * w;
            }
            snaps.push_back(std::move(snap));
        }
    }

    OutputTarget out(opt.out_path);
    CsvWriter csv(out.stream(), {"t", "x", "P"});
    for (const auto& snap : snaps)
        for (int i = 0; i < snap.grid.n_points; ++i)
            csv.row(std::vector<double>{snap.time, snap.grid.node(i), snap.values[i]});
    return kExitOk;
}

int cmd_validate(const CommonOptions& opt) {
    const RunConfig cfg = load_config(opt);
    const Problem p = make_problem(cfg);
    const TimeGrid grid = make_time_grid(cfg);

    std::vector<std::string> methods{"volterra"};
    if (method_supports("analytic", cfg.sink_type) && cfg.ic_type == "delta")
        methods.push_back("analytic");
    if (method_supports("laplace", cfg.sink_type)) methods.push_back("laplace");
    methods.push_back("fdoracle");

    ordered_json report;
    report["config"] = ordered_json::parse(R"({})");
    report["config"]["sink"] = cfg.sink_type;
    report["config"]["ic"] = cfg.ic_type;
    report["config"]["n_steps"] = cfg.grid_n_steps;
    report["methods"] = methods;
    report["checks"] = ordered_json::array();
    report["errors"] = ordered_json::array();

    std::map<std::string, std::vector<double>> series;
    for (const auto& m : methods) {
        try {
            note(opt, "running method '" + m + "'");
            series[m] = origin_series(cfg, p, m, grid);
        } catch (const std::exception& e) {
            report["errors"].push_back({{"method", m}, {"error", e.what()}});
        }
    }

    bool overall = report["errors"].empty();
    auto add_check = [&](const std::string& name, double value, double tol) {
        const bool pass = value <= tol;
        report["checks"].push_back(
            {{"name", name}, {"value", value}, {"tolerance", tol}, {"pass", pass}});
        overall = overall && pass;
    };

    // pairwise origin agreement over the trusted window, peak-normalized
    const double t_lo = std::max(5.0 * grid.step(), 0.01 * grid.t_max);
    for (std::size_t a = 0; a < methods.size(); ++a) {
        for (std::size_t b = a + 1; b < methods.size(); ++b) {
            if (!series.count(methods[a]) || !series.count(methods[b])) continue;
            const bool fd_pair = methods[a] == "fdoracle" || methods[b] == "fdoracle";
            double diff = 0.0, peak = 0.0;
            for (int n = 0; n < grid.n_nodes(); ++n) {
                if (grid.node(n) < t_lo) continue;
                diff = std::max(diff,
                                std::abs(series[methods[a]][n] - series[methods[b]][n]));
                peak = std::max(peak, std::abs(series[methods[a]][n]));
            }
            add_check("origin:" + methods[a] + "-vs-" + methods[b], diff / peak,
                      fd_pair ? cfg.tol_fd : cfg.tol_cross_method);
        }
    }

    // probability balance of the volterra pipeline at the boundary-clean nodes
    if (series.count("volterra")) {
        try {
            const auto oh = solve_origin(p, grid);
            const SpaceGrid sgrid = make_space_grid(cfg);
            const auto absorbed = absorbed_flux(p, oh);
            double residual = 0.0;
            int used = 0;
            for (int i = 1; i <= 8; ++i) {
                const int n = i * grid.n_steps / 8;
                if (n < 1) continue;
                const auto s = survival(snapshot(p, oh, sgrid, grid.node(n)));
                if (s.truncation_warning) continue;
                residual = std::max(residual, std::abs(s.value + absorbed[n] - 1.0));
                ++used;
            }
            if (used == 0)
                throw validation_failure(
                    "balance audit: every checkpoint hits the truncated boundary; enlarge "
                    "grid.half_width");
            add_check("balance:volterra", residual, cfg.tol_balance);
        } catch (const std::exception& e) {
            report["errors"].push_back({{"method", "balance"}, {"error", e.what()}});
            overall = false;
        }
    }

    // discrete balance of the finite-difference run
    try {
        const auto fh = cn_solve(p, {make_fd_space_grid(cfg), make_fd_time_grid(cfg), {}});
        double residual = 0.0;
        for (std::size_t n = 0; n < fh.survival.size(); ++n)
            residual = std::max(residual, std::abs(fh.survival[n] + fh.absorbed[n] - 1.0));
        add_check("balance:fdoracle", residual, 5e-3);
    } catch (const std::exception& e) {
        report["errors"].push_back({{"method", "fd-balance"}, {"error", e.what()}});
        overall = false;
    }

    report["overall_pass"] = overall;
    OutputTarget out(opt.out_path);
    out.stream() << report.dump(2) << "\n";
    return overall ? kExitOk : kExitAccuracy;
}

int cmd_converge(const CommonOptions& opt, const std::vector<int>& ladder) {
    const RunConfig cfg = load_config(opt);
    const Problem p = make_problem(cfg);
    if (ladder.size() < 3)
        throw validation_failure("converge: the refinement ladder needs at least 3 levels");
    for (std::size_t i = 1; i < ladder.size(); ++i)
        if (ladder[i] <= ladder[i - 1])
            throw validation_failure("converge: ladder must be strictly increasing");

    const bool analytic_ref = cfg.ic_type == "delta" &&
                              (cfg.sink_type == "zero" || cfg.sink_type == "constant" ||
                               cfg.sink_type == "inverse_time");
    const double x0 = cfg.ic_x0;
    auto reference = [&](double t) {
        if (cfg.sink_type == "constant")
            return constant_sink_propagator({0.0, x0, t, cfg.diffusion_coefficient, cfg.sink_k0});
        if (cfg.sink_type == "inverse_time")
            return inverse_time_propagator(
                {0.0, x0, t, cfg.diffusion_coefficient, cfg.sink_alpha});
        return free_origin_forcing(p, t);
    };

    const double t_lo =
        std::max(0.01 * cfg.grid_t_max, 5.0 * cfg.grid_t_max / ladder.front());
    std::vector<double> errors;
    std::optional<OriginHistory> finer;  // for the self-referencing path
    if (!analytic_ref) {
        note(opt, "richardson reference at n_steps = " + std::to_string(2 * ladder.back()));
        finer = solve_origin(p, {cfg.grid_t_max, 2 * ladder.back()});
    }
    for (int n_steps : ladder) {
        note(opt, "running n_steps = " + std::to_string(n_steps));
        const auto oh = solve_origin(p, {cfg.grid_t_max, n_steps});
        double diff = 0.0, peak = 0.0;
        for (int n = 1; n <= n_steps; ++n) {
            const double t = oh.grid.node(n);
            if (t < t_lo) continue;
            double ref;
            if (analytic_ref) {
                ref = reference(t);
            } else {
                const int m = static_cast<int>(std::lround(t / finer->grid.step()));
                ref = finer->values[m];
            }
            peak = std::max(peak, std::abs(ref));
            diff = std::max(diff, std::abs(oh.values[n] - ref));
        }
        errors.push_back(peak > 0.0 ? diff / peak : diff);
    }

    OutputTarget out(opt.out_path);
    CsvWriter csv(out.stream(), {"n_steps", "max_error", "estimated_order"});
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        std::vector<std::string> cells{std::to_string(ladder[i]), format_g17(errors[i])};
        const bool have_order = i > 0 && errors[i] > 0.0 && errors[i - 1] > 0.0;
        cells.push_back(have_order ? format_g17(std::log2(errors[i - 1] / errors[i]))
                                   : std::string());
        csv.row(cells);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"1-D diffusion with a time-dependent point sink at the origin"};
    app.require_subcommand(1);

    CommonOptions opt;
    std::vector<double> times;
    std::vector<int> ladder{512, 1024, 2048, 4096};

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "configuration file")->required();
        sub->add_option("--out", opt.out_path, "output path (default: stdout)");
        sub->add_option("--method", opt.method_override, "override the configured method");
        sub->add_flag("--quiet", opt.quiet, "suppress progress notes");
    };

    auto* origin = app.add_subcommand("origin", "origin density series as CSV");
    add_common(origin);
    auto* field = app.add_subcommand("field", "field snapshots as CSV");
    add_common(field);
    field->add_option("--times", times, "snapshot times (comma separated)")
        ->required()
        ->delimiter(',');
    auto* validate = app.add_subcommand("validate", "cross-method validation report as JSON");
    add_common(validate);
    auto* converge = app.add_subcommand("converge", "grid-refinement study as CSV");
    add_common(converge);
    converge->add_option("--ladder", ladder, "n_steps refinement ladder (comma separated)")
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "sinkdiff: " << e.what() << "\n";
        return kExitParse;
    }

    try {
        if (app.got_subcommand(origin)) return cmd_origin(opt);
        if (app.got_subcommand(field)) return cmd_field(opt, times);
        if (app.got_subcommand(validate)) return cmd_validate(opt);
        return cmd_converge(opt, ladder);
    } catch (const parse_error& e) {
        std::cerr << "sinkdiff: " << e.what() << "\n";
        return kExitParse;
    } catch (const validation_failure& e) {
        std::cerr << "sinkdiff: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "sinkdiff: " << e.what() << "\n";
        return kExitValidation;
    } catch (const truncation_error& e) {
        std::cerr << "sinkdiff: " << e.what() << "\n";
        return kExitTruncation;
    } catch (const accuracy_error& e) {
        std::cerr << "sinkdiff: " << e.what() << " (achieved "
                  << format_g17(e.achieved) << ")\n";
        return kExitAccuracy;
    } catch (const convergence_error& e) {
        std::cerr << "sinkdiff: " << e.what() << "\n";
        return kExitAccuracy;
    } catch (const std::exception& e) {
        std::cerr << "sinkdiff: internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
