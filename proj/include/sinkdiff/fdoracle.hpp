#pragma once

// Brute-force reference solver: Crank-Nicolson finite differences on a
// truncated domain with zero-density boundaries. The delta sink is a rate
// 2 k(t)/dx at the origin node, treated semi-implicitly with k averaged over
// the step; a point-mass initial condition is regularized as a narrow
// Gaussian of width 3 dx. First-order accurate in dx at the sink, which is
// all a percent-level oracle needs.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "sinkdiff/field.hpp"
#include "sinkdiff/model.hpp"
#include "sinkdiff/quadrature.hpp"

namespace sinkdiff {

struct FdConfig {
    SpaceGrid space;
    TimeGrid time;
    /// Grid times at which dense snapshots are kept (snapped to the nearest
    /// node). Empty keeps none; the origin/survival/absorbed series are
    /// always recorded at every step.
    std::vector<double> snapshot_times;
    double boundary_tolerance = 1e-10;
};

/// Crank-Nicolson run: per-step origin density, mass bookkeeping, and dense
/// snapshots at the requested times.
struct FieldHistory {
    SpaceGrid space;
    TimeGrid time;
    std::vector<double> origin;
    std::vector<double> survival;
    std::vector<double> absorbed;
    std::vector<FieldSnapshot> snapshots;
};

struct truncation_error : std::runtime_error {
    double boundary_ratio;
    truncation_error(const std::string& msg, double ratio)
        : std::runtime_error(msg), boundary_ratio(ratio) {}
};

namespace detail {

inline std::vector<double> initial_grid_density(const Problem& p, const SpaceGrid& g) {
    std::vector<double> values(g.n_points, 0.0);
    const double dx = g.spacing();
    std::visit(
        [&](const auto& c) {
            using C = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<C, DeltaAt>) {
                const double width = 3.0 * dx;
                for (int i = 0; i < g.n_points; ++i) {
                    const double u = (g.node(i) - c.x0) / width;
                    values[i] = std::exp(-0.5 * u * u) / (width * std::sqrt(2.0 * pi));
                }
            } else {
                for (int i = 0; i < g.n_points; ++i)
                    values[i] = evaluate_ic(p.ic, g.node(i));
            }
        },
        p.ic);
    values.front() = 0.0;
    values.back() = 0.0;
    const double mass = trapezoid(values, dx);
    if (!(mass > 0.0))
        throw std::invalid_argument("cn_solve: initial condition has no mass on the grid");
    for (auto& v : values) v /= mass;
    return values;
}

}  // namespace detail

inline FieldHistory cn_solve(const Problem& p, const FdConfig& cfg) {
    require_valid(p);
    const SpaceGrid& g = cfg.space;
    if (g.n_points < 5 || g.n_points % 2 == 0)
        throw std::domain_error("cn_solve: space grid needs an odd n_points >= 5");
    if (!(g.half_width > 0.0)) throw std::domain_error("cn_solve: half_width must be > 0");
    if (cfg.time.n_steps < 1) throw std::domain_error("cn_solve: need at least one time step");

    const int nx = g.n_points;
    const int io = g.origin_index();
    const double dx = g.spacing();
    const double dt = cfg.time.step();
    const double r = p.diffusion * dt / (2.0 * dx * dx);
    const bool inverse_time = std::holds_alternative<InverseTimeSink>(p.sink);

    FieldHistory out{g, cfg.time, {}, {}, {}, {}};
    std::vector<double> values = detail::initial_grid_density(p, g);

    // requested snapshot node indices, snapped to the grid
    std::vector<int> snap_nodes;
    for (double t : cfg.snapshot_times) {
        const int n = static_cast<int>(std::lround(t / dt));
        if (n < 0 || n > cfg.time.n_steps)
            throw std::domain_error("cn_solve: snapshot time outside the run");
        snap_nodes.push_back(n);
    }

    auto record_snapshot = [&](int node) {
        for (int want : snap_nodes)
            if (want == node) {
                out.snapshots.push_back({g, cfg.time.node(node), values});
                break;
            }
    };

    out.origin.reserve(cfg.time.n_nodes());
    out.survival.reserve(cfg.time.n_nodes());
    out.absorbed.reserve(cfg.time.n_nodes());
    out.origin.push_back(values[io]);
    out.survival.push_back(trapezoid(values, dx));
    out.absorbed.push_back(0.0);
    record_snapshot(0);

    std::vector<double> lower(nx, 0.0), diag(nx, 0.0), upper(nx, 0.0), rhs(nx, 0.0);
    std::vector<double> scratch(nx, 0.0);
    double absorbed = 0.0;
    double peak = 0.0, boundary_peak = 0.0;
    for (double v : values) peak = std::max(peak, std::abs(v));

    for (int n = 0; n < cfg.time.n_steps; ++n) {
        const double t0 = cfg.time.node(n), t1 = cfg.time.node(n + 1);
        double kbar;
        if (inverse_time && n == 0) {
            kbar = evaluate_sink(p.sink, 0.5 * dt);
        } else {
            kbar = 0.5 * (evaluate_sink(p.sink, t0) + evaluate_sink(p.sink, t1));
        }
        const double sink_coef = dt * kbar / dx;

        for (int i = 1; i < nx - 1; ++i) {
            lower[i] = -r;
            upper[i] = -r;
            diag[i] = 1.0 + 2.0 * r;
            rhs[i] = r * values[i - 1] + (1.0 - 2.0 * r) * values[i] + r * values[i + 1];
        }
        diag[io] += sink_coef;
        rhs[io] -= sink_coef * values[io];

        // Thomas sweep over the interior, Dirichlet ends
        const double origin_old = values[io];
        scratch[1] = upper[1] / diag[1];
        rhs[1] /= diag[1];
        for (int i = 2; i < nx - 1; ++i) {
            const double m = diag[i] - lower[i] * scratch[i - 1];
            scratch[i] = upper[i] / m;
            rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / m;
        }
        values[nx - 2] = rhs[nx - 2];
        for (int i = nx - 3; i >= 1; --i) values[i] = rhs[i] - scratch[i] * values[i + 1];
        values[0] = 0.0;
        values[nx - 1] = 0.0;

        absorbed += dt * 2.0 * kbar * 0.5 * (origin_old + values[io]);
        out.origin.push_back(values[io]);
        out.survival.push_back(trapezoid(values, dx));
        out.absorbed.push_back(absorbed);
        record_snapshot(n + 1);

        for (double v : values) peak = std::max(peak, std::abs(v));
        boundary_peak = std::max({boundary_peak, std::abs(values[1]), std::abs(values[nx - 2])});
    }

    if (peak > 0.0 && boundary_peak > cfg.boundary_tolerance * peak)
        throw truncation_error(
            "cn_solve: density reached the truncated boundary (ratio " +
                std::to_string(boundary_peak / peak) + "); enlarge half_width",
            boundary_peak / peak);
    return out;
}

/// Error norms between an FD run and externally produced snapshots, taken
/// over the interior |x| <= half_width/2 to exclude the truncation fringe.
/// Snapshots on a different grid are interpolated linearly onto the FD grid.
struct ComparisonReport {
    std::vector<double> times;
    std::vector<double> linf_abs;
    std::vector<double> linf_rel;  // normalized by the FD peak in the window
    std::vector<double> l2_abs;
    double max_linf_rel = 0.0;
};

inline ComparisonReport compare(const FieldHistory& fd, const std::vector<FieldSnapshot>& others) {
    ComparisonReport rep;
    const double dt = fd.time.step();
    for (const auto& other : others) {
        const FieldSnapshot* match = nullptr;
        for (const auto& snap : fd.snapshots)
            if (std::abs(snap.time - other.time) <= 0.5 * dt) {
                match = &snap;
                break;
            }
        if (!match)
            throw std::domain_error("compare: no FD snapshot near t = " + std::to_string(other.time));

        const SpaceGrid& g = fd.space;
        const double window = 0.5 * g.half_width;
        double linf = 0.0, ref_peak = 0.0, l2 = 0.0;
        for (int i = 0; i < g.n_points; ++i) {
            const double x = g.node(i);
            if (std::abs(x) > window) continue;
            // linear interpolation of the other snapshot at x
            const SpaceGrid& og = other.grid;
            double value;
            if (x <= og.node(0)) {
                value = other.values.front();
            } else if (x >= og.node(og.n_points - 1)) {
                value = other.values.back();
            } else {
                const double pos = (x + og.half_width) / og.spacing();
                const int j = std::min(static_cast<int>(pos), og.n_points - 2);
                double w = pos - j;
                if (w < 1e-9) w = 0.0;  // aligned grids compare node to node
                if (w > 1.0 - 1e-9) w = 1.0;
                value = other.values[j] * (1.0 - w) + other.values[j + 1] * w;
            }
            const double diff = std::abs(match->values[i] - value);
            linf = std::max(linf, diff);
            ref_peak = std::max(ref_peak, std::abs(match->values[i]));
            l2 += diff * diff;
        }
        rep.times.push_back(other.time);
        rep.linf_abs.push_back(linf);
        rep.linf_rel.push_back(ref_peak > 0.0 ? linf / ref_peak : linf);
        rep.l2_abs.push_back(std::sqrt(l2 * g.spacing()));
        rep.max_linf_rel = std::max(rep.max_linf_rel, rep.linf_rel.back());
    }
    if (rep.times.empty()) throw std::domain_error("compare: no snapshots to compare");
    return rep;
}

}  // namespace sinkdiff
