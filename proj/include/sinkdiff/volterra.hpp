#pragma once

// Time-domain solver for the origin density P(0,t).
//
// The origin density satisfies a second-kind Volterra equation with an Abel
// kernel,
//
//   P(0,t) + (1/sqrt(pi D)) int_0^t k(t') P(0,t') / sqrt(t - t') dt' = f(t),
//
// where f(t) is the free heat-kernel evolution of the initial condition at
// x = 0. The singular integral is discretized by product integration: the
// smooth factor k(t') P(0,t') is interpolated piecewise linearly on the
// uniform grid and the kernel moments are integrated exactly, which makes
// the marching scheme solvable one scalar equation per step.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <variant>
#include <vector>

#include "sinkdiff/model.hpp"

namespace sinkdiff {

/// Solved origin series P(0, t_n) together with the free forcing f(t_n).
struct OriginHistory {
    TimeGrid grid;
    std::vector<double> values;
    std::vector<double> forcing;
};

/// Free-evolution forcing f(t): the heat-kernel evolution of the initial
/// condition evaluated at the origin. f(0) is the initial density at x = 0.
inline double free_origin_forcing(const Problem& p, double t) {
    if (!(t >= 0.0)) throw std::domain_error("free_origin_forcing: t must be >= 0");
    return free_density(p.ic, p.diffusion, 0.0, t);
}

namespace detail {

// Per-lag moments of the Abel kernel against the piecewise-linear hat basis.
// For the interval m steps behind the target node (covering
// [t_{n-m}, t_{n-m+1}] when integrating to t_n):
//   mu0(m)   = int 1            / sqrt(t_n - t') dt' = 2 sqrt(h) (sqrt(m) - sqrt(m-1))
//   mu1(m)/h = int (t'-t_left)/h / sqrt(t_n - t') dt'
// left(m)/right(m) are the weights multiplying the left/right nodal values.
struct AbelLag {
    double sqrt_h = 0.0;
    std::vector<double> mu0;    // index m = 1..n_steps
    std::vector<double> left;
    std::vector<double> right;
};

inline AbelLag abel_lag(const TimeGrid& grid) {
    const int n = grid.n_steps;
    AbelLag lag;
    lag.sqrt_h = std::sqrt(grid.step());
    lag.mu0.assign(n + 1, 0.0);
    lag.left.assign(n + 1, 0.0);
    lag.right.assign(n + 1, 0.0);
    double sm_prev = 0.0;
    for (int m = 1; m <= n; ++m) {
        const double sm = std::sqrt(static_cast<double>(m));
        const double diff = 1.0 / (sm + sm_prev);  // sqrt(m) - sqrt(m-1), cancellation-free
        const double mu0 = 2.0 * lag.sqrt_h * diff;
        // mu1/h = sqrt(h) * diff * (2m - (2/3)(2m - 1 + sqrt(m(m-1))))
        const double mu1_over_h =
            lag.sqrt_h * diff * (2.0 * m - (2.0 / 3.0) * (2.0 * m - 1.0 + sm * sm_prev));
        lag.mu0[m] = mu0;
        lag.right[m] = mu1_over_h;
        lag.left[m] = mu0 - mu1_over_h;
        sm_prev = sm;
    }
    return lag;
}

// Nodal values of k(t) plus the midpoint value used by the inverse-time
// first-interval rule. For the inverse-time sink the t = 0 node is never
// evaluated (k diverges there; the product k*P has limit 0).
struct SinkSamples {
    std::vector<double> k;      // k(t_n), n = 0..n_steps
    double k_first_mid = 0.0;   // k(h/2), inverse-time only
    bool inverse_time = false;
};

inline SinkSamples sink_samples(const Problem& p, const TimeGrid& grid) {
    SinkSamples s;
    s.inverse_time = std::holds_alternative<InverseTimeSink>(p.sink);
    s.k.resize(grid.n_nodes());
    s.k[0] = s.inverse_time ? 0.0 : evaluate_sink(p.sink, 0.0);
    for (int n = 1; n <= grid.n_steps; ++n) s.k[n] = evaluate_sink(p.sink, grid.node(n));
    if (s.inverse_time) s.k_first_mid = evaluate_sink(p.sink, 0.5 * grid.step());
    return s;
}

// Nodal product g_j = k(t_j) P(0,t_j); a singular origin density at t = 0
// (on-origin point mass) carries no quadrature weight.
inline double nodal_product(double k, double y) {
    const double g = k * y;
    return std::isfinite(g) ? g : 0.0;
}

}  // namespace detail

/// Product-integration weights for int_0^{t_n} g(t')/sqrt(t_n - t') dt' with
/// g piecewise linear on the grid; exact for every linear g. Units sqrt(time).
inline std::vector<double> abel_weights(const TimeGrid& grid, int n) {
    if (n < 1 || n > grid.n_steps)
        throw std::domain_error("abel_weights: step index out of range");
    const auto lag = detail::abel_lag(grid);
    std::vector<double> w(n + 1, 0.0);
    for (int m = 1; m <= n; ++m) {
        w[n - m] += lag.left[m];
        w[n - m + 1] += lag.right[m];
    }
    return w;
}

/// Marches the product-integration discretization: at each t_n the scalar
/// linear equation for P(0,t_n) is solved directly (the diagonal weight
/// multiplies the unknown). With a zero sink the forcing is returned
/// unchanged, no quadrature applied.
inline OriginHistory solve_origin(const Problem& p, const TimeGrid& grid) {
    require_valid(p);
    if (grid.n_steps < 2) throw std::domain_error("solve_origin: grid needs n_steps >= 2");

    OriginHistory oh{grid, {}, {}};
    oh.forcing.resize(grid.n_nodes());
    for (int n = 0; n < grid.n_nodes(); ++n) oh.forcing[n] = free_origin_forcing(p, grid.node(n));

    if (std::holds_alternative<ZeroSink>(p.sink)) {
        oh.values = oh.forcing;
        return oh;
    }

    const int N = grid.n_steps;
    const double c = 1.0 / std::sqrt(detail::pi * p.diffusion);
    const auto lag = detail::abel_lag(grid);
    const auto sink = detail::sink_samples(p, grid);

    oh.values.assign(grid.n_nodes(), 0.0);
    oh.values[0] = oh.forcing[0];
    std::vector<double> g(grid.n_nodes(), 0.0);
    g[0] = detail::nodal_product(sink.k[0], oh.values[0]);

    for (int n = 1; n <= N; ++n) {
        double hist = 0.0;
        for (int m = 2; m <= n; ++m) {
            if (sink.inverse_time && m == n) {
                // first interval [0, h]: the product is represented by its
                // midpoint value to sidestep the t' = 0 singularity of k
                hist += lag.mu0[n] * sink.k_first_mid * 0.5 * (oh.values[0] + oh.values[1]);
            } else {
                hist += lag.left[m] * g[n - m] + lag.right[m] * g[n - m + 1];
            }
        }
        double diag;
        if (sink.inverse_time && n == 1) {
            hist += lag.mu0[1] * sink.k_first_mid * 0.5 * oh.values[0];
            diag = lag.mu0[1] * sink.k_first_mid * 0.5;
        } else {
            hist += lag.left[1] * g[n - 1];
            diag = lag.right[1] * sink.k[n];
        }
        const double denom = 1.0 + c * diag;
        if (!(denom > 0.0))
            throw std::runtime_error("solve_origin: numerical breakdown, non-positive diagonal");
        oh.values[n] = (oh.forcing[n] - c * hist) / denom;
        g[n] = detail::nodal_product(sink.k[n], oh.values[n]);
    }
    return oh;
}

}  // namespace sinkdiff
