#pragma once

// Physical problem definition: diffusion coefficient, sink law k(t),
// initial condition, and the uniform grids the solvers run on.
//
// Convention used throughout:  dP/dt = D d2P/dx2 - 2 k(t) delta(x) P,
// with k(t) >= 0, so the sink only removes probability. The matching jump
// condition is D [dP/dx(0+) - dP/dx(0-)] = 2 k(t) P(0,t).

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "sinkdiff/specfun.hpp"

namespace sinkdiff {

// ---------------------------------------------------------------------------
// Sink models k(t), units length/time.

struct ZeroSink {};

struct ConstantSink {
    double k0 = 0.0;
};

/// k(t) = alpha * t, alpha in length/time^2.
struct LinearSink {
    double alpha = 0.0;
};

/// k(t) = alpha / t, alpha a length. Requires an initial condition that
/// vanishes at the origin (enforced by validate_problem).
struct InverseTimeSink {
    double alpha = 0.0;
};

/// k(t) = beta * exp(-decay * t).
struct ExponentialSink {
    double beta = 0.0;
    double decay = 0.0;
};

/// Piecewise-linear table of (t, k) knots; clamped to the end values
/// outside the covered range.
struct TabulatedSink {
    std::vector<double> times;
    std::vector<double> rates;
};

using SinkModel = std::variant<ZeroSink, ConstantSink, LinearSink, InverseTimeSink,
                               ExponentialSink, TabulatedSink>;

// ---------------------------------------------------------------------------
// Initial conditions, unit total mass.

/// P(x,0) = delta(x - x0). No pointwise density; callers use the analytic
/// convolutions instead.
struct DeltaAt {
    double x0 = 0.0;
};

struct GaussianIc {
    double center = 0.0;
    double width = 1.0;
};

/// Piecewise-linear density on a knot grid, trapezoid-normalized at
/// construction (use tabulated_ic below).
struct TabulatedIc {
    std::vector<double> xs;
    std::vector<double> densities;
};

using InitialCondition = std::variant<DeltaAt, GaussianIc, TabulatedIc>;

/// Builds a TabulatedIc with the densities rescaled to unit trapezoid mass.
inline TabulatedIc tabulated_ic(std::vector<double> xs, std::vector<double> densities) {
    if (xs.size() != densities.size() || xs.size() < 2)
        throw std::invalid_argument("tabulated_ic: need matching knot/density arrays of size >= 2");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1]))
            throw std::invalid_argument("tabulated_ic: knot positions must be strictly increasing");
    double mass = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (densities[i] < 0.0 || densities[i - 1] < 0.0)
            throw std::invalid_argument("tabulated_ic: densities must be >= 0");
        mass += 0.5 * (densities[i] + densities[i - 1]) * (xs[i] - xs[i - 1]);
    }
    if (!(mass > 0.0)) throw std::invalid_argument("tabulated_ic: total mass must be positive");
    for (auto& d : densities) d /= mass;
    return TabulatedIc{std::move(xs), std::move(densities)};
}

// ---------------------------------------------------------------------------

struct Problem {
    double diffusion = 1.0;  // D > 0, length^2/time
    SinkModel sink = ZeroSink{};
    InitialCondition ic = DeltaAt{-1.0};
};

/// Uniform time grid t_n = n * t_max / n_steps, n = 0..n_steps.
struct TimeGrid {
    double t_max = 1.0;
    int n_steps = 2;

    double step() const { return t_max / n_steps; }
    double node(int n) const { return n * step(); }
    int n_nodes() const { return n_steps + 1; }
};

/// Uniform symmetric space grid on [-L, L]; n_points odd so x = 0 is a node.
struct SpaceGrid {
    double half_width = 1.0;
    int n_points = 3;

    double spacing() const { return 2.0 * half_width / (n_points - 1); }
    double node(int i) const { return -half_width + i * spacing(); }
    int origin_index() const { return (n_points - 1) / 2; }
};

// ---------------------------------------------------------------------------
// Operations

/// k(t) for the given sink law. t must be > 0 for InverseTime, >= 0 otherwise.
inline double evaluate_sink(const SinkModel& sink, double t) {
    if (!(t >= 0.0)) throw std::domain_error("evaluate_sink: t must be >= 0");
    return std::visit(
        [&](const auto& s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, ZeroSink>) {
                return 0.0;
            } else if constexpr (std::is_same_v<S, ConstantSink>) {
                return s.k0;
            } else if constexpr (std::is_same_v<S, LinearSink>) {
                return s.alpha * t;
            } else if constexpr (std::is_same_v<S, InverseTimeSink>) {
                if (t == 0.0) throw std::domain_error("evaluate_sink: inverse-time sink undefined at t = 0");
                return s.alpha / t;
            } else if constexpr (std::is_same_v<S, ExponentialSink>) {
                return s.beta * std::exp(-s.decay * t);
            } else {
                if (s.times.empty()) return 0.0;
                if (t <= s.times.front()) return s.rates.front();
                if (t >= s.times.back()) return s.rates.back();
                const auto it = std::upper_bound(s.times.begin(), s.times.end(), t);
                const std::size_t i = static_cast<std::size_t>(it - s.times.begin());
                const double t0 = s.times[i - 1], t1 = s.times[i];
                const double w = (t - t0) / (t1 - t0);
                return s.rates[i - 1] * (1.0 - w) + s.rates[i] * w;
            }
        },
        sink);
}

/// Pointwise initial density. DeltaAt has none; asking for it is an error.
inline double evaluate_ic(const InitialCondition& ic, double x) {
    return std::visit(
        [&](const auto& c) -> double {
            using C = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<C, DeltaAt>) {
                throw std::invalid_argument(
                    "evaluate_ic: a point mass has no pointwise density; use its analytic convolutions");
            } else if constexpr (std::is_same_v<C, GaussianIc>) {
                const double u = (x - c.center) / c.width;
                return std::exp(-0.5 * u * u) / (c.width * std::sqrt(2.0 * detail::pi));
            } else {
                if (x <= c.xs.front() || x >= c.xs.back()) {
                    // exact endpoints still interpolate; beyond the table the density is 0
                    if (x == c.xs.front()) return c.densities.front();
                    if (x == c.xs.back()) return c.densities.back();
                    return 0.0;
                }
                const auto it = std::upper_bound(c.xs.begin(), c.xs.end(), x);
                const std::size_t i = static_cast<std::size_t>(it - c.xs.begin());
                const double w = (x - c.xs[i - 1]) / (c.xs[i] - c.xs[i - 1]);
                return c.densities[i - 1] * (1.0 - w) + c.densities[i] * w;
            }
        },
        ic);
}

namespace detail {

/// int_a^b (p + q u) N(u; mean, sd^2) du, exact via erf.
inline double gauss_linear_segment(double a, double b, double mean, double sd, double p, double q) {
    const double inv = 1.0 / (sd * std::sqrt(2.0));
    const double alpha = (a - mean) * inv, beta = (b - mean) * inv;
    const double dphi_cdf = 0.5 * (erf(beta) - erf(alpha));
    const double pdf_a = std::exp(-alpha * alpha) / (sd * std::sqrt(2.0 * pi));
    const double pdf_b = std::exp(-beta * beta) / (sd * std::sqrt(2.0 * pi));
    // E[(p + qU) 1_{a<U<b}] with U ~ N(mean, sd^2)
    return p * dphi_cdf + q * (mean * dphi_cdf - sd * sd * (pdf_b - pdf_a));
}

}  // namespace detail

/// Free heat-kernel evolution of the initial condition: P_free(x, t) with
/// k == 0. At t = 0 this is the initial density itself (infinite exactly at
/// a point mass's location).
inline double free_density(const InitialCondition& ic, double diffusion, double x, double t) {
    if (!(t >= 0.0)) throw std::domain_error("free_density: t must be >= 0");
    if (!(diffusion > 0.0)) throw std::domain_error("free_density: diffusion must be > 0");
    return std::visit(
        [&](const auto& c) -> double {
            using C = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<C, DeltaAt>) {
                if (t == 0.0)
                    return x == c.x0 ? std::numeric_limits<double>::infinity() : 0.0;
                const double u = x - c.x0;
                return std::exp(-u * u / (4.0 * diffusion * t)) / std::sqrt(4.0 * detail::pi * diffusion * t);
            } else if constexpr (std::is_same_v<C, GaussianIc>) {
                const double var = c.width * c.width + 2.0 * diffusion * t;
                const double u = x - c.center;
                return std::exp(-0.5 * u * u / var) / std::sqrt(2.0 * detail::pi * var);
            } else {
                if (t == 0.0) return evaluate_ic(ic, x);
                // exact segment-by-segment convolution of the piecewise-linear
                // density with the Gaussian kernel
                const double sd = std::sqrt(2.0 * diffusion * t);
                double sum = 0.0;
                for (std::size_t i = 1; i < c.xs.size(); ++i) {
                    const double x0 = c.xs[i - 1], x1 = c.xs[i];
                    const double d0 = c.densities[i - 1], d1 = c.densities[i];
                    const double slope = (d1 - d0) / (x1 - x0);
                    // density on [x0,x1]: d0 + slope*(u - x0)
                    sum += detail::gauss_linear_segment(x0, x1, x, sd, d0 - slope * x0, slope);
                }
                return sum;
            }
        },
        ic);
}

// ---------------------------------------------------------------------------
// Validation

enum class ValidationCode {
    diffusion_not_positive,
    sink_negative_strength,
    sink_decay_not_positive,
    sink_table_empty,
    sink_table_mismatched,
    sink_knots_not_increasing,
    sink_negative_value,
    ic_width_not_positive,
    ic_negative_density,
    ic_mass_not_unit,
    inverse_time_ic_at_origin,
};

struct ValidationIssue {
    ValidationCode code;
    std::string message;
};

inline const char* validation_code_name(ValidationCode c) {
    switch (c) {
        case ValidationCode::diffusion_not_positive: return "diffusion_not_positive";
        case ValidationCode::sink_negative_strength: return "sink_negative_strength";
        case ValidationCode::sink_decay_not_positive: return "sink_decay_not_positive";
        case ValidationCode::sink_table_empty: return "sink_table_empty";
        case ValidationCode::sink_table_mismatched: return "sink_table_mismatched";
        case ValidationCode::sink_knots_not_increasing: return "sink_knots_not_increasing";
        case ValidationCode::sink_negative_value: return "sink_negative_value";
        case ValidationCode::ic_width_not_positive: return "ic_width_not_positive";
        case ValidationCode::ic_negative_density: return "ic_negative_density";
        case ValidationCode::ic_mass_not_unit: return "ic_mass_not_unit";
        case ValidationCode::inverse_time_ic_at_origin: return "inverse_time_ic_at_origin";
    }
    return "unknown";
}

/// Checks every type invariant plus the inverse-time restriction that the
/// initial density vanishes at the origin. Empty result means valid.
inline std::vector<ValidationIssue> validate_problem(const Problem& p) {
    std::vector<ValidationIssue> issues;
    auto add = [&](ValidationCode code, std::string msg) {
        issues.push_back({code, std::move(msg)});
    };

    if (!(p.diffusion > 0.0))
        add(ValidationCode::diffusion_not_positive, "diffusion coefficient must be > 0");

    std::visit(
        [&](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, ConstantSink>) {
                if (!(s.k0 >= 0.0)) add(ValidationCode::sink_negative_strength, "constant sink k0 must be >= 0");
            } else if constexpr (std::is_same_v<S, LinearSink>) {
                if (!(s.alpha >= 0.0)) add(ValidationCode::sink_negative_strength, "linear sink alpha must be >= 0");
            } else if constexpr (std::is_same_v<S, InverseTimeSink>) {
                if (!(s.alpha >= 0.0)) add(ValidationCode::sink_negative_strength, "inverse-time sink alpha must be >= 0");
            } else if constexpr (std::is_same_v<S, ExponentialSink>) {
                if (!(s.beta >= 0.0)) add(ValidationCode::sink_negative_strength, "exponential sink beta must be >= 0");
                if (!(s.decay > 0.0)) add(ValidationCode::sink_decay_not_positive, "exponential sink decay must be > 0");
            } else if constexpr (std::is_same_v<S, TabulatedSink>) {
                if (s.times.empty()) {
                    add(ValidationCode::sink_table_empty, "tabulated sink has no knots");
                } else if (s.times.size() != s.rates.size()) {
                    add(ValidationCode::sink_table_mismatched, "tabulated sink knot/rate arrays differ in size");
                } else {
                    for (std::size_t i = 1; i < s.times.size(); ++i)
                        if (!(s.times[i] > s.times[i - 1])) {
                            add(ValidationCode::sink_knots_not_increasing, "tabulated sink knot times must be strictly increasing");
                            break;
                        }
                    for (double k : s.rates)
                        if (!(k >= 0.0)) {
                            add(ValidationCode::sink_negative_value, "tabulated sink values must be >= 0");
                            break;
                        }
                }
            }
        },
        p.sink);

    std::visit(
        [&](const auto& c) {
            using C = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<C, GaussianIc>) {
                if (!(c.width > 0.0)) add(ValidationCode::ic_width_not_positive, "gaussian width must be > 0");
            } else if constexpr (std::is_same_v<C, TabulatedIc>) {
                for (double d : c.densities)
                    if (!(d >= 0.0)) {
                        add(ValidationCode::ic_negative_density, "tabulated densities must be >= 0");
                        break;
                    }
                double mass = 0.0;
                for (std::size_t i = 1; i < c.xs.size(); ++i)
                    mass += 0.5 * (c.densities[i] + c.densities[i - 1]) * (c.xs[i] - c.xs[i - 1]);
                if (std::abs(mass - 1.0) > 1e-12)
                    add(ValidationCode::ic_mass_not_unit, "tabulated initial density must have unit trapezoid mass");
            }
        },
        p.ic);

    if (std::holds_alternative<InverseTimeSink>(p.sink)) {
        std::visit(
            [&](const auto& c) {
                using C = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<C, DeltaAt>) {
                    if (c.x0 == 0.0)
                        add(ValidationCode::inverse_time_ic_at_origin,
                            "inverse-time sink requires a point mass away from the origin");
                } else if constexpr (std::is_same_v<C, GaussianIc>) {
                    // |center| >= 8 width keeps the origin density below 1e-14 of the peak
                    if (c.width > 0.0 && std::abs(c.center) < 8.0 * c.width)
                        add(ValidationCode::inverse_time_ic_at_origin,
                            "inverse-time sink requires |center| >= 8 width so the density vanishes at the origin");
                } else {
                    double peak = 0.0;
                    for (double d : c.densities) peak = std::max(peak, d);
                    if (evaluate_ic(InitialCondition{c}, 0.0) > 1e-12 * peak)
                        add(ValidationCode::inverse_time_ic_at_origin,
                            "inverse-time sink requires an initial density that vanishes at the origin");
                }
            },
            p.ic);
    }

    return issues;
}

/// Throws std::invalid_argument listing the violated rules; returns p otherwise.
inline const Problem& require_valid(const Problem& p) {
    const auto issues = validate_problem(p);
    if (issues.empty()) return p;
    std::string msg = "invalid problem:";
    for (const auto& issue : issues) {
        msg += " [";
        msg += validation_code_name(issue.code);
        msg += "] ";
        msg += issue.message;
        msg += ";";
    }
    throw std::invalid_argument(msg);
}

}  // namespace sinkdiff
