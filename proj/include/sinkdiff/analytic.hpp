#pragma once

// Closed-form propagators G(x, x', t) of the sink problem: free diffusion,
// constant sink strength, the perfectly absorbing limit, and the
// inverse-time sink. Superposition over the initial density turns any of
// them into the full solution for that sink law.

#include <cmath>
#include <stdexcept>

#include "sinkdiff/model.hpp"
#include "sinkdiff/specfun.hpp"

namespace sinkdiff {

/// Arguments of a propagator evaluation. `parameter` is k0 for the constant
/// sink and alpha for the inverse-time sink; unused otherwise.
struct PropagatorQuery {
    double x = 0.0;
    double x_src = 0.0;
    double t = 1.0;
    double diffusion = 1.0;
    double parameter = 0.0;
};

namespace detail {

inline void check_query(const PropagatorQuery& q) {
    if (!(q.t > 0.0)) throw std::domain_error("propagator: t must be > 0");
    if (!(q.diffusion > 0.0)) throw std::domain_error("propagator: diffusion must be > 0");
}

inline double heat_kernel(double u, double diffusion, double t) {
    return std::exp(-u * u / (4.0 * diffusion * t)) / std::sqrt(4.0 * pi * diffusion * t);
}

}  // namespace detail

/// g(x - x', t): the plain heat kernel.
inline double free_propagator(const PropagatorQuery& q) {
    detail::check_query(q);
    return detail::heat_kernel(q.x - q.x_src, q.diffusion, q.t);
}

/// Constant sink k(t) = k0:
///   G = g(x-x',t) - (k0/(2D)) exp(-(|x|+|x'|)^2/(4Dt)) erfcx(z),
///   z = k0 sqrt(t/D) + (|x|+|x'|)/(2 sqrt(Dt)).
/// The erfcx form keeps the expression finite for arbitrarily large k0*t
/// where the eponymous exp * erfc product would overflow.
inline double constant_sink_propagator(const PropagatorQuery& q) {
    detail::check_query(q);
    const double k0 = q.parameter;
    if (!(k0 >= 0.0)) throw std::domain_error("constant_sink_propagator: k0 must be >= 0");
    const double D = q.diffusion, t = q.t;
    const double b = std::abs(q.x) + std::abs(q.x_src);
    const double z = k0 * std::sqrt(t / D) + b / (2.0 * std::sqrt(D * t));
    return detail::heat_kernel(q.x - q.x_src, D, t) -
           (k0 / (2.0 * D)) * std::exp(-b * b / (4.0 * D * t)) * erfcx(z);
}

/// k0 -> infinity limit: the origin absorbs perfectly, and the propagator
/// reduces to the image construction g(x-x',t) - g(|x|+|x'|,t).
inline double absorbing_limit_propagator(const PropagatorQuery& q) {
    detail::check_query(q);
    const double b = std::abs(q.x) + std::abs(q.x_src);
    return detail::heat_kernel(q.x - q.x_src, q.diffusion, q.t) -
           detail::heat_kernel(b, q.diffusion, q.t);
}

/// Inverse-time sink k(t) = alpha/t (source point away from the origin):
///   G = (1/sqrt(4 pi D t)) [exp(-(x-x')^2/(4Dt))
///                           - (2a/(|x'|+2a)) exp(-(|x|+|x'|)^2/(4Dt))].
/// Satisfies D [dG/dx(0+) - dG/dx(0-)] = 2 (alpha/t) G(0,x',t) for all t.
inline double inverse_time_propagator(const PropagatorQuery& q) {
    detail::check_query(q);
    const double alpha = q.parameter;
    if (!(alpha >= 0.0)) throw std::domain_error("inverse_time_propagator: alpha must be >= 0");
    if (q.x_src == 0.0)
        throw std::domain_error("inverse_time_propagator: source must be away from the origin");
    const double b = std::abs(q.x) + std::abs(q.x_src);
    const double ratio = 2.0 * alpha / (std::abs(q.x_src) + 2.0 * alpha);
    return detail::heat_kernel(q.x - q.x_src, q.diffusion, q.t) -
           ratio * detail::heat_kernel(b, q.diffusion, q.t);
}

}  // namespace sinkdiff
