#pragma once

// Real error-function family used by the closed-form propagators.
//
// erfcx is the workhorse: the constant-sink propagator contains products of
// the form exp(large) * erfc(large) that overflow long before the propagator
// itself becomes small, so every caller goes through the scaled complement.

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sinkdiff {

namespace detail {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double sqrt_pi = 1.7724538509055160273;

// Nodes and weights of the 64-point Gauss-Legendre rule on [-1, 1],
// generated once by Newton iteration on P_64.
struct GaussLegendre64 {
    std::array<double, 64> node{};
    std::array<double, 64> weight{};
};

inline const GaussLegendre64& gl64() {
    static const GaussLegendre64 rule = [] {
        GaussLegendre64 r;
        const int n = 64;
        for (int i = 0; i < n / 2; ++i) {
            double x = std::cos(pi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 64; ++iter) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
                }
                dp = n * (x * p0 - p1) / (x * x - 1.0);
                const double dx = p0 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            r.node[i] = -x;
            r.node[n - 1 - i] = x;
            r.weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
            r.weight[n - 1 - i] = r.weight[i];
        }
        return r;
    }();
    return rule;
}

// erfcx(z) * sqrt(pi) via the Laplace continued fraction
//   1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))),
// evaluated with the modified Lentz scheme. Accurate for z >= ~5.
inline double erfcx_cf(double z) {
    constexpr double tiny = 1e-300;
    double f = tiny, c = tiny, d = 0.0;
    for (int n = 1; n < 500; ++n) {
        const double a = (n == 1) ? 1.0 : 0.5 * (n - 1);
        d = z + a * d;
        if (d == 0.0) d = tiny;
        c = z + a / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-17) break;
    }
    return f / sqrt_pi;
}

// erfcx(z) = (2/sqrt(pi)) * int_0^inf exp(-2 z u - u^2) du for z >= 0.
// The integrand drops below 1e-27 at u = 8 for every z >= 0, and the
// 64-point rule resolves the decay fully for z <= ~8.
inline double erfcx_integral(double z) {
    const auto& rule = gl64();
    constexpr double upper = 8.0;
    const double mid = 0.5 * upper, half = 0.5 * upper;
    double sum = 0.0;
    for (int i = 0; i < 64; ++i) {
        const double u = mid + half * rule.node[i];
        sum += rule.weight[i] * std::exp(-u * (2.0 * z + u));
    }
    return sum * half * 2.0 / sqrt_pi;
}

}  // namespace detail

/// Scaled complementary error function exp(z^2) erfc(z) for z >= 0.
/// Stays finite for arbitrarily large arguments (erfcx(z) ~ 1/(z sqrt(pi))).
inline double erfcx(double z) {
    if (!(z >= 0.0))
        throw std::domain_error("erfcx: argument must be finite and >= 0");
    if (z < 6.0) return detail::erfcx_integral(z);
    return detail::erfcx_cf(z);
}

/// Complementary error function. Underflows to zero for z > ~26.6,
/// where the true value drops below the smallest double.
inline double erfc(double z) {
    if (!std::isfinite(z))
        throw std::domain_error("erfc: argument must be finite");
    if (z >= 0.0) return std::exp(-z * z) * erfcx(z);
    return 2.0 - std::exp(-z * z) * erfcx(-z);
}

/// Error function; Maclaurin series near zero, 1 - erfc elsewhere.
inline double erf(double z) {
    if (!std::isfinite(z))
        throw std::domain_error("erf: argument must be finite");
    const double az = std::abs(z);
    if (az < 0.5) {
        const double z2 = z * z;
        double term = z, sum = z;
        for (int n = 1; n < 30; ++n) {
            term *= -z2 / n;
            const double add = term / (2.0 * n + 1.0);
            sum += add;
            if (std::abs(add) < 1e-18 * std::abs(sum)) break;
        }
        return sum * 2.0 / detail::sqrt_pi;
    }
    return z > 0.0 ? 1.0 - erfc(z) : erfc(-z) - 1.0;
}

}  // namespace sinkdiff
