#pragma once

// Laplace-domain machinery. The transform of the origin equation is
//
//   Pbar(0,s) = F(s) - L[k P(0,.)](s) / sqrt(s D),
//
// with F(s) the transform of the free forcing. Three sink laws admit a
// usable Laplace-domain form: constant (algebraic), linear in t (first-order
// ODE in s, solved as a decaying integral), and exponential in t (shift
// identity, iterated into a series). Inversion back to the time domain is
// numerical, by the fixed Talbot contour or the de Hoog rational scheme.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "sinkdiff/model.hpp"
#include "sinkdiff/quadrature.hpp"

namespace sinkdiff {

using Complex = std::complex<double>;

enum class TransformMethod { direct, ode_integral, series };

/// One Laplace-domain evaluation Pbar(0,s) (or F(s)); real s > 0 gives a
/// real value up to rounding.
struct TransformValue {
    Complex s;
    Complex value;
    TransformMethod method = TransformMethod::direct;
    int terms = 1;
};

/// Quadrature failed to reach the requested tolerance; carries the achieved
/// error estimate.
struct accuracy_error : std::runtime_error {
    double achieved;
    accuracy_error(const std::string& msg, double est) : std::runtime_error(msg), achieved(est) {}
};

/// Series truncation cap exceeded.
struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// The transforms are analytic off the closed negative real axis; the Talbot
// inversion contour legitimately visits Re(s) < 0 with Im(s) != 0.
inline void check_off_branch_cut(Complex s) {
    if (s.imag() == 0.0 && !(s.real() > 0.0))
        throw std::domain_error("laplace transform: s must lie off the negative real axis");
}

inline void check_right_half_plane(Complex s) {
    if (!(s.real() > 0.0))
        throw std::domain_error("laplace transform: Re(s) must be > 0");
}

// int_a^b (p + r u) exp(-q|u|) du for a segment that does not straddle 0.
inline Complex exp_linear_segment(double a, double b, Complex q, double p, double r) {
    if (a > b) return -exp_linear_segment(b, a, q, p, r);
    const bool negative_side = b <= 0.0;
    if (negative_side) {
        // substitute u -> -u: int_{-b}^{-a} (p - r u) exp(-q u) du
        return exp_linear_segment(-b, -a, q, p, -r);
    }
    // antiderivatives on u >= 0: int e^{-qu} = -e^{-qu}/q,
    // int u e^{-qu} = -e^{-qu}(u/q + 1/q^2)
    const Complex ea = std::exp(-q * a), eb = std::exp(-q * b);
    const Complex i0 = (ea - eb) / q;
    const Complex i1 = ea * (a / q + 1.0 / (q * q)) - eb * (b / q + 1.0 / (q * q));
    return p * i0 + r * i1;
}

}  // namespace detail

/// F(s) = (1/(2 sqrt(s D))) int exp(-sqrt(s/D)|x'|) P(x',0) dx'.
/// Closed form for a point mass; exact segment integrals for tabulated
/// densities; adaptive quadrature for the Gaussian.
inline TransformValue forcing_transform(const Problem& p, Complex s) {
    detail::check_off_branch_cut(s);
    const double D = p.diffusion;
    const Complex q = std::sqrt(s / D);
    const Complex prefactor = 1.0 / (2.0 * std::sqrt(s * D));
    const Complex integral = std::visit(
        [&](const auto& c) -> Complex {
            using C = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<C, DeltaAt>) {
                return std::exp(-q * std::abs(c.x0));
            } else if constexpr (std::is_same_v<C, GaussianIc>) {
                auto f = [&](double x) -> Complex {
                    const double u = (x - c.center) / c.width;
                    const double rho =
                        std::exp(-0.5 * u * u) / (c.width * std::sqrt(2.0 * detail::pi));
                    return std::exp(-q * std::abs(x)) * rho;
                };
                const double lo = c.center - 12.0 * c.width;
                const double hi = c.center + 12.0 * c.width;
                Complex total = 0.0;
                if (lo < 0.0 && hi > 0.0) {
                    total = adaptive_simpson(f, lo, 0.0, 1e-13) +
                            adaptive_simpson(f, 0.0, hi, 1e-13);
                } else {
                    total = adaptive_simpson(f, lo, hi, 1e-13);
                }
                return total;
            } else {
                Complex total = 0.0;
                for (std::size_t i = 1; i < c.xs.size(); ++i) {
                    const double x0 = c.xs[i - 1], x1 = c.xs[i];
                    const double d0 = c.densities[i - 1], d1 = c.densities[i];
                    const double slope = (d1 - d0) / (x1 - x0);
                    const double off = d0 - slope * x0;
                    if (x0 < 0.0 && x1 > 0.0) {
                        total += detail::exp_linear_segment(x0, 0.0, q, off, slope);
                        total += detail::exp_linear_segment(0.0, x1, q, off, slope);
                    } else {
                        total += detail::exp_linear_segment(x0, x1, q, off, slope);
                    }
                }
                return total;
            }
        },
        p.ic);
    return {s, prefactor * integral, TransformMethod::direct, 1};
}

/// Constant sink: Pbar(0,s) = F(s) sqrt(sD)/(sqrt(sD) + k0).
inline TransformValue constant_sink_transform(const Problem& p, Complex s) {
    const auto* sink = std::get_if<ConstantSink>(&p.sink);
    if (!sink) throw std::invalid_argument("constant_sink_transform: sink is not constant");
    const auto f = forcing_transform(p, s);
    const Complex root = std::sqrt(s * p.diffusion);
    return {s, f.value * root / (root + sink->k0), TransformMethod::direct, 1};
}

/// Linear sink k(t) = alpha t. The transform satisfies
///   dPbar/ds = (sqrt(sD)/alpha) (Pbar - F),
/// whose decaying solution is
///   Pbar(0,s) = (sqrt(D)/alpha) int_s^inf sqrt(s') F(s')
///                 exp(-(2 sqrt(D)/(3 alpha))(s'^{3/2} - s^{3/2})) ds'.
/// Substituting v = (2 sqrt(D)/(3 alpha))(s'^{3/2} - s^{3/2}) turns this into
///   Pbar(0,s) = int_0^inf F((s^{3/2} + v/lambda)^{2/3}) e^{-v} dv,
/// lambda = 2 sqrt(D)/(3 alpha), which is evaluated by adaptive quadrature.
inline TransformValue linear_sink_transform(const Problem& p, Complex s) {
    detail::check_right_half_plane(s);
    const auto* sink = std::get_if<LinearSink>(&p.sink);
    if (!sink) throw std::invalid_argument("linear_sink_transform: sink is not linear");
    if (!(sink->alpha > 0.0))
        throw std::domain_error("linear_sink_transform: alpha must be > 0");

    const double lambda = 2.0 * std::sqrt(p.diffusion) / (3.0 * sink->alpha);
    const Complex s32 = std::pow(s, 1.5);
    auto integrand = [&](double v) -> Complex {
        const Complex sp = std::pow(s32 + v / lambda, 2.0 / 3.0);
        return forcing_transform(p, sp).value * std::exp(-v);
    };
    // e^{-45} ~ 3e-20 bounds the truncated tail relative to the v=0 scale
    const auto quad = adaptive_gauss(integrand, 0.0, 45.0, 1e-12);
    if (!quad.converged)
        throw accuracy_error("linear_sink_transform: quadrature did not converge",
                             quad.error_estimate);
    return {s, quad.value, TransformMethod::ode_integral, 1};
}

/// Exponential sink k(t) = beta exp(-decay t). Iterating the shift identity
/// L[e^{-at} f](s) = L[f](s + a) gives
///   Pbar(0,s) = sum_n (-beta)^n F(s + n decay)
///                 prod_{j<n} (D (s + j decay))^{-1/2},
/// truncated when the next term falls below tol * |partial sum|. The result
/// satisfies Pbar(0,s) = F(s) - (beta/sqrt(sD)) Pbar(0,s+decay).
inline TransformValue exponential_sink_series(const Problem& p, Complex s, double tol) {
    detail::check_off_branch_cut(s);
    const auto* sink = std::get_if<ExponentialSink>(&p.sink);
    if (!sink) throw std::invalid_argument("exponential_sink_series: sink is not exponential");
    if (!(sink->decay > 0.0))
        throw std::domain_error("exponential_sink_series: decay must be > 0");
    if (!(sink->beta >= 0.0))
        throw std::domain_error("exponential_sink_series: beta must be >= 0");

    constexpr int term_cap = 200;
    Complex sum = 0.0;
    Complex prefactor = 1.0;  // (-beta)^n prod_{j<n} (D(s + j decay))^{-1/2}
    int n = 0;
    for (; n < term_cap; ++n) {
        const Complex shifted = s + static_cast<double>(n) * sink->decay;
        const Complex term = prefactor * forcing_transform(p, shifted).value;
        sum += term;
        if (n >= 1 && std::abs(term) < tol * std::abs(sum))
            return {s, sum, TransformMethod::series, n + 1};
        if (sink->beta == 0.0) return {s, sum, TransformMethod::series, 1};
        prefactor *= -sink->beta / std::sqrt(p.diffusion * shifted);
    }
    throw convergence_error("exponential_sink_series: term cap exceeded");
}

// ---------------------------------------------------------------------------
// Numerical inversion

enum class InversionAlgorithm { talbot, de_hoog };

struct InversionSpec {
    InversionAlgorithm algorithm = InversionAlgorithm::talbot;
    std::vector<double> times;
    double accuracy = 1e-8;   // requested relative accuracy, in [1e-12, 1e-2]
    int talbot_points = 32;   // main contour; the coarse one uses 3/4 of it
    int de_hoog_terms = 40;   // M; uses 2M+1 transform evaluations
};

struct InversionPoint {
    double time = 0.0;
    double value = 0.0;
    double error_estimate = 0.0;
    /// False when the estimate exceeds the requested accuracy; the value and
    /// estimate are still the best available.
    bool within_accuracy = true;
};

namespace detail {

// Fixed-Talbot evaluation with M nodes (Abate-Valko contour
// s(theta) = r theta (cot theta + i), r = 2M/(5t)).
template <class F>
double talbot_eval(const F& fhat, double t, int M, double* roundoff_scale) {
    const double r = 2.0 * M / (5.0 * t);
    double sum = 0.5 * std::exp(r * t) * fhat(Complex(r, 0.0)).real();
    double magnitude = std::abs(sum);
    for (int k = 1; k < M; ++k) {
        const double theta = k * pi / M;
        const double cot = std::cos(theta) / std::sin(theta);
        const Complex s(r * theta * cot, r * theta);
        const double sigma = theta + (theta * cot - 1.0) * cot;
        const Complex term = std::exp(t * s) * fhat(s) * Complex(1.0, sigma);
        sum += term.real();
        magnitude = std::max(magnitude, std::abs(term));
    }
    if (roundoff_scale) *roundoff_scale = magnitude * r / M;
    return sum * r / M;
}

// de Hoog, Knight, Stokes: Fourier-series inversion accelerated by the
// quotient-difference continued fraction, with the remainder-improved last
// convergent. Returns the improved value plus the plain convergents at
// depths 2M and 2M-2 for error estimation.
template <class F>
void de_hoog_eval(const F& fhat, double t, int M, double& value, double& estimate) {
    const double T = 2.0 * t;
    const double gamma = -std::log(1e-13) / (2.0 * T);
    const int n_coef = 2 * M + 1;

    std::vector<Complex> c(n_coef);
    double coef_scale = 0.0;
    for (int k = 0; k < n_coef; ++k) {
        c[k] = fhat(Complex(gamma, k * pi / T));
        coef_scale += std::abs(c[k]);
    }
    c[0] *= 0.5;

    // quotient-difference tables
    std::vector<std::vector<Complex>> q(M + 1, std::vector<Complex>(n_coef));
    std::vector<std::vector<Complex>> e(M + 1, std::vector<Complex>(n_coef));
    for (int j = 0; j < n_coef - 1; ++j)
        q[1][j] = c[j + 1] / c[j];
    for (int rr = 1; rr <= M; ++rr) {
        for (int j = 0; j <= 2 * (M - rr); ++j)
            e[rr][j] = q[rr][j + 1] - q[rr][j] + e[rr - 1][j + 1];
        if (rr < M)
            for (int j = 0; j < 2 * (M - rr); ++j)
                q[rr + 1][j] = q[rr][j + 1] * e[rr][j + 1] / e[rr][j];
    }
    std::vector<Complex> d(2 * M + 1);
    d[0] = c[0];
    for (int rr = 1; rr <= M; ++rr) {
        d[2 * rr - 1] = -q[rr][0];
        d[2 * rr] = -e[rr][0];
    }

    const Complex z = std::exp(Complex(0.0, pi * t / T));
    Complex a_prev2 = 0.0, b_prev2 = 1.0;  // A_{-1}, B_{-1}
    Complex a_prev = d[0], b_prev = 1.0;   // A_0, B_0
    Complex conv_2m = 0.0, conv_2m_minus = 0.0;
    for (int nn = 1; nn <= 2 * M; ++nn) {
        Complex a_cur = a_prev + d[nn] * z * a_prev2;
        Complex b_cur = b_prev + d[nn] * z * b_prev2;
        if (nn == 2 * M - 2) conv_2m_minus = a_cur / b_cur;
        if (nn == 2 * M) {
            conv_2m = a_cur / b_cur;
            // remainder-improved last step
            const Complex h2m = 0.5 * (1.0 + z * (d[2 * M - 1] - d[2 * M]));
            const Complex r2m = -h2m * (1.0 - std::sqrt(1.0 + z * d[2 * M] / (h2m * h2m)));
            const Complex a_imp = a_prev + r2m * a_prev2;
            const Complex b_imp = b_prev + r2m * b_prev2;
            a_cur = a_imp;
            b_cur = b_imp;
            const double factor = std::exp(gamma * t) / T;
            const double improved = factor * (a_cur / b_cur).real();
            const double plain = factor * conv_2m.real();
            const double prev = factor * conv_2m_minus.real();
            value = improved;
            const double floor = 20.0 * 2.22e-16 * factor * coef_scale;
            estimate = std::max({2.0 * std::abs(plain - prev), 2.0 * std::abs(improved - plain),
                                 floor});
            return;
        }
        // keep the recurrence scaled
        const double scale = std::abs(b_cur);
        if (scale > 1e100) {
            a_cur /= scale;
            b_cur /= scale;
            a_prev /= scale;
            b_prev /= scale;
        }
        a_prev2 = a_prev;
        b_prev2 = b_prev;
        a_prev = a_cur;
        b_prev = b_cur;
    }
}

}  // namespace detail

/// Inverts a Laplace-domain evaluator at the requested times. Every point
/// carries an error estimate (Talbot: two-contour agreement; de Hoog:
/// convergent agreement); points whose estimate exceeds the requested
/// accuracy are flagged rather than dropped.
template <class F>
std::vector<InversionPoint> invert(F&& transform, const InversionSpec& spec) {
    if (!(spec.accuracy >= 1e-12 && spec.accuracy <= 1e-2))
        throw std::domain_error("invert: requested accuracy must lie in [1e-12, 1e-2]");
    for (double t : spec.times)
        if (!(t > 0.0)) throw std::domain_error("invert: target times must be > 0");

    std::vector<InversionPoint> out;
    out.reserve(spec.times.size());
    for (double t : spec.times) {
        InversionPoint pt;
        pt.time = t;
        if (spec.algorithm == InversionAlgorithm::talbot) {
            const int m_hi = spec.talbot_points;
            const int m_lo = std::max(8, (3 * m_hi) / 4);
            double scale_hi = 0.0;
            const double hi = detail::talbot_eval(transform, t, m_hi, &scale_hi);
            const double lo = detail::talbot_eval(transform, t, m_lo, nullptr);
            pt.value = hi;
            pt.error_estimate =
                std::max(2.0 * std::abs(hi - lo), 50.0 * 2.22e-16 * scale_hi);
        } else {
            detail::de_hoog_eval(transform, t, spec.de_hoog_terms, pt.value, pt.error_estimate);
        }
        pt.within_accuracy =
            pt.error_estimate <= spec.accuracy * std::max(std::abs(pt.value), 1e-300);
        out.push_back(pt);
    }
    return out;
}

}  // namespace sinkdiff
