#pragma once

// Small quadrature toolbox shared by the Laplace-domain evaluators and the
// tabulated-data paths: cached Gauss-Legendre rules, a panel-adaptive Gauss
// scheme with an error estimate, and a recursive adaptive Simpson rule.

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

namespace sinkdiff {

struct GaussRule {
    std::vector<double> node;    // on [-1, 1]
    std::vector<double> weight;
};

/// n-point Gauss-Legendre rule on [-1, 1]; computed once and cached.
inline const GaussRule& gauss_legendre(int n) {
    static std::map<int, GaussRule> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    if (n < 1) throw std::domain_error("gauss_legendre: order must be >= 1");

    GaussRule r;
    r.node.resize(n);
    r.weight.resize(n);
    constexpr double pi = 3.14159265358979323846;
    for (int i = 0; i < (n + 1) / 2; ++i) {
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
    return cache.emplace(n, std::move(r)).first->second;
}

template <class F>
auto integrate_gauss(F&& f, double a, double b, int n) {
    const auto& rule = gauss_legendre(n);
    using T = std::invoke_result_t<F&, double>;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    T sum{};
    for (int i = 0; i < n; ++i) sum += rule.weight[i] * f(mid + half * rule.node[i]);
    return T(sum * half);
}

template <class T>
struct QuadratureResult {
    T value{};
    double error_estimate = 0.0;
    bool converged = true;
};

/// Panel-adaptive Gauss quadrature: each panel is accepted when the 16- and
/// 32-point values agree, otherwise bisected. The returned estimate is the
/// sum of the accepted panel discrepancies.
template <class F, class T = std::invoke_result_t<F&, double>>
QuadratureResult<T> adaptive_gauss(F&& f, double a, double b, double rtol,
                                   double atol = 0.0, int max_depth = 14) {
    struct Panel {
        double a, b;
        int depth;
    };
    QuadratureResult<T> out;
    // First sweep fixes the tolerance scale.
    const T coarse = integrate_gauss(f, a, b, 32);
    const double scale = std::abs(coarse);

    std::vector<Panel> stack{{a, b, 0}};
    T total{};
    double err = 0.0;
    bool ok = true;
    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        const T lo = integrate_gauss(f, p.a, p.b, 16);
        const T hi = integrate_gauss(f, p.a, p.b, 32);
        const double disc = std::abs(hi - lo);
        if (disc <= std::max(atol, rtol * scale) * 0.5 || p.depth >= max_depth) {
            if (disc > std::max(atol, rtol * scale) * 0.5) ok = false;
            total += hi;
            err += disc;
        } else {
            const double m = 0.5 * (p.a + p.b);
            stack.push_back({p.a, m, p.depth + 1});
            stack.push_back({m, p.b, p.depth + 1});
        }
    }
    out.value = total;
    out.error_estimate = err;
    out.converged = ok;
    return out;
}

namespace detail {

template <class F, class T>
T adaptive_simpson_rec(F& f, double a, double m, double b, T fa, T fm, T fb,
                       T whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const T flm = f(lm), frm = f(rm);
    const T left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const T right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const T sum = left + right;
    if (depth <= 0 || std::abs(sum - whole) <= 15.0 * tol)
        return sum + (sum - whole) / 15.0;
    return adaptive_simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

template <class F, class T = std::invoke_result_t<F&, double>>
T adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 48) {
    const double m = 0.5 * (a + b);
    const T fa = f(a), fm = f(m), fb = f(b);
    const T whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, m, b, fa, fm, fb, whole, tol, max_depth);
}

/// Trapezoid rule over uniformly spaced samples.
inline double trapezoid(const std::vector<double>& values, double spacing) {
    if (values.size() < 2) return 0.0;
    double sum = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
    return sum * spacing;
}

}  // namespace sinkdiff
