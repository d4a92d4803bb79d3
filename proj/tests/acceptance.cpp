// Acceptance suite: runs every cross-validation criterion end to end and
// prints one pass/fail line per criterion. Exit status is nonzero when any
// criterion fails. Always-on checks; nothing here is compiled out.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "erf_oracle.hpp"
#include "sinkdiff/sinkdiff.hpp"

using namespace sinkdiff;

namespace {

int failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s  --  %s\n", pass ? "PASS" : "FAIL", index, name.c_str(),
                detail.c_str());
    if (!pass) ++failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

// ---------------------------------------------------------------------------

void criterion_1_zero_sink_exactness() {
    const auto start = std::chrono::steady_clock::now();
    const Problem p{1.0, ZeroSink{}, DeltaAt{-1.0}};
    const TimeGrid grid{4.0, 1024};
    const auto oh = solve_origin(p, grid);

    bool bitwise = true;
    for (int n = 0; n < grid.n_nodes(); ++n) bitwise = bitwise && oh.values[n] == oh.forcing[n];

    const SpaceGrid sgrid{12.0, 961};
    const auto snap = snapshot(p, oh, sgrid, 1.0);
    double linf = 0.0;
    for (int i = 0; i < sgrid.n_points; ++i) {
        const double x = sgrid.node(i);
        linf = std::max(linf, std::abs(snap.values[i] -
                                       std::exp(-(x + 1.0) * (x + 1.0) / 4.0) /
                                           std::sqrt(4.0 * M_PI)));
    }
    const double elapsed = seconds_since(start);
    report(1, "zero-sink exactness", bitwise && linf <= 1e-10 && elapsed < 1.0,
           "origin bitwise=" + std::string(bitwise ? "yes" : "no") + ", field Linf=" + fmt(linf) +
               " (tol 1e-10), runtime " + fmt(elapsed) + "s < 1s");
}

void criterion_2_constant_sink_closed_form() {
    const auto start = std::chrono::steady_clock::now();
    const Problem p{1.0, ConstantSink{1.0}, DeltaAt{-1.0}};
    const auto oh = solve_origin(p, {4.0, 4096});

    // max relative error over [0.01, 4], normalized by the window peak; the
    // pointwise-relative variant is also reported on [0.05, 4], away from
    // the steep edge where the uniform-grid scheme cannot resolve ratios of
    // O(1e-10) magnitudes
    double diff = 0.0, peak = 0.0, pointwise = 0.0;
    for (int n = 1; n <= 4096; ++n) {
        const double t = oh.grid.node(n);
        if (t < 0.01) continue;
        const double ref = constant_sink_propagator({0.0, -1.0, t, 1.0, 1.0});
        diff = std::max(diff, std::abs(oh.values[n] - ref));
        peak = std::max(peak, ref);
        if (t >= 0.05) pointwise = std::max(pointwise, std::abs(oh.values[n] - ref) / ref);
    }
    const double normalized = diff / peak;
    const double elapsed = seconds_since(start);
    report(2, "constant-sink closed form",
           normalized <= 1e-4 && pointwise <= 1e-4 && elapsed < 10.0,
           "rel Linf[0.01,4]=" + fmt(normalized) + ", pointwise[0.05,4]=" + fmt(pointwise) +
               " (tol 1e-4), runtime " + fmt(elapsed) + "s < 10s");
}

void criterion_3_three_way_agreement() {
    const auto start = std::chrono::steady_clock::now();
    const Problem p{1.0, ConstantSink{1.0}, DeltaAt{-1.0}};

    const FdConfig cfg{{12.0, 4801}, {1.0, 10000}, {1.0}};
    const auto fh = cn_solve(p, cfg);
    const auto& fd = fh.snapshots.at(0);

    const auto oh = solve_origin(p, {1.0, 2048});

    double va = 0.0, vf = 0.0, af = 0.0, peak = 0.0;
    for (int i = 0; i < fd.grid.n_points; ++i) {
        const double x = fd.grid.node(i);
        if (std::abs(x) > 6.0) continue;
        const double ana = constant_sink_propagator({x, -1.0, 1.0, 1.0, 1.0});
        const double vol = reconstruct(p, oh, x, 1.0);
        peak = std::max(peak, std::abs(ana));
        va = std::max(va, std::abs(vol - ana));
        vf = std::max(vf, std::abs(vol - fd.values[i]));
        af = std::max(af, std::abs(ana - fd.values[i]));
    }
    const double worst = std::max({va, vf, af}) / peak;
    const double elapsed = seconds_since(start);
    report(3, "three-way agreement, constant sink", worst <= 0.01 && elapsed < 60.0,
           "pairwise Linf/peak: vol-ana=" + fmt(va / peak) + " vol-fd=" + fmt(vf / peak) +
               " ana-fd=" + fmt(af / peak) + " (tol 0.01), runtime " + fmt(elapsed) + "s < 60s");
}

void criterion_4_inverse_time_sink() {
    const Problem p{1.0, InverseTimeSink{1.0}, DeltaAt{-1.0}};
    const auto oh = solve_origin(p, {4.0, 4096});
    double worst = 0.0;
    for (int n = 1; n <= 4096; ++n) {
        const double t = oh.grid.node(n);
        if (t < 0.05) continue;
        const double ref = inverse_time_propagator({0.0, -1.0, t, 1.0, 1.0});
        worst = std::max(worst, std::abs(oh.values[n] - ref) / ref);
    }

    // jump-condition residual of the closed form, 4th-order one-sided stencils
    double jump_worst = 0.0;
    const double h = 4e-3;
    for (double alpha : {0.5, 1.0, 2.0})
        for (double xs : {-1.0, -2.0})
            for (double t : {0.5, 1.0}) {
                auto g = [&](double x) { return inverse_time_propagator({x, xs, t, 1.0, alpha}); };
                const double right = (-25.0 * g(0.0) + 48.0 * g(h) - 36.0 * g(2 * h) +
                                      16.0 * g(3 * h) - 3.0 * g(4 * h)) /
                                     (12.0 * h);
                const double left = (25.0 * g(0.0) - 48.0 * g(-h) + 36.0 * g(-2 * h) -
                                     16.0 * g(-3 * h) + 3.0 * g(-4 * h)) /
                                    (12.0 * h);
                const double rhs = 2.0 * (alpha / t) * g(0.0);
                jump_worst = std::max(jump_worst, std::abs((right - left) - rhs) / std::abs(rhs));
            }
    report(4, "inverse-time sink closed form", worst <= 1e-3 && jump_worst <= 1e-6,
           "origin rel[0.05,4]=" + fmt(worst) + " (tol 1e-3), jump residual=" + fmt(jump_worst) +
               " (tol 1e-6)");
}

void criterion_5_linear_sink() {
    const Problem p{1.0, LinearSink{1.0}, DeltaAt{-1.0}};
    const auto oh = solve_origin(p, {4.0, 4096});
    auto ev = [&](Complex s) { return linear_sink_transform(p, s).value; };
    const std::vector<double> times{0.25, 0.5, 1.0, 2.0};
    const auto pts = invert(ev, {InversionAlgorithm::de_hoog, times, 1e-8});
    double worst = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const int n = static_cast<int>(std::lround(times[i] / oh.grid.step()));
        worst = std::max(worst, rel(pts[i].value, oh.values[n]));
    }

    // ODE residual at s = 2 by a 4th-order centered difference
    const double s = 2.0, hs = 2e-3;
    auto pb = [&](double ss) { return linear_sink_transform(p, Complex(ss, 0.0)).value.real(); };
    const double dp =
        (pb(s - 2 * hs) - 8.0 * pb(s - hs) + 8.0 * pb(s + hs) - pb(s + 2 * hs)) / (12.0 * hs);
    const double f = forcing_transform(p, Complex(s, 0.0)).value.real();
    const double value = pb(s);
    const double residual = std::abs(dp - std::sqrt(s) * (value - f)) / std::abs(value);
    report(5, "linear sink via Laplace inversion", worst <= 1e-3 && residual <= 1e-8,
           "inversion vs volterra rel=" + fmt(worst) + " (tol 1e-3), ODE residual=" +
               fmt(residual) + " (tol 1e-8)");
}

void criterion_6_exponential_sink() {
    const Problem p{1.0, ExponentialSink{1.0, 1.0}, DeltaAt{-1.0}};
    const auto oh = solve_origin(p, {4.0, 4096});
    auto ev = [&](Complex s) { return exponential_sink_series(p, s, 1e-12).value; };
    const std::vector<double> times{0.5, 1.0, 2.0};
    const auto pts = invert(ev, {InversionAlgorithm::talbot, times, 1e-8});
    double worst = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const int n = static_cast<int>(std::lround(times[i] / oh.grid.step()));
        worst = std::max(worst, rel(pts[i].value, oh.values[n]));
    }

    const double tol = 1e-10;
    const auto lhs = exponential_sink_series(p, Complex(1.0, 0.0), tol);
    const Complex rhs = forcing_transform(p, Complex(1.0, 0.0)).value -
                        exponential_sink_series(p, Complex(2.0, 0.0), tol).value;
    const double residual = std::abs(lhs.value - rhs) / std::abs(lhs.value);
    report(6, "exponential sink via shift series", worst <= 1e-3 && residual <= 2.0 * tol,
           "inversion vs volterra rel=" + fmt(worst) + " (tol 1e-3), functional residual=" +
               fmt(residual) + " (tol 2e-10)");
}

void criterion_7_probability_balance() {
    // Volterra pipeline at n_steps = 4096, half-width 12. The survival
    // integral is audited at the grid times whose snapshots pass the
    // boundary-density precondition; beyond t ~ 1 the free tail reaches
    // |x| = 12 and the survival op itself flags the truncation.
    struct Case {
        const char* name;
        SinkModel sink;
    };
    const Case cases[] = {{"zero", ZeroSink{}},
                          {"constant", ConstantSink{1.0}},
                          {"inverse_time", InverseTimeSink{1.0}},
                          {"linear", LinearSink{1.0}},
                          {"exponential", ExponentialSink{1.0, 1.0}}};
    double volterra_worst = 0.0, fd_worst = 0.0;
    int audited = 0, flagged = 0;
    bool ok = true;
    for (const auto& c : cases) {
        const Problem p{1.0, c.sink, DeltaAt{-1.0}};
        const TimeGrid grid{4.0, 4096};
        const SpaceGrid sgrid{12.0, 1921};
        const auto oh = solve_origin(p, grid);
        const auto absorbed = absorbed_flux(p, oh);
        for (int i = 1; i <= 32; ++i) {
            const int n = i * grid.n_steps / 32;
            const auto s = survival(snapshot(p, oh, sgrid, grid.node(n)));
            if (s.truncation_warning) {
                ++flagged;
                continue;
            }
            ++audited;
            volterra_worst = std::max(volterra_worst, std::abs(s.value + absorbed[n] - 1.0));
        }

        const FdConfig cfg{{12.0, 2401}, {1.0, 5000}, {}};
        const auto fh = cn_solve(p, cfg);
        for (std::size_t n = 0; n < fh.survival.size(); ++n)
            fd_worst = std::max(fd_worst, std::abs(fh.survival[n] + fh.absorbed[n] - 1.0));
    }
    ok = audited > 0 && volterra_worst <= 1e-5 && fd_worst <= 5e-3;
    report(7, "probability balance S + A = 1", ok,
           "volterra max|S+A-1|=" + fmt(volterra_worst) + " (tol 1e-5, " +
               std::to_string(audited) + " audited / " + std::to_string(flagged) +
               " truncation-flagged times), fd max=" + fmt(fd_worst) + " (tol 5e-3)");
}

void criterion_8_convergence_order() {
    const Problem p{1.0, ConstantSink{1.0}, DeltaAt{-1.0}};
    std::vector<double> errors;
    for (int n_steps : {512, 1024, 2048, 4096}) {
        const auto oh = solve_origin(p, {4.0, n_steps});
        double diff = 0.0, peak = 0.0;
        for (int n = 1; n <= n_steps; ++n) {
            const double t = oh.grid.node(n);
            if (t < 0.05) continue;
            const double ref = constant_sink_propagator({0.0, -1.0, t, 1.0, 1.0});
            diff = std::max(diff, std::abs(oh.values[n] - ref));
            peak = std::max(peak, ref);
        }
        errors.push_back(diff / peak);
    }
    double min_order = 1e300;
    std::string orders;
    for (std::size_t i = 1; i < errors.size(); ++i) {
        const double order = std::log2(errors[i - 1] / errors[i]);
        min_order = std::min(min_order, order);
        orders += (i > 1 ? ", " : "") + fmt(order);
    }
    report(8, "empirical convergence order", min_order >= 1.5,
           "orders over {512..4096}: " + orders + " (tol >= 1.5)");
}

void criterion_9_special_functions() {
    double erfc_worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double z = -6.0 + 32.0 * i / 999.0;
        erfc_worst = std::max(erfc_worst, rel(sinkdiff::erfc(z), oracle::erfc_ref(z)));
    }
    double erfcx_worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double z = 100.0 * i / 999.0;
        erfcx_worst = std::max(erfcx_worst, rel(sinkdiff::erfcx(z), oracle::erfcx_ref(z)));
    }
    const double big = sinkdiff::erfcx(1e6);
    const bool big_ok = std::isfinite(big) && rel(big, oracle::erfcx_ref(1e6)) <= 1e-12;

    // k0 sqrt(t/D) = 1e4 against the absorbing image formula
    const double strong = constant_sink_propagator({-0.5, -1.0, 1.0, 1.0, 1e4});
    const double image = absorbing_limit_propagator({-0.5, -1.0, 1.0, 1.0});
    const double strong_rel = rel(strong, image);

    report(9, "special functions and the stiff-sink regime",
           erfc_worst <= 1e-12 && erfcx_worst <= 1e-12 && big_ok && strong_rel <= 5e-3,
           "erfc sweep=" + fmt(erfc_worst) + ", erfcx sweep=" + fmt(erfcx_worst) +
               " (tol 1e-12), erfcx(1e6) ok=" + (big_ok ? std::string("yes") : std::string("no")) +
               ", k0*sqrt(t)=1e4 vs image=" + fmt(strong_rel) + " (tol 5e-3)");
}

void criterion_10_inversion_pairs() {
    auto f1 = [](Complex s) { return 1.0 / s; };
    auto f2 = [](Complex s) { return 1.0 / std::sqrt(s); };
    auto f3 = [](Complex s) { return std::exp(-std::sqrt(s)) / std::sqrt(s); };
    auto t1 = [](double) { return 1.0; };
    auto t2 = [](double t) { return 1.0 / std::sqrt(M_PI * t); };
    auto t3 = [](double t) { return std::exp(-0.25 / t) / std::sqrt(M_PI * t); };

    double worst = 0.0;
    int covered = 0, total = 0;
    for (auto alg : {InversionAlgorithm::talbot, InversionAlgorithm::de_hoog}) {
        for (double t : {0.5, 1.0, 2.0}) {
            const InversionSpec spec{alg, {t}, 1e-8};
            const auto r1 = invert(f1, spec)[0];
            const auto r2 = invert(f2, spec)[0];
            const auto r3 = invert(f3, spec)[0];
            worst = std::max({worst, rel(r1.value, t1(t)), rel(r2.value, t2(t)),
                              rel(r3.value, t3(t))});
        }
        for (int i = 0; i < 20; ++i) {
            const double t = 0.2 + 3.6 * i / 19.0;
            const InversionSpec spec{alg, {t}, 1e-8};
            const auto r1 = invert(f1, spec)[0];
            const auto r2 = invert(f2, spec)[0];
            const auto r3 = invert(f3, spec)[0];
            covered += std::abs(r1.value - t1(t)) <= r1.error_estimate;
            covered += std::abs(r2.value - t2(t)) <= r2.error_estimate;
            covered += std::abs(r3.value - t3(t)) <= r3.error_estimate;
            total += 3;
        }
    }
    const double coverage = static_cast<double>(covered) / total;
    report(10, "Laplace inversion reference pairs", worst <= 1e-8 && coverage >= 0.95,
           "worst pair error=" + fmt(worst) + " (tol 1e-8), estimate coverage=" +
               fmt(100.0 * coverage) + "% (need >= 95%)");
}

}  // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    criterion_1_zero_sink_exactness();
    criterion_2_constant_sink_closed_form();
    criterion_3_three_way_agreement();
    criterion_4_inverse_time_sink();
    criterion_5_linear_sink();
    criterion_6_exponential_sink();
    criterion_7_probability_balance();
    criterion_8_convergence_order();
    criterion_9_special_functions();
    criterion_10_inversion_pairs();
    std::printf("%d/10 criteria passed in %.1fs\n", 10 - failures, seconds_since(start));
    return failures == 0 ? 0 : 1;
}
