#pragma once

// High-precision reference evaluation of erfc/erfcx in __float128, kept
// strictly on the test side. Two independent routes:
//   - a positive-term series (no cancellation in the sum itself) for
//     moderate arguments,
//       erfcx(z) = exp(z^2) - (2/sqrt(pi)) sum_n 2^n z^{2n+1} / (2n+1)!!,
//   - the Laplace continued fraction for large arguments.
// The two routes are cross-checked against each other in the overlap window
// and against published error-function table values by the test suite.

#include <quadmath.h>

namespace oracle {

using quad = __float128;

inline quad sqrt_pi_q() { return sqrtq(M_PIq); }

// positive-term series route, z in [0, ~4)
inline quad erfcx_series_q(quad z) {
    const quad z2 = z * z;
    quad term = z, sum = z;
    for (int n = 1; n < 400; ++n) {
        term *= 2.0Q * z2 / (2.0Q * n + 1.0Q);
        sum += term;
        if (term < 1e-36Q * sum) break;
    }
    return expq(z2) - sum * 2.0Q / sqrt_pi_q();
}

// Laplace continued fraction route (modified Lentz), z >= ~3
inline quad erfcx_cf_q(quad z) {
    const quad tiny = 1e-4000Q;
    quad f = tiny, c = tiny, d = 0.0Q;
    for (int n = 1; n < 4000; ++n) {
        const quad a = (n == 1) ? 1.0Q : 0.5Q * (n - 1);
        d = z + a * d;
        if (d == 0.0Q) d = tiny;
        c = z + a / c;
        if (c == 0.0Q) c = tiny;
        d = 1.0Q / d;
        const quad delta = c * d;
        f *= delta;
        if (fabsq(delta - 1.0Q) < 1e-34Q) break;
    }
    return f / sqrt_pi_q();
}

inline quad erfcx_q(quad z) { return z < 3.5Q ? erfcx_series_q(z) : erfcx_cf_q(z); }

inline quad erfc_q(quad z) {
    if (z >= 0.0Q) return expq(-z * z) * erfcx_q(z);
    return 2.0Q - expq(-z * z) * erfcx_q(-z);
}

inline double erfcx_ref(double z) { return static_cast<double>(erfcx_q((quad)z)); }
inline double erfc_ref(double z) { return static_cast<double>(erfc_q((quad)z)); }

// leading asymptotic partial sum, used to cross-check the continued
// fraction at large z: erfcx(z) ~ (1/(z sqrt(pi))) sum (-1)^k (2k-1)!!/(2z^2)^k
inline quad erfcx_asymptotic_q(quad z, int terms) {
    quad sum = 1.0Q, term = 1.0Q;
    for (int k = 1; k <= terms; ++k) {
        term *= -(2.0Q * k - 1.0Q) / (2.0Q * z * z);
        sum += term;
    }
    return sum / (z * sqrt_pi_q());
}

}  // namespace oracle
