#pragma once

// Laguerre polynomials, their roots, and the curvature factors g(lambda, n)
// that build sphere-coherent amplitudes.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "spherecs/errors.hpp"

namespace spherecs {

/// Associated Laguerre polynomial L_n^m(x) by the three-term recurrence
///   (k+1) L_{k+1} = (2k+m+1-x) L_k - (k+m) L_{k-1}.
inline double laguerre(int n, int m, double x) {
    if (n < 0 || m < 0) {
        throw DomainError("laguerre: degree and order must be non-negative");
    }
    if (!std::isfinite(x)) {
        throw DomainError("laguerre: argument must be finite");
    }
    double prev = 1.0;
    if (n == 0) return prev;
    double curr = 1.0 + m - x;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + m + 1.0 - x) * curr - (k + m) * prev) / (k + 1.0);
        prev = curr;
        curr = next;
    }
    return curr;
}

/// L_0^m(x), ..., L_{n_max}^m(x) in one pass.
inline std::vector<double> laguerre_sequence(int n_max, int m, double x) {
    if (n_max < 0 || m < 0) {
        throw DomainError("laguerre_sequence: degree and order must be non-negative");
    }
    std::vector<double> out(static_cast<std::size_t>(n_max) + 1);
    out[0] = 1.0;
    if (n_max >= 1) out[1] = 1.0 + m - x;
    for (int k = 1; k < n_max; ++k) {
        out[k + 1] = ((2.0 * k + m + 1.0 - x) * out[k] - (k + m) * out[k - 1]) / (k + 1.0);
    }
    return out;
}

/// Positive root number `index` (0 = smallest) of the ordinary Laguerre
/// polynomial L_N. Roots are bracketed by a sign scan, bisected, then polished
/// with Newton steps using L_N'(x) = N (L_N(x) - L_{N-1}(x)) / x.
inline double laguerre_root(int N, int index = 0) {
    if (N < 1) throw DomainError("laguerre_root: L_0 has no roots (N must be >= 1)");
    if (index < 0 || index >= N) {
        throw DomainError("laguerre_root: root index " + std::to_string(index) +
                          " out of range for L_" + std::to_string(N));
    }
    // All roots lie in (0, 4N+2); the smallest is of order 1/N, so the scan
    // step resolves every gap between consecutive roots.
    const double upper = 4.0 * N + 4.0;
    const double step = 0.05 / (4.0 * N + 2.0);
    double lo = 0.0;
    double f_lo = 1.0;  // L_N(0) = 1
    int found = -1;
    double a = 0.0, b = 0.0;
    for (double x = step; x <= upper; x += step) {
        const double f = laguerre(N, 0, x);
        if ((f_lo > 0.0) != (f > 0.0) || f == 0.0) {
            if (++found == index) {
                a = lo;
                b = x;
                break;
            }
        }
        lo = x;
        f_lo = f;
    }
    if (found != index) throw DomainError("laguerre_root: failed to bracket root");

    double fa = laguerre(N, 0, a);
    for (int it = 0; it < 200 && b - a > 4.0 * std::numeric_limits<double>::epsilon() * b; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = laguerre(N, 0, mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    double r = 0.5 * (a + b);
    for (int it = 0; it < 3; ++it) {
        const double f = laguerre(N, 0, r);
        const double df = N * (f - laguerre(N - 1, 0, r)) / r;
        if (df == 0.0) break;
        const double next = r - f / df;
        if (!(std::abs(laguerre(N, 0, next)) < std::abs(f))) break;
        r = next;
    }
    return r;
}

inline double laguerre_smallest_root(int N) { return laguerre_root(N, 0); }

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double out = 1.0;
    for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
    return out;
}

/// g(lambda, n) = sqrt([lambda (N+1-n) + s] [lambda n + s]), s = sqrt(1 + lambda^2 / 4).
inline double g_value(double lambda, int N, int n) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw DomainError("g_value: curvature must be finite and non-negative");
    }
    if (N < 1 || n < 0 || n > N + 1) {
        throw DomainError("g_value: level " + std::to_string(n) + " outside 0..N+1 for N=" +
                          std::to_string(N));
    }
    const double s = std::sqrt(1.0 + 0.25 * lambda * lambda);
    return std::sqrt((lambda * (N + 1 - n) + s) * (lambda * n + s));
}

/// [g(lambda, n)]! = g(lambda, n) g(lambda, n-1) ... g(lambda, 1); 1 for n = 0.
inline double g_factorial(double lambda, int N, int n) {
    if (n < 0 || n > N + 1) {
        throw DomainError("g_factorial: level outside 0..N+1");
    }
    double out = 1.0;
    for (int k = 1; k <= n; ++k) out *= g_value(lambda, N, k);
    if (n == 0) (void)g_value(lambda, N, 0);  // validates lambda and N
    return out;
}

}  // namespace spherecs
