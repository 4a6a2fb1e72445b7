#pragma once

// Independent reference computations for the test suite. Nothing here calls
// the library's numerical kernels; each function takes a different route to
// the same quantity (explicit sums, operator exponentials, PDE time stepping,
// closed forms).

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline long double factorial(int n) {
    long double f = 1.0L;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

/// L_n^m(x) = sum_k (-1)^k binom(n+m, n-k) x^k / k!, summed in __float128.
inline double laguerre_sum(int n, int m, double x) {
    __float128 s = 0, term = 1, xq = x;
    for (int k = 0; k < m; ++k) term = term * (n + m - k) / (k + 1);  // binom(n+m, n)
    for (int k = 0; k <= n; ++k) {
        s += term;
        term = -term * xq * (n - k) / ((m + k + 1) * static_cast<__float128>(k + 1));
    }
    return static_cast<double>(s);
}

/// f_q(n, alpha) from its defining normal-ordered series
///   e^{-alpha^2/2} sum_l alpha^{2l} (-1)^l n! / (l! (l+q)! (n-l)!),
/// which is the n-th diagonal element of e^{-alpha^2/2} sum_l (-1)^l alpha^{2l} b^{dag l} b^l / (l!(l+q)!).
inline double f_q_series(int q, double alpha, int n, int terms = 40) {
    long double s = 0.0L;
    const long double a2 = static_cast<long double>(alpha) * alpha;
    for (int l = 0; l <= std::min(n, terms); ++l) {
        s += ((l % 2) ? -1.0L : 1.0L) * std::pow(a2, l) * factorial(n) /
             (factorial(l) * factorial(l + q) * factorial(n - l));
    }
    return static_cast<double>(std::exp(-a2 / 2.0L) * s);
}

inline Matrix annihilation(int dim) {
    Matrix b = Matrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) b(n - 1, n) = std::sqrt(static_cast<double>(n));
    return b;
}

/// Sphere-coherent state as exp(mu B^dag)|0> with B^dag = f_s(n) b^dag on
/// levels 0..N, f_s(n) = sqrt(N+1-n) g(lambda, n), written out from scratch.
inline Vector scs_by_exponential(int N, double lambda, cplx mu) {
    const int dim = N + 1;
    const double s = std::sqrt(1.0 + lambda * lambda / 4.0);
    auto g = [&](int n) { return std::sqrt((lambda * (N + 1 - n) + s) * (lambda * n + s)); };
    Matrix bdag = Matrix::Zero(dim, dim);
    for (int n = 1; n <= N; ++n) {
        // <n| f(n) b^dag |n-1> = f(n) sqrt(n), with the deformation on the raised level
        const double f = std::sqrt(static_cast<double>(N + 1 - n)) * g(n);
        bdag(n, n - 1) = f * std::sqrt(static_cast<double>(n));
    }
    // Nilpotent generator: the series ends at power N, so sum it exactly.
    Matrix term = Matrix::Identity(dim, dim);
    Matrix e = term;
    for (int k = 1; k <= N; ++k) {
        term = (term * (mu * bdag)) / static_cast<double>(k);
        e += term;
    }
    Vector v = e.col(0);
    return v / v.norm();
}

/// Gauss-Laguerre nodes for n = 2, 3 (the roots of L_2 and L_3), from tables.
inline constexpr double kLaguerreNode2 = 0.585786437626904951;
inline constexpr double kLaguerreNode3 = 0.415774556783479083;

/// Wigner functions in the convention W_vac(0,0) = 2/pi, vacuum variance 1/4.
inline double wigner_coherent(double x, double p, cplx beta) {
    const double dx = x - beta.real(), dp = p - beta.imag();
    return 2.0 / std::numbers::pi * std::exp(-2.0 * (dx * dx + dp * dp));
}

/// W_n = (2/pi)(-1)^n L_n(4 r^2) e^{-2 r^2}, here for |1>.
inline double wigner_fock1(double x, double p) {
    const double r2 = x * x + p * p;
    return 2.0 / std::numbers::pi * (4.0 * r2 - 1.0) * std::exp(-2.0 * r2);
}

/// Negativity volume of |1>: the region 4r^2 < 1 integrated in closed form.
inline double negativity_fock1() { return 2.0 * (2.0 * std::exp(-0.5) - 1.0); }

/// Isotropic Gaussian with per-axis variance v and centre (x0, p0).
inline double gaussian(double x, double p, double v, double x0 = 0.0, double p0 = 0.0) {
    const double r2 = (x - x0) * (x - x0) + (p - p0) * (p - p0);
    return std::exp(-0.5 * r2 / v) / (2.0 * std::numbers::pi * v);
}

/// Explicit finite-difference integration of
///   dW/dt = (gamma/2)[d_x(xW) + d_p(pW)] + (gamma/4)(nbar + 1/2)(d_xx + d_pp) W
/// with centred differences, classical RK4 in time and W = 0 outside the grid.
inline Eigen::MatrixXd fokker_planck_fd(Eigen::MatrixXd w, double x_min, double p_min, double h, double gamma,
                                        double nbar, double t, int steps) {
    const int nx = static_cast<int>(w.rows()), np = static_cast<int>(w.cols());
    const double diff = 0.25 * gamma * (nbar + 0.5);
    auto rhs = [&](const Eigen::MatrixXd& f) {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(nx, np);
        auto at = [&](int i, int k) { return (i < 0 || i >= nx || k < 0 || k >= np) ? 0.0 : f(i, k); };
        for (int k = 0; k < np; ++k) {
            const double p = p_min + k * h;
            for (int i = 0; i < nx; ++i) {
                const double x = x_min + i * h;
                const double drift_x = ((x + h) * at(i + 1, k) - (x - h) * at(i - 1, k)) / (2.0 * h);
                const double drift_p = ((p + h) * at(i, k + 1) - (p - h) * at(i, k - 1)) / (2.0 * h);
                const double lap =
                    (at(i + 1, k) + at(i - 1, k) + at(i, k + 1) + at(i, k - 1) - 4.0 * f(i, k)) / (h * h);
                out(i, k) = 0.5 * gamma * (drift_x + drift_p) + diff * lap;
            }
        }
        return out;
    };
    const double dt = t / steps;
    for (int s = 0; s < steps; ++s) {
        const Eigen::MatrixXd k1 = rhs(w);
        const Eigen::MatrixXd k2 = rhs(w + 0.5 * dt * k1);
        const Eigen::MatrixXd k3 = rhs(w + 0.5 * dt * k2);
        const Eigen::MatrixXd k4 = rhs(w + dt * k3);
        w += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return w;
}

/// Coherent-state amplitudes e^{-|beta|^2/2} beta^n / sqrt(n!).
inline Vector coherent(cplx beta, int dim) {
    Vector v(dim);
    cplx c = std::exp(-0.5 * std::norm(beta));
    for (int n = 0; n < dim; ++n) {
        v(n) = c;
        c *= beta / std::sqrt(static_cast<double>(n + 1));
    }
    return v;
}

}  // namespace oracle
