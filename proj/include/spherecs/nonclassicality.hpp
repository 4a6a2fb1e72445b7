#pragma once

// Phase-space diagnostics: Wigner function, negativity volume, quadrature
// squeezing, and extremum counting.
//
// Convention: X_theta = (b e^{-i theta} + b^dag e^{i theta}) / 2 and
// alpha = x + i p, so the vacuum has per-axis variance 1/4,
// W_vac(x, p) = (2/pi) e^{-2(x^2 + p^2)}, and the integral of W over dx dp is 1.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "spherecs/errors.hpp"
#include "spherecs/fockspace.hpp"

namespace spherecs {

inline constexpr const char* kConventionTag =
    "X_theta=(b*exp(-i*theta)+bdag*exp(i*theta))/2;alpha=x+ip;W_vac(0,0)=2/pi;int(W)dxdp=1";
inline constexpr double kWignerNormTolerance = 1e-4;
inline constexpr double kNegativityConvergence = 1e-3;
inline constexpr double kDefaultGridSpacing = 0.05;

/// Pairwise summation: the rounding pattern depends only on the data order.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 64) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct GridSpec {
    double x_min = -4.0, x_max = 4.0;
    double p_min = -4.0, p_max = 4.0;
    int nx = 161, np = 161;

    double dx() const { return (x_max - x_min) / (nx - 1); }
    double dp() const { return (p_max - p_min) / (np - 1); }
    double x(int i) const { return x_min + i * dx(); }
    double p(int k) const { return p_min + k * dp(); }

    void validate() const {
        if (nx < 2 || np < 2) throw DomainError("GridSpec: need at least 2 points per axis");
        if (!(x_max > x_min) || !(p_max > p_min)) throw DomainError("GridSpec: empty extent");
    }

    /// Square grid [-half, half]^2 with spacing close to `spacing`.
    static GridSpec square(double half, double spacing = kDefaultGridSpacing) {
        const int n = 2 * static_cast<int>(std::ceil(half / spacing)) + 1;
        const double h = spacing * ((n - 1) / 2);
        return {-h, h, -h, h, n, n};
    }

    /// Same extent, half the spacing.
    GridSpec refined() const { return {x_min, x_max, p_min, p_max, 2 * nx - 1, 2 * np - 1}; }
};

struct WignerGrid {
    GridSpec grid;
    Eigen::MatrixXd values;  // values(i, k) = W(x_i, p_k)
    std::string convention = kConventionTag;

    double cell() const { return grid.dx() * grid.dp(); }
    double integral() const {
        return pairwise_sum({values.data(), static_cast<std::size_t>(values.size())}) * cell();
    }
    double min() const { return values.minCoeff(); }
    double max() const { return values.maxCoeff(); }
};

struct QuadratureMoments {
    double mean_x = 0.0, mean_p = 0.0;
    double var_x = 0.0, var_p = 0.0;
    double cov_xp = 0.0;  // symmetrized
};

namespace detail {

struct LadderExpectations {
    cplx b, b2;
    double n;
};

inline LadderExpectations ladder_expectations(const Matrix& rho) {
    const int d = static_cast<int>(rho.rows());
    LadderExpectations e{0.0, 0.0, 0.0};
    // Tr(rho b) = sum_n sqrt(n) rho_{n, n-1}; b only lowers, so these are exact.
    for (int n = 1; n < d; ++n) e.b += std::sqrt(static_cast<double>(n)) * rho(n, n - 1);
    for (int n = 2; n < d; ++n) e.b2 += std::sqrt(static_cast<double>(n) * (n - 1)) * rho(n, n - 2);
    for (int n = 0; n < d; ++n) e.n += n * rho(n, n).real();
    return e;
}

inline double quadrature_variance(const LadderExpectations& e, double theta) {
    const cplx ph = std::polar(1.0, -theta);
    const double mean = (e.b * ph).real();
    const double second = 0.25 * (2.0 * (e.b2 * ph * ph).real() + 2.0 * e.n + 1.0);
    return second - mean * mean;
}

}  // namespace detail

/// Exact Fock-basis first and second quadrature moments.
inline QuadratureMoments quadrature_moments(const DensityOp& rho) {
    const auto e = detail::ladder_expectations(rho.matrix());
    QuadratureMoments m;
    m.mean_x = e.b.real();
    m.mean_p = e.b.imag();
    m.var_x = detail::quadrature_variance(e, 0.0);
    m.var_p = detail::quadrature_variance(e, std::numbers::pi / 2);
    m.cov_xp = detail::quadrature_variance(e, std::numbers::pi / 4) - 0.5 * (m.var_x + m.var_p);
    return m;
}

/// The same moments from a sampled Wigner function.
inline QuadratureMoments grid_moments(const WignerGrid& w) {
    const int nx = w.grid.nx, np = w.grid.np;
    std::vector<double> s0, sx, sp, sxx, spp, sxp;
    for (auto* v : {&s0, &sx, &sp, &sxx, &spp, &sxp}) v->reserve(static_cast<std::size_t>(nx) * np);
    for (int k = 0; k < np; ++k) {
        for (int i = 0; i < nx; ++i) {
            const double x = w.grid.x(i), p = w.grid.p(k), f = w.values(i, k);
            s0.push_back(f);
            sx.push_back(x * f);
            sp.push_back(p * f);
            sxx.push_back(x * x * f);
            spp.push_back(p * p * f);
            sxp.push_back(x * p * f);
        }
    }
    const double norm = pairwise_sum(s0);
    QuadratureMoments m;
    m.mean_x = pairwise_sum(sx) / norm;
    m.mean_p = pairwise_sum(sp) / norm;
    m.var_x = pairwise_sum(sxx) / norm - m.mean_x * m.mean_x;
    m.var_p = pairwise_sum(spp) / norm - m.mean_p * m.mean_p;
    m.cov_xp = pairwise_sum(sxp) / norm - m.mean_x * m.mean_p;
    return m;
}

struct SqueezingReport {
    double theta = 0.0;
    double variance = 0.0;  // <Delta X_theta^2>
    double s = 0.0;         // 4 <Delta X_theta^2> - 1; squeezed when in [-1, 0)
};

inline SqueezingReport squeezing(const DensityOp& rho, double theta) {
    const double var = detail::quadrature_variance(detail::ladder_expectations(rho.matrix()), theta);
    return {theta, var, 4.0 * var - 1.0};
}

inline SqueezingReport squeezing(const FockVector& psi, double theta) {
    return squeezing(DensityOp::pure(psi), theta);
}

/// Square grid wide enough for 6 standard deviations around the mean on both
/// axes (and never narrower than [-4, 4]).
inline GridSpec auto_grid(const DensityOp& rho, double spacing = kDefaultGridSpacing) {
    const auto m = quadrature_moments(rho);
    const double half = std::max({4.0, std::abs(m.mean_x) + 6.0 * std::sqrt(m.var_x),
                                  std::abs(m.mean_p) + 6.0 * std::sqrt(m.var_p)});
    return GridSpec::square(half, spacing);
}

namespace detail {

/// Widens the grid (same spacing) until mean +- 4 sigma fits on both axes.
inline GridSpec ensure_coverage(GridSpec g, const QuadratureMoments& m) {
    auto widen = [](double& lo, double& hi, int& n, double h, double mean, double sd) {
        const double need_lo = mean - 4.0 * sd, need_hi = mean + 4.0 * sd;
        if (lo <= need_lo && hi >= need_hi) return;
        const double want_lo = std::min(lo, mean - 6.0 * sd);
        const double want_hi = std::max(hi, mean + 6.0 * sd);
        const int add_lo = static_cast<int>(std::ceil((lo - want_lo) / h));
        const int add_hi = static_cast<int>(std::ceil((want_hi - hi) / h));
        lo -= add_lo * h;
        hi += add_hi * h;
        n += add_lo + add_hi;
    };
    const double hx = g.dx(), hp = g.dp();
    widen(g.x_min, g.x_max, g.nx, hx, m.mean_x, std::sqrt(std::max(m.var_x, 0.0)));
    widen(g.p_min, g.p_max, g.np, hp, m.mean_p, std::sqrt(std::max(m.var_p, 0.0)));
    return g;
}

/// W(alpha) = (2/pi) Tr[rho D(2 alpha) Parity]
///          = (2/pi) sum_{m,n} rho_{mn} (-1)^m <n|D(2 alpha)|m>,
/// using the exact displacement matrix elements (no truncation of D).
/// Hermiticity folds the (m, m+k) and (m+k, m) terms into 2 Re[...].
inline Eigen::MatrixXd evaluate_wigner(const Matrix& rho, const GridSpec& g) {
    const int d = static_cast<int>(rho.rows());
    // coef[k][m] = (-1)^m sqrt(m!/(m+k)!) rho_{m, m+k}
    std::vector<std::vector<cplx>> coef(d);
    std::vector<double> ratio(d, 1.0);
    for (int k = 0; k < d; ++k) {
        if (k > 0)
            for (int m = 0; m + k < d; ++m) ratio[m] /= std::sqrt(static_cast<double>(m + k));
        coef[k].resize(d - k);
        for (int m = 0; m + k < d; ++m) {
            coef[k][m] = (m % 2 == 0 ? 1.0 : -1.0) * ratio[m] * rho(m, m + k);
        }
    }
    Eigen::MatrixXd out(g.nx, g.np);
    for (int kp = 0; kp < g.np; ++kp) {
        for (int ix = 0; ix < g.nx; ++ix) {
            const cplx beta(2.0 * g.x(ix), 2.0 * g.p(kp));
            const double x = std::norm(beta);
            double acc = 0.0;
            cplx power = 1.0;
            for (int k = 0; k < d; ++k) {
                if (k > 0) power *= beta;
                const auto& c = coef[k];
                const int len = d - k;
                double l_prev = 1.0, l_curr = 1.0 + k - x;
                cplx s = c[0];
                if (len > 1) s += c[1] * l_curr;
                for (int m = 1; m + 1 < len; ++m) {
                    const double l_next = ((2.0 * m + k + 1.0 - x) * l_curr - (m + k) * l_prev) / (m + 1.0);
                    l_prev = l_curr;
                    l_curr = l_next;
                    s += c[m + 1] * l_curr;
                }
                acc += (k == 0 ? 1.0 : 2.0) * (power * s).real();
            }
            out(ix, kp) = (2.0 / std::numbers::pi) * std::exp(-0.5 * x) * acc;
        }
    }
    return out;
}

}  // namespace detail

/// Samples the Wigner function on `spec`, widening it if mean +- 4 sigma does
/// not fit. Throws ResolutionError when the sampled integral misses 1 by more
/// than `norm_tol`.
inline WignerGrid wigner(const DensityOp& rho, const GridSpec& spec, double norm_tol = kWignerNormTolerance) {
    spec.validate();
    const GridSpec g = detail::ensure_coverage(spec, quadrature_moments(rho));
    WignerGrid w{g, detail::evaluate_wigner(rho.matrix(), g)};
    const double norm = w.integral();
    if (!(std::abs(norm - 1.0) <= norm_tol)) {
        throw ResolutionError("wigner: grid integral " + std::to_string(norm) +
                                  " misses 1 beyond tolerance; refine the grid",
                              2 * g.nx - 1, 2 * g.np - 1);
    }
    return w;
}

inline WignerGrid wigner(const FockVector& psi, const GridSpec& spec, double norm_tol = kWignerNormTolerance) {
    return wigner(DensityOp::pure(psi), spec, norm_tol);
}

inline WignerGrid wigner(const DensityOp& rho) { return wigner(rho, auto_grid(rho)); }
inline WignerGrid wigner(const FockVector& psi) { return wigner(DensityOp::pure(psi)); }

/// delta = integral |W| dx dp - 1 by Riemann sum on the grid.
inline double negativity_volume(const WignerGrid& w) {
    std::vector<double> a(w.values.data(), w.values.data() + w.values.size());
    for (double& v : a) v = std::abs(v);
    return pairwise_sum(a) * w.cell() - 1.0;
}

struct NegativityEstimate {
    double delta = 0.0;         // on the refined grid
    double delta_coarse = 0.0;  // on the requested grid
    bool converged = false;     // |delta - delta_coarse| <= tolerance
    GridSpec grid;              // the requested grid after any widening

    double difference() const { return std::abs(delta - delta_coarse); }
};

/// Negativity volume with a two-resolution convergence check.
inline NegativityEstimate negativity(const DensityOp& rho, const GridSpec& spec,
                                     double tol = kNegativityConvergence) {
    const WignerGrid coarse = wigner(rho, spec);
    const WignerGrid fine = wigner(rho, coarse.grid.refined());
    NegativityEstimate out;
    out.delta_coarse = negativity_volume(coarse);
    out.delta = negativity_volume(fine);
    out.converged = out.difference() <= tol;
    out.grid = coarse.grid;
    return out;
}

inline NegativityEstimate negativity(const DensityOp& rho) { return negativity(rho, auto_grid(rho)); }
inline NegativityEstimate negativity(const FockVector& psi) { return negativity(DensityOp::pure(psi)); }

namespace detail {

/// Connected components (8-neighbour) of the set {f > threshold}.
inline int count_components_above(const Eigen::MatrixXd& f, double threshold) {
    const int nx = static_cast<int>(f.rows()), np = static_cast<int>(f.cols());
    std::vector<char> seen(static_cast<std::size_t>(nx) * np, 0);
    std::vector<int> stack;
    int count = 0;
    for (int start = 0; start < nx * np; ++start) {
        if (seen[start] || !(f.data()[start] > threshold)) continue;
        ++count;
        seen[start] = 1;
        stack.push_back(start);
        while (!stack.empty()) {
            const int idx = stack.back();
            stack.pop_back();
            const int i = idx % nx, k = idx / nx;  // column-major storage
            for (int dk = -1; dk <= 1; ++dk)
                for (int di = -1; di <= 1; ++di) {
                    const int ii = i + di, kk = k + dk;
                    if (ii < 0 || ii >= nx || kk < 0 || kk >= np) continue;
                    const int nb = kk * nx + ii;
                    if (seen[nb] || !(f.data()[nb] > threshold)) continue;
                    seen[nb] = 1;
                    stack.push_back(nb);
                }
        }
    }
    return count;
}

}  // namespace detail

/// Peaks plus holes of W. Each connected region where W stays above
/// +threshold (a peak) or below -threshold (a hole) counts once, so a ring or
/// crescent-shaped fringe is a single extremum however many local maxima sit
/// along its crest. threshold = prominence_fraction * max |W|.
inline int count_extrema(const WignerGrid& w, double prominence_fraction = 0.02) {
    const double scale = w.values.cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) return 0;
    const double threshold = prominence_fraction * scale;
    return detail::count_components_above(w.values, threshold) +
           detail::count_components_above(-w.values, threshold);
}

}  // namespace spherecs
