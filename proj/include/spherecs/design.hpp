#pragma once

// Inverse design of the driving fields: given (N, lambda, mu) and the
// optomechanical Lamb-Dicke parameters alpha_j of the N red-sideband modes,
// find the Rabi-frequency ratios Omega_j / Omega_0 for which the
// sphere-coherent state is the motional dark state.
//
// Matching the dark-state recurrence ratio C_n / C_{n-1} to the
// sphere-coherent ratio sqrt((N-n+1)/n) g(lambda, n) mu gives, for n = 1..N,
//
//   sum_j [alpha_j e^{-alpha_j^2/2} L_{n-1}^1(alpha_j^2)] xi_j
//       = n L_{n-1}(alpha0^2) / (sqrt(N-n+1) g(lambda, n)),
//
// with xi_j = mu e^{alpha0^2/2} Omega_j / Omega_0 and L_N(alpha0^2) = 0
// closing the ladder at level N. The unknowns enter linearly; there is no
// extra Omega_j factor inside the sum.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "spherecs/errors.hpp"
#include "spherecs/fockspace.hpp"
#include "spherecs/scs.hpp"
#include "spherecs/specfun.hpp"

namespace spherecs {

inline constexpr double kMaxDesignCondition = 1e12;
inline constexpr double kRefinementCondition = 1e8;

struct CouplingDesign {
    int N = 0;
    double lambda = 0.0;
    double mu = 0.0;
    double alpha0 = 0.0;
    std::vector<double> alphas;  // red-sideband Lamb-Dicke parameters alpha_1..alpha_N
    std::vector<double> ratios;  // Omega_j / Omega_0; negative means a pi phase shift
    std::vector<long double> xi;  // kept in extended precision; ls_residual is measured on these
    double ls_residual = std::numeric_limits<double>::quiet_NaN();
    double ds_residual = std::numeric_limits<double>::quiet_NaN();
    double condition = std::numeric_limits<double>::quiet_NaN();
    bool feasible = false;
    std::string diagnostics;
};

/// alpha_j = j / 10, j = 1..N.
inline std::vector<double> default_alphas(int N) {
    std::vector<double> out;
    for (int j = 1; j <= N; ++j) out.push_back(j / 10.0);
    return out;
}

/// Dark-state kernel operator with Omega_0 = 1:
///   A = -sum_j r_j alpha_j f_1(n, alpha_j) b + f_0(n, alpha0).
inline Matrix dark_state_operator(std::span<const double> ratios, std::span<const double> alphas,
                                  double alpha0, int dim) {
    if (ratios.size() != alphas.size()) throw DomainError("dark_state_operator: length mismatch");
    Matrix f1sum = Matrix::Zero(dim, dim);
    for (std::size_t j = 0; j < alphas.size(); ++j) {
        f1sum += ratios[j] * alphas[j] * f_q_diagonal(1, alphas[j], dim);
    }
    return -f1sum * annihilation(dim) + f_q_diagonal(0, alpha0, dim);
}

inline Matrix dark_state_operator(const CouplingDesign& d, int dim) {
    return dark_state_operator(d.ratios, d.alphas, d.alpha0, dim);
}

/// ||A psi|| / ||A||_F. Only the ratios matter, so the overall scale of the
/// drive drops out.
inline double dark_state_residual(const CouplingDesign& d, const FockVector& state) {
    if (state.dim() < d.N + 1) throw DomainError("dark_state_residual: state must span levels 0..N");
    const Matrix a = dark_state_operator(d, state.dim());
    return (a * state.amplitudes()).norm() / a.norm();
}

/// Solves for the ratios without throwing on infeasibility; check `feasible`.
inline CouplingDesign try_solve_couplings(int N, double lambda, double mu,
                                          std::span<const double> alphas, int root_index = 0) {
    if (N < 1) throw DomainError("solve_couplings: N must be >= 1");
    if (static_cast<int>(alphas.size()) != N) {
        throw DomainError("solve_couplings: need exactly N optomechanical couplings");
    }
    for (double a : alphas)
        if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("solve_couplings: couplings must be > 0");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("solve_couplings: lambda must be >= 0");
    if (mu == 0.0 || !std::isfinite(mu)) throw DomainError("solve_couplings: mu must be finite and nonzero");

    CouplingDesign d;
    d.N = N;
    d.lambda = lambda;
    d.mu = mu;
    d.alphas.assign(alphas.begin(), alphas.end());
    const double x0 = laguerre_root(N, root_index);
    d.alpha0 = std::sqrt(x0);

    Eigen::MatrixXd m(N, N);
    Eigen::VectorXd rhs(N);
    for (int n = 1; n <= N; ++n) {
        for (int j = 0; j < N; ++j) {
            const double a = alphas[j];
            m(n - 1, j) = a * std::exp(-0.5 * a * a) * laguerre(n - 1, 1, a * a);
        }
        rhs(n - 1) = n * laguerre(n - 1, 0, x0) / (std::sqrt(static_cast<double>(N - n + 1)) *
                                                   g_value(lambda, N, n));
    }

    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    d.condition = sv(N - 1) > 0.0 ? sv(0) / sv(N - 1) : std::numeric_limits<double>::infinity();
    if (!(d.condition <= kMaxDesignCondition)) {
        std::ostringstream os;
        os << "coupling matrix is singular or ill-conditioned (condition " << d.condition
           << " > " << kMaxDesignCondition << "); choose distinct optomechanical couplings";
        d.diagnostics = os.str();
        return d;
    }

    // The solution alternates in sign with entries ~cond times larger than the
    // right-hand side; factorization, storage and residual use long double.
    using MatrixL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using VectorL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    const MatrixL ml = m.cast<long double>();
    const VectorL rl = rhs.cast<long double>();
    const Eigen::FullPivLU<MatrixL> lu(ml);
    VectorL xl = lu.solve(rl);
    if (d.condition > kRefinementCondition) xl += lu.solve(VectorL(rl - ml * xl));

    d.ls_residual = static_cast<double>((ml * xl - rl).norm() / rl.norm());
    d.xi.assign(xl.data(), xl.data() + N);
    const long double scale = std::exp(-0.5L * x0) / mu;
    for (long double v : d.xi) d.ratios.push_back(static_cast<double>(v * scale));

    d.ds_residual = dark_state_residual(d, sphere_coherent_state({N, lambda, mu}));
    d.feasible = std::isfinite(d.ls_residual) && std::isfinite(d.ds_residual);
    if (!d.feasible) d.diagnostics = "non-finite residual";
    return d;
}

/// As try_solve_couplings, but an infeasible system throws InfeasibleDesign.
inline CouplingDesign solve_couplings(int N, double lambda, double mu, std::span<const double> alphas,
                                      int root_index = 0) {
    CouplingDesign d = try_solve_couplings(N, lambda, mu, alphas, root_index);
    if (!d.feasible) throw InfeasibleDesign(d.diagnostics, d.condition);
    return d;
}

/// The motional state the designed drive actually selects, on `dim` levels.
inline FockVector designed_state(const CouplingDesign& d, int dim) {
    return nonlinear_cs_from_recurrence(d.ratios, d.alpha0, d.alphas, dim);
}

/// One design per curvature value; infeasible rows are kept and flagged.
inline std::vector<CouplingDesign> sweep_curvature(int N, double mu, std::span<const double> alphas,
                                                   std::span<const double> lambdas) {
    std::vector<CouplingDesign> rows;
    rows.reserve(lambdas.size());
    for (double lambda : lambdas) {
        if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
            throw DomainError("sweep_curvature: curvature grid entries must be finite and >= 0");
        }
        rows.push_back(try_solve_couplings(N, lambda, mu, alphas));
    }
    return rows;
}

/// f(n) = sum_j r_j alpha_j f_1(n, alpha_j) / f_0(n, alpha0). Has a pole at
/// n = N, where L_N(alpha0^2) = 0 ends the ladder.
inline double motional_deformation(const CouplingDesign& d, int n) {
    if (n < 0) throw DomainError("motional_deformation: level must be >= 0");
    const double f0 = f_q_value(0, d.alpha0, n);
    if (std::abs(f0) < 1e-12) {
        throw PoleError("motional_deformation: f_0(n, alpha0) vanishes at n=" + std::to_string(n));
    }
    double num = 0.0;
    for (std::size_t j = 0; j < d.alphas.size(); ++j) {
        num += d.ratios[j] * d.alphas[j] * f_q_value(1, d.alphas[j], n);
    }
    return num / f0;
}

}  // namespace spherecs
