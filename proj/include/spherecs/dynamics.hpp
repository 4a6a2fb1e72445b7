#pragma once

// Open-system evolution of the mirror and of the atom-mirror pair.
//
//  * fp_propagate: exact Ornstein-Uhlenbeck solution of the Wigner-space
//    Fokker-Planck equation with drift gamma/2 and diffusion
//    (gamma/4)(nbar + 1/2): contract by e^{-gamma t/2}, then blur with a
//    Gaussian of per-axis variance (nbar + 1/2)/2 (1 - e^{-gamma t}).
//  * lindblad_damped_oscillator: the thermal master equation
//    (gamma/2)(nbar+1) L[b] + (gamma/2) nbar L[b^dag] integrated in the Fock basis.
//  * dark_state_relaxation: atom (x) mirror under the designed drive with
//    atomic spontaneous emission; the target |g>|psi_SCS> is its dark state.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "spherecs/design.hpp"
#include "spherecs/errors.hpp"
#include "spherecs/fockspace.hpp"
#include "spherecs/nonclassicality.hpp"
#include "spherecs/ode.hpp"
#include "spherecs/scs.hpp"

namespace spherecs {

struct DampedOscillatorModel {
    double gamma = 1.0;  // mechanical damping rate
    double nbar = 0.0;   // mean thermal phonon number

    void validate() const {
        if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("damping rate must be > 0");
        if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw DomainError("thermal occupation must be >= 0");
    }

    /// Per-axis Wigner variance of the thermal endpoint.
    double stationary_variance() const { return 0.5 * (nbar + 0.5); }
};

/// Geometric populations (nbar/(nbar+1))^n / (nbar+1), renormalized on `dim` levels.
inline DensityOp thermal_state(double nbar, int dim) {
    if (!(nbar >= 0.0)) throw DomainError("thermal_state: nbar must be >= 0");
    if (dim < 1) throw DomainError("thermal_state: dim must be >= 1");
    const double q = nbar / (nbar + 1.0);
    Eigen::VectorXd p(dim);
    double w = 1.0 / (nbar + 1.0);
    for (int n = 0; n < dim; ++n) {
        p(n) = w;
        w *= q;
    }
    p /= p.sum();
    return DensityOp(p.cast<cplx>().asDiagonal());
}

/// Analytic thermal Wigner function on a grid.
inline WignerGrid thermal_wigner(double nbar, const GridSpec& g) {
    const double var = 0.5 * (nbar + 0.5);
    WignerGrid w{g, Eigen::MatrixXd(g.nx, g.np)};
    for (int k = 0; k < g.np; ++k)
        for (int i = 0; i < g.nx; ++i) {
            const double r2 = g.x(i) * g.x(i) + g.p(k) * g.p(k);
            w.values(i, k) = std::exp(-0.5 * r2 / var) / (2.0 * std::numbers::pi * var);
        }
    return w;
}

// ---------------------------------------------------------------------------
// Fokker-Planck propagation

/// The kernel must span at least this many input grid cells for the Riemann
/// quadrature of the Gaussian convolution to stay spectrally accurate.
inline constexpr double kMinKernelCells = 1.2;

inline WignerGrid fp_propagate(const WignerGrid& w0, const DampedOscillatorModel& m, double t) {
    m.validate();
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("fp_propagate: time must be >= 0");
    if (t == 0.0) return w0;

    const double shrink = std::exp(-0.5 * m.gamma * t);
    const double var = m.stationary_variance() * (1.0 - std::exp(-m.gamma * t));
    const double sd = std::sqrt(var);
    const GridSpec& in = w0.grid;
    const double need = kMinKernelCells * shrink * std::max(in.dx(), in.dp());
    if (sd < need) {
        const double ratio = need / sd;
        throw ResolutionError("fp_propagate: blur kernel narrower than the grid spacing; refine the grid",
                              static_cast<int>(std::ceil((in.nx - 1) * ratio)) + 1,
                              static_cast<int>(std::ceil((in.np - 1) * ratio)) + 1);
    }

    QuadratureMoments mt = grid_moments(w0);
    mt.mean_x *= shrink;
    mt.mean_p *= shrink;
    mt.var_x = shrink * shrink * mt.var_x + var;
    mt.var_p = shrink * shrink * mt.var_p + var;
    const GridSpec out = detail::ensure_coverage(in, mt);

    auto kernel = [&](int n_out, double lo_out, double h_out, int n_in, double lo_in, double h_in) {
        Eigen::MatrixXd k(n_out, n_in);
        const double norm = h_in / std::sqrt(2.0 * std::numbers::pi * var);
        for (int j = 0; j < n_in; ++j) {
            const double centre = shrink * (lo_in + j * h_in);
            for (int i = 0; i < n_out; ++i) {
                const double d = lo_out + i * h_out - centre;
                k(i, j) = norm * std::exp(-0.5 * d * d / var);
            }
        }
        return k;
    };
    const Eigen::MatrixXd kx = kernel(out.nx, out.x_min, out.dx(), in.nx, in.x_min, in.dx());
    const Eigen::MatrixXd kp = kernel(out.np, out.p_min, out.dp(), in.np, in.p_min, in.dp());
    return WignerGrid{out, kx * w0.values * kp.transpose(), w0.convention};
}

// ---------------------------------------------------------------------------
// Lindblad integration

namespace detail {

/// D[O] rho = 2 O rho O^dag - O^dag O rho - rho O^dag O
inline Matrix dissipator(const Matrix& o, const Matrix& odag_o, const Matrix& rho) {
    return 2.0 * o * rho * o.adjoint() - odag_o * rho - rho * odag_o;
}

inline double scaled_max_error(const Matrix& err, const Matrix& y0, const Matrix& y1, double rtol,
                               double atol) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double scale = atol + rtol * std::max(std::abs(y0.data()[i]), std::abs(y1.data()[i]));
        worst = std::max(worst, std::abs(err.data()[i]) / scale);
    }
    return worst;
}

inline constexpr double kHermiticityStepTolerance = 1e-10;
inline constexpr double kTraceStepTolerance = 1e-9;

/// Shared bookkeeping for density-matrix integration: symmetrize after every
/// step, track trace and Hermiticity defects.
struct DensityStepMonitor {
    double max_trace_defect = 0.0;
    double max_hermiticity_defect = 0.0;

    void operator()(Matrix& rho) {
        const double herm = (rho - rho.adjoint()).norm();
        max_hermiticity_defect = std::max(max_hermiticity_defect, herm);
        if (herm > kHermiticityStepTolerance) {
            throw std::runtime_error("density integration lost Hermiticity (defect " +
                                     std::to_string(herm) + ")");
        }
        rho = 0.5 * (rho + rho.adjoint()).eval();
        const double tr = std::abs(rho.trace().real() - 1.0);
        max_trace_defect = std::max(max_trace_defect, tr);
        if (tr > kTraceStepTolerance) {
            throw std::runtime_error("density integration lost trace (defect " + std::to_string(tr) + ")");
        }
    }
};

inline DensityOp to_density(const Matrix& rho) {
    Matrix h = 0.5 * (rho + rho.adjoint());
    h /= h.trace().real();
    return DensityOp(std::move(h));
}

}  // namespace detail

/// Damped-oscillator generator: (gamma/2)(nbar+1) D[b] + (gamma/2) nbar D[b^dag].
class DampedOscillatorGenerator {
public:
    DampedOscillatorGenerator(const DampedOscillatorModel& m, int dim)
        : model_(m), b_(annihilation(dim)), bdag_b_(b_.adjoint() * b_), b_bdag_(b_ * b_.adjoint()) {
        m.validate();
    }

    Matrix operator()(const Matrix& rho) const {
        Matrix out = (0.5 * model_.gamma * (model_.nbar + 1.0)) * detail::dissipator(b_, bdag_b_, rho);
        if (model_.nbar > 0.0) {
            out += (0.5 * model_.gamma * model_.nbar) * detail::dissipator(b_.adjoint(), b_bdag_, rho);
        }
        return out;
    }

private:
    DampedOscillatorModel model_;
    Matrix b_, bdag_b_, b_bdag_;
};

/// Fock levels needed so a thermal tail with this occupation falls below tol.
inline int thermal_tail_levels(double nbar, double tol = 1e-13) {
    if (nbar <= 0.0) return 2;
    const double q = nbar / (nbar + 1.0);
    return static_cast<int>(std::ceil(std::log(tol) / std::log(q))) + 5;
}

inline TruncationPolicy damping_policy(int state_dim, double nbar) {
    return {state_dim, thermal_tail_levels(nbar), 1e-10};
}

struct LindbladResult {
    DensityOp rho;
    double time = 0.0;
    double max_trace_defect = 0.0;
    double max_hermiticity_defect = 0.0;
    double top_population = 0.0;
    IntegrationStats stats;
};

/// Density operators at each requested time (non-decreasing, starting >= 0).
inline std::vector<LindbladResult> lindblad_evolve(const DensityOp& rho0, const DampedOscillatorModel& m,
                                                   std::span<const double> times, const TruncationPolicy& policy,
                                                   const StepControl& ctl = {}) {
    m.validate();
    const int dim = std::max(policy.dim(), rho0.dim());
    const DampedOscillatorGenerator gen(m, dim);
    Matrix rho = rho0.padded(dim).matrix();
    detail::DensityStepMonitor monitor;
    double top = rho(dim - 1, dim - 1).real();
    auto on_step = [&](Matrix& r) {
        monitor(r);
        top = std::max(top, r(dim - 1, dim - 1).real());
    };
    auto err = [](const Matrix& e, const Matrix& a, const Matrix& b, double rt, double at) {
        return detail::scaled_max_error(e, a, b, rt, at);
    };

    std::vector<LindbladResult> out;
    double t = 0.0, hint = 0.0;
    IntegrationStats stats;
    for (double target : times) {
        if (!(target >= t) || !std::isfinite(target)) {
            throw DomainError("lindblad_evolve: times must be finite, >= 0 and non-decreasing");
        }
        if (target > t) rho = dormand_prince(gen, rho, t, target, ctl, err, on_step, hint, &stats);
        t = target;
        if (top > policy.top_tolerance) {
            throw TruncationError("lindblad_evolve: top Fock level population " + std::to_string(top) +
                                      " exceeds tolerance",
                                  2 * dim);
        }
        out.push_back({detail::to_density(rho), t, monitor.max_trace_defect, monitor.max_hermiticity_defect,
                       top, stats});
    }
    return out;
}

inline LindbladResult lindblad_damped_oscillator(const DensityOp& rho0, const DampedOscillatorModel& m, double t,
                                                 const TruncationPolicy& policy) {
    if (!(t >= 0.0)) throw DomainError("lindblad_damped_oscillator: time must be >= 0");
    const double times[] = {t};
    return lindblad_evolve(rho0, m, times, policy).front();
}

inline LindbladResult lindblad_damped_oscillator(const DensityOp& rho0, const DampedOscillatorModel& m, double t) {
    return lindblad_damped_oscillator(rho0, m, t, damping_policy(rho0.dim(), m.nbar));
}

// ---------------------------------------------------------------------------
// Dissipative preparation of the sphere-coherent state

struct DarkStateModel {
    double omega0 = 1.0;   // carrier Rabi frequency
    double gamma_a = 1.0;  // atomic spontaneous emission rate
    CouplingDesign design;

    void validate() const {
        if (!(gamma_a > 0.0)) throw DomainError("DarkStateModel: atomic decay rate must be > 0");
        if (!std::isfinite(omega0)) throw DomainError("DarkStateModel: Rabi frequency must be finite");
        if (design.ratios.size() != design.alphas.size()) throw DomainError("DarkStateModel: malformed design");
    }

    FockVector target() const { return sphere_coherent_state({design.N, design.lambda, design.mu}); }
};

/// -i[H, rho] + (gamma_a/2) D[sigma-] rho on atom (x) mirror, with
/// H = Omega_0 (sigma+ (x) A + sigma- (x) A^dag) and A the dark-state kernel operator.
class DarkStateGenerator {
public:
    DarkStateGenerator(const DarkStateModel& m, int mirror_dim) : gamma_a_(m.gamma_a) {
        m.validate();
        const Matrix a = m.omega0 * dark_state_operator(m.design, mirror_dim);
        const Matrix up = kron(sigma_plus(), a);
        h_ = up + up.adjoint();
        s_ = kron(sigma_minus(), identity(mirror_dim));
        sdag_s_ = s_.adjoint() * s_;
    }

    Matrix operator()(const Matrix& rho) const {
        const cplx i(0.0, 1.0);
        return -i * (h_ * rho - rho * h_) + (0.5 * gamma_a_) * detail::dissipator(s_, sdag_s_, rho);
    }

    const Matrix& hamiltonian() const { return h_; }

private:
    double gamma_a_;
    Matrix h_, s_, sdag_s_;
};

/// |g> (x) psi as a density matrix on 2 * mirror_dim levels.
inline DensityOp ground_product(const FockVector& psi, int mirror_dim) {
    Vector v = Vector::Zero(2 * mirror_dim);
    v.head(psi.dim()) = psi.amplitudes();
    return DensityOp::pure(FockVector::normalized(v));
}

/// Re-embeds an atom (x) mirror density matrix on a larger mirror space.
inline DensityOp embed_atom_mirror(const DensityOp& rho, int from_dim, int to_dim) {
    if (rho.dim() != 2 * from_dim || to_dim < from_dim) throw DomainError("embed_atom_mirror: bad dimensions");
    Matrix out = Matrix::Zero(2 * to_dim, 2 * to_dim);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            out.block(a * to_dim, b * to_dim, from_dim, from_dim) =
                rho.matrix().block(a * from_dim, b * from_dim, from_dim, from_dim);
    return DensityOp(std::move(out));
}

/// ||L(|g,psi><g,psi|)||_F: zero when the target is an exact dark state.
inline double stationarity_residual(const DarkStateModel& m, int mirror_dim) {
    const DarkStateGenerator gen(m, mirror_dim);
    return gen(ground_product(m.target(), mirror_dim).matrix()).norm();
}

struct RelaxationTrajectory {
    std::vector<double> times;
    std::vector<double> fidelity;         // <g, psi_SCS| rho(t) |g, psi_SCS>
    std::vector<double> trace_defect;
    std::vector<double> top_population;   // two highest mirror levels, both atomic states
    int mirror_dim = 0;
    DensityOp final_state = DensityOp(Matrix::Identity(1, 1));
};

inline constexpr double kRelaxationTopTolerance = 1e-8;

namespace detail {

inline RelaxationTrajectory relax_once(const DarkStateModel& m, const DensityOp& rho0, int mirror_dim,
                                       std::span<const double> times, const StepControl& ctl) {
    const DarkStateGenerator gen(m, mirror_dim);
    const FockVector target = m.target();
    const Vector tv = [&] {
        Vector v = Vector::Zero(2 * mirror_dim);
        v.head(target.dim()) = target.amplitudes();
        return v;
    }();
    auto top_pop = [&](const Matrix& r) {
        double s = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int lvl = std::max(0, mirror_dim - 2); lvl < mirror_dim; ++lvl)
                s += r(a * mirror_dim + lvl, a * mirror_dim + lvl).real();
        return s;
    };
    Matrix rho = rho0.matrix();
    DensityStepMonitor monitor;
    double top = top_pop(rho);
    auto on_step = [&](Matrix& r) {
        monitor(r);
        top = std::max(top, top_pop(r));
        if (top > kRelaxationTopTolerance) {
            throw TruncationError("dark_state_relaxation: population reached the top mirror levels",
                                  2 * mirror_dim);
        }
    };
    auto err = [](const Matrix& e, const Matrix& a, const Matrix& b, double rt, double at) {
        return scaled_max_error(e, a, b, rt, at);
    };

    RelaxationTrajectory out;
    out.mirror_dim = mirror_dim;
    double t = 0.0, hint = 0.0;
    for (double target_t : times) {
        if (!(target_t >= t) || !std::isfinite(target_t)) {
            throw DomainError("dark_state_relaxation: times must be finite, >= 0 and non-decreasing");
        }
        if (target_t > t) rho = dormand_prince(gen, rho, t, target_t, ctl, err, on_step, hint);
        t = target_t;
        out.times.push_back(t);
        out.fidelity.push_back(tv.dot(rho * tv).real());
        out.trace_defect.push_back(std::abs(rho.trace().real() - 1.0));
        out.top_population.push_back(top_pop(rho));
    }
    out.final_state = to_density(rho);
    return out;
}

}  // namespace detail

/// Integrates the atom-mirror master equation, sampling the fidelity with
/// |g>|psi_SCS> at `times`. `rho0` lives on 2 * mirror_dim levels (atom-major).
/// If population reaches the two highest mirror levels the run is repeated
/// once on a doubled mirror space; a second overflow throws TruncationError.
inline RelaxationTrajectory dark_state_relaxation(const DarkStateModel& m, const DensityOp& rho0, int mirror_dim,
                                                  std::span<const double> times, const StepControl& ctl = {}) {
    m.validate();
    if (rho0.dim() != 2 * mirror_dim) throw DomainError("dark_state_relaxation: rho0 must be 2 x mirror_dim");
    if (mirror_dim < m.design.N + 1) throw DomainError("dark_state_relaxation: mirror space must hold levels 0..N");
    try {
        return detail::relax_once(m, rho0, mirror_dim, times, ctl);
    } catch (const TruncationError&) {
        const int bigger = 2 * mirror_dim;
        return detail::relax_once(m, embed_atom_mirror(rho0, mirror_dim, bigger), bigger, times, ctl);
    }
}

inline int default_relaxation_mirror_dim(int N) { return 2 * (N + 1); }

}  // namespace spherecs
