#pragma once

// Deformed oscillator algebras and the nonlinear coherent states built on
// them: sphere-coherent states, coherent states from the dark-state
// recurrence, and trapped-ion nonlinear coherent states.

#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "spherecs/errors.hpp"
#include "spherecs/fockspace.hpp"
#include "spherecs/specfun.hpp"

namespace spherecs {

struct DeformationSpec {
    enum class Kind { flat, sphere, trapped_ion };

    Kind kind = Kind::flat;
    int N = 1;            // flat / sphere: top Fock level
    double lambda = 0.0;  // sphere curvature
    double eta = 0.0;     // trapped-ion Lamb-Dicke parameter

    static DeformationSpec flat(int N) { return {Kind::flat, N, 0.0, 0.0}; }
    static DeformationSpec sphere(int N, double lambda) { return {Kind::sphere, N, lambda, 0.0}; }
    static DeformationSpec trapped_ion(double eta) { return {Kind::trapped_ion, 0, 0.0, eta}; }

    void validate() const {
        switch (kind) {
            case Kind::flat:
                if (N < 1) throw DomainError("DeformationSpec: N must be >= 1");
                break;
            case Kind::sphere:
                if (N < 1) throw DomainError("DeformationSpec: N must be >= 1");
                if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
                    throw DomainError("DeformationSpec: curvature must be finite and >= 0");
                }
                break;
            case Kind::trapped_ion:
                if (!(eta > 0.0) || !std::isfinite(eta)) {
                    throw DomainError("DeformationSpec: Lamb-Dicke parameter must be > 0");
                }
                break;
        }
    }

    /// Largest level on which the deformation function is defined (-1: unbounded).
    int max_level() const { return kind == Kind::trapped_ion ? -1 : N + 1; }
};

/// Deformation function f(n) of the chosen algebra.
///   flat:        sqrt(N + 1 - n)
///   sphere:      sqrt(N + 1 - n) g(lambda, n)
///   trapped ion: L_n^1(eta^2) / ((n + 1) L_n^0(eta^2))
inline double deformation_value(const DeformationSpec& spec, int n) {
    spec.validate();
    if (n < 0) throw DomainError("deformation_value: level must be non-negative");
    switch (spec.kind) {
        case DeformationSpec::Kind::flat:
        case DeformationSpec::Kind::sphere: {
            if (n > spec.N + 1) {
                throw DomainError("deformation_value: level " + std::to_string(n) +
                                  " beyond the algebra's top level N+1");
            }
            const double flat = std::sqrt(static_cast<double>(spec.N + 1 - n));
            return spec.kind == DeformationSpec::Kind::flat ? flat
                                                            : flat * g_value(spec.lambda, spec.N, n);
        }
        case DeformationSpec::Kind::trapped_ion: {
            const double x = spec.eta * spec.eta;
            const double den = (n + 1.0) * laguerre(n, 0, x);
            if (std::abs(den) < 1e-14) {
                throw PoleError("deformation_value: L_n(eta^2) vanishes at n=" + std::to_string(n));
            }
            return laguerre(n, 1, x) / den;
        }
    }
    throw DomainError("deformation_value: unknown algebra");
}

struct DeformedOps {
    Matrix lower;       // B = b f(n)
    Matrix raise;       // B^dag = f(n) b^dag
    Matrix commutator;  // B B^dag - B^dag B on the truncated space
};

/// B, B^dag and [B, B^dag] on levels 0..dim-1. The commutator is the truncated
/// matrix product, so its top diagonal entry lacks the (n+1) f^2(n+1) term.
inline DeformedOps deformed_ops(const DeformationSpec& spec, int dim) {
    spec.validate();
    if (dim < 1) throw DomainError("deformed_ops: dim must be >= 1");
    if (spec.max_level() >= 0 && dim - 1 > spec.max_level()) {
        throw DomainError("deformed_ops: dim exceeds the algebra's domain (N+2 levels)");
    }
    Matrix lower = Matrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) lower(n - 1, n) = std::sqrt(static_cast<double>(n)) * deformation_value(spec, n);
    Matrix raise = lower.adjoint();
    Matrix comm = lower * raise - raise * lower;
    return {std::move(lower), std::move(raise), std::move(comm)};
}

struct SphereCoherentParams {
    int N = 1;
    double lambda = 0.0;
    cplx mu = 0.0;

    void validate() const {
        if (N < 1) throw DomainError("SphereCoherentParams: N must be >= 1");
        if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
            throw DomainError("SphereCoherentParams: curvature must be finite and >= 0");
        }
        if (!std::isfinite(mu.real()) || !std::isfinite(mu.imag())) {
            throw DomainError("SphereCoherentParams: mu must be finite");
        }
    }
};

/// Normalized c_n proportional to sqrt(binom(N, n)) [g(lambda, n)]! mu^n, n = 0..N.
inline FockVector sphere_coherent_state(const SphereCoherentParams& p) {
    p.validate();
    Vector c(p.N + 1);
    cplx power = 1.0;
    for (int n = 0; n <= p.N; ++n) {
        c(n) = std::sqrt(binomial(p.N, n)) * g_factorial(p.lambda, p.N, n) * power;
        power *= p.mu;
    }
    return FockVector::normalized(std::move(c));
}

/// State generated by the dark-state recurrence
///   C_n = sqrt(n!) prod_{i<n} e^{-alpha0^2/2} L_i(alpha0^2) / D_i,
///   D_i = sum_j r_j alpha_j e^{-alpha_j^2/2} L_i^1(alpha_j^2),
/// with r_j the Rabi-frequency ratios Omega_j / Omega_0. A vanishing numerator
/// terminates the ladder; a vanishing denominator with a live numerator makes
/// the design infeasible.
inline FockVector nonlinear_cs_from_recurrence(std::span<const double> ratios, double alpha0,
                                               std::span<const double> alphas, int dim) {
    if (ratios.size() != alphas.size()) {
        throw DomainError("nonlinear_cs_from_recurrence: ratios and alphas differ in length");
    }
    if (dim < 1) throw DomainError("nonlinear_cs_from_recurrence: dim must be >= 1");
    const double x0 = alpha0 * alpha0;
    const double e0 = std::exp(-0.5 * x0);
    Vector c = Vector::Zero(dim);
    c(0) = 1.0;
    double amp = 1.0;
    for (int n = 1; n < dim; ++n) {
        const int i = n - 1;
        const double num = e0 * laguerre(i, 0, x0);
        if (std::abs(num) < 1e-12) break;  // ladder terminates; higher levels stay empty
        double den = 0.0;
        double scale = 0.0;
        for (std::size_t j = 0; j < alphas.size(); ++j) {
            const double aj = alphas[j];
            const double term = ratios[j] * aj * std::exp(-0.5 * aj * aj) * laguerre(i, 1, aj * aj);
            den += term;
            scale += std::abs(term);
        }
        if (!(std::abs(den) > 1e-13 * scale) || den == 0.0) {
            throw InfeasibleDesign("nonlinear_cs_from_recurrence: denominator vanishes at level " +
                                       std::to_string(i) + " while the numerator does not",
                                   std::numeric_limits<double>::infinity());
        }
        amp *= std::sqrt(static_cast<double>(n)) * num / den;
        c(n) = amp;
    }
    return FockVector::normalized(std::move(c));
}

/// ||B psi - chi psi|| with B = b f(n) on the state's own truncation.
inline double eigenvalue_residual(const DeformationSpec& spec, const FockVector& state, cplx chi) {
    const DeformedOps ops = deformed_ops(spec, state.dim());
    return (ops.lower * state.amplitudes() - chi * state.amplitudes()).norm();
}

struct TruncatedCoherentState {
    FockVector state;
    double tail_bound;  // |chi c_{dim-1}|: the eigen-equation defect left by truncation
};

/// Trapped-ion nonlinear coherent state from c_{k+1} = chi c_k / (sqrt(k+1) f(k+1)).
inline TruncatedCoherentState trapped_ion_coherent_state(double eta, cplx chi, int dim) {
    const auto spec = DeformationSpec::trapped_ion(eta);
    spec.validate();
    if (dim < 1) throw DomainError("trapped_ion_coherent_state: dim must be >= 1");
    Vector c = Vector::Zero(dim);
    c(0) = 1.0;
    for (int k = 0; k + 1 < dim; ++k) {
        const double f = deformation_value(spec, k + 1);
        if (f == 0.0) throw PoleError("trapped_ion_coherent_state: deformation vanishes");
        c(k + 1) = chi * c(k) / (std::sqrt(k + 1.0) * f);
    }
    FockVector psi = FockVector::normalized(std::move(c));
    const double tail = std::abs(chi * psi[dim - 1]);
    return {std::move(psi), tail};
}

}  // namespace spherecs
