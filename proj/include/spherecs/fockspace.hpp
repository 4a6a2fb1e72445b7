#pragma once

// Truncated Fock-space linear algebra: states, density operators, ladder
// operators, displacement operators, the f_q functions of the number
// operator, and the atom-cavity-mirror Hamiltonians as explicit matrices.
//
// Tensor ordering for hybrid operators is atom (x) cavity (x) mirror, with the
// atomic basis |g> = 0, |e> = 1.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "spherecs/errors.hpp"
#include "spherecs/specfun.hpp"

namespace spherecs {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kNormTolerance = 1e-12;

/// Amplitudes over Fock levels 0..dim-1.
class FockVector {
public:
    explicit FockVector(Vector amps) : amps_(std::move(amps)) {
        if (amps_.size() < 1) throw DomainError("FockVector: dimension must be >= 1");
    }

    /// Scales to unit norm; a zero vector is rejected.
    static FockVector normalized(Vector amps) {
        const double n = amps.norm();
        if (!(n > 0.0) || !std::isfinite(n)) {
            throw DomainError("FockVector: cannot normalize a zero or non-finite vector");
        }
        return FockVector(amps / n);
    }

    static FockVector basis(int dim, int level) {
        if (level < 0 || level >= dim) throw DomainError("FockVector::basis: level out of range");
        Vector v = Vector::Zero(dim);
        v(level) = 1.0;
        return FockVector(std::move(v));
    }

    int dim() const noexcept { return static_cast<int>(amps_.size()); }
    const Vector& amplitudes() const noexcept { return amps_; }
    cplx operator[](int n) const { return amps_(n); }
    double norm() const { return amps_.norm(); }
    bool is_normalized(double tol = kNormTolerance) const { return std::abs(norm() - 1.0) < tol; }

    /// Zero-padded copy on a larger space (or exact copy when dim == this->dim()).
    FockVector padded(int new_dim) const {
        if (new_dim < dim()) throw DomainError("FockVector::padded: cannot shrink");
        Vector v = Vector::Zero(new_dim);
        v.head(dim()) = amps_;
        return FockVector(std::move(v));
    }

    /// |<this|other>|^2 for normalized vectors, zero-padding the shorter one.
    double fidelity(const FockVector& other) const {
        const int d = std::max(dim(), other.dim());
        const Vector a = padded(d).amplitudes();
        const Vector b = other.padded(d).amplitudes();
        return std::norm(a.dot(b));
    }

private:
    Vector amps_;
};

/// Hermitian, unit-trace, positive semidefinite matrix.
class DensityOp {
public:
    static constexpr double kHermiticityTolerance = 1e-12;
    static constexpr double kTraceTolerance = 1e-10;
    static constexpr double kPositivityTolerance = 1e-9;

    explicit DensityOp(Matrix m) : m_(std::move(m)) {
        if (m_.rows() < 1 || m_.rows() != m_.cols()) {
            throw DomainError("DensityOp: matrix must be square and non-empty");
        }
        if (hermiticity_defect() > kHermiticityTolerance * std::max(1.0, m_.norm())) {
            throw DomainError("DensityOp: matrix is not Hermitian");
        }
        if (std::abs(trace() - 1.0) > kTraceTolerance) {
            throw DomainError("DensityOp: trace differs from 1 by " +
                              std::to_string(std::abs(trace() - 1.0)));
        }
        if (min_eigenvalue() < -kPositivityTolerance) {
            throw DomainError("DensityOp: matrix has a negative eigenvalue");
        }
    }

    static DensityOp pure(const FockVector& psi) {
        const Vector& v = psi.amplitudes();
        return DensityOp(v * v.adjoint() / v.squaredNorm());
    }

    int dim() const noexcept { return static_cast<int>(m_.rows()); }
    const Matrix& matrix() const noexcept { return m_; }
    double trace() const { return m_.trace().real(); }
    double hermiticity_defect() const { return (m_ - m_.adjoint()).norm(); }

    double min_eigenvalue() const {
        const Matrix h = 0.5 * (m_ + m_.adjoint());
        Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

    /// <psi|rho|psi>, zero-padding psi when it lives on fewer levels.
    double expectation(const FockVector& psi) const {
        if (psi.dim() > dim()) throw DomainError("DensityOp::expectation: state larger than operator");
        const Vector v = psi.padded(dim()).amplitudes();
        return v.dot(m_ * v).real();
    }

    DensityOp padded(int new_dim) const {
        if (new_dim < dim()) throw DomainError("DensityOp::padded: cannot shrink");
        Matrix out = Matrix::Zero(new_dim, new_dim);
        out.topLeftCorner(dim(), dim()) = m_;
        return DensityOp(std::move(out));
    }

    double population(int level) const { return m_(level, level).real(); }

private:
    Matrix m_;
};

/// How many Fock levels to carry and when the top of the space counts as reached.
struct TruncationPolicy {
    int base_dim = 1;
    int margin = 0;
    double top_tolerance = 1e-10;

    int dim() const {
        if (base_dim < 1 || margin < 0) throw DomainError("TruncationPolicy: invalid sizes");
        return base_dim + margin;
    }
};

// ---------------------------------------------------------------------------
// Ladder operators

inline Matrix annihilation(int dim) {
    if (dim < 1) throw DomainError("annihilation: dim must be >= 1");
    Matrix b = Matrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) b(n - 1, n) = std::sqrt(static_cast<double>(n));
    return b;
}

inline Matrix creation(int dim) { return annihilation(dim).adjoint(); }

inline Matrix number_op(int dim) {
    if (dim < 1) throw DomainError("number_op: dim must be >= 1");
    Matrix n = Matrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
    return n;
}

inline Matrix identity(int dim) { return Matrix::Identity(dim, dim); }

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

inline Matrix kron(const Matrix& a, const Matrix& b) {
    return Eigen::kroneckerProduct(a, b).eval();
}

inline Matrix kron(const Matrix& a, const Matrix& b, const Matrix& c) { return kron(a, kron(b, c)); }

/// Sub-matrix on the given basis indices (rows and columns).
inline Matrix restrict_to(const Matrix& m, const std::vector<int>& idx) {
    const int k = static_cast<int>(idx.size());
    Matrix out(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) out(i, j) = m(idx[i], idx[j]);
    return out;
}

inline std::vector<int> lower_levels(int count) {
    std::vector<int> idx(count);
    for (int i = 0; i < count; ++i) idx[i] = i;
    return idx;
}

// ---------------------------------------------------------------------------
// f_q(n, alpha): coefficients of the expansion of the displacement operator

/// f_q(n, alpha) = e^{-alpha^2/2} n! L_n^q(alpha^2) / (n+q)!, n = 0..dim-1.
inline Eigen::VectorXd f_q_values(int q, double alpha, int dim) {
    if (q < 0) throw DomainError("f_q: q must be non-negative");
    if (!(alpha >= 0.0)) throw DomainError("f_q: alpha must be non-negative");
    if (dim < 1) throw DomainError("f_q: dim must be >= 1");
    const double x = alpha * alpha;
    const double pref = std::exp(-0.5 * x);
    const auto lag = laguerre_sequence(dim - 1, q, x);
    Eigen::VectorXd out(dim);
    for (int n = 0; n < dim; ++n) {
        double ratio = 1.0;  // n! / (n+q)!
        for (int i = 1; i <= q; ++i) ratio /= (n + i);
        out(n) = pref * lag[n] * ratio;
    }
    return out;
}

inline double f_q_value(int q, double alpha, int n) { return f_q_values(q, alpha, n + 1)(n); }

inline Matrix f_q_diagonal(int q, double alpha, int dim) {
    return f_q_values(q, alpha, dim).cast<cplx>().asDiagonal();
}

// ---------------------------------------------------------------------------
// Displacement operators

/// exp(alpha b^dag - alpha^* b) on the truncated space (Pade scaling and squaring).
inline Matrix displacement(cplx alpha, int dim) {
    const Matrix b = annihilation(dim);
    const Matrix gen = alpha * b.adjoint() - std::conj(alpha) * b;
    return gen.exp();
}

/// Exact matrix elements <m|D(beta)|n> of the untruncated displacement
/// operator for m, n < dim:
///   m >= n: sqrt(n!/m!) beta^{m-n} e^{-|beta|^2/2} L_n^{m-n}(|beta|^2)
///   m <  n: sqrt(m!/n!) (-beta^*)^{n-m} e^{-|beta|^2/2} L_m^{n-m}(|beta|^2)
inline Matrix displacement_elements(cplx beta, int dim) {
    if (dim < 1) throw DomainError("displacement_elements: dim must be >= 1");
    const double x = std::norm(beta);
    const double e = std::exp(-0.5 * x);
    Matrix out(dim, dim);
    std::vector<double> ratio(dim, 1.0);  // sqrt(n! / (n+k)!) for the current k
    cplx power = 1.0;                     // beta^k
    for (int k = 0; k < dim; ++k) {
        if (k > 0) {
            power *= beta;
            for (int n = 0; n + k < dim; ++n) ratio[n] /= std::sqrt(static_cast<double>(n + k));
        }
        const cplx down = (k % 2 == 0 ? 1.0 : -1.0) * std::conj(power);
        const auto lag = laguerre_sequence(dim - 1 - k, k, x);
        for (int n = 0; n + k < dim; ++n) {
            const double common = ratio[n] * e * lag[n];
            out(n + k, n) = common * power;
            if (k > 0) out(n, n + k) = common * down;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Hybrid atom-cavity-mirror operators

struct HybridDims {
    int atom = 2;
    int cavity = 2;
    int mirror = 10;

    int total() const { return atom * cavity * mirror; }
    int index(int a, int c, int m) const { return (a * cavity + c) * mirror + m; }

    void validate() const {
        if (atom != 2) throw DomainError("HybridDims: the atom is a two-level system");
        if (cavity < 1 || mirror < 1) throw DomainError("HybridDims: dimensions must be >= 1");
    }

    /// Basis indices with cavity level < cavity_limit and mirror level < mirror_limit.
    std::vector<int> interior(int cavity_limit, int mirror_limit) const {
        std::vector<int> idx;
        for (int a = 0; a < atom; ++a)
            for (int c = 0; c < std::min(cavity_limit, cavity); ++c)
                for (int m = 0; m < std::min(mirror_limit, mirror); ++m) idx.push_back(index(a, c, m));
        return idx;
    }
};

inline Matrix sigma_plus() {
    Matrix s = Matrix::Zero(2, 2);
    s(1, 0) = 1.0;
    return s;
}

inline Matrix sigma_minus() { return sigma_plus().adjoint(); }

inline Matrix sigma_z() {
    Matrix s = Matrix::Zero(2, 2);
    s(0, 0) = -1.0;
    s(1, 1) = 1.0;
    return s;
}

enum class Sideband { carrier, red, blue };

inline Sideband parse_sideband(const std::string& s) {
    if (s == "carrier") return Sideband::carrier;
    if (s == "red") return Sideband::red;
    if (s == "blue") return Sideband::blue;
    throw DomainError("unknown sideband kind '" + s + "'");
}

/// Resonant Hamiltonian for one optical mode driving the carrier, the first
/// red sideband, or the first blue sideband.
inline Matrix build_sideband_hamiltonian(Sideband kind, double h, double alpha, HybridDims dims) {
    dims.validate();
    const Matrix a = annihilation(dims.cavity);
    const Matrix b = annihilation(dims.mirror);
    const Matrix sp = sigma_plus();
    const Matrix sm = sigma_minus();
    switch (kind) {
        case Sideband::carrier: {
            const Matrix f0 = f_q_diagonal(0, alpha, dims.mirror);
            const Matrix up = h * kron(sp, a, f0);
            return up + up.adjoint();
        }
        case Sideband::red: {
            const Matrix f1 = f_q_diagonal(1, alpha, dims.mirror);
            const Matrix up = -h * alpha * kron(sp, a, f1 * b);
            return up + up.adjoint();
        }
        case Sideband::blue: {
            const Matrix f1 = f_q_diagonal(1, alpha, dims.mirror);
            const Matrix up = h * alpha * kron(sp, a, b.adjoint() * f1);
            return up + up.adjoint();
        }
    }
    throw DomainError("unknown sideband kind");
}

/// Lab-frame parameters, arbitrary frequency units. One entry per optical mode.
struct LabSystemParams {
    double nu = 1.0;
    double omega21 = 0.0;
    std::vector<double> omega;
    std::vector<double> h;
    std::vector<double> g;

    /// alpha_j = g_j / nu.
    std::vector<double> lamb_dicke() const {
        std::vector<double> out;
        for (double gj : g) out.push_back(gj / nu);
        return out;
    }

    void validate() const {
        if (!(nu > 0.0)) throw DomainError("LabSystemParams: mechanical frequency must be positive");
        if (omega.size() != h.size() || omega.size() != g.size()) {
            throw DomainError("LabSystemParams: per-mode lists have different lengths");
        }
        for (double gj : g)
            if (gj < 0.0) throw DomainError("LabSystemParams: optomechanical couplings must be >= 0");
    }
};

namespace detail {
inline void require_single_mode(const LabSystemParams& p) {
    p.validate();
    if (p.omega.size() != 1) {
        throw DomainError("dimension mismatch: explicit lab-frame matrices model exactly one cavity mode");
    }
}
}  // namespace detail

/// nu b^dag b + omega21/2 sigma_z + omega n + h (a + a^dag)(sigma+ + sigma-) - g n (b + b^dag).
inline Matrix build_lab_hamiltonian(const LabSystemParams& p, HybridDims dims) {
    detail::require_single_mode(p);
    dims.validate();
    const Matrix ia = identity(2), ic = identity(dims.cavity), im = identity(dims.mirror);
    const Matrix a = annihilation(dims.cavity), nc = number_op(dims.cavity);
    const Matrix b = annihilation(dims.mirror), nm = number_op(dims.mirror);
    const Matrix sx = sigma_plus() + sigma_minus();
    return p.nu * kron(ia, ic, nm) + 0.5 * p.omega21 * kron(sigma_z(), ic, im) +
           p.omega[0] * kron(ia, nc, im) + p.h[0] * kron(sx, a + a.adjoint(), im) -
           p.g[0] * kron(ia, nc, b + b.adjoint());
}

/// The polaron transformation exp(alpha n (b^dag - b)), block-diagonal in photon number.
inline Matrix polaron_transform(double alpha, HybridDims dims) {
    dims.validate();
    Matrix cm = Matrix::Zero(dims.cavity * dims.mirror, dims.cavity * dims.mirror);
    for (int n = 0; n < dims.cavity; ++n) {
        cm.block(n * dims.mirror, n * dims.mirror, dims.mirror, dims.mirror) =
            displacement(alpha * n, dims.mirror);
    }
    return kron(identity(2), cm);
}

/// Polaron-frame Hamiltonian: free part with the -g^2/nu n^2 Kerr term plus
/// h [D(alpha) a + a^dag D(alpha)^dag] (sigma+ + sigma-).
inline Matrix build_transformed_hamiltonian(const LabSystemParams& p, HybridDims dims) {
    detail::require_single_mode(p);
    dims.validate();
    const double alpha = p.g[0] / p.nu;
    const Matrix ia = identity(2), ic = identity(dims.cavity), im = identity(dims.mirror);
    const Matrix a = annihilation(dims.cavity), nc = number_op(dims.cavity);
    const Matrix nm = number_op(dims.mirror);
    const Matrix d = displacement(alpha, dims.mirror);
    const Matrix sx = sigma_plus() + sigma_minus();
    const Matrix hop = kron(a, d);
    return p.nu * kron(ia, ic, nm) + 0.5 * p.omega21 * kron(sigma_z(), ic, im) -
           (p.g[0] * p.g[0] / p.nu) * kron(ia, nc * nc, im) + p.omega[0] * kron(ia, nc, im) +
           p.h[0] * kron(sx, hop + hop.adjoint());
}

}  // namespace spherecs
