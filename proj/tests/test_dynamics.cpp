#include <catch2/catch_amalgamated.hpp>

#include <spherecs/dynamics.hpp>

#include "oracles/oracles.hpp"

using namespace spherecs;
using Catch::Matchers::WithinAbs;

namespace {

double sup_diff(const WignerGrid& a, const WignerGrid& b) {
    REQUIRE(a.grid.nx == b.grid.nx);
    REQUIRE(a.grid.np == b.grid.np);
    REQUIRE(a.grid.x_min == b.grid.x_min);
    return (a.values - b.values).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("thermal state", "[dynamics]") {
    const auto rho = thermal_state(0.0, 4);
    CHECK(rho.population(0) == 1.0);
    const auto hot = thermal_state(1.5, thermal_tail_levels(1.5));
    double mean_n = 0.0;
    for (int n = 0; n < hot.dim(); ++n) mean_n += n * hot.population(n);
    CHECK_THAT(mean_n, WithinAbs(1.5, 1e-10));
    CHECK_THAT(hot.population(1) / hot.population(0), WithinAbs(0.6, 1e-14));
    CHECK_THROWS_AS(thermal_state(-1.0, 3), DomainError);

    // The Fock-basis Wigner function of the thermal state matches the Gaussian.
    const GridSpec g = GridSpec::square(5.0, 0.1);
    const auto w = wigner(hot, g);
    CHECK(sup_diff(w, thermal_wigner(1.5, w.grid)) < 1e-10);
}

TEST_CASE("model validation", "[dynamics]") {
    CHECK_THROWS_AS((DampedOscillatorModel{0.0, 0.1}.validate()), DomainError);
    CHECK_THROWS_AS((DampedOscillatorModel{1.0, -0.1}.validate()), DomainError);
    CHECK_THAT((DampedOscillatorModel{1.0, 0.0}.stationary_variance()), WithinAbs(0.25, 0.0));
}

TEST_CASE("Fokker-Planck propagation", "[dynamics]") {
    const DampedOscillatorModel m{1.0, 0.3};
    const GridSpec g = GridSpec::square(5.0, 0.1);
    const auto w0 = wigner(FockVector::basis(2, 1), g);

    SECTION("zero time is the identity") { CHECK(sup_diff(fp_propagate(w0, m, 0.0), w0) == 0.0); }

    SECTION("agrees with a finite-difference solution") {
        const double t = 0.5;
        const auto w = fp_propagate(w0, m, t);
        const Eigen::MatrixXd fd = oracle::fokker_planck_fd(w0.values, g.x_min, g.p_min, g.dx(), m.gamma, m.nbar, t, 2000);
        REQUIRE(w.grid.nx == g.nx);
        CHECK((w.values - fd).cwiseAbs().maxCoeff() < 5e-3);
        CHECK_THAT(w.integral(), WithinAbs(1.0, 1e-6));
    }

    SECTION("coherent states stay Gaussian with shrinking mean") {
        const cplx beta(1.0, -0.5);
        const auto wc = wigner(FockVector::normalized(oracle::coherent(beta, 40)), g);
        const double t = 0.8;
        const double shrink = std::exp(-0.5 * t);
        const double v = 0.25 * shrink * shrink + m.stationary_variance() * (1.0 - std::exp(-t));
        const auto w = fp_propagate(wc, m, t);
        double worst = 0.0;
        for (int k = 0; k < w.grid.np; ++k)
            for (int i = 0; i < w.grid.nx; ++i)
                worst = std::max(worst, std::abs(w.values(i, k) - oracle::gaussian(w.grid.x(i), w.grid.p(k), v,
                                                                                    shrink * beta.real(),
                                                                                    shrink * beta.imag())));
        CHECK(worst < 1e-9);
    }

    SECTION("long times reach the thermal state") {
        const auto w = fp_propagate(w0, m, 40.0);
        const auto mo = grid_moments(w);
        CHECK_THAT(mo.var_x, WithinAbs(m.stationary_variance(), 1e-6));
        CHECK_THAT(mo.var_p, WithinAbs(m.stationary_variance(), 1e-6));
        CHECK(w.min() >= 0.0);
    }

    SECTION("too-narrow kernels are rejected") {
        const GridSpec coarse = GridSpec::square(5.0, 0.5);
        const auto wc = wigner(DensityOp::pure(FockVector::basis(1, 0)), coarse, 1.0);
        CHECK_THROWS_AS(fp_propagate(wc, m, 1e-3), ResolutionError);
        CHECK_THROWS_AS(fp_propagate(w0, m, -1.0), DomainError);
    }
}

TEST_CASE("Lindblad damped oscillator", "[dynamics]") {
    SECTION("zero temperature keeps coherent states coherent") {
        const cplx beta(1.2, 0.3);
        const DampedOscillatorModel m{1.0, 0.0};
        const double t = 0.7;
        const auto r = lindblad_damped_oscillator(DensityOp::pure(FockVector::normalized(oracle::coherent(beta, 30))), m, t);
        const auto expected = FockVector::normalized(oracle::coherent(beta * std::exp(-0.5 * t), r.rho.dim()));
        CHECK(r.rho.expectation(expected) > 1.0 - 1e-6);
        CHECK(r.max_trace_defect < 1e-9);
        CHECK(r.max_hermiticity_defect < 1e-10);
    }

    SECTION("Fock |1> relaxes to vacuum at zero temperature") {
        const DampedOscillatorModel m{2.0, 0.0};
        const auto r = lindblad_damped_oscillator(DensityOp::pure(FockVector::basis(2, 1)), m, 0.4);
        CHECK_THAT(r.rho.population(1), WithinAbs(std::exp(-0.8), 1e-8));
    }

    SECTION("long times reach thermal populations") {
        const DampedOscillatorModel m{1.0, 0.4};
        const auto r = lindblad_damped_oscillator(DensityOp::pure(FockVector::basis(3, 2)), m, 30.0);
        const double q = 0.4 / 1.4;
        for (int n = 0; n < 5; ++n) CHECK_THAT(r.rho.population(n), WithinAbs(std::pow(q, n) / 1.4, 1e-8));
    }

    SECTION("Wigner function of the evolved state matches Fokker-Planck") {
        const DampedOscillatorModel m{1.0, 0.2};
        const auto psi = sphere_coherent_state({3, 1.0, 0.4});
        const auto w0 = wigner(psi);
        for (double t : {0.1, 0.5}) {
            const auto r = lindblad_damped_oscillator(DensityOp::pure(psi), m, t);
            const auto fp = fp_propagate(w0, m, t);
            const auto wl = wigner(r.rho, fp.grid);
            CHECK(sup_diff(wl, fp) < 1e-3);
        }
    }

    SECTION("population at the top level raises a truncation error") {
        const DampedOscillatorModel m{1.0, 5.0};
        const TruncationPolicy tight{3, 0, 1e-10};
        try {
            (void)lindblad_damped_oscillator(DensityOp::pure(FockVector::basis(1, 0)), m, 1.0, tight);
            FAIL("expected a truncation error");
        } catch (const TruncationError& e) {
            CHECK(e.suggested_dim() == 6);
        }
    }

    SECTION("times must be non-decreasing") {
        const std::vector<double> times{0.5, 0.2};
        CHECK_THROWS_AS(lindblad_evolve(DensityOp::pure(FockVector::basis(1, 0)), DampedOscillatorModel{}, times,
                                        damping_policy(1, 0.0)),
                        DomainError);
    }
}

TEST_CASE("negativity decays under damping", "[dynamics]") {
    const DampedOscillatorModel m{1.0, 0.1};
    const auto w0 = wigner(sphere_coherent_state({3, 1.0, 0.4}));
    double prev = negativity_volume(w0);
    CHECK(prev > 0.1);
    for (double t : {0.05, 0.1, 0.25, 0.5, 1.0}) {
        const double d = negativity_volume(fp_propagate(w0, m, t));
        CHECK(d <= prev + 1e-9);
        prev = d;
    }
    CHECK(prev < 1e-3);

    // Larger curvature keeps more negativity at the same damping time.
    const double d1 = negativity_volume(fp_propagate(wigner(sphere_coherent_state({4, 1.0, 0.4})), m, 0.1));
    const double d2 = negativity_volume(fp_propagate(wigner(sphere_coherent_state({4, 2.0, 0.4})), m, 0.1));
    CHECK(d2 > d1);
}

TEST_CASE("dark-state relaxation", "[dynamics]") {
    SECTION("undriven atom just decays") {
        const auto d = solve_couplings(2, 1.0, 0.4, default_alphas(2));
        const DarkStateModel m{0.0, 1.5, d};
        const int dim = default_relaxation_mirror_dim(2);
        // |e> (x) psi_SCS
        Vector v = Vector::Zero(2 * dim);
        v.segment(dim, 3) = m.target().amplitudes();
        const std::vector<double> times{0.0, 0.5, 2.0};
        const auto tr = dark_state_relaxation(m, DensityOp::pure(FockVector(v)), dim, times);
        for (std::size_t i = 0; i < times.size(); ++i)
            CHECK_THAT(tr.fidelity[i], WithinAbs(1.0 - std::exp(-1.5 * times[i]), 1e-8));
    }

    SECTION("the target is stationary") {
        for (int N : {2, 3, 4}) {
            const DarkStateModel m{1.0, 1.0, solve_couplings(N, 1.0, 0.4, default_alphas(N))};
            CHECK(stationarity_residual(m, default_relaxation_mirror_dim(N)) < 1e-12);
            const DarkStateGenerator gen(m, 8);
            CHECK((gen.hamiltonian() - gen.hamiltonian().adjoint()).norm() == 0.0);
        }
    }

    SECTION("the vacuum relaxes onto the sphere-coherent state") {
        const DarkStateModel m{1.0, 1.0, solve_couplings(3, 1.0, 0.4, default_alphas(3))};
        const int dim = default_relaxation_mirror_dim(3);
        std::vector<double> times;
        for (int i = 0; i <= 10; ++i) times.push_back(10.0 * i);
        const auto tr = dark_state_relaxation(m, ground_product(FockVector::basis(1, 0), dim), dim, times);
        CHECK(tr.fidelity.back() > 0.99);
        for (double td : tr.trace_defect) CHECK(td < 1e-9);
        CHECK(tr.top_population.back() < kRelaxationTopTolerance);
    }

    SECTION("input validation") {
        const DarkStateModel m{1.0, 1.0, solve_couplings(2, 1.0, 0.4, default_alphas(2))};
        const std::vector<double> times{0.0, 1.0};
        CHECK_THROWS_AS(dark_state_relaxation(m, ground_product(FockVector::basis(1, 0), 4), 3, times), DomainError);
        CHECK_THROWS_AS(dark_state_relaxation(m, ground_product(FockVector::basis(1, 0), 2), 2, times), DomainError);
        const DarkStateModel bad{1.0, 0.0, m.design};
        CHECK_THROWS_AS(bad.validate(), DomainError);
    }

    SECTION("embedding keeps every block") {
        const auto rho = ground_product(FockVector::normalized(Vector::Constant(3, cplx(1.0))), 3);
        const auto big = embed_atom_mirror(rho, 3, 5);
        CHECK(big.dim() == 10);
        CHECK_THAT(big.matrix().block(0, 0, 3, 3).trace().real(), WithinAbs(1.0, 1e-15));
        CHECK_THROWS_AS(embed_atom_mirror(rho, 3, 2), DomainError);
    }
}
