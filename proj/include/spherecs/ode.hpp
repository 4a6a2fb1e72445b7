#pragma once

// Dormand-Prince 5(4) embedded Runge-Kutta stepping for linear-space states
// (Eigen matrices in practice).

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spherecs {

struct StepControl {
    double rtol = 1e-10;
    double atol = 1e-10;
    double initial_step = 1e-3;
    double max_step = 0.0;  // 0: unlimited
    long max_steps = 10'000'000;
};

struct IntegrationStats {
    long accepted = 0;
    long rejected = 0;
};

/// Integrates the autonomous system dy/dt = rhs(y) from t0 to t1. `on_step(y)` runs
/// after every accepted step and may modify y in place (projection back onto a
/// constraint surface, monitors). `err_norm(err, y_old, y_new, rtol, atol)`
/// returns the scaled error; <= 1 accepts the step.
template <class State, class Rhs, class ErrNorm, class OnStep>
State dormand_prince(const Rhs& rhs, State y, double t0, double t1, const StepControl& ctl,
                     const ErrNorm& err_norm, const OnStep& on_step, double& step_hint,
                     IntegrationStats* stats = nullptr) {
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    // b - b_hat (error weights)
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    if (t1 < t0) throw std::invalid_argument("dormand_prince: t1 < t0");
    double t = t0;
    double h = step_hint > 0.0 ? step_hint : ctl.initial_step;
    State k1 = rhs(y);
    long steps = 0;
    while (t < t1) {
        if (++steps > ctl.max_steps) throw std::runtime_error("dormand_prince: step limit exceeded");
        if (ctl.max_step > 0.0) h = std::min(h, ctl.max_step);
        const bool last = t + h >= t1;
        const double hs = last ? t1 - t : h;

        const State k2 = rhs(State(y + hs * (a21 * k1)));
        const State k3 = rhs(State(y + hs * (a31 * k1 + a32 * k2)));
        const State k4 = rhs(State(y + hs * (a41 * k1 + a42 * k2 + a43 * k3)));
        const State k5 = rhs(State(y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
        const State k6 = rhs(State(y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
        State y_new = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const State k7 = rhs(y_new);
        const State err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double en = err_norm(err, y, y_new, ctl.rtol, ctl.atol);
        if (en <= 1.0) {
            t = last ? t1 : t + hs;
            y = std::move(y_new);
            on_step(y);
            k1 = rhs(y);
            if (stats) ++stats->accepted;
        } else if (stats) {
            ++stats->rejected;
        }
        const double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
        if (!last || en > 1.0) h = hs * factor;
    }
    step_hint = h;
    return y;
}

}  // namespace spherecs
