#pragma once

#include <utility>

namespace vtolsim {

/// Classic fixed-step 4-stage Runge-Kutta update.
///
/// `f(t, x)` returns the state rate; `axpy(x, k, h)` returns x + h * k.
/// Works for any state/rate pair connected by such an affine update.
template <typename State, typename F, typename Axpy>
State rk4Step(F&& f, Axpy&& axpy, double t, const State& x, double dt) {
    const auto k1 = f(t, x);
    const auto k2 = f(t + 0.5 * dt, axpy(x, k1, 0.5 * dt));
    const auto k3 = f(t + 0.5 * dt, axpy(x, k2, 0.5 * dt));
    const auto k4 = f(t + dt, axpy(x, k3, dt));
    State y = axpy(x, k1, dt / 6.0);
    y = axpy(y, k2, dt / 3.0);
    y = axpy(y, k3, dt / 3.0);
    return axpy(y, k4, dt / 6.0);
}

}  // namespace vtolsim
