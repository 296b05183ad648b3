#pragma once

#include <vector>

#include "riemap/dual2.hpp"
#include "riemap/errors.hpp"

namespace riemap {

/// Flattened ODE state at arc-length (or time) parameter s.
struct OdeState {
    Vec y;
    double s = 0.0;
};

/// One classical Runge-Kutta step of size h for y' = field(s, y).
template <class Field>
OdeState rk4_step(Field&& field, const OdeState& state, double h) {
    const Vec& y = state.y;
    const double s = state.s;
    const Vec k1 = field(s, y);
    const Vec k2 = field(s + 0.5 * h, Vec(y + 0.5 * h * k1));
    const Vec k3 = field(s + 0.5 * h, Vec(y + 0.5 * h * k2));
    const Vec k4 = field(s + h, Vec(y + h * k3));
    OdeState next;
    next.y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    next.s = state.s + h;
    return next;
}

/// Fixed-step classical RK4. Returns n_steps+1 states including y0; states
/// keep s = i*step exactly. Global error O(step^4) for smooth fields.
template <class Field>
std::vector<OdeState> rk4_integrate(Field&& field, const OdeState& y0, double step, int n_steps) {
    if (!(step > 0.0)) throw Error("rk4_integrate: step must be positive");
    if (n_steps < 0) throw Error("rk4_integrate: negative step count");
    std::vector<OdeState> states;
    states.reserve(static_cast<std::size_t>(n_steps) + 1);
    states.push_back(y0);
    for (int i = 0; i < n_steps; ++i) {
        OdeState next = rk4_step(field, states.back(), step);
        next.s = y0.s + (i + 1) * step;
        if (!next.y.allFinite())
            throw IntegrationError("rk4_integrate: non-finite state", states.back().s);
        states.push_back(std::move(next));
    }
    return states;
}

}  // namespace riemap
