#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "riemap/manifold.hpp"
#include "riemap/ode.hpp"

namespace riemap {

/// Curvature below which a sample counts as geodesic and torsion is
/// undefined (avoids 0/0 in the normal direction).
inline constexpr double kKappaFloor = 1e-8;

/// Orthonormal moving frame at a point. V3 is empty on 2-dimensional charts
/// (torsion has no meaning there).
struct Frame {
    Vec V1, V2, V3;
    bool has_V3() const { return V3.size() > 0; }
};

/// Arc-length discretized curve with its Frenet frame fields and the
/// prescribed constant curvature/torsion. Consecutive samples differ by
/// exactly `step` in s (s_i = i*step).
struct FrenetCurve {
    double step = 0.0;
    double kappa = 0.0;
    double tau = 0.0;
    std::vector<double> s;
    std::vector<Vec> u;
    std::vector<Vec> V1, V2, V3;  // V3 empty when the frame has two legs

    int size() const { return static_cast<int>(u.size()); }
    bool has_V3() const { return !V3.empty(); }
    /// K^2 = kappa^2 + tau^2, the coefficient in the helix equation.
    double K2() const { return kappa * kappa + tau * tau; }
};

/// Per-sample Frenet data estimated from a sampled path.
struct FrenetApparatus {
    std::vector<double> kappa;
    std::vector<double> tau;          // NaN where undefined
    std::vector<bool> tau_defined;
    std::vector<Vec> V1, V2, V3;
};

namespace detail {

inline void check_frame_orthonormal(const ChartManifold& M, const Vec& p, const Frame& f) {
    const Mat g = M.metric(p);
    std::vector<const Vec*> legs = {&f.V1, &f.V2};
    if (f.has_V3()) legs.push_back(&f.V3);
    for (std::size_t i = 0; i < legs.size(); ++i)
        for (std::size_t j = i; j < legs.size(); ++j) {
            const double want = (i == j) ? 1.0 : 0.0;
            if (std::abs(inner(g, *legs[i], *legs[j]) - want) > 1e-10)
                throw GeometryError("initial frame is not g-orthonormal");
        }
}

}  // namespace detail

/// Integrate the Frenet-Serret system with constant curvature and torsion:
///   du/ds = V1,  DV1 = kappa V2,  DV2 = -kappa V1 + tau V3,  DV3 = -tau V2,
/// (covariant derivatives along the curve). With tau = 0 this is the circle
/// system DV1 = kappa Y, DY = -kappa V1; kappa = 0 gives a geodesic with a
/// parallel companion frame. On 2-dimensional charts the V3 leg is absent and
/// tau must be 0. The trajectory must stay inside the chart; leaving it stops
/// integration with an error reporting the exit parameter.
inline FrenetCurve generate_frenet_curve(const ChartManifold& M, const Vec& p, const Frame& frame0,
                                         double kappa, double tau, double s_max, double step) {
    const int m = M.dim();
    if (!(step > 0.0) || step > 1e-2 + 1e-15)
        throw GeometryError("generate_frenet_curve: step must be in (0, 1e-2]");
    if (!(s_max >= 10.0 * step))
        throw GeometryError("generate_frenet_curve: s_max must be at least 10 steps");
    if (kappa < 0.0) throw GeometryError("generate_frenet_curve: kappa must be >= 0");
    M.require_in_domain(p);
    if (frame0.V1.size() != m || frame0.V2.size() != m)
        throw GeometryError("generate_frenet_curve: frame legs must match the chart dimension");
    const bool with_V3 = frame0.has_V3();
    if (tau != 0.0 && !with_V3)
        throw GeometryError("generate_frenet_curve: nonzero torsion needs a third frame leg");
    if (with_V3 && m < 3)
        throw GeometryError("generate_frenet_curve: three orthonormal legs need dim >= 3");
    detail::check_frame_orthonormal(M, p, frame0);

    const int legs = with_V3 ? 3 : 2;
    const int n_steps = static_cast<int>(std::llround(s_max / step));

    auto field = [&](double, const Vec& y) -> Vec {
        const Vec u = y.segment(0, m);
        const Vec v1 = y.segment(m, m);
        const Vec v2 = y.segment(2 * m, m);
        Vec dy(y.size());
        dy.segment(0, m) = v1;
        dy.segment(m, m) = kappa * v2;
        dy.segment(2 * m, m) = -kappa * v1;
        if (legs == 3) {
            const Vec v3 = y.segment(3 * m, m);
            dy.segment(2 * m, m) += tau * v3;
            dy.segment(3 * m, m) = -tau * v2;
        }
        if (!M.has_constant_metric()) {
            const std::vector<Mat> gamma = M.christoffel(u);
            for (int leg = 1; leg <= legs; ++leg)
                dy.segment(leg * m, m) -=
                    ChartManifold::contract(gamma, v1, y.segment(leg * m, m));
        }
        return dy;
    };

    FrenetCurve curve;
    curve.step = step;
    curve.kappa = kappa;
    curve.tau = tau;
    curve.s.reserve(static_cast<std::size_t>(n_steps) + 1);
    curve.u.reserve(static_cast<std::size_t>(n_steps) + 1);

    OdeState state;
    state.y.resize((1 + legs) * m);
    state.y.segment(0, m) = p;
    state.y.segment(m, m) = frame0.V1;
    state.y.segment(2 * m, m) = frame0.V2;
    if (legs == 3) state.y.segment(3 * m, m) = frame0.V3;

    auto record = [&](const OdeState& st, int i) {
        curve.s.push_back(i * step);
        curve.u.push_back(st.y.segment(0, m));
        curve.V1.push_back(st.y.segment(m, m));
        curve.V2.push_back(st.y.segment(2 * m, m));
        if (legs == 3) curve.V3.push_back(st.y.segment(3 * m, m));
    };

    record(state, 0);
    for (int i = 1; i <= n_steps; ++i) {
        state = rk4_step(field, state, step);
        state.s = i * step;
        if (!state.y.allFinite())
            throw IntegrationError("generate_frenet_curve: non-finite state", (i - 1) * step);
        const Vec u = state.y.segment(0, m);
        if (!M.in_domain(u))
            throw GeometryError("generate_frenet_curve: trajectory left the chart at s = " +
                                std::to_string(i * step));
        record(state, i);
    }
    return curve;
}

/// Largest deviation of the frame Gram matrix from the identity over the
/// whole curve; an integrator-quality diagnostic (the generator never
/// re-orthonormalizes).
inline double frame_orthonormality_drift(const ChartManifold& M, const FrenetCurve& curve) {
    double worst = 0.0;
    for (int i = 0; i < curve.size(); ++i) {
        const Mat g = M.metric(curve.u[static_cast<std::size_t>(i)]);
        std::vector<const Vec*> legs = {&curve.V1[static_cast<std::size_t>(i)],
                                        &curve.V2[static_cast<std::size_t>(i)]};
        if (curve.has_V3()) legs.push_back(&curve.V3[static_cast<std::size_t>(i)]);
        for (std::size_t a = 0; a < legs.size(); ++a)
            for (std::size_t b = a; b < legs.size(); ++b) {
                const double want = (a == b) ? 1.0 : 0.0;
                worst = std::max(worst, std::abs(inner(g, *legs[a], *legs[b]) - want));
            }
    }
    return worst;
}

/// Estimate the Frenet apparatus of a sampled unit-speed path:
///   kappa = |DV1|,  V2 = DV1/kappa,  tau = |DV2 + kappa V1|,
/// with V3 the direction of DV2 + kappa V1 (torsion is reported
/// non-negative). Where kappa falls below the floor the sample is geodesic:
/// kappa reported as 0 and tau undefined. 2-dimensional charts carry no
/// torsion; tau is undefined at every sample there.
inline FrenetApparatus frenet_apparatus(const ChartManifold& M, const std::vector<Vec>& positions,
                                        double step) {
    const int n = static_cast<int>(positions.size());
    if (n < 9) throw GeometryError("frenet_apparatus: need at least 9 samples");
    const int m = M.dim();

    FrenetApparatus ap;
    ap.V1 = grid_derivative(positions, step);
    for (int i = 0; i < n; ++i) {
        const double speed = M.norm(positions[static_cast<std::size_t>(i)], ap.V1[static_cast<std::size_t>(i)]);
        if (std::abs(speed - 1.0) > 1e-4)
            throw GeometryError("frenet_apparatus: path is not unit speed (|V1| = " +
                                std::to_string(speed) + " at sample " + std::to_string(i) + ")");
    }

    const std::vector<Vec> dV1 = covariant_derivative_along(M, positions, ap.V1, step);
    ap.kappa.resize(static_cast<std::size_t>(n));
    ap.V2.assign(static_cast<std::size_t>(n), Vec::Zero(m));
    for (int i = 0; i < n; ++i) {
        const double k = M.norm(positions[static_cast<std::size_t>(i)], dV1[static_cast<std::size_t>(i)]);
        if (k > kKappaFloor) {
            ap.kappa[static_cast<std::size_t>(i)] = k;
            ap.V2[static_cast<std::size_t>(i)] = dV1[static_cast<std::size_t>(i)] / k;
        } else {
            ap.kappa[static_cast<std::size_t>(i)] = 0.0;
        }
    }

    ap.tau.assign(static_cast<std::size_t>(n), std::numeric_limits<double>::quiet_NaN());
    ap.tau_defined.assign(static_cast<std::size_t>(n), false);
    ap.V3.assign(static_cast<std::size_t>(n), Vec::Zero(m));
    if (m >= 3) {
        const std::vector<Vec> dV2 = covariant_derivative_along(M, positions, ap.V2, step);
        for (int i = 0; i < n; ++i) {
            if (ap.kappa[static_cast<std::size_t>(i)] <= kKappaFloor) continue;
            const Vec b = dV2[static_cast<std::size_t>(i)] +
                          ap.kappa[static_cast<std::size_t>(i)] * ap.V1[static_cast<std::size_t>(i)];
            const double t = M.norm(positions[static_cast<std::size_t>(i)], b);
            ap.tau[static_cast<std::size_t>(i)] = t;
            ap.tau_defined[static_cast<std::size_t>(i)] = true;
            if (t > kKappaFloor) ap.V3[static_cast<std::size_t>(i)] = b / t;
        }
    }
    return ap;
}

/// Sup-norm residual of the helix equation D^3 V1 + K^2 D V1 = 0 along a
/// generated curve (covariant derivatives in the source chart).
inline double helix_equation_residual(const ChartManifold& M, const FrenetCurve& curve) {
    const std::vector<Vec> d1 = covariant_derivative_along(M, curve.u, curve.V1, curve.step);
    const std::vector<Vec> d2 = covariant_derivative_along(M, curve.u, d1, curve.step);
    const std::vector<Vec> d3 = covariant_derivative_along(M, curve.u, d2, curve.step);
    const double K2 = curve.K2();
    double worst = 0.0;
    for (int i = 0; i < curve.size(); ++i) {
        const Vec r = d3[static_cast<std::size_t>(i)] + K2 * d1[static_cast<std::size_t>(i)];
        worst = std::max(worst, M.norm(curve.u[static_cast<std::size_t>(i)], r));
    }
    return worst;
}

}  // namespace riemap
