#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "riemap/isotropy.hpp"
#include "riemap/rmap.hpp"

namespace riemap {

/// Samples at each end excluded from spread statistics (boundary stencils are
/// lower order than the interior ones).
inline constexpr int kInteriorTrim = 5;

/// max - min over the interior of a sample array, skipping NaNs.
inline double spread_interior(const std::vector<double>& values, int trim = kInteriorTrim) {
    const int n = static_cast<int>(values.size());
    if (n <= 2 * trim) throw GeometryError("spread_interior: too few samples");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int i = trim; i < n - trim; ++i) {
        const double v = values[static_cast<std::size_t>(i)];
        if (std::isnan(v)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(lo <= hi)) return 0.0;  // nothing defined in the interior
    return hi - lo;
}

inline double mean_interior(const std::vector<double>& values, int trim = kInteriorTrim) {
    const int n = static_cast<int>(values.size());
    double sum = 0.0;
    int count = 0;
    for (int i = trim; i < n - trim; ++i) {
        const double v = values[static_cast<std::size_t>(i)];
        if (std::isnan(v)) continue;
        sum += v;
        ++count;
    }
    return count > 0 ? sum / count : 0.0;
}

/// A source curve pushed through the map: jets along the curve, image
/// positions, pushed tangents and the measured horizontality drift
/// (kernel-component norm of V1, the paper's standing assumption made
/// auditable).
struct PushedCurve {
    JetPath path;
    std::vector<Vec> tangents;  // J V1 per sample
    double horizontality_drift = 0.0;
    double max_isometry_residual = 0.0;
};

inline PushedCurve pushforward_curve(const SmoothMap& T, const FrenetCurve& curve) {
    PushedCurve pushed;
    pushed.path = jets_along(T, curve.u, curve.step);
    pushed.tangents.reserve(curve.u.size());
    for (int i = 0; i < curve.size(); ++i) {
        const MapJet& jt = pushed.path.jets[static_cast<std::size_t>(i)];
        pushed.tangents.push_back(jt.J * curve.V1[static_cast<std::size_t>(i)]);
        const Vec kc = jt.project_kernel(curve.V1[static_cast<std::size_t>(i)]);
        pushed.horizontality_drift =
            std::max(pushed.horizontality_drift, std::sqrt(inner(jt.g1, kc, kc)));
        pushed.max_isometry_residual =
            std::max(pushed.max_isometry_residual, is_riemannian_at(jt).residual);
    }
    return pushed;
}

/// Image curvature along the pushed curve, computed two independent ways:
/// directly as |D T_*(xi)| through the pullback connection, and through the
/// curvature-composition formula sqrt(kappa^2 + |sff(xi,xi)|^2). The residual
/// is the sup over samples of their difference.
struct ImageCurvature {
    std::vector<double> kappa_tilde;
    double eq31_residual = 0.0;
    bool preconditions_ok = true;  // Riemannian along curve, drift within gate
};

inline ImageCurvature image_curvature(const PushedCurve& pushed, const FrenetCurve& curve,
                                      double drift_gate = 1e-4) {
    ImageCurvature result;
    result.preconditions_ok =
        pushed.horizontality_drift <= drift_gate && pushed.max_isometry_residual <= 1e-8;

    const std::vector<Vec> D = pullback_derivative(pushed.path, pushed.tangents);
    const int n = pushed.path.size();
    result.kappa_tilde.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const MapJet& jt = pushed.path.jets[static_cast<std::size_t>(i)];
        const double direct = std::sqrt(inner(jt.g2, D[static_cast<std::size_t>(i)],
                                              D[static_cast<std::size_t>(i)]));
        result.kappa_tilde[static_cast<std::size_t>(i)] = direct;
        const Vec s = second_fundamental_form(jt, curve.V1[static_cast<std::size_t>(i)],
                                              curve.V1[static_cast<std::size_t>(i)]);
        const double composed =
            std::sqrt(curve.kappa * curve.kappa + inner(jt.g2, s, s));
        result.eq31_residual = std::max(result.eq31_residual, std::abs(direct - composed));
    }
    return result;
}

/// One circle trial inside the circle-transport check.
struct CircleTrial {
    double kappa_spread = 0.0;
    double drift = 0.0;
    double eq31_residual = 0.0;
    bool skipped = false;  // trajectory left the chart
};

/// Empirical check of the circle-transport theorem at p: seeded horizontal
/// circles of the given curvature, the spread of the image curvature for
/// each, paired with the isotropy verdict at p. The theorem asserts the two
/// sides agree.
struct CircleTransportReport {
    double kappa = 0.0;
    std::uint64_t seed = 0;
    std::vector<CircleTrial> trials;
    int skipped = 0;
    double max_kappa_spread = 0.0;
    double max_drift = 0.0;
    double max_eq31_residual = 0.0;
    IsotropyReport isotropy;
    bool image_curvature_constant = false;
    bool biconditional_upheld = false;
};

inline CircleTransportReport theorem31_check(const SmoothMap& T, const Vec& p, double kappa,
                                             int trials, std::uint64_t seed, double s_max = 6.283185307179586,
                                             double step = 1e-3, double spread_tol = 1e-4,
                                             int isotropy_samples = 100, double isotropy_tol = 1e-6) {
    const MapJet jt = jet(T, p);
    if (jt.rank < 2) throw GeometryError("theorem31_check: needs rank >= 2 at p");

    CircleTransportReport report;
    report.kappa = kappa;
    report.seed = seed;

    for (int t = 0; t < trials; ++t) {
        Rng rng = Rng::stream(seed, 0x63697263ULL + static_cast<std::uint64_t>(t));
        const auto [u1, u2] = random_horizontal_pair(jt, rng);
        CircleTrial trial;
        try {
            const FrenetCurve circle =
                generate_frenet_curve(T.source(), p, Frame{u1, u2, Vec()}, kappa, 0.0, s_max, step);
            const PushedCurve pushed = pushforward_curve(T, circle);
            const ImageCurvature ic = image_curvature(pushed, circle);
            trial.kappa_spread = spread_interior(ic.kappa_tilde);
            trial.drift = pushed.horizontality_drift;
            trial.eq31_residual = ic.eq31_residual;
        } catch (const GeometryError&) {
            trial.skipped = true;
            ++report.skipped;
        }
        if (!trial.skipped) {
            report.max_kappa_spread = std::max(report.max_kappa_spread, trial.kappa_spread);
            report.max_drift = std::max(report.max_drift, trial.drift);
            report.max_eq31_residual = std::max(report.max_eq31_residual, trial.eq31_residual);
        }
        report.trials.push_back(trial);
    }

    report.isotropy = isotropy_test(T, p, isotropy_samples, seed, isotropy_tol);
    report.image_curvature_constant = report.max_kappa_spread <= spread_tol &&
                                      report.skipped < static_cast<int>(report.trials.size());
    const bool isotropic = report.isotropy.verdict == IsotropyVerdict::isotropic_at_tol;
    report.biconditional_upheld = (report.image_curvature_constant == isotropic);
    return report;
}

/// Full helix-transport diagnostics for one source curve.
struct TransportReport {
    double source_kappa = 0.0;
    double source_tau = 0.0;
    double horizontality_drift = 0.0;
    std::vector<double> image_kappa;  // per-s, on the source grid
    std::vector<double> image_tau;    // NaN where undefined
    double kappa_spread = 0.0;
    double tau_spread = 0.0;
    double eq31_residual = 0.0;
    double umbilic_residual = 0.0;
    double h2_normal_residual = 0.0;
    double helix_condition_residual = 0.0;  // sup |(D^perp)^2 H2 + tau^2 H2|
    double eq41_residual = 0.0;             // defining ODE of the image helix
    bool reparametrized = false;
    bool condition_holds = false;
    bool image_is_helix = false;
    bool biconditional_upheld = false;
};

namespace detail {

/// Cubic (Catmull-Rom) interpolation of uniformly sampled positions.
inline Vec interpolate_positions(const std::vector<Vec>& f, double step, double s) {
    const int n = static_cast<int>(f.size());
    double t = s / step;
    int i = static_cast<int>(std::floor(t));
    i = std::clamp(i, 1, n - 3);
    const double x = t - i;
    const Vec& p0 = f[static_cast<std::size_t>(i - 1)];
    const Vec& p1 = f[static_cast<std::size_t>(i)];
    const Vec& p2 = f[static_cast<std::size_t>(i + 1)];
    const Vec& p3 = f[static_cast<std::size_t>(i + 2)];
    return 0.5 * ((2.0 * p1) + (-p0 + p2) * x + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * x * x +
                  (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * x * x * x);
}

/// Resample image positions onto a uniform arc-length grid when the pushed
/// tangents drifted off unit speed.
inline std::vector<Vec> reparametrize_unit_speed(const ChartManifold& M2,
                                                 const std::vector<Vec>& positions, double step) {
    const std::vector<Vec> d = grid_derivative(positions, step);
    std::vector<double> arclen(positions.size(), 0.0);
    for (std::size_t i = 1; i < positions.size(); ++i) {
        const double sa = M2.norm(positions[i - 1], d[i - 1]);
        const double sb = M2.norm(positions[i], d[i]);
        arclen[i] = arclen[i - 1] + 0.5 * (sa + sb) * step;
    }
    const int count = static_cast<int>(std::floor(arclen.back() / step)) + 1;
    std::vector<Vec> out;
    out.reserve(static_cast<std::size_t>(count));
    std::size_t seg = 0;
    for (int k = 0; k < count; ++k) {
        const double target = k * step;
        while (seg + 1 < arclen.size() && arclen[seg + 1] < target) ++seg;
        // Linear parameter estimate inside the segment, then cubic evaluation.
        const double width = arclen[seg + 1] - arclen[seg];
        const double frac = width > 0.0 ? (target - arclen[seg]) / width : 0.0;
        out.push_back(interpolate_positions(positions, step, (static_cast<double>(seg) + frac) * step));
    }
    return out;
}

}  // namespace detail

/// Residual of the image-helix ODE (D)^3 T_*(xi) + K2 (D) T_*(xi) = 0 through
/// the pullback connection, with K2 estimated from the interior means of the
/// sampled image curvature and torsion.
struct Eq41Result {
    double residual = 0.0;
    double K2 = 0.0;
    bool applicable = true;  // image passed the constancy gates
};

inline Eq41Result eq41_residual(const PushedCurve& pushed, double K2_estimate,
                                bool spreads_within_tol) {
    Eq41Result result;
    result.K2 = K2_estimate;
    result.applicable = spreads_within_tol;
    const std::vector<Vec> d1 = pullback_derivative(pushed.path, pushed.tangents);
    const std::vector<Vec> d2 = pullback_derivative(pushed.path, d1);
    const std::vector<Vec> d3 = pullback_derivative(pushed.path, d2);
    for (int i = 0; i < pushed.path.size(); ++i) {
        const MapJet& jt = pushed.path.jets[static_cast<std::size_t>(i)];
        const Vec r = d3[static_cast<std::size_t>(i)] + K2_estimate * d1[static_cast<std::size_t>(i)];
        result.residual = std::max(result.residual, std::sqrt(inner(jt.g2, r, r)));
    }
    return result;
}

/// Helix-transport check along a source curve with nonzero torsion:
///  (a) umbilicity residual along the curve,
///  (b) the normal-connection condition (D^perp)^2 H2 = -tau^2 H2,
///  (c) Frenet data of the image curve (spreads over interior samples), and
///  (d) the two verdicts the transport theorem asserts to coincide. The
/// image-is-helix verdict also requires the image to satisfy the helix ODE
/// (constant curvature and torsion are necessary but not sufficient when the
/// target dimension exceeds 3).
inline TransportReport helix_condition_check(const SmoothMap& T, const FrenetCurve& curve,
                                             double condition_tol = 1e-3, double spread_tol = 1e-4,
                                             double drift_gate = 1e-4) {
    if (curve.tau == 0.0)
        throw GeometryError("helix_condition_check: tau = 0 is the circle case; run theorem31_check");

    TransportReport report;
    report.source_kappa = curve.kappa;
    report.source_tau = curve.tau;

    const PushedCurve pushed = pushforward_curve(T, curve);
    report.horizontality_drift = pushed.horizontality_drift;
    if (pushed.horizontality_drift > drift_gate)
        throw GeometryError("helix_condition_check: curve is not horizontal (drift " +
                            std::to_string(pushed.horizontality_drift) + ")");

    const ImageCurvature ic = image_curvature(pushed, curve, drift_gate);
    report.eq31_residual = ic.eq31_residual;

    // (a) umbilicity along the curve.
    const bool has_normal = !pushed.path.jets.front().normal.empty();
    for (int i = 0; i < curve.size(); ++i) {
        const MapJet& jt = pushed.path.jets[static_cast<std::size_t>(i)];
        if (!has_normal) break;
        const Vec h2 = mean_curvature(jt);
        for (const Vec& U : jt.normal) {
            const double scale = inner(jt.g2, h2, U);
            for (int a = 0; a < jt.rank; ++a) {
                const Vec SU = shape_operator(jt, U, jt.horiz[static_cast<std::size_t>(a)]);
                for (int b = 0; b < jt.rank; ++b) {
                    const Vec Jhb = jt.J * jt.horiz[static_cast<std::size_t>(b)];
                    const double want = (a == b) ? scale : 0.0;
                    report.umbilic_residual =
                        std::max(report.umbilic_residual, std::abs(inner(jt.g2, SU, Jhb) - want));
                }
            }
        }
    }

    // (b) the mean curvature field along the curve and its second normal
    // derivative.
    std::vector<Vec> h2(static_cast<std::size_t>(curve.size()));
    for (int i = 0; i < curve.size(); ++i)
        h2[static_cast<std::size_t>(i)] = mean_curvature(pushed.path.jets[static_cast<std::size_t>(i)]);
    report.h2_normal_residual = normal_field_residual(pushed.path, h2);
    const std::vector<Vec> dh2 = normal_connection_along(pushed.path, h2);
    const std::vector<Vec> ddh2 = normal_connection_along(pushed.path, dh2);
    const double tau2 = curve.tau * curve.tau;
    for (int i = 0; i < curve.size(); ++i) {
        const MapJet& jt = pushed.path.jets[static_cast<std::size_t>(i)];
        const Vec r = ddh2[static_cast<std::size_t>(i)] + tau2 * h2[static_cast<std::size_t>(i)];
        report.helix_condition_residual =
            std::max(report.helix_condition_residual, std::sqrt(inner(jt.g2, r, r)));
    }

    // (c) Frenet data of the image curve in the target chart.
    std::vector<Vec> image_positions = pushed.path.images;
    double worst_speed = 0.0;
    for (int i = 0; i < curve.size(); ++i) {
        const MapJet& jt = pushed.path.jets[static_cast<std::size_t>(i)];
        const Vec& t = pushed.tangents[static_cast<std::size_t>(i)];
        worst_speed = std::max(worst_speed, std::abs(std::sqrt(inner(jt.g2, t, t)) - 1.0));
    }
    if (worst_speed > 1e-4) {
        image_positions = detail::reparametrize_unit_speed(T.target(), image_positions, curve.step);
        report.reparametrized = true;
    }
    const FrenetApparatus ap = frenet_apparatus(T.target(), image_positions, curve.step);
    report.image_kappa = ap.kappa;
    report.image_tau = ap.tau;
    report.kappa_spread = spread_interior(ap.kappa);
    report.tau_spread = spread_interior(ap.tau);

    // (d) verdicts. K2 for the image ODE comes from interior means.
    const double mean_kappa = mean_interior(ap.kappa);
    const double mean_tau = mean_interior(ap.tau);
    const double K2 = mean_kappa * mean_kappa + mean_tau * mean_tau;
    const bool spreads_ok = report.kappa_spread <= spread_tol && report.tau_spread <= spread_tol;
    const Eq41Result eq41 = eq41_residual(pushed, K2, spreads_ok);
    report.eq41_residual = eq41.residual;

    report.condition_holds = report.umbilic_residual <= condition_tol &&
                             report.helix_condition_residual <= condition_tol;
    report.image_is_helix = spreads_ok && eq41.residual <= condition_tol;
    report.biconditional_upheld = (report.condition_holds == report.image_is_helix);
    return report;
}

}  // namespace riemap
