#include <catch2/catch_amalgamated.hpp>

#include "riemap/registry.hpp"
#include "riemap/rng.hpp"
#include "riemap/transport.hpp"
#include "testutil.hpp"

using namespace riemap;

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec point2(double a, double b) {
    Vec p(2);
    p << a, b;
    return p;
}

FrenetCurve sphere_small_circle(const ChartManifold& S, double s_max = 4.4) {
    Vec p = point2(kPi / 4.0, kPi);
    Frame f;
    f.V1 = point2(0.0, 1.0 / std::sin(kPi / 4.0));
    f.V2 = point2(1.0, 0.0);
    return generate_frenet_curve(S, p, f, 1.0, 0.0, s_max, 1e-3);
}

FrenetCurve sphere_great_circle(const ChartManifold& S) {
    Vec p = point2(kPi / 2.0, 0.2);
    Frame f;
    f.V1 = point2(0.0, 1.0);
    f.V2 = point2(1.0, 0.0);
    return generate_frenet_curve(S, p, f, 0.0, 0.0, 2.0 * kPi - 0.5, 1e-3);
}

Frame axis_frame3() {
    Frame f;
    f.V1 = Vec::Unit(3, 0);
    f.V2 = Vec::Unit(3, 1);
    f.V3 = Vec::Unit(3, 2);
    return f;
}

/// Seeded horizontal orthonormal 3-frame at a jet.
Frame horizontal_frame(const MapJet& jt, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vec> legs;
    for (int i = 0; i < 3; ++i) {
        Vec v = Vec::Zero(jt.source_dim());
        const Vec c = rng.normal_vector(jt.rank);
        for (int k = 0; k < jt.rank; ++k) v += c[k] * jt.horiz[static_cast<std::size_t>(k)];
        legs.push_back(v);
    }
    const auto basis = orthonormalize(legs, jt.g1);
    return Frame{basis.at(0), basis.at(1), basis.at(2)};
}

}  // namespace

TEST_CASE("pushforward of curves") {
    SECTION("identity: same curve, zero drift") {
        const SmoothMap T = make_identity(2);
        const FrenetCurve c = generate_frenet_curve(T.source(), Vec::Zero(2),
                                                    Frame{Vec::Unit(2, 0), Vec::Unit(2, 1), Vec()},
                                                    1.0, 0.0, 4.0, 1e-3);
        const PushedCurve pushed = pushforward_curve(T, c);
        REQUIRE(pushed.horizontality_drift == 0.0);
        for (int i = 0; i < c.size(); i += 100)
            REQUIRE((pushed.path.images[static_cast<std::size_t>(i)] -
                     c.u[static_cast<std::size_t>(i)]).cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("equatorial great circle maps to the unit circle in the plane z = 0") {
        const SmoothMap T = make_sphere_immersion(1.0);
        const FrenetCurve c = sphere_great_circle(T.source());
        const PushedCurve pushed = pushforward_curve(T, c);
        REQUIRE(pushed.horizontality_drift == 0.0);  // empty kernel
        for (int i = 0; i < c.size(); i += 200) {
            const Vec& q = pushed.path.images[static_cast<std::size_t>(i)];
            REQUIRE(std::abs(q.head(2).norm() - 1.0) < 1e-7);
            REQUIRE(std::abs(q[2]) < 1e-7);
        }
    }
    SECTION("projection keeps a horizontal circle and reports zero drift") {
        const SmoothMap T = make_projection(3, 2);
        const FrenetCurve c = generate_frenet_curve(T.source(), Vec::Zero(3),
                                                    Frame{Vec::Unit(3, 0), Vec::Unit(3, 1), Vec()},
                                                    1.0, 0.0, 4.0, 1e-3);
        const PushedCurve pushed = pushforward_curve(T, c);
        REQUIRE(pushed.horizontality_drift <= 1e-12);
        for (int i = 0; i < c.size(); i += 100)
            REQUIRE((pushed.path.images[static_cast<std::size_t>(i)] -
                     c.u[static_cast<std::size_t>(i)].head(2)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("image curvature: flat, small circle, great circle") {
    SECTION("identity circle keeps curvature 1") {
        const SmoothMap T = make_identity(2);
        const FrenetCurve c = generate_frenet_curve(T.source(), Vec::Zero(2),
                                                    Frame{Vec::Unit(2, 0), Vec::Unit(2, 1), Vec()},
                                                    1.0, 0.0, 2.0 * kPi, 1e-3);
        const PushedCurve pushed = pushforward_curve(T, c);
        const ImageCurvature ic = image_curvature(pushed, c);
        REQUIRE(ic.preconditions_ok);
        REQUIRE(ic.eq31_residual <= 1e-6);
        REQUIRE(spread_interior(ic.kappa_tilde) <= 1e-6);
        REQUIRE(mean_interior(ic.kappa_tilde) == Catch::Approx(1.0).epsilon(1e-8));
    }
    SECTION("kappa 1 circle on the unit sphere lifts to curvature sqrt(2)") {
        const SmoothMap T = make_sphere_immersion(1.0);
        const FrenetCurve c = sphere_small_circle(T.source());
        const PushedCurve pushed = pushforward_curve(T, c);
        const ImageCurvature ic = image_curvature(pushed, c);
        REQUIRE(ic.preconditions_ok);
        REQUIRE(ic.eq31_residual <= 1e-4);
        REQUIRE(spread_interior(ic.kappa_tilde) <= 1e-4);
        REQUIRE(mean_interior(ic.kappa_tilde) == Catch::Approx(std::sqrt(2.0)).margin(1e-4));
    }
    SECTION("great circles are geodesics with unit-curvature images") {
        const SmoothMap T = make_sphere_immersion(1.0);
        const FrenetCurve c = sphere_great_circle(T.source());
        const PushedCurve pushed = pushforward_curve(T, c);
        const ImageCurvature ic = image_curvature(pushed, c);
        REQUIRE(mean_interior(ic.kappa_tilde) == Catch::Approx(1.0).margin(1e-6));
        REQUIRE(ic.eq31_residual <= 1e-4);
    }
}

TEST_CASE("circle-transport check: isotropic maps against the anisotropic control") {
    SECTION("unit sphere: constant image curvature and isotropic verdict") {
        const SmoothMap T = make_sphere_immersion(1.0);
        const CircleTransportReport rep =
            theorem31_check(T, point2(kPi / 2.0, kPi), 2.0, 10, 99);
        REQUIRE(rep.skipped == 0);
        REQUIRE(rep.max_kappa_spread <= 1e-4);
        REQUIRE(rep.isotropy.verdict == IsotropyVerdict::isotropic_at_tol);
        REQUIRE(rep.biconditional_upheld);
        REQUIRE(rep.max_eq31_residual <= 1e-4);
    }
    SECTION("identity: lambda 0, spreads at noise level") {
        const SmoothMap T = make_identity(3);
        const CircleTransportReport rep = theorem31_check(T, Vec::Zero(3), 2.0, 5, 99);
        REQUIRE(rep.max_kappa_spread <= 1e-6);
        REQUIRE(rep.isotropy.verdict == IsotropyVerdict::isotropic_at_tol);
        REQUIRE(rep.biconditional_upheld);
    }
    SECTION("quadric graph: spread above 1e-2 and not-isotropic, still upheld") {
        const SmoothMap T = make_quadric_graph();
        const CircleTransportReport rep =
            theorem31_check(T, point2(0.1, 0.0), 1.0, 10, 99);
        REQUIRE(rep.max_kappa_spread > 1e-2);
        REQUIRE(rep.isotropy.verdict == IsotropyVerdict::not_isotropic);
        REQUIRE(rep.biconditional_upheld);
    }
}

TEST_CASE("interior spread is stable under wider trimming") {
    const SmoothMap T = make_sphere_immersion(1.0);
    const FrenetCurve c = sphere_small_circle(T.source());
    const PushedCurve pushed = pushforward_curve(T, c);
    const ImageCurvature ic = image_curvature(pushed, c);
    const double s5 = spread_interior(ic.kappa_tilde, 5);
    const double s8 = spread_interior(ic.kappa_tilde, 8);
    REQUIRE(s8 <= s5);  // the 8-trimmed interior is a subset
    REQUIRE(s5 - s8 <= std::max(0.05 * s5, 1e-6));
}

TEST_CASE("helix transport: flat positive control") {
    const SmoothMap T = make_identity(3);
    const FrenetCurve helix = generate_frenet_curve(T.source(), Vec::Zero(3), axis_frame3(),
                                                    1.0, 1.0, 2.0 * kPi, 1e-3);
    const TransportReport rep = helix_condition_check(T, helix);
    REQUIRE(rep.umbilic_residual == 0.0);          // no normal directions
    REQUIRE(rep.helix_condition_residual == 0.0);  // H2 vacuous
    REQUIRE(rep.condition_holds);
    REQUIRE(rep.kappa_spread <= 1e-4);
    REQUIRE(rep.tau_spread <= 1e-4);
    REQUIRE(rep.eq41_residual <= 1e-3);
    REQUIRE(rep.image_is_helix);
    REQUIRE(rep.biconditional_upheld);
}

TEST_CASE("helix transport rejects the circle case") {
    const SmoothMap T = make_identity(3);
    const FrenetCurve circle = generate_frenet_curve(T.source(), Vec::Zero(3), axis_frame3(),
                                                     1.0, 0.0, 4.0, 1e-3);
    REQUIRE_THROWS_WITH(helix_condition_check(T, circle),
                        Catch::Matchers::ContainsSubstring("circle case"));
}

TEST_CASE("helix transport: round 3-sphere negative control") {
    // The round sphere is umbilical with parallel mean curvature, so the
    // normal-connection condition fails by exactly tau^2 |H2| = 0.25. The
    // image has constant curvature sqrt(kappa^2+1) and constant torsion
    // kappa tau / sqrt(kappa^2+1) but does not satisfy the helix equation
    // (its third curvature in R^4 is nonzero), which eq41 detects.
    const SmoothMap T = make_sphere3_immersion(1.0);
    Vec p(3);
    p << kPi / 2.0, kPi / 2.0, kPi;
    const MapJet jt = jet(T, p);
    const FrenetCurve helix = generate_frenet_curve(T.source(), p, horizontal_frame(jt, 42),
                                                    1.0, 0.5, 2.0 * kPi, 1e-3);
    const TransportReport rep = helix_condition_check(T, helix);

    REQUIRE(rep.horizontality_drift <= 1e-4);
    REQUIRE(rep.umbilic_residual <= 1e-6);
    REQUIRE(rep.helix_condition_residual == Catch::Approx(0.25).margin(1e-3));
    REQUIRE_FALSE(rep.condition_holds);

    REQUIRE(mean_interior(rep.image_kappa) == Catch::Approx(std::sqrt(2.0)).margin(1e-4));
    REQUIRE(rep.kappa_spread <= 1e-4);
    REQUIRE(mean_interior(rep.image_tau) ==
            Catch::Approx(0.5 / std::sqrt(2.0)).margin(1e-4));
    REQUIRE(rep.tau_spread <= 1e-4);  // W-curve: the spread does NOT flag it
    REQUIRE(rep.eq41_residual > 1e-2);  // the helix equation does
    REQUIRE_FALSE(rep.image_is_helix);
    REQUIRE(rep.biconditional_upheld);
}

TEST_CASE("helix-equation residual of images") {
    SECTION("flat helix satisfies its own equation") {
        const SmoothMap T = make_identity(3);
        const FrenetCurve helix = generate_frenet_curve(T.source(), Vec::Zero(3), axis_frame3(),
                                                        1.0, 1.0, 2.0 * kPi, 1e-3);
        const PushedCurve pushed = pushforward_curve(T, helix);
        const Eq41Result eq = eq41_residual(pushed, 2.0, true);
        REQUIRE(eq.residual <= 1e-3);
    }
    SECTION("great-circle image is a plane circle with K2 = 1") {
        const SmoothMap T = make_sphere_immersion(1.0);
        const FrenetCurve gc = sphere_great_circle(T.source());
        const PushedCurve pushed = pushforward_curve(T, gc);
        const Eq41Result eq = eq41_residual(pushed, 1.0, true);
        REQUIRE(eq.residual <= 1e-3);
    }
}

TEST_CASE("circle trials that exit the chart are skipped and counted") {
    const SmoothMap T = make_sphere_immersion(1.0);
    // wide circles (kappa 0.15: angular radius atan(1/0.15) ~ 1.42) from a
    // point near the chart edge leave it for most orientations
    const CircleTransportReport rep =
        theorem31_check(T, point2(0.3, kPi), 0.15, 6, 5);
    REQUIRE(rep.skipped > 0);
    REQUIRE(static_cast<int>(rep.trials.size()) == 6);
}
