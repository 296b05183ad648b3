#include <catch2/catch_amalgamated.hpp>

#include "riemap/isotropy.hpp"
#include "riemap/registry.hpp"
#include "riemap/rmap.hpp"
#include "riemap/rng.hpp"
#include "testutil.hpp"

using namespace riemap;

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec point2(double a, double b) {
    Vec p(2);
    p << a, b;
    return p;
}

/// Sphere circle of geodesic curvature 1 centered on the equator (angular
/// radius pi/4, safely inside the chart).
FrenetCurve sphere_small_circle(const ChartManifold& S, double s_max = 4.4, double step = 1e-3) {
    Vec p = point2(kPi / 4.0, kPi);
    Frame f;
    f.V1 = point2(0.0, 1.0 / std::sin(kPi / 4.0));
    f.V2 = point2(1.0, 0.0);
    return generate_frenet_curve(S, p, f, 1.0, 0.0, s_max, step);
}

/// Near-full equatorial great circle on the unit sphere.
FrenetCurve sphere_great_circle(const ChartManifold& S, double step = 1e-3) {
    Vec p = point2(kPi / 2.0, 0.2);
    Frame f;
    f.V1 = point2(0.0, 1.0);
    f.V2 = point2(1.0, 0.0);
    return generate_frenet_curve(S, p, f, 0.0, 0.0, 2.0 * kPi - 0.5, step);
}

}  // namespace

TEST_CASE("jet splits: identity, worked example, sphere immersion") {
    SECTION("identity has full rank and empty kernel/normal") {
        const SmoothMap T = make_identity(2);
        const MapJet jt = jet(T, point2(0.3, -0.8));
        REQUIRE(jt.rank == 2);
        REQUIRE(jt.ker.empty());
        REQUIRE(jt.normal.empty());
        REQUIRE_FALSE(jt.degenerate);
    }
    SECTION("worked example at the base point") {
        const SmoothMap T = make_paper_example();
        Vec p(4);
        p << std::sqrt(2.0), 0.0, 0.0, 0.0;
        const MapJet jt = jet(T, p);
        REQUIRE(jt.rank == 2);
        REQUIRE(jt.ker.size() == 2);
        // kernel = span{(e1+e2)/sqrt2, e4}: check both spanning vectors have
        // no component outside the kernel projection
        Vec k1(4), k2(4);
        k1 << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0, 0.0;
        k2 << 0.0, 0.0, 0.0, 1.0;
        for (const Vec& k : {k1, k2})
            REQUIRE((jt.project_kernel(k) - k).cwiseAbs().maxCoeff() < 1e-10);
    }
    SECTION("sphere immersion normal is the radial direction") {
        const SmoothMap T = make_sphere_immersion(1.0);
        const MapJet jt = jet(T, point2(kPi / 2.0, 0.3));
        REQUIRE(jt.rank == 2);
        REQUIRE(jt.normal.size() == 1);
        Vec radial(3);
        radial << std::cos(0.3), std::sin(0.3), 0.0;
        const double align = std::abs(jt.normal[0].dot(radial));
        REQUIRE(align == Catch::Approx(1.0).margin(1e-10));
    }
    SECTION("basis orthonormality and range containment at random points") {
        Rng rng(41);
        const SmoothMap T = make_paper_example();
        for (int trial = 0; trial < 20; ++trial) {
            Vec p(4);
            for (int i = 0; i < 4; ++i) p[i] = rng.uniform(-1.5, 1.5);
            const MapJet jt = jet(T, p);
            if (jt.degenerate) continue;
            for (std::size_t i = 0; i < jt.horiz.size(); ++i)
                for (std::size_t j = 0; j < jt.horiz.size(); ++j)
                    REQUIRE(std::abs(inner(jt.g1, jt.horiz[i], jt.horiz[j]) -
                                     (i == j ? 1.0 : 0.0)) < 1e-10);
            const Vec v = rng.normal_vector(4);
            const Vec w = jt.J * v;
            REQUIRE((w - jt.project_range(w)).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("isometry residuals: identity, sphere, scaling") {
    REQUIRE(is_riemannian_at(make_identity(2), point2(1.0, 2.0)).residual == 0.0);

    const SmoothMap S = make_sphere_immersion(1.0);
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec p = point2(rng.uniform(0.2, kPi - 0.2), rng.uniform(0.2, 2.0 * kPi - 0.2));
        REQUIRE(is_riemannian_at(S, p).residual <= 1e-10);
    }

    const IsometryCheck scaled = is_riemannian_at(make_scaling(2.0), point2(0.5, 0.5));
    REQUIRE(scaled.residual == Catch::Approx(3.0));
    REQUIRE_FALSE(scaled.ok);
}

TEST_CASE("second fundamental form closed forms") {
    SECTION("identity is totally geodesic") {
        const SmoothMap T = make_identity(3);
        Rng rng(3);
        const MapJet jt = jet(T, Vec::Zero(3));
        const Vec s = second_fundamental_form(jt, rng.normal_vector(3), rng.normal_vector(3));
        REQUIRE(s.cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("sphere: sff of the colatitude direction is minus the position") {
        const SmoothMap T = make_sphere_immersion(1.0);
        const double phi = 0.3;
        const MapJet jt = jet(T, point2(kPi / 2.0, phi));
        Vec dtheta(2);
        dtheta << 1.0, 0.0;
        const Vec s = second_fundamental_form(jt, dtheta, dtheta);
        Vec want(3);
        want << -std::cos(phi), -std::sin(phi), 0.0;
        REQUIRE((s - want).cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("worked example against the finite-difference oracle") {
        const SmoothMap T = make_paper_example();
        Vec p(4);
        p << std::sqrt(2.0), 0.0, 0.0, 0.0;
        const MapJet jt = jet(T, p);
        Vec h1(4);
        h1 << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0.0, 0.0;
        const Vec s = second_fundamental_form(jt, h1, h1);
        // flat source and target: the oracle is the FD Hessian contraction
        auto f = [&](const Vec& x) { return T.value(x); };
        const auto Hfd = testing::fd_hessian(f, p);
        Vec oracle(3);
        for (int a = 0; a < 3; ++a) oracle[a] = h1.dot(Hfd[static_cast<std::size_t>(a)] * h1);
        REQUIRE((s - oracle).cwiseAbs().maxCoeff() < 1e-6);
        REQUIRE(s.norm() == Catch::Approx(2.0).epsilon(1e-10));  // golden value from the oracle
    }
    SECTION("symmetry holds to round-off for random inputs") {
        const SmoothMap T = make_sphere_immersion(2.0);
        Rng rng(88);
        const MapJet jt = jet(T, point2(1.1, 2.2));
        for (int trial = 0; trial < 20; ++trial) {
            const Vec X = rng.normal_vector(2);
            const Vec Y = rng.normal_vector(2);
            const Vec gap =
                second_fundamental_form(jt, X, Y) - second_fundamental_form(jt, Y, X);
            REQUIRE(gap.cwiseAbs().maxCoeff() < 1e-13);
        }
    }
}

TEST_CASE("normal-valuedness of the second fundamental form") {
    REQUIRE(check_normal_valued(make_identity(2), point2(0.1, 0.2), 10, 5).residual == 0.0);

    const NormalValuedCheck sphere = check_normal_valued(
        make_sphere_immersion(1.0), point2(1.0, 1.5), 50, 5);
    REQUIRE(sphere.riemannian);
    REQUIRE(sphere.residual <= 1e-8);

    const NormalValuedCheck scaled = check_normal_valued(make_scaling(2.0), point2(0.4, 0.1), 10, 5);
    REQUIRE_FALSE(scaled.riemannian);  // precondition surfaced, residual informational
}

TEST_CASE("normal-valuedness holds at 100 seeded points on Riemannian built-ins") {
    Rng rng(2025);
    for (const char* name : {"sphere_immersion{1}", "sphere_immersion{2}", "projection{3,2}",
                             "quadric_graph", "sphere3_immersion{1}"}) {
        const SmoothMap T = map_from_name(name);
        for (int trial = 0; trial < 100; ++trial) {
            Vec p(T.source().dim());
            for (int i = 0; i < p.size(); ++i) {
                const Interval& box = T.source().domain()[static_cast<std::size_t>(i)];
                const double lo = std::max(box.lo, -2.0), hi = std::min(box.hi, 2.0);
                p[i] = rng.uniform(lo + 0.15 * (hi - lo), hi - 0.15 * (hi - lo));
            }
            INFO(name);
            const NormalValuedCheck check = check_normal_valued(T, p, 5, trial);
            REQUIRE(check.riemannian);
            REQUIRE(check.residual <= 1e-8);
        }
    }
}

TEST_CASE("shape operator on spheres has principal curvature 1/r") {
    for (const double r : {1.0, 2.0}) {
        const SmoothMap T = make_sphere_immersion(r);
        const MapJet jt = jet(T, point2(kPi / 2.0, 0.3));
        const Vec U = -jt.q / r;  // unit inward normal
        Vec dtheta(2);
        dtheta << 1.0 / r, 0.0;  // unit in the chart metric
        const Vec got = shape_operator(jt, U, dtheta);
        const Vec want = (1.0 / r) * (jt.J * dtheta);
        REQUIRE((got - want).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("shape operator rejects non-normal input and vacuous normals") {
    const SmoothMap id = make_identity(2);
    const MapJet jid = jet(id, point2(0.0, 0.0));
    Vec u(2);
    u << 1.0, 0.0;
    REQUIRE_THROWS_AS(shape_operator(jid, u, u), GeometryError);

    const SmoothMap T = make_sphere_immersion(1.0);
    const MapJet jt = jet(T, point2(1.0, 1.0));
    const Vec tangent = jt.J * Vec::Unit(2, 0);
    REQUIRE_THROWS_AS(shape_operator(jt, tangent, Vec::Unit(2, 0)), GeometryError);
}

TEST_CASE("shape operator is symmetric on the range") {
    const SmoothMap T = make_quadric_graph();
    const MapJet jt = jet(T, point2(0.4, -0.2));
    REQUIRE(jt.normal.size() == 1);
    const Vec& U = jt.normal[0];
    for (int i = 0; i < jt.rank; ++i)
        for (int j = 0; j < jt.rank; ++j) {
            const Vec a = jt.J * jt.horiz[static_cast<std::size_t>(i)];
            const Vec b = jt.J * jt.horiz[static_cast<std::size_t>(j)];
            const Vec Sa = shape_operator(jt, U, jt.horiz[static_cast<std::size_t>(i)]);
            const Vec Sb = shape_operator(jt, U, jt.horiz[static_cast<std::size_t>(j)]);
            REQUIRE(std::abs(inner(jt.g2, Sa, b) - inner(jt.g2, a, Sb)) <= 1e-10);
        }
}

TEST_CASE("adjoint pushforward") {
    SECTION("identity returns the vector itself") {
        const MapJet jt = jet(make_identity(3), Vec::Zero(3));
        Rng rng(14);
        const Vec w = rng.normal_vector(3);
        REQUIRE((adjoint_pushforward(jt, w) - w).cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("sphere: normals annihilated, pushed tangents recovered") {
        const MapJet jt = jet(make_sphere_immersion(1.0), point2(kPi / 2.0, 0.3));
        REQUIRE(adjoint_pushforward(jt, jt.q).cwiseAbs().maxCoeff() < 1e-12);
        Vec dtheta(2);
        dtheta << 1.0, 0.0;
        const Vec back = adjoint_pushforward(jt, jt.J * dtheta);
        REQUIRE((back - dtheta).cwiseAbs().maxCoeff() < 1e-10);
    }
    SECTION("adjoint identity at random inputs") {
        Rng rng(21);
        Vec p(4);
        p << 1.3, -0.2, 0.4, 0.9;
        const MapJet jt = jet(make_paper_example(), p);
        for (int trial = 0; trial < 25; ++trial) {
            const Vec w = rng.normal_vector(3);
            const Vec v = adjoint_pushforward(jt, w);
            for (const Vec& h : jt.horiz)
                REQUIRE(std::abs(inner(jt.g1, v, h) - inner(jt.g2, w, jt.J * h)) <= 1e-12);
        }
    }
}

TEST_CASE("normal connection along curves on the sphere") {
    const SmoothMap T = make_sphere_immersion(1.0);
    const FrenetCurve circle = sphere_small_circle(T.source(), 3.0);
    const JetPath path = jets_along(T, circle.u, circle.step);

    SECTION("the mean curvature field is normal-parallel") {
        std::vector<Vec> h2(circle.u.size());
        for (std::size_t i = 0; i < h2.size(); ++i) h2[i] = -path.jets[i].q;
        REQUIRE(normal_field_residual(path, h2) <= 1e-8);
        const auto d = normal_connection_along(path, h2);
        for (const Vec& v : d) REQUIRE(v.cwiseAbs().maxCoeff() < 1e-6);
    }
    SECTION("product rule: f(s) * H2 differentiates to f'(s) * H2") {
        std::vector<Vec> field(circle.u.size());
        for (std::size_t i = 0; i < field.size(); ++i)
            field[i] = circle.s[i] * (-path.jets[i].q);
        const auto d = normal_connection_along(path, field);
        for (std::size_t i = 0; i < field.size(); ++i)
            REQUIRE((d[i] - (-path.jets[i].q)).cwiseAbs().maxCoeff() < 1e-5);
    }
    SECTION("flat target: constant normal values differentiate to zero") {
        const SmoothMap Q = make_quadric_graph();
        // straight horizontal line in the x2 direction: kernel empty
        std::vector<Vec> pos;
        const double step = 1e-3;
        for (int i = 0; i < 1001; ++i) pos.push_back(point2(0.0, i * step));
        const JetPath qpath = jets_along(Q, pos, step);
        std::vector<Vec> field(pos.size(), qpath.jets.front().normal[0]);
        const auto d = normal_connection_along(qpath, field);
        for (const Vec& v : d) REQUIRE(v.cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("covariant derivative of the sff vanishes on the round sphere") {
    const SmoothMap T = make_sphere_immersion(1.0);
    SECTION("identity map gives zero") {
        const SmoothMap id = make_identity(2);
        std::vector<Vec> pos;
        const double step = 1e-3;
        for (int i = 0; i < 801; ++i) pos.push_back(point2(0.2 + i * step, 0.1));
        const JetPath path = jets_along(id, pos, step);
        const auto field = pos;  // any sampled field
        std::vector<Vec> X2(pos.size(), Vec::Unit(2, 0));
        const auto r = nabla_sff(path, X2, X2);
        for (const Vec& v : r) REQUIRE(v.cwiseAbs().maxCoeff() < 1e-9);
    }
    SECTION("along a great circle") {
        const FrenetCurve gc = sphere_great_circle(T.source());
        const JetPath path = jets_along(T, gc.u, gc.step);
        const auto r = nabla_sff(path, gc.V1, gc.V1);
        for (const Vec& v : r) REQUIRE(v.cwiseAbs().maxCoeff() < 1e-5);
    }
    SECTION("along a small circle") {
        const FrenetCurve sc = sphere_small_circle(T.source());
        const JetPath path = jets_along(T, sc.u, sc.step);
        const auto r = nabla_sff(path, sc.V1, sc.V1);
        for (const Vec& v : r) REQUIRE(v.cwiseAbs().maxCoeff() < 1e-5);
    }
}

TEST_CASE("the derivative identity links nabla_sff and the shape operator") {
    SECTION("identity map: both sides vanish") {
        const SmoothMap id = make_identity(2);
        std::vector<Vec> pos;
        const double step = 1e-3;
        for (int i = 0; i < 501; ++i) pos.push_back(point2(i * step, 0.0));
        const JetPath path = jets_along(id, pos, step);
        std::vector<Vec> X(pos.size(), Vec::Unit(2, 0));
        std::vector<Vec> U(pos.size(), Vec::Zero(2));
        REQUIRE(lemma21_residual(path, X, X, U) == 0.0);
    }
    SECTION("unit sphere, great circle, U = H2") {
        const SmoothMap T = make_sphere_immersion(1.0);
        const FrenetCurve gc = sphere_great_circle(T.source());
        const JetPath path = jets_along(T, gc.u, gc.step);
        std::vector<Vec> U(gc.u.size());
        for (std::size_t i = 0; i < U.size(); ++i) U[i] = -path.jets[i].q;
        REQUIRE(lemma21_residual(path, gc.V1, gc.V1, U) <= 1e-4);
    }
    SECTION("radius-2 sphere, small circle") {
        const SmoothMap T = make_sphere_immersion(2.0);
        Vec p = point2(kPi / 2.0, kPi);
        Frame f;
        f.V1 = point2(0.0, 1.0 / 2.0);
        f.V2 = point2(1.0 / 2.0, 0.0);
        const FrenetCurve sc = generate_frenet_curve(T.source(), p, f, 1.0, 0.0, 4.0, 1e-3);
        const JetPath path = jets_along(T, sc.u, sc.step);
        std::vector<Vec> U(sc.u.size());
        for (std::size_t i = 0; i < U.size(); ++i)
            U[i] = mean_curvature(path.jets[i]);
        REQUIRE(lemma21_residual(path, sc.V1, sc.V1, U) <= 1e-4);
    }
}

TEST_CASE("pullback derivative of the pushed tangent splits per the chain rule") {
    // D[T_* xi] = T_*(D xi) + sff(xi, xi) along sampled curves
    const SmoothMap T = make_sphere_immersion(1.0);
    const FrenetCurve sc = sphere_small_circle(T.source(), 3.0);
    const JetPath path = jets_along(T, sc.u, sc.step);
    std::vector<Vec> JV1(sc.u.size());
    for (std::size_t i = 0; i < JV1.size(); ++i) JV1[i] = path.jets[i].J * sc.V1[i];
    const auto lhs = pullback_derivative(path, JV1);
    const auto dV1 = covariant_derivative_along(T.source(), sc.u, sc.V1, sc.step);
    for (std::size_t i = 0; i < JV1.size(); ++i) {
        const Vec rhs = path.jets[i].J * dV1[i] +
                        second_fundamental_form(path.jets[i], sc.V1[i], sc.V1[i]);
        REQUIRE((lhs[i] - rhs).cwiseAbs().maxCoeff() < 1e-5);
    }
}
