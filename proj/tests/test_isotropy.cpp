#include <catch2/catch_amalgamated.hpp>

#include "riemap/isotropy.hpp"
#include "riemap/registry.hpp"
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

}  // namespace

TEST_CASE("lambda on spheres is the reciprocal radius") {
    SECTION("identity: totally geodesic, lambda 0") {
        const MapJet jt = jet(make_identity(3), Vec::Zero(3));
        REQUIRE(lambda_of(jt, Vec::Unit(3, 1)) == 0.0);
    }
    for (const double r : {1.0, 2.0, 0.5}) {
        const MapJet jt = jet(make_sphere_immersion(r), point2(1.1, 2.0));
        Rng rng(17);
        for (int trial = 0; trial < 10; ++trial) {
            const Vec X = random_unit_horizontal(jt, rng);
            REQUIRE(lambda_of(jt, X) == Catch::Approx(1.0 / r).epsilon(1e-9));
        }
    }
}

TEST_CASE("lambda rejects non-unit and non-horizontal input") {
    const MapJet jt = jet(make_projection(3, 2), Vec::Zero(3));
    Vec big = 2.0 * Vec::Unit(3, 0);
    REQUIRE_THROWS_AS(lambda_of(jt, big), GeometryError);
    REQUIRE_THROWS_AS(lambda_of(jt, Vec::Unit(3, 2)), GeometryError);  // kernel direction
}

TEST_CASE("isotropy verdicts") {
    SECTION("round sphere is isotropic with negligible spread") {
        const IsotropyReport rep =
            isotropy_test(make_sphere_immersion(1.0), point2(1.3, 2.5), 100, 9);
        REQUIRE(rep.verdict == IsotropyVerdict::isotropic_at_tol);
        REQUIRE(rep.lambda_spread() <= 1e-9);
        REQUIRE(rep.lambda_mean == Catch::Approx(1.0));
    }
    SECTION("anisotropic quadric fails both criteria at the origin") {
        const IsotropyReport rep =
            isotropy_test(make_quadric_graph(), point2(0.0, 0.0), 100, 9);
        REQUIRE(rep.verdict == IsotropyVerdict::not_isotropic);
        REQUIRE(rep.lambda_spread() > 0.5);   // lambda ranges over [0, 2]
        REQUIRE(rep.lemma_residual > 1e-3);
    }
    SECTION("worked example: constant lambda 1/2 despite the scaling defect") {
        Vec p(4);
        p << std::sqrt(2.0), 0.0, 0.0, 0.0;
        const IsotropyReport rep = isotropy_test(make_paper_example(), p, 100, 9);
        REQUIRE(rep.verdict == IsotropyVerdict::isotropic_at_tol);
        REQUIRE(rep.lambda_mean == Catch::Approx(0.5).epsilon(1e-9));
        REQUIRE(rep.lambda_spread() <= 1e-9);
    }
    SECTION("rank below 2 is degenerate") {
        const IsotropyReport rep = isotropy_test(make_projection(2, 1), point2(0.1, 0.1), 10, 9);
        REQUIRE(rep.verdict == IsotropyVerdict::degenerate);
    }
}

TEST_CASE("mean curvature closed forms") {
    REQUIRE(mean_curvature(make_identity(3), Vec::Zero(3)).cwiseAbs().maxCoeff() == 0.0);

    const Vec h2_unit = mean_curvature(make_sphere_immersion(1.0), point2(kPi / 2.0, 0.3));
    Vec want(3);
    want << -std::cos(0.3), -std::sin(0.3), 0.0;
    REQUIRE((h2_unit - want).cwiseAbs().maxCoeff() < 1e-10);

    const Vec center = point2(kPi / 2.0, kPi);
    const Vec h2_r2 = mean_curvature(make_sphere_immersion(2.0), center);
    REQUIRE(h2_r2.norm() == Catch::Approx(0.5).epsilon(1e-10));
    // points radially inward: opposite the image position
    const Vec q = make_sphere_immersion(2.0).value(center);
    REQUIRE(h2_r2.dot(q) < 0.0);
}

TEST_CASE("mean curvature equals every diagonal sff value on umbilical maps") {
    Rng rng(23);
    for (const double r : {1.0, 2.0}) {
        const MapJet jt = jet(make_sphere_immersion(r), point2(1.0, 1.0));
        const Vec h2 = mean_curvature(jt);
        for (int trial = 0; trial < 20; ++trial) {
            const Vec X = random_unit_horizontal(jt, rng);
            const Vec s = second_fundamental_form(jt, X, X);
            REQUIRE((s - h2).cwiseAbs().maxCoeff() <= 1e-8);
        }
    }
}

TEST_CASE("umbilicity reports") {
    SECTION("round sphere is totally umbilical") {
        const UmbilicityReport rep = umbilicity_test(make_sphere_immersion(1.0), point2(1.2, 2.2));
        REQUIRE(rep.residual <= 1e-8);
        REQUIRE(rep.offdiag <= 1e-8);
    }
    SECTION("quadric graph: principal curvatures 2 and 0 at the origin") {
        const UmbilicityReport rep = umbilicity_test(make_quadric_graph(), point2(0.0, 0.0));
        REQUIRE(rep.residual > 0.1);
    }
    SECTION("identity is vacuously umbilical") {
        const UmbilicityReport rep = umbilicity_test(make_identity(2), point2(0.0, 0.0));
        REQUIRE(rep.residual == 0.0);
        REQUIRE(rep.H2.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("umbilical within tolerance implies the isotropic verdict on built-ins") {
    struct Case {
        SmoothMap map;
        Vec p;
    };
    std::vector<Case> cases;
    cases.push_back({make_sphere_immersion(1.0), point2(1.0, 2.0)});
    cases.push_back({make_sphere_immersion(2.0), point2(1.5, 4.0)});
    cases.push_back({make_identity(3), Vec::Zero(3)});
    Vec p4(4);
    p4 << 0.4, -0.3, 0.8, 0.1;
    cases.push_back({make_projection(4, 2), p4});
    for (const auto& [map, p] : cases) {
        const UmbilicityReport urep = umbilicity_test(map, p);
        if (urep.residual <= 1e-6 && urep.offdiag <= 1e-6) {
            const IsotropyReport irep = isotropy_test(map, p, 50, 77);
            INFO(map.name());
            REQUIRE(irep.verdict == IsotropyVerdict::isotropic_at_tol);
        }
    }
}

TEST_CASE("composition of maps") {
    SECTION("identity composed with identity is the identity") {
        const SmoothMap id = make_identity(2);
        const SmoothMap comp = compose(id, id);
        Rng rng(1);
        const Vec p = rng.normal_vector(2);
        REQUIRE((comp.value(p) - p).cwiseAbs().maxCoeff() == 0.0);
        REQUIRE(composition_residual(id, id, comp, p, Vec::Unit(2, 0), Vec::Unit(2, 1)) == 0.0);
    }
    SECTION("the worked example factors through the submersion and immersion") {
        const SmoothMap phi = make_paper_submersion();
        const SmoothMap psi = make_paper_immersion();
        const SmoothMap composite = compose(phi, psi);
        const SmoothMap direct = make_paper_example();
        Rng rng(55);
        for (int trial = 0; trial < 50; ++trial) {
            Vec p(4);
            for (int i = 0; i < 4; ++i) p[i] = rng.uniform(-2.0, 2.0);
            REQUIRE((composite.value(p) - direct.value(p)).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
    SECTION("chart mismatch is an error") {
        REQUIRE_THROWS_AS(compose(make_projection(3, 2), make_identity(3)), GeometryError);
    }
}

TEST_CASE("composition identity for second fundamental forms at seeded points") {
    Rng rng(4040);
    SECTION("worked-example factorization") {
        const SmoothMap phi = make_paper_submersion();
        const SmoothMap psi = make_paper_immersion();
        const SmoothMap composite = compose(phi, psi);
        for (int trial = 0; trial < 50; ++trial) {
            Vec p(4);
            for (int i = 0; i < 4; ++i) p[i] = rng.uniform(-1.5, 1.5);
            const Vec X = rng.normal_vector(4);
            const Vec Y = rng.normal_vector(4);
            REQUIRE(composition_residual(phi, psi, composite, p, X, Y) <= 1e-6);
        }
    }
    SECTION("synthetic submersion-then-immersion pair") {
        const SmoothMap phi = make_projection(3, 2);
        ChartManifold e2 = make_euclidean(2);
        ChartManifold e3 = make_euclidean(3);
        std::vector<Expr> comps = {Expr::parse("x1", 2), Expr::parse("x2", 2),
                                   Expr::parse("x1^2 + x2^2", 2)};
        const SmoothMap psi("bowl_immersion", e2, e3, comps);
        const SmoothMap composite = compose(phi, psi);
        for (int trial = 0; trial < 50; ++trial) {
            Vec p(3);
            for (int i = 0; i < 3; ++i) p[i] = rng.uniform(-1.5, 1.5);
            const Vec X = rng.normal_vector(3);
            const Vec Y = rng.normal_vector(3);
            REQUIRE(composition_residual(phi, psi, composite, p, X, Y) <= 1e-6);
        }
    }
}

TEST_CASE("lambda spread and the orthogonal-pair criterion agree empirically") {
    // Both directions of the pointwise criterion: the two tests must agree on
    // every built-in and on random quadratic maps (a counterexample would be
    // a hard failure).
    Rng rng(31337);
    std::vector<std::pair<SmoothMap, Vec>> cases;
    cases.emplace_back(make_sphere_immersion(1.0), point2(1.2, 2.0));
    cases.emplace_back(make_sphere_immersion(0.5), point2(1.8, 1.0));
    cases.emplace_back(make_identity(3), Vec::Zero(3));
    cases.emplace_back(make_quadric_graph(), point2(0.0, 0.0));
    cases.emplace_back(make_quadric_graph(), point2(0.5, -1.0));
    {
        Vec p(4);
        p << std::sqrt(2.0), 0.0, 0.0, 0.0;
        cases.emplace_back(make_paper_example(), p);
    }

    const ChartManifold e3 = make_euclidean(3);
    for (int k = 0; k < 20; ++k) {
        std::vector<Expr> comps;
        for (int a = 0; a < 3; ++a) {
            std::string src;
            // random linear part plus (for most maps) a random quadratic part
            for (int i = 0; i < 3; ++i) {
                const double c = std::round(rng.uniform(-8.0, 8.0)) / 4.0;
                src += (i ? " + " : "") + detail::format_param(c) + "*x" + std::to_string(i + 1);
            }
            if (k >= 5) {
                for (int i = 0; i < 3; ++i)
                    for (int j = i; j < 3; ++j) {
                        const double c = std::round(rng.uniform(-4.0, 4.0)) / 8.0;
                        if (c == 0.0) continue;
                        src += " + " + detail::format_param(c) + "*x" + std::to_string(i + 1) +
                               "*x" + std::to_string(j + 1);
                    }
            }
            comps.push_back(Expr::parse(src, 3));
        }
        SmoothMap T("random_poly_" + std::to_string(k), e3, e3, comps);
        Vec p(3);
        for (int i = 0; i < 3; ++i) p[i] = rng.uniform(-0.5, 0.5);
        cases.emplace_back(std::move(T), p);
    }

    for (const auto& [map, p] : cases) {
        IsotropyReport rep;
        try {
            rep = isotropy_test(map, p, 40, 515);
        } catch (const GeometryError&) {
            continue;  // rank-degenerate draw
        }
        if (rep.verdict == IsotropyVerdict::degenerate) continue;
        const bool spread_small = rep.lambda_spread() <= 1e-6;
        const bool pairs_small = rep.lemma_residual <= 1e-6;
        INFO(map.name() << ": spread " << rep.lambda_spread() << ", pairs "
                        << rep.lemma_residual);
        REQUIRE(spread_small == pairs_small);
    }
}
