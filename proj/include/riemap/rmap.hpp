#pragma once

#include <vector>

#include "riemap/map.hpp"
#include "riemap/rng.hpp"

namespace riemap {

/// Second fundamental form of the map at a jet, in coordinates:
///   (sff(X,Y))^a = X^i Y^j ( H^a_ij - Gamma1^k_ij J^a_k + Gamma2^a_bc J^b_i J^c_j ).
/// Manifestly symmetric in (X, Y); normal-valued on horizontal pairs when the
/// map is Riemannian.
inline Vec second_fundamental_form(const MapJet& jt, const Vec& X, const Vec& Y) {
    const int n = jt.target_dim();
    const int m = jt.source_dim();
    Vec result(n);
    Vec w(m);
    for (int k = 0; k < m; ++k) w[k] = X.dot(jt.gamma1[static_cast<std::size_t>(k)] * Y);
    const Vec JX = jt.J * X;
    const Vec JY = jt.J * Y;
    for (int a = 0; a < n; ++a)
        result[a] = X.dot(jt.H[static_cast<std::size_t>(a)] * Y) +
                    JX.dot(jt.gamma2[static_cast<std::size_t>(a)] * JY);
    result -= jt.J * w;
    return result;
}

inline Vec second_fundamental_form(const SmoothMap& T, const Vec& p, const Vec& X, const Vec& Y) {
    return second_fundamental_form(jet(T, p), X, Y);
}

/// Draw a unit horizontal vector (Gaussian coefficients in the horizontal
/// basis, normalized; rotation-invariant on the horizontal sphere).
inline Vec random_unit_horizontal(const MapJet& jt, Rng& rng) {
    if (jt.rank < 1) throw GeometryError("no horizontal directions at a degenerate jet");
    for (;;) {
        Vec c = rng.normal_vector(jt.rank);
        const double n = c.norm();
        if (n < 1e-8) continue;
        c /= n;
        Vec v = Vec::Zero(jt.source_dim());
        for (int i = 0; i < jt.rank; ++i) v += c[i] * jt.horiz[static_cast<std::size_t>(i)];
        return v;
    }
}

/// Draw a g1-orthonormal horizontal pair.
inline std::pair<Vec, Vec> random_horizontal_pair(const MapJet& jt, Rng& rng) {
    if (jt.rank < 2) throw GeometryError("horizontal pair needs rank >= 2");
    for (;;) {
        Vec c1 = rng.normal_vector(jt.rank);
        Vec c2 = rng.normal_vector(jt.rank);
        if (c1.norm() < 1e-8) continue;
        c1.normalize();
        c2 -= c1.dot(c2) * c1;
        if (c2.norm() < 1e-8) continue;
        c2.normalize();
        Vec v1 = Vec::Zero(jt.source_dim());
        Vec v2 = Vec::Zero(jt.source_dim());
        for (int i = 0; i < jt.rank; ++i) {
            v1 += c1[i] * jt.horiz[static_cast<std::size_t>(i)];
            v2 += c2[i] * jt.horiz[static_cast<std::size_t>(i)];
        }
        return {v1, v2};
    }
}

struct NormalValuedCheck {
    double residual = 0.0;
    double isometry_residual = 0.0;
    bool riemannian = false;  // precondition; when false the residual is informational
};

/// Largest |g2(sff(X1,X2), J X3)| over seeded random horizontal triples.
/// Zero (to tolerance) exactly when the second fundamental form is
/// normal-valued on the horizontal space.
inline NormalValuedCheck check_normal_valued(const SmoothMap& T, const Vec& p, int trials,
                                             std::uint64_t seed) {
    const MapJet jt = jet(T, p);
    NormalValuedCheck check;
    const IsometryCheck iso = is_riemannian_at(jt);
    check.isometry_residual = iso.residual;
    check.riemannian = iso.ok;
    Rng rng = Rng::stream(seed, 0x6e6f726d);
    for (int t = 0; t < trials; ++t) {
        const Vec x1 = random_unit_horizontal(jt, rng);
        const Vec x2 = random_unit_horizontal(jt, rng);
        const Vec x3 = random_unit_horizontal(jt, rng);
        const Vec s = second_fundamental_form(jt, x1, x2);
        check.residual = std::max(check.residual, std::abs(inner(jt.g2, s, jt.J * x3)));
    }
    return check;
}

/// Shape operator S_U applied to T_* X, solved from the duality
///   g2(S_U T_*X, J h_j) = g2(U, sff(X, h_j))
/// in the pushed horizontal basis. U must lie in the normal space.
inline Vec shape_operator(const MapJet& jt, const Vec& U, const Vec& X) {
    if (jt.normal.empty())
        throw GeometryError("shape_operator: map has no normal directions");
    const Vec off = U - jt.project_normal(U);
    if (std::sqrt(inner(jt.g2, off, off)) > 1e-8)
        throw GeometryError("shape_operator: U is not a normal vector");

    const int r = jt.rank;
    Mat A(r, r);
    Vec b(r);
    std::vector<Vec> Jh(static_cast<std::size_t>(r));
    for (int j = 0; j < r; ++j) Jh[static_cast<std::size_t>(j)] = jt.J * jt.horiz[static_cast<std::size_t>(j)];
    for (int j = 0; j < r; ++j) {
        for (int k = 0; k < r; ++k)
            A(j, k) = inner(jt.g2, Jh[static_cast<std::size_t>(k)], Jh[static_cast<std::size_t>(j)]);
        b[j] = inner(jt.g2, U, second_fundamental_form(jt, X, jt.horiz[static_cast<std::size_t>(j)]));
    }
    const Vec c = A.ldlt().solve(b);
    Vec result = Vec::Zero(jt.target_dim());
    for (int j = 0; j < r; ++j) result += c[j] * Jh[static_cast<std::size_t>(j)];
    return result;
}

/// Adjoint of the differential: the unique horizontal v with
/// g1(v, h) = g2(w, J h) for every horizontal h. Annihilates normal vectors.
inline Vec adjoint_pushforward(const MapJet& jt, const Vec& w) {
    Vec v = Vec::Zero(jt.source_dim());
    for (int i = 0; i < jt.rank; ++i)
        v += inner(jt.g2, w, jt.J * jt.horiz[static_cast<std::size_t>(i)]) *
             jt.horiz[static_cast<std::size_t>(i)];
    return v;
}

/// Jets of the map at every sample of a source curve, plus the image
/// positions. The shared grid makes every along-curve derivative a stencil.
struct JetPath {
    const SmoothMap* map = nullptr;
    double step = 0.0;
    std::vector<Vec> positions;  // source samples u(s)
    std::vector<Vec> images;     // q(s) = T(u(s))
    std::vector<MapJet> jets;

    int size() const { return static_cast<int>(jets.size()); }
};

inline JetPath jets_along(const SmoothMap& T, const std::vector<Vec>& positions, double step) {
    JetPath path;
    path.map = &T;
    path.step = step;
    path.positions = positions;
    path.jets.reserve(positions.size());
    path.images.reserve(positions.size());
    for (const Vec& u : positions) {
        path.jets.push_back(jet(T, u));
        path.images.push_back(path.jets.back().q);
    }
    return path;
}

/// Pullback-connection derivative of a target-valued field along T∘curve:
///   (D Y / ds)^a = dY^a/ds + Gamma2^a_bc qdot^b Y^c.
inline std::vector<Vec> pullback_derivative(const JetPath& path, const std::vector<Vec>& values) {
    if (values.size() != path.jets.size())
        throw GeometryError("pullback_derivative: grid mismatch");
    const std::vector<Vec> qdot = grid_derivative(path.images, path.step);
    std::vector<Vec> result = grid_derivative(values, path.step);
    if (!path.map->target().has_constant_metric()) {
        for (std::size_t i = 0; i < values.size(); ++i)
            result[i] += ChartManifold::contract(path.jets[i].gamma2, qdot[i], values[i]);
    }
    return result;
}

/// Largest per-sample norm of the non-normal component of a field that is
/// supposed to live in (range T_*)^perp.
inline double normal_field_residual(const JetPath& path, const std::vector<Vec>& values) {
    double worst = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const Vec off = values[i] - path.jets[i].project_normal(values[i]);
        worst = std::max(worst, std::sqrt(inner(path.jets[i].g2, off, off)));
    }
    return worst;
}

/// Normal connection along the curve: pullback derivative projected onto the
/// normal space at each sample.
inline std::vector<Vec> normal_connection_along(const JetPath& path,
                                                const std::vector<Vec>& values) {
    std::vector<Vec> d = pullback_derivative(path, values);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = path.jets[i].project_normal(d[i]);
    return d;
}

/// Covariant derivative of the second fundamental form along the curve
/// tangent:
///   (nabla sff)(X2,X3) = D^perp[sff(X2,X3)] - sff(DX2, X3) - sff(X2, DX3).
inline std::vector<Vec> nabla_sff(const JetPath& path, const std::vector<Vec>& X2,
                                  const std::vector<Vec>& X3) {
    const std::size_t n = path.jets.size();
    if (X2.size() != n || X3.size() != n) throw GeometryError("nabla_sff: grid mismatch");

    std::vector<Vec> s23(n);
    for (std::size_t i = 0; i < n; ++i)
        s23[i] = second_fundamental_form(path.jets[i], X2[i], X3[i]);
    std::vector<Vec> result = normal_connection_along(path, s23);

    const ChartManifold& source = path.map->source();
    const std::vector<Vec> dX2 = covariant_derivative_along(source, path.positions, X2, path.step);
    const std::vector<Vec> dX3 = covariant_derivative_along(source, path.positions, X3, path.step);
    for (std::size_t i = 0; i < n; ++i) {
        result[i] -= second_fundamental_form(path.jets[i], dX2[i], X3[i]);
        result[i] -= second_fundamental_form(path.jets[i], X2[i], dX3[i]);
    }
    return result;
}

/// Max-over-samples difference between the two sides of the covariant
/// derivative identity pairing nabla_sff with the shape-operator derivative:
///   < (nabla_X1 sff)(X2,X3), U > = < (nabla_X1 S)_U T_*(X2), T_*(X3) >,
/// the right side assembled from the adjoint map, the normal connection and
/// the range-projected pullback derivative.
inline double lemma21_residual(const JetPath& path, const std::vector<Vec>& X2,
                               const std::vector<Vec>& X3, const std::vector<Vec>& U) {
    const std::size_t n = path.jets.size();
    if (X2.size() != n || X3.size() != n || U.size() != n)
        throw GeometryError("lemma21_residual: grid mismatch");

    if (path.jets.front().normal.empty()) return 0.0;  // no normal space: both sides vanish

    const std::vector<Vec> lhs_field = nabla_sff(path, X2, X3);

    // Term a: T_*( D[ *T_*( S_U T_*X2 ) ] ) with D the source covariant
    // derivative along the curve.
    std::vector<Vec> Z(n);
    for (std::size_t i = 0; i < n; ++i)
        Z[i] = adjoint_pushforward(path.jets[i], shape_operator(path.jets[i], U[i], X2[i]));
    const std::vector<Vec> dZ =
        covariant_derivative_along(path.map->source(), path.positions, Z, path.step);

    // Term b: S_{D^perp U} T_* X2.
    const std::vector<Vec> dU = normal_connection_along(path, U);

    // Term c: S_U ( P D[T_* X2] ), P the range projection.
    std::vector<Vec> JX2(n);
    for (std::size_t i = 0; i < n; ++i) JX2[i] = path.jets[i].J * X2[i];
    const std::vector<Vec> dJX2 = pullback_derivative(path, JX2);

    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const MapJet& jt = path.jets[i];
        const Vec JX3 = jt.J * X3[i];
        const double lhs = inner(jt.g2, lhs_field[i], U[i]);

        const Vec term_a = jt.J * dZ[i];
        const Vec term_b = shape_operator(jt, dU[i], X2[i]);
        const Vec h = jt.horizontal_preimage(jt.project_range(dJX2[i]));
        const Vec term_c = shape_operator(jt, U[i], h);
        const double rhs = inner(jt.g2, term_a - term_b - term_c, JX3);

        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

}  // namespace riemap
