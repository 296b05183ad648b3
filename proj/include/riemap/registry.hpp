#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "riemap/map.hpp"

namespace riemap {

namespace detail {

inline std::string format_param(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

struct RegistryName {
    std::string base;
    std::vector<double> params;
};

inline RegistryName parse_registry_name(std::string_view name) {
    RegistryName rn;
    const std::size_t brace = name.find('{');
    if (brace == std::string_view::npos) {
        rn.base = std::string(name);
        return rn;
    }
    if (name.back() != '}') throw Error("malformed registry name '" + std::string(name) + "'");
    rn.base = std::string(name.substr(0, brace));
    std::string_view inner = name.substr(brace + 1, name.size() - brace - 2);
    while (!inner.empty()) {
        const std::size_t comma = inner.find(',');
        std::string_view part = inner.substr(0, comma);
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
        if (ec != std::errc() || ptr != part.data() + part.size())
            throw Error("malformed parameter in registry name '" + std::string(name) + "'");
        rn.params.push_back(value);
        if (comma == std::string_view::npos) break;
        inner.remove_prefix(comma + 1);
    }
    return rn;
}

inline int int_param(const RegistryName& rn, std::size_t i) {
    const double v = rn.params.at(i);
    const int n = static_cast<int>(v);
    if (static_cast<double>(n) != v) throw Error("parameter must be an integer in '" + rn.base + "'");
    return n;
}

}  // namespace detail

inline ChartManifold make_euclidean(int n) {
    if (n < 1) throw Error("euclidean dimension must be >= 1");
    std::vector<Interval> domain(static_cast<std::size_t>(n), Interval{-1e8, 1e8});
    std::vector<Expr> g;
    g.reserve(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g.push_back(Expr::constant(i == j ? 1.0 : 0.0, n));
    return ChartManifold("euclidean{" + std::to_string(n) + "}", std::move(domain), std::move(g));
}

/// Round 2-sphere of radius r in the polar chart (theta, phi), metric
/// diag(r^2, r^2 sin^2 theta); the chart stays clear of the poles.
inline ChartManifold make_sphere(double r) {
    if (!(r > 0.0)) throw Error("sphere radius must be positive");
    const std::string r2 = detail::format_param(r * r);
    std::vector<Interval> domain = {{0.05, 3.14159265358979323846 - 0.05},
                                    {0.0, 2.0 * 3.14159265358979323846}};
    std::vector<Expr> g = {
        Expr::parse(r2, 2), Expr::parse("0", 2),
        Expr::parse("0", 2), Expr::parse(r2 + "*sin(x1)^2", 2)};
    return ChartManifold("sphere{" + detail::format_param(r) + "}", std::move(domain), std::move(g));
}

/// Round 3-sphere of radius r in hyperspherical coordinates (theta1, theta2,
/// phi), metric diag(r^2, r^2 sin^2 theta1, r^2 sin^2 theta1 sin^2 theta2).
/// Hosts genuine helices (torsion needs three dimensions).
inline ChartManifold make_sphere3(double r) {
    if (!(r > 0.0)) throw Error("sphere radius must be positive");
    const std::string r2 = detail::format_param(r * r);
    const double pi = 3.14159265358979323846;
    std::vector<Interval> domain = {{0.05, pi - 0.05}, {0.05, pi - 0.05}, {0.0, 2.0 * pi}};
    std::vector<Expr> g(9, Expr::parse("0", 3));
    g[0] = Expr::parse(r2, 3);
    g[4] = Expr::parse(r2 + "*sin(x1)^2", 3);
    g[8] = Expr::parse(r2 + "*sin(x1)^2*sin(x2)^2", 3);
    return ChartManifold("sphere3{" + detail::format_param(r) + "}", std::move(domain), std::move(g));
}

inline ChartManifold manifold_from_name(std::string_view name) {
    const detail::RegistryName rn = detail::parse_registry_name(name);
    if (rn.base == "euclidean") return make_euclidean(detail::int_param(rn, 0));
    if (rn.base == "sphere") return make_sphere(rn.params.at(0));
    if (rn.base == "sphere3") return make_sphere3(rn.params.at(0));
    throw Error("unknown manifold '" + std::string(name) + "'");
}

inline SmoothMap make_identity(int n) {
    std::vector<Expr> comps;
    comps.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) comps.push_back(Expr::variable(i, n));
    return SmoothMap("identity{" + std::to_string(n) + "}", make_euclidean(n), make_euclidean(n),
                     std::move(comps));
}

/// Isometric immersion of the r-sphere into Euclidean 3-space.
inline SmoothMap make_sphere_immersion(double r) {
    const std::string rs = detail::format_param(r);
    std::vector<Expr> comps = {Expr::parse(rs + "*sin(x1)*cos(x2)", 2),
                               Expr::parse(rs + "*sin(x1)*sin(x2)", 2),
                               Expr::parse(rs + "*cos(x1)", 2)};
    return SmoothMap("sphere_immersion{" + rs + "}", make_sphere(r), make_euclidean(3),
                     std::move(comps));
}

/// Isometric immersion of the r-3-sphere into Euclidean 4-space.
inline SmoothMap make_sphere3_immersion(double r) {
    const std::string rs = detail::format_param(r);
    std::vector<Expr> comps = {Expr::parse(rs + "*cos(x1)", 3),
                               Expr::parse(rs + "*sin(x1)*cos(x2)", 3),
                               Expr::parse(rs + "*sin(x1)*sin(x2)*cos(x3)", 3),
                               Expr::parse(rs + "*sin(x1)*sin(x2)*sin(x3)", 3)};
    return SmoothMap("sphere3_immersion{" + rs + "}", make_sphere3(r), make_euclidean(4),
                     std::move(comps));
}

/// Drop the last m-n coordinates: the canonical Riemannian submersion.
inline SmoothMap make_projection(int m, int n) {
    if (n < 1 || n >= m) throw Error("projection{m,n} needs 1 <= n < m");
    std::vector<Expr> comps;
    comps.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) comps.push_back(Expr::variable(i, m));
    return SmoothMap("projection{" + std::to_string(m) + "," + std::to_string(n) + "}",
                     make_euclidean(m), make_euclidean(n), std::move(comps));
}

/// x -> c x on the plane; not a Riemannian map for c != 1 (negative control).
inline SmoothMap make_scaling(double c) {
    const std::string cs = detail::format_param(c);
    std::vector<Expr> comps = {Expr::parse(cs + "*x1", 2), Expr::parse(cs + "*x2", 2)};
    return SmoothMap("scaling{" + cs + "}", make_euclidean(2), make_euclidean(2),
                     std::move(comps));
}

/// The worked example: R^4 -> R^3,
///   ( (x1-x2)^2/2 - x3^2, sqrt(2)(x1-x2) x3, 0 ),
/// the composite of the submersion ((x1-x2)/sqrt 2, x3) with the plane
/// immersion (u1^2-u2^2, 2 u1 u2, 0).
inline SmoothMap make_paper_example() {
    std::vector<Expr> comps = {Expr::parse("(x1 - x2)^2/2 - x3^2", 4),
                               Expr::parse("sqrt(2)*(x1 - x2)*x3", 4),
                               Expr::parse("0", 4)};
    return SmoothMap("paper_example", make_euclidean(4), make_euclidean(3), std::move(comps));
}

inline SmoothMap make_paper_submersion() {
    std::vector<Expr> comps = {Expr::parse("(x1 - x2)/sqrt(2)", 4), Expr::parse("x3", 4)};
    return SmoothMap("paper_submersion", make_euclidean(4), make_euclidean(2), std::move(comps));
}

inline SmoothMap make_paper_immersion() {
    std::vector<Expr> comps = {Expr::parse("x1^2 - x2^2", 2), Expr::parse("2*x1*x2", 2),
                               Expr::parse("0", 2)};
    return SmoothMap("paper_immersion", make_euclidean(2), make_euclidean(3), std::move(comps));
}

/// Graph of the quadric x3 = x1^2 with the pullback metric on the source, so
/// the map is an isometric immersion with direction-dependent normal
/// curvature (the standard anisotropic example).
inline SmoothMap make_quadric_graph() {
    std::vector<Interval> domain(2, Interval{-3.0, 3.0});
    std::vector<Expr> g = {Expr::parse("1 + 4*x1^2", 2), Expr::parse("0", 2),
                           Expr::parse("0", 2), Expr::parse("1", 2)};
    ChartManifold source("quadric_chart", std::move(domain), std::move(g));
    std::vector<Expr> comps = {Expr::parse("x1", 2), Expr::parse("x2", 2),
                               Expr::parse("x1^2", 2)};
    return SmoothMap("quadric_graph", std::move(source), make_euclidean(3), std::move(comps));
}

inline SmoothMap map_from_name(std::string_view name) {
    const detail::RegistryName rn = detail::parse_registry_name(name);
    if (rn.base == "identity") return make_identity(detail::int_param(rn, 0));
    if (rn.base == "sphere_immersion") return make_sphere_immersion(rn.params.at(0));
    if (rn.base == "sphere3_immersion") return make_sphere3_immersion(rn.params.at(0));
    if (rn.base == "projection")
        return make_projection(detail::int_param(rn, 0), detail::int_param(rn, 1));
    if (rn.base == "scaling") return make_scaling(rn.params.at(0));
    if (rn.base == "paper_example") return make_paper_example();
    if (rn.base == "quadric_graph") return make_quadric_graph();
    throw Error("unknown map '" + std::string(name) + "'");
}

}  // namespace riemap
