#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riemap/rmap.hpp"

namespace riemap {

enum class IsotropyVerdict { isotropic_at_tol, not_isotropic, degenerate };

inline const char* to_string(IsotropyVerdict v) {
    switch (v) {
        case IsotropyVerdict::isotropic_at_tol: return "isotropic-at-tol";
        case IsotropyVerdict::not_isotropic: return "not-isotropic";
        case IsotropyVerdict::degenerate: return "degenerate";
    }
    return "?";
}

/// Sampled isotropy diagnostics at a point: the spread of
/// lambda(X) = |sff(X,X)| / |T_*X|^2 over random unit horizontal directions,
/// and the orthogonal-pair criterion residual max |g2(sff(X,X), sff(X,Y))|.
struct IsotropyReport {
    Vec point;
    double lambda_mean = 0.0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double lemma_residual = 0.0;
    int sample_count = 0;
    std::uint64_t seed = 0;
    double tol = 1e-6;
    IsotropyVerdict verdict = IsotropyVerdict::degenerate;

    double lambda_spread() const { return lambda_max - lambda_min; }
};

/// Umbilicity diagnostics at a point: mean curvature H2, the worst deviation
/// of each shape operator from g2(H2,U) * Id on the range, and the largest
/// off-diagonal |sff(h_i, h_j)|.
struct UmbilicityReport {
    Vec H2;
    double residual = 0.0;
    double offdiag = 0.0;
};

/// lambda(X) = |sff(X,X)|_g2 / |T_*X|_g2^2 for a unit horizontal X.
inline double lambda_of(const MapJet& jt, const Vec& X) {
    const Mat& g1 = jt.g1;
    if (std::abs(std::sqrt(inner(g1, X, X)) - 1.0) > 1e-8)
        throw GeometryError("lambda_of: X must be a unit vector");
    const Vec off = X - jt.project_horizontal(X);
    if (std::sqrt(inner(g1, off, off)) > 1e-8)
        throw GeometryError("lambda_of: X must be horizontal");
    const Vec s = second_fundamental_form(jt, X, X);
    const Vec JX = jt.J * X;
    return std::sqrt(inner(jt.g2, s, s)) / inner(jt.g2, JX, JX);
}

inline double lambda_of(const SmoothMap& T, const Vec& p, const Vec& X) {
    return lambda_of(jet(T, p), X);
}

/// Sample lambda over seeded unit horizontal directions and the
/// orthogonal-pair products g2(sff(X,X), sff(X,Y)); the verdict is
/// isotropic-at-tol exactly when both the lambda spread and the pair residual
/// stay within tol. Needs rank >= 2 (otherwise degenerate).
inline IsotropyReport isotropy_test(const SmoothMap& T, const Vec& p, int samples,
                                    std::uint64_t seed, double tol = 1e-6) {
    if (samples < 10) throw GeometryError("isotropy_test: need at least 10 samples");
    const MapJet jt = jet(T, p);
    IsotropyReport report;
    report.point = p;
    report.sample_count = samples;
    report.seed = seed;
    report.tol = tol;
    if (jt.rank < 2) {
        report.verdict = IsotropyVerdict::degenerate;
        return report;
    }

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double sum = 0.0;
    for (int i = 0; i < samples; ++i) {
        Rng rng = Rng::stream(seed, 0x6c616d00ULL + static_cast<std::uint64_t>(i));
        const double l = lambda_of(jt, random_unit_horizontal(jt, rng));
        lo = std::min(lo, l);
        hi = std::max(hi, l);
        sum += l;
    }
    report.lambda_min = lo;
    report.lambda_max = hi;
    report.lambda_mean = sum / samples;

    for (int i = 0; i < samples; ++i) {
        Rng rng = Rng::stream(seed, 0x70616900ULL + static_cast<std::uint64_t>(i));
        const auto [x, y] = random_horizontal_pair(jt, rng);
        const Vec sxx = second_fundamental_form(jt, x, x);
        const Vec sxy = second_fundamental_form(jt, x, y);
        report.lemma_residual = std::max(report.lemma_residual, std::abs(inner(jt.g2, sxx, sxy)));
    }

    report.verdict = (report.lambda_spread() <= tol && report.lemma_residual <= tol)
                         ? IsotropyVerdict::isotropic_at_tol
                         : IsotropyVerdict::not_isotropic;
    return report;
}

/// Mean curvature vector: normal projection of the average of sff(h_i, h_i)
/// over the horizontal orthonormal basis. Equals every diagonal value for an
/// umbilical map.
inline Vec mean_curvature(const MapJet& jt) {
    Vec h2 = Vec::Zero(jt.target_dim());
    if (jt.rank == 0) return h2;
    for (int i = 0; i < jt.rank; ++i)
        h2 += second_fundamental_form(jt, jt.horiz[static_cast<std::size_t>(i)],
                                      jt.horiz[static_cast<std::size_t>(i)]);
    h2 /= jt.rank;
    return jt.project_normal(h2);
}

inline Vec mean_curvature(const SmoothMap& T, const Vec& p) { return mean_curvature(jet(T, p)); }

/// Umbilicity residual: max over normal-basis U and range pairs (i,j) of
/// |g2(S_U J h_i, J h_j) - g2(H2, U) delta_ij|, plus the largest off-diagonal
/// |sff(h_i, h_j)|. Vacuously zero when the normal space is empty.
inline UmbilicityReport umbilicity_test(const SmoothMap& T, const Vec& p) {
    const MapJet jt = jet(T, p);
    if (jt.rank < 2) throw GeometryError("umbilicity_test: needs rank >= 2");
    UmbilicityReport report;
    report.H2 = mean_curvature(jt);

    for (const Vec& U : jt.normal) {
        const double scale = inner(jt.g2, report.H2, U);
        for (int i = 0; i < jt.rank; ++i) {
            const Vec SU = shape_operator(jt, U, jt.horiz[static_cast<std::size_t>(i)]);
            for (int j = 0; j < jt.rank; ++j) {
                const Vec Jhj = jt.J * jt.horiz[static_cast<std::size_t>(j)];
                const double want = (i == j) ? scale : 0.0;
                report.residual =
                    std::max(report.residual, std::abs(inner(jt.g2, SU, Jhj) - want));
            }
        }
    }
    for (int i = 0; i < jt.rank; ++i)
        for (int j = i + 1; j < jt.rank; ++j) {
            const Vec s = second_fundamental_form(jt, jt.horiz[static_cast<std::size_t>(i)],
                                                  jt.horiz[static_cast<std::size_t>(j)]);
            report.offdiag = std::max(report.offdiag, std::sqrt(inner(jt.g2, s, s)));
        }
    return report;
}

/// Composite map psi∘phi by expression substitution. The middle charts must
/// coincide.
inline SmoothMap compose(const SmoothMap& phi, const SmoothMap& psi) {
    if (phi.target().dim() != psi.source().dim())
        throw GeometryError("compose: middle chart dimensions differ");
    std::vector<Expr> components;
    components.reserve(psi.components().size());
    for (const Expr& c : psi.components()) components.push_back(c.substitute(phi.components()));
    return SmoothMap(psi.name() + "∘" + phi.name(), phi.source(), psi.target(),
                     std::move(components));
}

/// Residual of the composition identity for second fundamental forms,
///   sff_{psi∘phi}(X,Y) = psi_*( sff_phi(X,Y) ) + sff_psi(phi_* X, phi_* Y),
/// with each side computed independently.
inline double composition_residual(const SmoothMap& phi, const SmoothMap& psi,
                                   const SmoothMap& composite, const Vec& p, const Vec& X,
                                   const Vec& Y) {
    const MapJet jc = jet(composite, p);
    const Vec lhs = second_fundamental_form(jc, X, Y);

    const MapJet jphi = jet(phi, p);
    const MapJet jpsi = jet(psi, jphi.q);
    const Vec rhs = jpsi.J * second_fundamental_form(jphi, X, Y) +
                    second_fundamental_form(jpsi, jphi.J * X, jphi.J * Y);

    return std::sqrt(inner(jc.g2, Vec(lhs - rhs), Vec(lhs - rhs)));
}

}  // namespace riemap
