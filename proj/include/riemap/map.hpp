#pragma once

#include <Eigen/SVD>
#include <string>
#include <utility>
#include <vector>

#include "riemap/diff.hpp"
#include "riemap/frenet.hpp"
#include "riemap/manifold.hpp"

namespace riemap {

/// Smooth map between chart manifolds, given by one coordinate expression per
/// target component. Components evaluate over doubles and Dual2, so the full
/// second-order jet is exact.
class SmoothMap {
public:
    SmoothMap() = default;

    SmoothMap(std::string name, ChartManifold source, ChartManifold target,
              std::vector<Expr> components)
        : name_(std::move(name)),
          source_(std::move(source)),
          target_(std::move(target)),
          components_(std::move(components)) {
        if (static_cast<int>(components_.size()) != target_.dim())
            throw GeometryError("map needs one component per target dimension");
        for (const Expr& c : components_)
            if (c.arity() != source_.dim())
                throw GeometryError("map component arity must equal the source dimension");
    }

    const std::string& name() const { return name_; }
    const ChartManifold& source() const { return source_; }
    const ChartManifold& target() const { return target_; }
    const std::vector<Expr>& components() const { return components_; }

    Vec value(const Vec& p) const {
        std::vector<double> args(p.data(), p.data() + p.size());
        Vec q(target_.dim());
        for (int a = 0; a < target_.dim(); ++a)
            q[a] = components_[static_cast<std::size_t>(a)].evaluate(args);
        return q;
    }

    /// Value, differential and second derivatives at p in one dual pass.
    Jet2 raw_jet(const Vec& p) const {
        return evaluate_jet2(
            [&](const std::vector<Dual2>& args) {
                std::vector<Dual2> out;
                out.reserve(components_.size());
                for (const Expr& c : components_) out.push_back(c.evaluate(args));
                return out;
            },
            p);
    }

private:
    std::string name_;
    ChartManifold source_;
    ChartManifold target_;
    std::vector<Expr> components_;
};

/// Everything the geometry of a map provides at one point: the differential
/// and second derivatives, metrics and connection coefficients on both sides,
/// and the four orthonormal splits
///   T_p M1 = ker ⊕ horizontal,   T_q M2 = range ⊕ normal.
/// The splits come from the singular value decomposition of the differential
/// taken between the two inner-product spaces, so every basis is orthonormal
/// with respect to the correct metric and J maps horiz[i] to sigma[i] *
/// range[i].
struct MapJet {
    Vec p, q;
    Mat J;                   // n x m differential
    std::vector<Mat> H;      // [a](i,j) second derivatives
    Mat g1, g2;              // metrics at p and q
    std::vector<Mat> gamma1, gamma2;  // Christoffels at p and q
    std::vector<Vec> ker, horiz;      // g1-orthonormal
    std::vector<Vec> range, normal;   // g2-orthonormal
    Vec sigma;               // singular values for the horizontal directions
    int rank = 0;
    bool degenerate = false;  // rank 0: map locally constant

    int source_dim() const { return static_cast<int>(p.size()); }
    int target_dim() const { return static_cast<int>(q.size()); }

    /// Coefficients of w in the range basis (g2-orthonormal projection).
    Vec range_coefficients(const Vec& w) const {
        Vec c(rank);
        for (int i = 0; i < rank; ++i) c[i] = inner(g2, range[static_cast<std::size_t>(i)], w);
        return c;
    }

    Vec project_range(const Vec& w) const {
        Vec r = Vec::Zero(q.size());
        for (int i = 0; i < rank; ++i)
            r += inner(g2, range[static_cast<std::size_t>(i)], w) * range[static_cast<std::size_t>(i)];
        return r;
    }

    Vec project_normal(const Vec& w) const {
        Vec r = Vec::Zero(q.size());
        for (const Vec& n : normal) r += inner(g2, n, w) * n;
        return r;
    }

    Vec project_horizontal(const Vec& v) const {
        Vec r = Vec::Zero(p.size());
        for (const Vec& h : horiz) r += inner(g1, h, v) * h;
        return r;
    }

    Vec project_kernel(const Vec& v) const {
        Vec r = Vec::Zero(p.size());
        for (const Vec& k : ker) r += inner(g1, k, v) * k;
        return r;
    }

    /// Horizontal preimage of a range vector (pseudo-inverse of J restricted
    /// to the horizontal space).
    Vec horizontal_preimage(const Vec& w) const {
        Vec v = Vec::Zero(p.size());
        for (int i = 0; i < rank; ++i)
            v += (inner(g2, range[static_cast<std::size_t>(i)], w) / sigma[i]) *
                 horiz[static_cast<std::size_t>(i)];
        return v;
    }
};

/// Compute the full jet of T at p. The kernel is read off the g-SVD with the
/// scale-invariant rank tolerance; rank 0 is flagged degenerate rather than
/// an error so callers can decide.
inline MapJet jet(const SmoothMap& T, const Vec& p) {
    T.source().require_in_domain(p);

    MapJet jt;
    jt.p = p;
    const Jet2 raw = T.raw_jet(p);
    jt.q = raw.value;
    T.target().require_in_domain(jt.q);
    jt.J = raw.jacobian;
    jt.H = raw.hessians;
    jt.g1 = T.source().metric(p);
    jt.g2 = T.target().metric(jt.q);
    jt.gamma1 = T.source().christoffel(p);
    jt.gamma2 = T.target().christoffel(jt.q);

    const int m = T.source().dim();
    const int n = T.target().dim();

    // SVD of the differential between inner-product spaces: L2^T J L1^{-T}.
    const Mat L1 = cholesky_factor(jt.g1);
    const Mat L2 = cholesky_factor(jt.g2);
    const Mat Jhat = L2.transpose() * jt.J *
                     L1.transpose().triangularView<Eigen::Upper>().solve(Mat::Identity(m, m));
    Eigen::JacobiSVD<Mat> svd(Jhat, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv[0] : 0.0;
    const double tol = rank_tolerance(smax);

    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > tol && sv[i] > 0.0) ++rank;
    jt.rank = rank;
    jt.degenerate = (rank == 0);

    // Map orthonormal singular vectors back through the Cholesky factors;
    // the images stay orthonormal in the respective metrics.
    auto back1 = [&](const Vec& v) -> Vec {
        return L1.transpose().triangularView<Eigen::Upper>().solve(v);
    };
    auto back2 = [&](const Vec& u) -> Vec {
        return L2.transpose().triangularView<Eigen::Upper>().solve(u);
    };

    jt.sigma = sv.head(rank);
    for (int i = 0; i < m; ++i) {
        const Vec v = back1(svd.matrixV().col(i));
        if (i < rank)
            jt.horiz.push_back(v);
        else
            jt.ker.push_back(v);
    }
    for (int i = 0; i < n; ++i) {
        const Vec u = back2(svd.matrixU().col(i));
        if (i < rank)
            jt.range.push_back(u);
        else
            jt.normal.push_back(u);
    }
    return jt;
}

/// Result of the linear-isometry test on the horizontal space.
struct IsometryCheck {
    double residual = 0.0;
    bool ok = false;
};

/// Largest deviation of g2(J h_i, J h_j) from delta_ij over the horizontal
/// basis: zero exactly when T is a Riemannian map at p.
inline IsometryCheck is_riemannian_at(const MapJet& jt, double tol = 1e-8) {
    if (jt.degenerate)
        throw GeometryError("is_riemannian_at: jet is rank-degenerate (locally constant map)");
    IsometryCheck check;
    for (int i = 0; i < jt.rank; ++i)
        for (int j = i; j < jt.rank; ++j) {
            const Vec a = jt.J * jt.horiz[static_cast<std::size_t>(i)];
            const Vec b = jt.J * jt.horiz[static_cast<std::size_t>(j)];
            const double want = (i == j) ? 1.0 : 0.0;
            check.residual = std::max(check.residual, std::abs(inner(jt.g2, a, b) - want));
        }
    check.ok = check.residual <= tol;
    return check;
}

inline IsometryCheck is_riemannian_at(const SmoothMap& T, const Vec& p, double tol = 1e-8) {
    return is_riemannian_at(jet(T, p), tol);
}

}  // namespace riemap
