#pragma once

#include <Eigen/Dense>
#include <vector>

#include "riemap/dual2.hpp"
#include "riemap/errors.hpp"

namespace riemap {

/// Scale-invariant tolerance below which a direction counts as dependent.
inline double rank_tolerance(double largest_norm) {
    return 1e-8 * largest_norm;
}

inline double inner(const Mat& g, const Vec& a, const Vec& b) {
    return a.dot(g * b);
}

inline double norm(const Mat& g, const Vec& a) {
    const double q = inner(g, a, a);
    if (q < 0.0) throw GeometryError("inner product is not positive definite (negative norm)");
    return std::sqrt(q);
}

/// Gram-Schmidt with respect to an SPD bilinear form. Dependent inputs
/// (post-projection norm below rank_tolerance of the largest input norm) are
/// dropped. Two projection passes keep the result orthonormal to ~1e-15.
inline std::vector<Vec> orthonormalize(const std::vector<Vec>& vectors, const Mat& g) {
    std::vector<Vec> basis;
    if (vectors.empty()) return basis;

    double largest = 0.0;
    for (const Vec& v : vectors) largest = std::max(largest, norm(g, v));
    const double tol = rank_tolerance(largest);

    for (const Vec& v : vectors) {
        Vec w = v;
        for (int pass = 0; pass < 2; ++pass)
            for (const Vec& b : basis) w -= inner(g, b, w) * b;
        const double n = norm(g, w);
        if (n < tol) continue;  // dependent direction
        basis.push_back(w / n);
    }
    return basis;
}

/// Lower Cholesky factor of an SPD matrix; fails loudly when not SPD.
inline Mat cholesky_factor(const Mat& g) {
    Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success)
        throw GeometryError("matrix is not symmetric positive definite");
    return llt.matrixL();
}

/// Complete `given` (assumed g-orthonormal) to a full g-orthonormal basis of
/// the space, returning only the new vectors.
inline std::vector<Vec> orthonormal_complement(const std::vector<Vec>& given, const Mat& g) {
    const int n = static_cast<int>(g.rows());
    std::vector<Vec> all = given;
    for (int i = 0; i < n; ++i) all.push_back(Vec::Unit(n, i));
    std::vector<Vec> full = orthonormalize(all, g);
    return {full.begin() + static_cast<long>(given.size()), full.end()};
}

}  // namespace riemap
