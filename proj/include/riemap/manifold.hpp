#pragma once

#include <Eigen/Eigenvalues>
#include <string>
#include <utility>
#include <vector>

#include "riemap/diff.hpp"
#include "riemap/expr.hpp"
#include "riemap/linalg.hpp"

namespace riemap {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x) const { return x > lo && x < hi; }
};

/// Tangent vector attached to a chart point.
struct TangentVector {
    Vec base;
    Vec components;
};

/// 4th-order first derivative of uniformly sampled data (5-point one-sided
/// stencils at the two samples nearest each end). Needs >= 5 samples.
inline std::vector<Vec> grid_derivative(const std::vector<Vec>& f, double step) {
    const int n = static_cast<int>(f.size());
    if (n < 5) throw GeometryError("grid_derivative: need at least 5 samples");
    const double inv = 1.0 / (12.0 * step);
    std::vector<Vec> d(static_cast<std::size_t>(n));
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * inv;
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * inv;
    for (int i = 2; i < n - 2; ++i)
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * inv;
    d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) * inv;
    d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) * inv;
    return d;
}

/// Riemannian manifold presented in a single coordinate chart: an open box
/// domain plus a metric tensor field with entries given as expressions of the
/// coordinates. Expressions cover both the built-in metrics and user-supplied
/// ones, and differentiate exactly under Dual2 evaluation.
class ChartManifold {
public:
    ChartManifold() = default;

    ChartManifold(std::string name, std::vector<Interval> domain, std::vector<Expr> metric_entries)
        : name_(std::move(name)), domain_(std::move(domain)), metric_(std::move(metric_entries)) {
        dim_ = static_cast<int>(domain_.size());
        if (dim_ < 1) throw GeometryError("manifold dimension must be >= 1");
        if (static_cast<int>(metric_.size()) != dim_ * dim_)
            throw GeometryError("metric needs dim*dim entries");
        constant_metric_ = true;
        for (const Expr& e : metric_)
            if (!e.is_constant()) constant_metric_ = false;
        if (constant_metric_) {
            const std::vector<double> origin(static_cast<std::size_t>(dim_), 0.0);
            const_g_ = Mat(dim_, dim_);
            for (int i = 0; i < dim_; ++i)
                for (int j = 0; j < dim_; ++j)
                    const_g_(i, j) = metric_[static_cast<std::size_t>(i * dim_ + j)].evaluate(origin);
            check_spd(const_g_, "constant metric");
        }
    }

    const std::string& name() const { return name_; }
    int dim() const { return dim_; }
    const std::vector<Interval>& domain() const { return domain_; }
    const std::vector<Expr>& metric_entries() const { return metric_; }
    bool has_constant_metric() const { return constant_metric_; }

    bool in_domain(const Vec& u) const {
        if (u.size() != dim_) return false;
        for (int i = 0; i < dim_; ++i)
            if (!domain_[static_cast<std::size_t>(i)].contains(u[i])) return false;
        return u.allFinite();
    }

    void require_in_domain(const Vec& u) const {
        if (!in_domain(u))
            throw GeometryError("point outside chart domain of " + name_);
    }

    /// Metric tensor at u, SPD-checked (smallest eigenvalue > 1e-10).
    Mat metric(const Vec& u) const {
        if (constant_metric_) return const_g_;
        std::vector<double> args(u.data(), u.data() + u.size());
        Mat g(dim_, dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j)
                g(i, j) = metric_[static_cast<std::size_t>(i * dim_ + j)].evaluate(args);
        check_spd(g, "metric at queried point");
        return g;
    }

    double inner(const Vec& u, const Vec& a, const Vec& b) const {
        return riemap::inner(metric(u), a, b);
    }

    double norm(const Vec& u, const Vec& a) const { return riemap::norm(metric(u), a); }

    /// Levi-Civita connection coefficients,
    ///   Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij),
    /// with metric derivatives from dual-number evaluation. Result[k](i,j),
    /// symmetric in (i,j).
    std::vector<Mat> christoffel(const Vec& u) const {
        std::vector<Mat> gamma(static_cast<std::size_t>(dim_), Mat::Zero(dim_, dim_));
        if (constant_metric_) return gamma;

        std::vector<Dual2> args;
        args.reserve(static_cast<std::size_t>(dim_));
        for (int i = 0; i < dim_; ++i) args.push_back(Dual2::variable(u[i], i, dim_));

        Mat g(dim_, dim_);
        std::vector<Mat> dg(static_cast<std::size_t>(dim_), Mat(dim_, dim_));  // dg[l](i,j) = d_l g_ij
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) {
                const Dual2 e = metric_[static_cast<std::size_t>(i * dim_ + j)].evaluate(args);
                g(i, j) = e.value;
                for (int l = 0; l < dim_; ++l)
                    dg[static_cast<std::size_t>(l)](i, j) = e.is_constant() ? 0.0 : e.grad[l];
            }
        check_spd(g, "metric at queried point");
        const Mat ginv = g.inverse();

        for (int k = 0; k < dim_; ++k)
            for (int i = 0; i < dim_; ++i)
                for (int j = i; j < dim_; ++j) {
                    double sum = 0.0;
                    for (int l = 0; l < dim_; ++l)
                        sum += ginv(k, l) * (dg[static_cast<std::size_t>(i)](j, l) +
                                             dg[static_cast<std::size_t>(j)](i, l) -
                                             dg[static_cast<std::size_t>(l)](i, j));
                    gamma[static_cast<std::size_t>(k)](i, j) = 0.5 * sum;
                    gamma[static_cast<std::size_t>(k)](j, i) = 0.5 * sum;
                }
        return gamma;
    }

    /// Contract Gamma(u) with two vectors: result^k = Gamma^k_ij a^i b^j.
    static Vec contract(const std::vector<Mat>& gamma, const Vec& a, const Vec& b) {
        const int dim = static_cast<int>(gamma.size());
        Vec r(dim);
        for (int k = 0; k < dim; ++k) r[k] = a.dot(gamma[static_cast<std::size_t>(k)] * b);
        return r;
    }

private:
    std::string name_;
    int dim_ = 0;
    std::vector<Interval> domain_;
    std::vector<Expr> metric_;
    bool constant_metric_ = false;
    Mat const_g_;

    static void check_spd(const Mat& g, const char* what) {
        if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12)
            throw GeometryError(std::string(what) + " is not symmetric");
        Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() <= 1e-10)
            throw GeometryError(std::string(what) + " is not positive definite");
    }
};

/// Covariant derivative of a vector field W along a sampled path:
///   (D W / ds)^k = dW^k/ds + Gamma^k_ij udot^i W^j,
/// with d/ds by 4th-order stencils. Path and field share one uniform s-grid.
inline std::vector<Vec> covariant_derivative_along(const ChartManifold& M,
                                                   const std::vector<Vec>& positions,
                                                   const std::vector<Vec>& field,
                                                   double step) {
    if (positions.size() != field.size())
        throw GeometryError("covariant_derivative_along: grid mismatch");
    if (positions.size() < 5)
        throw GeometryError("covariant_derivative_along: need at least 5 samples");
    const std::vector<Vec> udot = grid_derivative(positions, step);
    std::vector<Vec> result = grid_derivative(field, step);
    if (!M.has_constant_metric()) {
        for (std::size_t i = 0; i < positions.size(); ++i)
            result[i] += ChartManifold::contract(M.christoffel(positions[i]), udot[i], field[i]);
    }
    return result;
}

}  // namespace riemap
