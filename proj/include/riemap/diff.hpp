#pragma once

#include <vector>

#include "riemap/dual2.hpp"

namespace riemap {

/// Value, Jacobian and all component Hessians of a vector function at x,
/// computed in one dual-number evaluation.
struct Jet2 {
    Vec value;                  // a
    Mat jacobian;               // (a, i)
    std::vector<Mat> hessians;  // [a](i, j), symmetric in (i, j)
};

/// f must be callable as std::vector<Dual2> -> std::vector<Dual2>.
template <class F>
Jet2 evaluate_jet2(F&& f, const Vec& x) {
    const int m = static_cast<int>(x.size());
    std::vector<Dual2> args;
    args.reserve(m);
    for (int i = 0; i < m; ++i) args.push_back(Dual2::variable(x[i], i, m));

    const std::vector<Dual2> out = f(args);
    const int n = static_cast<int>(out.size());

    Jet2 jet;
    jet.value = Vec::Zero(n);
    jet.jacobian = Mat::Zero(n, m);
    jet.hessians.assign(n, Mat::Zero(m, m));
    for (int a = 0; a < n; ++a) {
        jet.value[a] = out[a].value;
        if (out[a].is_constant()) continue;
        jet.jacobian.row(a) = out[a].grad.transpose();
        jet.hessians[a] = out[a].hess;
    }
    return jet;
}

/// Entry (a, i) = d f^a / d x^i, exact to round-off for supported primitives.
template <class F>
Mat jacobian(F&& f, const Vec& x) {
    return evaluate_jet2(std::forward<F>(f), x).jacobian;
}

/// Entry (a, i, j) = d^2 f^a / dx^i dx^j; symmetric in (i, j) exactly.
template <class F>
std::vector<Mat> hessian_tensor(F&& f, const Vec& x) {
    return evaluate_jet2(std::forward<F>(f), x).hessians;
}

}  // namespace riemap
