#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "riemap/errors.hpp"

namespace riemap {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Second-order forward-mode dual number: value, gradient and Hessian with
/// respect to a fixed set of active inputs. Evaluating a scalar function over
/// Dual2 arguments seeded with Dual2::variable yields the exact value, all
/// first partials and the full (symmetric) second-derivative matrix in one
/// pass.
///
/// A Dual2 with an empty gradient acts as a constant and broadcasts against
/// any number of active inputs, so numeric literals cost nothing.
class Dual2 {
public:
    double value = 0.0;
    Vec grad;   // length = number of active inputs (0 for constants)
    Mat hess;   // square, same dimension as grad; symmetric

    Dual2() = default;
    Dual2(double v) : value(v) {}  // NOLINT: implicit by design

    static Dual2 constant(double v) { return Dual2(v); }

    /// Seed input i of n as an active variable.
    static Dual2 variable(double v, int i, int n) {
        Dual2 d(v);
        d.grad = Vec::Zero(n);
        d.grad[i] = 1.0;
        d.hess = Mat::Zero(n, n);
        return d;
    }

    int vars() const { return static_cast<int>(grad.size()); }
    bool is_constant() const { return grad.size() == 0; }

    Dual2 operator-() const {
        Dual2 r(-value);
        if (!is_constant()) {
            r.grad = -grad;
            r.hess = -hess;
        }
        return r;
    }

    Dual2& operator+=(const Dual2& o) { *this = *this + o; return *this; }
    Dual2& operator-=(const Dual2& o) { *this = *this - o; return *this; }
    Dual2& operator*=(const Dual2& o) { *this = *this * o; return *this; }
    Dual2& operator/=(const Dual2& o) { *this = *this / o; return *this; }

    friend Dual2 operator+(const Dual2& a, const Dual2& b) {
        Dual2 r(a.value + b.value);
        join(a, b, r);
        if (!r.is_constant()) {
            if (!a.is_constant()) { r.grad += a.grad; r.hess += a.hess; }
            if (!b.is_constant()) { r.grad += b.grad; r.hess += b.hess; }
        }
        return r;
    }

    friend Dual2 operator-(const Dual2& a, const Dual2& b) {
        Dual2 r(a.value - b.value);
        join(a, b, r);
        if (!r.is_constant()) {
            if (!a.is_constant()) { r.grad += a.grad; r.hess += a.hess; }
            if (!b.is_constant()) { r.grad -= b.grad; r.hess -= b.hess; }
        }
        return r;
    }

    friend Dual2 operator*(const Dual2& a, const Dual2& b) {
        Dual2 r(a.value * b.value);
        join(a, b, r);
        if (r.is_constant()) return r;
        if (a.is_constant()) {
            r.grad = a.value * b.grad;
            r.hess = a.value * b.hess;
        } else if (b.is_constant()) {
            r.grad = b.value * a.grad;
            r.hess = b.value * a.hess;
        } else {
            r.grad = a.value * b.grad + b.value * a.grad;
            r.hess = a.value * b.hess + b.value * a.hess;
            // Accumulate the cross term as outer + outer^T in one expression
            // so both triangles round identically (hess stays bit-symmetric).
            const Mat outer = a.grad * b.grad.transpose();
            r.hess += outer + outer.transpose();
        }
        return r;
    }

    friend Dual2 operator/(const Dual2& a, const Dual2& b) {
        if (b.value == 0.0) throw DomainError("division by zero");
        return a * reciprocal(b);
    }

    friend bool operator==(const Dual2& a, const Dual2& b) {
        if (a.value != b.value || a.grad.size() != b.grad.size()) return false;
        return (a.grad.array() == b.grad.array()).all() &&
               (a.hess.array() == b.hess.array()).all();
    }

    /// Chain rule through a scalar primitive with known first and second
    /// derivatives at the point.
    static Dual2 chain(const Dual2& x, double f, double fp, double fpp) {
        Dual2 r(f);
        if (x.is_constant()) return r;
        r.grad = fp * x.grad;
        r.hess = fp * x.hess;
        // Materialize the outer product before scaling; Eigen otherwise folds
        // the scalar into one factor and the triangles round differently.
        const Mat outer = x.grad * x.grad.transpose();
        r.hess += fpp * outer;
        return r;
    }

private:
    static Dual2 reciprocal(const Dual2& b) {
        const double v = b.value;
        return chain(b, 1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v));
    }

    // Size the result for two operands, broadcasting constants.
    static void join(const Dual2& a, const Dual2& b, Dual2& r) {
        const int n = a.is_constant() ? b.vars() : a.vars();
        if (n > 0) {
            r.grad = Vec::Zero(n);
            r.hess = Mat::Zero(n, n);
        }
    }
};

inline Dual2 sin(const Dual2& x) {
    return Dual2::chain(x, std::sin(x.value), std::cos(x.value), -std::sin(x.value));
}

inline Dual2 cos(const Dual2& x) {
    return Dual2::chain(x, std::cos(x.value), -std::sin(x.value), -std::cos(x.value));
}

inline Dual2 exp(const Dual2& x) {
    const double e = std::exp(x.value);
    return Dual2::chain(x, e, e, e);
}

inline Dual2 log(const Dual2& x) {
    if (x.value <= 0.0) throw DomainError("log of non-positive value");
    const double v = x.value;
    return Dual2::chain(x, std::log(v), 1.0 / v, -1.0 / (v * v));
}

inline Dual2 sqrt(const Dual2& x) {
    if (x.value < 0.0) throw DomainError("sqrt of negative value");
    if (x.value == 0.0 && !x.is_constant())
        throw DomainError("sqrt at zero has unbounded derivative");
    const double s = std::sqrt(x.value);
    return Dual2::chain(x, s, 0.5 / s, -0.25 / (s * x.value));
}

/// x^n for integer n by binary exponentiation; 0^negative is a domain error.
inline Dual2 pow_int(const Dual2& x, long long n) {
    if (n == 0) return Dual2::constant(1.0);
    if (n < 0) {
        if (x.value == 0.0) throw DomainError("zero raised to a negative power");
        return Dual2::constant(1.0) / pow_int(x, -n);
    }
    Dual2 result = Dual2::constant(1.0);
    Dual2 base = x;
    long long k = n;
    while (k > 0) {
        if (k & 1) result = result * base;
        base = base * base;
        k >>= 1;
    }
    return result;
}

inline double pow_int(double x, long long n) {
    if (n == 0) return 1.0;
    if (n < 0) {
        if (x == 0.0) throw DomainError("zero raised to a negative power");
        return 1.0 / pow_int(x, -n);
    }
    double result = 1.0;
    double base = x;
    long long k = n;
    while (k > 0) {
        if (k & 1) result *= base;
        base *= base;
        k >>= 1;
    }
    return result;
}

}  // namespace riemap
