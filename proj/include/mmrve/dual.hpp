#pragma once

#include <Eigen/Core>
#include <cmath>

namespace mmrve {

// Second-order forward-mode dual number over N independent variables.
// Carries value, gradient and dense Hessian through arbitrary smooth
// arithmetic. The Hessian stays bitwise symmetric: every update below is
// built from symmetric terms only.
template <int N>
struct Dual2 {
    using GradT = Eigen::Matrix<double, N, 1>;
    using HessT = Eigen::Matrix<double, N, N>;

    double val = 0.0;
    GradT grad = GradT::Zero();
    HessT hess = HessT::Zero();

    Dual2() = default;
    explicit Dual2(double v) : val(v) {}

    static Dual2 variable(double v, int index) {
        Dual2 d(v);
        d.grad[index] = 1.0;
        return d;
    }

    Dual2& operator+=(const Dual2& o) {
        val += o.val;
        grad += o.grad;
        hess += o.hess;
        return *this;
    }
    Dual2& operator-=(const Dual2& o) {
        val -= o.val;
        grad -= o.grad;
        hess -= o.hess;
        return *this;
    }
};

template <int N>
inline Dual2<N> operator+(Dual2<N> a, const Dual2<N>& b) { return a += b; }
template <int N>
inline Dual2<N> operator-(Dual2<N> a, const Dual2<N>& b) { return a -= b; }
template <int N>
inline Dual2<N> operator-(const Dual2<N>& a) {
    Dual2<N> r;
    r.val = -a.val;
    r.grad = -a.grad;
    r.hess = -a.hess;
    return r;
}
template <int N>
inline Dual2<N> operator+(Dual2<N> a, double c) { a.val += c; return a; }
template <int N>
inline Dual2<N> operator+(double c, Dual2<N> a) { a.val += c; return a; }
template <int N>
inline Dual2<N> operator-(Dual2<N> a, double c) { a.val -= c; return a; }
template <int N>
inline Dual2<N> operator-(double c, const Dual2<N>& a) { return (-a) + c; }

template <int N>
inline Dual2<N> operator*(const Dual2<N>& a, const Dual2<N>& b) {
    Dual2<N> r;
    r.val = a.val * b.val;
    r.grad = a.grad * b.val + b.grad * a.val;
    // single expression so entries (i,j) and (j,i) see the same addition
    // order; the Hessian stays bitwise symmetric
    r.hess = a.hess * b.val + b.hess * a.val + a.grad * b.grad.transpose() +
             b.grad * a.grad.transpose();
    return r;
}
template <int N>
inline Dual2<N> operator*(Dual2<N> a, double c) {
    a.val *= c;
    a.grad *= c;
    a.hess *= c;
    return a;
}
template <int N>
inline Dual2<N> operator*(double c, Dual2<N> a) { return a * c; }

// Chain rule for f(x) given f, f', f'' at x.val.
template <int N>
inline Dual2<N> chain(const Dual2<N>& x, double f0, double f1, double f2) {
    Dual2<N> r;
    r.val = f0;
    r.grad = f1 * x.grad;
    r.hess = f1 * x.hess;
    r.hess.noalias() += f2 * (x.grad * x.grad.transpose());
    return r;
}

template <int N>
inline Dual2<N> inv(const Dual2<N>& x) {
    const double i = 1.0 / x.val;
    return chain(x, i, -i * i, 2.0 * i * i * i);
}
template <int N>
inline Dual2<N> operator/(const Dual2<N>& a, const Dual2<N>& b) { return a * inv(b); }
template <int N>
inline Dual2<N> operator/(Dual2<N> a, double c) { return a * (1.0 / c); }
template <int N>
inline Dual2<N> operator/(double c, const Dual2<N>& b) { return inv(b) * c; }

template <int N>
inline Dual2<N> log(const Dual2<N>& x) {
    return chain(x, std::log(x.val), 1.0 / x.val, -1.0 / (x.val * x.val));
}
template <int N>
inline Dual2<N> sqrt(const Dual2<N>& x) {
    const double s = std::sqrt(x.val);
    return chain(x, s, 0.5 / s, -0.25 / (s * x.val));
}
// x^c for constant exponent, x > 0.
template <int N>
inline Dual2<N> pow(const Dual2<N>& x, double c) {
    const double f0 = std::pow(x.val, c);
    const double f1 = c * f0 / x.val;
    const double f2 = (c - 1.0) * f1 / x.val;
    return chain(x, f0, f1, f2);
}

// First-order counterpart, used for residual-only assembly and volume averaging.
template <int N>
struct Dual1 {
    using GradT = Eigen::Matrix<double, N, 1>;

    double val = 0.0;
    GradT grad = GradT::Zero();

    Dual1() = default;
    explicit Dual1(double v) : val(v) {}

    static Dual1 variable(double v, int index) {
        Dual1 d(v);
        d.grad[index] = 1.0;
        return d;
    }

    Dual1& operator+=(const Dual1& o) { val += o.val; grad += o.grad; return *this; }
    Dual1& operator-=(const Dual1& o) { val -= o.val; grad -= o.grad; return *this; }
};

template <int N>
inline Dual1<N> operator+(Dual1<N> a, const Dual1<N>& b) { return a += b; }
template <int N>
inline Dual1<N> operator-(Dual1<N> a, const Dual1<N>& b) { return a -= b; }
template <int N>
inline Dual1<N> operator-(const Dual1<N>& a) {
    Dual1<N> r;
    r.val = -a.val;
    r.grad = -a.grad;
    return r;
}
template <int N>
inline Dual1<N> operator+(Dual1<N> a, double c) { a.val += c; return a; }
template <int N>
inline Dual1<N> operator+(double c, Dual1<N> a) { a.val += c; return a; }
template <int N>
inline Dual1<N> operator-(Dual1<N> a, double c) { a.val -= c; return a; }
template <int N>
inline Dual1<N> operator-(double c, const Dual1<N>& a) { return (-a) + c; }
template <int N>
inline Dual1<N> operator*(const Dual1<N>& a, const Dual1<N>& b) {
    Dual1<N> r;
    r.val = a.val * b.val;
    r.grad = a.grad * b.val + b.grad * a.val;
    return r;
}
template <int N>
inline Dual1<N> operator*(Dual1<N> a, double c) { a.val *= c; a.grad *= c; return a; }
template <int N>
inline Dual1<N> operator*(double c, Dual1<N> a) { return a * c; }

template <int N>
inline Dual1<N> chain(const Dual1<N>& x, double f0, double f1, double /*f2*/) {
    Dual1<N> r;
    r.val = f0;
    r.grad = f1 * x.grad;
    return r;
}
template <int N>
inline Dual1<N> inv(const Dual1<N>& x) {
    const double i = 1.0 / x.val;
    return chain(x, i, -i * i, 0.0);
}
template <int N>
inline Dual1<N> operator/(const Dual1<N>& a, const Dual1<N>& b) { return a * inv(b); }
template <int N>
inline Dual1<N> operator/(Dual1<N> a, double c) { return a * (1.0 / c); }
template <int N>
inline Dual1<N> operator/(double c, const Dual1<N>& b) { return inv(b) * c; }
template <int N>
inline Dual1<N> log(const Dual1<N>& x) {
    return chain(x, std::log(x.val), 1.0 / x.val, 0.0);
}
template <int N>
inline Dual1<N> sqrt(const Dual1<N>& x) {
    const double s = std::sqrt(x.val);
    return chain(x, s, 0.5 / s, 0.0);
}
template <int N>
inline Dual1<N> pow(const Dual1<N>& x, double c) {
    const double f0 = std::pow(x.val, c);
    return chain(x, f0, c * f0 / x.val, 0.0);
}

// Uniform access to the numeric value of a scalar-like type; lets the energy
// kernel branch on magnitudes regardless of the carried derivative order.
inline double value_of(double x) { return x; }
template <int N>
inline double value_of(const Dual1<N>& x) { return x.val; }
template <int N>
inline double value_of(const Dual2<N>& x) { return x.val; }

// double fallbacks, so generic kernels can be instantiated scalar-only.
inline double chain(double /*x*/, double f0, double /*f1*/, double /*f2*/) { return f0; }
inline double inv(double x) { return 1.0 / x; }
inline double log(double x) { return std::log(x); }
inline double sqrt(double x) { return std::sqrt(x); }
inline double pow(double x, double c) { return std::pow(x, c); }

} // namespace mmrve
