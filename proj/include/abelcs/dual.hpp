#pragma once

// Forward-mode dual numbers over the six Wirtinger variables
// (z1, z2, z3, z1bar, z2bar, z3bar) of a chart of complex dimension <= 3.
// Nesting Dual<Dual<...>> gives higher derivatives; the tower used by the
// field engine is cplx -> Dual<cplx> -> Dual<Dual<cplx>> -> ...

#include <array>
#include <cmath>
#include <complex>

namespace abelcs {

using cplx = std::complex<double>;

inline constexpr int kNumVars = 6;

// Swaps the holomorphic and antiholomorphic variable blocks.
inline constexpr int conj_var(int i) { return i < 3 ? i + 3 : i - 3; }

template <class T>
struct Dual {
    T v{};
    std::array<T, kNumVars> d{};

    Dual() = default;
    Dual(const T& value) : v(value) {}
    Dual(double value) : v(T(value)) {}
};

// ---- scalar traits -------------------------------------------------------

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<cplx> {
    static cplx zero() { return {}; }
    static cplx one() { return {1.0, 0.0}; }
    static cplx from(cplx c) { return c; }
    static cplx value(cplx c) { return c; }
    static cplx wconj(cplx c) { return std::conj(c); }
};

template <class T>
struct scalar_traits<Dual<T>> {
    using inner = scalar_traits<T>;
    static Dual<T> zero() { return {}; }
    static Dual<T> one() {
        Dual<T> r;
        r.v = inner::one();
        return r;
    }
    static Dual<T> from(cplx c) {
        Dual<T> r;
        r.v = inner::from(c);
        return r;
    }
    static cplx value(const Dual<T>& x) { return inner::value(x.v); }
    // Wirtinger conjugation: conj the value, swap and conj the partials.
    static Dual<T> wconj(const Dual<T>& x) {
        Dual<T> r;
        r.v = inner::wconj(x.v);
        for (int i = 0; i < kNumVars; ++i) r.d[i] = inner::wconj(x.d[conj_var(i)]);
        return r;
    }
};

template <class T>
cplx dual_value(const T& x) { return scalar_traits<T>::value(x); }

template <class T>
T wconj(const T& x) { return scalar_traits<T>::wconj(x); }

// ---- arithmetic ----------------------------------------------------------

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
    Dual<T> r;
    r.v = a.v + b.v;
    for (int i = 0; i < kNumVars; ++i) r.d[i] = a.d[i] + b.d[i];
    return r;
}

template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
    Dual<T> r;
    r.v = a.v - b.v;
    for (int i = 0; i < kNumVars; ++i) r.d[i] = a.d[i] - b.d[i];
    return r;
}

template <class T>
Dual<T> operator-(const Dual<T>& a) {
    Dual<T> r;
    r.v = -a.v;
    for (int i = 0; i < kNumVars; ++i) r.d[i] = -a.d[i];
    return r;
}

template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
    Dual<T> r;
    r.v = a.v * b.v;
    for (int i = 0; i < kNumVars; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
    return r;
}

template <class T>
Dual<T> inv(const Dual<T>& a);

inline cplx inv(const cplx& a) { return 1.0 / a; }

template <class T>
Dual<T> inv(const Dual<T>& a) {
    Dual<T> r;
    T ia = inv(a.v);
    r.v = ia;
    T m = -(ia * ia);
    for (int i = 0; i < kNumVars; ++i) r.d[i] = m * a.d[i];
    return r;
}

template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) { return a * inv(b); }

// mixed scalar overloads
template <class T>
Dual<T> operator+(const Dual<T>& a, cplx c) { Dual<T> b(scalar_traits<T>::from(c)); return a + Dual<T>(b); }
template <class T>
Dual<T> operator+(cplx c, const Dual<T>& a) { return a + c; }
template <class T>
Dual<T> operator-(const Dual<T>& a, cplx c) { return a + (-c); }
template <class T>
Dual<T> operator-(cplx c, const Dual<T>& a) { return (-a) + c; }
template <class T>
Dual<T> operator*(const Dual<T>& a, cplx c) {
    Dual<T> r;
    T tc = scalar_traits<T>::from(c);
    r.v = a.v * tc;
    for (int i = 0; i < kNumVars; ++i) r.d[i] = a.d[i] * tc;
    return r;
}
template <class T>
Dual<T> operator*(cplx c, const Dual<T>& a) { return a * c; }
template <class T>
Dual<T> operator/(const Dual<T>& a, cplx c) { return a * (1.0 / c); }
template <class T>
Dual<T> operator/(cplx c, const Dual<T>& a) { return inv(a) * c; }

// ---- elementary functions ------------------------------------------------

using std::cos;
using std::exp;
using std::log;
using std::sin;
using std::sqrt;

template <class T>
Dual<T> exp(const Dual<T>& a) {
    Dual<T> r;
    r.v = exp(a.v);
    for (int i = 0; i < kNumVars; ++i) r.d[i] = r.v * a.d[i];
    return r;
}

template <class T>
Dual<T> log(const Dual<T>& a) {
    Dual<T> r;
    r.v = log(a.v);
    T ia = inv(a.v);
    for (int i = 0; i < kNumVars; ++i) r.d[i] = ia * a.d[i];
    return r;
}

template <class T>
Dual<T> sqrt(const Dual<T>& a) {
    Dual<T> r;
    r.v = sqrt(a.v);
    T h = inv(r.v + r.v);
    for (int i = 0; i < kNumVars; ++i) r.d[i] = h * a.d[i];
    return r;
}

template <class T>
Dual<T> sin(const Dual<T>& a) {
    Dual<T> r;
    r.v = sin(a.v);
    T c = cos(a.v);
    for (int i = 0; i < kNumVars; ++i) r.d[i] = c * a.d[i];
    return r;
}

template <class T>
Dual<T> cos(const Dual<T>& a) {
    Dual<T> r;
    r.v = cos(a.v);
    T s = -sin(a.v);
    for (int i = 0; i < kNumVars; ++i) r.d[i] = s * a.d[i];
    return r;
}

// ---- the tower used by the field engine ----------------------------------

using J0 = cplx;
using J1 = Dual<J0>;
using J2 = Dual<J1>;
using J3 = Dual<J2>;

// Seeds variable `var` at every dual level of T.
template <class T>
struct seeder {
    static T seed(cplx value, int var);
};

template <>
struct seeder<J0> {
    static J0 seed(cplx value, int) { return value; }
};

template <class T>
struct seeder<Dual<T>> {
    static Dual<T> seed(cplx value, int var) {
        Dual<T> r;
        r.v = seeder<T>::seed(value, var);
        r.d[var] = scalar_traits<T>::one();
        return r;
    }
};

}  // namespace abelcs
