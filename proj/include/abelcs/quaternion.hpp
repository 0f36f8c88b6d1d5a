#pragma once

// Quaternions in the a + b*j split over C, their 2x2 complex matrix
// embedding, and the polar decomposition of H* = (0,inf) x SU(2).

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "abelcs/dual.hpp"

namespace abelcs {

using Mat2 = std::array<std::array<cplx, 2>, 2>;

struct Quaternion {
    cplx a{};  // complex part
    cplx b{};  // j part: q = a + b*j, with j*z = conj(z)*j

    Quaternion() = default;
    Quaternion(cplx a_, cplx b_) : a(a_), b(b_) {}
    /* implicit */ Quaternion(double r) : a(r, 0), b(0, 0) {}

    double norm2() const { return std::norm(a) + std::norm(b); }
    double norm() const { return std::sqrt(norm2()); }

    Quaternion conj() const { return {std::conj(a), -b}; }
};

inline Quaternion operator+(const Quaternion& p, const Quaternion& q) {
    return {p.a + q.a, p.b + q.b};
}
inline Quaternion operator-(const Quaternion& p, const Quaternion& q) {
    return {p.a - q.a, p.b - q.b};
}
inline Quaternion operator-(const Quaternion& q) { return {-q.a, -q.b}; }

// (a + b j)(c + d j) = (ac - b dbar) + (ad + b cbar) j
inline Quaternion multiply(const Quaternion& p, const Quaternion& q) {
    return {p.a * q.a - p.b * std::conj(q.b), p.a * q.b + p.b * std::conj(q.a)};
}
inline Quaternion operator*(const Quaternion& p, const Quaternion& q) { return multiply(p, q); }
inline Quaternion operator*(cplx c, const Quaternion& q) { return Quaternion(c, 0) * q; }
inline Quaternion operator*(const Quaternion& q, double s) { return {q.a * s, q.b * s}; }

inline Quaternion inverse(const Quaternion& q) {
    double n2 = q.norm2();
    if (n2 <= 0.0) throw std::domain_error("inverse of zero quaternion");
    return {std::conj(q.a) / n2, -q.b / n2};
}

struct PolarDecomposition {
    double r = 0.0;       // positive scale
    Quaternion unit;      // on S^3: |u|^2 + |v|^2 = 1
};

inline PolarDecomposition polar(const Quaternion& q) {
    double r = q.norm();
    if (r <= 0.0) throw std::domain_error("polar decomposition of zero quaternion");
    return {r, {q.a / r, q.b / r}};
}

inline Mat2 embed(const Quaternion& q) {
    return {{{q.a, q.b}, {-std::conj(q.b), std::conj(q.a)}}};
}

inline Mat2 matmul(const Mat2& x, const Mat2& y) {
    Mat2 r{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
    return r;
}

inline cplx det(const Mat2& x) { return x[0][0] * x[1][1] - x[0][1] * x[1][0]; }

}  // namespace abelcs
