#pragma once

// Exterior calculus on a chart in the complex covector frame
// {dz1, dz2, dz3, dz1bar, dz2bar, dz3bar}.  Multi-indices are bitmasks over
// those six slots (bits 0..2 holomorphic, 3..5 antiholomorphic), stored
// sorted; signs are resolved at insertion time by inversion counts.

#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "abelcs/field.hpp"

namespace abelcs {

using Mask = std::uint8_t;

inline int mask_degree(Mask m) { return std::popcount(static_cast<unsigned>(m)); }

// Sign of dx_A ^ dx_B -> dx_{A|B} with both sides sorted ascending.
inline int merge_sign(Mask a, Mask b) {
    int inv = 0;
    for (int i = 0; i < kNumVars; ++i) {
        if (b & (1u << i)) {
            // bits of a strictly above i must jump over this b-bit
            unsigned higher = static_cast<unsigned>(a) >> (i + 1);
            inv += std::popcount(higher);
        }
    }
    return (inv & 1) ? -1 : 1;
}

// Sign of sorting the image of a sorted mask under the z <-> zbar swap.
inline int conj_sort_sign(Mask m) {
    std::vector<int> seq;
    for (int i = 0; i < kNumVars; ++i)
        if (m & (1u << i)) seq.push_back(conj_var(i));
    int inv = 0;
    for (size_t i = 0; i < seq.size(); ++i)
        for (size_t j = i + 1; j < seq.size(); ++j)
            if (seq[i] > seq[j]) ++inv;
    return (inv & 1) ? -1 : 1;
}

inline Mask conj_mask(Mask m) {
    Mask r = 0;
    for (int i = 0; i < kNumVars; ++i)
        if (m & (1u << i)) r |= static_cast<Mask>(1u << conj_var(i));
    return r;
}

inline int holomorphic_count(Mask m) { return std::popcount(static_cast<unsigned>(m & 0x7)); }

namespace detail {

inline cplx det_small(std::array<std::array<cplx, 6>, 6> m, int n) {
    cplx d = 1;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(m[static_cast<size_t>(k)][static_cast<size_t>(k)]);
        for (int r = k + 1; r < n; ++r) {
            double a = std::abs(m[static_cast<size_t>(r)][static_cast<size_t>(k)]);
            if (a > best) { best = a; piv = r; }
        }
        if (best == 0.0) return 0;
        if (piv != k) { std::swap(m[static_cast<size_t>(piv)], m[static_cast<size_t>(k)]); d = -d; }
        d *= m[static_cast<size_t>(k)][static_cast<size_t>(k)];
        for (int r = k + 1; r < n; ++r) {
            cplx fac = m[static_cast<size_t>(r)][static_cast<size_t>(k)] / m[static_cast<size_t>(k)][static_cast<size_t>(k)];
            for (int c = k; c < n; ++c)
                m[static_cast<size_t>(r)][static_cast<size_t>(c)] -= fac * m[static_cast<size_t>(k)][static_cast<size_t>(c)];
        }
    }
    return d;
}

}  // namespace detail

// Pointwise value of a form: dense coefficient table over masks.
struct FormValue {
    int degree = 0;
    std::array<cplx, 64> c{};

    double max_abs() const {
        double r = 0;
        for (const auto& x : c) r = std::max(r, std::abs(x));
        return r;
    }
};

inline FormValue operator-(const FormValue& a, const FormValue& b) {
    FormValue r;
    r.degree = a.degree;
    for (int i = 0; i < 64; ++i) r.c[static_cast<size_t>(i)] = a.c[static_cast<size_t>(i)] - b.c[static_cast<size_t>(i)];
    return r;
}

inline FormValue operator+(const FormValue& a, const FormValue& b) {
    FormValue r;
    r.degree = a.degree;
    for (int i = 0; i < 64; ++i) r.c[static_cast<size_t>(i)] = a.c[static_cast<size_t>(i)] + b.c[static_cast<size_t>(i)];
    return r;
}

inline FormValue operator*(cplx s, const FormValue& a) {
    FormValue r;
    r.degree = a.degree;
    for (int i = 0; i < 64; ++i) r.c[static_cast<size_t>(i)] = s * a.c[static_cast<size_t>(i)];
    return r;
}

class KForm {
  public:
    KForm() = default;
    KForm(Chart chart, int degree) : chart_(chart), degree_(degree) {
        if (degree < 0 || degree > chart.real_dim()) throw std::invalid_argument("bad form degree");
    }

    static KForm monomial(const Chart& chart, Mask mask, ScalarField f) {
        KForm r(chart, mask_degree(mask));
        r.coeffs_[mask] = std::move(f);
        return r;
    }

    const Chart& chart() const { return chart_; }
    int degree() const { return degree_; }
    const std::map<Mask, ScalarField>& coeffs() const { return coeffs_; }
    bool empty() const { return coeffs_.empty(); }

    void add_term(Mask mask, const ScalarField& f) {
        if (mask_degree(mask) != degree_) throw std::invalid_argument("mask degree mismatch");
        auto it = coeffs_.find(mask);
        if (it == coeffs_.end())
            coeffs_[mask] = f;
        else
            it->second = it->second + f;
    }

    FormValue eval(const Point& p) const {
        FormValue v;
        v.degree = degree_;
        for (const auto& [mask, f] : coeffs_) v.c[mask] = f(p);
        return v;
    }

    // Value of the form on `degree` tangent vectors (complex displacement
    // components per coordinate).
    cplx eval_on(const Point& p, const std::vector<std::array<cplx, 3>>& tangents) const {
        if (static_cast<int>(tangents.size()) != degree_)
            throw std::invalid_argument("tangent count != degree");
        cplx total = 0;
        std::array<std::array<cplx, 6>, 6> mat{};
        for (const auto& [mask, f] : coeffs_) {
            // rows: covectors of the mask, cols: tangents
            int r = 0;
            for (int i = 0; i < kNumVars; ++i) {
                if (!(mask & (1u << i))) continue;
                for (int c = 0; c < degree_; ++c) {
                    const auto& t = tangents[static_cast<size_t>(c)];
                    mat[static_cast<size_t>(r)][static_cast<size_t>(c)] =
                        i < 3 ? t[static_cast<size_t>(i)] : std::conj(t[static_cast<size_t>(i - 3)]);
                }
                ++r;
            }
            total += f(p) * detail::det_small(mat, degree_);
        }
        return total;
    }

  private:
    Chart chart_;
    int degree_ = 0;
    std::map<Mask, ScalarField> coeffs_;
};

namespace detail {

// Masks grouped by degree, so pointwise wedges only touch live slots.
inline const std::vector<Mask>& masks_of_degree(int d) {
    static const std::array<std::vector<Mask>, 7> table = [] {
        std::array<std::vector<Mask>, 7> t;
        for (Mask m = 0; m < 64; ++m) t[static_cast<size_t>(mask_degree(m))].push_back(m);
        return t;
    }();
    return table[static_cast<size_t>(d)];
}

}  // namespace detail

// Pointwise wedge of evaluated forms.
inline FormValue wedge(const FormValue& a, const FormValue& b) {
    FormValue r;
    r.degree = a.degree + b.degree;
    for (Mask ma : detail::masks_of_degree(a.degree)) {
        cplx ca = a.c[ma];
        if (ca == cplx{}) continue;
        for (Mask mb : detail::masks_of_degree(b.degree)) {
            if (ma & mb) continue;
            cplx cb = b.c[mb];
            if (cb == cplx{}) continue;
            int s = merge_sign(ma, mb);
            r.c[ma | mb] += (s < 0 ? -ca : ca) * cb;
        }
    }
    return r;
}

// Value of an evaluated form on `degree` tangent vectors.
inline cplx eval_on(const FormValue& v, const std::vector<std::array<cplx, 3>>& tangents) {
    if (static_cast<int>(tangents.size()) != v.degree)
        throw std::invalid_argument("tangent count != degree");
    cplx total = 0;
    std::array<std::array<cplx, 6>, 6> mat{};
    for (Mask m : detail::masks_of_degree(v.degree)) {
        cplx coeff = v.c[m];
        if (coeff == cplx{}) continue;
        int r = 0;
        for (int i = 0; i < kNumVars; ++i) {
            if (!(m & (1 << i))) continue;
            for (int col = 0; col < v.degree; ++col) {
                const auto& t = tangents[static_cast<size_t>(col)];
                mat[static_cast<size_t>(r)][static_cast<size_t>(col)] =
                    i < 3 ? t[static_cast<size_t>(i)] : std::conj(t[static_cast<size_t>(i - 3)]);
            }
            ++r;
        }
        total += coeff * detail::det_small(mat, v.degree);
    }
    return total;
}

inline KForm dz(const Chart& chart, int i) {
    return KForm::monomial(chart, static_cast<Mask>(1u << i), ScalarField(cplx(1)));
}
inline KForm dzbar(const Chart& chart, int i) {
    return KForm::monomial(chart, static_cast<Mask>(1u << (i + 3)), ScalarField(cplx(1)));
}

inline KForm operator+(const KForm& x, const KForm& y) {
    if (x.degree() != y.degree()) throw std::invalid_argument("degree mismatch in +");
    KForm r = x;
    for (const auto& [mask, f] : y.coeffs()) r.add_term(mask, f);
    return r;
}

inline KForm operator*(const ScalarField& s, const KForm& x) {
    KForm r(x.chart(), x.degree());
    for (const auto& [mask, f] : x.coeffs()) r.add_term(mask, s * f);
    return r;
}
inline KForm operator*(cplx s, const KForm& x) { return ScalarField(s) * x; }
inline KForm operator-(const KForm& x) { return cplx(-1) * x; }
inline KForm operator-(const KForm& x, const KForm& y) { return x + (-y); }

inline KForm wedge(const KForm& x, const KForm& y) {
    if (!x.chart().compatible(y.chart())) throw std::invalid_argument("chart mismatch in wedge");
    int deg = x.degree() + y.degree();
    if (deg > x.chart().real_dim()) return KForm(x.chart(), x.chart().real_dim());
    KForm r(x.chart(), deg);
    for (const auto& [ma, fa] : x.coeffs()) {
        for (const auto& [mb, fb] : y.coeffs()) {
            if (ma & mb) continue;
            int s = merge_sign(ma, mb);
            ScalarField prod = fa * fb;
            r.add_term(static_cast<Mask>(ma | mb), s < 0 ? -prod : prod);
        }
    }
    return r;
}

inline KForm d(const KForm& x) {
    int deg = x.degree() + 1;
    if (deg > x.chart().real_dim()) return KForm(x.chart(), x.chart().real_dim());
    KForm r(x.chart(), deg);
    int m = x.chart().m;
    for (const auto& [mask, f] : x.coeffs()) {
        for (int i = 0; i < kNumVars; ++i) {
            if (i % 3 >= m) continue;  // variables beyond the chart dimension
            Mask bit = static_cast<Mask>(1u << i);
            if (mask & bit) continue;
            int s = merge_sign(bit, mask);
            ScalarField df = deriv(f, i);
            r.add_term(static_cast<Mask>(mask | bit), s < 0 ? -df : df);
        }
    }
    return r;
}

inline KForm type_project(const KForm& x, int p, int q) {
    if (p + q != x.degree()) throw std::invalid_argument("p+q != degree in type_project");
    KForm r(x.chart(), x.degree());
    for (const auto& [mask, f] : x.coeffs())
        if (holomorphic_count(mask) == p) r.add_term(mask, f);
    return r;
}

// Complex conjugate of a form: swaps dz <-> dzbar and conjugates coefficients.
inline KForm conj(const KForm& x) {
    KForm r(x.chart(), x.degree());
    for (const auto& [mask, f] : x.coeffs()) {
        int s = conj_sort_sign(mask);
        ScalarField cf = fconj(f);
        r.add_term(conj_mask(mask), s < 0 ? -cf : cf);
    }
    return r;
}

// ---- 2x2 matrix-valued forms --------------------------------------------

struct MatForm {
    Chart chart;
    int degree = 0;
    std::array<std::array<KForm, 2>, 2> e;

    MatForm() = default;
    MatForm(const Chart& c, int deg) : chart(c), degree(std::min(deg, c.real_dim())) {
        for (auto& row : e)
            for (auto& x : row) x = KForm(c, degree);
    }
};

inline MatForm operator+(const MatForm& x, const MatForm& y) {
    MatForm r(x.chart, x.degree);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.e[i][j] = x.e[i][j] + y.e[i][j];
    return r;
}
inline MatForm operator-(const MatForm& x, const MatForm& y) {
    MatForm r(x.chart, x.degree);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.e[i][j] = x.e[i][j] - y.e[i][j];
    return r;
}
inline MatForm operator*(cplx s, const MatForm& x) {
    MatForm r(x.chart, x.degree);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.e[i][j] = s * x.e[i][j];
    return r;
}

inline MatForm wedge(const MatForm& x, const MatForm& y) {
    MatForm r(x.chart, x.degree + y.degree);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r.e[i][j] = wedge(x.e[i][0], y.e[0][j]) + wedge(x.e[i][1], y.e[1][j]);
    return r;
}

inline MatForm d(const MatForm& x) {
    MatForm r(x.chart, std::min(x.degree + 1, x.chart.real_dim()));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.e[i][j] = d(x.e[i][j]);
    return r;
}

inline KForm trace(const MatForm& x) { return x.e[0][0] + x.e[1][1]; }

inline MatForm mat_scalar(const Chart& c, int deg, const KForm& x) {
    MatForm r(c, deg);
    r.e[0][0] = x;
    r.e[1][1] = x;
    return r;
}

// ---- quaternion-valued forms: A + B*j ------------------------------------

struct QForm {
    KForm A, B;

    QForm() = default;
    QForm(KForm a, KForm b) : A(std::move(a)), B(std::move(b)) {}
    QForm(const Chart& c, int deg) : A(c, deg), B(c, deg) {}

    int degree() const { return A.degree(); }
};

inline QForm operator+(const QForm& x, const QForm& y) { return {x.A + y.A, x.B + y.B}; }
inline QForm operator-(const QForm& x, const QForm& y) { return {x.A - y.A, x.B - y.B}; }

// (A + B j) ^ (C + D j) = (A^C - B^Dbar) + (A^D + B^Cbar) j
inline QForm qwedge(const QForm& x, const QForm& y) {
    return {wedge(x.A, y.A) - wedge(x.B, conj(y.B)),
            wedge(x.A, y.B) + wedge(x.B, conj(y.A))};
}

inline QForm d(const QForm& x) { return {d(x.A), d(x.B)}; }

inline MatForm to_mat(const QForm& x) {
    MatForm r(x.A.chart(), x.A.degree());
    r.e[0][0] = x.A;
    r.e[0][1] = x.B;
    r.e[1][0] = -conj(x.B);
    r.e[1][1] = conj(x.A);
    return r;
}

// Left multiplication by a quaternion-valued 0-form (p + q j).
inline QForm qscale(const ScalarField& p, const ScalarField& q, const QForm& x) {
    return {p * x.A - q * conj(x.B), p * x.B + q * conj(x.A)};
}

}  // namespace abelcs
