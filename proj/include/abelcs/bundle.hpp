#pragma once

// Hermitian rank-2 bundles over a chart with trivialized determinant:
// the conjugate-linear structure j, the metric (1,0)-connection, the
// (s, j s) frame formulas, and flat quaternionic connections built from a
// nonvanishing section.

#include <array>
#include <stdexcept>
#include <string>

#include "abelcs/field.hpp"
#include "abelcs/forms.hpp"
#include "abelcs/group.hpp"

namespace abelcs {

struct Section {
    ScalarField c1, c2;  // components in the standard holomorphic frame
    bool holomorphic = false;
};

// 2x2 matrix of scalar fields (frame changes, metric, adjugates).
struct FieldMat {
    ScalarField e[2][2];
};

inline FieldMat fm_mul(const FieldMat& x, const FieldMat& y) {
    FieldMat r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r.e[i][j] = x.e[i][0] * y.e[0][j] + x.e[i][1] * y.e[1][j];
    return r;
}

inline ScalarField fm_det(const FieldMat& x) {
    return x.e[0][0] * x.e[1][1] - x.e[0][1] * x.e[1][0];
}

inline FieldMat fm_inverse(const FieldMat& x) {
    ScalarField inv_det = ScalarField(cplx(1)) / fm_det(x);
    FieldMat r;
    r.e[0][0] = x.e[1][1] * inv_det;
    r.e[0][1] = cplx(-1) * x.e[0][1] * inv_det;
    r.e[1][0] = cplx(-1) * x.e[1][0] * inv_det;
    r.e[1][1] = x.e[0][0] * inv_det;
    return r;
}

inline MatForm fm_d(const Chart& c, const FieldMat& x) {
    MatForm r(c, 1);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.e[i][j] = d(KForm::monomial(c, 0, x.e[i][j]));
    return r;
}

inline MatForm fm_times_form(const FieldMat& x, const MatForm& y) {
    MatForm r(y.chart, y.degree);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r.e[i][j] = x.e[i][0] * y.e[0][j] + x.e[i][1] * y.e[1][j];
    return r;
}

inline MatForm form_times_fm(const MatForm& x, const FieldMat& y) {
    MatForm r(x.chart, x.degree);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r.e[i][j] = y.e[0][j] * x.e[i][0] + y.e[1][j] * x.e[i][1];
    return r;
}

// Hermitian metric in the standard holomorphic frame, with the determinant
// trivialized by e1 ^ e2.
struct HermitianBundle {
    Chart chart;
    FieldMat h;  // positive-definite hermitian; h[1][0] = conj(h[0][1])

    HermitianBundle(Chart c, ScalarField h11, ScalarField h12, ScalarField h22) : chart(c) {
        h.e[0][0] = std::move(h11);
        h.e[0][1] = std::move(h12);
        h.e[1][0] = fconj(h.e[0][1]);
        h.e[1][1] = std::move(h22);
    }

    static HermitianBundle flat(const Chart& c) {
        return {c, ScalarField(cplx(1)), ScalarField(cplx(0)), ScalarField(cplx(1))};
    }

    // mu(s, s') = conj(s')^T H s: linear in s, conjugate-linear in s'.
    ScalarField pair(const Section& s, const Section& sp) const {
        ScalarField r;
        const ScalarField* sv[2] = {&s.c1, &s.c2};
        const ScalarField* spv[2] = {&sp.c1, &sp.c2};
        r = ScalarField(cplx(0));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r = r + fconj(*spv[i]) * h.e[i][j] * (*sv[j]);
        return r;
    }

    ScalarField norm2(const Section& s) const { return pair(s, s); }

    // s ^ s' divided by the determinant trivialization.
    static ScalarField wedge_pair(const Section& s, const Section& sp) {
        return s.c1 * sp.c2 - s.c2 * sp.c1;
    }

    // Pointwise positivity check used wherever the metric is inverted.
    std::function<void(const Point&)> degeneracy_check() const {
        ScalarField det = freal(fm_det(h));
        ScalarField tr = freal(h.e[0][0] + h.e[1][1]);
        return [det, tr](const Point& p) {
            if (det(p).real() < 1e-12 || tr(p).real() < 1e-12)
                throw std::domain_error("degenerate hermitian metric");
        };
    }

    // Metric rescaled to determinant one (positive-definite: det > 0), the
    // metric the conjugate-linear structure is built from so that j^2 = -1.
    FieldMat unit_det_metric() const {
        ScalarField scale =
            with_guard(ScalarField(cplx(1)) / fsqrt(freal(fm_det(h))), degeneracy_check());
        FieldMat r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.e[i][j] = scale * h.e[i][j];
        return r;
    }

    ScalarField unit_pair(const Section& s, const Section& sp) const {
        return (ScalarField(cplx(1)) / fsqrt(freal(fm_det(h)))) * pair(s, sp);
    }
};

// The conjugate-linear bundle map j, defined by s ^ (j s') = mu(s, s') for
// all s, with mu normalized to determinant one.
inline Section j_structure(const HermitianBundle& E, const Section& sp) {
    FieldMat m = E.unit_det_metric();
    Section r;
    r.c1 = cplx(-1) * (m.e[0][1] * fconj(sp.c1) + m.e[1][1] * fconj(sp.c2));
    r.c2 = m.e[0][0] * fconj(sp.c1) + m.e[1][0] * fconj(sp.c2);
    r.holomorphic = false;
    return r;
}

// ---- connections ---------------------------------------------------------

enum class Frame { Holomorphic, SectionFrame };

struct Connection {
    Chart chart;
    MatForm theta;  // degree-1 connection matrix: D = d + theta in `frame`
    Frame frame = Frame::Holomorphic;
    std::string frame_tag;  // identifies the section frame when applicable

    Connection(Chart c, MatForm th, Frame f, std::string tag = {})
        : chart(c), theta(std::move(th)), frame(f), frame_tag(std::move(tag)) {}
};

inline MatForm curvature(const Connection& D) { return d(D.theta) + wedge(D.theta, D.theta); }

// D applied to a section written in the same frame as the connection.
inline std::array<KForm, 2> apply(const Connection& D, const Section& s) {
    const ScalarField* sv[2] = {&s.c1, &s.c2};
    std::array<KForm, 2> r = {KForm(D.chart, 1), KForm(D.chart, 1)};
    for (int i = 0; i < 2; ++i) {
        r[static_cast<size_t>(i)] = d(KForm::monomial(D.chart, 0, *sv[i])) +
                                    (*sv[0]) * D.theta.e[i][0] + (*sv[1]) * D.theta.e[i][1];
    }
    return r;
}

inline MatForm connection_difference(const Connection& D1, const Connection& D0) {
    if (D1.frame != D0.frame ||
        (D1.frame == Frame::SectionFrame && D1.frame_tag != D0.frame_tag))
        throw std::invalid_argument("connection difference requires matching frames");
    return D1.theta - D0.theta;
}

// theta = H^{-1} del H: the unique metric-compatible connection whose (0,1)
// part vanishes in the holomorphic frame.
inline Connection chern_connection(const HermitianBundle& E) {
    MatForm dh = fm_d(E.chart, E.h);
    MatForm del_h(E.chart, 1);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) del_h.e[i][j] = type_project(dh.e[i][j], 1, 0);
    FieldMat inv = fm_inverse(E.h);
    auto check = E.degeneracy_check();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) inv.e[i][j] = with_guard(inv.e[i][j], check);
    MatForm theta = fm_times_form(inv, del_h);
    return {E.chart, theta, Frame::Holomorphic};
}

inline KForm del_scalar(const Chart& c, const ScalarField& f) {
    return type_project(d(KForm::monomial(c, 0, f)), 1, 0);
}

inline KForm dbar_scalar(const Chart& c, const ScalarField& f) {
    return type_project(d(KForm::monomial(c, 0, f)), 0, 1);
}

// Frame matrix with columns (s, j s).
inline FieldMat section_frame(const HermitianBundle& E, const Section& s) {
    Section js = j_structure(E, s);
    FieldMat u;
    u.e[0][0] = s.c1;
    u.e[1][0] = s.c2;
    u.e[0][1] = js.c1;
    u.e[1][1] = js.c2;
    return u;
}

// Rewrites a connection matrix in the frame with columns U: U^{-1} theta U +
// U^{-1} dU.
inline MatForm theta_in_frame(const Chart& c, const MatForm& theta, const FieldMat& u) {
    FieldMat ui = fm_inverse(u);
    return fm_times_form(ui, form_times_fm(theta, u)) + fm_times_form(ui, fm_d(c, u));
}

// Tensorial transformation of a connection difference into the frame U.
inline MatForm difference_in_frame(const MatForm& a, const FieldMat& u) {
    return fm_times_form(fm_inverse(u), form_times_fm(a, u));
}

struct FrameFormulas {
    KForm alpha;      // diagonal (1,0) term: del log |s|^2
    KForm beta;       // off-diagonal (1,0) term
    MatForm theta;    // full connection matrix in the (s, j s) frame
};

// Connection matrix of the metric (1,0)-connection in the frame (s, j s) of
// a holomorphic section s: [[del log|s|^2, beta], [-conj beta, dbar log|s|^2]].
inline FrameFormulas frame_formulas(const HermitianBundle& E, const Section& s) {
    Connection cc = chern_connection(E);
    FieldMat u = section_frame(E, s);
    MatForm theta = theta_in_frame(E.chart, cc.theta, u);
    ScalarField n2 = E.norm2(s);
    // theta acts on frame components (columns); the off-diagonal (1,0) term
    // beta sits at [1][0] in this convention.
    FrameFormulas r{del_scalar(E.chart, flog(n2)), theta.e[1][0], theta};
    return r;
}

// The flat connection killing s and j s: theta = -dU U^{-1} in the
// holomorphic frame, where U has columns (s, j s).
inline Connection flat_connection_from_section(const HermitianBundle& E, const Section& s,
                                               const std::string& tag = "flat") {
    FieldMat u = section_frame(E, s);
    MatForm theta = cplx(-1) * form_times_fm(fm_d(E.chart, u), fm_inverse(u));
    return {E.chart, theta, Frame::Holomorphic, tag};
}

// D' = (1,0) part of the flat connection plus the (0,1) part of the metric
// connection; in the holomorphic frame the latter vanishes.
inline Connection make_more_holomorphic(const Connection& flat) {
    MatForm theta(flat.chart, 1);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) theta.e[i][j] = type_project(flat.theta.e[i][j], 1, 0);
    return {flat.chart, theta, flat.frame, flat.frame_tag};
}

// Quaternionic scalar multiplication on sections: (p + q j) . s = p s + q (j s).
inline Section quat_scale(const HermitianBundle& E, const ScalarField& p, const ScalarField& q,
                          const Section& s) {
    Section js = j_structure(E, s);
    return {p * s.c1 + q * js.c1, p * s.c2 + q * js.c2, false};
}

}  // namespace abelcs
