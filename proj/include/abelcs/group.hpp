#pragma once

// Calculus on maps into the nonzero quaternions: Maurer-Cartan form, the
// bi-invariant 3-form of the unit-sphere part, and the closed-form constants
// obtained by integrating it over the unit sphere.

#include <functional>
#include <stdexcept>

#include "abelcs/field.hpp"
#include "abelcs/forms.hpp"
#include "abelcs/integrate.hpp"
#include "abelcs/quaternion.hpp"

namespace abelcs {

namespace detail {

// Delegates to the child but first runs a pointwise check (used to reject
// evaluation inside an excised neighborhood of the singular set).
class GuardNode final : public FieldOp<GuardNode> {
  public:
    GuardNode(FieldPtr child, std::function<void(const Point&)> check)
        : child_(std::move(child)), check_(std::move(check)) {}
    template <class T>
    T ev(const Point& p) const {
        check_(p);
        return feval<T>(*child_, p);
    }

  private:
    FieldPtr child_;
    std::function<void(const Point&)> check_;
};

}  // namespace detail

inline ScalarField with_guard(const ScalarField& f, std::function<void(const Point&)> check) {
    return ScalarField(std::make_shared<detail::GuardNode>(f.node(), std::move(check)));
}

// A map from a chart into the quaternions, g = a + b j, with an optional
// clearance function measuring distance to the excised singular set.
struct GroupMap {
    Chart chart;
    ScalarField a, b;
    std::function<double(const Point&)> clearance;  // empty: no excision
    double excision_radius = 0.0;
    double norm_floor = 1e-12;

    GroupMap(Chart c, ScalarField a_, ScalarField b_)
        : chart(c), a(std::move(a_)), b(std::move(b_)) {}

    void check(const Point& p) const {
        if (clearance && clearance(p) < excision_radius)
            throw std::domain_error("evaluation inside the excised neighborhood of the singular set");
    }

    Quaternion value(const Point& p) const {
        check(p);
        Quaternion q{a(p), b(p)};
        if (q.norm2() < norm_floor)
            throw std::domain_error("group map evaluated at a zero of the quaternion norm");
        return q;
    }

    ScalarField norm2_field() const { return a * fconj(a) + b * fconj(b); }
};

namespace detail {

inline std::function<void(const Point&)> singular_check(const GroupMap& g) {
    ScalarField n2 = g.norm2_field();
    double floor = g.norm_floor;
    auto clearance = g.clearance;
    double radius = g.excision_radius;
    return [n2, floor, clearance, radius](const Point& p) {
        if (clearance && clearance(p) < radius)
            throw std::domain_error("evaluation inside the excised neighborhood of the singular set");
        if (std::abs(n2(p)) < floor)
            throw std::domain_error("group map evaluated at a zero of the quaternion norm");
    };
}

inline KForm d_scalar(const Chart& c, const ScalarField& f) {
    return d(KForm::monomial(c, 0, f));
}

}  // namespace detail

// g^{-1} dg as a quaternion-valued 1-form.  Coefficients carry a singularity
// guard so evaluation inside an excision (or at a zero of g) raises.
inline QForm maurer_cartan(const GroupMap& g) {
    auto check = detail::singular_check(g);
    ScalarField n2 = g.norm2_field();
    ScalarField pa = with_guard(fconj(g.a) / n2, check);   // g^{-1} = (abar - b j)/|g|^2
    ScalarField qb = with_guard(cplx(-1) * g.b / n2, check);
    QForm dg(detail::d_scalar(g.chart, g.a), detail::d_scalar(g.chart, g.b));
    return qscale(pa, qb, dg);
}

// kappa^{-1} d kappa for the unit part kappa = g / |g|.
inline QForm unit_maurer_cartan(const GroupMap& g) {
    auto check = detail::singular_check(g);
    ScalarField n2 = g.norm2_field();
    ScalarField pa = with_guard(fconj(g.a) / n2, check);
    ScalarField qb = with_guard(cplx(-1) * g.b / n2, check);
    QForm om = qscale(pa, qb, QForm(detail::d_scalar(g.chart, g.a), detail::d_scalar(g.chart, g.b)));
    // kappa^{-1} d kappa = g^{-1} dg - d log|g| (subtract the scale part)
    KForm dlogr = cplx(0.5) * (detail::d_scalar(g.chart, flog(n2)));
    return {om.A - dlogr, om.B};
}

// d log |g| as a real scalar-valued 1-form.
inline KForm scale_part(const GroupMap& g) {
    auto check = detail::singular_check(g);
    ScalarField n2 = with_guard(g.norm2_field(), check);
    return cplx(0.5) * detail::d_scalar(g.chart, flog(n2));
}

inline KForm trace(const QForm& x) { return x.A + conj(x.A); }

// tr((kappa^{-1} d kappa)^3): the pullback of the bi-invariant 3-form on the
// unit sphere.  Real-valued and closed.
inline KForm invariant_three_form(const GroupMap& g) {
    QForm om = unit_maurer_cartan(g);
    return trace(qwedge(qwedge(om, om), om));
}

// tr((g^{-1} dg)^3) for the full (non-unit) map.
inline KForm full_three_form(const GroupMap& g) {
    QForm om = maurer_cartan(g);
    return trace(qwedge(qwedge(om, om), om));
}

// ---- the unit-sphere constants -------------------------------------------

struct SphereConstants {
    double three_form_integral;  // integral of tr((k^{-1}dk)^3) over the unit sphere
    double volume;               // Riemannian volume of the unit sphere
};

namespace detail {

// tr(M1^M2^M3) evaluated on three tangents: alternating sum of matrix traces.
inline double alternating_trace(const Mat2 m[3]) {
    static const int perm[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}};
    cplx total = 0;
    for (int s = 0; s < 6; ++s) {
        Mat2 prod = matmul(matmul(m[perm[s][0]], m[perm[s][1]]), m[perm[s][2]]);
        cplx tr = prod[0][0] + prod[1][1];
        total += (s < 3) ? tr : -tr;
    }
    return total.real();
}

// Pullback of tr((k^{-1}dk)^3) through a parameterization of the unit sphere:
// tangents given as quaternion derivatives (du, dv) per parameter, at the
// point kappa = (u, v).
inline double pullback_density(const Quaternion& kappa, const Quaternion t[3]) {
    Quaternion kinv = inverse(kappa);
    Mat2 m[3];
    for (int k = 0; k < 3; ++k) m[k] = embed(kinv * t[k]);
    return alternating_trace(m);
}

}  // namespace detail

// Angle-coordinate parameterization (u, v) = (cos t e^{i p1}, sin t e^{i p2}),
// t in [0, pi/2], p1, p2 in [0, 2 pi).  `flip` reverses the orientation.
inline SphereConstants sphere_constants_angles(int resolution = 64, bool flip = false) {
    GaussRule gr = gauss_legendre(resolution);
    double cs = 0, vol = 0;
    for (int it = 0; it < resolution; ++it) {
        double t = (gr.x[static_cast<size_t>(it)] + 1.0) * (M_PI / 4);
        double wt = gr.w[static_cast<size_t>(it)] * (M_PI / 4);
        double ct = std::cos(t), st = std::sin(t);
        for (int i1 = 0; i1 < resolution; ++i1) {
            double p1 = (gr.x[static_cast<size_t>(i1)] + 1.0) * M_PI;
            double w1 = gr.w[static_cast<size_t>(i1)] * M_PI;
            cplx e1 = std::polar(1.0, p1);
            for (int i2 = 0; i2 < resolution; ++i2) {
                double p2 = (gr.x[static_cast<size_t>(i2)] + 1.0) * M_PI;
                double w2 = gr.w[static_cast<size_t>(i2)] * M_PI;
                cplx e2 = std::polar(1.0, p2);
                cplx u = ct * e1, v = st * e2;
                Quaternion kappa{u, v};
                Quaternion tang[3] = {
                    {-st * e1, ct * e2},           // d/dt
                    {cplx(0, 1) * u, 0},           // d/dp1
                    {0, cplx(0, 1) * v},           // d/dp2
                };
                double f = detail::pullback_density(kappa, tang);
                cs += wt * w1 * w2 * f;
                vol += wt * w1 * w2 * ct * st;  // round volume element
            }
        }
    }
    if (flip) cs = -cs;
    return {cs, vol};
}

// Geodesic polar parameterization kappa = cos r + sin r (n1 i + n2 j + n3 k)
// with n on the unit 2-sphere; a genuinely different chart used as a
// consistency check on the angle chart.
inline SphereConstants sphere_constants_polar(int resolution = 64) {
    GaussRule gr = gauss_legendre(resolution);
    double cs = 0, vol = 0;
    for (int ir = 0; ir < resolution; ++ir) {
        double r = (gr.x[static_cast<size_t>(ir)] + 1.0) * (M_PI / 2);
        double wr = gr.w[static_cast<size_t>(ir)] * (M_PI / 2);
        double cr = std::cos(r), sr = std::sin(r);
        for (int ia = 0; ia < resolution; ++ia) {
            double al = (gr.x[static_cast<size_t>(ia)] + 1.0) * (M_PI / 2);
            double wa = gr.w[static_cast<size_t>(ia)] * (M_PI / 2);
            double sa = std::sin(al), ca = std::cos(al);
            for (int ib = 0; ib < resolution; ++ib) {
                double be = (gr.x[static_cast<size_t>(ib)] + 1.0) * M_PI;
                double wb = gr.w[static_cast<size_t>(ib)] * M_PI;
                double cb = std::cos(be), sb = std::sin(be);
                // n = (sa cb, sa sb, ca) as a pure quaternion n1 i + n2 j + n3 k
                cplx na(0, sa * cb);
                cplx nb(sa * sb, ca);
                Quaternion kappa{cr + na * sr, nb * sr};
                // parameter order (r, beta, alpha) is the orientation matching
                // the angle chart
                Quaternion tang[3] = {
                    {-sr + cr * na, cr * nb},                                   // d/dr
                    {sr * cplx(0, -sa * sb), sr * cplx(sa * cb, 0)},            // d/dbeta
                    {sr * cplx(0, ca * cb), sr * cplx(ca * sb, -sa)},           // d/dalpha
                };
                double f = detail::pullback_density(kappa, tang);
                cs += wr * wa * wb * f;
                vol += wr * wa * wb * sr * sr * sa;
            }
        }
    }
    return {cs, vol};
}

}  // namespace abelcs
