#pragma once

// Transgression of tr(R^R) between two connections: the degree-3 integrand,
// its pairing against test forms of type (3,0)+(2,1), and the shrinking-tube
// limit for the flat / holomorphicized connection pair of a section whose
// zero set is a complex line.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "abelcs/bundle.hpp"
#include "abelcs/integrate.hpp"

namespace abelcs {

// Test forms pair only through their (3,0)+(2,1) part; anything else is
// rejected rather than silently projected.
inline void require_test_form(const KForm& tau) {
    if (tau.degree() != 3) throw std::invalid_argument("test form must have degree 3");
    for (const auto& [mask, f] : tau.coeffs())
        if (holomorphic_count(mask) < 2)
            throw std::invalid_argument("test form must be of type (3,0)+(2,1)");
}

// Covariant derivative of an ad-valued form: dA + theta^A + A^theta.
inline MatForm covariant_derivative(const Connection& D, const MatForm& a) {
    return d(a) + wedge(D.theta, a) + wedge(a, D.theta);
}

// Fiber integral over t of 2 tr(A ^ R(t)) for the interpolated connection
// family D0 + t(D1 - D0):
//   tr(A ^ (2 R0 + D0 A + 2/3 A^A)).
// When both connections are flat this reduces to -1/3 tr(A^A^A).
inline KForm cs_transgression(const Connection& D0, const Connection& D1) {
    MatForm a = connection_difference(D1, D0);
    MatForm r0 = curvature(D0);
    MatForm d0a = covariant_derivative(D0, a);
    return cplx(2) * trace(wedge(a, r0)) + trace(wedge(a, d0a)) +
           cplx(2.0 / 3.0) * trace(wedge(wedge(a, a), a));
}

struct CSPairing {
    cplx value{};
    double error_estimate = 0.0;
    std::int64_t samples = 0;
    std::vector<double> excision;
    bool converged = true;
};

namespace detail {

// Pointwise 2x2 matrix of evaluated forms: enough to rebuild the
// transgression numerically per sample instead of fusing one huge
// coefficient graph (the fused graph re-evaluates shared field subtrees
// hundreds of times per point).
using MatValue = std::array<std::array<FormValue, 2>, 2>;

inline MatValue eval_mat(const MatForm& m, const Point& p) {
    MatValue v;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) v[static_cast<size_t>(i)][static_cast<size_t>(j)] = m.e[i][j].eval(p);
    return v;
}

inline MatValue mat_wedge(const MatValue& x, const MatValue& y) {
    MatValue r;
    for (size_t i = 0; i < 2; ++i)
        for (size_t j = 0; j < 2; ++j) {
            r[i][j] = wedge(x[i][0], y[0][j]) + wedge(x[i][1], y[1][j]);
            r[i][j].degree = x[i][0].degree + y[0][j].degree;
        }
    return r;
}

inline FormValue mat_trace(const MatValue& x) { return x[0][0] + x[1][1]; }

}  // namespace detail

// Pairing of the transgression current with a test form:
// integral over the chart of tau ^ transgression.
inline CSPairing cs_pair(const Connection& D0, const Connection& D1, const KForm& tau,
                         const QuadratureSpec& spec,
                         const std::function<double(const Point&)>& clearance = {}) {
    require_test_form(tau);
    const Chart& c = D0.chart;
    if (c.m != 3) throw std::invalid_argument("cs_pair expects a 3-dimensional chart");
    MatForm a = connection_difference(D1, D0);
    MatForm r0 = curvature(D0);
    MatForm d0a = covariant_derivative(D0, a);
    Mask tm = top_mask(c.m);
    cplx factor = top_form_measure_factor(c.m);
    auto density = [&](const Point& p) -> cplx {
        detail::MatValue av = detail::eval_mat(a, p);
        FormValue t = cplx(2) * detail::mat_trace(detail::mat_wedge(av, detail::eval_mat(r0, p))) +
                      detail::mat_trace(detail::mat_wedge(av, detail::eval_mat(d0a, p))) +
                      cplx(2.0 / 3.0) *
                          detail::mat_trace(detail::mat_wedge(detail::mat_wedge(av, av), av));
        t.degree = 3;
        return factor * wedge(tau.eval(p), t).c[tm];
    };
    IntegralResult r = spec.method == QuadMethod::PeriodicGrid
                           ? periodic_grid_integrate(c, spec, density, clearance)
                           : qmc_box_integrate(c, spec, density, clearance);
    CSPairing out;
    out.value = r.value;
    out.error_estimate = r.error_estimate;
    out.excision = spec.excision;
    if (spec.method == QuadMethod::Qmc) {
        out.samples = spec.samples;
    } else {
        out.samples = 1;
        for (int i = 0; i < D0.chart.real_dim(); ++i) out.samples *= spec.resolution;
    }
    out.converged = r.converged;
    return out;
}

// ---- shrinking-tube limit ------------------------------------------------

// For the pair (flat connection of a section s, its holomorphicized
// companion) the transgression reduces to the closed 3-form
// dbar log|s|^2 ^ del dbar log|s|^2; the pairing with a d-closed test form
// localizes on the zero line of s, and the tube boundary terms decay like
// eps (log eps)^2.

struct TubularLimitReport {
    std::vector<std::pair<double, cplx>> interior;  // (eps, pairing outside the eps-tube)
    std::vector<std::pair<double, cplx>> boundary;  // (eps, tube boundary integral)
    cplx limit{};                                   // eps -> 0 extrapolant of the boundary series
    double fit_residual = 0.0;
    double fitted_exponent = 0.0;  // gamma in |boundary| ~ C eps^gamma (log eps)^2
    double stokes_defect = 0.0;    // max |interior + boundary| over the schedule
    bool empty_tube = false;       // section does not vanish on the reference line
};

namespace detail {

// Transverse Hopf parameterization of the tube around the line z1 = z2 = 0:
// (z1, z2) = r (cos t e^{i p1}, sin t e^{i p2}), z3 = x3 + i y3.
inline Point tube_point(double r, double t, double p1, double p2, double x3, double y3) {
    Point p;
    p.z[0] = r * std::cos(t) * cplx(std::cos(p1), std::sin(p1));
    p.z[1] = r * std::sin(t) * cplx(std::cos(p2), std::sin(p2));
    p.z[2] = cplx(x3, y3);
    return p;
}

// Tangent vectors of the parameterization, ordered (r, p1, t, p2, x3, y3);
// this ordering is positively oriented for the ambient
// (x1, y1, x2, y2, x3, y3) orientation.
inline std::vector<std::array<cplx, 3>> tube_tangents(double r, double t, double p1, double p2) {
    cplx e1(std::cos(p1), std::sin(p1)), e2(std::cos(p2), std::sin(p2));
    double ct = std::cos(t), st = std::sin(t);
    return {
        {ct * e1, st * e2, cplx(0)},
        {cplx(0, 1) * r * ct * e1, cplx(0), cplx(0)},
        {-r * st * e1, r * ct * e2, cplx(0)},
        {cplx(0), cplx(0, 1) * r * st * e2, cplx(0)},
        {cplx(0), cplx(0), cplx(1)},
        {cplx(0), cplx(0), cplx(0, 1)},
    };
}

}  // namespace detail

// Computes the pairing of the transgression of (flat-from-s, holomorphicized)
// with a d-closed test form tau of type (3,0)+(2,1), as a limit over tubes
// around the line z1 = z2 = 0.  `resolution` controls the Gauss/periodic
// grids; tau must decay fast enough that the chart box contains its support.
inline TubularLimitReport tubular_limit(const HermitianBundle& E, const Section& s,
                                        const KForm& tau, const std::vector<double>& radii,
                                        int resolution = 8) {
    require_test_form(tau);
    if (radii.size() < 4)
        throw std::invalid_argument("tube radius schedule too short for a stable fit");
    for (size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] < radii[i - 1]))
            throw std::invalid_argument("tube radii must be strictly decreasing");
    const Chart& c = E.chart;
    if (c.m != 3) throw std::invalid_argument("tube limit needs a 3-dimensional chart");

    TubularLimitReport rep;
    ScalarField n2 = E.norm2(s);

    // Empty tube: the section does not vanish on the reference line, so the
    // excised region disappears and every boundary term is zero.
    {
        double min_n2 = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= 8; ++k) {
            Point p;
            double x = c.re_lo[2] + (c.re_hi[2] - c.re_lo[2]) * k / 8.0;
            p.z[2] = cplx(x, 0.1 * x);
            min_n2 = std::min(min_n2, n2(p).real());
        }
        if (min_n2 > 1e-8) {
            rep.empty_tube = true;
            for (double eps : radii) {
                rep.interior.emplace_back(eps, cplx(0));
                rep.boundary.emplace_back(eps, cplx(0));
            }
            return rep;
        }
    }

    ScalarField log_n2 = flog(n2);
    KForm dl = d(KForm::monomial(c, 0, log_n2));
    KForm dbar_log = type_project(dl, 0, 1);
    KForm ddbar_log = type_project(d(dbar_log), 1, 1);

    // The factors are evaluated separately and wedged pointwise; fusing them
    // into one coefficient graph re-evaluates the shared subtrees per term.
    auto interior_density = [&](const Point& p, const std::vector<std::array<cplx, 3>>& tans) {
        return eval_on(wedge(wedge(dbar_log.eval(p), ddbar_log.eval(p)), tau.eval(p)), tans);
    };
    auto boundary_density = [&](const Point& p, const std::vector<std::array<cplx, 3>>& tans) {
        return log_n2(p) * eval_on(wedge(ddbar_log.eval(p), tau.eval(p)), tans);
    };

    int n = resolution;
    int n3 = n + 10;
    GaussRule gt = gauss_legendre(n);     // t in [0, pi/2]
    GaussRule gr_in = gauss_legendre(n);  // radial nodes per segment
    GaussRule g3 = gauss_legendre(n3);         // z3 box
    double r_max = std::min({c.re_hi[0], c.im_hi[0], c.re_hi[1], c.im_hi[1]});
    if (radii[0] >= r_max)
        throw std::invalid_argument("largest tube radius must be inside the chart");

    auto angular_sum = [&](double r, const auto& density, bool with_radial) {
        std::vector<cplx> terms;
        for (int it = 0; it < n; ++it) {
            double t = (gt.x[static_cast<size_t>(it)] + 1.0) * (M_PI / 4.0);
            double wt = gt.w[static_cast<size_t>(it)] * (M_PI / 4.0);
            for (int i1 = 0; i1 < n; ++i1) {
                double p1 = 2.0 * M_PI * i1 / n;
                for (int i2 = 0; i2 < n; ++i2) {
                    double p2 = 2.0 * M_PI * i2 / n;
                    auto tan6 = detail::tube_tangents(r, t, p1, p2);
                    std::vector<std::array<cplx, 3>> tans;
                    if (with_radial)
                        tans = tan6;
                    else
                        tans.assign(tan6.begin() + 1, tan6.end());
                    for (int k3 = 0; k3 < n3; ++k3) {
                        double x3 = c.re_lo[2] +
                                    (g3.x[static_cast<size_t>(k3)] + 1.0) * 0.5 * (c.re_hi[2] - c.re_lo[2]);
                        double wx = g3.w[static_cast<size_t>(k3)] * 0.5 * (c.re_hi[2] - c.re_lo[2]);
                        for (int l3 = 0; l3 < n3; ++l3) {
                            double y3 = c.im_lo[2] +
                                        (g3.x[static_cast<size_t>(l3)] + 1.0) * 0.5 * (c.im_hi[2] - c.im_lo[2]);
                            double wy = g3.w[static_cast<size_t>(l3)] * 0.5 * (c.im_hi[2] - c.im_lo[2]);
                            Point p = detail::tube_point(r, t, p1, p2, x3, y3);
                            cplx v = density(p, tans);
                            terms.push_back(v * (wt * wx * wy * (2.0 * M_PI / n) * (2.0 * M_PI / n)));
                        }
                    }
                }
            }
        }
        return pairwise_sum(std::move(terms));
    };

    // Interior pairings, accumulated shell by shell from the outside in.  The
    // outer region [radii[0], r_max] spans many radial scales, so it is cut
    // into geometrically graded segments with one Gauss rule per segment.
    std::vector<double> segs;  // descending radial edges
    {
        std::vector<double> outer;
        for (double r = radii[0]; r * 2.0 < r_max; r *= 2.0) outer.push_back(r);
        segs.push_back(r_max);
        for (size_t i = outer.size(); i-- > 1;) segs.push_back(outer[i]);
        for (double eps : radii) segs.push_back(eps);
    }
    size_t outer_count = segs.size() - radii.size();  // segments above radii[0]
    std::vector<cplx> shells;  // one value per [segs[k+1], segs[k]]
    for (size_t sgi = 0; sgi + 1 < segs.size(); ++sgi) {
        double hi = segs[sgi], lo = segs[sgi + 1];
        std::vector<cplx> terms;
        for (size_t ir = 0; ir < gr_in.x.size(); ++ir) {
            double r = lo + (gr_in.x[ir] + 1.0) * 0.5 * (hi - lo);
            double wr = gr_in.w[ir] * 0.5 * (hi - lo);
            terms.push_back(wr * angular_sum(r, interior_density, true));
        }
        shells.push_back(pairwise_sum(std::move(terms)));
    }
    cplx acc = 0;
    for (size_t k = 0; k < outer_count; ++k) acc += shells[k];
    rep.interior.emplace_back(radii[0], acc);
    for (size_t k = 1; k < radii.size(); ++k) {
        acc += shells[outer_count + k - 1];
        rep.interior.emplace_back(radii[k], acc);
    }

    // Tube boundary integrals, oriented as the boundary of the excised tube,
    // so that interior(eps) + boundary(eps) ~ 0 by Stokes.
    for (double eps : radii) {
        cplx b = angular_sum(eps, boundary_density, false);
        rep.boundary.emplace_back(eps, b);
    }

    // The boundary series decays geometrically along the halving schedule, so
    // iterated Aitken delta-squared acceleration extrapolates it to eps -> 0;
    // the generic least-squares model in extrapolate() is ill-conditioned here
    // because eps (log eps)^2 is nearly constant over a one-decade schedule.
    {
        std::vector<cplx> seq;
        for (const auto& [eps, b] : rep.boundary) seq.push_back(b);
        auto aitken = [](const std::vector<cplx>& v) {
            std::vector<cplx> out;
            for (size_t i = 0; i + 2 < v.size(); ++i) {
                cplx den = v[i] - cplx(2) * v[i + 1] + v[i + 2];
                out.push_back(std::abs(den) > 1e-300
                                  ? (v[i] * v[i + 2] - v[i + 1] * v[i + 1]) / den
                                  : v[i + 2]);
            }
            return out;
        };
        std::vector<cplx> acc1 = aitken(seq);
        std::vector<cplx> acc2 = acc1.size() >= 3 ? aitken(acc1) : acc1;
        rep.limit = acc2.back();
        rep.fit_residual = acc1.size() >= 2 ? std::abs(acc1[acc1.size() - 1] - acc1[acc1.size() - 2])
                                            : std::abs(acc1.back() - seq.back());
    }

    // Exponent of |boundary| ~ C eps^gamma |log eps|^p.  The eps (log eps)^2
    // bound is only an upper envelope; the realized logarithm power depends
    // on the section, so each p in {0, 1, 2} is tried and the power with the
    // smallest fit residual decides the reported gamma.
    {
        double best_resid = std::numeric_limits<double>::infinity();
        for (int p = 0; p <= 2; ++p) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            int cnt = 0;
            for (const auto& [eps, b] : rep.boundary) {
                double mag = std::abs(b) / std::pow(std::abs(std::log(eps)), p);
                if (mag <= 0) continue;
                double x = std::log(eps), y = std::log(mag);
                sx += x; sy += y; sxx += x * x; sxy += x * y;
                ++cnt;
            }
            if (cnt < 3) continue;
            double gamma = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
            double icept = (sy - gamma * sx) / cnt;
            double resid = 0;
            for (const auto& [eps, b] : rep.boundary) {
                double mag = std::abs(b) / std::pow(std::abs(std::log(eps)), p);
                if (mag <= 0) continue;
                double e = std::log(mag) - (icept + gamma * std::log(eps));
                resid += e * e;
            }
            if (resid < best_resid) {
                best_resid = resid;
                rep.fitted_exponent = gamma;
            }
        }
    }

    for (size_t k = 0; k < radii.size(); ++k)
        rep.stokes_defect = std::max(
            rep.stokes_defect, std::abs(rep.interior[k].second + rep.boundary[k].second));
    return rep;
}

}  // namespace abelcs
