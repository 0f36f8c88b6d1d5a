#include <cmath>

#include "abelcs/integrate.hpp"
#include "doctest.h"

using namespace abelcs;

namespace {

Chart unit_box(int m) {
    Chart c(m);
    for (int i = 0; i < m; ++i) {
        auto s = static_cast<size_t>(i);
        c.re_lo[s] = 0;
        c.re_hi[s] = 1;
        c.im_lo[s] = 0;
        c.im_hi[s] = 1;
    }
    return c;
}

}  // namespace

TEST_CASE("Gauss-Legendre rule integrates polynomials exactly") {
    GaussRule g = gauss_legendre(5);
    double total_w = 0, x8 = 0;
    for (size_t i = 0; i < g.x.size(); ++i) {
        total_w += g.w[i];
        x8 += g.w[i] * std::pow(g.x[i], 8);
    }
    CHECK(total_w == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(x8 == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("constant integrates to the box volume") {
    Chart c = unit_box(3);
    KForm one = KForm::monomial(c, top_mask(3), ScalarField(cplx(1) / top_form_measure_factor(3)));
    QuadratureSpec spec;
    spec.samples = 1 << 14;
    IntegralResult r = integrate(one, c, spec);
    CHECK(std::abs(r.value - cplx(1)) < 1e-12);
}

TEST_CASE("smooth 2d integral via QMC") {
    // integral of x*y over the unit square = 1/4
    Chart c = unit_box(1);
    ScalarField x = freal(coord(0)), y = fimag(coord(0));
    KForm form = KForm::monomial(c, top_mask(1), x * y * (cplx(1) / top_form_measure_factor(1)));
    QuadratureSpec spec;
    spec.samples = 1 << 16;
    IntegralResult r = integrate(form, c, spec);
    CHECK(std::abs(r.value - cplx(0.25)) < 1e-5);
}

TEST_CASE("QMC linearity in the integrand") {
    Chart c = unit_box(1);
    ScalarField f = freal(coord(0)), g = fimag(coord(0)) * fimag(coord(0));
    cplx inv = cplx(1) / top_form_measure_factor(1);
    KForm ff = KForm::monomial(c, top_mask(1), f * inv);
    KForm gg = KForm::monomial(c, top_mask(1), g * inv);
    KForm combo = KForm::monomial(c, top_mask(1), (cplx(2) * f + cplx(0, 3) * g) * inv);
    QuadratureSpec spec;
    spec.samples = 1 << 12;
    cplx a = integrate(ff, c, spec).value;
    cplx b = integrate(gg, c, spec).value;
    cplx ab = integrate(combo, c, spec).value;
    CHECK(std::abs(ab - (cplx(2) * a + cplx(0, 3) * b)) < 1e-12);
}

TEST_CASE("spectral accuracy of the periodic grid") {
    // integral of e^{cos x} over [0,2pi]^2 = (2pi)^2 I0(1)
    Chart c(1);
    c.re_lo[0] = 0;
    c.re_hi[0] = 2 * M_PI;
    c.im_lo[0] = 0;
    c.im_hi[0] = 2 * M_PI;
    ScalarField f = fexp(fcos(freal(coord(0))));
    KForm form = KForm::monomial(c, top_mask(1), f * (cplx(1) / top_form_measure_factor(1)));
    QuadratureSpec spec;
    spec.method = QuadMethod::PeriodicGrid;
    spec.resolution = 32;
    IntegralResult r = integrate(form, c, spec);
    double expect = 4 * M_PI * M_PI * 1.2660658777520083824;
    CHECK(std::abs(r.value - cplx(expect)) < 1e-10 * expect);
}

TEST_CASE("excised singular integrand extrapolates to zero by symmetry") {
    // integral of dz^dzbar/z over the square [-1,1]^2 is 0 by antisymmetry
    Chart c(1);
    ScalarField z = coord(0);
    KForm form = KForm::monomial(c, top_mask(1), ScalarField(cplx(1)) / z);
    QuadratureSpec spec;
    spec.samples = 1 << 18;
    spec.excision = {0.2, 0.1, 0.05};
    auto clearance = [](const Point& p) { return std::abs(p.z[0]); };
    IntegralResult r = integrate(form, c, spec, clearance);
    CHECK(r.partials.size() == 3);
    CHECK(std::abs(r.value) < 5e-3);
}

TEST_CASE("extrapolation recovers the limit of the singular model") {
    cplx v(2.5, -0.75);
    std::vector<std::pair<double, cplx>> partials;
    for (double dlt : {0.4, 0.2, 0.1, 0.05, 0.025}) {
        double l = std::log(dlt);
        partials.emplace_back(dlt, v + cplx(3.0, 1.0) * dlt + cplx(0.7) * dlt * l * l);
    }
    auto [fit, resid] = extrapolate(partials);
    CHECK(std::abs(fit - v) < 1e-10);
    CHECK(resid < 1e-10);

    CHECK_THROWS(extrapolate({{0.1, cplx(1)}, {0.2, cplx(2)}, {0.05, cplx(3)}}));
}

TEST_CASE("invalid excision schedule raises") {
    QuadratureSpec spec;
    spec.excision = {0.1, 0.2};
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("results are deterministic in seed and worker count") {
    Chart c = unit_box(1);
    ScalarField f = fexp(freal(coord(0)) * fimag(coord(0)));
    KForm form = KForm::monomial(c, top_mask(1), f * (cplx(1) / top_form_measure_factor(1)));
    QuadratureSpec spec;
    spec.samples = 1 << 15;
    spec.seed = 42;
    cplx base = integrate(form, c, spec).value;

    cplx again = integrate(form, c, spec).value;
    CHECK(base == again);  // bitwise

    spec.workers = 4;
    cplx par = integrate(form, c, spec).value;
    CHECK(base == par);  // bitwise, independent of worker count

    spec.workers = 1;
    spec.seed = 43;
    cplx other = integrate(form, c, spec).value;
    CHECK(base != other);
    CHECK(std::abs(base - other) < 1e-3);  // both near the true value
}
