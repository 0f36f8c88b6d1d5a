#include <random>

#include "abelcs/group.hpp"
#include "doctest.h"

using namespace abelcs;

namespace {

std::mt19937_64 rng(4242);

cplx random_cplx() {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return {u(rng), u(rng)};
}

// A map that stays well away from zero on the chart box.
GroupMap random_group_map(const Chart& c) {
    ScalarField a = cplx(3.0);
    ScalarField b = cplx(0.0);
    for (int i = 0; i < c.m; ++i) {
        a = a + cplx(0.3) * random_cplx() * coord(i) + cplx(0.3) * random_cplx() * coord_conj(i);
        b = b + cplx(0.3) * random_cplx() * coord(i) + cplx(0.3) * random_cplx() * coord_conj(i);
    }
    a = a + cplx(0.2) * fsin(coord(0));
    return {c, a, b};
}

double qform_dist(const QForm& x, const QForm& y, const Point& p) {
    return std::max((x.A.eval(p) - y.A.eval(p)).max_abs(), (x.B.eval(p) - y.B.eval(p)).max_abs());
}

}  // namespace

TEST_CASE("constant map has vanishing form") {
    Chart c(2);
    GroupMap g(c, ScalarField(cplx(1.5, 0.5)), ScalarField(cplx(-0.3, 2)));
    QForm om = maurer_cartan(g);
    Point p = c.random_point(rng, 0.1);
    CHECK(om.A.eval(p).max_abs() < 1e-15);
    CHECK(om.B.eval(p).max_abs() < 1e-15);
}

TEST_CASE("abelian case g(z) = z gives dz/z with no j part") {
    Chart c(1);
    GroupMap g(c, coord(0), ScalarField(cplx(0)));
    QForm om = maurer_cartan(g);
    for (int it = 0; it < 5; ++it) {
        Point p = c.random_point(rng, 0.1);
        if (std::abs(p.z[0]) < 0.2) continue;
        KForm expect = ScalarField(cplx(1)) / coord(0) * dz(c, 0);
        CHECK((om.A.eval(p) - expect.eval(p)).max_abs() < 1e-13);
        CHECK(om.B.eval(p).max_abs() < 1e-15);
    }
}

TEST_CASE("structure equation d(omega) + omega^omega = 0") {
    Chart c(3);
    GroupMap g = random_group_map(c);
    QForm om = maurer_cartan(g);
    QForm resid = d(om) + qwedge(om, om);
    for (int it = 0; it < 100; ++it) {
        Point p = c.random_point(rng, 0.1);
        CHECK(resid.A.eval(p).max_abs() < 1e-9);
        CHECK(resid.B.eval(p).max_abs() < 1e-9);
    }
}

TEST_CASE("unit-part form has purely imaginary scalar component") {
    Chart c(2);
    GroupMap g = random_group_map(c);
    QForm om = unit_maurer_cartan(g);
    KForm sym = om.A + conj(om.A);  // should vanish
    for (int it = 0; it < 10; ++it) {
        Point p = c.random_point(rng, 0.1);
        CHECK(sym.eval(p).max_abs() < 1e-11);
    }
}

TEST_CASE("left translation by a constant leaves the form unchanged") {
    Chart c(2);
    GroupMap g = random_group_map(c);
    Quaternion q0{{0.6, 1.1}, {-0.4, 0.7}};
    // q0 * g = (q0a a - q0b bbar) + (q0a b + q0b abar) j
    GroupMap tg(c, ScalarField(q0.a) * g.a - ScalarField(q0.b) * fconj(g.b),
                ScalarField(q0.a) * g.b + ScalarField(q0.b) * fconj(g.a));
    QForm om = maurer_cartan(g), tom = maurer_cartan(tg);
    for (int it = 0; it < 10; ++it) {
        Point p = c.random_point(rng, 0.1);
        CHECK(qform_dist(om, tom, p) < 1e-12);
    }
}

TEST_CASE("evaluation at a singular point or inside an excision raises") {
    Chart c(2);
    GroupMap g(c, coord(0), coord(1));
    QForm om = maurer_cartan(g);
    Point zero;
    zero.z = {cplx(0), cplx(0), cplx(0)};
    CHECK_THROWS_AS(om.A.eval(zero), std::domain_error);

    GroupMap ge(c, coord(0), coord(1));
    ge.clearance = [](const Point& p) { return std::abs(p.z[0]); };
    ge.excision_radius = 0.3;
    QForm ome = maurer_cartan(ge);
    Point inside;
    inside.z = {cplx(0.1, 0.1), cplx(0.5), cplx(0)};
    CHECK_THROWS_AS(ome.A.eval(inside), std::domain_error);
    Point outside;
    outside.z = {cplx(0.7, 0.1), cplx(0.5), cplx(0)};
    CHECK_NOTHROW(ome.A.eval(outside));
}

TEST_CASE("invariant 3-form is real and closed") {
    Chart c(2);
    GroupMap g = random_group_map(c);
    KForm theta = invariant_three_form(g);
    KForm imag_part = theta - conj(theta);
    KForm dtheta = d(theta);
    for (int it = 0; it < 5; ++it) {
        Point p = c.random_point(rng, 0.1);
        double scale = 1 + theta.eval(p).max_abs();
        CHECK(imag_part.eval(p).max_abs() < 1e-11 * scale);
        CHECK(dtheta.eval(p).max_abs() < 1e-8 * scale);
    }
}

TEST_CASE("invariant 3-form at a unit point of the coordinate map") {
    Chart c(2);
    GroupMap g(c, coord(0), coord(1));
    KForm theta = invariant_three_form(g);
    Point p;
    p.z = {cplx(1), cplx(0), cplx(0)};
    KForm dImu = cplx(0, -0.5) * (dz(c, 0) - dzbar(c, 0));
    KForm dRev = cplx(0.5) * (dz(c, 1) + dzbar(c, 1));
    KForm dImv = cplx(0, -0.5) * (dz(c, 1) - dzbar(c, 1));
    KForm expect = cplx(-12) * wedge(wedge(dImu, dRev), dImv);
    CHECK((theta.eval(p) - expect.eval(p)).max_abs() < 1e-12);
}

TEST_CASE("invariant 3-form matches the matrix-embedding oracle") {
    Chart c(2);
    GroupMap g = random_group_map(c);
    KForm theta = invariant_three_form(g);
    MatForm m = to_mat(unit_maurer_cartan(g));
    KForm oracle = trace(wedge(wedge(m, m), m));
    for (int it = 0; it < 5; ++it) {
        Point p = c.random_point(rng, 0.1);
        CHECK((theta.eval(p) - oracle.eval(p)).max_abs() < 1e-10);
    }
}

TEST_CASE("scale/unit decomposition of the full 3-form") {
    // tr((g^-1 dg)^3) = tr((k^-1 dk)^3) + dlog|g| ^ tr((k^-1 dk)^2)
    Chart c(2);
    GroupMap g = random_group_map(c);
    KForm full = full_three_form(g);
    KForm inv = invariant_three_form(g);
    QForm omk = unit_maurer_cartan(g);
    KForm correction = wedge(scale_part(g), trace(qwedge(omk, omk)));
    KForm resid = full - inv - correction;
    for (int it = 0; it < 5; ++it) {
        Point p = c.random_point(rng, 0.1);
        double scale = 1 + full.eval(p).max_abs();
        CHECK(resid.eval(p).max_abs() < 1e-10 * scale);
    }
}

TEST_CASE("real-valued map has vanishing full 3-form") {
    Chart c(2);
    GroupMap g(c, fexp(freal(coord(0)) + cplx(0.5) * freal(coord(1))), ScalarField(cplx(0)));
    KForm full = full_three_form(g);
    for (int it = 0; it < 5; ++it) {
        Point p = c.random_point(rng, 0.1);
        CHECK(full.eval(p).max_abs() < 1e-12);
    }
}

TEST_CASE("unit-valued map: full 3-form equals the invariant 3-form") {
    Chart c(2);
    ScalarField x = freal(coord(0)), y = fimag(coord(0));
    GroupMap g(c, fcos(x), fsin(x) * fexp(cplx(0, 1) * y));
    KForm full = full_three_form(g), inv = invariant_three_form(g);
    for (int it = 0; it < 5; ++it) {
        Point p = c.random_point(rng, 0.1);
        CHECK((full.eval(p) - inv.eval(p)).max_abs() < 1e-11);
    }
}

TEST_CASE("unit-sphere constants") {
    SphereConstants a = sphere_constants_angles(48);
    double s3 = 24 * M_PI * M_PI, v3 = 2 * M_PI * M_PI;
    CHECK(std::abs(a.three_form_integral - s3) < 1e-6 * s3);
    CHECK(std::abs(a.volume - v3) < 1e-8 * v3);

    SphereConstants flipped = sphere_constants_angles(48, true);
    CHECK(std::abs(flipped.three_form_integral + s3) < 1e-6 * s3);

    SphereConstants p = sphere_constants_polar(48);
    CHECK(std::abs(p.three_form_integral - a.three_form_integral) < 1e-6 * s3);
    CHECK(std::abs(p.volume - v3) < 1e-8 * v3);
}
