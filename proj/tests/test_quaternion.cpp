#include <random>

#include "abelcs/quaternion.hpp"
#include "doctest.h"

using namespace abelcs;

namespace {

std::mt19937_64 rng(12345);

Quaternion random_quat() {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    return {{u(rng), u(rng)}, {u(rng), u(rng)}};
}

double mat_dist(const Mat2& x, const Mat2& y) {
    double r = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r = std::max(r, std::abs(x[i][j] - y[i][j]));
    return r;
}

}  // namespace

TEST_CASE("j times i is conjugate-linear") {
    Quaternion j{0, 1}, i{{0, 1}, 0};
    Quaternion p = j * i;
    // j*i = conj(i)*j = -i*j
    CHECK(std::abs(p.a) == doctest::Approx(0));
    CHECK(p.b.real() == doctest::Approx(0));
    CHECK(p.b.imag() == doctest::Approx(-1));
}

TEST_CASE("identity and inverse") {
    Quaternion one{1, 0};
    Quaternion q{{3, 0}, {4, 0}};
    CHECK(mat_dist(embed(one * q), embed(q)) == 0);

    Quaternion qi = inverse(q);
    CHECK(std::abs(qi.a - cplx(3.0 / 25, 0)) < 1e-15);
    CHECK(std::abs(qi.b - cplx(-4.0 / 25, 0)) < 1e-15);
    Quaternion p = q * qi;
    CHECK(std::abs(p.a - cplx(1, 0)) < 1e-13);
    CHECK(std::abs(p.b) < 1e-13);

    CHECK_THROWS_AS(inverse(Quaternion{0, 0}), std::domain_error);
}

TEST_CASE("unit inverse formula ubar - v j") {
    double s = 1.0 / std::sqrt(2.0);
    Quaternion k{{s, 0}, {0, s}};  // u = 1/sqrt2, v = i/sqrt2
    Quaternion ki = inverse(k);
    CHECK(std::abs(ki.a - cplx(s, 0)) < 1e-15);
    CHECK(std::abs(ki.b - cplx(0, -s)) < 1e-15);
}

TEST_CASE("polar decomposition") {
    Quaternion q{{3, 0}, {4, 0}};
    auto pd = polar(q);
    CHECK(pd.r == doctest::Approx(5.0));
    CHECK(std::abs(pd.unit.a - cplx(0.6, 0)) < 1e-15);
    CHECK(std::abs(pd.unit.b - cplx(0.8, 0)) < 1e-15);

    for (int it = 0; it < 50; ++it) {
        Quaternion r = random_quat();
        if (r.norm2() < 1e-8) continue;
        auto p = polar(r);
        CHECK(p.unit.norm2() == doctest::Approx(1.0).epsilon(1e-14));
        Quaternion back = p.unit * p.r;
        CHECK(std::abs(back.a - r.a) < 1e-14 * r.norm());
        CHECK(std::abs(back.b - r.b) < 1e-14 * r.norm());
    }
    CHECK_THROWS_AS(polar(Quaternion{0, 0}), std::domain_error);
}

TEST_CASE("matrix embedding") {
    CHECK(mat_dist(embed(Quaternion{1, 0}), Mat2{{{cplx(1), cplx(0)}, {cplx(0), cplx(1)}}}) == 0);
    CHECK(mat_dist(embed(Quaternion{0, 1}), Mat2{{{cplx(0), cplx(1)}, {cplx(-1), cplx(0)}}}) == 0);

    // multiplicative homomorphism, oracle role for quaternion product
    for (int it = 0; it < 100; ++it) {
        Quaternion p = random_quat(), q = random_quat();
        CHECK(mat_dist(embed(p * q), matmul(embed(p), embed(q))) < 1e-13);
    }

    // embed(j*q) = J * embed(q)
    Quaternion q = random_quat();
    CHECK(mat_dist(embed(Quaternion{0, 1} * q), matmul(embed(Quaternion{0, 1}), embed(q))) < 1e-14);
}

TEST_CASE("determinant is the squared norm") {
    for (int it = 0; it < 100; ++it) {
        Quaternion q = random_quat();
        cplx dv = det(embed(q));
        CHECK(std::abs(dv.real() - q.norm2()) < 1e-13);
        CHECK(std::abs(dv.imag()) < 1e-13);
    }
}

TEST_CASE("embed(q) * embed(inverse(q)) = I") {
    for (int it = 0; it < 100; ++it) {
        Quaternion q = random_quat();
        if (q.norm2() < 1e-8) continue;
        Mat2 prod = matmul(embed(q), embed(inverse(q)));
        CHECK(mat_dist(prod, embed(Quaternion{1, 0})) < 1e-13);
    }
}
