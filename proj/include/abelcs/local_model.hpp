#pragma once

// Local threefold model: a box in C^3 with two complex lines parallel to the
// z3-axis (a zero line and a pole line), the quaternion-valued quotient map g
// they determine, the closed 3-form (1/3) tr((g^{-1}dg)^3), the localization
// identity pairing it against d(beta) for compactly supported 2-forms beta,
// and the vanishing pairing against dbar of (2,0)-forms for coplanar lines.

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "abelcs/group.hpp"
#include "abelcs/integrate.hpp"
#include "abelcs/quaternion.hpp"

namespace abelcs {

// complex line { z1 = c1, z2 = c2 } running parallel to the z3-axis
struct LineDivisor {
    cplx c1, c2;
};

struct LocalModel {
    Chart chart;
    LineDivisor P, Q;  // pole line and zero line
    GroupMap g;        // (w1_Q + w2_Q j)(w1_P + w2_P j)^{-1}

    // transverse distance from p to the nearest of the two lines
    double line_clearance(const Point& p) const {
        auto dist = [&](const LineDivisor& l) {
            return std::sqrt(std::norm(p.z[0] - l.c1) + std::norm(p.z[1] - l.c2));
        };
        return std::min(dist(P), dist(Q));
    }
};

inline LocalModel make_local_model(double half_width, LineDivisor P, LineDivisor Q) {
    for (const LineDivisor& l : {P, Q})
        for (double c : {l.c1.real(), l.c1.imag(), l.c2.real(), l.c2.imag()})
            if (std::abs(c) > half_width - 0.5)
                throw std::invalid_argument("local model: line too close to the box wall");
    Chart chart(3, half_width);
    ScalarField aq = coord(0) - Q.c1, bq = coord(1) - Q.c2;
    ScalarField ap = coord(0) - P.c1, bp = coord(1) - P.c2;
    ScalarField np = ap * fconj(ap) + bp * fconj(bp);
    GroupMap g(chart, (aq * fconj(ap) + bq * fconj(bp)) / np, (bq * ap - aq * bp) / np);
    LocalModel m{chart, P, Q, std::move(g)};
    m.g.clearance = [m_P = P, m_Q = Q](const Point& p) {
        auto dist = [&](const LineDivisor& l) {
            return std::sqrt(std::norm(p.z[0] - l.c1) + std::norm(p.z[1] - l.c2));
        };
        return std::min(dist(m_P), dist(m_Q));
    };
    return m;
}

// (1/3) tr((g^{-1}dg)^3): the closed 3-form the divisor pair induces away
// from its lines (automatic-differentiation form, used as the oracle for the
// fast pointwise kernel below)
inline KForm alpha_pq(const LocalModel& m) { return cplx(1.0 / 3.0) * full_three_form(m.g); }

// ---------------------------------------------------------------------------
// Fast pointwise kernel.  Covector basis indices used throughout:
//   0: dz1   1: dzbar1   2: dz2   3: dzbar2   4: dz3   5: dzbar3
// g depends only on (z1, z2), so A = g^{-1}dg has components on 0..3 only,
// and alpha = (1/3) tr(A^3) lives on the four transverse covector triples.

namespace detail {

inline Mat2 mat_of(cplx w1, cplx w2) { return {{{w1, w2}, {-std::conj(w2), std::conj(w1)}}}; }

inline Mat2 mat_inv(const Mat2& x) {
    cplx d = det(x);
    return {{{x[1][1] / d, -x[0][1] / d}, {-x[1][0] / d, x[0][0] / d}}};
}

inline Mat2 mat_sub(const Mat2& x, const Mat2& y) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r[i][j] = x[i][j] - y[i][j];
    return r;
}

inline cplx trace3(const Mat2& x, const Mat2& y, const Mat2& z) {
    Mat2 xy = matmul(x, y);
    return xy[0][0] * z[0][0] + xy[0][1] * z[1][0] + xy[1][0] * z[0][1] + xy[1][1] * z[1][1];
}

// derivatives of the quaternion embedding with respect to covectors 0..3
inline const std::array<Mat2, 4>& coordinate_derivatives() {
    static const std::array<Mat2, 4> e = {
        Mat2{{{cplx(1), 0}, {0, 0}}},   // dz1
        Mat2{{{0, 0}, {0, cplx(1)}}},   // dzbar1
        Mat2{{{0, cplx(1)}, {0, 0}}},   // dz2
        Mat2{{{0, 0}, {cplx(-1), 0}}},  // dzbar2
    };
    return e;
}

// components of A = g^{-1}dg on covectors 0..3 at the point p:
// A = M_P (M_Q^{-1} dM) M_P^{-1} - dM M_P^{-1} since dM_Q = dM_P = dM
inline std::array<Mat2, 4> transverse_connection(const LocalModel& m, const Point& p) {
    Mat2 mq = mat_of(p.z[0] - m.Q.c1, p.z[1] - m.Q.c2);
    Mat2 mp = mat_of(p.z[0] - m.P.c1, p.z[1] - m.P.c2);
    Mat2 mp_inv = mat_inv(mp);
    Mat2 lead = matmul(mp, mat_inv(mq));
    std::array<Mat2, 4> a;
    const auto& e = coordinate_derivatives();
    for (int i = 0; i < 4; ++i) a[size_t(i)] = matmul(mat_sub(matmul(lead, e[size_t(i)]), e[size_t(i)]), mp_inv);
    return a;
}

// the four ordered transverse triples carrying alpha
inline constexpr int kTriples[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};

// coefficients of (1/3) tr(A^3) on the ordered triples above
inline std::array<cplx, 4> alpha_components(const std::array<Mat2, 4>& a) {
    std::array<cplx, 4> c;
    for (int t = 0; t < 4; ++t) {
        const Mat2 &x = a[size_t(kTriples[t][0])], &y = a[size_t(kTriples[t][1])],
                   &z = a[size_t(kTriples[t][2])];
        c[size_t(t)] = trace3(x, y, z) - trace3(x, z, y);
    }
    return c;
}

inline int permutation_sign(std::array<int, 6> perm) {
    int sign = 1;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j)
            if (perm[size_t(i)] > perm[size_t(j)]) sign = -sign;
    return sign;
}

// the full basis 6-form e0^e1^...^e5 equals (-2i)^3 dx1 dy1 dx2 dy2 dx3 dy3
inline const cplx kVolumeFactor = cplx(0, 8);

}  // namespace detail

// Smooth compactly supported radial profile: a C-infinity bump in the
// transverse pair (z1, z2) times one in z3.
struct BumpSpec {
    cplx center1{}, center2{}, center3{};
    double r_trans = 0.8, r3 = 2.0;

    static double chi(double s) { return s < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0; }
    static double chi_deriv(double s) {
        if (s >= 1.0) return 0.0;
        double d = 1.0 - s;
        return -chi(s) / (d * d);
    }

    double value(const Point& p) const {
        double u = (std::norm(p.z[0] - center1) + std::norm(p.z[1] - center2)) /
                   (r_trans * r_trans);
        double v = std::norm(p.z[2] - center3) / (r3 * r3);
        return chi(u) * chi(v);
    }

    // Wirtinger derivatives on covector indices 0..5
    std::array<cplx, 6> gradient(const Point& p) const {
        double rt2 = r_trans * r_trans, r32 = r3 * r3;
        double u = (std::norm(p.z[0] - center1) + std::norm(p.z[1] - center2)) / rt2;
        double v = std::norm(p.z[2] - center3) / r32;
        double cu = chi(u), cv = chi(v), du = chi_deriv(u), dv = chi_deriv(v);
        std::array<cplx, 6> grad{};
        grad[0] = cplx(du * cv / rt2) * std::conj(p.z[0] - center1);
        grad[1] = std::conj(grad[0]);
        grad[2] = cplx(du * cv / rt2) * std::conj(p.z[1] - center2);
        grad[3] = std::conj(grad[2]);
        grad[4] = cplx(cu * dv / r32) * std::conj(p.z[2] - center3);
        grad[5] = std::conj(grad[4]);
        return grad;
    }
};

// beta = b(z) * sum coef e_a ^ e_b with constant components
struct TestFormComp {
    int a, b;
    cplx coef;
};

struct TestForm {
    BumpSpec bump;
    std::vector<TestFormComp> comps;
};

namespace detail {

// Precomputed contraction table: for each alpha triple t and bump-gradient
// covector i, the signed coefficient multiplying alpha_t * grad_i in the
// 6-form alpha ^ (db ^ comps) (or (db ^ comps) ^ alpha when beta_first).
struct PairingTable {
    // weight[t][i]
    std::array<std::array<cplx, 6>, 4> weight{};
    bool empty = true;
};

inline PairingTable build_table(const TestForm& beta, bool beta_first, bool dbar_only) {
    PairingTable table;
    for (const TestFormComp& comp : beta.comps) {
        for (int i = 0; i < 6; ++i) {
            if (dbar_only && i % 2 == 0) continue;  // only dzbar legs of db
            if (i == comp.a || i == comp.b) continue;
            for (int t = 0; t < 4; ++t) {
                bool used[6] = {};
                used[kTriples[t][0]] = used[kTriples[t][1]] = used[kTriples[t][2]] = true;
                if (used[i] || used[comp.a] || used[comp.b]) continue;
                std::array<int, 6> perm =
                    beta_first ? std::array<int, 6>{i, comp.a, comp.b, kTriples[t][0],
                                                    kTriples[t][1], kTriples[t][2]}
                               : std::array<int, 6>{kTriples[t][0], kTriples[t][1], kTriples[t][2],
                                                    i, comp.a, comp.b};
                table.weight[size_t(t)][size_t(i)] +=
                    cplx(double(permutation_sign(perm))) * comp.coef;
                table.empty = false;
            }
        }
    }
    return table;
}

inline cplx pairing_density(const LocalModel& m, const TestForm& beta, const PairingTable& table,
                            const Point& p) {
    // the gradient vanishes outside the bump's (open) support
    if (beta.bump.value(p) == 0.0) return cplx(0);
    std::array<cplx, 6> grad = beta.bump.gradient(p);
    std::array<cplx, 4> ac = alpha_components(transverse_connection(m, p));
    cplx total = 0;
    for (int t = 0; t < 4; ++t)
        for (int i = 0; i < 6; ++i) {
            cplx w = table.weight[size_t(t)][size_t(i)];
            if (w != cplx(0)) total += w * ac[size_t(t)] * grad[size_t(i)];
        }
    return kVolumeFactor * total;
}

}  // namespace detail

// pullback integral of beta over a divisor line: only the e4^e5 components
// survive, integrated with a tensor Gauss rule over the bump's z3 support
inline cplx line_integral(const LineDivisor& line, const TestForm& beta, double half_width,
                          int nodes = 48) {
    cplx c45 = 0;
    for (const TestFormComp& comp : beta.comps)
        if (comp.a == 4 && comp.b == 5) c45 += comp.coef;
    if (c45 == cplx(0)) return 0;
    GaussRule gr = gauss_legendre(nodes);
    double lo_x = std::max(-half_width, beta.bump.center3.real() - beta.bump.r3);
    double hi_x = std::min(half_width, beta.bump.center3.real() + beta.bump.r3);
    double lo_y = std::max(-half_width, beta.bump.center3.imag() - beta.bump.r3);
    double hi_y = std::min(half_width, beta.bump.center3.imag() + beta.bump.r3);
    cplx acc = 0;
    for (size_t i = 0; i < gr.x.size(); ++i)
        for (size_t j = 0; j < gr.x.size(); ++j) {
            double x = 0.5 * (lo_x + hi_x) + 0.5 * (hi_x - lo_x) * gr.x[i];
            double y = 0.5 * (lo_y + hi_y) + 0.5 * (hi_y - lo_y) * gr.x[j];
            Point p;
            p.z[0] = line.c1;
            p.z[1] = line.c2;
            p.z[2] = cplx(x, y);
            acc += cplx(gr.w[i] * gr.w[j]) * cplx(beta.bump.value(p));
        }
    acc *= cplx(0.25 * (hi_x - lo_x) * (hi_y - lo_y));
    // e4 ^ e5 = dz3 ^ dzbar3 = -2i dx3 ^ dy3
    return c45 * cplx(0, -2) * acc;
}

struct LocalizationResult {
    cplx lhs{};             // extrapolated excised integral of alpha ^ d(beta)
    cplx rhs{};             // -8 pi^2 (integral of beta over Q minus over P)
    cplx ratio{};           // lhs / rhs when conclusive
    double error_estimate = 0;
    bool inconclusive = false;
    std::vector<std::pair<double, cplx>> partials;  // (excision radius, value)
};

namespace detail {

// The excised integral approaches its limit with an error even in delta (the
// tube cross-section averages kill the odd orders), so fit v + c2 d^2 + c4 d^4.
inline std::pair<cplx, double> quadratic_limit(const std::vector<std::pair<double, cplx>>& parts) {
    if (parts.size() < 3) return {parts.back().second, std::abs(parts.back().second - parts.front().second)};
    double ata[3][3] = {};
    cplx atb[3] = {};
    for (const auto& [dlt, val] : parts) {
        double b[3] = {1.0, dlt * dlt, dlt * dlt * dlt * dlt};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) ata[i][j] += b[i] * b[j];
            atb[i] += b[i] * val;
        }
    }
    double m[3][3];
    cplx rhs[3] = {atb[0], atb[1], atb[2]};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = ata[i][j];
    for (int k = 0; k < 3; ++k) {
        int piv = k;
        for (int r = k + 1; r < 3; ++r)
            if (std::abs(m[r][k]) > std::abs(m[piv][k])) piv = r;
        std::swap(m[piv], m[k]);
        std::swap(rhs[piv], rhs[k]);
        for (int r = k + 1; r < 3; ++r) {
            double f = m[r][k] / m[k][k];
            for (int c = k; c < 3; ++c) m[r][c] -= f * m[k][c];
            rhs[r] -= f * rhs[k];
        }
    }
    cplx sol[3];
    for (int i = 2; i >= 0; --i) {
        cplx s = rhs[i];
        for (int j = i + 1; j < 3; ++j) s -= m[i][j] * sol[j];
        sol[i] = s / m[i][i];
    }
    double resid = 0;
    for (const auto& [dlt, val] : parts) {
        double d2 = dlt * dlt;
        resid = std::max(resid, std::abs(sol[0] + sol[1] * d2 + sol[2] * d2 * d2 - val));
    }
    return {sol[0], resid};
}

}  // namespace detail

// integral of alpha ^ d(beta) against -8 pi^2 (int_Q beta - int_P beta);
// the sign is for the product orientation dx1 dy1 ... dx3 dy3 of the chart
inline LocalizationResult localization_check(const LocalModel& m, const TestForm& beta,
                                             QuadratureSpec spec) {
    if (spec.excision.empty()) spec.excision = {0.4, 0.3, 0.22, 0.16, 0.12};
    detail::PairingTable table = detail::build_table(beta, false, false);
    IntegralResult lhs = qmc_box_integrate(
        m.chart, spec,
        [&](const Point& p) { return detail::pairing_density(m, beta, table, p); },
        [&](const Point& p) { return m.line_clearance(p); });

    LocalizationResult res;
    res.partials = lhs.partials;
    auto [limit, resid] = detail::quadratic_limit(res.partials);
    res.lhs = limit;
    res.rhs = cplx(-8 * M_PI * M_PI) *
              (line_integral(m.Q, beta, m.chart.re_hi[0]) - line_integral(m.P, beta, m.chart.re_hi[0]));
    res.error_estimate = resid;
    // ratio is meaningless when the predicted value is lost in the fit noise;
    // callers compare |lhs| directly in that case
    res.inconclusive = std::abs(res.rhs) <= 10.0 * res.error_estimate + 1e-9;
    res.ratio = res.inconclusive ? cplx(0) : res.lhs / res.rhs;
    return res;
}

struct EquivalencePairing {
    cplx pairing{};       // integral of dbar(beta) ^ alpha
    double mass = 0;      // integral of the unsigned integrand
    double error_estimate = 0;
    bool coplanar = false;
};

// pairing of dbar(beta^{2,0}) against alpha; for coplanar lines the lemma
// predicts vanishing relative to the unsigned integrand mass
inline EquivalencePairing algebraic_equivalence_check(const LocalModel& m, const TestForm& beta,
                                                      QuadratureSpec spec) {
    for (const TestFormComp& comp : beta.comps)
        if (comp.a % 2 || comp.b % 2)
            throw std::invalid_argument("algebraic_equivalence_check: test form must be type (2,0)");
    if (spec.excision.empty()) spec.excision = {0.4, 0.3, 0.22, 0.16, 0.12};
    detail::PairingTable table = detail::build_table(beta, true, true);

    EquivalencePairing res;
    res.coplanar = std::abs(m.P.c2 - m.Q.c2) < 1e-12;
    IntegralResult pr = qmc_box_integrate(
        m.chart, spec,
        [&](const Point& p) { return detail::pairing_density(m, beta, table, p); },
        [&](const Point& p) { return m.line_clearance(p); });
    auto [limit, resid] = detail::quadratic_limit(pr.partials);
    res.pairing = pr.partials.empty() ? pr.value : limit;
    res.error_estimate = pr.partials.empty() ? pr.error_estimate : resid;
    IntegralResult mass = qmc_box_integrate(
        m.chart, spec,
        [&](const Point& p) { return cplx(std::abs(detail::pairing_density(m, beta, table, p))); },
        [&](const Point& p) { return m.line_clearance(p); });
    res.mass = mass.partials.empty() ? mass.value.real() : mass.partials.back().second.real();
    return res;
}

}  // namespace abelcs
