#pragma once

// Divisor calculus on the complex torus: the smooth quotient map attached to
// a pair of equal-degree divisors, its current pairing with holomorphic
// 1-forms, winding-number normalization, a spectral dbar solver, and the
// reconstruction of a function whose divisor is the prescribed difference.

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "abelcs/elliptic.hpp"
#include "abelcs/forms.hpp"
#include "abelcs/integrate.hpp"

namespace abelcs {

struct TorusDivisor {
    // (representative in C, signed multiplicity)
    std::vector<std::pair<cplx, int>> points;

    int degree() const {
        int d = 0;
        for (const auto& [p, m] : points) d += m;
        return d;
    }
    cplx weighted_sum() const {
        cplx s = 0;
        for (const auto& [p, m] : points) s += cplx(double(m)) * p;
        return s;
    }
};

// Real trigonometric polynomial in the torus coordinates (x, y).
struct TrigTerm {
    double amp;
    int kx, ky;
    double phase;
};

struct TrigPoly {
    std::vector<TrigTerm> terms;

    double eval(double x, double y) const {
        double s = 0;
        for (const auto& t : terms) s += t.amp * std::cos(2 * M_PI * (t.kx * x + t.ky * y) + t.phase);
        return s;
    }
    double dx(double x, double y) const {
        double s = 0;
        for (const auto& t : terms)
            s -= t.amp * 2 * M_PI * t.kx * std::sin(2 * M_PI * (t.kx * x + t.ky * y) + t.phase);
        return s;
    }
    double dy(double x, double y) const {
        double s = 0;
        for (const auto& t : terms)
            s -= t.amp * 2 * M_PI * t.ky * std::sin(2 * M_PI * (t.kx * x + t.ky * y) + t.phase);
        return s;
    }
};

// g(z) = prod sigma(z - q)^mq / prod sigma(z - p)^mp * exp(lambda z + mu zbar + phi),
// with (lambda, mu) solved so that both quasi-period multipliers cancel and
// g descends to a map of the torus into the nonzero complex numbers.
struct SmoothQuotientMap {
    Lattice lat;
    TorusDivisor P, Q;
    cplx lambda, mu;
    TrigPoly phi;

    cplx eval(cplx z) const {
        cplx v = 1;
        for (const auto& [q, m] : Q.points) v *= std::pow(lat.sigma(z - q), double(m));
        for (const auto& [p, m] : P.points) v /= std::pow(lat.sigma(z - p), double(m));
        TorusCoords c = lat.coords(z);
        return v * std::exp(lambda * z + mu * std::conj(z) + cplx(phi.eval(c.x, c.y)));
    }

    // d/dz log g, analytic away from the divisor supports
    cplx dlog_z(cplx z) const {
        cplx v = lambda;
        for (const auto& [q, m] : Q.points) v += cplx(double(m)) * lat.sigma_log_deriv(z - q);
        for (const auto& [p, m] : P.points) v -= cplx(double(m)) * lat.sigma_log_deriv(z - p);
        TorusCoords c = lat.coords(z);
        cplx tau = lat.tau, tb = std::conj(tau);
        return v + (cplx(phi.dx(c.x, c.y)) * (-tb) + cplx(phi.dy(c.x, c.y))) / (tau - tb);
    }

    // d/dzbar log g: smooth and bounded on the whole torus
    cplx dlog_zbar(cplx z) const {
        TorusCoords c = lat.coords(z);
        cplx tau = lat.tau, tb = std::conj(tau);
        return mu + (cplx(phi.dx(c.x, c.y)) * tau - cplx(phi.dy(c.x, c.y))) / (tau - tb);
    }

    // smallest torus distance from z to the combined divisor support
    double divisor_distance(cplx z) const {
        double d = 1e300;
        for (const auto& [q, m] : Q.points) d = std::min(d, lat.dist_to_lattice(z - q));
        for (const auto& [p, m] : P.points) d = std::min(d, lat.dist_to_lattice(z - p));
        return d;
    }
};

// Solves the 2x2 multiplier system.  With `reduce` the right-hand sides are
// shifted by the 2 pi i multiples that minimize |mu|, so mu vanishes exactly
// when the divisor difference sums to a lattice point.
inline SmoothQuotientMap build_g(const Lattice& lat, const TorusDivisor& P, const TorusDivisor& Q,
                                 TrigPoly phi = {}, bool reduce = true) {
    if (P.degree() != Q.degree()) throw std::invalid_argument("build_g: degrees differ");
    // cancel identical entries first (covers the trivial Q = P case), then
    // require the remaining supports to be disjoint; representatives of the
    // same torus point that differ by a lattice vector are allowed
    TorusDivisor Pr, Qr = Q;
    for (const auto& [p, mp] : P.points) {
        bool cancelled = false;
        for (auto& [q, mq] : Qr.points)
            if (mq == mp && std::abs(q - p) < 1e-12) {
                mq = 0;
                cancelled = true;
                break;
            }
        if (!cancelled) Pr.points.emplace_back(p, mp);
    }
    std::erase_if(Qr.points, [](const auto& e) { return e.second == 0; });
    for (const auto& [q, mq] : Qr.points)
        for (const auto& [p, mp] : Pr.points)
            if (std::abs(q - p) < 1e-9)
                throw std::invalid_argument("build_g: divisor supports intersect");
    cplx S = Q.weighted_sum() - P.weighted_sum();
    TorusCoords sc = lat.coords(S);
    double k = reduce ? double(std::lround(sc.y)) : 0.0;
    double l = reduce ? double(-std::lround(sc.x)) : 0.0;
    cplx rhs1 = lat.eta1 * S - cplx(0, 2 * M_PI) * cplx(k);
    cplx rhs2 = lat.eta2 * S - cplx(0, 2 * M_PI) * cplx(l);
    cplx tau = lat.tau, tb = std::conj(tau);
    cplx mu = (rhs2 - rhs1 * tau) / (tb - tau);
    return {lat, std::move(Pr), std::move(Qr), rhs1 - mu, mu, std::move(phi)};
}

// worst relative defect of double periodicity over sampled period pairs
inline double periodicity_defect(const SmoothQuotientMap& g, int samples = 64) {
    double worst = 0;
    for (int i = 0; i < samples; ++i) {
        double x = (i + 0.5) / samples, y = std::fmod(0.382 + 0.711 * i, 1.0);
        cplx z = g.lat.from_coords(x, y);
        if (g.divisor_distance(z) < 0.05) continue;
        cplx v = g.eval(z);
        worst = std::max(worst, std::abs(g.eval(z + cplx(1)) - v) / std::max(1.0, std::abs(v)));
        worst = std::max(worst, std::abs(g.eval(z + g.lat.tau) - v) / std::max(1.0, std::abs(v)));
    }
    return worst;
}

// g sampled on the n x n torus coordinate grid, index ix * n + iy
inline std::vector<cplx> sample_grid(const SmoothQuotientMap& g, int n) {
    std::vector<cplx> v(size_t(n) * size_t(n));
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            v[size_t(ix) * size_t(n) + size_t(iy)] =
                g.eval(g.lat.from_coords(double(ix) / n, double(iy) / n));
    return v;
}

// dzbar-coefficient of g^{-1} dg recovered from the sampled map by 4th-order
// periodic central differences (unreliable within a few cells of the divisor)
inline std::vector<cplx> alpha01_grid(const SmoothQuotientMap& g, int n) {
    std::vector<cplx> gv = sample_grid(g, n);
    std::vector<cplx> a(gv.size());
    cplx tau = g.lat.tau, tb = std::conj(tau);
    auto at = [&](int ix, int iy) {
        return gv[size_t((ix % n + n) % n) * size_t(n) + size_t((iy % n + n) % n)];
    };
    double h = 1.0 / n;
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy) {
            cplx gx = (cplx(8) * (at(ix + 1, iy) - at(ix - 1, iy)) - (at(ix + 2, iy) - at(ix - 2, iy))) /
                      cplx(12 * h);
            cplx gy = (cplx(8) * (at(ix, iy + 1) - at(ix, iy - 1)) - (at(ix, iy + 2) - at(ix, iy - 2))) /
                      cplx(12 * h);
            a[size_t(ix) * size_t(n) + size_t(iy)] = (tau * gx - gy) / ((tau - tb) * at(ix, iy));
        }
    return a;
}

struct PairingSpec {
    int grid = 256;
    int excision_cells = 3;  // smallest excision radius in grid cells
    int steps = 4;           // radii in the extrapolation schedule
    double tol = 1e-3;
};

// (1 / 2 pi i) * integral of (g^{-1} dg) ^ (c dz) over the torus, computed
// from the sampled map with excised divisor discs and a radius-squared
// least-squares extrapolation of the excision schedule to radius zero.
inline cplx abel_pairing(const SmoothQuotientMap& g, cplx c, const PairingSpec& spec = {}) {
    if (spec.steps < 2) throw std::invalid_argument("abel_pairing: need at least two radii");
    int n = spec.grid;
    double h = 1.0 / n;
    std::vector<cplx> a = alpha01_grid(g, n);
    std::vector<double> dist(a.size());
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            dist[size_t(ix) * size_t(n) + size_t(iy)] =
                g.divisor_distance(g.lat.from_coords(double(ix) / n, double(iy) / n));
    cplx tau = g.lat.tau;
    cplx factor = c * (tau - std::conj(tau)) / cplx(0, 2 * M_PI) * cplx(h * h);

    double cell = h * std::max(1.0, std::abs(tau));
    std::vector<double> radii;
    std::vector<cplx> vals;
    for (int j = 0; j < spec.steps; ++j) {
        double r = (spec.excision_cells + 2 * j) * cell;
        cplx acc = 0;
        for (size_t i = 0; i < a.size(); ++i)
            if (dist[i] > r) acc += a[i];
        radii.push_back(r);
        vals.push_back(factor * acc);
    }
    // least squares fit vals ~ A + B r^2; the excised mass of the bounded
    // integrand is O(r^2)
    double s0 = double(spec.steps), s2 = 0, s4 = 0;
    cplx v0 = 0, v2 = 0;
    for (int j = 0; j < spec.steps; ++j) {
        double r2 = radii[size_t(j)] * radii[size_t(j)];
        s2 += r2;
        s4 += r2 * r2;
        v0 += vals[size_t(j)];
        v2 += cplx(r2) * vals[size_t(j)];
    }
    double det = s0 * s4 - s2 * s2;
    cplx A = (cplx(s4) * v0 - cplx(s2) * v2) / cplx(det);
    cplx B = (cplx(s0) * v2 - cplx(s2) * v0) / cplx(det);
    double resid = 0;
    for (int j = 0; j < spec.steps; ++j)
        resid = std::max(resid, std::abs(A + B * cplx(radii[size_t(j)] * radii[size_t(j)]) -
                                         vals[size_t(j)]));
    if (resid > spec.tol * std::max(1.0, std::abs(c)))
        throw std::runtime_error("abel_pairing: excision schedule did not converge");
    return A;
}

// representative of v modulo the period lattice c * (Z + tau Z)
inline cplx period_reduce(cplx v, cplx c, cplx tau) {
    if (std::abs(c) < 1e-14) return v;
    Lattice l(tau.imag() > 0 ? tau : std::conj(tau));
    return c * l.reduce(v / c);
}

// Raw winding number of g along one basis cycle at the given transverse
// offset.  The value is an integer for any loop clearing the divisor, but it
// depends on which side of each divisor point the loop passes: parallel
// loops on opposite sides differ by the enclosed multiplicity.
inline double cycle_winding(const SmoothQuotientMap& g, bool x_cycle, double offset,
                            int samples = 4096) {
    double clearance = 1e300;
    for (int k = 0; k <= samples; ++k) {
        double t = double(k) / samples;
        cplx z = x_cycle ? g.lat.from_coords(t, offset) : g.lat.from_coords(offset, t);
        clearance = std::min(clearance, g.divisor_distance(z));
    }
    if (clearance < 0.02 * std::max(1.0, std::abs(g.lat.tau)))
        throw std::runtime_error("cycle_winding: loop too close to the divisor");
    double total = 0;
    cplx prev = g.eval(x_cycle ? g.lat.from_coords(0, offset) : g.lat.from_coords(offset, 0));
    for (int k = 1; k <= samples; ++k) {
        double t = double(k) / samples;
        cplx cur = g.eval(x_cycle ? g.lat.from_coords(t, offset) : g.lat.from_coords(offset, t));
        total += std::arg(cur / prev);
        prev = cur;
    }
    return total / (2 * M_PI);
}

struct PeriodClass {
    long m = 0, n = 0;              // integer class 2 pi i (m dx + n dy)
    double integrality_defect = 0;  // distance of the raw class to the integers
    cplx xi_z, xi_zbar;             // the class in z-coordinates
    KForm xi;                       // same form on the unit-square chart w = x + i y
};

// Integral class normalizing g^{-1} dg.  Because single representative
// loops give position-dependent windings, the class is read off from the
// torus mean of the dzbar-coefficient of g^{-1} dg: the unique constants
// (m, n) with mean equal to pi (m tau - n) / Im tau.  They are integers
// (within the reported defect) exactly when the divisor difference is a
// lattice point modulo the multiplier reduction.
inline PeriodClass periods_and_class(const SmoothQuotientMap& g, int grid = 128) {
    cplx mean = 0;
    for (int ix = 0; ix < grid; ++ix)
        for (int iy = 0; iy < grid; ++iy)
            mean += g.dlog_zbar(g.lat.from_coords(double(ix) / grid, double(iy) / grid));
    mean /= cplx(double(grid) * double(grid));
    cplx w = mean * cplx(g.lat.tau.imag() / M_PI);  // = m tau - n
    double m_raw = w.imag() / g.lat.tau.imag();
    double n_raw = m_raw * g.lat.tau.real() - w.real();
    PeriodClass pc;
    pc.m = std::lround(m_raw);
    pc.n = std::lround(n_raw);
    pc.integrality_defect =
        std::max(std::abs(m_raw - double(pc.m)), std::abs(n_raw - double(pc.n)));
    cplx tau = g.lat.tau, tb = std::conj(tau);
    cplx m(double(pc.m)), nn(double(pc.n));
    pc.xi_z = cplx(0, 2 * M_PI) * (nn - m * tb) / (tau - tb);
    pc.xi_zbar = cplx(0, 2 * M_PI) * (m * tau - nn) / (tau - tb);
    // on the unit-square chart: 2 pi i (m dx + n dy) with dx = (dw + dwbar)/2,
    // dy = (dw - dwbar)/(2i)
    Chart square(1);
    square.re_lo[0] = square.im_lo[0] = 0;
    square.re_hi[0] = square.im_hi[0] = 1;
    pc.xi = KForm::monomial(square, static_cast<Mask>(1u << 0),
                            ScalarField(cplx(0, M_PI) * m + cplx(M_PI) * nn)) +
            KForm::monomial(square, static_cast<Mask>(1u << 3),
                            ScalarField(cplx(0, M_PI) * m - cplx(M_PI) * nn));
    return pc;
}

// One Fourier mode exp(2 pi i (k1 x + k2 y)) with its coefficient.
struct TorusMode {
    int k1, k2;
    cplx coef;
};

struct DbarSolution {
    bool solvable = false;
    cplx mean{};                // obstruction: the zero mode of the data
    int n = 0;
    std::vector<cplx> gamma;    // mean-zero solution on the grid, index ix * n + iy
    std::vector<TorusMode> modes;
    cplx tau{};

    cplx eval(double x, double y) const {
        cplx s = 0;
        for (const auto& m : modes)
            s += m.coef * std::exp(cplx(0, 2 * M_PI) * (cplx(double(m.k1)) * cplx(x) +
                                                        cplx(double(m.k2)) * cplx(y)));
        return s;
    }
    cplx dz(double x, double y) const {
        cplx tb = std::conj(tau), s = 0;
        for (const auto& m : modes)
            s += m.coef * cplx(0, 2 * M_PI) * (cplx(double(m.k2)) - cplx(double(m.k1)) * tb) /
                 (tau - tb) *
                 std::exp(cplx(0, 2 * M_PI) * (cplx(double(m.k1)) * cplx(x) + cplx(double(m.k2)) * cplx(y)));
        return s;
    }
    cplx dzbar(double x, double y) const {
        cplx tb = std::conj(tau), s = 0;
        for (const auto& m : modes)
            s += m.coef * cplx(0, 2 * M_PI) * (cplx(double(m.k1)) * tau - cplx(double(m.k2))) /
                 (tau - tb) *
                 std::exp(cplx(0, 2 * M_PI) * (cplx(double(m.k1)) * cplx(x) + cplx(double(m.k2)) * cplx(y)));
        return s;
    }
};

// Solves dbar gamma = rho dzbar on the torus by FFT.  `rho` holds the
// dzbar-coefficient on the n x n coordinate grid (index ix * n + iy).  A
// nonzero grid mean is the solvability obstruction and is reported, not
// thrown.  The solution is gauge-fixed to mean zero.
inline DbarSolution dbar_solve(const std::vector<cplx>& rho, const Lattice& lat, int n) {
    if (rho.size() != size_t(n) * size_t(n)) throw std::invalid_argument("dbar_solve: bad grid size");
    DbarSolution sol;
    sol.n = n;
    sol.tau = lat.tau;

    std::vector<cplx> hat(rho.size());
    {
        std::vector<cplx> in = rho;
        fftw_plan plan = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(in.data()),
                                          reinterpret_cast<fftw_complex*>(hat.data()),
                                          FFTW_FORWARD, FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }
    double n2 = double(n) * double(n);
    sol.mean = hat[0] / cplx(n2);
    if (std::abs(sol.mean) >= 1e-8) return sol;
    sol.solvable = true;

    cplx tau = lat.tau, tb = std::conj(tau);
    std::vector<cplx> ghat(hat.size());
    double top = 0;
    for (int kx = 0; kx < n; ++kx)
        for (int ky = 0; ky < n; ++ky) {
            if (kx == 0 && ky == 0) continue;
            int k1 = kx <= n / 2 ? kx : kx - n;
            int k2 = ky <= n / 2 ? ky : ky - n;
            cplx denom = cplx(0, 2 * M_PI) * (cplx(double(k1)) * tau - cplx(double(k2)));
            ghat[size_t(kx) * size_t(n) + size_t(ky)] =
                hat[size_t(kx) * size_t(n) + size_t(ky)] * (tau - tb) / denom;
            top = std::max(top, std::abs(ghat[size_t(kx) * size_t(n) + size_t(ky)]) / n2);
        }
    sol.gamma.resize(ghat.size());
    {
        fftw_plan plan = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(ghat.data()),
                                          reinterpret_cast<fftw_complex*>(sol.gamma.data()),
                                          FFTW_BACKWARD, FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }
    for (auto& v : sol.gamma) v /= cplx(n2);
    for (int kx = 0; kx < n; ++kx)
        for (int ky = 0; ky < n; ++ky) {
            cplx coef = ghat[size_t(kx) * size_t(n) + size_t(ky)] / cplx(n2);
            if (std::abs(coef) > 1e-14 * top)
                sol.modes.push_back({kx <= n / 2 ? kx : kx - n, ky <= n / 2 ? ky : ky - n, coef});
        }
    return sol;
}

// dzbar-coefficient of g^{-1} dg - xi on the grid: the dbar data of the
// normalization step (analytic, so band-limited whenever phi is)
inline std::vector<cplx> normalized_dbar_data(const SmoothQuotientMap& g, const PeriodClass& pc,
                                              int n) {
    std::vector<cplx> rho(size_t(n) * size_t(n));
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            rho[size_t(ix) * size_t(n) + size_t(iy)] =
                g.dlog_zbar(g.lat.from_coords(double(ix) / n, double(iy) / n)) - pc.xi_zbar;
    return rho;
}

// psi = g^{-1} dg - xi - d gamma: a closed 1-form of type (1,0), meromorphic
// with simple poles on the divisor, whose exponentiated primitive f has
// divisor Q - P.
struct PsiField {
    SmoothQuotientMap g;
    PeriodClass pc;
    DbarSolution gamma;
    cplx basepoint;

    cplx psi_z(cplx z) const {
        TorusCoords c = g.lat.coords(z);
        return g.dlog_z(z) - pc.xi_z - gamma.dz(c.x, c.y);
    }
    cplx psi_zbar(cplx z) const {
        TorusCoords c = g.lat.coords(z);
        return g.dlog_zbar(z) - pc.xi_zbar - gamma.dzbar(c.x, c.y);
    }

    // integral of psi along the straight segment from a to b
    cplx integrate(cplx a, cplx b) const {
        GaussRule gr = gauss_legendre(16);
        int segs = std::max(1, int(std::ceil(std::abs(b - a) / 0.1)));
        cplx acc = 0;
        for (int s = 0; s < segs; ++s) {
            cplx sa = a + (b - a) * cplx(double(s) / segs);
            cplx sb = a + (b - a) * cplx(double(s + 1) / segs);
            cplx mid = (sa + sb) * cplx(0.5), half = (sb - sa) * cplx(0.5);
            for (size_t k = 0; k < gr.x.size(); ++k) {
                cplx z = mid + half * cplx(gr.x[k]);
                acc += cplx(gr.w[k]) * (psi_z(z) * half + psi_zbar(z) * std::conj(half));
            }
        }
        return acc;
    }

    cplx f(cplx z) const { return std::exp(integrate(basepoint, z)); }

    // (1 / 2 pi i) * contour integral of psi around |z - center| = radius:
    // the enclosed residue sum, and the winding number of f on that circle
    cplx circulation(cplx center, double radius, int samples = 512) const {
        cplx acc = 0;
        for (int k = 0; k < samples; ++k) {
            double th = 2 * M_PI * k / samples;
            cplx e = std::exp(cplx(0, th)), z = center + cplx(radius) * e;
            cplx dzdt = cplx(0, radius) * e;  // d z / d theta
            acc += psi_z(z) * dzdt + psi_zbar(z) * std::conj(dzdt);
        }
        return acc * cplx(2 * M_PI / samples) / cplx(0, 2 * M_PI);
    }

    cplx period_x(double y0) const {
        cplx a = g.lat.from_coords(0, y0);
        return integrate(a, a + cplx(1));
    }
    cplx period_y(double x0) const {
        cplx a = g.lat.from_coords(x0, 0);
        return integrate(a, a + g.lat.tau);
    }
};

inline PsiField build_psi_and_f(const SmoothQuotientMap& g, const PeriodClass& pc,
                                const DbarSolution& sol, cplx basepoint) {
    if (!sol.solvable)
        throw std::invalid_argument("build_psi_and_f: dbar data was not solvable");
    return {g, pc, sol, basepoint};
}

}  // namespace abelcs
