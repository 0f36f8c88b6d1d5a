#pragma once

// Special functions for the complex torus C / (Z + tau Z): the first Jacobi
// theta function and the odd quasi-periodic entire function built from it
// (simple zeros exactly on the lattice, normalized slope 1 at the origin).

#include <cmath>
#include <complex>
#include <stdexcept>

#include "abelcs/dual.hpp"

namespace abelcs {

// (x, y) with z = x + tau y; the real torus coordinates of z.
struct TorusCoords {
    double x, y;
};

struct Lattice {
    cplx tau;
    cplx q;              // nome exp(i pi tau)
    cplx eta1, eta2;     // quasi-period constants, see sigma() below
    cplx theta1_prime0;  // d/dv theta1(v) at v = 0

    explicit Lattice(cplx tau_) : tau(tau_) {
        if (!(tau.imag() > 0)) throw std::invalid_argument("lattice: Im tau must be positive");
        q = std::exp(cplx(0, M_PI) * tau);
        // theta1'(0) and theta1'''(0) from the sine series
        cplx d1 = 0, d3 = 0;
        for (int n = 0; n < 64; ++n) {
            double m = 2.0 * n + 1.0;
            cplx term = std::pow(q, 0.25 * m * m);
            if (n % 2) term = -term;
            d1 += cplx(2) * m * term;
            d3 -= cplx(2) * m * m * m * term;
            if (std::abs(term) < 1e-18 * std::abs(d1)) break;
        }
        theta1_prime0 = d1;
        // pinned so that sigma has no cubic term at the origin
        eta1 = -cplx(M_PI * M_PI / 3.0) * d3 / d1;
        eta2 = eta1 * tau - cplx(0, 2 * M_PI);
    }

    TorusCoords coords(cplx z) const {
        double y = z.imag() / tau.imag();
        return {z.real() - y * tau.real(), y};
    }

    cplx from_coords(double x, double y) const { return cplx(x, 0) + tau * cplx(y, 0); }

    // representative of v modulo the lattice with coordinates in [-1/2, 1/2)
    cplx reduce(cplx v) const {
        TorusCoords c = coords(v);
        return v - cplx(std::floor(c.x + 0.5), 0) - tau * cplx(std::floor(c.y + 0.5), 0);
    }

    // distance from v to the nearest lattice point
    double dist_to_lattice(cplx v) const { return std::abs(reduce(v)); }

    // theta1(v) = 2 sum (-1)^n q^{(n+1/2)^2} sin((2n+1) v)
    cplx theta1(cplx v) const {
        cplx acc = 0;
        for (int n = 0; n < 64; ++n) {
            double m = 2.0 * n + 1.0;
            cplx term = cplx(2) * std::pow(q, 0.25 * m * m) * std::sin(cplx(m) * v);
            if (n % 2) term = -term;
            acc += term;
            if (n > 2 && std::abs(term) < 1e-18 * (std::abs(acc) + 1e-300)) break;
        }
        return acc;
    }

    cplx theta1_deriv(cplx v) const {
        cplx acc = 0;
        for (int n = 0; n < 64; ++n) {
            double m = 2.0 * n + 1.0;
            cplx term = cplx(2) * cplx(m) * std::pow(q, 0.25 * m * m) * std::cos(cplx(m) * v);
            if (n % 2) term = -term;
            acc += term;
            if (n > 2 && std::abs(term) < 1e-18 * (std::abs(acc) + 1e-300)) break;
        }
        return acc;
    }

    // Odd entire function with simple zeros exactly on the lattice,
    // sigma(z) = z + O(z^5) near 0, and quasi-periodicity
    //   sigma(z + 1)   = -exp(eta1 (z + 1/2))   sigma(z)
    //   sigma(z + tau) = -exp(eta2 (z + tau/2)) sigma(z).
    // The argument is reduced to the fundamental cell first so the theta
    // series stays well conditioned for any z.
    cplx sigma(cplx z) const {
        cplx z0 = reduce(z);
        cplx w = z - z0;  // lattice part m + n tau
        TorusCoords wc = coords(w);
        long m = std::lround(wc.x), n = std::lround(wc.y);
        cplx base = std::exp(eta1 * z0 * z0 * cplx(0.5)) * theta1(cplx(M_PI) * z0) /
                    (cplx(M_PI) * theta1_prime0);
        cplx mult = std::exp((cplx(double(m)) * eta1 + cplx(double(n)) * eta2) *
                             (z0 + w * cplx(0.5)));
        if ((m + n + m * n) % 2) mult = -mult;
        return mult * base;
    }

    // sigma'(z) / sigma(z): the logarithmic derivative, with the same
    // argument reduction (simple poles of residue 1 on the lattice)
    cplx sigma_log_deriv(cplx z) const {
        cplx z0 = reduce(z);
        cplx w = z - z0;
        TorusCoords wc = coords(w);
        long m = std::lround(wc.x), n = std::lround(wc.y);
        return cplx(double(m)) * eta1 + cplx(double(n)) * eta2 + eta1 * z0 +
               cplx(M_PI) * theta1_deriv(cplx(M_PI) * z0) / theta1(cplx(M_PI) * z0);
    }
};

}  // namespace abelcs
