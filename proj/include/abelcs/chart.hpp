#pragma once

// A single coordinate chart: a box in C^m, m in {1,2,3}.

#include <array>
#include <random>
#include <stdexcept>

#include "abelcs/dual.hpp"

namespace abelcs {

struct Point {
    std::array<cplx, 3> z{};
    cplx operator[](int i) const { return z[static_cast<size_t>(i)]; }
};

struct Chart {
    int m = 3;  // complex dimension
    // per-coordinate bounds: re in [re_lo, re_hi], im in [im_lo, im_hi]
    std::array<double, 3> re_lo{-1, -1, -1}, re_hi{1, 1, 1};
    std::array<double, 3> im_lo{-1, -1, -1}, im_hi{1, 1, 1};

    Chart() = default;
    explicit Chart(int dim, double half_width = 1.0) : m(dim) {
        if (m < 1 || m > 3) throw std::invalid_argument("chart dimension must be 1..3");
        for (int i = 0; i < 3; ++i) {
            re_lo[static_cast<size_t>(i)] = -half_width;
            re_hi[static_cast<size_t>(i)] = half_width;
            im_lo[static_cast<size_t>(i)] = -half_width;
            im_hi[static_cast<size_t>(i)] = half_width;
        }
    }

    bool compatible(const Chart& o) const { return m == o.m; }

    // real dimension of the chart
    int real_dim() const { return 2 * m; }

    template <class Rng>
    Point random_point(Rng& rng, double margin = 0.0) const {
        Point p;
        for (int i = 0; i < m; ++i) {
            auto s = static_cast<size_t>(i);
            std::uniform_real_distribution<double> ux(re_lo[s] + margin, re_hi[s] - margin);
            std::uniform_real_distribution<double> uy(im_lo[s] + margin, im_hi[s] - margin);
            p.z[s] = cplx(ux(rng), uy(rng));
        }
        return p;
    }
};

}  // namespace abelcs
