#pragma once

// Quadrature: periodic equal-weight grids, Gauss-Legendre grids, scrambled
// Sobol QMC with singular-set excision, and delta -> 0 Richardson
// extrapolation.  All reductions use a fixed block shape so results do not
// depend on the worker count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "abelcs/forms.hpp"

namespace abelcs {

enum class QuadMethod { PeriodicGrid, GaussGrid, Qmc };

struct QuadratureSpec {
    QuadMethod method = QuadMethod::Qmc;
    int resolution = 64;              // per-axis points for grid methods
    std::int64_t samples = 1 << 16;   // QMC sample count
    std::vector<double> excision;     // strictly decreasing radius schedule
    std::uint64_t seed = 1;
    double tolerance = 1e-6;
    int workers = 1;

    void validate() const {
        for (size_t i = 1; i < excision.size(); ++i)
            if (!(excision[i] < excision[i - 1]))
                throw std::invalid_argument("excision schedule must be strictly decreasing");
    }
};

struct IntegralResult {
    cplx value{};
    double error_estimate = 0.0;
    std::vector<std::pair<double, cplx>> partials;  // (delta, integral outside delta)
    double fit_residual = 0.0;
    bool converged = true;
};

// ---- deterministic reduction ---------------------------------------------

inline cplx pairwise_sum(std::vector<cplx> v) {
    if (v.empty()) return {};
    size_t n = v.size();
    while (n > 1) {
        size_t h = (n + 1) / 2;
        for (size_t i = 0; i < n / 2; ++i) v[i] = v[2 * i] + v[2 * i + 1];
        if (n & 1) v[n / 2] = v[n - 1];
        n = h;
    }
    return v[0];
}

// Runs fn(block) for block = 0..nblocks-1 on `workers` threads.  Each block
// writes only its own slot, so the result is worker-count independent.
inline void run_blocks(std::int64_t nblocks, int workers, const std::function<void(std::int64_t)>& fn) {
    if (workers <= 1) {
        for (std::int64_t b = 0; b < nblocks; ++b) fn(b);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::int64_t> next{0};
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                std::int64_t b = next.fetch_add(1);
                if (b >= nblocks) break;
                fn(b);
            }
        });
    for (auto& t : pool) t.join();
}

// ---- Gauss-Legendre nodes ------------------------------------------------

struct GaussRule {
    std::vector<double> x, w;  // nodes/weights on [-1, 1]
};

inline GaussRule gauss_legendre(int n) {
    GaussRule r;
    r.x.resize(static_cast<size_t>(n));
    r.w.resize(static_cast<size_t>(n));
    auto legendre = [n](double x) {
        double p0 = 1.0, p1 = 0.0;
        for (int k = 0; k < n; ++k) {
            double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1);
        }
        double dp = n * (x * p0 - p1) / (x * x - 1.0);
        return std::pair<double, double>(p0, dp);
    };
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            auto [p, dpv] = legendre(x);
            dp = dpv;
            double dx = p / dpv;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.x[static_cast<size_t>(i)] = x;
        r.w[static_cast<size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

// ---- scrambled Sobol sequence (up to 6 dimensions) -----------------------

class Sobol {
  public:
    Sobol(int dim, std::uint64_t seed) : dim_(dim) {
        if (dim < 1 || dim > 6) throw std::invalid_argument("Sobol supports 1..6 dims");
        init_directions();
        // digital shift scrambling keyed by the seed (splitmix64 stream)
        std::uint64_t s = seed;
        for (int d = 0; d < dim_; ++d) shift_[d] = static_cast<std::uint32_t>(splitmix(s) >> 32);
    }

    // Point at index n (Gray-code construction gives random access).
    void point(std::uint64_t n, double* out) const {
        std::uint64_t g = n ^ (n >> 1);
        for (int d = 0; d < dim_; ++d) {
            std::uint32_t x = shift_[d];
            std::uint64_t bits = g;
            int j = 0;
            while (bits) {
                if (bits & 1) x ^= v_[d][j];
                bits >>= 1;
                ++j;
            }
            out[d] = (x + 0.5) * 0x1p-32;
        }
    }

  private:
    static std::uint64_t splitmix(std::uint64_t& s) {
        s += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    void init_directions() {
        // Joe-Kuo direction data for dimensions 2..6
        static const int s_arr[5] = {1, 2, 3, 3, 4};
        static const int a_arr[5] = {0, 1, 1, 2, 1};
        static const int m_arr[5][4] = {{1, 0, 0, 0}, {1, 3, 0, 0}, {1, 3, 1, 0}, {1, 1, 1, 0}, {1, 1, 3, 3}};
        const int bits = 32;
        for (int j = 0; j < bits; ++j) v_[0][j] = 1u << (31 - j);
        for (int d = 1; d < dim_; ++d) {
            int s = s_arr[d - 1], a = a_arr[d - 1];
            std::vector<std::uint32_t> m(static_cast<size_t>(bits));
            for (int j = 0; j < s; ++j) m[static_cast<size_t>(j)] = static_cast<std::uint32_t>(m_arr[d - 1][j]);
            for (int j = s; j < bits; ++j) {
                std::uint32_t val = m[static_cast<size_t>(j - s)] ^ (m[static_cast<size_t>(j - s)] << s);
                for (int k = 1; k < s; ++k)
                    if ((a >> (s - 1 - k)) & 1) val ^= m[static_cast<size_t>(j - k)] << k;
                m[static_cast<size_t>(j)] = val;
            }
            for (int j = 0; j < bits; ++j) v_[d][j] = m[static_cast<size_t>(j)] << (31 - j);
        }
    }

    int dim_;
    std::uint32_t v_[6][32]{};
    std::uint32_t shift_[6]{};
};

// ---- Richardson extrapolation --------------------------------------------

// Least-squares fit of value(delta) = v + c1*delta + c2*delta*(log delta)^2;
// returns the delta -> 0 extrapolant v and the fit residual.
inline std::pair<cplx, double> extrapolate(const std::vector<std::pair<double, cplx>>& partials) {
    size_t n = partials.size();
    if (n < 3) throw std::invalid_argument("extrapolation needs >= 3 partials");
    for (size_t i = 1; i < n; ++i)
        if (!(partials[i].first < partials[i - 1].first))
            throw std::invalid_argument("deltas must be strictly decreasing");

    auto basis = [](double dlt, int k) {
        double l = std::log(dlt);
        return k == 0 ? 1.0 : (k == 1 ? dlt : dlt * l * l);
    };
    double ata[3][3] = {};
    cplx atb[3] = {};
    for (const auto& [dlt, val] : partials) {
        double b[3] = {basis(dlt, 0), basis(dlt, 1), basis(dlt, 2)};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) ata[i][j] += b[i] * b[j];
            atb[i] += b[i] * val;
        }
    }
    // solve the 3x3 normal system by Gaussian elimination
    cplx rhs[3] = {atb[0], atb[1], atb[2]};
    double m[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = ata[i][j];
    for (int k = 0; k < 3; ++k) {
        int piv = k;
        for (int r = k + 1; r < 3; ++r)
            if (std::abs(m[r][k]) > std::abs(m[piv][k])) piv = r;
        if (std::abs(m[piv][k]) < 1e-300) throw std::runtime_error("ill-conditioned extrapolation fit");
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
    double resid = 0.0;
    for (const auto& [dlt, val] : partials) {
        cplx fit = sol[0] + sol[1] * basis(dlt, 1) + sol[2] * basis(dlt, 2);
        resid = std::max(resid, std::abs(val - fit));
    }
    return {sol[0], resid};
}

// ---- box integration of a top-degree form --------------------------------

// Measure conversion: the coefficient of dz1^..^dzm^dzbar1^..^dzbar_m
// (ascending mask order) relates to dx1 dy1 ... dx_m dy_m by this factor.
inline cplx top_form_measure_factor(int m) {
    cplx f = 1;
    for (int i = 0; i < m; ++i) f *= cplx(0, -2);
    // sorting (z1..zm zbar1..zbar_m) -> (z1 zbar1 z2 zbar2 ...)
    int inv = (m == 2) ? 1 : (m == 3 ? 3 : 0);
    if (inv & 1) f = -f;
    return f;
}

inline Mask top_mask(int m) {
    Mask r = 0;
    for (int i = 0; i < m; ++i) r |= static_cast<Mask>((1u << i) | (1u << (i + 3)));
    return r;
}

// Integrates a pointwise integrand over the real box of the chart.
// fn(point) must return the full real-measure density (form coefficient
// already multiplied by the measure factor).  QMC with optional excision:
// `clearance(p)` < delta excludes p from that partial.
inline IntegralResult qmc_box_integrate(
    const Chart& chart, const QuadratureSpec& spec,
    const std::function<cplx(const Point&)>& density,
    const std::function<double(const Point&)>& clearance = {}) {
    spec.validate();
    int dim = chart.real_dim();
    double volume = 1.0;
    for (int i = 0; i < chart.m; ++i) {
        auto s = static_cast<size_t>(i);
        volume *= (chart.re_hi[s] - chart.re_lo[s]) * (chart.im_hi[s] - chart.im_lo[s]);
    }
    std::vector<double> deltas = spec.excision;
    if (deltas.empty()) deltas.push_back(0.0);
    size_t nd = deltas.size();

    const std::int64_t block = 16384;
    std::int64_t nblocks = (spec.samples + block - 1) / block;
    // per-block, per-delta sums
    std::vector<std::vector<cplx>> sums(nd, std::vector<cplx>(static_cast<size_t>(nblocks)));
    Sobol sob(dim, spec.seed);

    run_blocks(nblocks, spec.workers, [&](std::int64_t b) {
        std::vector<cplx> local(nd, cplx{});
        double u[6];
        std::int64_t lo = b * block, hi = std::min<std::int64_t>(spec.samples, lo + block);
        for (std::int64_t k = lo; k < hi; ++k) {
            sob.point(static_cast<std::uint64_t>(k), u);
            Point p;
            int t = 0;
            for (int i = 0; i < chart.m; ++i) {
                auto s = static_cast<size_t>(i);
                double x = chart.re_lo[s] + (chart.re_hi[s] - chart.re_lo[s]) * u[t++];
                double y = chart.im_lo[s] + (chart.im_hi[s] - chart.im_lo[s]) * u[t++];
                p.z[s] = cplx(x, y);
            }
            double cl = clearance ? clearance(p) : std::numeric_limits<double>::infinity();
            if (cl < deltas[nd - 1]) continue;  // inside every excision
            cplx f = density(p);
            for (size_t di = 0; di < nd; ++di)
                if (cl >= deltas[di]) local[di] += f;
        }
        for (size_t di = 0; di < nd; ++di) sums[di][static_cast<size_t>(b)] = local[di];
    });

    IntegralResult res;
    std::vector<cplx> totals(nd);
    for (size_t di = 0; di < nd; ++di)
        totals[di] = pairwise_sum(sums[di]) * (volume / static_cast<double>(spec.samples));
    if (nd == 1 && spec.excision.empty()) {
        res.value = totals[0];
        // crude error estimate: difference between halves of the sequence
        cplx head{};
        for (std::int64_t b = 0; b < nblocks / 2; ++b) head += sums[0][static_cast<size_t>(b)];
        cplx half = head * (volume / static_cast<double>(std::min(spec.samples, (nblocks / 2) * block)));
        res.error_estimate = std::abs(half - res.value);
    } else {
        for (size_t di = 0; di < nd; ++di) res.partials.emplace_back(deltas[di], totals[di]);
        if (nd >= 3) {
            auto [v, r] = extrapolate(res.partials);
            res.value = v;
            res.fit_residual = r;
            res.error_estimate = r;
        } else {
            res.value = totals[nd - 1];
            res.error_estimate = std::abs(totals[nd - 1] - totals[0]);
        }
    }
    res.converged = res.error_estimate <= spec.tolerance || spec.tolerance <= 0;
    return res;
}

// Equal-weight periodic grid over the chart box (spectrally accurate for
// smooth periodic integrands), with optional point excision.
inline IntegralResult periodic_grid_integrate(
    const Chart& chart, const QuadratureSpec& spec,
    const std::function<cplx(const Point&)>& density,
    const std::function<double(const Point&)>& clearance = {}) {
    spec.validate();
    int n = spec.resolution;
    // grid steps per real axis, interleaved (re1, im1, re2, im2, ...)
    int axes = chart.real_dim();
    std::vector<double> lo(static_cast<size_t>(axes)), step(static_cast<size_t>(axes));
    double cell = 1.0;
    for (int i = 0; i < chart.m; ++i) {
        auto s = static_cast<size_t>(i);
        lo[2 * s] = chart.re_lo[s];
        lo[2 * s + 1] = chart.im_lo[s];
        step[2 * s] = (chart.re_hi[s] - chart.re_lo[s]) / n;
        step[2 * s + 1] = (chart.im_hi[s] - chart.im_lo[s]) / n;
        cell *= step[2 * s] * step[2 * s + 1];
    }
    std::vector<double> deltas = spec.excision;
    if (deltas.empty()) deltas.push_back(0.0);
    size_t nd = deltas.size();
    std::vector<std::vector<cplx>> sums(nd, std::vector<cplx>(static_cast<size_t>(n)));

    // Blocks run over the first real axis; the remaining axes are swept by an
    // odometer in (im1, re2, im2, ...) order.
    run_blocks(n, spec.workers, [&](std::int64_t row) {
        std::vector<cplx> local(nd, cplx{});
        std::vector<int> idx(static_cast<size_t>(axes), 0);
        idx[0] = static_cast<int>(row);
        for (;;) {
            Point p;
            for (int i = 0; i < chart.m; ++i) {
                auto s = static_cast<size_t>(i);
                p.z[s] = cplx(lo[2 * s] + step[2 * s] * idx[2 * s],
                              lo[2 * s + 1] + step[2 * s + 1] * idx[2 * s + 1]);
            }
            double cl = clearance ? clearance(p) : std::numeric_limits<double>::infinity();
            if (cl >= deltas[nd - 1]) {
                cplx f = density(p);
                for (size_t di = 0; di < nd; ++di)
                    if (cl >= deltas[di]) local[di] += f;
            }
            int a = axes - 1;
            for (; a >= 1; --a) {
                if (++idx[static_cast<size_t>(a)] < n) break;
                idx[static_cast<size_t>(a)] = 0;
            }
            if (a < 1) break;
        }
        for (size_t di = 0; di < nd; ++di) sums[di][static_cast<size_t>(row)] = local[di];
    });

    IntegralResult res;
    std::vector<cplx> totals(nd);
    for (size_t di = 0; di < nd; ++di) totals[di] = pairwise_sum(sums[di]) * cell;
    if (spec.excision.empty()) {
        res.value = totals[0];
        res.error_estimate = 0.0;
    } else {
        for (size_t di = 0; di < nd; ++di) res.partials.emplace_back(deltas[di], totals[di]);
        if (nd >= 3) {
            auto [v, r] = extrapolate(res.partials);
            res.value = v;
            res.fit_residual = r;
            res.error_estimate = r;
        } else {
            res.value = totals[nd - 1];
            res.error_estimate = std::abs(totals[nd - 1] - totals[0]);
        }
    }
    res.converged = true;
    return res;
}

// Integrates a top-degree KForm over the chart box.
inline IntegralResult integrate(const KForm& form, const Chart& chart, const QuadratureSpec& spec,
                                const std::function<double(const Point&)>& clearance = {}) {
    if (form.degree() != chart.real_dim())
        throw std::invalid_argument("integrate: form degree != real dimension of domain");
    Mask tm = top_mask(chart.m);
    cplx factor = top_form_measure_factor(chart.m);
    auto density = [&, tm, factor](const Point& p) -> cplx {
        auto it = form.coeffs().find(tm);
        return it == form.coeffs().end() ? cplx{} : factor * it->second(p);
    };
    if (spec.method == QuadMethod::PeriodicGrid) return periodic_grid_integrate(chart, spec, density, clearance);
    return qmc_box_integrate(chart, spec, density, clearance);
}

}  // namespace abelcs
