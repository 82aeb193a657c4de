#pragma once

// Midpoint tensor quadrature over the surface rectangle.
// Row sums are independent, so results do not depend on the thread count.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "ris/em_core.hpp"
#include "ris/errors.hpp"
#include "ris/geometry.hpp"

namespace ris {

inline constexpr double kDefaultBudget = 2e7;

struct QuadratureSpec {
    double samples_per_wavelength = 10.0;
    int min_per_axis = 8;
    double budget = kDefaultBudget;
    int threads = 1;  // 0 = hardware concurrency

    void validate() const {
        if (!(samples_per_wavelength >= 2.0)) throw domain_error("samples_per_wavelength must be >= 2");
        if (min_per_axis < 1) throw domain_error("min_per_axis must be >= 1");
        if (!(budget > 0.0)) throw domain_error("quadrature budget must be > 0");
        if (threads < 0) throw domain_error("threads must be >= 0");
    }
};

/// RIS_BUDGET overrides the configured budget when set to a positive number.
inline double effective_budget(const QuadratureSpec& q) {
    if (const char* env = std::getenv("RIS_BUDGET")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && v > 0.0) return v;
    }
    return q.budget;
}

inline int effective_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

struct Grid {
    std::size_t nx = 0;
    std::size_t ny = 0;
    double x0 = 0.0;  // first midpoint
    double y0 = 0.0;
    double hx = 0.0;
    double hy = 0.0;

    double x(std::size_t i) const { return x0 + static_cast<double>(i) * hx; }
    double y(std::size_t j) const { return y0 + static_cast<double>(j) * hy; }
    double cell() const { return hx * hy; }
    double samples() const { return static_cast<double>(nx) * static_cast<double>(ny); }
};

inline Grid uniform_grid(const SurfaceSpec& s, std::size_t nx, std::size_t ny) {
    if (nx == 0 || ny == 0) throw domain_error("grid needs at least one cell per axis");
    Grid g;
    g.nx = nx;
    g.ny = ny;
    g.hx = 2.0 * s.half_len_x / static_cast<double>(nx);
    g.hy = 2.0 * s.half_len_y / static_cast<double>(ny);
    g.x0 = -s.half_len_x + 0.5 * g.hx;
    g.y0 = -s.half_len_y + 0.5 * g.hy;
    return g;
}

/// Picks the cell count per axis so that the phase advances by at most
/// 2 pi / samples_per_wavelength per cell. `max_slope_x` bounds |dP/dx| over
/// the surface (dimensionless, P in metres). `extra_x` is an additional
/// minimum cell count, used for amplitude resolution.
inline Grid plan_grid(const SurfaceSpec& s, double lambda, double max_slope_x, double max_slope_y,
                      const QuadratureSpec& q, std::size_t extra_x = 0, std::size_t extra_y = 0) {
    q.validate();
    auto count = [&](double half_len, double slope, std::size_t extra) {
        const double by_phase = std::ceil(2.0 * half_len * slope * q.samples_per_wavelength / lambda);
        const double n = std::max({by_phase, static_cast<double>(q.min_per_axis), static_cast<double>(extra)});
        return n;
    };
    const double nx = count(s.half_len_x, max_slope_x, extra_x);
    const double ny = count(s.half_len_y, max_slope_y, extra_y);
    const double budget = effective_budget(q);
    if (nx * ny > budget) throw budget_error(nx * ny, budget);
    return uniform_grid(s, static_cast<std::size_t>(nx), static_cast<std::size_t>(ny));
}

/// Pairwise summation over [first, last).
template <class T>
T pairwise_sum(const T* first, std::size_t n) {
    if (n <= 8) {
        T acc{};
        for (std::size_t i = 0; i < n; ++i) acc += first[i];
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(first, half) + pairwise_sum(first + half, n - half);
}

/// Sum of f(x, y) * cell over the grid midpoints.
template <class T, class F>
T integrate_grid(const Grid& g, F&& f, int threads = 1) {
    std::vector<T> rows(g.ny);
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&](std::size_t j_begin, std::size_t j_end) {
        std::vector<T> vals(g.nx);
        for (std::size_t j = j_begin; j < j_end; ++j) {
            const double y = g.y(j);
            for (std::size_t i = 0; i < g.nx; ++i) vals[i] = f(g.x(i), y);
            rows[j] = pairwise_sum(vals.data(), g.nx);
        }
    };
    const int nt = std::max(1, std::min<int>(effective_threads(threads), static_cast<int>(g.ny)));
    if (nt == 1) {
        work(0, g.ny);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nt));
        const std::size_t chunk = (g.ny + static_cast<std::size_t>(nt) - 1) / static_cast<std::size_t>(nt);
        for (int t = 0; t < nt; ++t) {
            const std::size_t b = static_cast<std::size_t>(t) * chunk;
            const std::size_t e = std::min(g.ny, b + chunk);
            if (b >= e) break;
            pool.emplace_back([&, b, e] {
                try {
                    work(b, e);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }
    return pairwise_sum(rows.data(), g.ny) * g.cell();
}

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline GaussRule gauss_legendre(int n) {
    if (n < 1) throw domain_error("Gauss-Legendre order must be >= 1");
    GaussRule r;
    r.nodes.resize(static_cast<std::size_t>(n));
    r.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int m = 2; m <= n; ++m) {
                const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[static_cast<std::size_t>(i)] = -x;
        r.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        r.weights[static_cast<std::size_t>(i)] = w;
        r.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return r;
}

/// Composite tensor Gauss-Legendre rule with `px` x `py` equal panels of
/// `order` nodes each. Intended for smooth, non-oscillating integrands.
template <class T, class F>
T integrate_gauss(const SurfaceSpec& s, std::size_t px, std::size_t py, int order, F&& f) {
    if (px == 0 || py == 0) throw domain_error("Gauss rule needs at least one panel per axis");
    const GaussRule r = gauss_legendre(order);
    const double hx = 2.0 * s.half_len_x / static_cast<double>(px);
    const double hy = 2.0 * s.half_len_y / static_cast<double>(py);
    const std::size_t q = static_cast<std::size_t>(order);
    std::vector<double> xs(px * q), wx(px * q), ys(py * q), wy(py * q);
    for (std::size_t p = 0; p < px; ++p)
        for (std::size_t i = 0; i < q; ++i) {
            xs[p * q + i] = -s.half_len_x + (static_cast<double>(p) + 0.5 * (1.0 + r.nodes[i])) * hx;
            wx[p * q + i] = 0.5 * hx * r.weights[i];
        }
    for (std::size_t p = 0; p < py; ++p)
        for (std::size_t i = 0; i < q; ++i) {
            ys[p * q + i] = -s.half_len_y + (static_cast<double>(p) + 0.5 * (1.0 + r.nodes[i])) * hy;
            wy[p * q + i] = 0.5 * hy * r.weights[i];
        }
    std::vector<T> rows(ys.size()), vals(xs.size());
    for (std::size_t j = 0; j < ys.size(); ++j) {
        for (std::size_t i = 0; i < xs.size(); ++i) vals[i] = f(xs[i], ys[j]) * wx[i];
        rows[j] = pairwise_sum(vals.data(), vals.size()) * wy[j];
    }
    return pairwise_sum(rows.data(), rows.size());
}

}  // namespace ris
