#pragma once

// Brute-force surface integrals for the reflected and transmitted field, the
// discretized-element sum and the two generic integral families.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>

#include "ris/em_core.hpp"
#include "ris/errors.hpp"
#include "ris/geometry.hpp"
#include "ris/quadrature.hpp"
#include "ris/surface_profiles.hpp"

namespace ris {

struct FieldResult {
    Complex value;
    Complex incident;
    /// Surface term F_R (reflection) or F_T (transmission).
    Complex scattered;
    /// Transmission only: the shadowing integral subtracted from the incident field.
    Complex shadow;
    std::string method;
    std::size_t samples = 0;
    /// k*d >= kDipoleValidityKd for every Tx-surface and surface-Rx distance.
    bool dipole_valid = true;
};

/// Everything the integrands need about one link.
struct Link {
    LinkGeometry geom;
    SurfaceProfile profile;
    DipoleSource source;  // position is taken from geom.tx
    Polarization rec_pol;
    Carrier carrier;

    void validate() const {
        geom.validate();
        profile.validate();
        source.validate();
        rec_pol.validate();
        carrier.validate();
    }
};

/// I_0 = jk / (16 pi^2)
inline Complex integral_prefactor(double k) { return {0.0, k / (16.0 * kPi * kPi)}; }

namespace detail {

inline DipoleSource placed_source(const Link& l) {
    DipoleSource s = l.source;
    s.position = l.geom.tx;
    return s;
}

inline Complex incident_term(const Link& l) {
    const auto inc = incident_dipole_field(placed_source(l), l.geom.rx, l.carrier);
    return project(inc.e, l.rec_pol);
}

inline bool dipole_valid(const Link& l) {
    const double k = l.carrier.k();
    const double nearest_rx = std::abs(l.geom.rx.z);
    return k * l.geom.tx.z >= kDipoleValidityKd && k * nearest_rx >= kDipoleValidityKd &&
           k * norm(l.geom.rx - l.geom.tx) >= kDipoleValidityKd;
}

/// Amplitude-only cell count per axis: cells no larger than the smallest
/// height over the surface divided by 1.6 * samples_per_wavelength.
inline std::size_t amplitude_cells(double half_len, const LinkGeometry& g, const QuadratureSpec& q) {
    const double h = std::min(g.tx.z, std::abs(g.rx.z));
    return static_cast<std::size_t>(std::ceil(2.0 * half_len * 1.6 * q.samples_per_wavelength / h));
}

/// Worst-case |grad P| for P = d_tx + d_rx - alpha x - beta y, sampled on
/// the surface boundary (including the projections of Tx and Rx) and center.
inline double max_phase_gradient(const LinkGeometry& g, double alpha, double beta) {
    const double lx = g.surface.half_len_x, ly = g.surface.half_len_y;
    auto grad = [&](double x, double y) {
        const auto d = distances(g, {x, y});
        return std::hypot((x - g.tx.x) / d.d_tx + (x - g.rx.x) / d.d_rx - alpha,
                          (y - g.tx.y) / d.d_tx + (y - g.rx.y) / d.d_rx - beta);
    };
    constexpr int kSamples = 33;
    double best = grad(0.0, 0.0);
    for (int i = 0; i < kSamples; ++i) {
        const double u = -1.0 + 2.0 * i / (kSamples - 1);
        best = std::max({best, grad(u * lx, -ly), grad(u * lx, ly), grad(-lx, u * ly), grad(lx, u * ly)});
    }
    for (const Point3* p : {&g.tx, &g.rx}) {
        const double cx = std::clamp(p->x, -lx, lx), cy = std::clamp(p->y, -ly, ly);
        best = std::max({best, grad(cx, -ly), grad(cx, ly), grad(-lx, cy), grad(lx, cy)});
    }
    return best;
}

inline Grid plan_link_grid(const LinkGeometry& g, double lambda, double alpha, double beta, const QuadratureSpec& q,
                           bool phase_free = false) {
    const double slope = phase_free ? 0.0 : max_phase_gradient(g, alpha, beta);
    return plan_grid(g.surface, lambda, slope, slope, q, amplitude_cells(g.surface.half_len_x, g, q),
                     amplitude_cells(g.surface.half_len_y, g, q));
}

/// Reflection: |Gamma| Omega (cos_i + cos_r) / (d_tx d_rx) e^{-jk P_R}.
/// Transmission uses the same shape with the transmit polarization.
inline Complex surface_integrand(const Link& l, double x, double y) {
    const LinkGeometry& g = l.geom;
    const double k = l.carrier.k();
    const auto d = distances(g, {x, y});
    const double obliquity = g.tx.z / d.d_tx + std::abs(g.rx.z) / d.d_rx;
    const Vec3 s_hat{(x - g.tx.x) / d.d_tx, (y - g.tx.y) / d.d_tx, -g.tx.z / d.d_tx};
    const double omega = omega_pattern(s_hat, l.profile.pol_out, l.rec_pol, l.source.moment, k, l.carrier.eps0,
                                       l.profile.efficiency);
    const double amp = l.profile.magnitude_at(x, y) * omega * obliquity / (d.d_tx * d.d_rx);
    const double arg = k * (d.d_tx + d.d_rx) - (l.rec_pol.phase + l.profile.pol_out.phase + gamma_phase(l.profile, g, x, y, k));
    return std::polar(amp, -arg);
}

/// Omega_inc (cos_i + cos_r) / (d_tx d_rx) e^{-jk P_D}.
inline Complex shadow_integrand(const Link& l, double x, double y) {
    const LinkGeometry& g = l.geom;
    const double k = l.carrier.k();
    const auto d = distances(g, {x, y});
    const double obliquity = g.tx.z / d.d_tx + std::abs(g.rx.z) / d.d_rx;
    const Vec3 s_hat{(x - g.tx.x) / d.d_tx, (y - g.tx.y) / d.d_tx, -g.tx.z / d.d_tx};
    const double omega =
        omega_pattern(s_hat, l.source.polarization, l.rec_pol, l.source.moment, k, l.carrier.eps0, 1.0);
    const double amp = omega * obliquity / (d.d_tx * d.d_rx);
    const double arg = k * (d.d_tx + d.d_rx) - (l.source.polarization.phase + l.rec_pol.phase);
    return std::polar(amp, -arg);
}

/// The focusing law cancels the geometric phase; callers plan on amplitude alone.
inline Gradient planning_gradient(const SurfaceProfile& p) {
    if (is_focusing(p)) return {};
    return linear_gradient(p);
}

struct FieldPair {
    Complex shadow, surface;
    FieldPair& operator+=(const FieldPair& o) { shadow += o.shadow; surface += o.surface; return *this; }
    friend FieldPair operator+(FieldPair a, const FieldPair& b) { return a += b; }
    friend FieldPair operator*(FieldPair a, double s) { a.shadow *= s; a.surface *= s; return a; }
};

inline void require_side(const Link& l, Side side, SurfaceMode mode) {
    if (l.geom.side != side) throw contract_error("link side does not match the requested field");
    if (l.profile.mode != mode) throw contract_error("surface mode does not match the requested field");
}

}  // namespace detail

/// Incident field plus the reflected surface integral, by tensor quadrature.
inline FieldResult reflected_field(const Link& l, const QuadratureSpec& q = {}) {
    l.validate();
    detail::require_side(l, Side::Reflection, SurfaceMode::Reflect);
    const double k = l.carrier.k();
    const auto grad = detail::planning_gradient(l.profile);
    const Grid grid = detail::plan_link_grid(l.geom, l.carrier.lambda(), grad.alpha, grad.beta, q, is_focusing(l.profile));
    const Complex integral =
        integrate_grid<Complex>(grid, [&](double x, double y) { return detail::surface_integrand(l, x, y); }, q.threads);
    FieldResult r;
    r.incident = detail::incident_term(l);
    r.scattered = integral_prefactor(k) * integral;
    r.value = r.incident + r.scattered;
    r.method = "quadrature";
    r.samples = static_cast<std::size_t>(grid.samples());
    r.dipole_valid = detail::dipole_valid(l);
    return r;
}

/// value = incident - shadow + scattered, where shadow is the I_0-scaled
/// integral of the unmodified incident wave and scattered is F_T. Both share
/// one grid so that an identity surface cancels to rounding.
inline FieldResult transmitted_field(const Link& l, const QuadratureSpec& q = {}) {
    l.validate();
    detail::require_side(l, Side::Transmission, SurfaceMode::Transmit);
    const double k = l.carrier.k();
    const auto grad = detail::planning_gradient(l.profile);
    const double lambda = l.carrier.lambda();
    // The shadow term always carries the geometric phase.
    const double slope =
        std::max(detail::max_phase_gradient(l.geom, 0.0, 0.0), detail::max_phase_gradient(l.geom, grad.alpha, grad.beta));
    const Grid grid = plan_grid(l.geom.surface, lambda, slope, slope, q,
                                detail::amplitude_cells(l.geom.surface.half_len_x, l.geom, q),
                                detail::amplitude_cells(l.geom.surface.half_len_y, l.geom, q));
    const auto sums = integrate_grid<detail::FieldPair>(
        grid,
        [&](double x, double y) {
            return detail::FieldPair{detail::shadow_integrand(l, x, y), detail::surface_integrand(l, x, y)};
        },
        q.threads);
    FieldResult r;
    const Complex i0 = integral_prefactor(k);
    r.incident = detail::incident_term(l);
    r.shadow = i0 * sums.shadow;
    r.scattered = i0 * sums.surface;
    r.value = r.incident - r.shadow + r.scattered;
    r.method = "quadrature";
    r.samples = static_cast<std::size_t>(grid.samples());
    r.dipole_valid = detail::dipole_valid(l);
    return r;
}

inline FieldResult surface_field(const Link& l, const QuadratureSpec& q = {}) {
    return l.geom.side == Side::Reflection ? reflected_field(l, q) : transmitted_field(l, q);
}

/// Element lattice: n = max(1, round(2L / step)) centers per axis, centered
/// on the surface, spaced by `step`.
inline Grid element_lattice(const SurfaceSpec& s, double step) {
    if (!(step > 0.0) || step > 2.0 * std::min(s.half_len_x, s.half_len_y) * (1.0 + 1e-12))
        throw domain_error("element step must lie in (0, min(2Lx, 2Ly)]");
    auto count = [&](double half_len) {
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(2.0 * half_len / step)));
    };
    Grid g;
    g.nx = count(s.half_len_x);
    g.ny = count(s.half_len_y);
    g.hx = g.hy = step;
    g.x0 = -0.5 * static_cast<double>(g.nx - 1) * step;
    g.y0 = -0.5 * static_cast<double>(g.ny - 1) * step;
    return g;
}

/// Point-sampled element sum; each element contributes integrand(center) * step^2.
inline FieldResult discretized_field(const Link& l, double step, int threads = 1) {
    l.validate();
    const bool transmit = l.geom.side == Side::Transmission;
    if (l.profile.mode != (transmit ? SurfaceMode::Transmit : SurfaceMode::Reflect))
        throw contract_error("surface mode does not match the link side");
    const Grid grid = element_lattice(l.geom.surface, step);
    const Complex i0 = integral_prefactor(l.carrier.k());
    FieldResult r;
    r.incident = detail::incident_term(l);
    r.scattered =
        i0 * integrate_grid<Complex>(grid, [&](double x, double y) { return detail::surface_integrand(l, x, y); }, threads);
    if (transmit)
        r.shadow = i0 * integrate_grid<Complex>(
                            grid, [&](double x, double y) { return detail::shadow_integrand(l, x, y); }, threads);
    r.value = r.incident - r.shadow + r.scattered;
    r.method = "discretized";
    r.samples = static_cast<std::size_t>(grid.samples());
    r.dipole_valid = detail::dipole_valid(l);
    return r;
}

using AmplitudeFn = std::function<double(double d_tx, double d_rx)>;
using SurfaceFn = std::function<double(double x, double y)>;

struct AffineCoefficients {
    double c0 = 0.0;
    double cx = 0.0;
    double cy = 0.0;
};

/// Recovers C = c0 + cx x + cy y and rejects C with non-zero second differences.
inline AffineCoefficients require_affine(const SurfaceFn& c, const SurfaceSpec& s) {
    const double lx = s.half_len_x, ly = s.half_len_y;
    AffineCoefficients a;
    a.c0 = c(0.0, 0.0);
    a.cx = (c(lx, 0.0) - c(-lx, 0.0)) / (2.0 * lx);
    a.cy = (c(0.0, ly) - c(0.0, -ly)) / (2.0 * ly);
    const std::array<std::array<double, 2>, 5> probes{{{0.0, 0.0}, {0.5, 0.5}, {-0.5, 0.25}, {0.3, -0.7}, {-0.6, -0.4}}};
    double scale = std::abs(a.c0) + std::abs(a.cx) * lx + std::abs(a.cy) * ly;
    for (const auto& p : probes) {
        const double x = p[0] * lx, y = p[1] * ly, hx = 0.25 * lx, hy = 0.25 * ly;
        const double vals[] = {c(x, y), c(x + hx, y), c(x - hx, y), c(x, y + hy), c(x, y - hy),
                               c(x + hx, y + hy), c(x - hx, y - hy), c(x + hx, y - hy), c(x - hx, y + hy)};
        for (double v : vals) scale = std::max(scale, std::abs(v));
        const double dxx = vals[1] - 2.0 * vals[0] + vals[2];
        const double dyy = vals[3] - 2.0 * vals[0] + vals[4];
        const double dxy = vals[5] + vals[6] - vals[7] - vals[8];
        const double tol = 1e-9 * std::max(scale, 1.0);
        if (std::abs(dxx) > tol || std::abs(dyy) > tol || std::abs(dxy) > tol)
            throw contract_error("phase offset C(x, y) must be affine-linear");
    }
    return a;
}

/// I_1 = int_S A1(d_tx, d_rx) B1(x, y) e^{-jk(d_tx + d_rx - C(x, y))} dx dy.
inline Complex integrate_type1(const AmplitudeFn& a1, const SurfaceFn& b1, const SurfaceFn& c, const LinkGeometry& g,
                               double k, const QuadratureSpec& q = {}) {
    g.validate();
    if (!(k > 0.0)) throw domain_error("wavenumber must be > 0");
    const auto aff = require_affine(c, g.surface);
    const Grid grid = detail::plan_link_grid(g, kTwoPi / k, aff.cx, aff.cy, q);
    return integrate_grid<Complex>(
        grid,
        [&](double x, double y) {
            const auto d = distances(g, {x, y});
            return std::polar(a1(d.d_tx, d.d_rx) * b1(x, y), -k * (d.d_tx + d.d_rx) + k * c(x, y));
        },
        q.threads);
}

/// I_2 = int_S A2(d_tx, d_rx) B2(x, y) dx dy for smooth real integrands,
/// by composite Gauss-Legendre.
inline double integrate_type2(const AmplitudeFn& a2, const SurfaceFn& b2, const LinkGeometry& g,
                              const QuadratureSpec& q = {}) {
    g.surface.validate();
    q.validate();
    constexpr int kOrder = 10;
    const double h = std::min(g.tx.z, std::abs(g.rx.z));
    if (!(h > 0.0)) throw domain_error("Tx and Rx must lie off the surface plane");
    // One panel per height-scale of surface, refined by the density knob.
    auto panels = [&](double half_len) {
        const double n = std::ceil(2.0 * half_len * q.samples_per_wavelength / (2.0 * h));
        return static_cast<std::size_t>(std::clamp(n, 4.0, 4096.0));
    };
    return integrate_gauss<double>(g.surface, panels(g.surface.half_len_x), panels(g.surface.half_len_y), kOrder,
                                   [&](double x, double y) {
                                       const auto d = distances(g, {x, y});
                                       return a2(d.d_tx, d.d_rx) * b2(x, y);
                                   });
}

}  // namespace ris
