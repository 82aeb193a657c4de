#pragma once

// Stationary points of P(x, y) = d_tx + d_rx - alpha x - beta y, the generic
// stationary-phase and corner approximations, per-profile closed forms, the
// focusing bound and regime classification.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "ris/em_core.hpp"
#include "ris/errors.hpp"
#include "ris/field_integrals.hpp"
#include "ris/geometry.hpp"
#include "ris/quadrature.hpp"
#include "ris/surface_profiles.hpp"

namespace ris {

/// Threshold applied to the electrically-large condition value.
inline constexpr double kElectricallyLargeThreshold = 10.0;
/// Distance ratio used for the amplitude-only (focusing) regime test.
inline constexpr double kFocusingRegimeRatio = 10.0;

struct Hessian {
    double pxx = 0.0;
    double pxy = 0.0;
    double pyy = 0.0;
    double det = 0.0;
    int signature = 0;
};

struct StationaryPoint {
    double x_s = 0.0;
    double y_s = 0.0;
    bool inside_surface = false;
    Hessian hessian;
};

struct Gradient2 {
    double px = 0.0;
    double py = 0.0;
};

inline Gradient2 phase_gradient(const LinkGeometry& g, double alpha, double beta, double x, double y) {
    const auto d = distances(g, {x, y});
    return {(x - g.tx.x) / d.d_tx + (x - g.rx.x) / d.d_rx - alpha,
            (y - g.tx.y) / d.d_tx + (y - g.rx.y) / d.d_rx - beta};
}

/// Analytic second derivatives of P. The affine part does not contribute.
inline Hessian hessian_at(const LinkGeometry& g, double /*alpha*/, double /*beta*/, double x, double y) {
    const auto d = distances(g, {x, y});
    const double xt = x - g.tx.x, yt = y - g.tx.y, xr = x - g.rx.x, yr = y - g.rx.y;
    const double t3 = d.d_tx * d.d_tx * d.d_tx, r3 = d.d_rx * d.d_rx * d.d_rx;
    Hessian h;
    h.pxx = 1.0 / d.d_tx - xt * xt / t3 + 1.0 / d.d_rx - xr * xr / r3;
    h.pyy = 1.0 / d.d_tx - yt * yt / t3 + 1.0 / d.d_rx - yr * yr / r3;
    h.pxy = -xt * yt / t3 - xr * yr / r3;
    h.det = h.pxx * h.pyy - h.pxy * h.pxy;
    const double tr = h.pxx + h.pyy;
    if (h.det > 0.0)
        h.signature = tr > 0.0 ? 2 : -2;
    else
        h.signature = 0;
    return h;
}

namespace detail {

inline bool in_box(double x, double y, double bx, double by) { return std::abs(x) <= bx && std::abs(y) <= by; }

/// Root of f on [lo, hi] for increasing f; nullopt when no sign change.
template <class F>
std::optional<double> bisect_increasing(F&& f, double lo, double hi) {
    double flo = f(lo), fhi = f(hi);
    if (flo > 0.0 || fhi < 0.0) return std::nullopt;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo) + std::abs(hi)); ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Solves grad P = 0 by damped Newton, falling back to alternating per-axis
/// bisection (P is strictly convex). The search box is 1.05x the surface;
/// a solution is returned only if it lies in the closed surface rectangle.
inline std::optional<StationaryPoint> find_stationary_point(const LinkGeometry& g, double alpha, double beta) {
    if (!(std::abs(alpha) < 2.0) || !(std::abs(beta) < 2.0)) return std::nullopt;
    const double bx = 1.05 * g.surface.half_len_x, by = 1.05 * g.surface.half_len_y;
    const double zt = std::abs(g.tx.z), zr = std::abs(g.rx.z);
    if (!(zt > 0.0) || !(zr > 0.0)) return std::nullopt;
    // Straight-line crossing of the surface plane; exact for the specular case.
    const double w = zt / (zt + zr);
    double x = g.tx.x + w * (g.rx.x - g.tx.x);
    double y = g.tx.y + w * (g.rx.y - g.tx.y);
    x = std::clamp(x, -bx, bx);
    y = std::clamp(y, -by, by);

    auto res_norm = [&](double u, double v) {
        const auto gr = phase_gradient(g, alpha, beta, u, v);
        return std::hypot(gr.px, gr.py);
    };

    bool converged = false;
    double r = res_norm(x, y);
    for (int it = 0; it < 50; ++it) {
        const auto gr = phase_gradient(g, alpha, beta, x, y);
        const auto h = hessian_at(g, alpha, beta, x, y);
        if (!(h.det > 0.0)) break;
        double sx = -(h.pyy * gr.px - h.pxy * gr.py) / h.det;
        double sy = -(-h.pxy * gr.px + h.pxx * gr.py) / h.det;
        double t = 1.0;
        double nx = x + sx, ny = y + sy, nr = res_norm(nx, ny);
        while (!(nr < r) && t > 1e-6) {
            t *= 0.5;
            nx = x + t * sx;
            ny = y + t * sy;
            nr = res_norm(nx, ny);
        }
        if (!std::isfinite(nr) || !(nr <= r)) break;
        const double step = std::hypot(nx - x, ny - y);
        x = nx;
        y = ny;
        r = nr;
        if (step < 1e-12 || r < 1e-14) {
            converged = true;
            break;
        }
        if (std::abs(x) > 1e3 * bx + 1e3 || std::abs(y) > 1e3 * by + 1e3) break;
    }
    if (!converged || !detail::in_box(x, y, bx, by) || r > 1e-10) {
        // Alternating coordinate bisection inside the enlarged box.
        x = std::clamp(g.tx.x + w * (g.rx.x - g.tx.x), -bx, bx);
        y = std::clamp(g.tx.y + w * (g.rx.y - g.tx.y), -by, by);
        bool ok = true;
        for (int sweep = 0; sweep < 200 && ok; ++sweep) {
            const double px0 = x, py0 = y;
            const auto rx = detail::bisect_increasing(
                [&](double u) { return phase_gradient(g, alpha, beta, u, y).px; }, -bx, bx);
            if (!rx) { ok = false; break; }
            x = *rx;
            const auto ry = detail::bisect_increasing(
                [&](double v) { return phase_gradient(g, alpha, beta, x, v).py; }, -by, by);
            if (!ry) { ok = false; break; }
            y = *ry;
            if (std::hypot(x - px0, y - py0) < 1e-13) break;
        }
        if (!ok) return std::nullopt;
        // Polish with a few undamped Newton steps.
        for (int it = 0; it < 5; ++it) {
            const auto gr = phase_gradient(g, alpha, beta, x, y);
            const auto h = hessian_at(g, alpha, beta, x, y);
            if (!(h.det > 0.0)) break;
            x -= (h.pyy * gr.px - h.pxy * gr.py) / h.det;
            y -= (-h.pxy * gr.px + h.pxx * gr.py) / h.det;
        }
        if (res_norm(x, y) > 1e-10) return std::nullopt;
    }
    if (!g.surface.contains(x, y)) return std::nullopt;
    StationaryPoint sp;
    sp.x_s = x;
    sp.y_s = y;
    sp.inside_surface = true;
    sp.hessian = hessian_at(g, alpha, beta, x, y);
    return sp;
}

/// Type-1 integrand description: A1(d_tx, d_rx) B1(x, y) e^{-jk(d_tx + d_rx - C)}.
struct Type1 {
    AmplitudeFn a1;
    SurfaceFn b1;
    SurfaceFn c;
    LinkGeometry geom;
    double k = 0.0;
};

inline std::vector<StationaryPoint> stationary_points(const Type1& t) {
    const auto aff = require_affine(t.c, t.geom.surface);
    std::vector<StationaryPoint> out;
    if (auto sp = find_stationary_point(t.geom, aff.cx, aff.cy)) out.push_back(*sp);
    return out;
}

/// (2 pi / k) sum A1 B1 |det|^{-1/2} exp(-jkP - j pi sign / 4) over the given points.
inline Complex spm_value(const Type1& t, const std::vector<StationaryPoint>& points) {
    if (points.empty()) throw contract_error("no stationary point inside the surface; use boundary_value");
    Complex sum;
    for (const auto& sp : points) {
        if (sp.hessian.det == 0.0) throw contract_error("degenerate Hessian at the stationary point");
        const auto d = distances(t.geom, {sp.x_s, sp.y_s});
        const double p = d.d_tx + d.d_rx - t.c(sp.x_s, sp.y_s);
        const double amp = t.a1(d.d_tx, d.d_rx) * t.b1(sp.x_s, sp.y_s) / std::sqrt(std::abs(sp.hessian.det));
        sum += std::polar(amp, -t.k * p - kPi * sp.hessian.signature / 4.0);
    }
    return (kTwoPi / t.k) * sum;
}

/// Signed corner rule g(Lx,Ly) - g(-Lx,Ly) - g(Lx,-Ly) + g(-Lx,-Ly).
template <class T, class G>
T corner_sum(const SurfaceSpec& s, G&& g) {
    const double lx = s.half_len_x, ly = s.half_len_y;
    return g(lx, ly) - g(-lx, ly) - g(lx, -ly) + g(-lx, -ly);
}

/// Corner approximation for integrals with no interior stationary point.
inline Complex boundary_value(const Type1& t) {
    const auto aff = require_affine(t.c, t.geom.surface);
    if (find_stationary_point(t.geom, aff.cx, aff.cy))
        throw contract_error("stationary point inside the surface; use spm_value");
    const Complex inv_jk2 = 1.0 / (Complex(0.0, -t.k) * Complex(0.0, -t.k));
    return inv_jk2 * corner_sum<Complex>(t.geom.surface, [&](double x, double y) {
               const auto gr = phase_gradient(t.geom, aff.cx, aff.cy, x, y);
               if (std::abs(gr.px) < 1e-12 || std::abs(gr.py) < 1e-12)
                   throw contract_error("degenerate corner: P_x or P_y vanishes");
               const auto d = distances(t.geom, {x, y});
               const double p = d.d_tx + d.d_rx - t.c(x, y);
               return std::polar(t.a1(d.d_tx, d.d_rx) * t.b1(x, y) / (gr.px * gr.py), -t.k * p);
           });
}

enum class ClosedForm {
    Small,       // far-field sinc / product law about the surface center
    Large,       // sum-distance law; weighted form for anomalous profiles
    LargeExact,  // stationary-phase square-root form for anomalous profiles
};

/// sin(u) / u
inline double sinc(double u) {
    if (std::abs(u) < 1e-4) return 1.0 - u * u / 6.0;
    return std::sin(u) / u;
}

struct CenterTerms {
    double d_tx0 = 0.0;
    double d_rx0 = 0.0;
    double cos_inc0 = 0.0;
    double cos_rec0 = 0.0;
    double dx = 0.0;  // sin(theta_inc0) cos(phi_inc0) + sin(theta_rec0) cos(phi_rec0)
    double dy = 0.0;
};

inline CenterTerms center_terms(const LinkGeometry& g) {
    CenterTerms c;
    c.d_tx0 = norm(g.tx);
    c.d_rx0 = norm(g.rx);
    c.cos_inc0 = g.tx.z / c.d_tx0;
    c.cos_rec0 = std::abs(g.rx.z) / c.d_rx0;
    c.dx = g.tx.x / c.d_tx0 + g.rx.x / c.d_rx0;
    c.dy = g.tx.y / c.d_tx0 + g.rx.y / c.d_rx0;
    return c;
}

/// R1, R2, R3 weights of the square-root distance law at a stationary point.
struct DistanceWeights {
    double r1 = 0.0;
    double r2 = 0.0;
    double r3 = 0.0;
    double k1 = 0.0;  // equal-reference-distance linearization
    double k2 = 0.0;
};

inline DistanceWeights distance_weights(const LinkGeometry& g, double x_s, double y_s) {
    const auto a = angles(g, {x_s, y_s});
    const double ci = std::cos(a.theta_inc), cr = std::cos(a.theta_rec);
    const double si = std::sin(a.theta_inc), sr = std::sin(a.theta_rec);
    const double sd = std::sin(a.phi_inc_az - a.phi_rec_az);
    const double den = (ci + cr) * (ci + cr);
    DistanceWeights w;
    w.r1 = cr * cr / den;
    w.r2 = ci * ci / den;
    w.r3 = (ci * ci + cr * cr + si * si * sr * sr * sd * sd) / den;
    const double root = std::sqrt(w.r1 + w.r2 + w.r3);
    w.k1 = (w.r1 + 0.5 * w.r3) / root;
    w.k2 = (w.r2 + 0.5 * w.r3) / root;
    return w;
}

namespace detail {

inline double profile_phase_sum(const Link& l) { return l.profile.phi0() + l.profile.pol_out.phase + l.rec_pol.phase; }

inline double omega_at(const Link& l, double x, double y) {
    const Vec3 s_hat = propagation_unit_vector(l.geom, {x, y});
    return omega_pattern(s_hat, l.profile.pol_out, l.rec_pol, l.source.moment, l.carrier.k(), l.carrier.eps0,
                         l.profile.efficiency);
}

/// jk Omega(0,0) (cos_i0 + cos_r0) / (16 pi^2 d_tx0 d_rx0)
inline Complex small_prefactor(const Link& l, const CenterTerms& c) {
    const double k = l.carrier.k();
    return Complex(0.0, k) * omega_at(l, 0.0, 0.0) * (c.cos_inc0 + c.cos_rec0) / (16.0 * kPi * kPi * c.d_tx0 * c.d_rx0);
}

/// int_S |Gamma| e^{jk(u x + v y)} dx dy
inline Complex aperture_integral(const Link& l, double u, double v, const QuadratureSpec& q) {
    const SurfaceSpec& s = l.geom.surface;
    const double k = l.carrier.k();
    if (l.profile.has_constant_magnitude())
        return l.profile.magnitude * 4.0 * s.half_len_x * s.half_len_y * sinc(k * s.half_len_x * u) *
               sinc(k * s.half_len_y * v);
    const Grid grid = plan_grid(s, l.carrier.lambda(), std::abs(u), std::abs(v), q);
    return integrate_grid<Complex>(
        grid, [&](double x, double y) { return std::polar(l.profile.magnitude_at(x, y), k * (u * x + v * y)); },
        q.threads);
}

}  // namespace detail

/// Closed-form surface term F for the profile in the requested regime.
inline Complex closed_form_scattered(const Link& l, ClosedForm regime, const QuadratureSpec& q = {}) {
    l.validate();
    const double k = l.carrier.k();
    const double phases = detail::profile_phase_sum(l);
    const LinkGeometry& g = l.geom;

    if (regime == ClosedForm::Small) {
        const CenterTerms c = center_terms(g);
        const Complex pre = detail::small_prefactor(l, c);
        if (is_focusing(l.profile)) {
            const double area_mag = l.profile.has_constant_magnitude()
                                        ? l.profile.magnitude * g.surface.area()
                                        : std::real(detail::aperture_integral(l, 0.0, 0.0, q));
            return pre * area_mag * std::polar(1.0, phases);
        }
        const auto grad = linear_gradient(l.profile);
        return pre * std::polar(1.0, -k * (c.d_tx0 + c.d_rx0) + phases) *
               detail::aperture_integral(l, grad.alpha + c.dx, grad.beta + c.dy, q);
    }

    if (is_focusing(l.profile))
        throw contract_error(
            "no electrically-large closed form for a focusing profile; use bound or quadrature");
    const auto grad = linear_gradient(l.profile);
    const auto sp = find_stationary_point(g, grad.alpha, grad.beta);
    if (!sp) throw contract_error("no stationary point inside the surface; use quadrature");
    const auto d = distances(g, {sp->x_s, sp->y_s});
    const double num = l.profile.magnitude_at(sp->x_s, sp->y_s) * detail::omega_at(l, sp->x_s, sp->y_s);
    const Complex phase =
        std::polar(1.0, -k * (d.d_tx + d.d_rx - (grad.alpha * sp->x_s + grad.beta * sp->y_s)) + phases);
    const bool specular = std::holds_alternative<Specular>(l.profile.phase_law);
    if (specular) return num / (4.0 * kPi * (d.d_tx + d.d_rx)) * phase;
    const auto w = distance_weights(g, sp->x_s, sp->y_s);
    if (regime == ClosedForm::LargeExact)
        return num /
               (8.0 * kPi * std::sqrt(w.r1 * d.d_tx * d.d_tx + w.r2 * d.d_rx * d.d_rx + w.r3 * d.d_tx * d.d_rx)) *
               phase;
    return num / (8.0 * kPi * (w.k1 * d.d_tx + w.k2 * d.d_rx)) * phase;
}

struct BoundResult {
    double value = 0.0;
    /// d_P1 <= d_P2 held at every probed surface point.
    bool dominance_holds = true;
    bool p1_is_tx = true;
};

/// arctan corner sum equal to |z| * int_S d_P^{-3} dx dy.
inline double arctan_corner_sum(const SurfaceSpec& s, const Point3& p) {
    const double az = std::abs(p.z);
    if (!(az > 0.0)) throw domain_error("endpoint lies on the surface plane");
    return corner_sum<double>(s, [&](double x, double y) {
        const double dx = p.x - x, dy = p.y - y;
        return std::atan(dx * dy / (az * std::sqrt(dx * dx + dy * dy + az * az)));
    });
}

/// Upper bound on |F| for a focusing profile with constant |Gamma|.
inline BoundResult focusing_bound(const Link& l) {
    l.validate();
    if (!is_focusing(l.profile)) throw contract_error("focusing_bound applies to focusing profiles only");
    if (!l.profile.has_constant_magnitude()) throw contract_error("focusing_bound needs a constant |Gamma|");
    const LinkGeometry& g = l.geom;
    const double k = l.carrier.k();
    BoundResult r;
    r.p1_is_tx = norm(g.tx) <= norm(g.rx);
    const Point3& p1 = r.p1_is_tx ? g.tx : g.rx;
    const Point3& p2 = r.p1_is_tx ? g.rx : g.tx;
    constexpr int kProbe = 33;
    for (int i = 0; i < kProbe && r.dominance_holds; ++i)
        for (int j = 0; j < kProbe; ++j) {
            const double x = -g.surface.half_len_x + 2.0 * g.surface.half_len_x * i / (kProbe - 1);
            const double y = -g.surface.half_len_y + 2.0 * g.surface.half_len_y * j / (kProbe - 1);
            const auto d = distances(g, {x, y});
            const double d1 = r.p1_is_tx ? d.d_tx : d.d_rx, d2 = r.p1_is_tx ? d.d_rx : d.d_tx;
            if (d1 > d2) {
                r.dominance_holds = false;
                break;
            }
        }
    const double c = 2.0 * k * k * k * l.source.moment * l.profile.magnitude * l.profile.efficiency /
                     (16.0 * kPi * kPi * l.carrier.eps0);
    r.value = c * (1.0 + std::abs(p2.z) / std::abs(p1.z)) * arctan_corner_sum(g.surface, p1);
    return r;
}

/// Limit of focusing_bound as the surface grows without bound.
inline double focusing_bound_limit(const Link& l) {
    const LinkGeometry& g = l.geom;
    const bool p1_is_tx = norm(g.tx) <= norm(g.rx);
    const double z1 = std::abs(p1_is_tx ? g.tx.z : g.rx.z), z2 = std::abs(p1_is_tx ? g.rx.z : g.tx.z);
    const double k = l.carrier.k();
    return (1.0 + z2 / z1) * 2.0 * k * k * k * l.source.moment * l.profile.magnitude * l.profile.efficiency /
           (8.0 * kPi * l.carrier.eps0);
}

struct RegimeReport {
    double r_es = 0.0;
    /// Distance below which the electrically-large condition holds; r_el / d_s = el_condition_value.
    double r_el = std::numeric_limits<double>::quiet_NaN();
    double d_tx0 = 0.0;
    double d_rx0 = 0.0;
    std::vector<StationaryPoint> stationary;
    bool electrically_small = false;
    bool electrically_large = false;
    double el_condition_value = std::numeric_limits<double>::quiet_NaN();
    /// Focusing profiles are classified by distance against the diagonal only.
    bool amplitude_only = false;
};

inline RegimeReport classify_regime(const LinkGeometry& g, const SurfaceProfile& p, double lambda) {
    RegimeReport r;
    const auto m = electrical_metrics(g.surface, lambda);
    r.r_es = m.r_es;
    r.d_tx0 = norm(g.tx);
    r.d_rx0 = norm(g.rx);
    if (is_focusing(p)) {
        r.amplitude_only = true;
        r.electrically_small = r.d_tx0 >= kFocusingRegimeRatio * m.diagonal && r.d_rx0 >= kFocusingRegimeRatio * m.diagonal;
        r.electrically_large =
            r.d_tx0 * kFocusingRegimeRatio <= m.diagonal && r.d_rx0 * kFocusingRegimeRatio <= m.diagonal;
        return r;
    }
    r.electrically_small = r.d_tx0 > r.r_es && r.d_rx0 > r.r_es;
    const auto grad = linear_gradient(p);
    if (auto sp = find_stationary_point(g, grad.alpha, grad.beta)) {
        r.stationary.push_back(*sp);
        const auto d = distances(g, {sp->x_s, sp->y_s});
        r.el_condition_value = r.r_es * (std::abs(g.tx.z) / (d.d_tx * d.d_tx) + std::abs(g.rx.z) / (d.d_rx * d.d_rx));
        const double d_s = std::max(d.d_tx, d.d_rx);
        r.r_el = r.el_condition_value * d_s;
        r.electrically_large = r.el_condition_value >= kElectricallyLargeThreshold;
    }
    return r;
}

}  // namespace ris
