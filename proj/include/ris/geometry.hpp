#pragma once

// Scene geometry: a rectangular surface centered at the origin in the z = 0
// plane, a transmitter above it and a receiver on either side.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ris/errors.hpp"

namespace ris {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
    friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
    friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
    friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
    friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
    friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

using Point3 = Vec3;

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline bool is_finite(const Vec3& a) { return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z); }

inline Vec3 normalized(const Vec3& a) {
    const double n = norm(a);
    if (!(n > 0.0)) throw domain_error("cannot normalize a zero vector");
    return a * (1.0 / n);
}

/// A point on the surface plane.
struct SurfacePoint {
    double x = 0.0;
    double y = 0.0;
};

/// Rectangle |x| <= half_len_x, |y| <= half_len_y.
struct SurfaceSpec {
    double half_len_x = 0.5;
    double half_len_y = 0.5;

    double diagonal() const { return 2.0 * std::hypot(half_len_x, half_len_y); }
    double area() const { return 4.0 * half_len_x * half_len_y; }
    bool contains(double x, double y) const { return std::abs(x) <= half_len_x && std::abs(y) <= half_len_y; }

    void validate() const {
        if (!(half_len_x > 0.0) || !std::isfinite(half_len_x)) throw domain_error("surface half_len_x must be > 0");
        if (!(half_len_y > 0.0) || !std::isfinite(half_len_y)) throw domain_error("surface half_len_y must be > 0");
    }
};

enum class Side { Reflection, Transmission };

struct LinkGeometry {
    Point3 tx;
    Point3 rx;
    SurfaceSpec surface;
    Side side = Side::Reflection;

    void validate() const {
        surface.validate();
        if (!is_finite(tx) || !is_finite(rx)) throw domain_error("Tx/Rx coordinates must be finite");
        if (!(tx.z > 0.0)) throw domain_error("Tx must lie above the surface (tx.z > 0)");
        if (rx.z == 0.0) throw domain_error("Rx must not lie on the surface plane");
        if (side == Side::Reflection && !(rx.z > 0.0))
            throw domain_error("reflection requires Tx and Rx on the same side (rx.z > 0)");
        if (side == Side::Transmission && !(rx.z < 0.0))
            throw domain_error("transmission requires Tx and Rx on opposite sides (rx.z < 0)");
    }
};

/// Position at distance `d` from the surface center along polar angle `theta`
/// (measured from the surface normal on that side) and azimuth `phi`.
inline Point3 spherical_placement(double d, double theta, double phi, Side side_of_plane = Side::Reflection) {
    const double s = std::sin(theta);
    const double zsign = side_of_plane == Side::Reflection ? 1.0 : -1.0;
    return {d * s * std::cos(phi), d * s * std::sin(phi), zsign * d * std::cos(theta)};
}

struct Distances {
    double d_tx = 0.0;
    double d_rx = 0.0;
};

inline Distances distances(const LinkGeometry& g, SurfacePoint s) {
    const double dxt = s.x - g.tx.x, dyt = s.y - g.tx.y;
    const double dxr = g.rx.x - s.x, dyr = g.rx.y - s.y;
    return {std::sqrt(dxt * dxt + dyt * dyt + g.tx.z * g.tx.z), std::sqrt(dxr * dxr + dyr * dyr + g.rx.z * g.rx.z)};
}

/// Maps atan2 output into [0, 2pi). A zero horizontal offset gives 0.
inline double azimuth(double dx, double dy) {
    if (dx == 0.0 && dy == 0.0) return 0.0;
    double a = std::atan2(dy, dx);
    if (a < 0.0) a += 2.0 * std::numbers::pi;
    if (a >= 2.0 * std::numbers::pi) a = 0.0;
    return a;
}

struct AngleSet {
    double theta_inc = 0.0;
    double theta_rec = 0.0;
    double phi_inc_az = 0.0;
    double phi_rec_az = 0.0;
};

/// Incidence angles look from s toward Tx, observation angles from s toward Rx.
inline AngleSet angles(const LinkGeometry& g, SurfacePoint s) {
    const auto d = distances(g, s);
    AngleSet a;
    a.theta_inc = std::acos(std::min(1.0, g.tx.z / d.d_tx));
    a.theta_rec = std::acos(std::min(1.0, std::abs(g.rx.z) / d.d_rx));
    a.phi_inc_az = azimuth(g.tx.x - s.x, g.tx.y - s.y);
    a.phi_rec_az = azimuth(g.rx.x - s.x, g.rx.y - s.y);
    return a;
}

/// Unit vector pointing from Tx toward the surface point. This is the sign
/// convention used by every polarization projection in the library.
inline Vec3 propagation_unit_vector(const LinkGeometry& g, SurfacePoint s) {
    return normalized(Vec3{s.x, s.y, 0.0} - g.tx);
}

struct ElectricalMetrics {
    double diagonal = 0.0;
    double area = 0.0;
    double r_es = 0.0;
};

/// r_ES = 8 (Lx^2 + Ly^2) / lambda, the far-field distance of the surface
/// diagonal (2 D^2 / lambda).
inline ElectricalMetrics electrical_metrics(const SurfaceSpec& s, double lambda) {
    if (!(lambda > 0.0)) throw domain_error("wavelength must be > 0");
    return {s.diagonal(), s.area(), 8.0 * (s.half_len_x * s.half_len_x + s.half_len_y * s.half_len_y) / lambda};
}

}  // namespace ris
