#pragma once

// Carrier constants, the free-space Green's function and the far-zone dipole
// field. Time convention is e^{+j omega t}, so outgoing waves carry e^{-jkr}.

#include <cmath>
#include <complex>
#include <numbers>

#include "ris/errors.hpp"
#include "ris/geometry.hpp"

namespace ris {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Default permittivity matches the reference simulation setup (8.85e-12 F/m).
inline constexpr double kDefaultEps0 = 8.85e-12;
inline constexpr double kDefaultMu0 = 4.0e-7 * std::numbers::pi;

/// Evaluation below this k*d is tagged out-of-validity for the far-zone dipole.
inline constexpr double kDipoleValidityKd = 10.0;

struct Carrier {
    double freq = 28e9;
    double eps0 = kDefaultEps0;
    double mu0 = kDefaultMu0;

    double c() const { return 1.0 / std::sqrt(eps0 * mu0); }
    double lambda() const { return c() / freq; }
    double k() const { return kTwoPi / lambda(); }
    double omega() const { return kTwoPi * freq; }

    void validate() const {
        if (!(freq > 0.0) || !std::isfinite(freq)) throw domain_error("carrier frequency must be > 0");
        if (!(eps0 > 0.0) || !(mu0 > 0.0)) throw domain_error("eps0 and mu0 must be > 0");
    }
};

/// Real unit direction plus a common phase applied to all three components.
struct Polarization {
    Vec3 direction{0.0, 1.0, 0.0};
    double phase = 0.0;

    void validate() const {
        if (std::abs(norm(direction) - 1.0) > 1e-12) throw domain_error("polarization direction must be unit-norm");
    }
};

struct DipoleSource {
    double moment = 1.0;  // p_dm, A*s*m
    Polarization polarization;
    Point3 position;

    void validate() const {
        if (!(moment > 0.0)) throw domain_error("dipole moment must be > 0");
        polarization.validate();
    }
};

/// Dipole moment that makes k^2 p_dm / eps0 = 1.
inline double normalized_dipole_moment(const Carrier& c) { return c.eps0 / (c.k() * c.k()); }

struct CVec3 {
    Complex x, y, z;
};

inline Complex dot(const CVec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

/// G(r1, r2) = exp(-jk|r1 - r2|) / (4 pi |r1 - r2|).
inline Complex green(const Point3& r1, const Point3& r2, double k) {
    const double r = norm(r1 - r2);
    if (!(r > 0.0)) throw domain_error("Green's function evaluated at coincident points");
    return std::polar(1.0 / (4.0 * kPi * r), -k * r);
}

/// d/dz of G(r, source) with respect to the z coordinate of r.
inline Complex green_dz(const Point3& r, const Point3& source, double k) {
    const Vec3 d = r - source;
    const double dist = norm(d);
    if (!(dist > 0.0)) throw domain_error("Green's function evaluated at coincident points");
    return green(r, source, k) * Complex(-1.0 / dist, -k) * (d.z / dist);
}

struct IncidentField {
    CVec3 e;
    bool in_validity = true;  // k*d >= kDipoleValidityKd
};

/// Far-zone field of a short electric dipole:
/// E = (k^2 p_dm / eps0) (p - (r.p) r) e^{j phase} G(at, source).
inline IncidentField incident_dipole_field(const DipoleSource& src, const Point3& at, const Carrier& carrier) {
    const Vec3 d = at - src.position;
    const double dist = norm(d);
    if (!(dist > 0.0)) throw domain_error("observation point coincides with the dipole");
    const double k = carrier.k();
    const Vec3 r = d * (1.0 / dist);
    const Vec3& p = src.polarization.direction;
    const Vec3 transverse = p - r * dot(r, p);
    const Complex scale = (k * k * src.moment / carrier.eps0) * std::polar(1.0, src.polarization.phase) * green(at, src.position, k);
    return {{scale * transverse.x, scale * transverse.y, scale * transverse.z}, k * dist >= kDipoleValidityKd};
}

/// Projection onto the receive polarization (plain, non-conjugated product).
inline Complex project(const CVec3& e, const Polarization& rec) {
    return dot(e, rec.direction) * std::polar(1.0, rec.phase);
}

/// Angular pattern shared by the surface integrands:
/// (k^2 p_dm / eps0) (p_rec . p_out - (s . p_rec)(s . p_out)) * efficiency.
inline double omega_pattern(const Vec3& s_hat, const Polarization& pol_out, const Polarization& pol_rec, double p_dm,
                            double k, double eps0, double efficiency) {
    const Vec3& po = pol_out.direction;
    const Vec3& pr = pol_rec.direction;
    return (k * k * p_dm / eps0) * (dot(pr, po) - dot(s_hat, pr) * dot(s_hat, po)) * efficiency;
}

}  // namespace ris
