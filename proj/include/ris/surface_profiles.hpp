#pragma once

// Local reflection / transmission coefficient Gamma(x, y) = |Gamma| e^{j angle}.

#include <cmath>
#include <functional>
#include <type_traits>
#include <variant>

#include "ris/em_core.hpp"
#include "ris/errors.hpp"
#include "ris/geometry.hpp"

namespace ris {

struct Specular {
    double phi0 = 0.0;
};

/// angle = k (alpha x + beta y) + phi0
struct Anomalous {
    double alpha = 0.0;
    double beta = 0.0;
    double phi0 = 0.0;
};

/// angle = k (d_tx(x, y) + d_rx(x, y)) + phi0
struct Focusing {
    double phi0 = 0.0;
};

using PhaseLaw = std::variant<Specular, Anomalous, Focusing>;

enum class SurfaceMode { Reflect, Transmit };

struct SurfaceProfile {
    double magnitude = 1.0;
    /// Optional per-point |Gamma|; overrides `magnitude` when set.
    std::function<double(double, double)> magnitude_map;
    PhaseLaw phase_law = Specular{};
    Polarization pol_out;
    double efficiency = 1.0;
    SurfaceMode mode = SurfaceMode::Reflect;

    bool has_constant_magnitude() const { return !magnitude_map; }

    double magnitude_at(double x, double y) const { return magnitude_map ? magnitude_map(x, y) : magnitude; }

    double phi0() const {
        return std::visit([](const auto& law) { return law.phi0; }, phase_law);
    }

    void validate() const {
        if (!(magnitude > 0.0) || magnitude > 1.0) throw domain_error("|Gamma| must lie in (0, 1]");
        if (!(efficiency >= 0.0) || efficiency > 1.0) throw domain_error("polarization efficiency must lie in [0, 1]");
        pol_out.validate();
        if (const auto* a = std::get_if<Anomalous>(&phase_law)) {
            if (std::abs(a->alpha) > 2.0 || std::abs(a->beta) > 2.0)
                throw domain_error("anomalous gradient coefficients must satisfy |alpha|, |beta| <= 2");
        }
        const double p0 = phi0();
        if (!(p0 >= 0.0) || p0 >= kTwoPi) throw domain_error("phi0 must lie in [0, 2pi)");
    }
};

inline bool is_focusing(const SurfaceProfile& p) { return std::holds_alternative<Focusing>(p.phase_law); }

/// Linear phase gradient (alpha, beta) of the profile; zero for specular.
/// Focusing has no linear gradient and is rejected.
struct Gradient {
    double alpha = 0.0;
    double beta = 0.0;
};

inline Gradient linear_gradient(const SurfaceProfile& p) {
    if (const auto* a = std::get_if<Anomalous>(&p.phase_law)) return {a->alpha, a->beta};
    if (is_focusing(p)) throw contract_error("focusing profile has no linear phase gradient");
    return {};
}

/// Unwrapped phase of Gamma at (x, y).
inline double gamma_phase(const SurfaceProfile& p, const LinkGeometry& g, double x, double y, double k) {
    return std::visit(
        [&](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Specular>) {
                return law.phi0;
            } else if constexpr (std::is_same_v<T, Anomalous>) {
                return k * (law.alpha * x + law.beta * y) + law.phi0;
            } else {
                const auto d = distances(g, {x, y});
                return k * (d.d_tx + d.d_rx) + law.phi0;
            }
        },
        p.phase_law);
}

inline Complex gamma(const SurfaceProfile& p, const LinkGeometry& g, double x, double y, double k) {
    return std::polar(p.magnitude_at(x, y), gamma_phase(p, g, x, y, k));
}

/// Geometry-free overload; only valid for phase laws that do not depend on the link.
inline Complex gamma(const SurfaceProfile& p, double x, double y, double k) {
    if (is_focusing(p)) throw config_error("profile.phase_law", "focusing phase law needs the link geometry");
    return gamma(p, LinkGeometry{}, x, y, k);
}

struct SteeringCoefficients {
    double alpha = 0.0;
    double beta = 0.0;
};

/// Gradient that moves the stationary point of the surface phase to the
/// center for the given incidence and desired exit directions.
inline SteeringCoefficients steering_coefficients(double theta_inc0, double phi_inc0_az, double theta_rec0,
                                                  double phi_rec0_az) {
    return {-(std::sin(theta_inc0) * std::cos(phi_inc0_az) + std::sin(theta_rec0) * std::cos(phi_rec0_az)),
            -(std::sin(theta_inc0) * std::sin(phi_inc0_az) + std::sin(theta_rec0) * std::sin(phi_rec0_az))};
}

}  // namespace ris
