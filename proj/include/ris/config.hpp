#pragma once

// Strict JSON run configuration. Every key is required, unknown keys are
// rejected, and every error carries the dotted key path.
//
// Angles are given as <name>_deg or <name>_rad, never bare.

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ris/asymptotics.hpp"
#include "ris/errors.hpp"
#include "ris/experiments.hpp"
#include "ris/field_integrals.hpp"

namespace ris {

struct RunConfig {
    Link link;
    QuadratureSpec quad;
    std::optional<ScanGrid> scan;
    bool scan_pgm = false;
};

namespace config_detail {

using json = nlohmann::json;

inline std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

class Object {
public:
    Object(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw config_error(path_.empty() ? "<root>" : path_, "expected an object");
    }

    const std::string& path() const { return path_; }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& at(const std::string& key) {
        used_.insert(key);
        if (!j_.contains(key)) throw config_error(join(path_, key), "missing");
        return j_.at(key);
    }

    double number(const std::string& key) {
        const json& v = at(key);
        if (!v.is_number()) throw config_error(join(path_, key), "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw config_error(join(path_, key), "must be finite");
        return d;
    }

    int integer(const std::string& key) {
        const json& v = at(key);
        if (!v.is_number_integer()) throw config_error(join(path_, key), "expected an integer");
        return v.get<int>();
    }

    bool boolean(const std::string& key) {
        const json& v = at(key);
        if (!v.is_boolean()) throw config_error(join(path_, key), "expected true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key) {
        const json& v = at(key);
        if (!v.is_string()) throw config_error(join(path_, key), "expected a string");
        return v.get<std::string>();
    }

    Object object(const std::string& key) { return Object(at(key), join(path_, key)); }

    /// Exactly one of `<name>_deg` / `<name>_rad`; returns radians.
    double angle(const std::string& name) {
        const bool deg = j_.contains(name + "_deg"), rad = j_.contains(name + "_rad");
        if (deg && rad) throw config_error(join(path_, name), "give only one of " + name + "_deg or " + name + "_rad");
        if (deg) return number(name + "_deg") * kPi / 180.0;
        if (rad) return number(name + "_rad");
        throw config_error(join(path_, name), "missing (give " + name + "_deg or " + name + "_rad)");
    }

    Vec3 vec3(const std::string& key) {
        const json& v = at(key);
        if (!v.is_array() || v.size() != 3) throw config_error(join(path_, key), "expected a 3-element array");
        Vec3 r;
        double* out[3] = {&r.x, &r.y, &r.z};
        for (std::size_t i = 0; i < 3; ++i) {
            if (!v[i].is_number()) throw config_error(join(path_, key), "expected numbers");
            *out[i] = v[i].get<double>();
        }
        return r;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) throw config_error(join(path_, it.key()), "unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

inline Polarization parse_polarization(Object o) {
    Polarization p;
    const Vec3 d = o.vec3("direction");
    const double n = norm(d);
    if (!(n > 0.0) || !std::isfinite(n)) throw config_error(join(o.path(), "direction"), "must be a nonzero vector");
    p.direction = d * (1.0 / n);
    p.phase = o.angle("phase");
    o.finish();
    return p;
}

/// Either {"x","y","z"} or {"distance", "theta_<tag>_*", "phi_<tag>_*"}.
inline Point3 parse_position(Object o, const std::string& tag, Side side) {
    Point3 p;
    if (o.has("x") || o.has("y") || o.has("z")) {
        p = {o.number("x"), o.number("y"), o.number("z")};
    } else {
        const double d = o.number("distance");
        if (!(d > 0.0)) throw config_error(join(o.path(), "distance"), "must be > 0");
        const double th = o.angle("theta_" + tag), ph = o.angle("phi_" + tag);
        if (th < 0.0 || th >= kPi / 2.0) throw config_error(join(o.path(), "theta_" + tag), "must lie in [0, 90) deg");
        p = spherical_placement(d, th, ph, side);
    }
    o.finish();
    return p;
}

inline PhaseLaw parse_phase_law(Object o) {
    const std::string type = o.string("type");
    const double phi0 = o.angle("phi0");
    if (phi0 < 0.0 || phi0 >= kTwoPi) throw config_error(join(o.path(), "phi0"), "must lie in [0, 2pi)");
    PhaseLaw law;
    if (type == "specular") {
        law = Specular{phi0};
    } else if (type == "focusing") {
        law = Focusing{phi0};
    } else if (type == "anomalous") {
        const double a = o.number("alpha"), b = o.number("beta");
        if (std::abs(a) > 2.0) throw config_error(join(o.path(), "alpha"), "|alpha| must be <= 2");
        if (std::abs(b) > 2.0) throw config_error(join(o.path(), "beta"), "|beta| must be <= 2");
        law = Anomalous{a, b, phi0};
    } else if (type == "anomalous_steered") {
        const auto s = steering_coefficients(o.angle("theta_inc0"), o.angle("phi_inc0"), o.angle("theta_rec0"),
                                             o.angle("phi_rec0"));
        law = Anomalous{s.alpha, s.beta, phi0};
    } else {
        throw config_error(join(o.path(), "type"),
                           "expected specular, anomalous, anomalous_steered or focusing, got '" + type + "'");
    }
    o.finish();
    return law;
}

inline Axis parse_axis(Object o, bool angular) {
    Axis a;
    if (angular) {
        a.start = o.angle("start");
        a.stop = o.angle("stop");
    } else {
        a.start = o.number("start");
        a.stop = o.number("stop");
    }
    a.count = o.integer("count");
    a.log = o.boolean("log");
    o.finish();
    a.validate(o.path());
    return a;
}

inline ScanMode parse_mode(const std::string& s, const std::string& key) {
    if (s == "angular") return ScanMode::Angular;
    if (s == "distance") return ScanMode::Distance;
    if (s == "size") return ScanMode::Size;
    if (s == "discretization") return ScanMode::Discretization;
    throw config_error(key, "expected angular, distance, size or discretization, got '" + s + "'");
}

/// Runs a module-level validator and re-throws with a key path attached.
template <class F>
void checked(const std::string& key, F&& f) {
    try {
        f();
    } catch (const domain_error& e) {
        throw config_error(key, e.what());
    }
}

}  // namespace config_detail

inline RunConfig parse_config_json(const nlohmann::json& root) {
    using config_detail::join;
    using config_detail::Object;
    RunConfig cfg;
    Link& l = cfg.link;
    Object top(root, "");

    {
        Object c = top.object("carrier");
        l.carrier.freq = c.number("freq_hz");
        l.carrier.eps0 = c.number("eps0");
        l.carrier.mu0 = c.number("mu0");
        c.finish();
        if (!(l.carrier.freq > 0.0)) throw config_error("carrier.freq_hz", "must be > 0");
        if (!(l.carrier.eps0 > 0.0)) throw config_error("carrier.eps0", "must be > 0");
        if (!(l.carrier.mu0 > 0.0)) throw config_error("carrier.mu0", "must be > 0");
    }

    {
        Object s = top.object("source");
        const auto& pdm = s.at("p_dm");
        if (pdm.is_string()) {
            if (pdm.get<std::string>() != "normalized")
                throw config_error("source.p_dm", "expected a number or \"normalized\"");
            l.source.moment = normalized_dipole_moment(l.carrier);
        } else if (pdm.is_number()) {
            l.source.moment = pdm.get<double>();
            if (!(l.source.moment > 0.0)) throw config_error("source.p_dm", "must be > 0");
        } else {
            throw config_error("source.p_dm", "expected a number or \"normalized\"");
        }
        l.source.polarization = config_detail::parse_polarization(s.object("polarization"));
        s.finish();
    }

    {
        Object g = top.object("geometry");
        l.geom.surface.half_len_x = g.number("half_len_x");
        l.geom.surface.half_len_y = g.number("half_len_y");
        if (!(l.geom.surface.half_len_x > 0.0)) throw config_error("geometry.half_len_x", "must be > 0");
        if (!(l.geom.surface.half_len_y > 0.0)) throw config_error("geometry.half_len_y", "must be > 0");
        const std::string side = g.string("side");
        if (side == "reflection") {
            l.geom.side = Side::Reflection;
        } else if (side == "transmission") {
            l.geom.side = Side::Transmission;
        } else {
            throw config_error("geometry.side", "expected reflection or transmission, got '" + side + "'");
        }
        l.geom.tx = config_detail::parse_position(g.object("tx"), "inc", Side::Reflection);
        l.geom.rx = config_detail::parse_position(g.object("rx"), "rec", l.geom.side);
        g.finish();
        if (!(l.geom.tx.z > 0.0)) throw config_error("geometry.tx", "Tx must lie above the surface (z > 0)");
        if (l.geom.side == Side::Reflection && !(l.geom.rx.z > 0.0))
            throw config_error("geometry.side",
                               "side consistency: reflection needs Tx and Rx on the same side of the surface (rx.z > 0)");
        if (l.geom.side == Side::Transmission && !(l.geom.rx.z < 0.0))
            throw config_error("geometry.side",
                               "side consistency: transmission needs Tx and Rx on opposite sides of the surface (rx.z < 0)");
        l.source.position = l.geom.tx;
    }

    {
        Object p = top.object("profile");
        const std::string mode = p.string("mode");
        if (mode == "reflect") {
            l.profile.mode = SurfaceMode::Reflect;
        } else if (mode == "transmit") {
            l.profile.mode = SurfaceMode::Transmit;
        } else {
            throw config_error("profile.mode", "expected reflect or transmit, got '" + mode + "'");
        }
        l.profile.magnitude = p.number("magnitude");
        if (!(l.profile.magnitude > 0.0) || l.profile.magnitude > 1.0)
            throw config_error("profile.magnitude", "must lie in (0, 1]");
        l.profile.efficiency = p.number("efficiency");
        if (!(l.profile.efficiency >= 0.0) || l.profile.efficiency > 1.0)
            throw config_error("profile.efficiency", "must lie in [0, 1]");
        l.profile.phase_law = config_detail::parse_phase_law(p.object("phase_law"));
        l.profile.pol_out = config_detail::parse_polarization(p.object("polarization"));
        p.finish();
        const bool reflect = l.profile.mode == SurfaceMode::Reflect;
        if (reflect != (l.geom.side == Side::Reflection))
            throw config_error("profile.mode", "must match geometry.side (reflect with reflection, transmit with transmission)");
    }

    {
        Object r = top.object("receive");
        l.rec_pol = config_detail::parse_polarization(r.object("polarization"));
        r.finish();
    }

    {
        Object q = top.object("quadrature");
        cfg.quad.samples_per_wavelength = q.number("samples_per_wavelength");
        cfg.quad.min_per_axis = q.integer("min_per_axis");
        cfg.quad.budget = q.number("budget");
        q.finish();
        if (!(cfg.quad.samples_per_wavelength >= 2.0))
            throw config_error("quadrature.samples_per_wavelength", "must be >= 2");
        if (cfg.quad.min_per_axis < 1) throw config_error("quadrature.min_per_axis", "must be >= 1");
        if (!(cfg.quad.budget > 0.0)) throw config_error("quadrature.budget", "must be > 0");
    }

    {
        const auto& sj = top.at("scan");
        if (!sj.is_null()) {
            Object s(sj, "scan");
            ScanGrid grid;
            grid.mode = config_detail::parse_mode(s.string("mode"), "scan.mode");
            grid.axis0 = config_detail::parse_axis(s.object("axis0"), grid.two_d());
            const auto& a1 = s.at("axis1");
            if (grid.two_d()) {
                if (a1.is_null()) throw config_error("scan.axis1", "angular scans need a phi axis");
                grid.axis1 = config_detail::parse_axis(Object(a1, "scan.axis1"), true);
            } else if (!a1.is_null()) {
                throw config_error("scan.axis1", "must be null for 1-D sweeps");
            }
            const auto& ms = s.at("methods");
            if (!ms.is_array() || ms.empty()) throw config_error("scan.methods", "expected a non-empty array");
            grid.methods.clear();
            for (const auto& m : ms) {
                if (!m.is_string()) throw config_error("scan.methods", "expected method names");
                grid.methods.push_back(parse_method(m.get<std::string>(), l.carrier.lambda()));
            }
            grid.threads = s.integer("threads");
            cfg.scan_pgm = s.boolean("pgm");
            s.finish();
            grid.quad = cfg.quad;
            config_detail::checked("scan", [&] { grid.validate(); });
            cfg.scan = grid;
        }
    }
    top.finish();

    config_detail::checked("carrier", [&] { l.carrier.validate(); });
    config_detail::checked("geometry", [&] { l.geom.validate(); });
    config_detail::checked("profile", [&] { l.profile.validate(); });
    return cfg;
}

inline RunConfig parse_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error("<root>", std::string("'") + path + "': " + e.what());
    }
    return parse_config_json(j);
}

/// Human-readable regime summary followed by a JSON block that
/// parse_regime_block reads back.
inline constexpr const char* kRegimeBlockMarker = "--- regime (json) ---";

inline nlohmann::json regime_to_json(const RegimeReport& r) {
    auto num = [](double v) -> nlohmann::json { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    nlohmann::json j;
    j["r_es"] = num(r.r_es);
    j["r_el"] = num(r.r_el);
    j["d_tx0"] = num(r.d_tx0);
    j["d_rx0"] = num(r.d_rx0);
    j["electrically_small"] = r.electrically_small;
    j["electrically_large"] = r.electrically_large;
    j["el_condition_value"] = num(r.el_condition_value);
    j["amplitude_only"] = r.amplitude_only;
    j["stationary"] = nlohmann::json::array();
    for (const auto& sp : r.stationary)
        j["stationary"].push_back({{"x_s", sp.x_s},
                                   {"y_s", sp.y_s},
                                   {"inside_surface", sp.inside_surface},
                                   {"det", sp.hessian.det},
                                   {"signature", sp.hessian.signature},
                                   {"pxx", sp.hessian.pxx},
                                   {"pxy", sp.hessian.pxy},
                                   {"pyy", sp.hessian.pyy}});
    return j;
}

inline std::string render_regime(const RegimeReport& r) {
    std::ostringstream o;
    char buf[256];
    std::snprintf(buf, sizeof buf, "r_ES = %.4g m\nd_tx0 = %.6g m, d_rx0 = %.6g m\n", r.r_es, r.d_tx0, r.d_rx0);
    o << buf;
    if (r.amplitude_only) {
        o << "focusing profile: classified by distance against the surface diagonal\n";
    } else if (r.stationary.empty()) {
        o << "stationary point: none inside the surface\n";
    } else {
        const auto& sp = r.stationary.front();
        std::snprintf(buf, sizeof buf, "stationary point: (%.6g, %.6g) m, det = %.6g, signature = %d\n", sp.x_s, sp.y_s,
                      sp.hessian.det, sp.hessian.signature);
        o << buf;
        std::snprintf(buf, sizeof buf, "r_EL = %.4g m\n", r.r_el);
        o << buf;
    }
    if (r.electrically_small) {
        std::snprintf(buf, sizeof buf, "electrically-small: yes (r_ES ≈ %.1f m)\n", r.r_es);
    } else {
        std::snprintf(buf, sizeof buf, "electrically-small: no (r_ES ≈ %.1f m)\n", r.r_es);
    }
    o << buf;
    if (r.amplitude_only) {
        o << "electrically-large: " << (r.electrically_large ? "yes" : "no") << "\n";
    } else if (std::isfinite(r.el_condition_value)) {
        std::snprintf(buf, sizeof buf, "electrically-large: %s (condition ≈ %.0f %s %g)\n",
                      r.electrically_large ? "yes" : "no", r.el_condition_value,
                      r.electrically_large ? "≥" : "<", kElectricallyLargeThreshold);
        o << buf;
    } else {
        o << "electrically-large: no (no stationary point)\n";
    }
    o << kRegimeBlockMarker << "\n" << regime_to_json(r).dump(2) << "\n";
    return o.str();
}

inline RegimeReport parse_regime_block(const std::string& text) {
    const auto pos = text.find(kRegimeBlockMarker);
    if (pos == std::string::npos) throw std::runtime_error("regime block marker not found");
    const auto j = nlohmann::json::parse(text.substr(pos + std::char_traits<char>::length(kRegimeBlockMarker)));
    auto num = [](const nlohmann::json& v) {
        return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
    };
    RegimeReport r;
    r.r_es = num(j.at("r_es"));
    r.r_el = num(j.at("r_el"));
    r.d_tx0 = num(j.at("d_tx0"));
    r.d_rx0 = num(j.at("d_rx0"));
    r.electrically_small = j.at("electrically_small").get<bool>();
    r.electrically_large = j.at("electrically_large").get<bool>();
    r.el_condition_value = num(j.at("el_condition_value"));
    r.amplitude_only = j.at("amplitude_only").get<bool>();
    for (const auto& s : j.at("stationary")) {
        StationaryPoint sp;
        sp.x_s = s.at("x_s").get<double>();
        sp.y_s = s.at("y_s").get<double>();
        sp.inside_surface = s.at("inside_surface").get<bool>();
        sp.hessian.det = s.at("det").get<double>();
        sp.hessian.signature = s.at("signature").get<int>();
        sp.hessian.pxx = s.at("pxx").get<double>();
        sp.hessian.pxy = s.at("pxy").get<double>();
        sp.hessian.pyy = s.at("pyy").get<double>();
        r.stationary.push_back(sp);
    }
    return r;
}

}  // namespace ris
