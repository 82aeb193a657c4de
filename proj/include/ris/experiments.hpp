#pragma once

// Parameter sweeps over Rx direction, link distance and surface size, with
// CSV and PGM output.

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ris/asymptotics.hpp"
#include "ris/errors.hpp"
#include "ris/field_integrals.hpp"

namespace ris {

struct Method {
    enum class Kind { Quadrature, Discretized, ClosedSmall, ClosedLarge, Bound };
    Kind kind = Kind::Quadrature;
    double step = 0.0;  // Discretized only, metres

    std::string name() const {
        switch (kind) {
            case Kind::Quadrature: return "quadrature";
            case Kind::Discretized: {
                char buf[64];
                std::snprintf(buf, sizeof buf, "discretized:%.17g", step);
                return buf;
            }
            case Kind::ClosedSmall: return "closed-small";
            case Kind::ClosedLarge: return "closed-large";
            case Kind::Bound: return "bound";
        }
        return "?";
    }
};

/// "discretized:<step>" accepts a plain length in metres or a multiple of
/// the wavelength written as "<x>lambda".
inline Method parse_method(const std::string& s, double lambda) {
    if (s == "quadrature") return {Method::Kind::Quadrature};
    if (s == "closed-small") return {Method::Kind::ClosedSmall};
    if (s == "closed-large") return {Method::Kind::ClosedLarge};
    if (s == "bound") return {Method::Kind::Bound};
    const std::string prefix = "discretized:";
    if (s.rfind(prefix, 0) == 0) {
        std::string arg = s.substr(prefix.size());
        double scale = 1.0;
        const std::string suffix = "lambda";
        if (arg.size() > suffix.size() && arg.compare(arg.size() - suffix.size(), suffix.size(), suffix) == 0) {
            arg.resize(arg.size() - suffix.size());
            scale = lambda;
        }
        char* end = nullptr;
        const double v = std::strtod(arg.c_str(), &end);
        if (arg.empty() || end != arg.c_str() + arg.size() || !(v > 0.0))
            throw config_error("method", "bad discretization step '" + s + "'");
        return {Method::Kind::Discretized, v * scale};
    }
    throw config_error("method", "unknown method '" + s + "'");
}

/// Surface term for one method. Bound rows carry the bound as a real value.
inline Complex evaluate_method(const Link& l, const Method& m, const QuadratureSpec& q) {
    switch (m.kind) {
        case Method::Kind::Quadrature: return surface_field(l, q).scattered;
        case Method::Kind::Discretized: return discretized_field(l, m.step, q.threads).scattered;
        case Method::Kind::ClosedSmall: return closed_form_scattered(l, ClosedForm::Small, q);
        case Method::Kind::ClosedLarge: return closed_form_scattered(l, ClosedForm::Large, q);
        case Method::Kind::Bound: return focusing_bound(l).value;
    }
    return {};
}

struct Axis {
    double start = 0.0;
    double stop = 1.0;
    int count = 2;
    bool log = false;

    void validate(const std::string& key) const {
        if (count < 2) throw config_error(key + ".count", "must be >= 2");
        if (!(start < stop)) throw config_error(key, "start must be < stop");
        if (log && !(start > 0.0)) throw config_error(key + ".start", "log axis needs start > 0");
    }

    double value(int i) const {
        const double t = static_cast<double>(i) / (count - 1);
        if (log) return start * std::pow(stop / start, t);
        return start + (stop - start) * t;
    }
};

enum class ScanMode { Angular, Distance, Size, Discretization };

inline const char* mode_name(ScanMode m) {
    switch (m) {
        case ScanMode::Angular: return "angular";
        case ScanMode::Distance: return "distance";
        case ScanMode::Size: return "size";
        case ScanMode::Discretization: return "discretization";
    }
    return "?";
}

struct ScanGrid {
    ScanMode mode = ScanMode::Angular;
    Axis axis0;                  // theta_rec (rad), d0 (m) or diagonal D (m)
    std::optional<Axis> axis1;   // phi_rec (rad); 2-D modes only
    std::vector<Method> methods{Method{}};
    QuadratureSpec quad;
    int threads = 1;

    bool two_d() const { return mode == ScanMode::Angular || mode == ScanMode::Discretization; }

    void validate() const {
        axis0.validate("scan.axis0");
        if (two_d()) {
            if (!axis1) throw config_error("scan.axis1", "angular scans need a phi axis");
            axis1->validate("scan.axis1");
            if (axis0.start < 0.0 || axis0.stop >= kPi / 2.0)
                throw config_error("scan.axis0", "theta must lie in [0, pi/2)");
            if (axis1->start < 0.0 || axis1->stop >= kTwoPi) throw config_error("scan.axis1", "phi must lie in [0, 2pi)");
        } else if (!(axis0.start > 0.0)) {
            throw config_error("scan.axis0.start", "must be > 0");
        }
        if (methods.empty()) throw config_error("scan.methods", "at least one method is required");
        if (threads < 0) throw config_error("scan.threads", "must be >= 0");
    }
};

struct ScanRow {
    std::string mode;
    int idx0 = 0;
    int idx1 = -1;  // -1 for 1-D sweeps
    double axis0 = 0.0;
    double axis1 = std::numeric_limits<double>::quiet_NaN();
    std::string method;
    Complex value;
    bool elec_small = false;
    bool elec_large = false;
    double el_cond = std::numeric_limits<double>::quiet_NaN();
    double r_es = 0.0;
    double r_el = std::numeric_limits<double>::quiet_NaN();

    double abs() const { return std::abs(value); }
    double abs_db() const { return 20.0 * std::log10(std::abs(value)); }
};

namespace detail {

struct DirectionTemplate {
    double theta_inc = 0.0, phi_inc = 0.0, theta_rec = 0.0, phi_rec = 0.0;
};

inline DirectionTemplate directions_of(const LinkGeometry& g) {
    DirectionTemplate t;
    const double dt = norm(g.tx), dr = norm(g.rx);
    t.theta_inc = std::acos(std::clamp(g.tx.z / dt, -1.0, 1.0));
    t.phi_inc = azimuth(g.tx.x, g.tx.y);
    t.theta_rec = std::acos(std::clamp(std::abs(g.rx.z) / dr, -1.0, 1.0));
    t.phi_rec = azimuth(g.rx.x, g.rx.y);
    return t;
}

/// Fills `rows` (pre-sized, one slot per cell and method) using `threads`
/// workers. Cells are claimed in index order; output order is fixed by index.
template <class CellFn>
void run_cells(std::size_t cells, int threads, CellFn&& fn) {
    const int nt = std::max(1, std::min<int>(effective_threads(threads), static_cast<int>(std::max<std::size_t>(cells, 1))));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex m;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(m);
                if (!failure) failure = std::current_exception();
                next = cells;
                return;
            }
        }
    };
    if (nt == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
}

inline void fill_row(ScanRow& row, const Link& l, const Method& m, const QuadratureSpec& q) {
    const auto rep = classify_regime(l.geom, l.profile, l.carrier.lambda());
    row.method = m.name();
    row.elec_small = rep.electrically_small;
    row.elec_large = rep.electrically_large;
    row.el_cond = rep.el_condition_value;
    row.r_es = rep.r_es;
    row.r_el = rep.r_el;
    try {
        row.value = evaluate_method(l, m, q);
    } catch (const contract_error&) {
        // Method not applicable at this cell.
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.value = {nan, nan};
    }
}

}  // namespace detail

/// Rx swept over (theta_rec, phi_rec) at the template's Rx distance.
inline std::vector<ScanRow> angular_scan(const Link& tmpl, const ScanGrid& grid) {
    grid.validate();
    if (!grid.two_d()) throw config_error("scan.mode", "angular_scan needs an angular or discretization grid");
    const double d_rx = norm(tmpl.geom.rx);
    const int n0 = grid.axis0.count, n1 = grid.axis1->count;
    const std::size_t nm = grid.methods.size();
    std::vector<ScanRow> rows(static_cast<std::size_t>(n0) * n1 * nm);
    QuadratureSpec q = grid.quad;
    q.threads = 1;
    detail::run_cells(static_cast<std::size_t>(n0) * n1, grid.threads, [&](std::size_t cell) {
        const int i = static_cast<int>(cell / n1), j = static_cast<int>(cell % n1);
        Link l = tmpl;
        const double th = grid.axis0.value(i), ph = grid.axis1->value(j);
        l.geom.rx = spherical_placement(d_rx, th, ph, l.geom.side);
        for (std::size_t m = 0; m < nm; ++m) {
            ScanRow& row = rows[cell * nm + m];
            row.mode = mode_name(grid.mode);
            row.idx0 = i;
            row.idx1 = j;
            row.axis0 = th;
            row.axis1 = ph;
            detail::fill_row(row, l, grid.methods[m], q);
        }
    });
    return rows;
}

/// d_tx0 = d_rx0 = d0 swept with the template's directions seen from the center held fixed.
inline std::vector<ScanRow> distance_sweep(const Link& tmpl, const ScanGrid& grid) {
    grid.validate();
    const auto dir = detail::directions_of(tmpl.geom);
    const int n0 = grid.axis0.count;
    const std::size_t nm = grid.methods.size();
    std::vector<ScanRow> rows(static_cast<std::size_t>(n0) * nm);
    QuadratureSpec q = grid.quad;
    q.threads = 1;
    detail::run_cells(static_cast<std::size_t>(n0), grid.threads, [&](std::size_t cell) {
        const int i = static_cast<int>(cell);
        const double d0 = grid.axis0.value(i);
        Link l = tmpl;
        l.geom.tx = spherical_placement(d0, dir.theta_inc, dir.phi_inc, Side::Reflection);
        l.geom.rx = spherical_placement(d0, dir.theta_rec, dir.phi_rec, l.geom.side);
        for (std::size_t m = 0; m < nm; ++m) {
            ScanRow& row = rows[cell * nm + m];
            row.mode = mode_name(grid.mode);
            row.idx0 = i;
            row.axis0 = d0;
            detail::fill_row(row, l, grid.methods[m], q);
        }
    });
    return rows;
}

/// Surface diagonal D swept at fixed Tx/Rx; the Lx:Ly aspect ratio is kept.
inline std::vector<ScanRow> size_sweep(const Link& tmpl, const ScanGrid& grid) {
    grid.validate();
    const int n0 = grid.axis0.count;
    const std::size_t nm = grid.methods.size();
    const double base = tmpl.geom.surface.diagonal();
    std::vector<ScanRow> rows(static_cast<std::size_t>(n0) * nm);
    QuadratureSpec q = grid.quad;
    q.threads = 1;
    detail::run_cells(static_cast<std::size_t>(n0), grid.threads, [&](std::size_t cell) {
        const int i = static_cast<int>(cell);
        const double diag = grid.axis0.value(i);
        Link l = tmpl;
        l.geom.surface.half_len_x *= diag / base;
        l.geom.surface.half_len_y *= diag / base;
        for (std::size_t m = 0; m < nm; ++m) {
            ScanRow& row = rows[cell * nm + m];
            row.mode = mode_name(grid.mode);
            row.idx0 = i;
            row.axis0 = diag;
            detail::fill_row(row, l, grid.methods[m], q);
        }
    });
    return rows;
}

inline std::vector<ScanRow> run_scan(const Link& tmpl, const ScanGrid& grid) {
    switch (grid.mode) {
        case ScanMode::Angular:
        case ScanMode::Discretization: return angular_scan(tmpl, grid);
        case ScanMode::Distance: return distance_sweep(tmpl, grid);
        case ScanMode::Size: return size_sweep(tmpl, grid);
    }
    return {};
}

/// Index of the largest finite |value| among rows of `method`; nullopt if none.
inline std::optional<std::size_t> argmax(const std::vector<ScanRow>& rows, const std::string& method) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].method != method || !std::isfinite(rows[i].abs())) continue;
        if (!best || rows[i].abs() > rows[*best].abs()) best = i;
    }
    return best;
}

inline constexpr const char* kCsvHeader =
    "mode,idx0,idx1,axis0,axis1,method,re,im,abs,abs_db,elec_small,elec_large,el_cond,r_es,r_el";

namespace detail {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_double(const std::string& s) {
    if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) throw std::runtime_error("bad number '" + s + "'");
    return v;
}

}  // namespace detail

inline std::string csv_line(const ScanRow& r) {
    using detail::fmt17;
    std::string s;
    s += r.mode + ',' + std::to_string(r.idx0) + ',';
    s += (r.idx1 >= 0 ? std::to_string(r.idx1) : "") + ',';
    s += fmt17(r.axis0) + ',';
    s += (r.idx1 >= 0 ? fmt17(r.axis1) : "") + ',';
    s += r.method + ',';
    s += fmt17(r.value.real()) + ',' + fmt17(r.value.imag()) + ',' + fmt17(r.abs()) + ',' + fmt17(r.abs_db()) + ',';
    s += std::string(r.elec_small ? "1" : "0") + ',' + (r.elec_large ? "1" : "0") + ',';
    s += fmt17(r.el_cond) + ',' + fmt17(r.r_es) + ',' + fmt17(r.r_el);
    return s;
}

inline void emit_csv(const std::vector<ScanRow>& rows, std::ostream& out) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) out << csv_line(r) << '\n';
}

inline void emit_csv(const std::vector<ScanRow>& rows, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing: " + std::strerror(errno));
    emit_csv(rows, f);
    f.flush();
    if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

inline std::vector<ScanRow> read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for reading: " + std::strerror(errno));
    std::string line;
    if (!std::getline(f, line) || line != kCsvHeader) throw std::runtime_error("'" + path + "': unexpected CSV header");
    std::vector<ScanRow> rows;
    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        const auto c = detail::split_csv(line);
        if (c.size() != 15) throw std::runtime_error("'" + path + "' line " + std::to_string(lineno) + ": expected 15 fields");
        ScanRow r;
        r.mode = c[0];
        r.idx0 = std::stoi(c[1]);
        r.idx1 = c[2].empty() ? -1 : std::stoi(c[2]);
        r.axis0 = detail::parse_double(c[3]);
        r.axis1 = detail::parse_double(c[4]);
        r.method = c[5];
        r.value = {detail::parse_double(c[6]), detail::parse_double(c[7])};
        r.elec_small = c[10] == "1";
        r.elec_large = c[11] == "1";
        r.el_cond = detail::parse_double(c[12]);
        r.r_es = detail::parse_double(c[13]);
        r.r_el = detail::parse_double(c[14]);
        rows.push_back(std::move(r));
    }
    return rows;
}

/// Binary P5 raster of |F| dB for one method of a 2-D scan, theta-major rows.
/// Values map linearly from [peak - 60 dB, peak] onto [0, 255].
inline void write_pgm(const std::vector<ScanRow>& rows, const std::string& method, const std::string& path) {
    int n0 = 0, n1 = 0;
    for (const auto& r : rows)
        if (r.method == method) {
            if (r.idx1 < 0) throw std::runtime_error("PGM output needs a 2-D scan");
            n0 = std::max(n0, r.idx0 + 1);
            n1 = std::max(n1, r.idx1 + 1);
        }
    if (n0 == 0) throw std::runtime_error("no rows for method '" + method + "'");
    double peak = -std::numeric_limits<double>::infinity();
    for (const auto& r : rows)
        if (r.method == method && std::isfinite(r.abs_db())) peak = std::max(peak, r.abs_db());
    const double floor_db = peak - 60.0;
    std::vector<unsigned char> pix(static_cast<std::size_t>(n0) * n1, 0);
    for (const auto& r : rows) {
        if (r.method != method) continue;
        const double db = r.abs_db();
        double t = std::isfinite(db) ? (db - floor_db) / 60.0 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        pix[static_cast<std::size_t>(r.idx0) * n1 + r.idx1] = static_cast<unsigned char>(std::lround(255.0 * t));
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing: " + std::strerror(errno));
    f << "P5\n" << n1 << ' ' << n0 << "\n255\n";
    f.write(reinterpret_cast<const char*>(pix.data()), static_cast<std::streamsize>(pix.size()));
    if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace ris
