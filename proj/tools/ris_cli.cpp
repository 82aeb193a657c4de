// ris: field, scan and regime commands over a JSON run configuration.
//
// Exit codes: 0 success, 1 I/O or parse error, 2 contract or domain error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ris/ris.hpp"

namespace {

struct Options {
    std::string config;
    std::string out;
    std::string method;
    int threads = 1;
};

std::string complex_line(const char* label, ris::Complex v) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-10s re=% .10e im=% .10e abs=%.10e abs_db=%.4f\n", label, v.real(), v.imag(),
                  std::abs(v), 20.0 * std::log10(std::abs(v)));
    return buf;
}

void emit(const std::string& text, const std::string& out) {
    std::cout << text;
    if (out.empty()) return;
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot open '" + out + "' for writing");
    f << text;
}

std::string regime_summary(const ris::RegimeReport& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "regime: elec_small=%d elec_large=%d el_cond=%.6g r_es=%.6g\n",
                  r.electrically_small ? 1 : 0, r.electrically_large ? 1 : 0, r.el_condition_value, r.r_es);
    return buf;
}

int cmd_field(const Options& o) {
    ris::RunConfig cfg = ris::parse_config(o.config);
    const ris::Link& l = cfg.link;
    ris::QuadratureSpec q = cfg.quad;
    q.threads = o.threads;
    const ris::Method m = ris::parse_method(o.method.empty() ? "quadrature" : o.method, l.carrier.lambda());

    std::ostringstream text;
    text << "method     " << m.name() << "\n";
    switch (m.kind) {
        case ris::Method::Kind::Quadrature:
        case ris::Method::Kind::Discretized: {
            const auto r = m.kind == ris::Method::Kind::Quadrature ? ris::surface_field(l, q)
                                                                    : ris::discretized_field(l, m.step, q.threads);
            text << complex_line("incident", r.incident) << complex_line("scattered", r.scattered);
            if (l.geom.side == ris::Side::Transmission) text << complex_line("shadow", r.shadow);
            text << complex_line("total", r.value);
            text << "samples    " << r.samples << "\n";
            if (!r.dipole_valid) text << "warning: some distance is below the far-zone dipole validity limit\n";
            break;
        }
        case ris::Method::Kind::Bound: {
            const auto b = ris::focusing_bound(l);
            char buf[160];
            std::snprintf(buf, sizeof buf, "bound      %.10e (%.4f dB)\nlimit      %.10e\n", b.value,
                          20.0 * std::log10(b.value), ris::focusing_bound_limit(l));
            text << buf;
            if (!b.dominance_holds) text << "warning: distance dominance does not hold over the whole surface\n";
            break;
        }
        default: {
            const auto f = ris::evaluate_method(l, m, q);
            text << complex_line("incident", ris::detail::incident_term(l)) << complex_line("scattered", f);
            text << "total      n/a (closed forms give the surface term only)\n";
        }
    }
    text << regime_summary(ris::classify_regime(l.geom, l.profile, l.carrier.lambda()));
    emit(text.str(), o.out);
    return 0;
}

int cmd_scan(const Options& o) {
    ris::RunConfig cfg = ris::parse_config(o.config);
    if (!cfg.scan) throw ris::config_error("scan", "this command needs a scan block");
    ris::ScanGrid grid = *cfg.scan;
    grid.threads = o.threads;
    if (!o.method.empty()) {
        grid.methods.clear();
        std::stringstream ss(o.method);
        std::string name;
        while (std::getline(ss, name, ','))
            grid.methods.push_back(ris::parse_method(name, cfg.link.carrier.lambda()));
    }
    const auto rows = ris::run_scan(cfg.link, grid);
    const std::string out = o.out.empty() ? "scan.csv" : o.out;
    ris::emit_csv(rows, out);
    std::cout << "wrote " << rows.size() << " rows to " << out << "\n";
    for (const auto& m : grid.methods) {
        if (cfg.scan_pgm && grid.two_d()) {
            std::string name = m.name();
            for (char& c : name)
                if (c == ':') c = '_';
            const std::string pgm = out + "." + name + ".pgm";
            ris::write_pgm(rows, m.name(), pgm);
            std::cout << "wrote " << pgm << "\n";
        }
        if (const auto i = ris::argmax(rows, m.name())) {
            const auto& r = rows[*i];
            char buf[200];
            if (grid.two_d()) {
                std::snprintf(buf, sizeof buf, "argmax %s: theta=%.4f deg phi=%.4f deg |F|=%.6e (%.3f dB)\n",
                              m.name().c_str(), r.axis0 * 180.0 / ris::kPi, r.axis1 * 180.0 / ris::kPi, r.abs(),
                              r.abs_db());
            } else {
                std::snprintf(buf, sizeof buf, "argmax %s: axis0=%.6g |F|=%.6e (%.3f dB)\n", m.name().c_str(), r.axis0,
                              r.abs(), r.abs_db());
            }
            std::cout << buf;
        }
    }
    return 0;
}

int cmd_regime(const Options& o) {
    ris::RunConfig cfg = ris::parse_config(o.config);
    const ris::Link& l = cfg.link;
    emit(ris::render_regime(ris::classify_regime(l.geom, l.profile, l.carrier.lambda())), o.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Surface-scattering field solver"};
    app.require_subcommand(1);
    Options opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "output path");
        sub->add_option("--method", opt.method,
                        "quadrature | discretized:<step>[lambda] | closed-small | closed-large | bound");
        sub->add_option("--threads", opt.threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
    };
    auto* field = app.add_subcommand("field", "field at the receiver");
    auto* scan = app.add_subcommand("scan", "parameter sweep to CSV");
    auto* regime = app.add_subcommand("regime", "near/far regime report");
    add_common(field);
    add_common(scan);
    add_common(regime);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (field->parsed()) return cmd_field(opt);
        if (scan->parsed()) return cmd_scan(opt);
        return cmd_regime(opt);
    } catch (const ris::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ris::contract_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ris::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ris::budget_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
