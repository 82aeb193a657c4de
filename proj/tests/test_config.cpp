#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <functional>

#include "ris/config.hpp"

using namespace ris;
using nlohmann::json;

namespace {

const std::string kDir = RIS_CONFIG_DIR;

json load(const std::string& name) {
    std::ifstream f(kDir + "/" + name);
    return json::parse(f);
}

std::string error_key(const json& j) {
    try {
        parse_config_json(j);
    } catch (const config_error& e) {
        return e.key();
    }
    return "<accepted>";
}

// Leaf paths as (json_pointer, dotted key reported on removal).
void collect_leaves(const json& j, const std::string& ptr, const std::string& dotted,
                    std::vector<std::pair<std::string, std::string>>& out) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string p = ptr + "/" + it.key();
        std::string key = it.key();
        for (const std::string suffix : {"_deg", "_rad"})
            if (key.size() > suffix.size() && key.compare(key.size() - suffix.size(), suffix.size(), suffix) == 0)
                key.resize(key.size() - suffix.size());
        const std::string d = dotted.empty() ? key : dotted + "." + key;
        if (it->is_object())
            collect_leaves(*it, p, d, out);
        else
            out.emplace_back(p, d);
    }
}

}  // namespace

TEST(Config, ShippedConfigsParse) {
    int n = 0;
    for (const auto& e : std::filesystem::directory_iterator(kDir)) {
        if (e.path().extension() != ".json") continue;
        SCOPED_TRACE(e.path().string());
        EXPECT_NO_THROW(parse_config(e.path().string()));
        ++n;
    }
    EXPECT_GE(n, 8);
}

TEST(Config, SteeredReferenceValues) {
    const auto cfg = parse_config(kDir + "/steered_reflect.json");
    const Link& l = cfg.link;
    EXPECT_NEAR(l.carrier.lambda(), 0.010709, 1e-6);
    EXPECT_DOUBLE_EQ(l.source.moment, l.carrier.eps0 / (l.carrier.k() * l.carrier.k()));
    const auto inc = spherical_placement(5.0, kPi / 4, kPi / 3);
    EXPECT_NEAR(norm(l.geom.tx - inc), 0.0, 1e-12);
    for (const Polarization* p : {&l.source.polarization, &l.profile.pol_out, &l.rec_pol}) {
        EXPECT_EQ(p->direction.y, 1.0);
        EXPECT_EQ(p->phase, 0.0);
    }
    const auto* a = std::get_if<Anomalous>(&l.profile.phase_law);
    ASSERT_NE(a, nullptr);
    EXPECT_NEAR(a->alpha, 0.14645, 1e-5);
    EXPECT_NEAR(a->beta, -0.61237, 1e-5);
    EXPECT_FALSE(cfg.scan);
}

TEST(Config, TransmitConfigPlacesRxBelow) {
    const auto cfg = parse_config(kDir + "/steered_transmit.json");
    EXPECT_EQ(cfg.link.geom.side, Side::Transmission);
    EXPECT_LT(cfg.link.geom.rx.z, 0.0);
}

TEST(Config, NonPositiveHalfLengthNamesKey) {
    json j = load("steered_reflect.json");
    j["geometry"]["half_len_x"] = 0;
    EXPECT_EQ(error_key(j), "geometry.half_len_x");
}

TEST(Config, SideConsistency) {
    json j = load("steered_transmit.json");
    j["geometry"]["rx"] = {{"x", 0.1}, {"y", 0.2}, {"z", 3.0}};
    try {
        parse_config_json(j);
        FAIL();
    } catch (const config_error& e) {
        EXPECT_EQ(e.key(), "geometry.side");
        EXPECT_NE(std::string(e.what()).find("side consistency"), std::string::npos);
    }
}

TEST(Config, ModeMustMatchSide) {
    json j = load("steered_reflect.json");
    j["profile"]["mode"] = "transmit";
    EXPECT_EQ(error_key(j), "profile.mode");
}

TEST(Config, UnknownKeyRejected) {
    json j = load("steered_reflect.json");
    j["carrier"]["frequency"] = 1.0;
    EXPECT_EQ(error_key(j), "carrier.frequency");
    json k = load("steered_reflect.json");
    k["extra"] = 1;
    EXPECT_EQ(error_key(k), "extra");
}

TEST(Config, BothAngleUnitsRejected) {
    json j = load("steered_reflect.json");
    j["geometry"]["tx"]["theta_inc_rad"] = 0.5;
    EXPECT_EQ(error_key(j), "geometry.tx.theta_inc");
}

TEST(Config, BadMethodNamesKey) {
    json j = load("distance_sweep.json");
    j["scan"]["methods"] = {"quadrature", "simpson"};
    EXPECT_EQ(error_key(j), "method");
}

TEST(Config, AxisOneMustBeNullFor1D) {
    json j = load("distance_sweep.json");
    j["scan"]["axis1"] = j["scan"]["axis0"];
    EXPECT_EQ(error_key(j), "scan.axis1");
}

TEST(Config, EveryRemovedLeafIsNamed) {
    for (const std::string name : {"steered_reflect.json", "angular_reflect_scan.json", "distance_sweep.json"}) {
        const json base = load(name);
        std::vector<std::pair<std::string, std::string>> leaves;
        collect_leaves(base, "", "", leaves);
        ASSERT_GT(leaves.size(), 30u);
        for (const auto& [ptr, key] : leaves) {
            SCOPED_TRACE(name + " " + ptr);
            json j = base;
            const json::json_pointer jp(ptr);
            j[jp.parent_pointer()].erase(jp.back());
            EXPECT_EQ(error_key(j), key);
        }
    }
}

TEST(Regime, RenderParseRoundTrip) {
    const auto cfg = parse_config(kDir + "/steered_reflect.json");
    const Link& l = cfg.link;
    const auto r = classify_regime(l.geom, l.profile, l.carrier.lambda());
    const std::string text = render_regime(r);
    EXPECT_NE(text.find("electrically-large: yes"), std::string::npos);
    const auto back = parse_regime_block(text);
    EXPECT_EQ(back.r_es, r.r_es);
    EXPECT_EQ(back.r_el, r.r_el);
    EXPECT_EQ(back.electrically_large, r.electrically_large);
    EXPECT_EQ(back.electrically_small, r.electrically_small);
    EXPECT_EQ(back.el_condition_value, r.el_condition_value);
    ASSERT_EQ(back.stationary.size(), r.stationary.size());
    for (std::size_t i = 0; i < r.stationary.size(); ++i) {
        EXPECT_EQ(back.stationary[i].x_s, r.stationary[i].x_s);
        EXPECT_EQ(back.stationary[i].hessian.det, r.stationary[i].hessian.det);
        EXPECT_EQ(back.stationary[i].hessian.signature, r.stationary[i].hessian.signature);
    }
}

TEST(Regime, FocusingRoundTripKeepsNullCondition) {
    const auto cfg = parse_config(kDir + "/focusing_distance_sweep.json");
    const Link& l = cfg.link;
    const auto r = classify_regime(l.geom, l.profile, l.carrier.lambda());
    const auto back = parse_regime_block(render_regime(r));
    EXPECT_TRUE(back.amplitude_only);
    EXPECT_EQ(std::isnan(back.el_condition_value), std::isnan(r.el_condition_value));
}
