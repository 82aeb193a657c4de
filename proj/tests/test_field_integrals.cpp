#include <gtest/gtest.h>

#include <cmath>

#include "ris/field_integrals.hpp"

using namespace ris;

namespace {

Link make_link(double half_len, double d0, Side side, PhaseLaw law) {
    Link l;
    l.source.moment = normalized_dipole_moment(l.carrier);
    l.geom.surface = {half_len, half_len};
    l.geom.side = side;
    l.geom.tx = spherical_placement(d0, kPi / 4, kPi / 3);
    l.geom.rx = side == Side::Reflection ? spherical_placement(d0, kPi / 6, kPi, side)
                                         : spherical_placement(d0, kPi / 3, 5 * kPi / 4, side);
    l.profile.mode = side == Side::Reflection ? SurfaceMode::Reflect : SurfaceMode::Transmit;
    l.profile.phase_law = law;
    return l;
}

Link symmetric_specular(double d0) {
    Link l = make_link(0.5, d0, Side::Reflection, Specular{});
    l.geom.tx = spherical_placement(d0, kPi / 4, kPi);
    l.geom.rx = spherical_placement(d0, kPi / 4, 0.0);
    return l;
}

double rel(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Reflected, ValueIsIncidentPlusScattered) {
    const auto r = reflected_field(make_link(0.25, 5.0, Side::Reflection, Specular{}));
    EXPECT_EQ(r.value, r.incident + r.scattered);
    EXPECT_TRUE(r.dipole_valid);
    EXPECT_GE(r.samples, 64u);
}

TEST(Reflected, SymmetricSpecularNearSumDistanceLaw) {
    // Omega / (4 pi (d_tx + d_rx)) = 1 / (40 pi); the finite aperture adds a
    // Fresnel edge ripple of about 13 % at this distance.
    const auto r = reflected_field(symmetric_specular(5.0));
    const double law = 1.0 / (40.0 * kPi);
    EXPECT_NEAR(std::abs(r.scattered) / law, 1.126, 0.01);
}

TEST(Reflected, LinearInMagnitude) {
    Link l = make_link(0.25, 5.0, Side::Reflection, Anomalous{0.14645, -0.61237, 0.0});
    const Complex a = reflected_field(l).scattered;
    l.profile.magnitude = 0.3;
    const Complex b = reflected_field(l).scattered;
    EXPECT_LT(rel(b, 0.3 * a), 1e-12);
}

TEST(Reflected, SmallMagnitudeLeavesIncident) {
    Link l = make_link(0.25, 5.0, Side::Reflection, Specular{});
    l.profile.magnitude = 1e-12;
    const auto r = reflected_field(l);
    EXPECT_LT(std::abs(r.value - r.incident) / std::abs(r.incident), 1e-9);
}

TEST(Reflected, SelfConvergence) {
    const Link l = make_link(0.5, 5.0, Side::Reflection, Anomalous{0.14645, -0.61237, 0.0});
    QuadratureSpec q10, q20;
    q20.samples_per_wavelength = 20.0;
    const double a = std::abs(reflected_field(l, q10).scattered), b = std::abs(reflected_field(l, q20).scattered);
    EXPECT_LT(std::abs(a - b) / b, 1e-3);
}

TEST(Reflected, FocusingConvergesAtSecondOrder) {
    const Link l = make_link(0.25, 2.0, Side::Reflection, Focusing{});
    auto with = [&](double spw) {
        QuadratureSpec q;
        q.samples_per_wavelength = spw;
        q.min_per_axis = 1;
        return reflected_field(l, q).scattered;
    };
    const Complex f1 = with(5.0), f2 = with(10.0), f4 = with(20.0);
    EXPECT_GE(std::abs(f1 - f2) / std::abs(f2 - f4), 3.5);
}

TEST(Reflected, SpecularKernelReciprocity) {
    // Omega follows the incident direction, so only the distance, obliquity
    // and phase kernel is symmetric under Tx <-> Rx.
    LinkGeometry a;
    a.surface = {0.25, 0.25};
    a.tx = spherical_placement(3.0, kPi / 4, kPi / 3);
    a.rx = spherical_placement(4.0, 0.5, 3.5);
    LinkGeometry b = a;
    std::swap(b.tx, b.rx);
    const double k = Carrier{}.k();
    auto kernel = [&](const LinkGeometry& g) {
        return integrate_type1([](double dt, double dr) { return 1.0 / (dt * dr); },
                               [&](double x, double y) {
                                   const auto d = distances(g, {x, y});
                                   return g.tx.z / d.d_tx + g.rx.z / d.d_rx;
                               },
                               [](double, double) { return 0.0; }, g, k);
    };
    EXPECT_LT(rel(kernel(b), kernel(a)), 1e-12);
}

TEST(Reflected, RejectsWrongSide) {
    Link l = make_link(0.25, 5.0, Side::Transmission, Specular{});
    l.profile.mode = SurfaceMode::Reflect;
    EXPECT_THROW(reflected_field(l), contract_error);
}

TEST(Transmitted, IdentitySurfaceCancels) {
    const auto r = transmitted_field(make_link(0.25, 5.0, Side::Transmission, Specular{}));
    EXPECT_LT(std::abs(r.value - r.incident) / std::abs(r.incident), 1e-9);
}

TEST(Transmitted, ZeroEfficiencyLeavesShadowOnly) {
    Link l = make_link(0.25, 5.0, Side::Transmission, Specular{});
    l.profile.efficiency = 0.0;
    const auto r = transmitted_field(l);
    EXPECT_EQ(r.scattered, Complex{});
    EXPECT_EQ(r.value, r.incident - r.shadow);
    EXPECT_GT(std::abs(r.shadow), 0.0);
}

TEST(Discretized, ConvergesToQuadrature) {
    const Link l = make_link(0.25, 5.0, Side::Reflection, Anomalous{0.14645, -0.61237, 0.0});
    const Complex q = reflected_field(l).scattered;
    const Complex d = discretized_field(l, l.carrier.lambda() / 10.0).scattered;
    EXPECT_LT(rel(d, q), 0.01);
}

TEST(Discretized, SingleElement) {
    const Link l = make_link(0.25, 5.0, Side::Reflection, Specular{});
    const auto r = discretized_field(l, 0.5);
    EXPECT_EQ(r.samples, 1u);
    const Complex expect = detail::surface_integrand(l, 0.0, 0.0) * 0.25 * integral_prefactor(l.carrier.k());
    EXPECT_LT(rel(r.scattered, expect), 1e-15);
    EXPECT_THROW(discretized_field(l, 0.6), domain_error);
}

TEST(ElementLattice, CenteredAndSpaced) {
    const Grid g = element_lattice({0.25, 0.1}, 0.05);
    EXPECT_EQ(g.nx, 10u);
    EXPECT_EQ(g.ny, 4u);
    EXPECT_NEAR(g.x(0), -0.225, 1e-15);
    EXPECT_NEAR(g.y(3), 0.075, 1e-15);
}

TEST(Type1, LowFrequencyLimit) {
    LinkGeometry g;
    g.surface = {0.05, 0.05};
    g.tx = {0, 0, 2};
    g.rx = {0.3, 0, 2};
    const double k = 0.05;
    const Complex v = integrate_type1([](double, double) { return 1.0; }, [](double, double) { return 1.0; },
                                      [](double, double) { return 0.0; }, g, k);
    const Complex ref = 0.01 * std::polar(1.0, -k * (norm(g.tx) + norm(g.rx)));
    EXPECT_LT(rel(v, ref), 1e-4);
}

TEST(Type1, MatchesReflectedIntegrand) {
    const Link l = make_link(0.25, 5.0, Side::Reflection, Anomalous{0.14645, -0.61237, 0.0});
    const double k = l.carrier.k();
    const auto& g = l.geom;
    const Complex via_type1 = integrate_type1(
        [&](double dt, double dr) { return 1.0 / (dt * dr); },
        [&](double x, double y) {
            const auto d = distances(g, {x, y});
            const Vec3 s{(x - g.tx.x) / d.d_tx, (y - g.tx.y) / d.d_tx, -g.tx.z / d.d_tx};
            return omega_pattern(s, l.profile.pol_out, l.rec_pol, l.source.moment, k, l.carrier.eps0, 1.0) *
                   (g.tx.z / d.d_tx + g.rx.z / d.d_rx);
        },
        [&](double x, double y) { return 0.14645 * x - 0.61237 * y; }, g, k);
    EXPECT_LT(rel(integral_prefactor(k) * via_type1, reflected_field(l).scattered), 1e-10);
}

TEST(Type1, RejectsNonAffineOffset) {
    LinkGeometry g;
    g.surface = {0.5, 0.5};
    g.tx = {0, 0, 1};
    g.rx = {0, 0, 1};
    EXPECT_THROW(integrate_type1([](double, double) { return 1.0; }, [](double, double) { return 1.0; },
                                 [](double x, double) { return x * x; }, g, 10.0),
                 contract_error);
}

TEST(Type2, NotableIntegral) {
    LinkGeometry g;
    g.surface = {1.0, 1.0};
    g.tx = {0, 0, 1};
    g.rx = {0, 0, 1};
    QuadratureSpec q;
    q.samples_per_wavelength = 40.0;
    const double v = integrate_type2([](double dt, double) { return 1.0 / (dt * dt * dt); },
                                     [](double, double) { return 1.0; }, g, q);
    EXPECT_NEAR(v, 2.0 * kPi / 3.0, 1e-9 * 2.0 * kPi / 3.0);
}

TEST(Type2, ZeroIntegrand) {
    LinkGeometry g;
    g.surface = {1.0, 1.0};
    g.tx = {0, 0, 1};
    g.rx = {0, 0, 1};
    EXPECT_EQ(integrate_type2([](double, double) { return 1.0; }, [](double, double) { return 0.0; }, g), 0.0);
}

TEST(Type2, FarLimit) {
    LinkGeometry g;
    g.surface = {0.5, 0.5};
    const double d0 = 50.0 * g.surface.diagonal();
    g.tx = spherical_placement(d0, 0.4, 1.0);
    g.rx = spherical_placement(d0, 0.7, 4.0);
    auto a2 = [](double dt, double dr) { return 1.0 / (dt * dt * dr); };
    const double v = integrate_type2(a2, [](double x, double) { return 1.0 + x; }, g);
    const double approx = a2(d0, d0) * g.surface.area();
    EXPECT_LT(std::abs(v - approx) / approx, 0.01);
}
