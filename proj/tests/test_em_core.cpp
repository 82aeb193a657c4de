#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ris/em_core.hpp"

using namespace ris;

TEST(Carrier, ReferenceWavelength) {
    Carrier c;
    EXPECT_NEAR(c.lambda(), 0.010709, 5e-6);
    EXPECT_NEAR(c.k(), kTwoPi / c.lambda(), 1e-9);
}

TEST(Green, FullCycleIsRealPositive) {
    Carrier c;
    const double lam = c.lambda();
    const Complex g = green({0, 0, 0}, {lam, 0, 0}, c.k());
    EXPECT_NEAR(g.real(), 1.0 / (4.0 * kPi * lam), 1e-12 / lam);
    EXPECT_NEAR(g.imag(), 0.0, 1e-10);
}

TEST(Green, HalfCycleIsRealNegative) {
    Carrier c;
    const double lam = c.lambda();
    const Complex g = green({0, 0, 0}, {0, lam / 2, 0}, c.k());
    EXPECT_NEAR(g.real(), -1.0 / (4.0 * kPi * lam / 2), 1e-10 / lam);
    EXPECT_NEAR(g.imag(), 0.0, 1e-10);
}

TEST(Green, MatchesLongDoubleEvaluation) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    const double k = 586.6;
    for (int i = 0; i < 100; ++i) {
        const Point3 a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)};
        const Complex g = green(a, b, k);
        const long double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
        const long double r = std::sqrt(dx * dx + dy * dy + dz * dz);
        const long double mag = 1.0L / (4.0L * 3.14159265358979323846264338327950288L * r);
        const long double re = mag * std::cos(k * r), im = -mag * std::sin(k * r);
        // kr itself is only known to a few ulp.
        EXPECT_LT(std::hypot(g.real() - static_cast<double>(re), g.imag() - static_cast<double>(im)) / std::abs(g),
                  1e-15 * (1.0 + k * static_cast<double>(r)));
    }
}

TEST(Green, CoincidentPointsThrow) { EXPECT_THROW(green({1, 2, 3}, {1, 2, 3}, 1.0), domain_error); }

TEST(GreenDz, MatchesFiniteDifference) {
    const double k = 50.0, h = 1e-6;
    const Point3 src{0.1, -0.2, 1.0}, r{0.4, 0.3, 0.0};
    const Complex fd = (green(r + Vec3{0, 0, h}, src, k) - green(r - Vec3{0, 0, h}, src, k)) / (2.0 * h);
    EXPECT_LT(std::abs(green_dz(r, src, k) - fd) / std::abs(fd), 1e-6);
}

TEST(IncidentField, NormalizedMomentGivesUnitPattern) {
    Carrier c;
    DipoleSource src;
    src.moment = normalized_dipole_moment(c);
    src.position = {0, 0, 0};
    const double d = 3.0;
    const Point3 at{d * std::sin(0.7), 0.0, d * std::cos(0.7)};  // xz-plane, orthogonal to y
    const auto f = incident_dipole_field(src, at, c);
    EXPECT_NEAR(std::abs(f.e.y), 1.0 / (4.0 * kPi * d), 1e-12);
    EXPECT_NEAR(std::abs(f.e.x), 0.0, 1e-15);
    EXPECT_TRUE(f.in_validity);
}

TEST(IncidentField, LongitudinalPolarizationVanishes) {
    Carrier c;
    DipoleSource src;
    src.polarization.direction = {0, 0, 1};
    const auto f = incident_dipole_field(src, {0, 0, 2}, c);
    EXPECT_EQ(std::abs(f.e.x) + std::abs(f.e.y) + std::abs(f.e.z), 0.0);
}

TEST(IncidentField, Transversality) {
    Carrier c;
    DipoleSource src;
    src.polarization.direction = Vec3{1, 2, 3} * (1.0 / std::sqrt(14.0));
    src.position = {0.3, -0.1, 2.0};
    const Point3 at{1.0, 0.5, -0.7};
    const auto f = incident_dipole_field(src, at, c);
    const Vec3 r = normalized(at - src.position);
    EXPECT_LT(std::abs(dot(f.e, r)), 1e-12 * (std::abs(f.e.x) + std::abs(f.e.y) + std::abs(f.e.z)));
}

TEST(IncidentField, FlagsNearZone) {
    Carrier c;
    DipoleSource src;
    const auto f = incident_dipole_field(src, {0, 0, c.lambda()}, c);
    EXPECT_FALSE(f.in_validity);
}

TEST(Omega, TeSetupIsOne) {
    Carrier c;
    Polarization y;
    const Vec3 s = normalized(Vec3{0.6, 0.0, -0.8});
    EXPECT_NEAR(omega_pattern(s, y, y, normalized_dipole_moment(c), c.k(), c.eps0, 1.0), 1.0, 1e-12);
}

TEST(Omega, OrthogonalPolarizationsGiveZero) {
    Polarization px{{1, 0, 0}, 0}, py;
    EXPECT_EQ(omega_pattern({0, 0, -1}, px, py, 1.0, 1.0, 1.0, 1.0), 0.0);
}

TEST(Omega, ZeroEfficiencyGivesZero) {
    Polarization y;
    EXPECT_EQ(omega_pattern({0, 0, -1}, y, y, 1.0, 1.0, 1.0, 0.0), 0.0);
}

TEST(Polarization, RejectsNonUnitDirection) {
    Polarization p{{0, 2, 0}, 0};
    EXPECT_THROW(p.validate(), domain_error);
}
