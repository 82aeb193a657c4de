#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "ris/quadrature.hpp"

using namespace ris;

TEST(Quadrature, PlanRespectsMinimumAndDensity) {
    QuadratureSpec q;
    const SurfaceSpec s{0.5, 0.25};
    const Grid flat = plan_grid(s, 0.01, 0.0, 0.0, q);
    EXPECT_EQ(flat.nx, 8u);
    EXPECT_EQ(flat.ny, 8u);
    const Grid steep = plan_grid(s, 0.01, 2.0, 1.0, q);
    EXPECT_EQ(steep.nx, 2000u);  // 1 m * 2 * 10 / 0.01
    EXPECT_EQ(steep.ny, 500u);
}

TEST(Quadrature, BudgetExceeded) {
    QuadratureSpec q;
    q.budget = 1000.0;
    EXPECT_THROW(plan_grid({1.0, 1.0}, 0.01, 1.0, 1.0, q), budget_error);
}

TEST(Quadrature, BudgetFromEnvironment) {
    QuadratureSpec q;
    ::setenv("RIS_BUDGET", "123", 1);
    EXPECT_DOUBLE_EQ(effective_budget(q), 123.0);
    ::unsetenv("RIS_BUDGET");
    EXPECT_DOUBLE_EQ(effective_budget(q), kDefaultBudget);
}

TEST(Quadrature, MidpointIsExactForBilinear) {
    const Grid g = uniform_grid({1.0, 2.0}, 8, 8);
    const double v = integrate_grid<double>(g, [](double x, double y) { return 3.0 + x - 2.0 * y + x * y; });
    EXPECT_NEAR(v, 3.0 * 8.0, 1e-12);
}

TEST(Quadrature, SecondOrderConvergence) {
    auto f = [](double x, double y) { return std::exp(x) * std::cos(0.5 * y); };
    const double exact = (std::exp(1.0) - std::exp(-1.0)) * 4.0 * std::sin(0.5);
    const double e1 = std::abs(integrate_grid<double>(uniform_grid({1, 1}, 16, 16), f) - exact);
    const double e2 = std::abs(integrate_grid<double>(uniform_grid({1, 1}, 32, 32), f) - exact);
    EXPECT_NEAR(e1 / e2, 4.0, 0.1);
}

TEST(Quadrature, ThreadCountDoesNotChangeBits) {
    const Grid g = uniform_grid({0.5, 0.5}, 301, 257);
    auto f = [](double x, double y) { return std::polar(1.0 + x * y, 300.0 * (x + 0.3 * y * y)); };
    const Complex a = integrate_grid<Complex>(g, f, 1);
    for (int t : {2, 3, 7, 16}) {
        const Complex b = integrate_grid<Complex>(g, f, t);
        EXPECT_EQ(a.real(), b.real());
        EXPECT_EQ(a.imag(), b.imag());
    }
}

TEST(Quadrature, WorkerExceptionPropagates) {
    const Grid g = uniform_grid({1, 1}, 8, 64);
    auto f = [](double, double y) -> double {
        if (y > 0.9) throw domain_error("boom");
        return 1.0;
    };
    EXPECT_THROW(integrate_grid<double>(g, f, 4), domain_error);
}

TEST(Gauss, NodesAndWeights) {
    const auto r = gauss_legendre(5);
    double w = 0.0;
    for (double x : r.weights) w += x;
    EXPECT_NEAR(w, 2.0, 1e-15);
    EXPECT_NEAR(r.nodes[2], 0.0, 1e-15);
    EXPECT_NEAR(r.nodes[4], 0.9061798459386640, 1e-15);
}

TEST(Gauss, ExactForHighDegreePolynomial) {
    const double v = integrate_gauss<double>({1.0, 1.0}, 1, 1, 10,
                                             [](double x, double y) { return std::pow(x, 18) * std::pow(y, 2); });
    EXPECT_NEAR(v, (2.0 / 19.0) * (2.0 / 3.0), 1e-14);
}

TEST(PairwiseSum, Accuracy) {
    std::vector<double> v(1 << 20, 0.1);
    EXPECT_NEAR(pairwise_sum(v.data(), v.size()), 0.1 * static_cast<double>(v.size()), 1e-8);
}
