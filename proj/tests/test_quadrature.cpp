#include <gtest/gtest.h>

#include <gpist/quadrature.hpp>

using namespace gpist;

TEST(Quadrature, GregoryWeightsConvergeAtHighOrder) {
    auto f = [](double x) { return std::exp(-x) * std::cos(3.0 * x); };
    const double exact = (1.0 + std::exp(-4.0) * (3.0 * std::sin(12.0) - std::cos(12.0))) / 10.0;
    double prev = 0.0;
    for (int lvl = 0; lvl < 3; ++lvl) {
        const std::size_t n = (100u << lvl) + 1;
        const double h = 4.0 / double(n - 1);
        const auto w = gregory_weights(n, h, 5);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += w[i] * f(h * double(i));
        const double err = std::abs(s - exact);
        if (lvl) {
            EXPECT_GT(prev / err, 30.0);
        }
        prev = err;
    }
    EXPECT_LT(prev, 1e-10);
}

TEST(Quadrature, GregoryIsExactForLowDegreePolynomials) {
    const std::size_t n = 21;
    const double h = 0.1;
    const auto w = gregory_weights(n, h, 5);
    for (int k = 0; k <= 4; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += w[i] * std::pow(h * double(i), k);
        EXPECT_NEAR(s, std::pow(2.0, k + 1) / (k + 1), 1e-12) << "degree " << k;
    }
}

TEST(Quadrature, SimpsonRejectsEvenCounts) {
    EXPECT_THROW(simpson(std::vector<double>(4, 1.0), 0.1), Error);
    EXPECT_NEAR(simpson(std::vector<double>(5, 1.0), 0.25), 1.0, 1e-15);
}

TEST(Quadrature, FilonPanelMatchesDirectIntegration) {
    // int_0^dz (1 + z) exp(i (0.3 + 40 z)) dz with a linear amplitude
    const double dz = 0.2, pa = 0.3, k = 40.0;
    const cplx got = filon_panel(dz, 1.0, 1.0 + dz, pa, k * dz);
    cplx ref = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = (i + 0.5) * dz / n;
        ref += (1.0 + z) * std::exp(cplx(0.0, pa + k * z)) * (dz / n);
    }
    EXPECT_LT(std::abs(got - ref), 1e-9);
    // small phase branch
    const cplx small = filon_panel(dz, 1.0, 2.0, 0.0, 1e-5);
    EXPECT_NEAR(small.real(), dz * 1.5, 1e-6);
}

TEST(Quadrature, LagrangeReproducesQuintics) {
    const double xs[6] = {0, 1, 2, 3, 4, 5};
    double ys[6];
    auto p = [](double x) { return 1.0 - x + 0.5 * x * x * x - 0.01 * std::pow(x, 5); };
    for (int i = 0; i < 6; ++i) ys[i] = p(xs[i]);
    EXPECT_NEAR(lagrange_eval(xs, ys, 6, 2.37), p(2.37), 1e-12);
}
