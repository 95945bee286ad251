#include <gtest/gtest.h>

#include <gpist/pde_oracle.hpp>

using namespace gpist;

namespace {

double wave_error(double h, double t) {
    const Grid1D g = make_grid(30.0, h);
    const double c = 0.5;
    const auto u0 = sample_profile(g, [c](double x) { return traveling_wave(c, x); });
    const auto tr = integrate(u0, t, 0.2 * h * h);
    const auto& u = tr.states.back().profile;
    double err = 0.0;
    for (std::size_t i = 0; i < g.n; ++i)
        if (std::abs(g.x(i)) <= 25.0) err = std::max(err, std::abs(u.u[i] - traveling_wave(c, g.x(i) - c * t)));
    return err;
}

}  // namespace

TEST(PdeOracle, TravelingWaveConvergesAtSecondOrder) {
    const double e1 = wave_error(0.08, 0.5), e2 = wave_error(0.04, 0.5);
    EXPECT_LT(e2, 1e-3);
    EXPECT_GT(e1 / e2, 3.5);
}

TEST(PdeOracle, BlackSolitonIsStationaryAndEnergyConserved) {
    const Grid1D g = make_grid(30.0, 0.04);
    const auto u0 = black_soliton_profile(g);
    PDEOptions po;
    po.record_times = {0.25};
    const auto tr = integrate(u0, 0.5, 2e-4, po);
    ASSERT_EQ(tr.states.size(), 2u);
    double d = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) d = std::max(d, std::abs(tr.states.back().profile.u[i] - u0.u[i]));
    EXPECT_LT(d, 1e-4);
    EXPECT_LT(tr.max_energy_drift, 1e-6);
    EXPECT_GE(tr.energy_log.size(), 10u);
    // the black soliton energy is 2 sqrt2 / 3
    EXPECT_NEAR(energy(u0), 2.0 * kSqrt2 / 3.0, 1e-6);
}

TEST(PdeOracle, DiscreteEnergyIsConservedToTimeStepError) {
    const Grid1D g = make_grid(20.0, 0.05);
    const auto u0 = sample_profile(g, [](double x) { return black_soliton(x) + 0.05 * std::exp(-x * x) * cplx(1.0, 0.3); });
    const auto tr = integrate(u0, 0.5, 2e-4);
    EXPECT_LT(std::abs(discrete_energy(tr.states.back().profile) - discrete_energy(u0)), 1e-10);
}

TEST(PdeOracle, CflViolationIsRejected) {
    const auto u0 = black_soliton_profile(make_grid(20.0, 0.05));
    try {
        integrate(u0, 0.1, 1e-3);
        FAIL() << "expected CFLViolation";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), "CFLViolation");
        EXPECT_EQ(e.stage(), "pde_oracle");
    }
}

TEST(PdeOracle, BoundaryContaminationIsDetected) {
    const Grid1D g = make_grid(20.0, 0.05);
    const auto u0 = sample_profile(g, [](double x) { return black_soliton(x) + 0.2 * std::exp(-(x - 18.5) * (x - 18.5)); });
    EXPECT_THROW(integrate(u0, 1.0, 4e-4), Error);
}

TEST(PdeOracle, LaxResidualConvergesAtSecondOrder) {
    std::vector<TestVector> tv{
        [](double x) { return Vec2(std::exp(-x * x / 2), kI * x * std::exp(-x * x / 2)); },
        [](double x) { return Vec2(std::cos(x) / std::cosh(x), std::sin(2 * x) / std::cosh(x)); }};
    auto res = [&](double h) {
        const auto p = sample_profile(make_grid(15.0, h), [](double x) {
            return black_soliton(x) + 0.05 * std::exp(-x * x / 4) * cplx(1.0, 0.5);
        });
        return lax_residual(p, tv);
    };
    EXPECT_GT(res(0.1) / res(0.05), 3.5);
}

TEST(PdeOracle, EnergyDistance) {
    const Grid1D g = make_grid(20.0, 0.05);
    const auto a = black_soliton_profile(g);
    EXPECT_EQ(energy_distance(a, a), 0.0);
    auto b = a;
    b.u[g.n / 2] += 0.01;
    EXPECT_GT(energy_distance(a, b), 0.009);
    EXPECT_THROW(energy_distance(a, black_soliton_profile(make_grid(20.0, 0.1))), Error);
}
