#include <gtest/gtest.h>

#include <gpist/harness.hpp>

using namespace gpist;

TEST(Harness, ConfigParsesCommentsAndOverrides) {
    std::istringstream in(R"(# stability run
epsilon = 0.02   # small
family = algebraic_x4
times = 0.5, 1.0 ,2
pde = off

tol_res = 1e-6
)");
    const auto c = parse_config(in);
    EXPECT_DOUBLE_EQ(c.epsilon, 0.02);
    EXPECT_EQ(c.family, "algebraic_x4");
    ASSERT_EQ(c.times.size(), 3u);
    EXPECT_DOUBLE_EQ(c.times[2], 2.0);
    EXPECT_FALSE(c.pde);
    EXPECT_TRUE(c.left);
    EXPECT_DOUBLE_EQ(c.tol.residual, 1e-6);
}

TEST(Harness, ConfigErrorsAreTagged) {
    auto parse = [](const std::string& s) {
        std::istringstream in(s);
        return parse_config(in);
    };
    for (const std::string bad : {"epsilon 0.1", "bogus = 1", "epsilon = x", "epsilon = 0.5", "times = 1, 0.5",
                                  "pde = maybe"}) {
        try {
            parse(bad);
            ADD_FAILURE() << "accepted: " << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.stage(), "config") << bad;
        }
    }
}

TEST(Harness, GaussianNormalizationMatchesBracketedMaximum) {
    const Grid1D g = make_grid(40.0, 0.02);
    const auto p = make_perturbation("gaussian_real", 0.05, 0, g);
    // the third-derivative weight dominates: sup <x>^4 |d^3 e^{-x^2/4}| = 26.467...
    EXPECT_NEAR(p.alpha, 1.0 / 26.4671, 1e-5);
    EXPECT_LE(p.weighted_sup, 1.0 + 1e-9);
    EXPECT_GT(p.weighted_sup, 1.0 - 1e-6);
    EXPECT_NEAR(std::abs(p.profile.u[p.profile.zero_index()]), 0.05 * p.alpha, 1e-15);
}

TEST(Harness, AllFamiliesAreCertified) {
    const Grid1D g = make_grid(40.0, 0.02);
    for (const auto& fam : perturbation_families()) {
        const auto p = make_perturbation(fam, 0.1, 7, g);
        EXPECT_LE(p.weighted_sup, 1.0 + 1e-9) << fam;
        EXPECT_NO_THROW(p.profile.validate()) << fam;
        // the closed-form first derivative agrees with a difference quotient
        const double x = 0.37, h = 1e-5;
        const cplx fd = (p.u1(x + h)[0] - p.u1(x - h)[0]) / (2.0 * h);
        EXPECT_LT(std::abs(fd - p.u1(x)[1]), 1e-8) << fam;
        const cplx fd3 = (p.u1(x + h)[2] - p.u1(x - h)[2]) / (2.0 * h);
        EXPECT_LT(std::abs(fd3 - p.u1(x)[3]), 1e-6) << fam;
    }
    EXPECT_THROW(make_perturbation("sawtooth", 0.1, 0, g), Error);
}

TEST(Harness, ZeroEpsilonIsTheSoliton) {
    const Grid1D g = make_grid(20.0, 0.05);
    const auto p = make_perturbation("random_bump", 0.0, 3, g);
    for (std::size_t i = 0; i < g.n; ++i) EXPECT_EQ(p.profile.u[i], cplx(black_soliton(g.x(i)), 0.0));
}

TEST(Harness, RandomBumpIsSeedDeterministic) {
    const Grid1D g = make_grid(20.0, 0.05);
    const auto a = make_perturbation("random_bump", 0.1, 11, g);
    const auto b = make_perturbation("random_bump", 0.1, 11, g);
    const auto c = make_perturbation("random_bump", 0.1, 12, g);
    EXPECT_EQ(a.profile.u, b.profile.u);
    EXPECT_NE(a.profile.u, c.profile.u);
}

TEST(Harness, StationsAreSymmetricAndOnTheHalfLattice) {
    ExperimentConfig c;
    const auto xs = stability_stations(c);
    const double dz = lattice_step(c);
    ASSERT_FALSE(xs.empty());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        EXPECT_NEAR(xs[i], -xs[xs.size() - 1 - i], 1e-12);
        EXPECT_NEAR(station_x(station_index(xs[i], dz), dz), xs[i], 1e-12);
        if (i) {
            EXPECT_LT(xs[i - 1], xs[i]);
        }
    }
    EXPECT_LE(xs.back(), c.window());
    EXPECT_GT(xs.back(), c.window() - c.tail_step - 1.0);
}

TEST(Harness, InterpolationIsHighOrder) {
    const auto p = black_soliton_profile(make_grid(20.0, 0.05));
    EXPECT_LT(std::abs(interpolate(p, 0.4321) - black_soliton(0.4321)), 1e-9);
    EXPECT_LT(std::abs(interpolate(p, 19.99) - black_soliton(19.99)), 1e-9);
}
