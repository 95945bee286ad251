#include <gtest/gtest.h>

#include <gpist/jost.hpp>

using namespace gpist;

namespace {

FieldProfile soliton(double x_max = 20.0, double h = 0.02) { return black_soliton_profile(make_grid(x_max, h)); }

FieldProfile bumped(double eps, double x_max = 20.0, double h = 0.02) {
    return sample_profile(make_grid(x_max, h), [eps](double x) {
        return black_soliton(x) + eps * cplx(0.04, 0.01) * std::exp(-x * x / 4.0);
    });
}

SpectralGrid small_grid() { return make_spectral_grid(400, 10.0, 1e-3, 0.5, 64); }

}  // namespace

TEST(Jost, MatchesClosedFormOnRealBranch) {
    const auto prof = soliton();
    for (double z : {-4.0, 0.05, 0.7})
        for (Which w : {Which::Psi1, Which::Psi2, Which::Phi1, Which::Phi2}) {
            const SheetPoint pt = lift(z, 1);
            const JostPair jp = jost_solve(prof, pt, w);
            double err = 0.0;
            for (std::size_t i = 0; i < prof.grid.n; i += 50)
                err = std::max(err, (jp.raw(i) - unperturbed_jost(pt, prof.grid.x(i), w)).norm());
            EXPECT_LT(err, 1e-8) << "zeta " << z;
        }
}

TEST(Jost, GapRequiresDecayingNormalization) {
    const auto prof = soliton();
    const SheetPoint pt = gap_point(0.2);
    EXPECT_NO_THROW(jost_solve(prof, pt, Which::Psi2));
    EXPECT_NO_THROW(jost_solve(prof, pt, Which::Phi1));
    try {
        jost_solve(prof, pt, Which::Psi1);
        FAIL() << "expected GapGrowth";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), "GapGrowth");
        EXPECT_EQ(e.stage(), "jost");
    }
    EXPECT_THROW(jost_solve(prof, pt, Which::Phi2), Error);
}

TEST(Jost, WronskianIsConstantAndGridChecked) {
    const auto prof = soliton();
    const SheetPoint pt = lift(0.8, -1);
    const auto phi1 = jost_solve(prof, pt, Which::Phi1);
    const auto psi2 = jost_solve(prof, pt, Which::Psi2);
    const auto w = wronskian(phi1, psi2);
    EXPECT_LT(w.max_deviation, 1e-9 * std::abs(w.value));
    const auto other = jost_solve(soliton(20.0, 0.04), pt, Which::Psi2);
    EXPECT_THROW(wronskian(phi1, other), Error);
}

TEST(Jost, UnperturbedTransitionCoefficients) {
    const auto sd = transition_coefficients(soliton(), small_grid());
    double ea = 0.0, mb = 0.0;
    for (int br = 0; br < 2; ++br)
        for (std::size_t i = 0; i < sd.grid.size(); ++i) {
            const cplx a0 = unperturbed_a(sd.point(br, i));
            ea = std::max(ea, std::abs(sd.a[br][i] - a0) / std::abs(a0));
            mb = std::max(mb, std::abs(sd.b[br][i]));
        }
    EXPECT_LT(ea, 1e-6);
    EXPECT_LT(mb, 1e-7);
}

TEST(Jost, NormalizationHoldsForPerturbedProfile) {
    const auto sd = transition_coefficients(bumped(0.1), small_grid());
    EXPECT_LT(sd.norm_violation(), 1e-9);
}

// the classical stepper does not conserve |a|^2 - |b|^2; its violation
// must converge at fourth order
TEST(Jost, ReferenceStepperViolationConverges) {
    const auto sg = make_spectral_grid(200, 5.0, 1e-2, 0.5, 32);
    ForwardOptions fo;
    fo.substeps = 1;
    fo.stepper = Stepper::Rk4;
    const double v1 = transition_coefficients(bumped(0.1, 20.0, 0.04), sg, fo).norm_violation();
    const double v2 = transition_coefficients(bumped(0.1, 20.0, 0.02), sg, fo).norm_violation();
    EXPECT_GT(v1 / v2, 8.0);
}

TEST(Jost, DiscreteDataOfSoliton) {
    const auto dd = discrete_data(soliton());
    EXPECT_LT(std::abs(dd.lambda0), 1e-6);
    EXPECT_NEAR(dd.nu0, kHalfSqrt2, 1e-6);
    EXPECT_LT(std::abs(dd.b0 - kI), 1e-5);
    EXPECT_NEAR(dd.mu0, -2.0, 1e-4);
    EXPECT_LT(std::abs(dd.a_prime_fd - dd.a_prime_integral) / std::abs(dd.a_prime_fd), 1e-4);
    EXPECT_LT(std::abs(dd.a_prime_fd + kI * kHalfSqrt2), 1e-6);
}

TEST(Jost, ArgumentPrincipleCountsOneZero) {
    GaussPotential pot(soliton(), 2);
    EXPECT_NEAR(zero_count(pot), 1.0, 0.05);
}

TEST(Jost, ProfileValidation) {
    auto p = soliton();
    p.u.back() = 0.5;
    EXPECT_THROW(p.validate(), Error);
    auto q = soliton();
    q.u[10] = cplx(std::nan(""), 0.0);
    EXPECT_THROW(q.validate(), Error);
}

TEST(Jost, ZeroLimitOfSolitonHasNoPole) {
    auto sd = transition_coefficients(soliton(), small_grid());
    const auto rec = zero_limit_diagnostic(sd);
    EXPECT_LT(rec.sigma_plus, 1e-6);
    EXPECT_LT(rec.sigma_minus, 1e-6);
}
