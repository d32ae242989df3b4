#include <gtest/gtest.h>

#include <cmath>

#include "geomapprox/errors.hpp"
#include "geomapprox/ruin.hpp"
#include "geomapprox/surplus_simulation.hpp"
#include "oracles.hpp"

using namespace geomapprox;

namespace {

// eta on {0, 1, 2} with P(eta = 0) = 0.5 and P(eta = 2) = 0.25.
ClaimLaw three_point() { return ClaimLaw::finite({0.5, 0.25, 0.25}); }

std::vector<ClaimLaw> claim_ensemble() {
    std::vector<ClaimLaw> laws;
    laws.push_back(ClaimLaw::finite({0.7, 0.0, 0.3}));
    laws.push_back(ClaimLaw::finite({0.8, 0.0, 0.0, 0.2}));
    laws.push_back(three_point());
    laws.push_back(ClaimLaw::finite({0.4, 0.5, 0.1}));
    laws.push_back(ClaimLaw::finite({0.55, 0.2, 0.1, 0.1, 0.05}));
    for (double a : {0.55, 0.6, 0.75, 0.9}) laws.push_back(ClaimLaw::geometric(a));
    for (double l : {0.05, 0.1, 0.3, 0.5, 0.8, 0.95}) laws.push_back(ClaimLaw::poisson(l));
    laws.push_back(ClaimLaw::gamma_mixed_poisson(0.5, 2.0));
    laws.push_back(ClaimLaw::gamma_mixed_poisson(1.5, 4.0));
    laws.push_back(ClaimLaw::gamma_mixed_poisson(2.0, 2.5));
    return laws;
}

}  // namespace

TEST(ClaimLaw, Validation) {
    EXPECT_THROW(ClaimLaw::finite({0.0, 1.0}), ValidationError);
    EXPECT_THROW(ClaimLaw::finite({0.0, 0.5, 0.5}), ValidationError);
    EXPECT_THROW(ClaimLaw::finite({0.5, 0.0, 0.5}), ValidationError);
    EXPECT_THROW(ClaimLaw::poisson(1.0), ValidationError);
    EXPECT_THROW(ClaimLaw::geometric(0.5), ValidationError);
    EXPECT_THROW(ClaimLaw::gamma_mixed_poisson(2.0, 2.0), ValidationError);
}

TEST(ClaimLaw, PoissonFactorialMoments) {
    for (double l : {0.1, 0.5, 0.9}) {
        const ClaimLaw c = ClaimLaw::poisson(l);
        EXPECT_NEAR(c.q(), l, 1e-12);
        EXPECT_NEAR(c.factorial2(), l * l, 1e-11);
        EXPECT_NEAR(c.factorial3(), 2 * l * l * l + 3 * l * l, 1e-10);
        // Truncated summation over an independent table.
        const auto t = oracle::poisson(l, 80);
        double f2 = 0.0, f3 = 0.0;
        for (std::size_t k = 0; k < t.size(); ++k) {
            const double x = static_cast<double>(k);
            f2 += t[k] * x * (x - 1);
            f3 += t[k] * x * (x - 1) * (2 * x - 1);
        }
        EXPECT_NEAR(c.factorial2(), f2, 1e-11);
        EXPECT_NEAR(c.factorial3(), f3, 1e-10);
    }
}

TEST(ClaimLaw, TruncatedTailIsLumped) {
    const ClaimLaw c = ClaimLaw::geometric(0.75);
    EXPECT_GT(c.truncated_mass(), 0.0);
    EXPECT_DOUBLE_EQ(c.eta().tail_mass(), 0.0);
    EXPECT_NEAR(c.eta().total(), 1.0, 1e-15);
}

TEST(Ladder, Examples) {
    const Pmf y = ladder_pmf(three_point());
    EXPECT_NEAR(y[0], 0.5 / 0.75, 1e-15);
    EXPECT_NEAR(y[1], 0.25 / 0.75, 1e-15);

    const Pmf bern = ladder_pmf(ClaimLaw::finite({0.6, 0.4}));
    EXPECT_EQ(bern.size(), 1u);
    EXPECT_DOUBLE_EQ(bern[0], 1.0);

    const double a = 0.7;
    const Pmf g = ladder_pmf(ClaimLaw::geometric(a));
    for (std::size_t j = 0; j < 30; ++j) EXPECT_NEAR(g[j], a * std::pow(1 - a, static_cast<double>(j)), 1e-12);
}

TEST(ConditionedClaim, Examples) {
    const Pmf x = conditioned_claim_pmf(three_point());
    EXPECT_EQ(x.size(), 2u);
    EXPECT_DOUBLE_EQ(x[1], 1.0);
    EXPECT_THROW(conditioned_claim_pmf(ClaimLaw::finite({0.6, 0.4})), DegenerateModelError);

    const double a = 0.8;
    const Pmf g = conditioned_claim_pmf(ClaimLaw::geometric(a));
    EXPECT_DOUBLE_EQ(g[0], 0.0);
    // The lumped truncation tail perturbs the table at the 1e-12 level.
    for (std::size_t j = 1; j < 12; ++j) EXPECT_NEAR(g[j], a * std::pow(1 - a, static_cast<double>(j - 1)), 1e-11);
}

TEST(PkRate, Examples) {
    EXPECT_NEAR(pk_geometric_rate(three_point()), 0.5, 1e-15);
    EXPECT_NEAR(pk_geometric_rate(ClaimLaw::finite({0.6, 0.4})), 1.0, 1e-15);
    EXPECT_NEAR(pk_geometric_rate(ClaimLaw::geometric(0.75)), 8.0 / 9.0, 1e-12);
}

TEST(PsiExact, ThreePointClosedForm) {
    const PsiTable t = psi_exact(three_point(), 30);
    EXPECT_DOUBLE_EQ(t.psi[0], 0.75);
    for (std::size_t m = 1; m <= 30; ++m) EXPECT_NEAR(t.psi[m], std::pow(0.5, static_cast<double>(m)), 1e-10);
}

TEST(PsiExact, GeometricClosedForm) {
    for (double a : {0.55, 0.6, 0.75, 0.9}) {
        const PsiTable t = psi_exact(ClaimLaw::geometric(a), 30);
        for (std::size_t m = 1; m <= 30; ++m) {
            EXPECT_NEAR(t.psi[m], std::pow((1 - a) / a, static_cast<double>(m + 1)), 1e-10) << a << " " << m;
        }
    }
}

TEST(PsiExact, BernoulliClaimsNeverRuin) {
    const ClaimLaw c = ClaimLaw::finite({0.6, 0.4});
    const PsiTable t = psi_exact(c, 5);
    EXPECT_DOUBLE_EQ(t.psi[0], 0.4);
    for (std::size_t m = 1; m <= 5; ++m) EXPECT_DOUBLE_EQ(t.psi[m], 0.0);
    const RuinBound1 b1 = ruin_bound_1(c, 2);
    EXPECT_DOUBLE_EQ(b1.lower, 0.0);
    EXPECT_DOUBLE_EQ(b1.upper, 0.0);
    const RuinBound2 b2 = ruin_bound_2(c, 2);
    EXPECT_DOUBLE_EQ(b2.center, 0.0);
    EXPECT_DOUBLE_EQ(b2.err, 0.0);
    EXPECT_THROW(claim_x_moments(c), DegenerateModelError);
}

TEST(PsiExact, NonincreasingAndAboveGeometricEnvelope) {
    for (const ClaimLaw& c : claim_ensemble()) {
        const PsiTable t = psi_exact(c, 30);
        for (std::size_t m = 1; m <= 30; ++m) {
            EXPECT_LE(t.psi[m], t.psi[m - 1] + 1e-15);
            EXPECT_GE(t.psi[m] + t.slack, ruin_bound_1(c, m).lower);
        }
    }
}

TEST(PsiExact, RejectsZeroHorizon) { EXPECT_THROW(psi_exact(three_point(), 0), ValidationError); }

TEST(LadderRepresentation, BothCompoundsAgree) {
    for (const ClaimLaw& c : claim_ensemble()) {
        if (c.degenerate()) continue;
        const Pmf via_y = geometric_compound_pmf(1.0 - c.q(), ladder_pmf(c), 60);
        const Pmf via_x = geometric_compound_pmf(pk_geometric_rate(c), conditioned_claim_pmf(c), 60);
        for (std::size_t s = 0; s < 60; ++s) EXPECT_NEAR(via_y[s], via_x[s], 1e-12);
    }
}

TEST(ClaimXMoments, AgreeWithConditionedTable) {
    for (const ClaimLaw& c : claim_ensemble()) {
        if (c.degenerate()) continue;
        const ClaimXMoments mom = claim_x_moments(c);
        const Pmf x = conditioned_claim_pmf(c);
        EXPECT_NEAR(mom.mean, x.mean(), 1e-12);
        EXPECT_NEAR(mom.second, x.expect([](double k) { return k * k; }), 1e-11);
        const double d = c.q() - c.prob_positive();
        EXPECT_NEAR(mom.shift_tv, c.prob_positive() / (2 * d), 1e-12);
        EXPECT_NEAR(shift_tv(x).value, c.survival(1) / d, 1e-12);
    }
    const ClaimXMoments t = claim_x_moments(three_point());
    EXPECT_DOUBLE_EQ(t.mean, 1.0);
    // P(eta = 1) = P(eta > 1) here, so the shift term is the exact distance.
    EXPECT_DOUBLE_EQ(t.shift_tv, 1.0);
    EXPECT_DOUBLE_EQ(claim_x_moments(ClaimLaw::finite({0.7, 0.0, 0.3})).shift_tv, 0.5);
    EXPECT_DOUBLE_EQ(shift_tv(conditioned_claim_pmf(ClaimLaw::finite({0.7, 0.0, 0.3}))).value, 1.0);
}

TEST(RuinBound1, ThreePointIsTight) {
    for (std::size_t m = 1; m < 10; ++m) {
        const RuinBound1 b = ruin_bound_1(three_point(), m);
        EXPECT_NEAR(b.lower, std::pow(0.5, static_cast<double>(m)), 1e-15);
        EXPECT_NEAR(b.upper, b.lower, 1e-15);
    }
}

TEST(RuinBound1, GeometricLowerEndpoint) {
    const double a = 0.75;
    for (std::size_t m = 1; m < 10; ++m) {
        EXPECT_NEAR(ruin_bound_1(ClaimLaw::geometric(a), m).lower, std::pow((1 - a) / a, 2.0 * static_cast<double>(m)),
                    1e-12);
    }
    // Exact at m = 1.
    EXPECT_NEAR(ruin_bound_1(ClaimLaw::geometric(a), 1).lower, psi_exact(ClaimLaw::geometric(a), 1).psi[1], 1e-10);
}

TEST(RuinBound1, PoissonErrorTerm) {
    for (double l : {0.1, 0.4, 0.7}) {
        const double expected = (0.5 * l * l - l + 1 - std::exp(-l)) / std::exp(-l);
        EXPECT_NEAR(ruin_bound_1(ClaimLaw::poisson(l), 1).error, expected, 1e-10);
    }
}

TEST(RuinBound2, ThreePointIsTight) {
    for (std::size_t m = 1; m < 10; ++m) {
        const RuinBound2 b = ruin_bound_2(three_point(), m);
        EXPECT_NEAR(b.center, std::pow(0.5, static_cast<double>(m)), 1e-15);
        EXPECT_NEAR(b.err, 0.0, 1e-15);
    }
}

TEST(RuinBound2, GeometricCenter) {
    for (double a : {0.6, 0.8}) {
        const double base = (1 - a) * (1 - a) / (3 * a * a - 3 * a + 1);
        for (std::size_t m = 1; m < 10; ++m) {
            EXPECT_NEAR(ruin_bound_2(ClaimLaw::geometric(a), m).center, std::pow(base, static_cast<double>(m)), 1e-11);
        }
    }
}

TEST(RuinBounds, MasterEnsemble) {
    for (const ClaimLaw& c : claim_ensemble()) {
        const PsiTable t = psi_exact(c, 30);
        for (std::size_t m = 1; m <= 30; ++m) {
            const RuinBound1 b1 = ruin_bound_1(c, m);
            EXPECT_LE(b1.lower, t.psi[m] + t.slack);
            EXPECT_LE(t.psi[m], b1.upper + t.slack);
            const RuinBound2 b2 = ruin_bound_2(c, m);
            if (b2.v_defined) EXPECT_LE(std::abs(t.psi[m] - b2.center), b2.err + t.slack);
        }
    }
}

TEST(RuinReports, RowsMatchComponents) {
    const ClaimLaw c = ClaimLaw::geometric(0.7);
    const auto rows = ruin_reports(c, 8);
    ASSERT_EQ(rows.size(), 8u);
    const PsiTable t = psi_exact(c, 8);
    for (const RuinReport& r : rows) {
        EXPECT_DOUBLE_EQ(r.psi_exact, t.psi[r.m]);
        EXPECT_DOUBLE_EQ(r.approx1, ruin_bound_1(c, r.m).lower);
        EXPECT_DOUBLE_EQ(r.approx2, ruin_bound_2(c, r.m).center);
    }
}

TEST(MixedPoissonError, PoissonValues) {
    EXPECT_DOUBLE_EQ(mixed_poisson_error(PoissonClaims{0.0}), 0.0);
    const double l = 0.1;
    const double direct = std::exp(l) * (0.005 - 0.1 + 1 - std::exp(-l));
    EXPECT_NEAR(mixed_poisson_error(PoissonClaims{l}), direct, 1e-15);
    // Leading behaviour is lambda^3 / 6.
    for (double x : {1e-3, 1e-2}) EXPECT_NEAR(mixed_poisson_error(PoissonClaims{x}) / (x * x * x / 6), 1.0, 2 * x);
    EXPECT_THROW(mixed_poisson_error(PoissonClaims{1.0}), ValidationError);
}

TEST(MixedPoissonError, SeriesAndClosedFormMeetSmoothly) {
    const double below = mixed_poisson_error(PoissonClaims{0.5 - 1e-9});
    const double above = mixed_poisson_error(PoissonClaims{0.5});
    EXPECT_NEAR(below, above, 1e-9);
}

TEST(MixedPoissonError, MatchesBoundErrorTerm) {
    for (double l : {0.05, 0.3, 0.6, 0.9}) {
        EXPECT_NEAR(mixed_poisson_error(PoissonClaims{l}), ruin_bound_1(ClaimLaw::poisson(l), 1).error, 1e-10);
    }
    for (double b : {1.5, 3.0, 10.0}) {
        const double via_geom = ruin_bound_1(ClaimLaw::geometric(b / (1 + b)), 1).error;
        EXPECT_NEAR(mixed_poisson_error(GammaMixedClaims{1.0, b}), via_geom, 1e-10);
    }
    for (auto [a, b] : {std::pair{0.5, 2.0}, std::pair{1.5, 4.0}}) {
        EXPECT_NEAR(mixed_poisson_error(GammaMixedClaims{a, b}), ruin_bound_1(ClaimLaw::gamma_mixed_poisson(a, b), 1).error,
                    1e-10);
    }
}

TEST(MixedPoissonError, GammaVanishesForLargeBeta) {
    double prev = 1e300;
    for (double b : {2.0, 8.0, 32.0, 128.0, 1024.0}) {
        const double e = mixed_poisson_error(GammaMixedClaims{1.0, b});
        EXPECT_LT(e, prev);
        prev = e;
    }
    EXPECT_LT(prev, 1e-8);
    EXPECT_THROW(mixed_poisson_error(GammaMixedClaims{2.0, 1.0}), ValidationError);
}

TEST(CounterRng, BatchesReplayIndependently) {
    CounterRng a(7, 3);
    CounterRng b(7, 3);
    CounterRng c(7, 4);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        EXPECT_EQ(x, b());
        differs = differs || x != c();
    }
    EXPECT_TRUE(differs);
    CounterRng u(1, 0);
    for (int i = 0; i < 1000; ++i) {
        const double v = u.uniform();
        EXPECT_GE(v, 0.0);
        EXPECT_LT(v, 1.0);
    }
}

TEST(AdjustmentCoefficient, TwoPointClosedForm) {
    // eta in {0, 2}: the root solves a x^2 - x + (1 - a) = 0 with x = e^s.
    const double a = 0.3;
    EXPECT_NEAR(adjustment_coefficient(ClaimLaw::finite({0.7, 0.0, 0.3})), std::log((1 - a) / a), 1e-9);
    EXPECT_TRUE(std::isinf(adjustment_coefficient(ClaimLaw::finite({0.6, 0.4}))));
}

TEST(SurplusSimulation, AgreesWithPsiExact) {
    const ClaimLaw c = ClaimLaw::poisson(0.5);
    const PsiTable t = psi_exact(c, 3);
    SurplusSimulationConfig cfg;
    cfg.paths = 200'000;
    cfg.seed = 11;
    for (std::size_t m : {1u, 3u}) {
        const SurplusEstimate e = simulate_ruin(c, m, cfg);
        EXPECT_EQ(e.paths, cfg.paths);
        EXPECT_LE(std::abs(e.psi - t.psi[m]), 4 * e.std_error + e.residual_bound) << m;
    }
}

TEST(SurplusSimulation, ReproducibleForSeed) {
    const ClaimLaw c = ClaimLaw::geometric(0.7);
    SurplusSimulationConfig cfg;
    cfg.paths = 20'000;
    cfg.batch_size = 1000;
    const SurplusEstimate a = simulate_ruin(c, 2, cfg);
    const SurplusEstimate b = simulate_ruin(c, 2, cfg);
    EXPECT_EQ(a.psi, b.psi);
    cfg.seed = 2;
    EXPECT_NE(simulate_ruin(c, 2, cfg).psi, a.psi);
}
