#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>

#include "collusion/model.hpp"
#include "oracles.hpp"

using namespace collusion;

namespace {

// Duopoly reference point N=2, λ=0.5, s=0.2, v=1. Values from the closed form
// G = ln(3)/2 carried through each formula in 30-digit arithmetic.
constexpr double kG = 0.549306144334054845697622618461;
constexpr double kGPrime = -0.863891244002886049457157140512;
constexpr double kPStar = 0.443760209920057706652694518764;
constexpr double kPiNash = 0.110940052480014426663173629691;
constexpr double kDelta = 0.391199606500424049145949890892;
constexpr double kH = 0.479200699733525606730181318257;
constexpr double kGamma = 0.343589586972354465412772069064;
// Root of 1 - G(λ;2) = 0.2, same arithmetic.
constexpr double kLambdaHatDuopoly = 0.212149524817109439340010937847;

const MarketParams kDuopoly{2, 0.5, 0.2, 1.0};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

// --- G ----------------------------------------------------------------------

TEST(GValue, ApproachesOneAsSharesVanish) { EXPECT_NEAR(g_value(1e-9, 3), 1.0, 1e-6); }

TEST(GValue, DuopolyClosedForm) {
    EXPECT_NEAR(g_value(0.5, 2), std::log(3.0) / 2.0, 1e-12);
    EXPECT_NEAR(g_value(0.5, 2), oracle::g_duopoly(0.5), 1e-12);
    EXPECT_NEAR(g_value(kDuopoly), kG, 1e-12);
}

TEST(GValue, TriopolyMatchesMidpointOracle) {
    EXPECT_NEAR(g_value(0.5, 3), oracle::g_midpoint(0.5, 3), 1e-9);
}

TEST(GValue, StaysInUnitIntervalAndDecreasesInShare) {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> share(1e-4, 1.0 - 1e-4);
    std::uniform_int_distribution<int> firms(2, 12);
    for (int i = 0; i < 300; ++i) {
        const int n = firms(rng);
        double a = share(rng);
        double b = share(rng);
        if (a > b) std::swap(a, b);
        if (b - a < 1e-6) continue;
        const double ga = g_value(a, n);
        const double gb = g_value(b, n);
        EXPECT_GT(ga, 0.0);
        EXPECT_LT(ga, 1.0);
        EXPECT_GT(ga, gb) << "N=" << n << " lambda " << a << " vs " << b;
        EXPECT_LT(g_prime(a, n), 0.0);
    }
}

TEST(GValue, LimitFacts) {
    for (int n = 2; n <= 10; ++n) {
        EXPECT_NEAR(g_value(1e-7, n), 1.0, 1e-5) << n;
        EXPECT_NEAR(g_prime(1e-7, n), -1.0, 1e-4) << n;
        const double limit = 2.0 * n * (n / (2.0 * (n - 1) + 1.0) - 1.0 / n);
        EXPECT_NEAR(g_double_prime(1e-6, n), limit, 1e-3) << n;
    }
    // G(1 - 1e-7; N) is within 1e-3 of zero only for N ≤ 3; the boundary
    // layer decays like (ε/N)^{1/(N-1)}.
    EXPECT_LT(std::abs(g_value(1.0 - 1e-7, 2)), 1e-3);
    EXPECT_LT(std::abs(g_value(1.0 - 1e-7, 3)), 1e-3);
}

TEST(GValue, BoundaryLayerNearOne) {
    // G(1 - 1e-7; N), N = 2..10, from 30-digit adaptive quadrature.
    const double reference[] = {8.405622231321355e-07, 0.0002867535414803216, 0.003535708627576298,
                                0.013208763666507303,  0.029739309510733187,  0.05158367281516754,
                                0.07685384456190182,   0.10397762905669244,   0.1318155938130066};
    for (int n = 2; n <= 10; ++n) {
        EXPECT_LT(rel(g_value(1.0 - 1e-7, n), reference[n - 2]), 1e-8) << "N=" << n;
    }
}

TEST(GValue, RejectsInvalidArguments) {
    EXPECT_THROW((void)g_value(0.0, 3), ParameterError);
    EXPECT_THROW((void)g_value(1.0, 3), ParameterError);
    EXPECT_THROW((void)g_value(0.5, 1), ParameterError);
    EXPECT_THROW((void)g_value(0.5, 65), ParameterError);
    EXPECT_NO_THROW((void)g_value(0.5, 64));
}

TEST(GValue, NonConvergenceIsPropagated) {
    IntegrationConfig cfg;
    cfg.max_depth = 1;
    EXPECT_THROW((void)g_value(1.0 - 1e-9, 10, cfg), NumericalError);
    const auto raw = g_integral(1.0 - 1e-9, 10, GOrder::Value, cfg);
    EXPECT_FALSE(raw.converged);
}

// --- G' ---------------------------------------------------------------------

TEST(GPrime, Examples) {
    EXPECT_NEAR(g_prime(1e-9, 3), -1.0, 1e-4);
    EXPECT_NEAR(g_prime(0.5, 2), -(2.0 * std::log(3.0) - 4.0 / 3.0), 1e-12);
    EXPECT_NEAR(g_prime(0.5, 2), kGPrime, 1e-12);
}

TEST(GPrime, AgreesWithClosedFormOnGrid) {
    for (int n = 2; n <= 10; ++n) {
        for (int i = 0; i <= 100; ++i) {
            const double lambda = 1e-4 + (1.0 - 2e-4) * i / 100.0;
            const double quad = g_prime(lambda, n);
            const double closed = g_prime_closed(lambda, n, g_value(lambda, n));
            EXPECT_LT(rel(closed, quad), 1e-8) << "N=" << n << " lambda=" << lambda;
        }
    }
}

TEST(GPrimeClosed, Examples) {
    EXPECT_NEAR(g_prime_closed(0.5, 2, 0.5493061443), -0.8638912440, 1e-9);
    EXPECT_NEAR(g_prime_closed(1e-6, 4, g_value(1e-6, 4)), -1.0, 1e-4);
}

TEST(GPrimeClosed, SignMatchesThreshold) {
    // G' < 0  <=>  G > (1-λ)/(1+λ(N-1)); probe both sides of the threshold.
    for (int n = 2; n <= 10; ++n) {
        for (int i = 0; i <= 100; ++i) {
            const double lambda = 1e-3 + (1.0 - 2e-3) * i / 100.0;
            const double threshold = (1.0 - lambda) / (1.0 + lambda * (n - 1));
            const double g = g_value(lambda, n);
            EXPECT_EQ(g_prime_closed(lambda, n, g) < 0.0, g > threshold);
            EXPECT_LT(g_prime_closed(lambda, n, threshold * (1.0 + 1e-6)), 0.0);
            EXPECT_GT(g_prime_closed(lambda, n, threshold * (1.0 - 1e-6)), 0.0);
        }
    }
}

// --- G'' and G''' -------------------------------------------------------------

TEST(GDoublePrime, LimitsAtZero) {
    EXPECT_NEAR(g_double_prime(1e-6, 3), 1.6, 1e-3);
    EXPECT_NEAR(g_double_prime(1e-6, 2), 2.0 / 3.0, 1e-3);
}

TEST(GDoublePrime, StrictlyDecreasing) { EXPECT_GT(g_double_prime(0.3, 4), g_double_prime(0.6, 4)); }

TEST(GDoublePrime, MatchesCentralDifferenceOfGPrime) {
    const double h = 1e-5;
    const double fd = (g_prime(0.5 + h, 3) - g_prime(0.5 - h, 3)) / (2 * h);
    EXPECT_LT(rel(fd, g_double_prime(0.5, 3)), 1e-4);
}

TEST(GTriplePrime, NegativeEverywhere) {
    for (int n = 2; n <= 12; ++n) {
        for (int i = 0; i <= 50; ++i) {
            const double lambda = 1e-4 + (1.0 - 2e-4) * i / 50.0;
            EXPECT_LT(g_triple_prime(lambda, n), 0.0) << "N=" << n << " lambda=" << lambda;
        }
    }
}

TEST(GTriplePrime, BelowDisplayedBound) {
    const double bound = -6.0 / 16.0 * (27.0 / 7.0 + 1.0 - 18.0 / 5.0);
    EXPECT_NEAR(bound, -0.47143, 1e-5);
    EXPECT_LT(g_triple_prime(0.5, 3), bound);
}

TEST(GTriplePrime, MatchesCentralDifferenceOfGDoublePrime) {
    const double h = 1e-5;
    for (double lambda : {0.2, 0.5, 0.8}) {
        for (int n : {3, 5, 8}) {
            const double fd = (g_double_prime(lambda + h, n) - g_double_prime(lambda - h, n)) / (2 * h);
            EXPECT_LT(rel(fd, g_triple_prime(lambda, n)), 1e-4) << "N=" << n << " lambda=" << lambda;
        }
    }
}

TEST(GDerivatives, BundlesAllOrders) {
    const auto d = g_derivatives(0.5, 3);
    EXPECT_EQ(d.g, g_value(0.5, 3));
    EXPECT_EQ(d.g1, g_prime(0.5, 3));
    EXPECT_EQ(d.g2, g_double_prime(0.5, 3));
    EXPECT_EQ(d.g3, g_triple_prime(0.5, 3));
    for (double e : d.abs_errors) EXPECT_GE(e, 0.0);
}

// --- Reservation price and profits --------------------------------------------

TEST(ReservationPrice, DuopolyExample) {
    const auto rp = reservation_price(kDuopoly);
    EXPECT_NEAR(rp.price, kPStar, 1e-12);
    EXPECT_EQ(rp.regime, Regime::ReservationPrice);
}

TEST(ReservationPrice, EqualsValuationAtThreshold) {
    const auto rp = reservation_price(kDuopoly.with_share(kLambdaHatDuopoly));
    EXPECT_NEAR(rp.price, 1.0, 1e-10);
}

TEST(ReservationPrice, TendsToSearchCostAsSharesSaturate) {
    EXPECT_NEAR(reservation_price(kDuopoly.with_share(1.0 - 1e-9)).price, 0.2, 1e-6);
}

TEST(ReservationPrice, MonotoneInShareAndCost) {
    for (int n : {2, 3, 5, 8}) {
        const MarketParams base{n, 0.5, 0.2, 1.0};
        double previous = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 200; ++i) {
            const double lambda = 0.3 + 0.6999 * i / 200.0;
            const auto rp = reservation_price(base.with_share(lambda));
            if (rp.regime != Regime::ReservationPrice) continue;
            EXPECT_LT(rp.price, previous) << "N=" << n << " lambda=" << lambda;
            previous = rp.price;
        }
        double cheaper = 0.0;
        for (double s : {0.1, 0.2, 0.3, 0.5, 0.7, 0.9}) {
            const double price = reservation_price(MarketParams{n, 0.7, s, 1.0}).price;
            EXPECT_GT(price, cheaper);
            EXPECT_GT(price, s);
            cheaper = price;
        }
    }
}

TEST(Profits, Examples) {
    const auto pi = profits(MarketParams{2, 0.5, 0.2, 1.0}, kPStar);
    EXPECT_DOUBLE_EQ(pi.collusive, 0.5);
    EXPECT_DOUBLE_EQ(pi.deviation, 0.75);
    EXPECT_NEAR(pi.nash, kPiNash, 1e-15);

    const MarketParams saturated{4, 1.0 - 1e-12, 0.2, 1.0};
    const auto top = profits(saturated, reservation_price(saturated).price);
    EXPECT_NEAR(top.deviation, 1.0, 1e-11);
    EXPECT_NEAR(top.nash, 0.0, 1e-11);
    EXPECT_GE(top.deviation, top.collusive);
}

// --- Critical discount factor ---------------------------------------------------

TEST(DeltaStar, DuopolyExample) { EXPECT_NEAR(delta_star(kDuopoly), kDelta, 1e-12); }

TEST(DeltaStar, EndpointsEqualPlateau) {
    // A hair above the threshold keeps quadrature rounding on the feasible side.
    EXPECT_NEAR(delta_star(kDuopoly.with_share(kLambdaHatDuopoly + 1e-14)), 0.5, 1e-6);
    for (int n : {2, 3, 4, 5}) {
        const MarketParams p{n, 1.0 - 1e-9, 0.2, 1.0};
        EXPECT_NEAR(delta_star(p), (n - 1.0) / n, 1e-6) << n;
    }
}

TEST(DeltaStar, BelowThresholdIsDomainError) {
    try {
        (void)delta_star(kDuopoly.with_share(0.1));
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("lambda_hat"), std::string::npos);
    }
}

TEST(DeltaStar, PriceFormMatchesProfitForm) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> share(0.3, 0.999);
    std::uniform_real_distribution<double> cost(0.05, 0.6);
    std::uniform_int_distribution<int> firms(2, 10);
    int checked = 0;
    for (int i = 0; i < 400; ++i) {
        const MarketParams p{firms(rng), share(rng), cost(rng), 1.0};
        const auto rp = reservation_price(p);
        if (rp.regime != Regime::ReservationPrice) continue;
        const double from_price = delta_star_from_price(p, rp.price);
        const double general = delta_star_from_profits(profits(p, rp.price));
        EXPECT_LT(rel(from_price, general), 1e-12);
        EXPECT_GT(from_price, 0.0);
        EXPECT_LT(from_price, 1.0);
        ++checked;
    }
    EXPECT_GT(checked, 100);
}

TEST(DeltaStar, SlopeSignFollowsGamma) {
    const double h = 1e-6;
    for (int n : {2, 3, 4, 5}) {
        for (double s : {0.2, 0.6}) {
            const MarketParams base{n, 0.5, s, 1.0};
            for (int i = 1; i < 100; ++i) {
                const double lambda = i / 100.0;
                if (reservation_price(base.with_share(lambda - h)).regime != Regime::ReservationPrice) continue;
                const double gamma = gamma_value(base.with_share(lambda));
                const double fd = (delta_star(base.with_share(lambda + h)) -
                                   delta_star(base.with_share(lambda - h))) / (2 * h);
                if (std::abs(gamma) > 1e-4) {
                    EXPECT_EQ(fd > 0.0, gamma > 0.0) << n << " " << lambda;
                }
                EXPECT_NEAR(delta_star_slope(base.with_share(lambda)), fd, 1e-6 * (1 + std::abs(fd)));
            }
        }
    }
}

// --- H and Γ ---------------------------------------------------------------------

TEST(HValue, DuopolyExample) {
    EXPECT_NEAR(h_value(0.5, 2, 0.5493061443), 0.4792007, 1e-7);
    EXPECT_NEAR(h_value(0.5, 2, kG), kH, 1e-12);
}

TEST(HValue, DuopolyAtThresholdClosesExactly) {
    const double s = 0.2, v = 1.0;
    const double h = h_value(kLambdaHatDuopoly, 2, 1.0 - s / v);
    EXPECT_NEAR(h, 2.0 * kLambdaHatDuopoly * v / ((1.0 + kLambdaHatDuopoly) * s) - 1.0, 1e-12);
}

TEST(HValue, PositiveAndSmallNearOne) {
    for (int n = 2; n <= 10; ++n) {
        for (int i = 1; i < 100; ++i) {
            EXPECT_GT(h_value(i / 100.0, n, g_value(i / 100.0, n)), 0.0);
        }
    }
    const double lambda = 1.0 - 1e-6;
    const double h = h_value(lambda, 3, g_value(lambda, 3));
    const double h_oracle = h_value(lambda, 3, oracle::g_midpoint(lambda, 3));
    EXPECT_GT(h, 0.0);
    EXPECT_LT(h, 1e-2);
    EXPECT_LT(rel(h, h_oracle), 1e-6);
}

TEST(Gamma, DuopolyExample) {
    EXPECT_NEAR(gamma_value(kDuopoly), kGamma, 1e-12);
    EXPECT_NEAR(gamma_value_chain(kDuopoly), kGamma, 1e-11);
}

TEST(Gamma, LimitNearOneIsValuationMinusCost) {
    for (int n : {2, 3}) {
        EXPECT_NEAR(gamma_value(MarketParams{n, 1.0 - 1e-7, 0.2, 1.0}), 0.8, 1e-4) << n;
    }
}

TEST(Gamma, DuopolyValueAtThreshold) {
    const double lh = kLambdaHatDuopoly;
    const double expected = 1.0 - 2.0 * lh / ((1.0 + lh) * 0.2);
    EXPECT_LT(expected, 0.0);
    EXPECT_NEAR(gamma_value(kDuopoly.with_share(lh)), expected, 1e-9);
}

TEST(Gamma, TwoPathsAgree) {
    for (int n = 2; n <= 10; ++n) {
        for (double s : {0.1, 0.4, 0.8}) {
            for (int i = 1; i < 50; ++i) {
                const MarketParams p{n, i / 50.0, s, 1.0};
                EXPECT_NEAR(gamma_value(p), gamma_value_chain(p), 1e-8) << n << " " << s << " " << i;
            }
        }
    }
}

// --- Equilibrium bundle ------------------------------------------------------------

TEST(EquilibriumPoint, DuopolyBundle) {
    const auto e = equilibrium_point(kDuopoly);
    EXPECT_EQ(e.regime, Regime::ReservationPrice);
    EXPECT_NEAR(e.g_family.g, kG, 1e-12);
    EXPECT_NEAR(e.g_family.g1, kGPrime, 1e-12);
    EXPECT_NEAR(e.p_star, kPStar, 1e-12);
    EXPECT_DOUBLE_EQ(e.profit_collusive, 0.5);
    EXPECT_DOUBLE_EQ(e.profit_deviation, 0.75);
    EXPECT_NEAR(e.profit_nash, kPiNash, 1e-12);
    ASSERT_TRUE(e.delta_star && e.h && e.gamma);
    EXPECT_NEAR(*e.delta_star, kDelta, 1e-12);
    EXPECT_NEAR(*e.h, kH, 1e-12);
    EXPECT_NEAR(*e.gamma, kGamma, 1e-12);
    EXPECT_GE(e.p_star, e.params.search_cost);
    EXPECT_LE(e.p_star, e.params.valuation);
}

TEST(EquilibriumPoint, BelowThresholdHasNoReservationPrice) {
    EXPECT_NEAR(1.0 - oracle::g_duopoly(0.1), 0.0969818704203198, 1e-13);
    const auto e = equilibrium_point(kDuopoly.with_share(0.1));
    EXPECT_EQ(e.regime, Regime::NoReservationPrice);
    EXPECT_FALSE(e.delta_star.has_value());
    EXPECT_FALSE(e.h.has_value());
    EXPECT_FALSE(e.gamma.has_value());
    EXPECT_GT(e.p_star, e.params.valuation);
}

TEST(EquilibriumPoint, RejectsInvalidParams) {
    EXPECT_THROW((void)equilibrium_point(MarketParams{2, 0.5, 1.0, 1.0}), ParameterError);
    EXPECT_THROW((void)equilibrium_point(MarketParams{2, 0.5, 1.5, 1.0}), ParameterError);
    EXPECT_THROW((void)equilibrium_point(MarketParams{2, 0.5, 0.0, 1.0}), ParameterError);
    EXPECT_THROW((void)equilibrium_point(MarketParams{2, 1.0, 0.2, 1.0}), ParameterError);
    EXPECT_THROW((void)equilibrium_point(MarketParams{1, 0.5, 0.2, 1.0}), ParameterError);
}

TEST(EquilibriumPoint, Deterministic) {
    const MarketParams p{6, 0.73, 0.31, 1.2};
    const auto a = equilibrium_point(p);
    const auto b = equilibrium_point(p);
    EXPECT_EQ(a.g_family.g3, b.g_family.g3);
    EXPECT_EQ(a.delta_star, b.delta_star);
    EXPECT_EQ(a.gamma, b.gamma);
}
