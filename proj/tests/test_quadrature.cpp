#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "collusion/quadrature.hpp"
#include "oracles.hpp"

using collusion::IntegralResult;
using collusion::IntegrationConfig;
using collusion::IntegrationError;
using collusion::integrate;

namespace {

double boundary_layer(double y) { return 1.0 / (1.0 + 999.0 * 5.0 * std::pow(y, 4)); }
double cubic(double y) { return 3.0 * y * y; }
double rational(double y) { return 2.0 * y / ((0.5 + y) * (0.5 + y)); }

const double kRationalExact = 2.0 * std::log(3.0) - 4.0 / 3.0;

}  // namespace

TEST(Quadrature, PolynomialIsExact) {
    const auto r = integrate(cubic);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, 1.0, 1e-15);
}

TEST(Quadrature, RationalMatchesAntiderivative) {
    const auto r = integrate(rational);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, 0.8638912440028860, 1e-10);
    EXPECT_NEAR(r.value, kRationalExact, 1e-12);
}

TEST(Quadrature, BoundaryLayerMatchesMidpointOracle) {
    const auto r = integrate(boundary_layer);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, oracle::midpoint(boundary_layer, oracle::kMidpointPanels), 1e-9);
}

TEST(Quadrature, ConvergedResultHonoursTolerance) {
    IntegrationConfig cfg;
    for (auto f : {cubic, rational, boundary_layer}) {
        const auto r = integrate(f, cfg);
        ASSERT_TRUE(r.converged);
        EXPECT_GE(r.abs_error_estimate, 0.0);
        EXPECT_LE(r.abs_error_estimate, cfg.target(r.value));
        EXPECT_GT(r.evaluations, 0);
    }
}

TEST(Quadrature, TighterTolerancesNeverMoveAwayFromOracle) {
    const double oracle_cubic = 1.0;
    const double oracle_rational = oracle::midpoint(rational, oracle::kMidpointPanels);
    const double oracle_layer = oracle::midpoint(boundary_layer, oracle::kMidpointPanels);
    struct Case {
        double (*f)(double);
        double reference;
    };
    const Case cases[] = {{cubic, oracle_cubic}, {rational, oracle_rational}, {boundary_layer, oracle_layer}};
    for (const auto& c : cases) {
        IntegrationConfig cfg{1e-6, 1e-5, 60, 1e-15};
        double previous = std::abs(integrate(c.f, cfg).value - c.reference);
        for (int k = 0; k < 6; ++k) {
            cfg.abs_tol *= 0.5;
            cfg.rel_tol *= 0.5;
            const double err = std::abs(integrate(c.f, cfg).value - c.reference);
            // Allow a few ulps: once both runs sit at the rounding floor the
            // comparison is noise.
            EXPECT_LE(err, previous + 4e-16) << "abs_tol=" << cfg.abs_tol;
            previous = err;
        }
    }
}

TEST(Quadrature, Linearity) {
    for (double alpha : {-1.0, 2.0, 10.0}) {
        for (auto f : {cubic, rational, boundary_layer}) {
            const auto base = integrate(f);
            const auto scaled = integrate([&](double y) { return alpha * f(y); });
            EXPECT_NEAR(scaled.value, alpha * base.value,
                        scaled.abs_error_estimate + std::abs(alpha) * base.abs_error_estimate + 1e-15);
        }
    }
}

TEST(Quadrature, ExactOnPolynomialsUpToDesignDegree) {
    // The Kronrod rule is exact to degree 23, the embedded Gauss rule to 13;
    // below 14 the pair agrees and a single panel suffices.
    for (int degree = 0; degree <= 23; ++degree) {
        const auto r = integrate([degree](double y) { return (degree + 1) * std::pow(y, degree); });
        EXPECT_TRUE(r.converged);
        if (degree <= 13) {
            EXPECT_EQ(r.evaluations, 15) << "degree " << degree;
        }
        EXPECT_NEAR(r.value, 1.0, 1e-14) << "degree " << degree;
    }
}

TEST(Quadrature, GeneralInterval) {
    const auto r = integrate([](double x) { return std::cos(x); }, 0.0, std::numbers::pi / 2);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, 1.0, 1e-14);
}

TEST(Quadrature, NonFiniteIntegrandNamesLocation) {
    // The first node evaluated is the centre y = 0.5.
    try {
        (void)integrate([](double y) { return 1.0 / (y - 0.5); });
        FAIL() << "expected IntegrationError";
    } catch (const IntegrationError& e) {
        EXPECT_DOUBLE_EQ(e.location(), 0.5);
        EXPECT_NE(std::string(e.what()).find("0.5"), std::string::npos);
    }
    EXPECT_THROW((void)integrate([](double) { return std::nan(""); }), IntegrationError);
}

TEST(Quadrature, ReportsNonConvergenceWhenDepthExhausted) {
    IntegrationConfig cfg;
    cfg.max_depth = 2;
    const auto r = integrate([](double y) { return 1.0 / std::sqrt(y + 1e-14); }, cfg);
    EXPECT_FALSE(r.converged);
    EXPECT_GT(r.abs_error_estimate, cfg.target(r.value));
}

TEST(Quadrature, ReportsNonConvergenceWhenIntervalFloorReached) {
    IntegrationConfig cfg;
    cfg.min_interval = 0.2;
    const auto r = integrate(boundary_layer, cfg);
    EXPECT_FALSE(r.converged);
}

TEST(Quadrature, RejectsInvalidConfig) {
    EXPECT_THROW((void)integrate(cubic, IntegrationConfig{0.0, 1e-10, 60, 1e-15}), collusion::ParameterError);
    EXPECT_THROW((void)integrate(cubic, IntegrationConfig{1e-12, -1.0, 60, 1e-15}), collusion::ParameterError);
    EXPECT_THROW((void)integrate(cubic, IntegrationConfig{1e-12, 1e-10, 0, 1e-15}), collusion::ParameterError);
    EXPECT_THROW((void)integrate(cubic, IntegrationConfig{1e-12, 1e-10, 60, 0.0}), collusion::ParameterError);
    EXPECT_THROW((void)integrate(cubic, 1.0, 0.0), collusion::ParameterError);
}

TEST(Quadrature, Deterministic) {
    const auto a = integrate(boundary_layer);
    const auto b = integrate(boundary_layer);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.abs_error_estimate, b.abs_error_estimate);
    EXPECT_EQ(a.evaluations, b.evaluations);
}
