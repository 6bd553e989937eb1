#pragma once

/// Bracketing root finder and the three model thresholds:
///   λ̂     reservation-price boundary, root of 1 - G(λ;N) = s/v
///   λ_N^f  inflection point of G, root of G''(λ;N)
///   λ̃     minimiser of δ*, root of Γ(λ;N) on (λ̂, 1)

#include <cmath>
#include <concepts>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "collusion/errors.hpp"
#include "collusion/model.hpp"
#include "collusion/quadrature.hpp"

namespace collusion {

struct SolverConfig {
    double x_tol = 1e-12;
    double f_tol = 1e-10;
    int max_iterations = 200;

    void validate() const {
        if (!(x_tol > 0.0) || !(f_tol > 0.0) || max_iterations < 1) {
            throw ParameterError("SolverConfig requires x_tol > 0, f_tol > 0, max_iterations >= 1");
        }
    }
};

/// lo < hi with a strict sign change f_lo·f_hi < 0. A converged result that
/// hit an exact zero reports the degenerate bracket [root, root].
struct Bracket {
    double lo = 0.0;
    double hi = 0.0;
    double f_lo = 0.0;
    double f_hi = 0.0;

    [[nodiscard]] bool valid() const {
        return lo < hi && ((f_lo < 0.0 && f_hi > 0.0) || (f_lo > 0.0 && f_hi < 0.0));
    }
    [[nodiscard]] double width() const { return hi - lo; }
};

struct RootResult {
    double root = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
    Bracket bracket_final;
    std::vector<Bracket> history;  ///< bracket after every iteration, oldest first
};

template <typename F>
concept ScalarFunction = std::invocable<F&, double> &&
                         std::convertible_to<std::invoke_result_t<F&, double>, double>;

namespace detail {

template <typename F>
double checked_value(F& f, double x) {
    const double fx = static_cast<double>(f(x));
    if (!std::isfinite(fx)) {
        std::ostringstream os;
        os.precision(17);
        os << "root finder: function is not finite at x = " << x;
        throw NumericalError(os.str());
    }
    return fx;
}

}  // namespace detail

template <ScalarFunction F>
Bracket make_bracket(F&& f, double lo, double hi) {
    Bracket b{lo, hi, detail::checked_value(f, lo), detail::checked_value(f, hi)};
    return b;
}

/// Safeguarded inverse-quadratic / secant iteration on a sign-change bracket.
/// An interpolation step that fails to halve the bracket forces the next step
/// to bisect, so the width at least halves every two iterations.
template <ScalarFunction F>
RootResult find_root(F&& f, Bracket bracket, const SolverConfig& cfg = {}) {
    cfg.validate();
    if (!bracket.valid()) {
        std::ostringstream os;
        os.precision(17);
        os << "invalid bracket [" << bracket.lo << ", " << bracket.hi
           << "]: requires lo < hi and a strict sign change (f_lo = " << bracket.f_lo
           << ", f_hi = " << bracket.f_hi << ")";
        throw ParameterError(os.str());
    }

    RootResult out;
    Bracket b = bracket;
    bool have_third = false;
    double x3 = 0.0;
    double f3 = 0.0;
    bool force_bisect = false;
    constexpr double eps = std::numeric_limits<double>::epsilon();

    auto finish = [&](bool converged) {
        const bool lo_best = std::abs(b.f_lo) <= std::abs(b.f_hi);
        out.root = lo_best ? b.lo : b.hi;
        out.residual = lo_best ? b.f_lo : b.f_hi;
        out.converged = converged;
        out.bracket_final = b;
        return out;
    };

    for (int it = 0; it < cfg.max_iterations; ++it) {
        const double best_f = std::min(std::abs(b.f_lo), std::abs(b.f_hi));
        if (b.width() <= cfg.x_tol && best_f <= cfg.f_tol) return finish(true);

        const double width = b.width();
        const double mid = b.lo + 0.5 * width;
        if (!(mid > b.lo && mid < b.hi)) break;  // no representable progress

        double x = mid;
        if (!force_bisect) {
            double candidate;
            if (have_third && b.f_lo != f3 && b.f_hi != f3) {
                const double a = b.lo, fa = b.f_lo, c = b.hi, fc = b.f_hi;
                candidate = a * fc * f3 / ((fa - fc) * (fa - f3)) +
                            c * fa * f3 / ((fc - fa) * (fc - f3)) +
                            x3 * fa * fc / ((f3 - fa) * (f3 - fc));
            } else {
                candidate = b.lo - b.f_lo * width / (b.f_hi - b.f_lo);
            }
            if (std::isfinite(candidate) && candidate > b.lo && candidate < b.hi) {
                const double step = std::min(0.5 * width, std::max(0.5 * cfg.x_tol,
                                                                    2.0 * eps * std::abs(candidate)));
                if (candidate - b.lo < step) candidate = b.lo + step;
                if (b.hi - candidate < step) candidate = b.hi - step;
                x = candidate;
            }
        }

        const double fx = detail::checked_value(f, x);
        ++out.iterations;
        if (fx == 0.0) {
            b = Bracket{x, x, 0.0, 0.0};
            out.history.push_back(b);
            out.root = x;
            out.residual = 0.0;
            out.converged = true;
            out.bracket_final = b;
            return out;
        }
        if ((fx < 0.0) == (b.f_lo < 0.0)) {
            x3 = b.lo;
            f3 = b.f_lo;
            b.lo = x;
            b.f_lo = fx;
        } else {
            x3 = b.hi;
            f3 = b.f_hi;
            b.hi = x;
            b.f_hi = fx;
        }
        have_third = true;
        force_bisect = b.width() > 0.5 * width;
        out.history.push_back(b);
    }

    const double best_f = std::min(std::abs(b.f_lo), std::abs(b.f_hi));
    return finish(b.width() <= cfg.x_tol && best_f <= cfg.f_tol);
}

template <ScalarFunction F>
RootResult find_root(F&& f, double lo, double hi, const SolverConfig& cfg = {}) {
    auto b = make_bracket(f, lo, hi);
    return find_root(f, b, cfg);
}

// ---------------------------------------------------------------------------
// Model thresholds
// ---------------------------------------------------------------------------

/// Offset keeping every seeded bracket inside the open interval (0,1).
inline constexpr double kEndpointOffset = 1e-6;

/// λ̂(N, s, v): smallest shopper share at which p* ≤ v. The reported root is
/// the upper end of the final bracket, i.e. the side where 1 - G ≥ s/v, so
/// evaluating the model at the root lands in the reservation-price regime.
inline RootResult lambda_hat(int n_firms, double search_cost, double valuation,
                             const SolverConfig& scfg = {}, const IntegrationConfig& icfg = {}) {
    validate_share_and_firms(0.5, n_firms);
    validate_costs(search_cost, valuation);
    const double ratio = search_cost / valuation;
    auto excess = [&](double lambda) { return (1.0 - g_value(lambda, n_firms, icfg)) - ratio; };

    // 1 - G increases in λ; widen the seeded bracket towards 0 and 1 if needed.
    double lo = kEndpointOffset;
    double hi = 1.0 - kEndpointOffset;
    double f_lo = excess(lo);
    while (f_lo >= 0.0 && lo > 1e-15) {
        lo *= 1e-3;
        f_lo = excess(lo);
    }
    double f_hi = excess(hi);
    while (f_hi <= 0.0 && 1.0 - hi > 1e-15) {
        hi = 1.0 - (1.0 - hi) * 1e-3;
        f_hi = excess(hi);
    }
    Bracket b{lo, hi, f_lo, f_hi};
    if (!b.valid()) {
        std::ostringstream os;
        os.precision(17);
        os << "lambda_hat: could not bracket 1 - G = s/v for N = " << n_firms
           << ", s/v = " << ratio << " (1 - G ranges over [" << f_lo + ratio << ", "
           << f_hi + ratio << "])";
        throw NumericalError(os.str());
    }
    auto r = find_root(excess, b, scfg);
    if (r.bracket_final.f_hi != 0.0 || r.bracket_final.f_lo != 0.0) {
        r.root = r.bracket_final.hi;
        r.residual = r.bracket_final.f_hi;
        r.converged = r.converged && std::abs(r.residual) <= scfg.f_tol;
    }
    return r;
}

/// Unique zero of G'' in (0,1). A 101-point sign scan locates the cell; more
/// than one sign change, or none, is reported as a NumericalError.
inline RootResult lambda_inflection(int n_firms, const SolverConfig& scfg = {},
                                    const IntegrationConfig& icfg = {}) {
    validate_share_and_firms(0.5, n_firms);
    auto curvature = [&](double lambda) { return g_double_prime(lambda, n_firms, icfg); };

    constexpr int kScan = 101;
    const double lo = kEndpointOffset;
    const double hi = 1.0 - kEndpointOffset;
    std::vector<double> xs(kScan);
    std::vector<double> fs(kScan);
    for (int i = 0; i < kScan; ++i) {
        xs[i] = lo + (hi - lo) * i / (kScan - 1);
        fs[i] = curvature(xs[i]);
    }
    int changes = 0;
    int cell = -1;
    for (int i = 0; i + 1 < kScan; ++i) {
        if ((fs[i] > 0.0 && fs[i + 1] < 0.0) || (fs[i] < 0.0 && fs[i + 1] > 0.0)) {
            ++changes;
            cell = i;
        }
    }
    if (changes != 1) {
        throw NumericalError("lambda_inflection: expected exactly one sign change of G'' for N = " +
                             std::to_string(n_firms) + ", found " + std::to_string(changes));
    }
    return find_root(curvature, Bracket{xs[cell], xs[cell + 1], fs[cell], fs[cell + 1]}, scfg);
}

struct TildeResult {
    RootResult result;
    double lambda_hat = 0.0;
    bool fallback = false;       ///< Γ lacked a sign change; result.root is a grid argmin of δ*
    bool low_curvature = false;  ///< |Γ| < f_tol on both sides of the root
};

/// Number of grid points used by the δ* argmin fallback.
inline constexpr int kTildeFallbackGrid = 10000;

/// λ̃(N, s, v): the zero of Γ on (λ̂, 1) where δ* switches from decreasing to
/// increasing. The endpoint signs Γ(λ̂+ε) < 0 < Γ(1-ε) are checked, not assumed.
inline TildeResult lambda_tilde(int n_firms, double search_cost, double valuation,
                                const SolverConfig& scfg = {}, const IntegrationConfig& icfg = {}) {
    TildeResult out;
    const auto hat = lambda_hat(n_firms, search_cost, valuation, scfg, icfg);
    out.lambda_hat = hat.root;
    MarketParams base{n_firms, 0.5, search_cost, valuation};
    auto gamma = [&](double lambda) { return gamma_value(base.with_share(lambda), icfg); };

    const double lo = hat.root + kEndpointOffset;
    const double hi = 1.0 - kEndpointOffset;
    Bracket b{lo, hi, gamma(lo), gamma(hi)};
    if (lo < hi && b.f_lo < 0.0 && b.f_hi > 0.0) {
        out.result = find_root(gamma, b, scfg);
        const double x = out.result.root;
        const double left = gamma(std::max(lo, x - kEndpointOffset));
        const double right = gamma(std::min(hi, x + kEndpointOffset));
        out.low_curvature = std::abs(left) < scfg.f_tol && std::abs(right) < scfg.f_tol;
        return out;
    }

    out.fallback = true;
    const double start = hat.root;
    const double step = (1.0 - start) / (kTildeFallbackGrid + 1);
    double best_x = start + step;
    double best_delta = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= kTildeFallbackGrid; ++i) {
        const double x = start + step * i;
        const auto rp = reservation_price(base.with_share(x), icfg);
        if (rp.regime != Regime::ReservationPrice) continue;
        const double d = delta_star_from_price(base.with_share(x), rp.price);
        if (d < best_delta) {
            best_delta = d;
            best_x = x;
        }
    }
    out.result.root = best_x;
    out.result.residual = gamma(best_x);
    out.result.converged = false;
    out.result.bracket_final = b;
    return out;
}

struct ThresholdReport {
    RootResult lambda_hat;
    RootResult lambda_inflection;
    TildeResult lambda_tilde;
};

inline ThresholdReport thresholds(int n_firms, double search_cost, double valuation,
                                  const SolverConfig& scfg = {},
                                  const IntegrationConfig& icfg = {}) {
    ThresholdReport r;
    r.lambda_hat = lambda_hat(n_firms, search_cost, valuation, scfg, icfg);
    r.lambda_inflection = lambda_inflection(n_firms, scfg, icfg);
    r.lambda_tilde = lambda_tilde(n_firms, search_cost, valuation, scfg, icfg);
    return r;
}

}  // namespace collusion
