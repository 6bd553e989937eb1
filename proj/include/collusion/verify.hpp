#pragma once

/// Numerical certification of the model's identities, limits and bounds.
///
/// Every check evaluates a list of samples. Each sample carries a signed
/// slack: non-negative when it satisfies its condition (strict samples need
/// a positive slack). A report keeps the least-satisfied sample, its (N, λ)
/// location and the tolerance that entered its slack.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "collusion/errors.hpp"
#include "collusion/model.hpp"
#include "collusion/quadrature.hpp"
#include "collusion/solvers.hpp"

namespace collusion {

struct CheckReport {
    std::string name;
    bool passed = true;
    int worst_n = 0;
    double worst_lambda = 0.0;
    double worst_case_margin = std::numeric_limits<double>::infinity();
    double tolerance_used = 0.0;
    std::int64_t samples = 0;
    std::string detail;
};

/// Uniform grid of `points` values on [lo, hi], endpoints included.
inline std::vector<double> uniform_grid(int points, double lo, double hi) {
    if (points < 2 || !(lo < hi)) throw ParameterError("uniform_grid needs points >= 2 and lo < hi");
    std::vector<double> xs(points);
    for (int i = 0; i < points; ++i) xs[i] = lo + (hi - lo) * i / (points - 1);
    xs.back() = hi;
    return xs;
}

/// Default verification grid: [1e-4, 1 - 1e-4].
inline constexpr double kGridEdge = 1e-4;

inline std::vector<double> lambda_grid(int points) {
    return uniform_grid(points, kGridEdge, 1.0 - kGridEdge);
}

/// Exact duopoly value G(λ;2) = ((1-λ)/(2λ)) ln((1+λ)/(1-λ)) = ((1-λ)/λ) atanh(λ).
inline double closed_form_g_n2(double shopper_share) {
    validate_share_and_firms(shopper_share, 2);
    return (1.0 - shopper_share) / shopper_share * std::atanh(shopper_share);
}

/// Central difference (f(x+h) - f(x-h)) / 2h.
template <typename F>
double finite_difference(F&& f, double x, double h) {
    if (!(h > 0.0)) throw ParameterError("finite_difference step must be positive");
    const double up = f(x + h);
    const double down = f(x - h);
    if (!std::isfinite(up) || !std::isfinite(down)) {
        throw NumericalError("finite_difference: non-finite evaluation near x = " +
                             std::to_string(x));
    }
    return (up - down) / (2.0 * h);
}

/// Limit of G'' as λ → 0: 2N(N/(2(N-1)+1) - 1/N).
inline double g2_limit_at_zero(int n_firms) {
    const double n = n_firms;
    return 2.0 * n * (n / (2.0 * (n - 1.0) + 1.0) - 1.0 / n);
}

/// Lower bound of ∫ u(u-1)²/d⁴ dy:
///   (1/(1+λ(N-1))⁴) · {N³/(3(N-1)+1) + 1 - 2N²/(2(N-1)+1)}.
inline double g3_integral_lower_bound(double shopper_share, int n_firms) {
    const double n = n_firms;
    const double scale = 1.0 + shopper_share * (n - 1.0);
    const double bracket = n * n * n / (3.0 * (n - 1.0) + 1.0) + 1.0 -
                           2.0 * n * n / (2.0 * (n - 1.0) + 1.0);
    return bracket / (scale * scale * scale * scale);
}

/// Two-term expansion of G(λ;N) as λ → 1 for N ≥ 3, with a = λN/(1-λ):
///   G ≈ a^{-1/(N-1)} (π/(N-1))/sin(π/(N-1)) - 1/((N-2) a).
inline double g_boundary_layer_asymptote(double shopper_share, int n_firms) {
    if (n_firms < 3) throw ParameterError("boundary-layer asymptote needs N >= 3");
    const double m = n_firms - 1.0;
    const double a = shopper_share * n_firms / (1.0 - shopper_share);
    const double layer = (std::numbers::pi / m) / std::sin(std::numbers::pi / m);
    return std::pow(a, -1.0 / m) * layer - 1.0 / ((m - 1.0) * a);
}

namespace detail {

class SlackTracker {
public:
    explicit SlackTracker(std::string name) { report_.name = std::move(name); }

    /// slack ≥ 0 (or > 0 when strict) means the sample satisfies its condition.
    void add(double slack, double tolerance, int n, double lambda, bool strict = false) {
        ++report_.samples;
        const bool ok = std::isfinite(slack) && (strict ? slack > 0.0 : slack >= 0.0);
        if (!ok) report_.passed = false;
        const bool worse = report_.samples == 1 || !std::isfinite(slack) ||
                           slack < report_.worst_case_margin;
        if (worse && !std::isnan(report_.worst_case_margin)) {
            report_.worst_case_margin = slack;
            report_.tolerance_used = tolerance;
            report_.worst_n = n;
            report_.worst_lambda = lambda;
        }
    }

    void fail(std::string why) {
        report_.passed = false;
        append(std::move(why));
    }

    void append(std::string text) {
        if (!report_.detail.empty()) report_.detail += "; ";
        report_.detail += std::move(text);
    }

    CheckReport take() { return std::move(report_); }

private:
    CheckReport report_;
};

inline void require_grid(int grid_size, int minimum) {
    if (grid_size < minimum) {
        throw ParameterError("grid size must be at least " + std::to_string(minimum));
    }
}

inline std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Individual checks
// ---------------------------------------------------------------------------

/// |G(λ;2) - closed form| ≤ tol on {0.01, ..., 0.99}.
inline CheckReport check_duopoly_closed_form(const IntegrationConfig& cfg = {},
                                             double tol = 1e-10) {
    detail::SlackTracker t("check_duopoly_closed_form");
    for (int i = 1; i <= 99; ++i) {
        const double lambda = i / 100.0;
        const double err = std::abs(g_value(lambda, 2, cfg) - closed_form_g_n2(lambda));
        t.add(tol - err, tol, 2, lambda);
    }
    return t.take();
}

/// G(λ;N) - (1-λ) ≥ 0. Strictly positive on [0.01, 0.99];
/// ≥ -1e-12 elsewhere, including the extra samples λ = 1e-6 and 1 - 1e-6.
inline CheckReport check_prop3(const std::vector<int>& n_list, int grid_size,
                               const IntegrationConfig& cfg = {}) {
    detail::require_grid(grid_size, 100);
    constexpr double kEdgeTol = 1e-12;
    detail::SlackTracker t("check_prop3");
    auto xs = lambda_grid(grid_size);
    xs.insert(xs.begin(), kEndpointOffset);
    xs.push_back(1.0 - kEndpointOffset);
    double interior_min = std::numeric_limits<double>::infinity();
    for (int n : n_list) {
        for (double lambda : xs) {
            const double margin = g_value(lambda, n, cfg) - (1.0 - lambda);
            if (lambda >= 0.01 && lambda <= 0.99) {
                interior_min = std::min(interior_min, margin);
                t.add(margin, 0.0, n, lambda, /*strict=*/true);
            } else {
                t.add(margin + kEdgeTol, kEdgeTol, n, lambda);
            }
        }
    }
    t.append("interior min " + detail::fmt(interior_min));
    return t.take();
}

/// 1-λ ≤ G(λ;n₀) ≤ G(λ;n₁) ≤ ... pointwise, within `tol`.
inline CheckReport check_monotone_in_n(int grid_size, const std::vector<int>& chain = {3, 4, 5},
                                       const IntegrationConfig& cfg = {}, double tol = 1e-9) {
    detail::require_grid(grid_size, 100);
    detail::SlackTracker t("check_monotone_in_n");
    for (double lambda : lambda_grid(grid_size)) {
        double previous = 1.0 - lambda;
        for (int n : chain) {
            const double g = g_value(lambda, n, cfg);
            t.add(g - previous + tol, tol, n, lambda);
            previous = g;
        }
    }
    return t.take();
}

/// Quadrature G' against the closed form in G; relative error ≤ tol.
inline CheckReport check_gprime_identity(const std::vector<int>& n_list, int grid_size,
                                         const IntegrationConfig& cfg = {}, double tol = 1e-8) {
    detail::require_grid(grid_size, 2);
    detail::SlackTracker t("check_gprime_identity");
    for (int n : n_list) {
        for (double lambda : lambda_grid(grid_size)) {
            const double quad = g_prime(lambda, n, cfg);
            const double closed = g_prime_closed(lambda, n, g_value(lambda, n, cfg));
            t.add(tol - std::abs(quad - closed) / std::abs(quad), tol, n, lambda);
        }
    }
    return t.take();
}

/// [(N-1)²(1+λ(N-1))²(1-G)²/N²] H'(λ) = 1 - G/(1-λ), with H' by central
/// difference. Compared where |RHS| > 1e-6. `prefactor_scale` multiplies the
/// left-hand prefactor and exists only as a negative-control hook.
inline CheckReport check_hprime_identity(const std::vector<int>& n_list, int grid_size,
                                         const IntegrationConfig& cfg = {}, double step = 1e-6,
                                         double tol = 1e-4, double prefactor_scale = 1.0) {
    detail::require_grid(grid_size, 2);
    detail::SlackTracker t("check_hprime_identity");
    int negative_rhs = 0;
    int compared = 0;
    for (int n : n_list) {
        auto h_of = [&](double lambda) { return h_value(lambda, n, g_value(lambda, n, cfg)); };
        for (double lambda : lambda_grid(grid_size)) {
            const double g = g_value(lambda, n, cfg);
            const double rhs = 1.0 - g / (1.0 - lambda);
            if (rhs < 0.0) ++negative_rhs;
            if (std::abs(rhs) <= 1e-6) continue;
            const double m = n - 1.0;
            const double scale = 1.0 + lambda * m;
            const double prefactor =
                prefactor_scale * m * m * scale * scale * (1.0 - g) * (1.0 - g) / (double(n) * n);
            const double lhs = prefactor * finite_difference(h_of, lambda, step);
            t.add(tol - std::abs(lhs - rhs) / std::abs(rhs), tol, n, lambda);
            ++compared;
        }
    }
    t.append("step " + detail::fmt(step) + ", compared " + std::to_string(compared) +
             ", RHS < 0 at " + std::to_string(negative_rhs) + " points");
    return t.take();
}

/// ∫ u(u-1)²/d⁴ dy (= -G'''/6) strictly exceeds its closed lower bound.
inline CheckReport check_g3_bound(const std::vector<int>& n_list, int grid_size,
                                  const IntegrationConfig& cfg = {}) {
    detail::require_grid(grid_size, 2);
    detail::SlackTracker t("check_g3_bound");
    for (int n : n_list) {
        for (double lambda : lambda_grid(grid_size)) {
            const double lhs = -g_triple_prime(lambda, n, cfg) / 6.0;
            t.add(lhs - g3_integral_lower_bound(lambda, n), 0.0, n, lambda, /*strict=*/true);
        }
    }
    return t.take();
}

/// G''' < 0 on the grid, G'' changes sign exactly once, and
/// lambda_inflection lands on a root with |G''| ≤ f_tol.
inline CheckReport check_prop2(const std::vector<int>& n_list, int grid_size,
                               const IntegrationConfig& icfg = {}, const SolverConfig& scfg = {}) {
    detail::require_grid(grid_size, 2);
    detail::SlackTracker t("check_prop2");
    for (int n : n_list) {
        int changes = 0;
        double previous = std::numeric_limits<double>::quiet_NaN();
        for (double lambda : lambda_grid(grid_size)) {
            const double g2 = g_double_prime(lambda, n, icfg);
            if (!std::isnan(previous) && ((previous > 0.0 && g2 < 0.0) || (previous < 0.0 && g2 > 0.0))) {
                ++changes;
            }
            previous = g2;
            t.add(-g_triple_prime(lambda, n, icfg), 0.0, n, lambda, /*strict=*/true);
        }
        if (changes != 1) {
            t.fail("N=" + std::to_string(n) + ": " + std::to_string(changes) +
                   " sign changes of G''");
        }
        try {
            const auto r = lambda_inflection(n, scfg, icfg);
            const double residual = std::abs(g_double_prime(r.root, n, icfg));
            t.add(scfg.f_tol - residual, scfg.f_tol, n, r.root);
            t.append("lambda_f(" + std::to_string(n) + ")=" + detail::fmt(r.root));
        } catch (const NumericalError& e) {
            t.fail(e.what());
        }
    }
    return t.take();
}

/// Limit facts at ε-offsets:
///   |G(1e-7) - 1| ≤ 1e-5, |G'(1e-7) + 1| ≤ 1e-4,
///   |G''(1e-6) - 2N(N/(2N-1) - 1/N)| ≤ 1e-3,
///   G(1⁻) = 0: for N = 2, |G(1-1e-7)| ≤ 1e-3; for N ≥ 3 the decay is only
///   (ε/N)^{1/(N-1)}, so G(1-1e-7) is matched to the boundary-layer
///   asymptote within 1e-6 relative.
inline CheckReport check_limits(const std::vector<int>& n_list, const IntegrationConfig& cfg = {}) {
    detail::SlackTracker t("check_limits");
    constexpr double kSmall = 1e-7;
    constexpr double kSmallCurvature = 1e-6;
    constexpr double kNearOne = 1.0 - 1e-7;
    for (int n : n_list) {
        t.add(1e-5 - std::abs(g_value(kSmall, n, cfg) - 1.0), 1e-5, n, kSmall);
        t.add(1e-4 - std::abs(g_prime(kSmall, n, cfg) + 1.0), 1e-4, n, kSmall);
        t.add(1e-3 - std::abs(g_double_prime(kSmallCurvature, n, cfg) - g2_limit_at_zero(n)), 1e-3,
              n, kSmallCurvature);
        const double g_top = g_value(kNearOne, n, cfg);
        if (n == 2) {
            t.add(1e-3 - std::abs(g_top), 1e-3, n, kNearOne);
        } else {
            const double asym = g_boundary_layer_asymptote(kNearOne, n);
            t.add(1e-6 - std::abs(g_top - asym) / asym, 1e-6, n, kNearOne);
        }
    }
    return t.take();
}

/// δ*(λ̂) and δ*(1-1e-7) both equal (N-1)/N within tol; δ*(λ̃) is strictly
/// below (N-1)/N.
inline CheckReport check_delta_endpoints(const std::vector<int>& n_list,
                                         const std::vector<double>& s_list, double valuation,
                                         const IntegrationConfig& icfg = {},
                                         const SolverConfig& scfg = {}, double tol = 1e-6) {
    detail::SlackTracker t("check_delta_endpoints");
    constexpr double kNearOne = 1.0 - 1e-7;
    for (int n : n_list) {
        const double plateau = (n - 1.0) / n;
        for (double s : s_list) {
            const MarketParams base{n, 0.5, s, valuation};
            const auto hat = lambda_hat(n, s, valuation, scfg, icfg);
            const double at_hat = delta_star(base.with_share(hat.root), icfg);
            const double at_top = delta_star(base.with_share(kNearOne), icfg);
            t.add(tol - std::abs(at_hat - plateau), tol, n, hat.root);
            t.add(tol - std::abs(at_top - plateau), tol, n, kNearOne);
            const auto tilde = lambda_tilde(n, s, valuation, scfg, icfg);
            const double dip = plateau - delta_star(base.with_share(tilde.result.root), icfg);
            t.add(dip, 0.0, n, tilde.result.root, /*strict=*/true);
        }
    }
    return t.take();
}

/// Γ changes sign exactly once on a grid over (λ̂, 1), and lambda_tilde lies
/// within one spacing of the argmin of δ* on a `grid_size`-point grid.
inline CheckReport check_delta_minimizer(const std::vector<int>& n_list,
                                         const std::vector<double>& s_list, double valuation,
                                         int grid_size = 10000, const IntegrationConfig& icfg = {},
                                         const SolverConfig& scfg = {}) {
    detail::require_grid(grid_size, 100);
    detail::SlackTracker t("check_delta_minimizer");
    for (int n : n_list) {
        for (double s : s_list) {
            const MarketParams base{n, 0.5, s, valuation};
            const auto tilde = lambda_tilde(n, s, valuation, scfg, icfg);
            if (tilde.fallback) {
                t.fail("N=" + std::to_string(n) + ", s=" + detail::fmt(s) +
                       ": lambda_tilde fell back to grid argmin");
                continue;
            }
            const double lo = tilde.lambda_hat;
            const double spacing = (1.0 - lo) / (grid_size + 1);
            int changes = 0;
            double previous_gamma = std::numeric_limits<double>::quiet_NaN();
            double best_x = lo;
            double best_delta = std::numeric_limits<double>::infinity();
            for (int i = 1; i <= grid_size; ++i) {
                const double x = lo + spacing * i;
                const auto p = base.with_share(x);
                const double g = g_value(x, n, icfg);
                const double price = s / (1.0 - g);
                const double gamma = valuation - price * (1.0 + h_value(x, n, g));
                if (!std::isnan(previous_gamma) &&
                    ((previous_gamma < 0.0 && gamma > 0.0) || (previous_gamma > 0.0 && gamma < 0.0))) {
                    ++changes;
                }
                previous_gamma = gamma;
                const double d = delta_star_from_price(p, price);
                if (d < best_delta) {
                    best_delta = d;
                    best_x = x;
                }
            }
            if (changes != 1) {
                t.fail("N=" + std::to_string(n) + ", s=" + detail::fmt(s) + ": Gamma has " +
                       std::to_string(changes) + " sign changes");
            }
            t.add(spacing - std::abs(tilde.result.root - best_x), spacing, n, tilde.result.root);
        }
    }
    return t.take();
}

/// δ* from the price formula against (π^d - π^c)/(π^d - π*), relative tol, at every
/// grid point in the reservation-price regime.
inline CheckReport check_delta_consistency(const std::vector<int>& n_list,
                                           const std::vector<double>& s_list, double valuation,
                                           int grid_size, const IntegrationConfig& cfg = {},
                                           double tol = 1e-12) {
    detail::require_grid(grid_size, 2);
    detail::SlackTracker t("check_delta_consistency");
    for (int n : n_list) {
        for (double s : s_list) {
            const MarketParams base{n, 0.5, s, valuation};
            for (double lambda : lambda_grid(grid_size)) {
                const auto p = base.with_share(lambda);
                const auto rp = reservation_price(p, cfg);
                if (rp.regime != Regime::ReservationPrice) continue;
                const double from_price = delta_star_from_price(p, rp.price);
                const double general = delta_star_from_profits(profits(p, rp.price));
                t.add(tol - std::abs(from_price - general) / std::abs(general), tol, n, lambda);
            }
        }
    }
    return t.take();
}

/// Γ by v - p*(1+H) against v - p* + λ(1-λ)∂p*/∂λ (error relative to v), and
/// sign(∂δ*/∂λ) by central difference = sign(Γ) wherever |Γ| > 1e-4.
inline CheckReport check_gamma(const std::vector<int>& n_list, const std::vector<double>& s_list,
                               double valuation, int grid_size, const IntegrationConfig& cfg = {},
                               double step = 1e-6, double tol = 1e-8) {
    detail::require_grid(grid_size, 2);
    detail::SlackTracker t("check_gamma");
    int sign_checks = 0;
    for (int n : n_list) {
        for (double s : s_list) {
            const MarketParams base{n, 0.5, s, valuation};
            auto delta_of = [&](double x) { return delta_star(base.with_share(x), cfg); };
            for (double lambda : lambda_grid(grid_size)) {
                const auto p = base.with_share(lambda);
                const auto lower = reservation_price(base.with_share(lambda - step), cfg);
                if (lower.regime != Regime::ReservationPrice) continue;
                const double gamma = gamma_value(p, cfg);
                const double chain = gamma_value_chain(p, cfg);
                t.add(tol - std::abs(gamma - chain) / valuation, tol, n, lambda);
                if (std::abs(gamma) > 1e-4) {
                    const double slope = finite_difference(delta_of, lambda, step);
                    t.add((slope > 0.0) == (gamma > 0.0) ? 0.0 : -1.0, 0.0, n, lambda);
                    ++sign_checks;
                }
            }
        }
    }
    t.append("sign comparisons " + std::to_string(sign_checks));
    return t.take();
}

/// Uniform boundedness smoke test for the G' integrands u/d² as λ → 0:
/// for λ ≤ ε every sample is bounded by max{max over u ≤ 1 of f_ε, N}.
inline CheckReport check_integrand_bounded(const std::vector<int>& n_list, double eps = 0.5,
                                           int samples = 201) {
    detail::SlackTracker t("check_integrand_bounded");
    for (int n : n_list) {
        const double knee = std::pow(1.0 / n, 1.0 / (n - 1.0));
        const GFamilyIntegrand f_eps{eps, n, GOrder::First};
        double bound = n;
        for (double y : uniform_grid(samples, 0.0, knee)) bound = std::max(bound, -f_eps(y));
        for (double lambda : uniform_grid(50, eps / 50.0, eps)) {
            const GFamilyIntegrand f{lambda, n, GOrder::First};
            double sup = 0.0;
            for (double y : uniform_grid(samples, 0.0, 1.0)) sup = std::max(sup, -f(y));
            t.add(bound * (1.0 + 1e-12) - sup, bound, n, lambda);
        }
    }
    return t.take();
}

// ---------------------------------------------------------------------------
// Suite
// ---------------------------------------------------------------------------

struct SuiteConfig {
    std::vector<int> n_list = {3, 4, 5, 6, 7, 8, 9, 10};
    int grid_size = 1001;        ///< property grids (G vs 1-λ, G'' sign change, ordering, G''' bound)
    int identity_grid = 101;     ///< identity grids (G', H', Γ, δ* consistency)
    int argmin_grid = 10000;     ///< δ* argmin oracle for lambda_tilde
    std::vector<int> delta_n_list = {2, 3, 4, 5};
    std::vector<double> s_list = {0.2, 0.6};
    double valuation = 1.0;
    double fd_step = 1e-6;
    double hprime_prefactor_scale = 1.0;  ///< negative-control hook; 1 in normal runs
    IntegrationConfig icfg;
    SolverConfig scfg;
};

struct SuiteResult {
    std::vector<CheckReport> reports;  ///< ordered by name

    [[nodiscard]] bool all_passed() const {
        return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.passed; });
    }
    [[nodiscard]] std::vector<std::string> failed_names() const {
        std::vector<std::string> out;
        for (const auto& r : reports) {
            if (!r.passed) out.push_back(r.name);
        }
        return out;
    }
};

namespace detail {

template <typename Check>
CheckReport guarded(std::string name, Check&& check) {
    try {
        return check();
    } catch (const std::exception& e) {
        CheckReport r;
        r.name = std::move(name);
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
        return r;
    }
}

}  // namespace detail

inline SuiteResult run_suite(const SuiteConfig& c) {
    SuiteResult out;
    auto& r = out.reports;
    r.push_back(detail::guarded("check_duopoly_closed_form",
                                [&] { return check_duopoly_closed_form(c.icfg); }));
    r.push_back(detail::guarded("check_prop3", [&] { return check_prop3(c.n_list, c.grid_size, c.icfg); }));
    r.push_back(detail::guarded("check_monotone_in_n",
                                [&] { return check_monotone_in_n(c.grid_size, {3, 4, 5}, c.icfg); }));
    r.push_back(detail::guarded("check_gprime_identity", [&] {
        std::vector<int> ns = c.n_list;
        if (std::find(ns.begin(), ns.end(), 2) == ns.end()) ns.insert(ns.begin(), 2);
        return check_gprime_identity(ns, c.identity_grid, c.icfg);
    }));
    r.push_back(detail::guarded("check_hprime_identity", [&] {
        return check_hprime_identity(c.n_list, c.identity_grid, c.icfg, c.fd_step, 1e-4,
                                     c.hprime_prefactor_scale);
    }));
    r.push_back(detail::guarded("check_g3_bound", [&] { return check_g3_bound(c.n_list, c.grid_size, c.icfg); }));
    r.push_back(detail::guarded("check_prop2",
                                [&] { return check_prop2(c.n_list, c.grid_size, c.icfg, c.scfg); }));
    r.push_back(detail::guarded("check_limits", [&] {
        std::vector<int> ns = c.n_list;
        if (std::find(ns.begin(), ns.end(), 2) == ns.end()) ns.insert(ns.begin(), 2);
        return check_limits(ns, c.icfg);
    }));
    r.push_back(detail::guarded("check_delta_endpoints", [&] {
        return check_delta_endpoints(c.delta_n_list, c.s_list, c.valuation, c.icfg, c.scfg);
    }));
    r.push_back(detail::guarded("check_delta_minimizer", [&] {
        return check_delta_minimizer(c.delta_n_list, c.s_list, c.valuation, c.argmin_grid, c.icfg,
                                     c.scfg);
    }));
    r.push_back(detail::guarded("check_delta_consistency", [&] {
        return check_delta_consistency(c.delta_n_list, c.s_list, c.valuation, c.identity_grid,
                                       c.icfg);
    }));
    r.push_back(detail::guarded("check_gamma", [&] {
        return check_gamma(c.delta_n_list, c.s_list, c.valuation, c.identity_grid, c.icfg,
                           c.fd_step);
    }));
    r.push_back(detail::guarded("check_integrand_bounded",
                                [&] { return check_integrand_bounded(c.n_list); }));
    std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    return out;
}

inline nlohmann::ordered_json to_json(const CheckReport& r) {
    nlohmann::ordered_json j;
    j["name"] = r.name;
    j["passed"] = r.passed;
    j["margin"] = std::isfinite(r.worst_case_margin) ? nlohmann::ordered_json(r.worst_case_margin)
                                                     : nlohmann::ordered_json(nullptr);
    j["tolerance"] = r.tolerance_used;
    j["location"] = {{"n_firms", r.worst_n}, {"shopper_share", r.worst_lambda}};
    j["samples"] = r.samples;
    j["detail"] = r.detail;
    return j;
}

inline nlohmann::ordered_json to_json(const SuiteResult& s) {
    nlohmann::ordered_json j;
    j["passed"] = s.all_passed();
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& r : s.reports) j["checks"].push_back(to_json(r));
    return j;
}

}  // namespace collusion
