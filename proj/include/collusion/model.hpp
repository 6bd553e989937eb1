#pragma once

/// Economic quantities of the N-firm costly sequential search market as
/// pure functions of (N, λ, s, v).
///
/// Notation used throughout:
///   u(y) = N y^{N-1},   d(y) = (1-λ) + λ u(y) = 1 + λ(u-1)
///   G(λ;N)   = ∫₀¹ (1-λ)/d dy
///   G'(λ;N)  = -∫₀¹ u/d² dy
///   G''(λ;N) =  ∫₀¹ 2u(u-1)/d³ dy
///   G'''(λ;N)= -∫₀¹ 6u(u-1)²/d⁴ dy
/// The stable form (1-λ)/d is used instead of 1/(1 + λ/(1-λ) u) so nothing
/// overflows as λ → 1.

#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "collusion/errors.hpp"
#include "collusion/quadrature.hpp"

namespace collusion {

inline constexpr int kMinFirms = 2;
inline constexpr int kMaxFirms = 64;

/// Throws ParameterError unless λ ∈ (0,1) and N ∈ [2, 64].
inline void validate_share_and_firms(double shopper_share, int n_firms) {
    if (!(shopper_share > 0.0 && shopper_share < 1.0)) {
        std::ostringstream os;
        os.precision(17);
        os << "shopper share must lie in the open interval (0,1), got " << shopper_share;
        throw ParameterError(os.str());
    }
    if (n_firms < kMinFirms || n_firms > kMaxFirms) {
        throw ParameterError("number of firms must lie in [2, 64], got " +
                             std::to_string(n_firms));
    }
}

/// Throws ParameterError unless 0 < s < v (both finite).
inline void validate_costs(double search_cost, double valuation) {
    if (!(search_cost > 0.0) || !(search_cost < valuation) || !std::isfinite(valuation)) {
        std::ostringstream os;
        os.precision(17);
        os << "search cost and valuation must satisfy 0 < s < v, got s = " << search_cost
           << ", v = " << valuation;
        throw ParameterError(os.str());
    }
}

struct MarketParams {
    int n_firms = 2;
    double shopper_share = 0.5;  ///< λ
    double search_cost = 0.2;    ///< s
    double valuation = 1.0;      ///< v

    void validate() const {
        validate_share_and_firms(shopper_share, n_firms);
        validate_costs(search_cost, valuation);
    }

    [[nodiscard]] MarketParams with_share(double lambda) const {
        MarketParams p = *this;
        p.shopper_share = lambda;
        return p;
    }
};

enum class Regime { ReservationPrice, NoReservationPrice };

[[nodiscard]] inline std::string_view to_string(Regime r) {
    return r == Regime::ReservationPrice ? "ReservationPrice" : "NoReservationPrice";
}

/// G and its first three λ-derivatives with their quadrature error estimates.
struct GDerivatives {
    double g = 0.0;
    double g1 = 0.0;
    double g2 = 0.0;
    double g3 = 0.0;
    std::array<double, 4> abs_errors{};
};

struct Profits {
    double collusive = 0.0;  ///< π^c
    double deviation = 0.0;  ///< π^d
    double nash = 0.0;       ///< π*
};

struct ReservationPriceResult {
    double price = 0.0;  ///< p*
    Regime regime = Regime::ReservationPrice;
};

struct EquilibriumPoint {
    MarketParams params;
    GDerivatives g_family;
    double p_star = 0.0;
    double profit_collusive = 0.0;
    double profit_deviation = 0.0;
    double profit_nash = 0.0;
    // Not applicable (empty) in the NoReservationPrice regime.
    std::optional<double> delta_star;
    std::optional<double> h;
    std::optional<double> gamma;
    Regime regime = Regime::ReservationPrice;
};

// ---------------------------------------------------------------------------
// Integrands
// ---------------------------------------------------------------------------

/// Order of the λ-derivative of G an integrand represents (0 = G itself).
enum class GOrder { Value = 0, First = 1, Second = 2, Third = 3 };

namespace detail {

inline double int_pow(double y, int k) {
    double r = 1.0;
    double base = y;
    while (k > 0) {
        if (k & 1) r *= base;
        base *= base;
        k >>= 1;
    }
    return r;
}

}  // namespace detail

/// Integrand in y of the requested member of the G family at fixed (λ, N).
struct GFamilyIntegrand {
    double shopper_share;
    int n_firms;
    GOrder order;

    double operator()(double y) const {
        const double lambda = shopper_share;
        const double u = n_firms * detail::int_pow(y, n_firms - 1);
        const double d = (1.0 - lambda) + lambda * u;
        switch (order) {
            case GOrder::Value:
                return (1.0 - lambda) / d;
            case GOrder::First:
                return -u / (d * d);
            case GOrder::Second:
                return 2.0 * u * (u - 1.0) / (d * d * d);
            case GOrder::Third: {
                const double d2 = d * d;
                return -6.0 * u * (u - 1.0) * (u - 1.0) / (d2 * d2);
            }
        }
        return 0.0;
    }
};

/// Raw quadrature result for one member of the G family; never throws on
/// non-convergence.
inline IntegralResult g_integral(double shopper_share, int n_firms, GOrder order,
                                 const IntegrationConfig& cfg = {}) {
    validate_share_and_firms(shopper_share, n_firms);
    return integrate(GFamilyIntegrand{shopper_share, n_firms, order}, cfg);
}

namespace detail {

inline double converged_or_throw(const IntegralResult& r, std::string_view what,
                                 double shopper_share, int n_firms) {
    if (!r.converged) {
        std::ostringstream os;
        os.precision(17);
        os << "quadrature for " << what << " did not converge at lambda = " << shopper_share
           << ", N = " << n_firms << " (estimate " << r.value << ", error estimate "
           << r.abs_error_estimate << ")";
        throw NumericalError(os.str());
    }
    return r.value;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// G and derivatives
// ---------------------------------------------------------------------------

inline double g_value(double shopper_share, int n_firms, const IntegrationConfig& cfg = {}) {
    return detail::converged_or_throw(g_integral(shopper_share, n_firms, GOrder::Value, cfg), "G",
                                      shopper_share, n_firms);
}

inline double g_prime(double shopper_share, int n_firms, const IntegrationConfig& cfg = {}) {
    return detail::converged_or_throw(g_integral(shopper_share, n_firms, GOrder::First, cfg),
                                      "G'", shopper_share, n_firms);
}

inline double g_double_prime(double shopper_share, int n_firms,
                             const IntegrationConfig& cfg = {}) {
    return detail::converged_or_throw(g_integral(shopper_share, n_firms, GOrder::Second, cfg),
                                      "G''", shopper_share, n_firms);
}

inline double g_triple_prime(double shopper_share, int n_firms,
                             const IntegrationConfig& cfg = {}) {
    return detail::converged_or_throw(g_integral(shopper_share, n_firms, GOrder::Third, cfg),
                                      "G'''", shopper_share, n_firms);
}

inline double g_value(const MarketParams& p, const IntegrationConfig& cfg = {}) {
    p.validate();
    return g_value(p.shopper_share, p.n_firms, cfg);
}
inline double g_prime(const MarketParams& p, const IntegrationConfig& cfg = {}) {
    p.validate();
    return g_prime(p.shopper_share, p.n_firms, cfg);
}
inline double g_double_prime(const MarketParams& p, const IntegrationConfig& cfg = {}) {
    p.validate();
    return g_double_prime(p.shopper_share, p.n_firms, cfg);
}
inline double g_triple_prime(const MarketParams& p, const IntegrationConfig& cfg = {}) {
    p.validate();
    return g_triple_prime(p.shopper_share, p.n_firms, cfg);
}

inline GDerivatives g_derivatives(double shopper_share, int n_firms,
                                  const IntegrationConfig& cfg = {}) {
    GDerivatives out;
    std::array<double*, 4> slots = {&out.g, &out.g1, &out.g2, &out.g3};
    constexpr std::array<std::string_view, 4> names = {"G", "G'", "G''", "G'''"};
    for (int k = 0; k < 4; ++k) {
        const auto r = g_integral(shopper_share, n_firms, static_cast<GOrder>(k), cfg);
        *slots[k] = detail::converged_or_throw(r, names[k], shopper_share, n_firms);
        out.abs_errors[k] = r.abs_error_estimate;
    }
    return out;
}

/// G' recovered from G alone:
///   G' = -[G(1+λ(N-1)) - (1-λ)] / [λ(N-1)(1+λ(N-1))(1-λ)].
inline double g_prime_closed(double shopper_share, int n_firms, double g) {
    validate_share_and_firms(shopper_share, n_firms);
    const double lambda = shopper_share;
    const double m = n_firms - 1.0;
    const double scale = 1.0 + lambda * m;
    return -(g * scale - (1.0 - lambda)) / (lambda * m * scale * (1.0 - lambda));
}

/// H(λ) = [G(1+λ(N-1)) - (1-λ)] / [(N-1)(1+λ(N-1))(1-G)], so that Γ = v - p*(1+H).
inline double h_value(double shopper_share, int n_firms, double g) {
    validate_share_and_firms(shopper_share, n_firms);
    const double lambda = shopper_share;
    const double m = n_firms - 1.0;
    const double scale = 1.0 + lambda * m;
    return (g * scale - (1.0 - lambda)) / (m * scale * (1.0 - g));
}

// ---------------------------------------------------------------------------
// Prices, profits, critical discount factor
// ---------------------------------------------------------------------------

/// p* = s / (1 - G). The reservation price binds iff p* ≤ v.
inline ReservationPriceResult reservation_price(const MarketParams& p,
                                                const IntegrationConfig& cfg = {}) {
    p.validate();
    const double g = g_value(p.shopper_share, p.n_firms, cfg);
    if (!(g < 1.0)) {
        throw NumericalError("G evaluated to 1 at lambda = " + std::to_string(p.shopper_share) +
                             "; reservation price is unbounded");
    }
    const double price = p.search_cost / (1.0 - g);
    return {price, price <= p.valuation ? Regime::ReservationPrice : Regime::NoReservationPrice};
}

inline Profits profits(const MarketParams& p, double p_star) {
    p.validate();
    const double lambda = p.shopper_share;
    const double n = p.n_firms;
    return Profits{
        .collusive = p.valuation / n,
        .deviation = p.valuation * ((1.0 - lambda) / n + lambda),
        .nash = p_star * (1.0 - lambda) / n,
    };
}

/// δ* = (π^d - π^c) / (π^d - π*), the grim-trigger threshold in profit form.
inline double delta_star_from_profits(const Profits& pi) {
    return (pi.deviation - pi.collusive) / (pi.deviation - pi.nash);
}

/// δ* = λ(N-1) / (1 + λ(N-1) - p*(1-λ)/v) for a given reservation price.
inline double delta_star_from_price(const MarketParams& p, double p_star) {
    p.validate();
    const double lambda = p.shopper_share;
    const double m = p.n_firms - 1.0;
    return lambda * m / (1.0 + lambda * m - p_star * (1.0 - lambda) / p.valuation);
}

/// Critical discount factor; defined only where the reservation price binds.
inline double delta_star(const MarketParams& p, const IntegrationConfig& cfg = {}) {
    const auto rp = reservation_price(p, cfg);
    if (rp.regime != Regime::ReservationPrice) {
        std::ostringstream os;
        os.precision(17);
        os << "critical discount factor undefined: lambda = " << p.shopper_share
           << " is below the reservation-price threshold lambda_hat (p* = " << rp.price
           << " > v = " << p.valuation << ")";
        throw DomainError(os.str());
    }
    return delta_star_from_price(p, rp.price);
}

/// ∂p*/∂λ = s G' / (1-G)².
inline double reservation_price_slope(const MarketParams& p, const IntegrationConfig& cfg = {}) {
    p.validate();
    const double g = g_value(p.shopper_share, p.n_firms, cfg);
    const double g1 = g_prime(p.shopper_share, p.n_firms, cfg);
    return p.search_cost * g1 / ((1.0 - g) * (1.0 - g));
}

/// Γ(λ;N) = v - p*(1 + H(λ)). Sign of ∂δ*/∂λ.
inline double gamma_value(const MarketParams& p, const IntegrationConfig& cfg = {}) {
    p.validate();
    const double g = g_value(p.shopper_share, p.n_firms, cfg);
    const double price = p.search_cost / (1.0 - g);
    return p.valuation - price * (1.0 + h_value(p.shopper_share, p.n_firms, g));
}

/// Γ through the chain rule: v - p* + λ(1-λ) ∂p*/∂λ with a quadrature G'.
inline double gamma_value_chain(const MarketParams& p, const IntegrationConfig& cfg = {}) {
    p.validate();
    const double g = g_value(p.shopper_share, p.n_firms, cfg);
    const double price = p.search_cost / (1.0 - g);
    const double lambda = p.shopper_share;
    return p.valuation - price + lambda * (1.0 - lambda) * reservation_price_slope(p, cfg);
}

/// ∂δ*/∂λ = (v/N²)(N-1) Γ / (π^d - π*)².
inline double delta_star_slope(const MarketParams& p, const IntegrationConfig& cfg = {}) {
    const auto rp = reservation_price(p, cfg);
    const auto pi = profits(p, rp.price);
    const double n = p.n_firms;
    const double gap = pi.deviation - pi.nash;
    return p.valuation / (n * n) * (n - 1.0) * gamma_value(p, cfg) / (gap * gap);
}

inline EquilibriumPoint equilibrium_point(const MarketParams& p, const IntegrationConfig& cfg = {}) {
    p.validate();
    EquilibriumPoint e;
    e.params = p;
    e.g_family = g_derivatives(p.shopper_share, p.n_firms, cfg);
    const double g = e.g_family.g;
    if (!(g < 1.0)) throw NumericalError("G evaluated to 1; reservation price is unbounded");
    e.p_star = p.search_cost / (1.0 - g);
    e.regime = e.p_star <= p.valuation ? Regime::ReservationPrice : Regime::NoReservationPrice;
    const auto pi = profits(p, e.p_star);
    e.profit_collusive = pi.collusive;
    e.profit_deviation = pi.deviation;
    e.profit_nash = pi.nash;
    if (e.regime == Regime::ReservationPrice) {
        e.delta_star = delta_star_from_price(p, e.p_star);
        e.h = h_value(p.shopper_share, p.n_firms, g);
        e.gamma = p.valuation - e.p_star * (1.0 + *e.h);
    }
    return e;
}

}  // namespace collusion
