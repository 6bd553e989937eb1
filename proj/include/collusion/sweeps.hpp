#pragma once

/// λ-grid sweeps behind the critical-discount-factor and G-ordering figures.
/// Rows are built only from model operations.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "collusion/curve_table.hpp"
#include "collusion/errors.hpp"
#include "collusion/model.hpp"
#include "collusion/quadrature.hpp"

namespace collusion {

struct SweepOptions {
    int grid_points = 1001;
    double lambda_min = 1e-4;
    double lambda_max = 1.0 - 1e-4;
    IntegrationConfig icfg;

    void validate() const {
        if (grid_points < 2) throw ParameterError("sweep grid needs at least 2 points");
        if (!(lambda_min > 0.0 && lambda_min < lambda_max && lambda_max < 1.0)) {
            throw ParameterError("sweep range must satisfy 0 < lambda_min < lambda_max < 1");
        }
        icfg.validate();
    }

    [[nodiscard]] double at(int i) const {
        if (i == grid_points - 1) return lambda_max;
        return lambda_min + (lambda_max - lambda_min) * i / (grid_points - 1);
    }
};

struct SweepOutput {
    CurveTable table;
    std::vector<std::string> row_errors;  ///< numerical failures, one entry per affected row
};

/// Regime column encoding: 1 = reservation price binds, 0 = it does not.
inline constexpr double kRegimeReservationPrice = 1.0;
inline constexpr double kRegimeNoReservationPrice = 0.0;

/// Columns lambda, G, p_star, delta_star, gamma, regime. δ* and Γ are n/a
/// below λ̂. A row whose quadrature fails keeps λ and n/a elsewhere.
inline SweepOutput sweep_delta(int n_firms, double search_cost, double valuation,
                               const SweepOptions& opt = {}) {
    opt.validate();
    const MarketParams base{n_firms, 0.5, search_cost, valuation};
    base.validate();

    SweepOutput out;
    out.table.column_names = {"lambda", "G", "p_star", "delta_star", "gamma", "regime"};
    out.table.rows.reserve(opt.grid_points);
    for (int i = 0; i < opt.grid_points; ++i) {
        const double lambda = opt.at(i);
        std::vector<Cell> row(6);
        row[0] = lambda;
        try {
            const auto p = base.with_share(lambda);
            const double g = g_value(lambda, n_firms, opt.icfg);
            const auto rp = reservation_price(p, opt.icfg);
            row[1] = g;
            row[2] = rp.price;
            if (rp.regime == Regime::ReservationPrice) {
                row[3] = delta_star_from_price(p, rp.price);
                row[4] = valuation - rp.price * (1.0 + h_value(lambda, n_firms, g));
                row[5] = kRegimeReservationPrice;
            } else {
                row[5] = kRegimeNoReservationPrice;
            }
        } catch (const NumericalError& e) {
            out.row_errors.push_back("row " + std::to_string(i) + " (lambda " +
                                     format_number(lambda) + "): " + e.what());
        }
        out.table.rows.push_back(std::move(row));
    }
    return out;
}

/// Columns lambda, one_minus_lambda, g<N> for each N in `n_list`.
inline SweepOutput sweep_g(const std::vector<int>& n_list, const SweepOptions& opt = {}) {
    opt.validate();
    if (n_list.empty()) throw ParameterError("sweep_g needs at least one N");
    for (int n : n_list) validate_share_and_firms(0.5, n);

    SweepOutput out;
    out.table.column_names = {"lambda", "one_minus_lambda"};
    for (int n : n_list) out.table.column_names.push_back("g" + std::to_string(n));
    for (int i = 0; i < opt.grid_points; ++i) {
        const double lambda = opt.at(i);
        std::vector<Cell> row;
        row.push_back(lambda);
        row.push_back(1.0 - lambda);
        for (int n : n_list) {
            try {
                row.push_back(g_value(lambda, n, opt.icfg));
            } catch (const NumericalError& e) {
                row.push_back(std::nullopt);
                out.row_errors.push_back("row " + std::to_string(i) + " N=" + std::to_string(n) +
                                         ": " + e.what());
            }
        }
        out.table.rows.push_back(std::move(row));
    }
    return out;
}

/// First row index (if any) where columns 1..k are not non-decreasing left
/// to right by more than `tol`; n/a cells count as violations.
inline std::optional<std::size_t> first_ordering_violation(const CurveTable& t, double tol = 1e-9) {
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        for (std::size_t k = 2; k < row.size(); ++k) {
            if (!row[k] || !row[k - 1] || *row[k] < *row[k - 1] - tol) return i;
        }
    }
    return std::nullopt;
}

}  // namespace collusion
