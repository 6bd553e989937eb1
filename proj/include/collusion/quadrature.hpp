#pragma once

/// Adaptive Gauss-Kronrod quadrature on a finite interval.
///
/// The integrands of the search model develop a boundary layer near y = 0
/// when the shopper share approaches one. A global adaptive scheme that
/// always bisects the subinterval with the largest error estimate places
/// nodes there without any knowledge of the layer width.

#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <queue>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "collusion/errors.hpp"

namespace collusion {

struct IntegrationConfig {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_depth = 60;         ///< maximum bisection depth of any subinterval
    double min_interval = 1e-15;  ///< subintervals narrower than this are not split

    void validate() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_depth < 1 || !(min_interval > 0.0)) {
            throw ParameterError("IntegrationConfig requires abs_tol > 0, rel_tol > 0, "
                                 "max_depth >= 1 and min_interval > 0");
        }
    }

    /// Error target for a running estimate of magnitude |value|.
    [[nodiscard]] double target(double value) const {
        return std::max(abs_tol, rel_tol * std::abs(value));
    }
};

struct IntegralResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    std::int64_t evaluations = 0;
    bool converged = false;
};

/// Thrown when the integrand returns NaN or ±inf at a node.
class IntegrationError : public NumericalError {
public:
    IntegrationError(double y, double fy)
        : NumericalError(describe(y, fy)), location_(y) {}

    [[nodiscard]] double location() const noexcept { return location_; }

private:
    static std::string describe(double y, double fy) {
        std::ostringstream os;
        os.precision(17);
        os << "integrand is not finite at y = " << y << " (value " << fy << ")";
        return os.str();
    }

    double location_;
};

template <typename F>
concept Integrand = std::invocable<F&, double> &&
                    std::convertible_to<std::invoke_result_t<F&, double>, double>;

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss-Legendre rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd Kronrod nodes (indices 1, 3, 5) and the centre.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double lo;
    double hi;
    double value;
    double error;
    bool roundoff_limited;
    int depth;
};

struct LargestErrorFirst {
    bool operator()(const Segment& x, const Segment& y) const {
        if (x.error != y.error) return x.error < y.error;
        return x.lo > y.lo;
    }
};

template <typename F>
double checked_eval(F& f, double y) {
    const double fy = static_cast<double>(f(y));
    if (!std::isfinite(fy)) throw IntegrationError(y, fy);
    return fy;
}

/// One GK15 panel with the QUADPACK error heuristic.
template <typename F>
Segment gauss_kronrod_15(F& f, double lo, double hi, int depth) {
    const double centre = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);

    const double f_centre = checked_eval(f, centre);
    double kronrod = f_centre * kKronrodWeights[7];
    double gauss = f_centre * kGaussWeights[3];
    double abs_sum = std::abs(kronrod);

    std::array<double, 7> f_left{};
    std::array<double, 7> f_right{};
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        const double fl = checked_eval(f, centre - dx);
        const double fr = checked_eval(f, centre + dx);
        f_left[j] = fl;
        f_right[j] = fr;
        kronrod += kKronrodWeights[j] * (fl + fr);
        abs_sum += kKronrodWeights[j] * (std::abs(fl) + std::abs(fr));
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (fl + fr);
    }

    const double mean = 0.5 * kronrod;
    double asc = kKronrodWeights[7] * std::abs(f_centre - mean);
    for (std::size_t j = 0; j < 7; ++j) {
        asc += kKronrodWeights[j] * (std::abs(f_left[j] - mean) + std::abs(f_right[j] - mean));
    }

    const double value = kronrod * half;
    const double resabs = abs_sum * std::abs(half);
    const double resasc = asc * std::abs(half);
    double error = std::abs((kronrod - gauss) * half);
    if (resasc != 0.0 && error != 0.0) {
        error = resasc * std::min(1.0, std::pow(200.0 * error / resasc, 1.5));
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    bool roundoff_limited = false;
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
        const double floor = 50.0 * eps * resabs;
        if (error <= floor) {
            error = floor;
            roundoff_limited = true;
        }
    }
    return Segment{lo, hi, value, error, roundoff_limited, depth};
}

}  // namespace detail

/// Integrates f over [lo, hi]. Non-convergence is reported through
/// IntegralResult::converged, never thrown; a non-finite integrand value
/// throws IntegrationError.
template <Integrand F>
IntegralResult integrate(F&& f, double lo, double hi, const IntegrationConfig& cfg = {}) {
    cfg.validate();
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw ParameterError("integrate requires a finite interval with lo < hi");
    }

    std::priority_queue<detail::Segment, std::vector<detail::Segment>, detail::LargestErrorFirst>
        active;
    std::vector<detail::Segment> frozen;

    IntegralResult out;
    auto first = detail::gauss_kronrod_15(f, lo, hi, 0);
    out.evaluations = 15;
    double value = first.value;
    double error = first.error;
    active.push(first);

    auto exact_totals = [&]() {
        double v = 0.0;
        double e = 0.0;
        auto q = active;
        while (!q.empty()) {
            v += q.top().value;
            e += q.top().error;
            q.pop();
        }
        for (const auto& s : frozen) {
            v += s.value;
            e += s.error;
        }
        value = v;
        error = e;
    };

    while (true) {
        if (error <= cfg.target(value)) {
            exact_totals();
            if (error <= cfg.target(value)) {
                out.converged = true;
                break;
            }
        }
        if (active.empty()) break;

        const detail::Segment worst = active.top();
        active.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        const bool splittable = worst.depth < cfg.max_depth &&
                                0.5 * (worst.hi - worst.lo) >= cfg.min_interval &&
                                mid > worst.lo && mid < worst.hi && !worst.roundoff_limited;
        if (!splittable) {
            frozen.push_back(worst);
            continue;
        }
        auto left = detail::gauss_kronrod_15(f, worst.lo, mid, worst.depth + 1);
        auto right = detail::gauss_kronrod_15(f, mid, worst.hi, worst.depth + 1);
        out.evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        error = std::max(error, 0.0);
        active.push(left);
        active.push(right);
    }

    if (!out.converged) exact_totals();
    out.value = value;
    out.abs_error_estimate = error;
    return out;
}

/// ∫₀¹ f(y) dy.
template <Integrand F>
IntegralResult integrate(F&& f, const IntegrationConfig& cfg = {}) {
    return integrate(std::forward<F>(f), 0.0, 1.0, cfg);
}

}  // namespace collusion
