#pragma once

#include <optional>
#include <string>
#include <vector>

#include "altproj/apm.hpp"
#include "altproj/rates.hpp"

namespace altproj {

struct RateEstimate {
    double fitted_exponent = 0.0;  // lambda hat in ||u_k|| ~ C k^-lambda
    double fitted_constant = 0.0;
    double r_squared = 0.0;
    long k_min = 0, k_max = 0;
    std::size_t n_points = 0;
    std::optional<double> product_at_end;
    std::optional<double> linear_ratio;
};

/// Default tail fraction (in log k) for fit_rate.
inline constexpr double kDefaultTailFraction = 0.2;

/// Least squares fit of log ||u_k|| = log C - lambda log k over records with
/// log k >= (1 - tail_fraction) log k_max and ||u_k|| > 1e-13. Throws
/// InsufficientDataError with fewer than 20 such records.
RateEstimate fit_rate(const Trace& t, double tail_fraction = kDefaultTailFraction);

/// Same fit over an explicit window k_lo <= k <= k_hi.
RateEstimate fit_rate_window(const Trace& t, long k_lo, long k_hi);

struct ProductPoint {
    long k;
    double value;
};

/// limit_constant * k^lambda * ||u_k|| at every recorded k >= 1. Throws
/// InapplicableError when the prediction carries no constant or exponent.
std::vector<ProductPoint> check_limit_product(const Trace& t, const RatePrediction& pred);

/// Limiting ratio ||u_{k+1}|| / ||u_k|| when the last half of the
/// consecutive-step ratios has relative spread below 1e-2 and mean below
/// 0.999. Needs at least 20 records above the norm floor.
std::optional<double> detect_linear(const Trace& t);

/// Flat "key = value" report.
std::string serialize(const RateEstimate& e);

}  // namespace altproj
