#include "altproj/estimate.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace altproj {

namespace {

constexpr double kFitFloor = 1e-13;
constexpr std::size_t kMinPoints = 20;

RateEstimate ols(const std::vector<double>& lx, const std::vector<double>& ly, long k_min, long k_max) {
    if (lx.size() < kMinPoints) {
        throw InsufficientDataError("rate fit: " + std::to_string(lx.size()) + " tail points, need at least " +
                                    std::to_string(kMinPoints));
    }
    const double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0) throw InsufficientDataError("rate fit: all tail points share one k");
    const double slope = sxy / sxx;
    RateEstimate e;
    e.fitted_exponent = -slope;
    e.fitted_constant = std::exp(my - slope * mx);
    e.r_squared = syy == 0.0 ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
    e.k_min = k_min;
    e.k_max = k_max;
    e.n_points = lx.size();
    return e;
}

}  // namespace

RateEstimate fit_rate_window(const Trace& t, long k_lo, long k_hi) {
    std::vector<double> lx, ly;
    long kmin = 0, kmax = 0;
    for (const auto& r : t.records) {
        if (r.k < std::max(1L, k_lo) || r.k > k_hi || !(r.norm_u > kFitFloor)) continue;
        if (lx.empty()) kmin = r.k;
        kmax = r.k;
        lx.push_back(std::log(static_cast<double>(r.k)));
        ly.push_back(std::log(r.norm_u));
    }
    return ols(lx, ly, kmin, kmax);
}

RateEstimate fit_rate(const Trace& t, double tail_fraction) {
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw PreconditionError("rate fit: tail fraction not in (0, 1]");
    long kmax = 0;
    for (const auto& r : t.records) {
        if (r.norm_u > kFitFloor) kmax = std::max(kmax, r.k);
    }
    if (kmax < 2) throw InsufficientDataError("rate fit: trace too short");
    const double lo = std::exp((1.0 - tail_fraction) * std::log(static_cast<double>(kmax)));
    return fit_rate_window(t, static_cast<long>(std::ceil(lo - 1e-9)), kmax);
}

std::vector<ProductPoint> check_limit_product(const Trace& t, const RatePrediction& pred) {
    if (!pred.limit_constant || !pred.lambda) {
        throw InapplicableError("limit product: prediction has no " +
                                std::string(pred.lambda ? "limit constant" : "exponent"));
    }
    const double L = *pred.limit_constant;
    const double lambda = to_double(*pred.lambda);
    std::vector<ProductPoint> out;
    for (const auto& r : t.records) {
        if (r.k < 1) continue;
        out.push_back({r.k, L * std::pow(static_cast<double>(r.k), lambda) * r.norm_u});
    }
    return out;
}

std::optional<double> detect_linear(const Trace& t) {
    std::size_t above = 0;
    for (const auto& r : t.records) above += r.norm_u >= kNormFloor;
    if (above < kMinPoints) return std::nullopt;
    std::vector<double> ratios;
    for (std::size_t i = 0; i + 1 < t.records.size(); ++i) {
        const auto& a = t.records[i];
        const auto& b = t.records[i + 1];
        if (b.k != a.k + 1 || a.norm_u < kNormFloor || b.norm_u < kNormFloor) continue;
        ratios.push_back(b.norm_u / a.norm_u);
    }
    if (ratios.size() < 2) return std::nullopt;
    const std::vector<double> tail(ratios.begin() + static_cast<long>(ratios.size() / 2), ratios.end());
    double mean = 0.0, lo = tail.front(), hi = tail.front();
    for (double r : tail) {
        mean += r;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    mean /= static_cast<double>(tail.size());
    if ((hi - lo) / mean < 1e-2 && mean < 0.999) return mean;
    return std::nullopt;
}

std::string serialize(const RateEstimate& e) {
    auto num = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    std::ostringstream os;
    os << "fitted_exponent = " << num(e.fitted_exponent) << '\n';
    os << "fitted_constant = " << num(e.fitted_constant) << '\n';
    os << "r_squared = " << num(e.r_squared) << '\n';
    os << "k_min = " << e.k_min << '\n';
    os << "k_max = " << e.k_max << '\n';
    os << "n_points = " << e.n_points << '\n';
    os << "product_at_end = " << (e.product_at_end ? num(*e.product_at_end) : "none") << '\n';
    os << "linear_ratio = " << (e.linear_ratio ? num(*e.linear_ratio) : "none") << '\n';
    return os.str();
}

}  // namespace altproj
