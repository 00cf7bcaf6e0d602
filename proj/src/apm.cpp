#include "altproj/apm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace altproj {

namespace {

double ipow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

}  // namespace

std::vector<long> record_schedule(long max_iter, int records_per_octave) {
    if (max_iter < 0) throw PreconditionError("iteration budget must be nonnegative");
    if (records_per_octave < 1) throw PreconditionError("records_per_octave must be positive");
    std::vector<long> ks;
    constexpr long kDense = 32;
    for (long k = 0; k <= std::min(max_iter, kDense - 1); ++k) ks.push_back(k);
    for (long m = 5L * records_per_octave;; ++m) {
        const double v = std::exp2(static_cast<double>(m) / records_per_octave);
        const auto k = static_cast<long>(std::llround(v));
        if (k > max_iter) break;
        if (k >= kDense) {
            ks.push_back(k);
            if (k + 1 <= max_iter) ks.push_back(k + 1);
        }
    }
    ks.push_back(max_iter);
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    return ks;
}

Trace run_apm(const Scenario& s) {
    const auto m = ambient_dim(s.set);
    if (s.u0.size() != m || s.subspace.ambient_dim() != m) {
        throw DimensionError("scenario: set, subspace and u0 live in different dimensions");
    }
    if (s.subspace.distance(s.u0) > 1e-12 * std::max(1.0, s.u0.norm())) {
        throw PreconditionError("scenario: u0 is not in B");
    }
    if (s.max_iter < 1) throw PreconditionError("scenario: max_iter must be at least 1");
    const std::vector<long> schedule = record_schedule(s.max_iter, s.records_per_octave);
    auto next_rec = schedule.begin();

    Trace t;
    Vec u = s.u0;
    for (long k = 0;; ++k) {
        const double nu = u.norm();
        const bool record = next_rec != schedule.end() && *next_rec == k;
        if (record) ++next_rec;
        if (nu < kNormFloor) {
            TraceRecord r;
            r.k = k;
            r.u = u;
            r.norm_u = nu;
            r.a = u;
            t.records.push_back(std::move(r));
            t.stop = StopReason::BelowFloor;
            return t;
        }
        KKTResult pa;
        try {
            pa = project(s.set, u, s.solver);
        } catch (const SolverFailure& e) {
            throw SolverFailure(std::string(e.what()) + " at step " + std::to_string(k), e.residual(), k);
        }
        if (pa.ambiguous) ++t.ambiguous_projections;
        Vec next = s.subspace.project(pa.point);
        if (record || k == s.max_iter) {
            TraceRecord r;
            r.k = k;
            r.u = u;
            r.norm_u = nu;
            r.dist_a_to_B = (pa.point - next).norm();
            r.a = std::move(pa.point);
            r.active = std::move(pa.active);
            t.records.push_back(std::move(r));
        }
        if (k == s.max_iter) break;
        u = std::move(next);
    }
    t.stop = StopReason::Completed;
    return t;
}

std::string encode_active(const std::vector<int>& active) {
    if (active.empty()) return "none";
    std::string out;
    for (int i : active) {
        if (!out.empty()) out += "+";
        out += std::to_string(i);
    }
    return out;
}

void write_trace_csv(std::ostream& os, const Trace& t) {
    const Eigen::Index m = t.records.empty() ? 0 : t.records.front().u.size();
    os << "k,norm_u";
    for (Eigen::Index i = 1; i <= m; ++i) os << ",u_" << i;
    os << ",active,dist_a_to_B\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    };
    for (const auto& r : t.records) {
        os << r.k << ',' << num(r.norm_u);
        for (Eigen::Index i = 0; i < m; ++i) os << ',' << num(r.u[i]);
        os << ',' << encode_active(r.active) << ',' << num(r.dist_a_to_B) << '\n';
    }
}

std::vector<double> run_recursion_oracle(const RecursionSpec& r) {
    if (!(r.C > 0.0)) throw PreconditionError("recursion oracle: C must be positive");
    if (r.q < 1) throw PreconditionError("recursion oracle: q must be at least 1");
    if (r.x0 < 0.0) throw PreconditionError("recursion oracle: x0 must be nonnegative");
    if (r.K < 0) throw PreconditionError("recursion oracle: K must be nonnegative");
    const double C = r.C;
    const int q = r.q;
    const UniSeries dh = r.h.derivative();
    // G(x) = x + C x^(q+1) + x^(q+2) h(x) and G'(x).
    auto G = [&](double x) {
        const double xq = ipow(x, q);
        return x + C * xq * x + xq * x * x * r.h.evaluate(x);
    };
    auto dG = [&](double x) {
        const double xq = ipow(x, q);
        return 1.0 + C * (q + 1) * xq + xq * x * ((q + 2) * r.h.evaluate(x) + x * dh.evaluate(x));
    };
    constexpr int kProbe = 256;
    for (int i = 0; i <= kProbe; ++i) {
        const double x = r.x0 * i / kProbe;
        if (!(dG(x) > 0.0)) throw PreconditionError("recursion oracle: forward map is not increasing on [0, x0]");
    }
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(r.K) + 1);
    xs.push_back(r.x0);
    double x = r.x0;
    for (long k = 0; k < r.K; ++k) {
        const double target = x;
        if (target == 0.0) {
            xs.push_back(0.0);
            continue;
        }
        double lo = 0.0, hi = target;
        if (G(hi) < target) throw PreconditionError("recursion oracle: forward map is not increasing");
        // Newton from the first-order inverse, kept inside [lo, hi].
        double y = target / (1.0 + C * ipow(target, q));
        for (int it = 0; it < 200; ++it) {
            const double gy = G(y) - target;
            if (gy > 0.0) {
                hi = y;
            } else {
                lo = y;
            }
            const double d = dG(y);
            double next = y - gy / d;
            if (!(next > lo && next < hi) || !(d > 0.0)) next = 0.5 * (lo + hi);
            const bool done = std::abs(next - y) <= 1e-15 * y || hi - lo <= 1e-15 * hi;
            y = next;
            if (done) break;
        }
        x = y;
        xs.push_back(x);
    }
    return xs;
}

namespace {

// Indices i with records[i + 1].k == records[i].k + 1.
std::vector<std::size_t> consecutive_pairs(const Trace& t) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i + 1 < t.records.size(); ++i) {
        if (t.records[i + 1].k == t.records[i].k + 1) idx.push_back(i);
    }
    return idx;
}

}  // namespace

std::vector<StepViolation> fejer_check(const Trace& t, double tol) {
    std::vector<StepViolation> out;
    for (std::size_t i : consecutive_pairs(t)) {
        const auto& cur = t.records[i];
        const auto& nxt = t.records[i + 1];
        const double an = cur.a.squaredNorm();
        const double excess = nxt.a.squaredNorm() + cur.dist_a_to_B * cur.dist_a_to_B - an;
        if (excess > tol) out.push_back({cur.k, excess});
    }
    return out;
}

StepResidualReport step_residual_check(const Trace& t, unsigned d, double c0, double growth_limit) {
    StepResidualReport rep;
    const auto pairs = consecutive_pairs(t);
    if (pairs.empty() || t.records.back().k < 4) return rep;
    const double log_kmax = std::log(static_cast<double>(t.records.back().k));
    const double log_kmin = 0.5 * log_kmax;
    const double log_kmid = 0.75 * log_kmax;
    const double coef = d * c0 * c0;
    for (std::size_t i : pairs) {
        const auto& cur = t.records[i];
        const auto& nxt = t.records[i + 1];
        if (cur.k < 1 || std::log(static_cast<double>(cur.k)) < log_kmin) continue;
        const double x = nxt.norm_u;
        if (x == 0.0) {
            rep.k.push_back(cur.k);
            rep.ratio.push_back(0.0);
            continue;
        }
        const double rho = cur.norm_u - x - coef * std::pow(x, 2.0 * d - 1.0);
        const double ratio = std::abs(rho) / std::pow(x, 2.0 * d);
        rep.k.push_back(cur.k);
        rep.ratio.push_back(ratio);
        double& slot = std::log(static_cast<double>(cur.k)) < log_kmid ? rep.max_ratio_early : rep.max_ratio_late;
        slot = std::max(slot, ratio);
    }
    rep.bounded = rep.max_ratio_late <= growth_limit * rep.max_ratio_early || rep.max_ratio_late == 0.0;
    return rep;
}

double fit_recursion_tail(const Trace& t, unsigned d, double c0) {
    std::vector<double> h;
    const double coef = d * c0 * c0;
    const long kmax = t.records.empty() ? 0 : t.records.back().k;
    for (std::size_t i : consecutive_pairs(t)) {
        const auto& cur = t.records[i];
        const auto& nxt = t.records[i + 1];
        if (cur.k * cur.k < kmax) continue;
        const double x = nxt.norm_u;
        if (x <= 0.0) continue;
        h.push_back((cur.norm_u - x - coef * std::pow(x, 2.0 * d - 1.0)) / std::pow(x, 2.0 * d));
    }
    if (h.empty()) return 0.0;
    std::nth_element(h.begin(), h.begin() + static_cast<long>(h.size() / 2), h.end());
    return h[h.size() / 2];
}

X2Y4Report x2y4_check(const Trace& t, double eps) {
    X2Y4Report rep;
    auto inside = [](const Vec& u) { return 0.0 < u[0] && u[0] < u[1] * u[1]; };
    for (const auto& r : t.records) {
        if (r.u.size() >= 2 && inside(r.u)) {
            rep.entry_step = r.k;
            break;
        }
    }
    for (std::size_t i : consecutive_pairs(t)) {
        const Vec& u = t.records[i].u;
        const Vec& v = t.records[i + 1].u;
        if (u.size() < 2) continue;
        if (!(inside(u) && u[1] * u[1] <= eps)) continue;
        ++rep.checked_steps;
        if (!inside(v)) rep.violations.push_back(t.records[i].k);
    }
    return rep;
}

}  // namespace altproj
