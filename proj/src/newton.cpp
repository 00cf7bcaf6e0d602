#include "altproj/newton.hpp"

#include <algorithm>

namespace altproj {

bool lp_feasible(std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
    const std::size_t m = a.size();
    if (m == 0) return true;
    const std::size_t n = a.front().size();
    for (std::size_t i = 0; i < m; ++i) {
        if (a[i].size() != n) throw DimensionError("lp_feasible: ragged constraint matrix");
        if (b[i] < 0) {
            for (auto& v : a[i]) v = -v;
            b[i] = -b[i];
        }
    }
    // Tableau over n structural + m artificial columns; the artificials form
    // the starting basis. Objective row: minimize the sum of artificials.
    const std::size_t cols = n + m;
    std::vector<std::vector<Rational>> t(m, std::vector<Rational>(cols + 1));
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
        t[i][n + i] = 1;
        t[i][cols] = b[i];
        basis[i] = n + i;
    }
    // Reduced costs: c_j - sum over artificial rows.
    std::vector<Rational> cost(cols + 1);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j <= cols; ++j) {
            if (j < n || j == cols) cost[j] -= t[i][j];
        }
    }
    while (true) {
        std::size_t enter = cols;
        for (std::size_t j = 0; j < cols; ++j) {
            if (cost[j] < 0) {
                enter = j;
                break;
            }
        }
        if (enter == cols) break;
        std::size_t leave = m;
        Rational best;
        for (std::size_t i = 0; i < m; ++i) {
            if (t[i][enter] <= 0) continue;
            const Rational ratio = t[i][cols] / t[i][enter];
            if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave == m) break;  // unbounded direction cannot occur in phase one
        const Rational piv = t[leave][enter];
        for (auto& v : t[leave]) v /= piv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == leave || t[i][enter] == 0) continue;
            const Rational f = t[i][enter];
            for (std::size_t j = 0; j <= cols; ++j) t[i][j] -= f * t[leave][j];
        }
        const Rational f = cost[enter];
        for (std::size_t j = 0; j <= cols; ++j) cost[j] -= f * t[leave][j];
        basis[leave] = enter;
    }
    // Phase-one optimum is -cost[cols].
    return cost[cols] == 0;
}

namespace {

// kappa lies in conv(others) + R^n_{>=0}: lambda >= 0, sum lambda = 1,
// sum lambda_j s_j + slack = kappa.
bool dominated(const Exponent& kappa, const std::vector<Exponent>& others) {
    if (others.empty()) return false;
    const std::size_t n = kappa.size();
    const std::size_t k = others.size();
    std::vector<std::vector<Rational>> a(n + 1, std::vector<Rational>(k + n));
    std::vector<Rational> b(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) a[i][j] = others[j][i];
        a[i][k + i] = 1;
        b[i] = kappa[i];
    }
    for (std::size_t j = 0; j < k; ++j) a[n][j] = 1;
    b[n] = 1;
    return lp_feasible(std::move(a), std::move(b));
}

}  // namespace

NewtonDiagram newton_diagram(const MultiPoly& p) {
    if (p.is_zero()) throw PreconditionError("newton_diagram: zero polynomial");
    NewtonDiagram nd;
    for (const auto& [e, c] : p.terms()) nd.support_points.push_back(e);
    const std::size_t n = p.nvars();
    for (std::size_t s = 0; s < nd.support_points.size(); ++s) {
        std::vector<Exponent> others;
        others.reserve(nd.support_points.size() - 1);
        for (std::size_t j = 0; j < nd.support_points.size(); ++j) {
            if (j != s) others.push_back(nd.support_points[j]);
        }
        if (!dominated(nd.support_points[s], others)) nd.boundary_vertices.push_back(nd.support_points[s]);
    }
    nd.axis_exponents.assign(n, std::nullopt);
    for (const auto& e : nd.support_points) {
        const auto nonzero = std::count_if(e.begin(), e.end(), [](unsigned v) { return v != 0; });
        if (nonzero > 1) continue;
        for (std::size_t i = 0; i < n; ++i) {
            // The constant term meets every axis at 0.
            if (nonzero == 1 && e[i] == 0) continue;
            if (!nd.axis_exponents[i] || e[i] < *nd.axis_exponents[i]) nd.axis_exponents[i] = e[i];
        }
    }
    nd.convenient = std::all_of(nd.axis_exponents.begin(), nd.axis_exponents.end(),
                                [](const auto& d) { return d.has_value(); });
    return nd;
}

Rational loja_exponent_convenient(const MultiPoly& p, bool assert_nondegenerate) {
    if (!assert_nondegenerate) {
        throw InapplicableError("Lojasiewicz exponent rule needs a nondegenerate polynomial (assertion not given)");
    }
    const NewtonDiagram nd = newton_diagram(p);
    if (!nd.convenient) throw PreconditionError("Lojasiewicz exponent rule: polynomial is not convenient");
    unsigned best = 0;
    for (const auto& d : nd.axis_exponents) best = std::max(best, *d);
    return Rational(best);
}

}  // namespace altproj
