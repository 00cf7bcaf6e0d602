#include "altproj/proj.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace altproj {

PolyDerivatives::PolyDerivatives(const MultiPoly& p) : value_(p) {
    for (const auto& gi : gradient(p)) {
        grad_.emplace_back(gi);
        for (const auto& hij : gradient(gi)) hess_.emplace_back(hij);
    }
}

Vec PolyDerivatives::grad(std::span<const double> x) const {
    Vec g(static_cast<Eigen::Index>(grad_.size()));
    for (std::size_t i = 0; i < grad_.size(); ++i) g[static_cast<Eigen::Index>(i)] = grad_[i](x);
    return g;
}

Eigen::MatrixXd PolyDerivatives::hess(std::span<const double> x) const {
    const auto n = static_cast<Eigen::Index>(grad_.size());
    Eigen::MatrixXd h(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) h(i, j) = hess_[static_cast<std::size_t>(i * n + j)](x);
    }
    return h;
}

namespace {

std::span<const double> as_span(const Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace

LinearSubspace LinearSubspace::from_span(const std::vector<std::vector<double>>& vectors) {
    if (vectors.empty()) throw PreconditionError("subspace needs at least one spanning vector");
    const auto m = static_cast<Eigen::Index>(vectors.front().size());
    if (m == 0) throw DimensionError("subspace spanning vectors are empty");
    std::vector<Vec> kept;
    for (const auto& v : vectors) {
        if (static_cast<Eigen::Index>(v.size()) != m) throw DimensionError("spanning vectors differ in length");
        Vec w = Eigen::Map<const Vec>(v.data(), m);
        const double scale = w.norm();
        if (scale == 0.0) continue;
        // Two passes of Gram-Schmidt.
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& q : kept) w -= q.dot(w) * q;
        }
        if (w.norm() <= 1e-12 * scale) continue;
        kept.push_back(w.normalized());
    }
    if (kept.empty()) throw PreconditionError("spanning vectors are all zero");
    Eigen::MatrixXd basis(m, static_cast<Eigen::Index>(kept.size()));
    for (std::size_t j = 0; j < kept.size(); ++j) basis.col(static_cast<Eigen::Index>(j)) = kept[j];
    return LinearSubspace(std::move(basis));
}

Vec LinearSubspace::project(const Vec& p) const {
    if (p.size() != basis_.rows()) throw DimensionError("project_subspace: dimension mismatch");
    return basis_ * (basis_.transpose() * p);
}

std::string check_positive_away_from_origin(const MultiPoly& g, std::uint64_t seed, int samples) {
    const std::size_t n = g.nvars();
    std::vector<double> x(n, 0.0);
    if (const double g0 = g.eval(x); g0 != 0.0) {
        std::ostringstream os;
        os << "g(0) = " << g0 << " is not zero";
        return os.str();
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int s = 0; s < samples; ++s) {
        double r2 = 0.0;
        for (auto& xi : x) {
            xi = normal(rng);
            r2 += xi * xi;
        }
        // Radii spread over several decades so the check also probes near 0.
        const double radius = std::pow(10.0, -3.0 * unif(rng));
        const double scale = radius / std::sqrt(r2);
        for (auto& xi : x) xi *= scale;
        if (!(g.eval(x) > 0.0)) {
            std::ostringstream os;
            os << "g is not positive at a sampled point of norm " << radius;
            return os.str();
        }
    }
    return {};
}

std::string check_midpoint_convex(const MultiPoly& g, std::uint64_t seed, int samples) {
    const std::size_t n = g.nvars();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto ball_point = [&] {
        std::vector<double> x(n);
        double r2 = 0.0;
        for (auto& xi : x) {
            xi = normal(rng);
            r2 += xi * xi;
        }
        const double scale = std::pow(unif(rng), 1.0 / static_cast<double>(n)) / std::sqrt(r2);
        for (auto& xi : x) xi *= scale;
        return x;
    };
    for (int s = 0; s < samples; ++s) {
        const auto a = ball_point();
        const auto b = ball_point();
        std::vector<double> mid(n);
        for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (a[i] + b[i]);
        const double ga = g.eval(a), gb = g.eval(b), gm = g.eval(mid);
        const double slack = 1e-12 * (1.0 + std::abs(ga) + std::abs(gb));
        if (gm > 0.5 * (ga + gb) + slack) return "midpoint convexity fails at a sampled pair in the unit ball";
    }
    return {};
}

HypographSet::HypographSet(MultiPoly g, bool check_assertions) : g_(std::move(g)), d_(g_) {
    if (check_assertions) {
        if (auto msg = check_positive_away_from_origin(g_, 0x5eed01); !msg.empty()) {
            throw PreconditionError("hypograph assertion: " + msg);
        }
        if (auto msg = check_midpoint_convex(g_, 0x5eed02); !msg.empty()) {
            throw PreconditionError("hypograph assertion: " + msg);
        }
    }
}

TwoPolySet::TwoPolySet(MultiPoly f1, MultiPoly f2, bool check_assertions)
    : f1_(std::move(f1)), f2_(std::move(f2)), d1_(f1_), d2_(f2_) {
    if (f1_.nvars() != 2 || f2_.nvars() != 2) throw DimensionError("two-polynomial sets need f1, f2 in two variables");
    if (check_assertions) {
        if (auto msg = check_midpoint_convex(f1_, 0x5eed03); !msg.empty()) throw PreconditionError("f1: " + msg);
        if (auto msg = check_midpoint_convex(f2_, 0x5eed04); !msg.empty()) throw PreconditionError("f2: " + msg);
    }
}

Eigen::Index ambient_dim(const ConvexSet& a) {
    return std::visit([](const auto& s) { return s.ambient_dim(); }, a);
}

namespace {

// Solves x + (f(x) - shift) grad f(x) = target.
NewtonOutcome solve_shifted_psi(const PolyDerivatives& f, const Vec& target, double shift, const SolverOptions& opts) {
    const auto n = target.size();
    NewtonSystem sys = [&](const Vec& x, Vec& r, Eigen::MatrixXd& jac) {
        const auto xs = as_span(x);
        const double v = f.value(xs) - shift;
        const Vec g = f.grad(xs);
        r = x - target + v * g;
        jac = Eigen::MatrixXd::Identity(n, n) + g * g.transpose() + v * f.hess(xs);
    };
    return damped_newton(sys, target, opts);
}

}  // namespace

KKTResult project_hypograph(const HypographSet& a, const Vec& p, const SolverOptions& opts) {
    const auto n = a.ambient_dim() - 1;
    if (p.size() != n + 1) throw DimensionError("project_hypograph: point dimension mismatch");
    const Vec xpart = p.head(n);
    const double z = p[n];
    KKTResult res;
    if (z >= a.derivs().value(as_span(xpart))) {
        res.point = p;
        res.multipliers = {0.0};
        return res;
    }
    const NewtonOutcome sol = solve_shifted_psi(a.derivs(), xpart, z, opts);
    if (!sol.converged) throw SolverFailure("hypograph projection: Newton did not converge", sol.residual);
    res.point.resize(n + 1);
    res.point.head(n) = sol.x;
    const double gx = a.derivs().value(as_span(sol.x));
    res.point[n] = gx;
    res.multipliers = {gx - z};
    res.active = {1};
    res.residual = sol.residual;
    return res;
}

namespace {

struct Candidate {
    KKTResult result;
    bool valid = false;
};

Candidate single_surface(const PolyDerivatives& fi, const PolyDerivatives& fj, int index, const Vec& p,
                         const SolverOptions& opts, double vtol) {
    Candidate c;
    const Vec xy = p.head(2);
    const double z = p[2];
    if (z >= fi.value(as_span(xy))) return c;  // p itself; infeasible for the other constraint
    const NewtonOutcome sol = solve_shifted_psi(fi, xy, z, opts);
    if (!sol.converged) return c;
    const double fu = fi.value(as_span(sol.x));
    c.result.point = Vec(3);
    c.result.point << sol.x[0], sol.x[1], fu;
    const double ci = fu - z;
    c.result.multipliers = index == 1 ? std::vector<double>{ci, 0.0} : std::vector<double>{0.0, ci};
    c.result.active = {index};
    c.result.residual = sol.residual;
    c.valid = ci >= -vtol && fj.value(as_span(sol.x)) <= fu + vtol;
    return c;
}

Candidate both_surfaces(const TwoPolySet& a, const Vec& p, const SolverOptions& opts, double vtol) {
    Candidate c;
    const auto& f1 = a.d1();
    const auto& f2 = a.d2();
    const Vec target = p.head(2);
    const double z = p[2];
    NewtonSystem sys = [&](const Vec& w, Vec& r, Eigen::MatrixXd& jac) {
        const Vec q = w.head(2);
        const auto qs = as_span(q);
        const double c1 = w[2], c2 = w[3];
        const double v1 = f1.value(qs), v2 = f2.value(qs);
        const Vec g1 = f1.grad(qs), g2 = f2.grad(qs);
        r.resize(4);
        r.head(2) = q - target + c1 * g1 + c2 * g2;
        r[2] = v1 - z - c1 - c2;
        r[3] = v1 - v2;
        jac.setZero(4, 4);
        jac.topLeftCorner(2, 2) = Eigen::Matrix2d::Identity() + c1 * f1.hess(qs) + c2 * f2.hess(qs);
        jac.block(0, 2, 2, 1) = g1;
        jac.block(0, 3, 2, 1) = g2;
        jac.block(2, 0, 1, 2) = g1.transpose();
        jac(2, 2) = -1.0;
        jac(2, 3) = -1.0;
        jac.block(3, 0, 1, 2) = (g1 - g2).transpose();
    };
    const double m = std::max(f1.value(as_span(target)), f2.value(as_span(target))) - z;
    Vec w0(4);
    w0 << target[0], target[1], 0.5 * m, 0.5 * m;
    const NewtonOutcome sol = damped_newton(sys, w0, opts);
    if (!sol.converged) return c;
    const Vec q = sol.x.head(2);
    c.result.point = Vec(3);
    c.result.point << q[0], q[1], f1.value(as_span(q));
    c.result.multipliers = {sol.x[2], sol.x[3]};
    c.result.active = {1, 2};
    c.result.residual = sol.residual;
    c.valid = sol.x[2] >= -vtol && sol.x[3] >= -vtol;
    return c;
}

}  // namespace

KKTResult project_twopoly(const TwoPolySet& a, const Vec& p, const SolverOptions& opts) {
    if (p.size() != 3) throw DimensionError("project_twopoly: point must be in R^3");
    const Vec xy = p.head(2);
    const double z = p[2];
    if (z >= a.d1().value(as_span(xy)) && z >= a.d2().value(as_span(xy))) {
        KKTResult res;
        res.point = p;
        res.multipliers = {0.0, 0.0};
        return res;
    }
    // Validity tolerance scales with the point; polynomials are stored
    // expanded, so values near the origin carry relative rounding only.
    const double vtol = opts.tol * std::max(p.norm(), 1e-300);
    std::vector<Candidate> cands;
    cands.push_back(single_surface(a.d1(), a.d2(), 1, p, opts, vtol));
    cands.push_back(single_surface(a.d2(), a.d1(), 2, p, opts, vtol));
    cands.push_back(both_surfaces(a, p, opts, vtol));
    const Candidate* best = nullptr;
    int n_valid = 0;
    double best_res = 0.0;
    for (const auto& c : cands) {
        if (!c.valid) continue;
        ++n_valid;
        if (best == nullptr || c.result.residual < best_res) {
            best = &c;
            best_res = c.result.residual;
        }
    }
    if (best == nullptr) {
        double r = 0.0;
        for (const auto& c : cands) r = std::max(r, c.result.residual);
        throw SolverFailure("two-polynomial projection: no active set yields a valid KKT point", r);
    }
    KKTResult res = best->result;
    res.ambiguous = n_valid > 1;
    return res;
}

KKTResult project(const ConvexSet& a, const Vec& p, const SolverOptions& opts) {
    return std::visit(
        [&](const auto& s) -> KKTResult {
            if constexpr (std::is_same_v<std::decay_t<decltype(s)>, HypographSet>) {
                return project_hypograph(s, p, opts);
            } else {
                return project_twopoly(s, p, opts);
            }
        },
        a);
}

Vec psi_map(const PolyDerivatives& f, const Vec& q) {
    if (static_cast<std::size_t>(q.size()) != f.nvars()) throw DimensionError("psi_map: dimension mismatch");
    const auto qs = as_span(q);
    return q + f.value(qs) * f.grad(qs);
}

Vec psi_map(const MultiPoly& f, const Vec& q) { return psi_map(PolyDerivatives(f), q); }

Vec psi_inverse(const PolyDerivatives& f, const Vec& target, const SolverOptions& opts) {
    if (static_cast<std::size_t>(target.size()) != f.nvars()) throw DimensionError("psi_inverse: dimension mismatch");
    const NewtonOutcome sol = solve_shifted_psi(f, target, 0.0, opts);
    if (!sol.converged) throw SolverFailure("psi inverse: Newton did not converge", sol.residual);
    return sol.x;
}

Vec psi_inverse(const MultiPoly& f, const Vec& target, const SolverOptions& opts) {
    return psi_inverse(PolyDerivatives(f), target, opts);
}

}  // namespace altproj
