#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "altproj/damped_newton.hpp"
#include "altproj/multipoly.hpp"

namespace altproj {

using Vec = Eigen::VectorXd;

/// Value, gradient and Hessian of a fixed polynomial in double precision.
class PolyDerivatives {
public:
    PolyDerivatives() = default;
    explicit PolyDerivatives(const MultiPoly& p);

    std::size_t nvars() const noexcept { return value_.nvars(); }
    double value(std::span<const double> x) const { return value_(x); }
    Vec grad(std::span<const double> x) const;
    Eigen::MatrixXd hess(std::span<const double> x) const;

private:
    CompiledPoly value_;
    std::vector<CompiledPoly> grad_;
    std::vector<CompiledPoly> hess_;  // row-major
};

/// Orthonormal basis of a subspace, stored as columns.
class LinearSubspace {
public:
    /// Orthonormalizes the given spanning vectors (all of the same length).
    /// Linearly dependent vectors are dropped; an empty span throws.
    static LinearSubspace from_span(const std::vector<std::vector<double>>& vectors);

    Eigen::Index dim() const noexcept { return basis_.cols(); }
    Eigen::Index ambient_dim() const noexcept { return basis_.rows(); }
    const Eigen::MatrixXd& basis() const noexcept { return basis_; }

    Vec project(const Vec& p) const;
    double distance(const Vec& p) const { return (p - project(p)).norm(); }

private:
    explicit LinearSubspace(Eigen::MatrixXd basis) : basis_(std::move(basis)) {}
    Eigen::MatrixXd basis_;
};

inline Vec project_subspace(const LinearSubspace& b, const Vec& p) { return b.project(p); }

/// Projection output. `active` holds 1-based constraint indices.
struct KKTResult {
    Vec point;
    std::vector<double> multipliers;
    std::vector<int> active;
    double residual = 0.0;
    bool ambiguous = false;
};

/// A = {(x, z) : z >= g(x)} in R^n x R.
class HypographSet {
public:
    /// With check_assertions, runs the sampling spot check of g(0) = 0,
    /// g > 0 away from 0 and midpoint convexity; throws PreconditionError on
    /// violation.
    explicit HypographSet(MultiPoly g, bool check_assertions = true);

    const MultiPoly& g() const noexcept { return g_; }
    const PolyDerivatives& derivs() const noexcept { return d_; }
    Eigen::Index ambient_dim() const noexcept { return static_cast<Eigen::Index>(g_.nvars()) + 1; }

private:
    MultiPoly g_;
    PolyDerivatives d_;
};

/// A = {(x, y, z) : z >= f1(x, y), z >= f2(x, y)}.
class TwoPolySet {
public:
    /// With check_assertions, spot-checks midpoint convexity of f1 and f2.
    TwoPolySet(MultiPoly f1, MultiPoly f2, bool check_assertions = true);

    const MultiPoly& f1() const noexcept { return f1_; }
    const MultiPoly& f2() const noexcept { return f2_; }
    const PolyDerivatives& d1() const noexcept { return d1_; }
    const PolyDerivatives& d2() const noexcept { return d2_; }
    static constexpr Eigen::Index ambient_dim() noexcept { return 3; }

private:
    MultiPoly f1_, f2_;
    PolyDerivatives d1_, d2_;
};

using ConvexSet = std::variant<HypographSet, TwoPolySet>;

Eigen::Index ambient_dim(const ConvexSet& a);

/// Throws SolverFailure when Newton does not converge.
KKTResult project_hypograph(const HypographSet& a, const Vec& p, const SolverOptions& opts = {});

/// Throws SolverFailure when no active-set candidate is valid.
KKTResult project_twopoly(const TwoPolySet& a, const Vec& p, const SolverOptions& opts = {});

KKTResult project(const ConvexSet& a, const Vec& p, const SolverOptions& opts = {});

/// Psi(q) = q + f(q) grad f(q).
Vec psi_map(const MultiPoly& f, const Vec& q);
Vec psi_map(const PolyDerivatives& f, const Vec& q);

/// Solves psi_map(f, q) = target by damped Newton from q = target.
/// Throws SolverFailure on non-convergence.
Vec psi_inverse(const MultiPoly& f, const Vec& target, const SolverOptions& opts = {});
Vec psi_inverse(const PolyDerivatives& f, const Vec& target, const SolverOptions& opts = {});

/// Sampling spot checks behind the set constructors, exposed for tests.
/// Each returns an empty string on success or a description of the first
/// violation found.
std::string check_positive_away_from_origin(const MultiPoly& g, std::uint64_t seed, int samples = 1000);
std::string check_midpoint_convex(const MultiPoly& g, std::uint64_t seed, int samples = 1000);

}  // namespace altproj
