#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "altproj/multipoly.hpp"
#include "altproj/proj.hpp"

namespace altproj {

enum class RateKind { Exact, UpperBound, Linear };
enum class RateSource { HypersurfaceLine, CurveRate, HshpBound, LojaSubspaceBound };

std::string to_string(RateKind k);
std::string to_string(RateSource s);

/// Predicted behaviour of ||u_k||: for Exact kinds
/// lim limit_constant * k^lambda * ||u_k|| = 1; for UpperBound kinds the
/// limsup of the same product is at most 1 and the constant is a sampled
/// estimate.
struct RatePrediction {
    RateKind kind = RateKind::Exact;
    std::optional<Rational> lambda;  // absent for Linear
    std::optional<double> limit_constant;
    bool constant_estimated = false;
    unsigned d = 0;
    std::optional<double> c0;
    RateSource source = RateSource::HypersurfaceLine;
};

/// Flat "key = value" block: kind, lambda, limit_constant, constant_estimated,
/// d, c0, source. Absent values are written as "none".
std::string serialize(const RatePrediction& p);
RatePrediction parse_prediction(const std::string& text);

/// Line B spanned by (a, 0) against A = {z >= g(x)}. When grad g(0) = w is
/// nonzero (B inside the tilted tangent plane) the leading coefficient is
/// taken as c0 / sqrt(1 + |w|^2).
RatePrediction predict_hypersurface_rate(const MultiPoly& g, std::span<const double> a);

/// Smooth branch phi of C = {z = f1 = f2} through the origin,
/// phi(s) = alpha s + beta s^2 + O(s^3), in exact arithmetic.
struct CurveSeries {
    std::array<ExactSeries, 3> phi;
    std::array<Rational, 3> alpha;
    std::array<Rational, 3> beta;
    int param_index = 1;  // 0: phi_1(s) = s, 1: phi_2(s) = s
    std::array<UniSeries, 3> phi_double() const;
};

/// Degree-by-degree solution of z = f1(x, y) = f2(x, y). The curve is
/// parametrized by y whenever alpha_2 != 0 and by x otherwise, scaled so the
/// parameter component of alpha is 1. Throws PreconditionError when the
/// kernel is not one-dimensional, C does not pass through the origin, or
/// alpha_3 != 0.
CurveSeries solve_curve_series(const MultiPoly& f1, const MultiPoly& f2, unsigned order);

enum class CurveVerdict { ProjectsToCurve, LeavesCurve, Inconclusive };
std::string to_string(CurveVerdict v);

struct Cond2PolyResult {
    CurveVerdict verdict = CurveVerdict::Inconclusive;
    bool parallel = false;  // (a, b) is a multiple of (alpha_1, alpha_2)
    std::optional<std::array<Rational, 3>> lambda_mu;  // (lambda_1, lambda_2, mu)
};

/// Sign test deciding whether points t (a, b, 0), t > 0 small, project onto C.
/// Both multipliers negative is not covered by the sign rule and reported
/// Inconclusive. Throws PreconditionError on a singular system.
Cond2PolyResult cond2poly_check(const MultiPoly& f1, const MultiPoly& f2, const std::array<Rational, 2>& a_dir,
                                unsigned order = 8);

/// Exact rate for B = span{(alpha, 0)} when the projections land on C.
/// Throws ZeroSeriesError if the distance series vanishes through the order.
RatePrediction predict_curve_rate(const MultiPoly& f1, const MultiPoly& f2, unsigned order = 12);

/// Exact squared distance series ((alpha_2 phi_1 - alpha_1 phi_2)^2 +
/// (alpha_1^2 + alpha_2^2) phi_3^2) / (alpha_1^2 + alpha_2^2).
ExactSeries curve_distance_squared(const CurveSeries& cs);

/// Solution x = phi(y) of x_i + g_{x_i}(x, y) g(x, y) = 0 (x the first m
/// variables) as truncated series in y, by fixed-point iteration in exact
/// arithmetic. Each phi_i is a polynomial in the n - m free variables holding
/// all terms of total degree <= order.
struct ImplicitSeries {
    std::vector<MultiPoly> phi;
    unsigned order = 0;
    unsigned restriction_order = 0;  // lowest total degree of g(0, y)
    /// Lowest total degree of phi_i, or nullopt when phi_i vanishes through order.
    std::optional<unsigned> lowest_degree(std::size_t i) const;
    /// Univariate view when there is a single free variable.
    ExactSeries univariate(std::size_t i) const;
};

ImplicitSeries solve_implicit_series(const MultiPoly& g, std::size_t m, unsigned order);

/// Minimum of g(x)^2 / ||x||^(2d) over random points on spheres of radii
/// 1e-1, 1e-2, 1e-3 (samples in total, deterministic seed).
double sample_bound_constant(const MultiPoly& g, unsigned d, int samples = 10000, std::uint64_t seed = 7);

/// Bound for B = R^n x {0}: d = L(g), lambda = 1/(2d - 2).
RatePrediction predict_upper_bound_hyperplane(const MultiPoly& g, bool assert_nondegenerate);

/// Bound for B = B0 x {0} with B0 spanned by coordinate axes of the x-space:
/// d = L(g restricted to B0). Throws PreconditionError when B0 is not
/// axis-aligned or the restriction is not convenient.
RatePrediction predict_upper_bound_subspace(const MultiPoly& g, const LinearSubspace& b0, bool assert_nondegenerate);

/// Evaluates p at polynomial arguments keeping only total degree <= order.
MultiPoly compose_truncated(const MultiPoly& p, const std::vector<MultiPoly>& args, unsigned order);

}  // namespace altproj
