#include <cmath>
#include <random>

#include "doctest.h"

#include "altproj/poly_text.hpp"
#include "altproj/rates.hpp"
#include "test_support.hpp"

using namespace altproj;

namespace {

const std::vector<std::string> kXY{"x", "y"};
MultiPoly xy(const char* text) { return parse_poly(text, kXY); }
Rational q(long p, long d = 1) { return Rational(p) / d; }

const char* kF1 = "x^2 + y^4";
const char* kF2 = "(x - 1)^2 + (y - 1)^4 - 2";
const char* kShifted = "(x + 1/2)^2 + (y + 1/2)^4 - 5/16";

}  // namespace

TEST_CASE("hypersurface rate predictions") {
    const MultiPoly g = xy(kF1);
    const std::vector<double> a34{3, 4};
    const RatePrediction p = predict_hypersurface_rate(g, a34);
    CHECK(p.kind == RateKind::Exact);
    CHECK(p.d == 2);
    CHECK(*p.c0 == doctest::Approx(9.0 / 25.0));
    CHECK(*p.lambda == q(1, 2));
    CHECK(*p.limit_constant == doctest::Approx(18.0 / 25.0).epsilon(1e-14));

    const std::vector<double> a01{0, 1};
    const RatePrediction p4 = predict_hypersurface_rate(g, a01);
    CHECK(p4.d == 4);
    CHECK(*p4.lambda == q(1, 6));
    CHECK(*p4.limit_constant == doctest::Approx(std::pow(24.0, 1.0 / 6.0)).epsilon(1e-14));

    const std::vector<double> a12{1, -2};
    const RatePrediction p13 = predict_hypersurface_rate(xy(kShifted), a12);
    CHECK(p13.d == 2);
    CHECK(*p13.lambda == q(1, 2));
    CHECK(*p13.c0 == doctest::Approx(7.0 / 5.0));
    // grad f(0) = (1, 1/2): c0 is scaled by 1 / sqrt(1 + 5/4) = 2/3.
    CHECK(*p13.limit_constant == doctest::Approx(28.0 / 15.0).epsilon(1e-14));

    // Transversal line: multiplicity 1.
    const RatePrediction lin = predict_hypersurface_rate(xy(kF2), a01);
    CHECK(lin.kind == RateKind::Linear);
    CHECK_FALSE(lin.lambda.has_value());

    CHECK_THROWS_AS(predict_hypersurface_rate(xy("x^2"), a01), ZeroSeriesError);
}

TEST_CASE("hypersurface rate is invariant under positive rescaling of the direction") {
    auto rng = testing::make_rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0), s(0.01, 100.0);
    const MultiPoly g = xy("x^2 + x*y + y^2 + y^4");
    for (int trial = 0; trial < 50; ++trial) {
        const std::vector<double> a{u(rng), u(rng)};
        const double c = s(rng);
        const std::vector<double> b{c * a[0], c * a[1]};
        const auto pa = predict_hypersurface_rate(g, a);
        const auto pb = predict_hypersurface_rate(g, b);
        CHECK(pa.d == pb.d);
        CHECK(*pa.limit_constant == doctest::Approx(*pb.limit_constant).epsilon(1e-12));
        CHECK(*pa.limit_constant > 0);
        CHECK(*pa.lambda > 0);
        CHECK(*pa.lambda <= q(1, 2));
    }
}

TEST_CASE("prediction serialization round trip") {
    const std::vector<double> a01{0, 1};
    for (const RatePrediction& p : {predict_hypersurface_rate(xy(kF1), a01), predict_curve_rate(xy(kF1), xy(kF2)),
                                    predict_upper_bound_hyperplane(xy(kF1), true),
                                    predict_hypersurface_rate(xy(kF2), a01)}) {
        const RatePrediction r = parse_prediction(serialize(p));
        CHECK(serialize(r) == serialize(p));
        CHECK(r.kind == p.kind);
        CHECK(r.lambda == p.lambda);
        CHECK(r.limit_constant == p.limit_constant);
    }
    CHECK_THROWS_AS(parse_prediction("kind = Sideways\n"), ParseError);
    CHECK_THROWS_AS(parse_prediction("kind = Exact\n"), ParseError);
}

TEST_CASE("curve series of the first two-polynomial example") {
    const CurveSeries cs = solve_curve_series(xy(kF1), xy(kF2), 8);
    CHECK(cs.param_index == 1);
    CHECK(cs.alpha == std::array<Rational, 3>{q(-2), q(1), q(0)});
    CHECK(cs.beta == std::array<Rational, 3>{q(3), q(0), q(4)});
    const std::vector<Rational> x{0, -2, 3, -2, 0, 0, 0};
    const std::vector<Rational> z{0, 0, 4, -12, 18, -12, 4};
    for (std::size_t k = 0; k <= 6; ++k) {
        CHECK(cs.phi[0][k] == x[k]);
        CHECK(cs.phi[1][k] == (k == 1 ? 1 : 0));
        CHECK(cs.phi[2][k] == z[k]);
    }
}

TEST_CASE("curve series of the shifted pair") {
    const CurveSeries cs = solve_curve_series(xy(kF1), xy(kShifted), 8);
    CHECK(cs.alpha == std::array<Rational, 3>{q(-1, 2), q(1), q(0)});
    CHECK(cs.beta == std::array<Rational, 3>{q(-3, 2), q(0), q(1, 4)});
    CHECK(cs.phi[0][3] == -2);
    CHECK(cs.phi[2][3] == q(3, 2));
}

TEST_CASE("curve series substitutes back to zero") {
    const std::pair<const char*, const char*> pairs[] = {{kF1, kF2}, {kF1, kShifted}, {kShifted, kF1},
                                                         {"x^2 + y^2 + x*y^2", "(x - 1)^2 + 3*y^2 - 1 + x^4"}};
    for (const auto& [a, b] : pairs) {
        const MultiPoly f1 = xy(a), f2 = xy(b);
        const CurveSeries cs = solve_curve_series(f1, f2, 10);
        const std::vector<ExactSeries> args{cs.phi[0], cs.phi[1]};
        const ExactSeries r1 = cs.phi[2] - f1.eval_series(args);
        const ExactSeries r2 = cs.phi[2] - f2.eval_series(args);
        for (std::size_t k = 0; k <= 10; ++k) {
            CHECK(std::abs(to_double(r1[k])) <= 1e-10);
            CHECK(std::abs(to_double(r2[k])) <= 1e-10);
        }
    }
}

TEST_CASE("curve series preconditions") {
    CHECK_THROWS_AS(solve_curve_series(xy(kF1), xy(kF1), 6), PreconditionError);
    CHECK_THROWS_AS(solve_curve_series(xy(kF1), xy("x^2 + y^4 + 1"), 6), PreconditionError);
    // Both gradients nonzero with a tangent leaving the plane.
    CHECK_THROWS_AS(solve_curve_series(xy("x + y^2"), xy("y + x^2"), 6), PreconditionError);
}

TEST_CASE("cond2poly sign test") {
    const auto r1 = cond2poly_check(xy(kF1), xy(kF2), {q(-2), q(1)});
    CHECK(r1.verdict == CurveVerdict::ProjectsToCurve);
    REQUIRE(r1.lambda_mu.has_value());
    CHECK(*r1.lambda_mu == std::array<Rational, 3>{q(37, 10), q(3, 10), q(-6, 5)});

    const auto r2 = cond2poly_check(xy(kF1), xy(kShifted), {q(1), q(-2)});
    CHECK(r2.verdict == CurveVerdict::LeavesCurve);
    REQUIRE(r2.lambda_mu.has_value());
    CHECK(*r2.lambda_mu == std::array<Rational, 3>{q(-19, 20), q(6, 5), q(-3, 10)});

    const auto r3 = cond2poly_check(xy(kF1), xy(kF2), {q(1), q(1)});
    CHECK(r3.verdict == CurveVerdict::LeavesCurve);
    CHECK_FALSE(r3.parallel);
    CHECK_FALSE(r3.lambda_mu.has_value());

    // Opposite direction along the same line: multipliers unchanged.
    const auto r4 = cond2poly_check(xy(kF1), xy(kF2), {q(2), q(-1)});
    CHECK(r4.verdict == CurveVerdict::ProjectsToCurve);
}

TEST_CASE("curve rate") {
    const RatePrediction p = predict_curve_rate(xy(kF1), xy(kF2));
    CHECK(p.kind == RateKind::Exact);
    CHECK(p.source == RateSource::CurveRate);
    CHECK(p.d == 2);
    CHECK(*p.c0 == doctest::Approx(std::sqrt(89.0 / 5.0)).epsilon(1e-14));
    CHECK(std::abs(*p.limit_constant - std::sqrt(356.0 / 125.0)) <= 1e-9);

    const CurveSeries cs = solve_curve_series(xy(kF1), xy(kF2), 8);
    const UniSeries dist = sqrt_of_even_order_square(curve_distance_squared(cs));
    CHECK(dist[2] == doctest::Approx(std::sqrt(89.0 / 5.0)));

    // Rotating both polynomials by 90 degrees about the z-axis.
    const RatePrediction r = predict_curve_rate(xy("y^2 + x^4"), xy("(y + 1)^2 + (x - 1)^4 - 2"));
    CHECK(r.d == p.d);
    CHECK(*r.limit_constant == doctest::Approx(*p.limit_constant).epsilon(1e-13));

    // C a straight line in the plane z = 0 along B: zero distance.
    CHECK_THROWS_AS(predict_curve_rate(xy("y^2"), xy("y^2 + y")), ZeroSeriesError);
}

TEST_CASE("implicit series") {
    const ImplicitSeries a = solve_implicit_series(xy(kF1), 1, 10);
    CHECK(a.phi[0].is_zero());
    CHECK(a.restriction_order == 4);

    const ImplicitSeries b = solve_implicit_series(xy("(x - y^2)^2 + y^4"), 1, 12);
    CHECK(b.restriction_order == 4);
    REQUIRE(b.lowest_degree(0).has_value());
    CHECK(*b.lowest_degree(0) >= b.restriction_order + 1);
    const ExactSeries s = b.univariate(0);
    CHECK(s[6] == 4);

    // The series solves x + g_x g = 0 through the order.
    const MultiPoly g = xy("(x - y^2)^2 + y^4 + x*y^3");
    const ImplicitSeries c = solve_implicit_series(g, 1, 12);
    const std::vector<MultiPoly> args{c.phi[0], MultiPoly::variable(1, 0)};
    const MultiPoly res = c.phi[0] + (compose_truncated(g.derivative(0), args, 12) * compose_truncated(g, args, 12)).truncated(12);
    CHECK(res.is_zero());
    CHECK(*c.lowest_degree(0) >= c.restriction_order + 1);

    CHECK_THROWS_AS(solve_implicit_series(xy("x + y^2"), 1, 6), PreconditionError);
    CHECK_THROWS_AS(solve_implicit_series(xy("x^2 + x*y"), 1, 6), PreconditionError);

    // Two dependent variables, one free.
    const auto names = default_var_names(3);
    const MultiPoly g3 = parse_poly("x1^2 + x2^2 + x3^4 + x1*x3^2", names);
    const ImplicitSeries d = solve_implicit_series(g3, 2, 10);
    CHECK(d.phi.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        if (auto low = d.lowest_degree(i)) CHECK(*low >= d.restriction_order + 1);
    }
}

TEST_CASE("implicit series lowest-degree bound on random convenient inputs") {
    auto rng = testing::make_rng(32);
    std::uniform_int_distribution<int> coef(-3, 3), e(2, 5);
    int checked = 0;
    for (int trial = 0; trial < 30; ++trial) {
        MultiPoly g = xy("x^2");
        const unsigned dy = static_cast<unsigned>(e(rng));
        g.add_term({0, dy}, Rational(1 + std::abs(coef(rng))));
        for (int t = 0; t < 3; ++t) {
            const unsigned ex = static_cast<unsigned>(e(rng) - 1), ey = static_cast<unsigned>(e(rng) - 1);
            g.add_term({ex, ey}, Rational(coef(rng)));
        }
        ImplicitSeries s;
        try {
            s = solve_implicit_series(g, 1, 10);
        } catch (const PreconditionError&) {
            continue;
        }
        ++checked;
        if (auto low = s.lowest_degree(0)) CHECK(*low >= s.restriction_order + 1);
    }
    CHECK(checked > 10);
}

TEST_CASE("upper bounds") {
    const RatePrediction h = predict_upper_bound_hyperplane(xy(kF1), true);
    CHECK(h.kind == RateKind::UpperBound);
    CHECK(h.d == 4);
    CHECK(*h.lambda == q(1, 6));
    CHECK(h.constant_estimated);
    CHECK(*h.limit_constant > 0);
    CHECK(*predict_upper_bound_hyperplane(xy("x^2 + y^2"), true).lambda == q(1, 2));
    const auto names = default_var_names(3);
    const MultiPoly g3 = parse_poly("x1^6 + x2^4 + x3^2", names);
    CHECK(*predict_upper_bound_hyperplane(g3, true).lambda == q(1, 10));
    CHECK_THROWS_AS(predict_upper_bound_hyperplane(xy("x*y + x^2"), true), PreconditionError);

    const auto axis3 = LinearSubspace::from_span({{0, 0, 1}});
    const RatePrediction s1 = predict_upper_bound_subspace(g3, axis3, true);
    CHECK(s1.d == 2);
    CHECK(*s1.lambda == q(1, 2));
    const auto plane12 = LinearSubspace::from_span({{1, 0, 0}, {0, 1, 0}});
    CHECK(*predict_upper_bound_subspace(g3, plane12, true).lambda == q(1, 10));
    const auto skew = LinearSubspace::from_span({{1, 1, 0}});
    CHECK_THROWS_AS(predict_upper_bound_subspace(g3, skew, true), PreconditionError);

    // One-dimensional B0 agrees with the line prediction.
    const std::vector<double> a{0, 1, 0};
    const auto axis2 = LinearSubspace::from_span({{0, 1, 0}});
    CHECK(*predict_upper_bound_subspace(g3, axis2, true).lambda == *predict_hypersurface_rate(g3, a).lambda);
}
