#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"

#include "altproj/poly_text.hpp"
#include "altproj/rates.hpp"
#include "altproj/region.hpp"
#include "test_support.hpp"

using namespace altproj;

namespace {

const std::vector<std::string> kXY{"x", "y"};
MultiPoly xy(const char* text) { return parse_poly(text, kXY); }

TwoPolySet ex412() { return TwoPolySet(xy("x^2 + y^4"), xy("(x - 1)^2 + (y - 1)^4 - 2")); }
TwoPolySet ex413() { return TwoPolySet(xy("(x + 1/2)^2 + (y + 1/2)^4 - 5/16"), xy("x^2 + y^4")); }

Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

double angle_to(const Vec& p, const Vec& dir) {
    const double c = std::abs(p.dot(dir)) / (p.norm() * dir.norm());
    return std::acos(std::min(1.0, c));
}

}  // namespace

TEST_CASE("classify_point examples") {
    const TwoPolySet a = ex412();
    const double t = 0.05, r5 = std::sqrt(5.0);
    CHECK(classify_point(a, v2(-2 * t / r5, t / r5)) == RegionLabel::Curve);
    CHECK(classify_point(a, v2(0, 0.05)) == RegionLabel::Surface1);
    CHECK(classify_point(a, v2(0, -0.05)) == RegionLabel::Surface2);
    CHECK(classify_point(ex413(), v2(t / r5, -2 * t / r5)) == RegionLabel::Surface1);
    CHECK(classify_point(a, v2(0, 0)) == RegionLabel::Curve);
}

TEST_CASE("partition boundaries pass through the origin tangent to alpha") {
    for (const TwoPolySet& a : {ex412(), ex413()}) {
        const CurveSeries cs = solve_curve_series(a.f1(), a.f2(), 8);
        const Vec alpha = v2(to_double(cs.alpha[0]), to_double(cs.alpha[1]));
        for (int which : {1, 2}) {
            const Polyline line = trace_partition_boundary(a, which, -0.2, 0.2, 4001);
            CHECK(line.skipped.empty());
            REQUIRE(line.points.size() == 4001);
            CHECK(line.points[2000].norm() == 0.0);
            CHECK(angle_to(line.points[1999], alpha) <= 1e-3);
            CHECK(angle_to(line.points[2001], alpha) <= 1e-3);
        }
        const Polyline l1 = trace_partition_boundary(a, 1, -0.2, 0.2, 41);
        const Polyline l2 = trace_partition_boundary(a, 2, -0.2, 0.2, 41);
        CHECK((l1.points.back() - l2.points.back()).norm() > 1e-3);
    }
    const TwoPolySet same(xy("x^2 + y^4"), xy("x^2 + y^4"));
    CHECK_THROWS_AS(trace_partition_boundary(same, 1, -0.1, 0.1, 10), PreconditionError);
    CHECK_THROWS_AS(trace_partition_boundary(ex412(), 3, -0.1, 0.1, 10), PreconditionError);
}

TEST_CASE("labels agree with the active set of the projection") {
    auto rng = testing::make_rng(41);
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    for (const TwoPolySet& a : {ex412(), ex413()}) {
        const Polyline b1 = trace_partition_boundary(a, 1, -0.4, 0.4, 8001);
        const Polyline b2 = trace_partition_boundary(a, 2, -0.4, 0.4, 8001);
        int checked = 0, mismatches = 0;
        while (checked < 200) {
            const Vec p = v2(u(rng), u(rng));
            if (p.norm() > 0.1) continue;
            if (distance_to_polyline(b1, p) <= 1e-6 || distance_to_polyline(b2, p) <= 1e-6) continue;
            ++checked;
            const RegionLabel label = classify_point(a, p);
            Vec p3(3);
            p3 << p[0], p[1], 0.0;
            const KKTResult r = project_twopoly(a, p3);
            const bool ok = (label == RegionLabel::Surface1 && r.active == std::vector<int>{1}) ||
                            (label == RegionLabel::Surface2 && r.active == std::vector<int>{2}) ||
                            (label == RegionLabel::Curve && r.active == std::vector<int>{1, 2});
            if (!ok) {
                ++mismatches;
                INFO("p = " << p.transpose() << " label " << to_string(label) << " active " << r.active.size());
                CHECK(ok);
            }
        }
        CHECK(mismatches == 0);
    }
}

TEST_CASE("Psi_1 images of the f1 > f2 side are labelled Surface1") {
    auto rng = testing::make_rng(42);
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    const TwoPolySet a = ex412();
    int checked = 0;
    while (checked < 100) {
        const Vec q = v2(u(rng), u(rng));
        if (q.norm() > 0.1) continue;
        if (!(a.d1().value({q.data(), 2}) > a.d2().value({q.data(), 2}))) continue;
        ++checked;
        CHECK(classify_point(a, psi_map(a.d1(), q)) == RegionLabel::Surface1);
    }
}

TEST_CASE("grid scan") {
    const TwoPolySet a = ex412();
    CHECK(classify_scan(a, GridSpec{.nx = 0, .ny = 5}).empty());
    const GridSpec g{.x_min = -0.3, .x_max = 0.3, .y_min = -0.3, .y_max = 0.3, .nx = 21, .ny = 21};
    const auto serial = classify_scan(a, g, 1);
    const auto parallel = classify_scan(a, g, 3);
    CHECK(serial == parallel);
    int counts[4] = {0, 0, 0, 0};
    for (auto l : serial) ++counts[static_cast<int>(l)];
    CHECK(counts[0] > 0);
    CHECK(counts[1] > 0);
    CHECK(counts[2] > 0);

    // Tiny grid around the origin: direction along alpha stays on the curve.
    const GridSpec tiny{.x_min = -2e-9, .x_max = 2e-9, .y_min = -1e-9, .y_max = 1e-9, .nx = 3, .ny = 3};
    const auto lt = classify_scan(a, tiny);
    CHECK(lt[6] == RegionLabel::Curve);     // (-2e-9, 1e-9) lies on the tangent line
    CHECK(lt[2] == RegionLabel::Curve);     // (2e-9, -1e-9) too
    CHECK(lt[7] == RegionLabel::Surface1);  // (0, 1e-9) lies on B'_+
    CHECK(lt[1] == RegionLabel::Surface2);  // (0, -1e-9) lies on B'_-

    std::ostringstream os;
    write_grid_csv(os, g, serial);
    const std::string csv = os.str();
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 21 * 21 + 1);
}
