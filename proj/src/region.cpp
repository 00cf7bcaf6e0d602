#include "altproj/region.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "altproj/rates.hpp"

namespace altproj {

std::string to_string(RegionLabel l) {
    switch (l) {
        case RegionLabel::Surface1: return "Surface1";
        case RegionLabel::Surface2: return "Surface2";
        case RegionLabel::Curve: return "Curve";
        case RegionLabel::Undetermined: return "Undetermined";
    }
    return "?";
}

RegionLabel classify_point(const TwoPolySet& a, const Vec& p, const SolverOptions& opts) {
    if (p.size() != 2) throw DimensionError("classify_point: expected a point in the plane");
    Vec q1, q2;
    try {
        q1 = psi_inverse(a.d1(), p, opts);
        q2 = psi_inverse(a.d2(), p, opts);
    } catch (const SolverFailure&) {
        return RegionLabel::Undetermined;
    }
    const double s1 = a.d1().value({q1.data(), 2}) - a.d2().value({q1.data(), 2});
    const double s2 = a.d2().value({q2.data(), 2}) - a.d1().value({q2.data(), 2});
    if (s1 > kRegionDeadBand) return RegionLabel::Surface1;
    if (s2 > kRegionDeadBand) return RegionLabel::Surface2;
    return RegionLabel::Curve;
}

Polyline trace_partition_boundary(const TwoPolySet& a, int which, double t_min, double t_max, int n_samples) {
    if (which != 1 && which != 2) throw PreconditionError("trace_partition_boundary: which must be 1 or 2");
    if (a.f1() == a.f2()) throw PreconditionError("trace_partition_boundary: f1 and f2 are identical");
    if (n_samples < 2 || !(t_max > t_min)) throw PreconditionError("trace_partition_boundary: empty window");
    const CurveSeries cs = solve_curve_series(a.f1(), a.f2(), 8);
    const auto phi = cs.phi_double();
    const int pi = cs.param_index;
    const int oi = 1 - pi;
    const MultiPoly diff = a.f1() - a.f2();
    const PolyDerivatives h(diff);
    const PolyDerivatives& f = which == 1 ? a.d1() : a.d2();

    Polyline out;
    for (int s = 0; s < n_samples; ++s) {
        const double t = t_min + (t_max - t_min) * s / (n_samples - 1);
        Vec q(2);
        q[pi] = t;
        q[oi] = phi[static_cast<std::size_t>(oi)].evaluate(t);
        // Scalar Newton on the free coordinate, started from the series.
        bool ok = false;
        for (int it = 0; it < 60; ++it) {
            const double hv = h.value({q.data(), 2});
            const double dh = h.grad({q.data(), 2})[oi];
            if (!std::isfinite(hv) || dh == 0.0) break;
            const double step = hv / dh;
            q[oi] -= step;
            if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(q[oi]))) {
                ok = std::abs(h.value({q.data(), 2})) <= 1e-12;
                break;
            }
        }
        if (!ok) {
            out.skipped.push_back(t);
            continue;
        }
        out.points.push_back(psi_map(f, q));
        out.params.push_back(t);
    }
    return out;
}

Vec grid_node(const GridSpec& grid, int ix, int iy) {
    Vec p(2);
    p[0] = grid.nx == 1 ? grid.x_min : grid.x_min + (grid.x_max - grid.x_min) * ix / (grid.nx - 1);
    p[1] = grid.ny == 1 ? grid.y_min : grid.y_min + (grid.y_max - grid.y_min) * iy / (grid.ny - 1);
    return p;
}

std::vector<RegionLabel> classify_scan(const TwoPolySet& a, const GridSpec& grid, int jobs, const SolverOptions& opts) {
    if (grid.nx <= 0 || grid.ny <= 0) return {};
    std::vector<RegionLabel> labels(static_cast<std::size_t>(grid.nx) * static_cast<std::size_t>(grid.ny));
    auto do_rows = [&](int first, int stride) {
        for (int iy = first; iy < grid.ny; iy += stride) {
            for (int ix = 0; ix < grid.nx; ++ix) {
                labels[static_cast<std::size_t>(iy) * grid.nx + ix] = classify_point(a, grid_node(grid, ix, iy), opts);
            }
        }
    };
    const int n = std::max(1, std::min(jobs, grid.ny));
    if (n == 1) {
        do_rows(0, 1);
        return labels;
    }
    std::vector<std::jthread> pool;
    for (int w = 0; w < n; ++w) pool.emplace_back(do_rows, w, n);
    pool.clear();
    return labels;
}

namespace {

const char* num(char* buf, std::size_t n, double v) {
    std::snprintf(buf, n, "%.17g", v);
    return buf;
}

}  // namespace

void write_polyline_csv(std::ostream& os, const Polyline& p) {
    char b1[64], b2[64];
    os << "x,y\n";
    for (const auto& v : p.points) os << num(b1, sizeof b1, v[0]) << ',' << num(b2, sizeof b2, v[1]) << '\n';
}

void write_grid_csv(std::ostream& os, const GridSpec& grid, const std::vector<RegionLabel>& labels) {
    char b1[64], b2[64];
    os << "x,y,label\n";
    std::size_t idx = 0;
    for (int iy = 0; iy < grid.ny && idx < labels.size(); ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix, ++idx) {
            const Vec p = grid_node(grid, ix, iy);
            os << num(b1, sizeof b1, p[0]) << ',' << num(b2, sizeof b2, p[1]) << ',' << to_string(labels[idx]) << '\n';
        }
    }
}

double distance_to_polyline(const Polyline& line, const Vec& p) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < line.points.size(); ++i) {
        best = std::min(best, (p - line.points[i]).norm());
        if (i + 1 == line.points.size()) break;
        const Vec seg = line.points[i + 1] - line.points[i];
        const double len2 = seg.squaredNorm();
        if (len2 == 0.0) continue;
        const double t = std::clamp((p - line.points[i]).dot(seg) / len2, 0.0, 1.0);
        best = std::min(best, (p - (line.points[i] + t * seg)).norm());
    }
    return best;
}

}  // namespace altproj
