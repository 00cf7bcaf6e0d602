#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "altproj/proj.hpp"

namespace altproj {

enum class RegionLabel { Surface1, Surface2, Curve, Undetermined };
std::string to_string(RegionLabel l);

/// Sign dead band: |f1 - f2| at or below this is treated as on the boundary.
inline constexpr double kRegionDeadBand = 1e-12;

/// Which stratum of the boundary of A receives the projection of (P, 0):
/// Surface1 if f1 > f2 at Psi_1^-1(P), Surface2 if f2 > f1 at Psi_2^-1(P),
/// Curve otherwise; Undetermined when an inversion fails.
RegionLabel classify_point(const TwoPolySet& a, const Vec& p, const SolverOptions& opts = {});

struct Polyline {
    std::vector<Vec> points;           // ordered by the curve parameter
    std::vector<double> params;        // parameter value of each point
    std::vector<double> skipped;       // parameters where root finding failed
};

/// Samples {f1 = f2} at n_samples parameter values in [t_min, t_max] (the
/// parameter is the coordinate along the tangent alpha at the origin) and
/// maps each point through Psi_which. Throws PreconditionError for
/// identical polynomials or which outside {1, 2}.
Polyline trace_partition_boundary(const TwoPolySet& a, int which, double t_min, double t_max, int n_samples);

struct GridSpec {
    double x_min = -0.3, x_max = 0.3;
    double y_min = -0.3, y_max = 0.3;
    int nx = 101, ny = 101;
};

/// Labels of grid nodes in row-major order (y outer, x inner). Rows are
/// split across `jobs` threads; the output order does not depend on it.
std::vector<RegionLabel> classify_scan(const TwoPolySet& a, const GridSpec& grid, int jobs = 1,
                                       const SolverOptions& opts = {});

Vec grid_node(const GridSpec& grid, int ix, int iy);

void write_polyline_csv(std::ostream& os, const Polyline& p);
void write_grid_csv(std::ostream& os, const GridSpec& grid, const std::vector<RegionLabel>& labels);

/// Distance from p to the polyline (segments between consecutive points).
double distance_to_polyline(const Polyline& line, const Vec& p);

}  // namespace altproj
