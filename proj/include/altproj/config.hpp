#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "altproj/apm.hpp"
#include "altproj/region.hpp"

namespace altproj {

enum class SetKind { Hypograph, TwoPoly };

struct SetConfig {
    SetKind kind = SetKind::Hypograph;
    std::vector<std::string> vars;  // x-space variable names
    std::string g;                  // hypograph
    std::string f1, f2;             // two-poly
    friend bool operator==(const SetConfig&, const SetConfig&) = default;
};

struct VerifyConfig {
    double tail_fraction = 0.2;
    std::optional<long> fit_k_min, fit_k_max;  // explicit window instead of the tail
    std::optional<double> tol_exponent, tol_product;
    double constant_scale = 1.0;  // multiplies the predicted limit constant
    friend bool operator==(const VerifyConfig&, const VerifyConfig&) = default;
};

struct OracleConfig {
    double C = 1.0;
    int q = 1;
    std::vector<double> h;  // tail coefficients h_0, h_1, ...
    double x0 = 0.1;
    long K = 1000;
    friend bool operator==(const OracleConfig&, const OracleConfig&) = default;
};

struct RegionConfig {
    double x_min = -0.3, x_max = 0.3, y_min = -0.3, y_max = 0.3;
    int nx = 101, ny = 101;
    double t_min = -0.3, t_max = 0.3;
    int samples = 201;
    std::vector<std::array<double, 2>> points;
    GridSpec grid() const { return {x_min, x_max, y_min, y_max, nx, ny}; }
    friend bool operator==(const RegionConfig&, const RegionConfig&) = default;
};

struct OutputConfig {
    std::string trace = "trace.csv";
    std::string prediction = "prediction.txt";
    std::string estimate = "estimate.txt";
    std::string report = "report.txt";
    std::string oracle = "oracle.csv";
    std::string labels = "labels.csv";
    std::string boundary1 = "boundary1.csv";
    std::string boundary2 = "boundary2.csv";
    friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct Config {
    std::string name;
    std::optional<SetConfig> set;
    std::vector<std::vector<double>> span;  // subspace B
    std::vector<double> u0;
    long max_iter = 1000;
    int records_per_octave = 16;
    double solver_tol = 1e-12;
    int solver_max_iter = 100;
    int solver_max_halvings = 30;
    bool assert_convex = true;
    bool assert_nondegenerate = false;
    VerifyConfig verify;
    std::optional<OracleConfig> oracle;
    std::optional<RegionConfig> region;
    OutputConfig output;
    friend bool operator==(const Config&, const Config&) = default;

    SolverOptions solver() const { return {solver_tol, solver_max_iter, solver_max_halvings}; }
};

/// Parses YAML text. Polynomials are stored in canonical printed form, so
/// parse_config(emit_config(c)) == c for every parsed c. Throws ConfigError
/// or ParseError.
Config parse_config(const std::string& text);
Config load_config(const std::string& path);
std::string emit_config(const Config& c);

/// Parsed polynomials of the set section (g, or f1 and f2).
std::vector<MultiPoly> set_polynomials(const Config& c);

/// Builds the ConvexSet, running the convexity spot checks when asserted.
ConvexSet build_set(const Config& c);

/// Full APM scenario; throws ConfigError when the pieces do not fit together.
Scenario build_scenario(const Config& c);

}  // namespace altproj
