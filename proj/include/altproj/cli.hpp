#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "altproj/config.hpp"
#include "altproj/estimate.hpp"
#include "altproj/rates.hpp"

namespace altproj {

enum class ExitCode : int {
    Pass = 0,
    ConfigError = 1,
    SolverFailure = 2,
    Inapplicable = 3,
    VerifyFailed = 4,
};

struct CliOptions {
    std::filesystem::path out_dir = "out";
    std::optional<double> tol_exponent;  // overrides the config value
    std::optional<double> tol_product;
    int jobs = 1;
};

inline constexpr double kDefaultTolExponent = 0.02;
inline constexpr double kDefaultTolProduct = 0.05;

/// Prediction for a scenario plus how it was reached.
struct PredictionReport {
    RatePrediction prediction;
    std::vector<std::string> notes;  // extra "key = value" lines
};

/// Dispatch by set and subspace shape:
///  - hypograph, line span{(a, 0)}: hypersurface rate along a;
///  - two-poly, line: sign test along the line direction oriented by u0,
///    then the curve rate (line tangent to C) or the rate of the single
///    surface that receives the projections;
///  - hypograph, larger B: coordinate reflections that fix g, B and u0 cut
///    B down to an invariant subspace first; a line gets the hypersurface
///    rate, otherwise the Lojasiewicz bound.
/// Throws InapplicableError when no predictor covers the scenario.
PredictionReport predict_scenario(const Config& c);

struct VerifyOutcome {
    bool pass = false;
    PredictionReport prediction;
    std::optional<RateEstimate> estimate;
    std::vector<std::string> lines;  // human-readable check results
};

/// predict + simulate + estimate + band comparison. Exact and bound kinds
/// need |lambda_hat - lambda| <= tol_exponent; Exact kinds also need
/// |p_K - 1| <= tol_product at the last recorded step. Linear kinds need
/// detect_linear to fire.
VerifyOutcome verify_scenario(const Config& c, double tol_exponent, double tol_product, Trace* trace_out = nullptr);

ExitCode cmd_simulate(const Config& c, const CliOptions& opt, std::ostream& log);
ExitCode cmd_predict(const Config& c, const CliOptions& opt, std::ostream& log);
ExitCode cmd_verify(const Config& c, const CliOptions& opt, std::ostream& log);
ExitCode cmd_classify(const Config& c, const CliOptions& opt, std::ostream& log);
ExitCode cmd_partition(const Config& c, const CliOptions& opt, std::ostream& log);
ExitCode cmd_oracle(const Config& c, const CliOptions& opt, std::ostream& log);

/// Loads each config and runs `command` on it, mapping library errors to
/// exit codes. Several configs run on up to opt.jobs threads, each writing
/// under out_dir/<name>; the first nonzero code in input order is returned.
ExitCode run_command(const std::string& command, const std::vector<std::string>& config_paths,
                     const CliOptions& opt, std::ostream& log);

}  // namespace altproj
