#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "altproj/proj.hpp"
#include "altproj/series.hpp"

namespace altproj {

struct Scenario {
    std::string name;
    ConvexSet set;
    LinearSubspace subspace;
    Vec u0;
    long max_iter = 1000;
    int records_per_octave = 16;  // recorded k beyond the dense prefix
    SolverOptions solver;
    bool assert_convex = true;
    bool assert_nondegenerate = false;
};

struct TraceRecord {
    long k = 0;
    Vec u;                    // u_k in B
    double norm_u = 0.0;
    Vec a;                    // P_A(u_k)
    std::vector<int> active;  // active constraints of that projection
    double dist_a_to_B = 0.0;
};

enum class StopReason { Completed, BelowFloor };

struct Trace {
    std::vector<TraceRecord> records;
    StopReason stop = StopReason::Completed;
    long ambiguous_projections = 0;
};

/// Iterations below this norm are not continued.
inline constexpr double kNormFloor = 1e-14;

/// Steps recorded by run_apm for a budget of K: every k < 32, then
/// records_per_octave log-spaced k per doubling together with k + 1 (so
/// per-step relations are observable), and K itself.
std::vector<long> record_schedule(long max_iter, int records_per_octave);

/// u_{k+1} = P_B(P_A(u_k)). Throws SolverFailure carrying the step index if
/// a projection fails, PreconditionError if u0 is not in B.
Trace run_apm(const Scenario& s);

std::string encode_active(const std::vector<int>& active);

/// CSV with header k,norm_u,u_1..u_m,active,dist_a_to_B at 17 significant digits.
void write_trace_csv(std::ostream& os, const Trace& t);

struct RecursionSpec {
    double C = 1.0;
    int q = 1;
    UniSeries h = UniSeries(0);  // zero tail by default
    double x0 = 0.1;
    long K = 1000;
};

/// x_0 .. x_K with x_{k+1}(1 + C x_{k+1}^q + x_{k+1}^{q+1} h(x_{k+1})) = x_k,
/// each step solved by safeguarded Newton to 1e-15 relative error. Throws
/// PreconditionError if the forward map is not increasing on [0, x0].
std::vector<double> run_recursion_oracle(const RecursionSpec& r);

struct StepViolation {
    long k = 0;
    double excess = 0.0;
};

/// ||a_{k+1}||^2 + d(a_k, B)^2 <= ||a_k||^2 over consecutive records; steps
/// exceeding it by more than tol are returned.
std::vector<StepViolation> fejer_check(const Trace& t, double tol = 1e-10);

struct StepResidualReport {
    std::vector<long> k;
    std::vector<double> ratio;  // |rho_k| / ||u_{k+1}||^(2d)
    double max_ratio_early = 0.0;
    double max_ratio_late = 0.0;
    bool bounded = true;
};

/// rho_k = ||u_k|| - ||u_{k+1}|| - d c0^2 ||u_{k+1}||^(2d-1) on consecutive
/// records in the tail (last half in log k). Bounded means the late-half
/// maximum of the scaled residual is within growth_limit times the
/// early-half maximum.
StepResidualReport step_residual_check(const Trace& t, unsigned d, double c0, double growth_limit = 4.0);

/// Constant h minimizing the spread of rho_k / ||u_{k+1}||^(2d) over the tail
/// (its median), for seeding the recursion oracle.
double fit_recursion_tail(const Trace& t, unsigned d, double c0);

struct X2Y4Report {
    std::vector<long> violations;  // k where the region is entered but left at k + 1
    std::optional<long> entry_step;  // first recorded k with 0 < x_k < y_k^2
    long checked_steps = 0;
};

/// For g = x^2 + y^4 traces: whenever 0 < x_k < y_k^2 <= eps at a recorded k
/// with k + 1 also recorded, requires 0 < x_{k+1} < y_{k+1}^2.
X2Y4Report x2y4_check(const Trace& t, double eps = 0.05);

}  // namespace altproj
