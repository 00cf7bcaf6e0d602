#pragma once

#include <functional>

#include <Eigen/Dense>

namespace altproj {

struct SolverOptions {
    double tol = 1e-12;
    int max_iter = 100;
    int max_halvings = 30;
};

struct NewtonOutcome {
    Eigen::VectorXd x;
    double residual = 0.0;  // max-norm of F at x
    int iterations = 0;
    bool converged = false;
};

/// F and its Jacobian at x.
using NewtonSystem = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& f, Eigen::MatrixXd& jac)>;

/// Newton's method with backtracking halving on ||F||_2. After the max-norm
/// residual drops below tol, a few extra full steps are taken while they
/// keep reducing it, so results sit at rounding level rather than at tol.
NewtonOutcome damped_newton(const NewtonSystem& system, Eigen::VectorXd x0, const SolverOptions& opts);

}  // namespace altproj
