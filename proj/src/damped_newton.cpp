#include "altproj/damped_newton.hpp"

#include <cmath>

namespace altproj {

NewtonOutcome damped_newton(const NewtonSystem& system, Eigen::VectorXd x0, const SolverOptions& opts) {
    const Eigen::Index n = x0.size();
    NewtonOutcome out;
    out.x = std::move(x0);
    Eigen::VectorXd f(n), f_trial(n);
    Eigen::MatrixXd jac(n, n), jac_trial(n, n);
    system(out.x, f, jac);
    out.residual = f.lpNorm<Eigen::Infinity>();
    int polish = 0;
    constexpr int kPolishSteps = 3;

    for (int it = 0; it < opts.max_iter; ++it) {
        if (out.residual == 0.0) {
            out.converged = true;
            return out;
        }
        if (out.residual <= opts.tol) {
            out.converged = true;
            if (polish++ >= kPolishSteps) return out;
        }
        const Eigen::VectorXd step = jac.partialPivLu().solve(-f);
        if (!step.allFinite()) break;
        const double norm0 = f.norm();
        double scale = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opts.max_halvings; ++h) {
            const Eigen::VectorXd trial = out.x + scale * step;
            system(trial, f_trial, jac_trial);
            if (f_trial.allFinite() && f_trial.norm() < norm0) {
                out.x = trial;
                f = f_trial;
                jac = jac_trial;
                accepted = true;
                break;
            }
            if (out.converged) break;  // polishing only takes full steps
            scale *= 0.5;
        }
        ++out.iterations;
        if (!accepted) {
            // No decrease possible: either already at rounding level or stuck.
            return out;
        }
        out.residual = f.lpNorm<Eigen::Infinity>();
    }
    out.converged = out.residual <= opts.tol;
    return out;
}

}  // namespace altproj
