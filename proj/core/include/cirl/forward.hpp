/*
 * Copyright 2026 The cirl authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "cirl/occupancy.hpp"
#include "cirl/types.hpp"

namespace cirl {

/// Knobs for the forward solvers. Carried as a record so the CLI can
/// serialize one blob of tolerances and caps.
struct SolverConfig {
    double tol = 1e-8;
    double beta = 1.0;
    int max_iter = 200000;        ///< soft value iteration sweeps
    int dual_max_iter = 2000000;  ///< dual ascent steps
    int frank_wolfe_iters = 10000;
};

/// Solution of the entropy-regularized unconstrained MDP problem.
struct SoftSolution {
    Vector value;             ///< v*, length n
    Vector qvalue;            ///< q*, length nm
    Policy policy;            ///< softmax(q* / beta) per state
    OccupancyMeasure occupancy;
    int iterations = 0;
    double residual = 0.0;    ///< value-accuracy estimate gamma/(1-gamma) * last change
    bool converged = false;
};

/**
 * Soft value iteration: v <- beta logsumexp((r + gamma P v) / beta) per state
 * until the sup-norm change drops below tol (1 - gamma) / (2 gamma), which
 * bounds the value error by tol / 2 through the gamma-contraction. Returns the
 * softmax policy of the final q and its exact occupancy.
 *
 * When max_iter is exhausted the best iterate is returned with
 * converged = false rather than throwing.
 */
SoftSolution soft_value_iteration(const Cmdp& cmdp, const Vector& r, double beta,
                                  double tol, int max_iter = 200000);

/// Solution of the constrained problem together with the dual certificate.
struct ConstrainedSolution {
    OccupancyMeasure occupancy;
    Vector dual;              ///< xi* >= 0, length k
    Policy policy;
    double duality_gap = 0.0; ///< xi^T (b - Psi^T mu), the complementarity gap
    int iterations = 0;
    bool converged = false;
};

/**
 * Entropy-regularized constrained solver via projected subgradient ascent on
 * the Lagrangian dual: each step solves the unconstrained problem with reward
 * r - Psi xi by soft value iteration (warm-started), then updates
 * xi <- max(0, xi + eta_t (Psi^T mu - b)) with diminishing steps
 * eta_t = c / sqrt(t), c = 1 / (1 + ||Psi||_inf).
 *
 * Terminates when the dual residual ||max(Psi^T mu - b, 0)||_inf and every
 * complementary slackness product xi_i (b_i - Psi_i^T mu) are at most tol.
 * Throws ValidationError when Slater's condition fails and ConvergenceError
 * when the iteration cap is hit.
 */
ConstrainedSolution solve_rl_constrained(const Cmdp& cmdp, const Vector& r, double beta,
                                         double tol, int dual_max_iter = 2000000);

struct FrankWolfeSolution {
    OccupancyMeasure occupancy;
    double gap = 0.0;  ///< final Frank-Wolfe gap g^T (v - mu)
    int iterations = 0;
};

/**
 * Conditional-gradient ascent for max_{mu in F} r^T mu - f(mu) over the flow
 * polytope intersected with the safety constraints. The linear subproblem is
 * solved with a dense simplex; steps are 2/(t+2) (t >= 1, so iterates stay
 * strictly inside the polytope from the Slater starting point) or exact line
 * search for the quadratic regularizer.
 */
FrankWolfeSolution frank_wolfe_solve(const Cmdp& cmdp, const Vector& r,
                                     const Regularizer& reg, int iters);

/// Slater's condition: strict feasibility of the flow polytope with margin
/// tol::slater_margin on both mu >= 0 and Psi^T mu <= b, checked by phase-1
/// simplex.
bool slater_check(const Cmdp& cmdp);

/// Witness occupancy from the Slater LP (strictly feasible point), or throws
/// ValidationError when none exists.
OccupancyMeasure slater_witness(const Cmdp& cmdp);

namespace detail {
/// Soft (entropy-regularized) policy evaluation: returns the q-values of a
/// fixed policy under reward r, length nm. v solves
/// (I - gamma P_pi) v = r_pi + beta H(pi) row-wise.
Vector soft_policy_q_values(const Cmdp& cmdp, const Policy& policy, const Vector& r,
                            double beta);
}  // namespace detail

}  // namespace cirl
