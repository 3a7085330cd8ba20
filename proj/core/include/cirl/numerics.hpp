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

#include "cirl/types.hpp"

#include <functional>
#include <vector>

namespace cirl {

/// Solves a x = rhs by Gaussian elimination with partial pivoting.
/// Throws SingularMatrixError when a pivot falls below 1e-12 times the row
/// scale of the matrix.
Vector solve_linear(const Matrix& a, const Vector& rhs);

/// Numerical rank: number of pivots above tol after row reduction with
/// partial pivoting. tol must be positive.
Index matrix_rank(const Matrix& a, double tol);

/// Same with the default tolerance 1e-9 * max|a_ij| * max(rows, cols).
Index matrix_rank(const Matrix& a);

/**
 * Linear feasibility problem in standard-ish form: find x with
 * a_eq x = b_eq, where variable j is restricted to x_j >= 0 when
 * nonnegative[j] is true and free otherwise. Free variables are split into
 * positive and negative parts internally so the phase-1 simplex operates on
 * the nonnegative orthant.
 */
struct LpFeasibilityProblem {
    Matrix a_eq;                      ///< p x q
    Vector b_eq;                      ///< length p
    std::vector<bool> nonnegative;    ///< length q; false marks a free variable
    std::size_t max_pivots = 0;       ///< 0 selects the default 10 (p+q)^2
};

enum class LpStatus { feasible, infeasible };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    Vector witness;  ///< satisfies a_eq x = b_eq to 1e-8 when feasible
};

/// Phase-1 simplex with Bland's anti-cycling rule. Throws ConvergenceError
/// (distinct from an infeasible verdict) if the pivot cap is exceeded.
LpResult lp_feasible(const LpFeasibilityProblem& problem);

/// Euclidean projection onto the l1 ball of the given radius via
/// sort-then-threshold. Idempotent; the output 1-norm is at most
/// radius + 1e-12.
Vector project_l1_ball(const Vector& w, double radius);

/// Entrywise max(x, 0).
Vector project_nonneg(const Vector& x);

/// Central finite differences of fn at x with step h, per coordinate.
Vector finite_difference_gradient(const std::function<double(const Vector&)>& fn,
                                  const Vector& x, double h);

namespace detail {

/// Two-phase simplex maximizing objective^T x over a_eq x = b_eq with the
/// same sign conventions as LpFeasibilityProblem. Internal support for the
/// conditional-gradient subproblem; not a general-purpose LP interface.
/// Returns nothing when infeasible; throws ConvergenceError on an unbounded
/// ray or a pivot-cap hit.
std::optional<Vector> lp_maximize(const LpFeasibilityProblem& problem, const Vector& objective);

}  // namespace detail

}  // namespace cirl
