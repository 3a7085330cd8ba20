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

namespace cirl {

/// State transition matrix P_pi(s, s') = sum_a pi(a|s) P(s'|s, a) induced by a
/// policy, n x n row-stochastic.
Matrix policy_transition_matrix(const Cmdp& cmdp, const Policy& policy);

/**
 * Exact discounted occupancy measure of a policy. The state marginals solve
 * the linear flow system (I - gamma P_pi^T) nu = (1 - gamma) nu0 by dense
 * elimination with partial pivoting, then mu(s, a) = pi(a|s) nu(s). The
 * result satisfies the Bellman flow constraints to about 1e-12 and sums to
 * one.
 *
 * Throws ValidationError on dimension mismatch and SingularMatrixError if the
 * flow system degenerates (impossible for gamma < 1 with valid inputs).
 */
OccupancyMeasure occupancy_from_policy(const Cmdp& cmdp, const Policy& policy);

/**
 * The inverse direction of the one-to-one policy/occupancy map:
 * pi(a|s) = mu(s, a) / nu(s) on states with marginal above tol::state_mass,
 * and the uniform row 1/m on unvisited states. Total on nonnegative inputs.
 */
Policy policy_from_occupancy(const Vector& mu, Index n, Index m);
Policy policy_from_occupancy(const OccupancyMeasure& mu);

/// Sup-norm residual of the Bellman flow constraints,
/// ||(E - gamma P)^T mu - (1 - gamma) nu0||_inf.
double bellman_flow_residual(const Cmdp& cmdp, const OccupancyMeasure& mu);

/**
 * Value of the occupancy regularizer f(mu).
 *
 * Entropy kind: beta * sum_{s,a} mu(s,a) log(mu(s,a) / nu(s)) with the
 * convention 0 log 0 = 0. For a single-state problem this reduces to
 * beta * sum_a mu(a) log mu(a), matching the single-state gradient convention
 * below. Quadratic kind: beta * ||mu||^2 / 2. None: 0.
 */
double regularizer_value(const OccupancyMeasure& mu, const Regularizer& reg);

/**
 * Gradient of the regularizer at an interior point, action-major layout.
 *
 * Entropy kind: beta * log pi^mu for n > 1 and beta * (log mu + 1) for n = 1.
 * Throws BoundaryGradientError when any policy entry is at or below
 * tol::grad_boundary (the subdifferential is empty on the relative boundary).
 * Quadratic kind: beta * mu. None: 0.
 */
Vector regularizer_gradient(const OccupancyMeasure& mu, const Regularizer& reg);

/// Regularized objective J(mu, r) = r^T mu - f(mu).
double objective(const OccupancyMeasure& mu, const Vector& r, const Regularizer& reg);

/// Constraint slack vector Psi^T mu - b; positive entries are violated.
/// Empty for unconstrained problems.
Vector constraint_violation(const Cmdp& cmdp, const OccupancyMeasure& mu);

}  // namespace cirl
