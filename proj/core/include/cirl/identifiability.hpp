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

#include "cirl/irl.hpp"
#include "cirl/types.hpp"

#include <utility>
#include <vector>

namespace cirl {

/// Index sets of active inequality constraints at an occupancy measure:
/// safety constraints satisfied with equality and state-action pairs with
/// zero mass.
struct ActiveSets {
    std::vector<Index> safety_active;   ///< I(mu), indices into 1..k (0-based)
    std::vector<Index> nonneg_active;   ///< J(mu), flat action-major sa indices
};

/// Determines the active sets at tolerance tol. Throws ValidationError when
/// mu violates a safety or nonnegativity constraint by more than tol.
ActiveSets active_sets(const Cmdp& cmdp, const OccupancyMeasure& mu, double tol = tol::active_default);

/// The matrix E - gamma P whose column span is the potential shaping subspace
/// U. Full column rank n for gamma < 1.
Matrix shaping_subspace_basis(const Matrix& transition, double gamma);

/**
 * Normal-cone membership test: decides whether mu is optimal for r by
 * checking r - grad f(mu) against U + cone{Psi_i, i active} +
 * cone{-e_sa, (s,a) active} via an LP with free shaping coefficients and
 * nonnegative cone coefficients. For the entropy regularizer a boundary mu
 * has an empty subdifferential, so the test returns false there.
 */
bool reward_in_solution_cone(const Cmdp& cmdp, const OccupancyMeasure& mu, const Vector& r,
                             const Regularizer& reg, double tol = tol::active_default);

/// Rank diagnostics for exact identifiability of a linear reward class.
struct IdentifiabilityReport {
    Index rank_phi = 0;
    Index rank_xi = 0;        ///< rank of Xi = [E - gamma P, Psi]
    Index rank_joint = 0;     ///< rank of [Phi, Xi]
    bool condition_met = false;  ///< rank_joint == rank_phi + rank_xi
    Index shaping_dimension = 0;  ///< rank of E - gamma P
};

/// Evaluates the rank condition rank[Phi, Xi] = rank Phi + rank Xi with
/// Xi = [E - gamma P, Psi]. When it holds and the expert is realizable, the
/// reward class identifies the expert reward exactly.
IdentifiabilityReport rank_condition(const RewardClass& reward_class, const Cmdp& cmdp);

/// Distance of r_hat to the line r_expert + span(1):
/// || (r_hat - r_expert) - mean(r_hat - r_expert) ||_2.
double potential_shaping_distance(const Vector& r_hat, const Vector& r_expert);

/**
 * The two-transition-law witness pair: P1 stacks [I, D, I, D, ...] and P2
 * stacks [D, I, D, I, ...] action-blockwise, with D the upper-shift matrix
 * whose last state is absorbing. Their concatenated shaping bases have rank
 * 2n - 1, certifying that only constant reward shifts generalize across both
 * laws. Requires n >= 2, m >= 2.
 */
std::pair<Matrix, Matrix> rank_witness_pair(Index n, Index m);

/// rank [E - gamma P1, E - gamma P2]; equals 2n - 1 exactly when the shaping
/// subspaces of the two laws intersect only in span(1).
Index generalizability_rank(const Matrix& p1, const Matrix& p2, double gamma);

}  // namespace cirl
