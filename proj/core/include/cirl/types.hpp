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

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>

namespace cirl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Invalid input: bad dimensions, malformed distributions, out-of-range
/// parameters. Maps to exit code 1 in the CLI.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// An iterative method ran out of budget before reaching its tolerance.
/// Maps to exit code 2 in the CLI.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A pivot collapsed during elimination. For discounted flow systems this
/// cannot happen and indicates corrupted inputs.
class SingularMatrixError : public std::runtime_error {
public:
    explicit SingularMatrixError(const std::string& msg) : std::runtime_error(msg) {}
};

/// The entropy regularizer has an empty subdifferential on the relative
/// boundary of the occupancy polytope; asking for a gradient there raises this.
class BoundaryGradientError : public std::runtime_error {
public:
    explicit BoundaryGradientError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace tol {
/// State marginal below this counts as "unvisited" when converting an
/// occupancy measure back to a policy.
inline constexpr double state_mass = 1e-12;
/// Policy entries at or below this make the entropy gradient undefined.
inline constexpr double grad_boundary = 1e-12;
/// Occupancy entries in [-clamp_negative, 0) are clamped to 0; anything more
/// negative is rejected.
inline constexpr double clamp_negative = 1e-12;
/// Margin that encodes "strict" feasibility in Slater checks.
inline constexpr double slater_margin = 1e-6;
/// Default threshold for declaring an inequality constraint active.
inline constexpr double active_default = 1e-8;
/// Row-stochasticity / distribution validation tolerance.
inline constexpr double stochastic = 1e-12;
}  // namespace tol

/// Flat index of the state-action pair (s, a) in the action-major layout:
/// entries are ordered (s1,a1), (s2,a1), ..., (sn,a1), (s1,a2), ...
inline Index sa_index(Index n, Index s, Index a) { return a * n + s; }

/// The action-stacked identity E in R^{nm x n}: m copies of I_n stacked
/// vertically, so that (E^T mu)(s) is the state marginal of mu.
Matrix stacked_identity(Index n, Index m);

/**
 * A finite constrained MDP (S, A, P, nu0, Psi, b, gamma) with an optional
 * reward vector. All state-action quantities use the action-major flat layout
 * (see sa_index), which keeps E, P and Psi in the same block structure used
 * throughout the solver and analysis code.
 */
struct Cmdp {
    Index n = 0;               ///< number of states, n >= 1
    Index m = 0;               ///< number of actions, m > 1
    double gamma = 0.0;        ///< discount factor in (0, 1)
    Vector nu0;                ///< initial state distribution, length n
    Matrix transition;         ///< row-stochastic P, nm x n
    Matrix psi;                ///< constraint costs, nm x k (k = 0: unconstrained)
    Vector b;                  ///< constraint thresholds, length k
    std::optional<Vector> reward;  ///< optional reward, length nm

    Index num_constraints() const { return psi.cols(); }
    Index num_state_actions() const { return n * m; }

    /// Checks all structural invariants; throws ValidationError on the first
    /// violation (row sums within 1e-12, nu0 a distribution, gamma in (0,1),
    /// m > 1, psi/b consistent, reward length).
    void validate() const;

    /// Copy of this CMDP with the safety constraints removed (k = 0). Used to
    /// run the same algorithms over the unconstrained feasible set.
    Cmdp without_constraints() const;

    /// Copy with the thresholds replaced (e.g. large b for generalization
    /// tests).
    Cmdp with_thresholds(const Vector& new_b) const;
};

/// A Markov policy: row s is the action distribution pi(.|s).
struct Policy {
    Matrix pi;  ///< n x m, each row a probability vector

    static Policy uniform(Index n, Index m);

    Index num_states() const { return pi.rows(); }
    Index num_actions() const { return pi.cols(); }

    void validate() const;
};

/**
 * A discounted state-action occupancy measure in the action-major layout.
 * Entries within -1e-12 of zero are clamped to 0 at construction; more
 * negative entries are rejected. Solver-produced measures additionally sum to
 * one up to solver tolerance.
 */
struct OccupancyMeasure {
    Index n = 0;
    Index m = 0;
    Vector mu;  ///< length nm, nonnegative

    OccupancyMeasure() = default;
    OccupancyMeasure(Index n_states, Index n_actions, Vector values);

    double operator()(Index s, Index a) const { return mu[sa_index(n, s, a)]; }

    /// State marginals nu(s) = sum_a mu(s, a), length n.
    Vector state_marginals() const;

    double total_mass() const { return mu.sum(); }
};

enum class RegularizerKind { none, entropy, quadratic };

/// Convex occupancy regularizer f. The entropy kind is the negative
/// conditional action entropy weighted by beta; the quadratic kind is
/// beta * ||mu||^2 / 2; none is identically zero.
struct Regularizer {
    RegularizerKind kind = RegularizerKind::none;
    double beta = 1.0;

    static Regularizer none() { return {RegularizerKind::none, 1.0}; }
    static Regularizer entropy(double beta);
    static Regularizer quadratic(double beta);
};

}  // namespace cirl
