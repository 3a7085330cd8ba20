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

#include <cstdint>
#include <utility>
#include <vector>

namespace cirl {

enum class NormKind { l1, l2, unbounded };

/// Linear reward class {Phi w : ||w|| <= radius} with an l1 or l2 ball on the
/// weights, or the unbounded span.
struct RewardClass {
    Matrix phi;      ///< nm x d feature matrix
    NormKind norm_kind = NormKind::l1;
    double radius = 1.0;

    Index dim() const { return phi.cols(); }
    /// R = max_{s,a} ||Phi(s,a)||_inf, the feature bound entering the sample
    /// complexity result.
    double feature_bound() const { return phi.cwiseAbs().maxCoeff(); }

    void validate() const;
};

/// Expert demonstrations: N state-action trajectories of equal length T + 1.
struct Demonstrations {
    std::vector<std::vector<std::pair<int, int>>> trajectories;
    int horizon = 0;  ///< T

    void validate(Index n, Index m) const;
};

/// Configuration for the gradient descent-ascent IRL loop.
struct GdaConfig {
    double eta = 0.5;           ///< learning rate for w and xi
    int episodes = 100000;
    double beta = 1.0;
    std::uint64_t seed = 0;
    int record_every = 1000;
    double npg_eta = 0.0;       ///< NPG step size; 0 selects (1-gamma)/beta

    void validate() const;
};

struct TracePoint {
    int episode = 0;
    double ipm = 0.0;
    double max_violation = 0.0;
    double lagrangian = 0.0;
};

struct IrlResult {
    Vector weights;           ///< w, length d, inside the class ball
    Vector reward;            ///< Phi w, length nm
    Vector dual;              ///< xi >= 0, length k
    Policy policy;
    OccupancyMeasure occupancy;
    std::vector<TracePoint> trace;
};

/**
 * Empirical occupancy estimate from demonstrations:
 * mu(s,a) = (1-gamma)/N sum_i sum_{t=0}^T gamma^t 1(s_t^i = s, a_t^i = a).
 * The total mass is 1 - gamma^{T+1} by construction. Throws ValidationError
 * on an empty data set.
 */
OccupancyMeasure estimate_occupancy(const Demonstrations& demos, double gamma,
                                    Index n, Index m);

/**
 * Integral probability metric induced by a bounded reward class:
 * radius * ||Phi^T (mu - mu_ref)||_* with the dual norm (infinity-norm for the
 * l1 ball, 2-norm for the l2 ball). Throws ValidationError for the unbounded
 * class, whose IPM is a characteristic function; use unbounded_ipm_verdict.
 */
double ipm_distance(const RewardClass& reward_class, const OccupancyMeasure& mu,
                    const OccupancyMeasure& mu_ref);

enum class IpmVerdict { equal, unequal };

/// The characteristic-function IPM of the unrestricted reward class: equal
/// when ||mu - mu_ref||_inf <= 1e-12, unequal otherwise.
IpmVerdict unbounded_ipm_verdict(const OccupancyMeasure& mu, const OccupancyMeasure& mu_ref);

/**
 * One entropy-regularized natural policy gradient step under softmax
 * parametrization:
 *   pi+(a|s) proportional to pi(a|s)^(1 - eta beta/(1-gamma))
 *                            * exp(eta q_soft(s,a)/(1-gamma)),
 * where q_soft are the soft q-values of pi under reward r. At
 * eta = (1-gamma)/beta this is exactly soft policy iteration. Requires a
 * strictly positive policy and 0 < eta <= (1-gamma)/beta.
 */
Policy npg_step(const Cmdp& cmdp, const Policy& policy, const Vector& r, double beta,
                double eta);

/**
 * Gradient descent-ascent for constrained IRL. Starting from the uniform
 * policy, w = 0, xi = 0, each episode sets r = Phi w - Psi xi, performs one
 * NPG step, computes the exact occupancy of the new policy, and takes
 * projected gradient steps
 *   w  <- P_ball(w - eta Phi^T (mu - mu_expert)),
 *   xi <- max(0, xi - eta (b - Psi^T mu)).
 * The l1 ball uses the sort-and-threshold projection; the l2 ball radial
 * scaling. A trace row (ipm distance, max violation, Lagrangian value) is
 * recorded every record_every episodes. Aborts with ConvergenceError when the
 * Lagrangian magnitude exceeds 1e6.
 */
IrlResult gda_irl(const Cmdp& cmdp, const RewardClass& reward_class,
                  const OccupancyMeasure& mu_expert, const GdaConfig& config);

struct SampleSize {
    long long num_trajectories = 0;  ///< N
    long long horizon = 0;           ///< T
};

/// The finite-sample prescription N = ceil(32 R^2 / eps^2 log(2d / delta)),
/// T = ceil(log(eps / (8R)) / log(gamma)). Requires 0 < eps <= 8R,
/// delta in (0,1), d >= 1, gamma in (0,1).
SampleSize sample_size(double epsilon, double delta, double feature_bound_R, Index d,
                       double gamma);

}  // namespace cirl
