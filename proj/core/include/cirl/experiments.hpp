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

#include "cirl/gridworld.hpp"
#include "cirl/irl.hpp"
#include "cirl/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cirl {

/// Samples N trajectories of length T + 1: s0 ~ nu0, a_t ~ pi(.|s_t),
/// s_{t+1} ~ P(.|s_t, a_t). Deterministic given the seed (own inverse-CDF
/// sampling on top of a fixed 64-bit generator).
Demonstrations sample_demonstrations(const Cmdp& cmdp, const Policy& policy, int count_n,
                                     int horizon_t, std::uint64_t seed);

/// Shared harness knobs. Episode budgets follow the desk-scale defaults.
struct ExperimentOptions {
    int gda_episodes = 200000;        ///< budget for exact-expert (Table-style) runs
    int gda_episodes_finite = 30000;  ///< budget per finite-sample cell
    double gda_eta = 1.0;             ///< learning rate for w and xi
    double solver_tol = 1e-8;         ///< expert solve tolerance
    double eval_tol = 1e-8;           ///< re-solve tolerance for the learned rewards
    double test_threshold = 1e3;      ///< b1 = test_threshold * ones(k)
    double class_radius = 10.0;       ///< ball radius for the span classes
    int jobs = 0;                     ///< 0 selects the hardware concurrency
    std::uint64_t seed = 0;
};

struct GeneralizationRow {
    std::string method;   ///< one of R1_F, R2_F, R1_M, R2_M
    std::string regime;   ///< train or test
    double delta_mu = 0.0;
    double delta_j = 0.0;
    bool converged = true;
    std::string note;     ///< failure note when a solver did not converge
};

struct GeneralizationReport {
    std::vector<GeneralizationRow> rows;
    std::vector<std::uint64_t> seeds;
    std::string config_hash;
    std::string version;

    /// Row lookup helper; throws if missing.
    const GeneralizationRow& find(const std::string& method, const std::string& regime) const;
};

/**
 * The generalization study: solves the expert at b0, runs GDA IRL from the
 * exact expert occupancy for the four methods {R1, R2} x {constrained,
 * unconstrained}, re-solves each learned reward at b0 (train) and at the
 * large test threshold b1, and reports delta mu = ||mu^{E,b} - mu^b||_1 and
 * delta J = J(mu^{E,b}, rE) - J(mu^b, rE). Writes metrics.csv,
 * reward_grid.json, policy_grid.json and run_meta.json under out_dir.
 * Solver failures are recorded per method instead of aborting.
 */
GeneralizationReport run_generalization_experiment(const GridworldConfig& config,
                                                   const std::string& out_dir,
                                                   const ExperimentOptions& options = {});

struct FiniteSampleRow {
    std::string method;  ///< R2l1_F, R2l2_F, R2l1_M, R2l2_M
    int num_trajectories = 0;
    double quantile = 0.5;
    double policy_error = 0.0;
    double reward_error = 0.0;
};

struct FiniteSampleReport {
    std::vector<FiniteSampleRow> rows;
    std::vector<std::uint64_t> seeds;
    std::string config_hash;
    std::string version;

    double value(const std::string& method, int n, double quantile, bool reward) const;
};

/**
 * The finite-sample study: for every trajectory count and seed, samples
 * demonstrations from the expert policy, estimates the empirical occupancy,
 * runs GDA IRL for the bounded classes R2^l1 (radius 1) and R2^l2 (radius
 * 1/sqrt(2)) over both feasible sets, and records the flattened policy error
 * ||piE - pi_hat||_1 and the reward distance to rE + span(1). Per-cell work
 * runs on up to `jobs` threads; rows are emitted in deterministic key order
 * with the median and 0.1/0.9 quantiles per (method, N).
 */
FiniteSampleReport run_finite_sample_experiment(const GridworldConfig& config,
                                                const std::vector<int>& trajectory_counts,
                                                int horizon_t, int num_seeds,
                                                const std::string& out_dir,
                                                const ExperimentOptions& options = {});

/// Deterministic per-cell seed derivation (split-mix style hash of the base
/// seed and cell coordinates).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c);

/// Library version string recorded in run_meta.json.
std::string version_string();

}  // namespace cirl
