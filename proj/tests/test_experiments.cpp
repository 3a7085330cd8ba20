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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cirl/experiments.hpp"
#include "cirl/forward.hpp"
#include "cirl/occupancy.hpp"
#include "cirl/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

using namespace cirl;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// Small gridworld that keeps the harness tests quick.
GridworldConfig small_config() {
    GridworldConfig config;
    config.width = 4;
    config.height = 4;
    config.reward_cells = {{0, 0.5}, {15, 0.5}};
    config.constraint_rects = {{5}, {10}};
    config.b = {0.04, 0.04};
    return config;
}

}  // namespace

TEST_CASE("default gridworld shape and reward layout") {
    const GridworldConfig config;
    const Cmdp cmdp = build_gridworld(config);
    CHECK(cmdp.n == 36);
    CHECK(cmdp.m == 4);
    CHECK(cmdp.num_constraints() == 2);
    for (Index row = 0; row < cmdp.transition.rows(); ++row) {
        REQUIRE(cmdp.transition.row(row).sum() == 1.0);
    }
    CHECK(cmdp.nu0.sum() == 1.0);
    // reward is state-dependent, copied across actions
    for (Index a = 0; a < 4; ++a) {
        CHECK((*cmdp.reward)[sa_index(36, 0, a)] == 0.5);
        CHECK((*cmdp.reward)[sa_index(36, 35, a)] == 0.5);
    }
}

TEST_CASE("deterministic moves when success_prob is one") {
    GridworldConfig config;
    config.success_prob = 1.0;
    const Cmdp cmdp = build_gridworld(config);
    // interior cell (1,1) = state 7, action right -> state 8
    const Index row = sa_index(36, 7, kRight);
    CHECK(cmdp.transition(row, 8) == 1.0);
}

TEST_CASE("corner cell bounces the off-grid mass back") {
    const Cmdp cmdp = build_gridworld(GridworldConfig{});
    // corner (0,0) = state 0, action up: intended target off-grid -> self.
    // Hand enumeration: success 0.9 to self, slip 0.025 each to up (self),
    // down (state 6), left (self), right (state 1).
    const Index row = sa_index(36, 0, kUp);
    CHECK(cmdp.transition(row, 0) == doctest::Approx(0.95).epsilon(1e-15));
    CHECK(cmdp.transition(row, 6) == doctest::Approx(0.025).epsilon(1e-15));
    CHECK(cmdp.transition(row, 1) == doctest::Approx(0.025).epsilon(1e-15));
}

TEST_CASE("boundary cells of the default grid") {
    CHECK(boundary_cells(6, 6).size() == 20);
    CHECK(boundary_cells(2, 2).size() == 4);
}

TEST_CASE("deterministic chain and policy give identical trajectories") {
    Cmdp cmdp;
    cmdp.n = 2;
    cmdp.m = 2;
    cmdp.gamma = 0.9;
    cmdp.nu0 = Vector(2);
    cmdp.nu0 << 1.0, 0.0;
    cmdp.transition = Matrix::Zero(4, 2);
    cmdp.transition(sa_index(2, 0, 0), 1) = 1.0;
    cmdp.transition(sa_index(2, 1, 0), 1) = 1.0;
    cmdp.transition(sa_index(2, 0, 1), 0) = 1.0;
    cmdp.transition(sa_index(2, 1, 1), 1) = 1.0;
    cmdp.psi = Matrix(4, 0);
    cmdp.b = Vector(0);

    Policy policy;
    policy.pi = Matrix(2, 2);
    policy.pi << 1.0, 0.0, 1.0, 0.0;

    const Demonstrations demos = sample_demonstrations(cmdp, policy, 5, 3, 99);
    for (const auto& traj : demos.trajectories) {
        REQUIRE(traj == demos.trajectories.front());
    }
    CHECK(demos.trajectories.front()[0] == std::pair<int, int>{0, 0});
    CHECK(demos.trajectories.front()[1] == std::pair<int, int>{1, 0});
}

TEST_CASE("initial state frequencies match nu0") {
    const Cmdp cmdp = build_gridworld(GridworldConfig{});
    const Policy uniform = Policy::uniform(36, 4);
    const int n_samples = 10000;
    const Demonstrations demos = sample_demonstrations(cmdp, uniform, n_samples, 0, 12345);
    Vector counts = Vector::Zero(36);
    for (const auto& traj : demos.trajectories) counts[traj[0].first] += 1.0;
    counts /= static_cast<double>(n_samples);
    for (Index s = 0; s < 36; ++s) {
        const double p = cmdp.nu0[s];
        const double sigma = std::sqrt(p * (1.0 - p) / n_samples);
        REQUIRE(std::abs(counts[s] - p) <= 3.0 * sigma);
    }
}

TEST_CASE("sampling is deterministic in the seed") {
    const Cmdp cmdp = build_gridworld(GridworldConfig{});
    const Policy uniform = Policy::uniform(36, 4);
    const Demonstrations a = sample_demonstrations(cmdp, uniform, 3, 10, 7);
    const Demonstrations b = sample_demonstrations(cmdp, uniform, 3, 10, 7);
    const Demonstrations c = sample_demonstrations(cmdp, uniform, 3, 10, 8);
    CHECK(a.trajectories == b.trajectories);
    CHECK(a.trajectories != c.trajectories);
}

TEST_CASE("empirical occupancy converges to the exact one") {
    const Cmdp cmdp = build_gridworld(GridworldConfig{});
    const Policy uniform = Policy::uniform(36, 4);
    const OccupancyMeasure exact = occupancy_from_policy(cmdp, uniform);
    CHECK(bellman_flow_residual(cmdp, exact) <= 1e-10);
    const Demonstrations demos = sample_demonstrations(cmdp, uniform, 10000, 1000, 2024);
    const OccupancyMeasure estimated = estimate_occupancy(demos, cmdp.gamma, 36, 4);
    CHECK((estimated.mu - exact.mu).cwiseAbs().sum() <= 0.05);
}

TEST_CASE("the l1 class recovers the sparse reward better than the l2 class") {
    const GridworldConfig config;
    const Cmdp cmdp = build_gridworld(config);
    const Vector r_expert = *cmdp.reward;
    const ConstrainedSolution expert =
        solve_rl_constrained(cmdp, r_expert, config.beta, 1e-8);
    const RewardClass rc_l1 = gridworld_full_class(config, NormKind::l1, 1.0);
    const RewardClass rc_l2 = gridworld_full_class(config, NormKind::l2, 1.0 / std::sqrt(2.0));

    std::vector<double> err_l1;
    std::vector<double> err_l2;
    for (int seed = 0; seed < 3; ++seed) {
        const Demonstrations demos = sample_demonstrations(
            cmdp, expert.policy, 1000, 1000, derive_seed(11, 4, 0, seed));
        const OccupancyMeasure mu_hat = estimate_occupancy(demos, config.gamma, 36, 4);
        GdaConfig gda;
        gda.eta = 1.0;
        gda.episodes = 30000;
        gda.beta = config.beta;
        gda.record_every = 30000;
        err_l1.push_back(
            potential_shaping_distance(gda_irl(cmdp, rc_l1, mu_hat, gda).reward, r_expert));
        err_l2.push_back(
            potential_shaping_distance(gda_irl(cmdp, rc_l2, mu_hat, gda).reward, r_expert));
    }
    std::sort(err_l1.begin(), err_l1.end());
    std::sort(err_l2.begin(), err_l2.end());
    CHECK(err_l1[1] < err_l2[1]);
}

TEST_CASE("expert at the default thresholds is feasible with active constraints") {
    const GridworldConfig config;
    const Cmdp cmdp = build_gridworld(config);
    REQUIRE(slater_check(cmdp));
    const ConstrainedSolution expert =
        solve_rl_constrained(cmdp, *cmdp.reward, config.beta, 1e-8);
    const Vector violation = constraint_violation(cmdp, expert.occupancy);
    CHECK(violation.maxCoeff() <= 1e-8);
    CHECK(bellman_flow_residual(cmdp, expert.occupancy) <= 1e-10);
}

TEST_CASE("finite-sample metrics are deterministic in the seed") {
    const GridworldConfig config = small_config();
    ExperimentOptions options;
    options.gda_episodes_finite = 300;
    options.gda_eta = 0.5;
    options.solver_tol = 1e-6;
    options.jobs = 2;
    options.seed = 42;

    const std::string dir_a = "finite_run_a";
    const std::string dir_b = "finite_run_b";
    run_finite_sample_experiment(config, {5, 10}, 40, 2, dir_a, options);
    run_finite_sample_experiment(config, {5, 10}, 40, 2, dir_b, options);
    CHECK(slurp(dir_a + "/metrics.csv") == slurp(dir_b + "/metrics.csv"));

    // changing the seed changes the estimates
    options.seed = 43;
    const std::string dir_c = "finite_run_c";
    run_finite_sample_experiment(config, {5, 10}, 40, 2, dir_c, options);
    CHECK(slurp(dir_a + "/metrics.csv") != slurp(dir_c + "/metrics.csv"));

    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
    std::filesystem::remove_all(dir_c);
}

TEST_CASE("finite-sample report carries all quantile rows") {
    const GridworldConfig config = small_config();
    ExperimentOptions options;
    options.gda_episodes_finite = 200;
    options.solver_tol = 1e-6;
    options.jobs = 2;
    const std::string dir = "finite_run_rows";
    const FiniteSampleReport report =
        run_finite_sample_experiment(config, {5}, 30, 3, dir, options);
    // 4 methods x 1 count x 3 quantiles
    CHECK(report.rows.size() == 12);
    for (const auto& row : report.rows) {
        REQUIRE(std::isfinite(row.policy_error));
        REQUIRE(std::isfinite(row.reward_error));
        REQUIRE(row.policy_error >= 0.0);
        REQUIRE(row.reward_error >= 0.0);
    }
    CHECK(std::filesystem::exists(dir + "/run_meta.json"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("generalization harness produces ordered finite metrics on a small grid") {
    const GridworldConfig config = small_config();
    ExperimentOptions options;
    options.gda_episodes = 4000;
    options.gda_eta = 0.5;
    options.solver_tol = 1e-7;
    options.eval_tol = 1e-7;
    options.jobs = 2;
    const std::string dir = "gen_run_small";
    const GeneralizationReport report =
        run_generalization_experiment(config, dir, options);
    CHECK(report.rows.size() == 8);
    for (const auto& row : report.rows) {
        if (!row.converged) continue;
        REQUIRE(row.delta_mu >= 0.0);
        REQUIRE(row.delta_j >= -1e-8);
    }
    CHECK(std::filesystem::exists(dir + "/metrics.csv"));
    CHECK(std::filesystem::exists(dir + "/reward_grid.json"));
    CHECK(std::filesystem::exists(dir + "/policy_grid.json"));
    CHECK(std::filesystem::exists(dir + "/run_meta.json"));

    // determinism of the metrics file
    const std::string dir2 = "gen_run_small_2";
    run_generalization_experiment(config, dir2, options);
    CHECK(slurp(dir + "/metrics.csv") == slurp(dir2 + "/metrics.csv"));
    std::filesystem::remove_all(dir);
    std::filesystem::remove_all(dir2);
}
