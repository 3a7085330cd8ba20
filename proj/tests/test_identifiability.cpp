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

#include "cirl/forward.hpp"
#include "cirl/gridworld.hpp"
#include "cirl/identifiability.hpp"
#include "cirl/numerics.hpp"
#include "cirl/occupancy.hpp"

#include <cmath>
#include <random>

using namespace cirl;

namespace {

Cmdp single_state_cmdp(double b = 0.75) {
    Cmdp cmdp;
    cmdp.n = 1;
    cmdp.m = 2;
    cmdp.gamma = 0.9;
    cmdp.nu0 = Vector::Ones(1);
    cmdp.transition = Matrix::Ones(2, 1);
    cmdp.psi = Matrix(2, 1);
    cmdp.psi << 0.0, 1.0;
    cmdp.b = Vector::Constant(1, b);
    cmdp.reward = Vector(2);
    *cmdp.reward << 0.0, 2.0;
    cmdp.validate();
    return cmdp;
}

Cmdp random_cmdp(Index n, Index m, std::mt19937_64& rng, Index k = 0) {
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    Cmdp cmdp;
    cmdp.n = n;
    cmdp.m = m;
    cmdp.gamma = 0.9;
    cmdp.nu0 = Vector::Constant(n, 1.0 / static_cast<double>(n));
    cmdp.nu0[n - 1] = 1.0 - cmdp.nu0.head(n - 1).sum();
    cmdp.transition = Matrix(n * m, n);
    for (Index row = 0; row < n * m; ++row) {
        for (Index j = 0; j < n; ++j) cmdp.transition(row, j) = unif(rng);
        cmdp.transition.row(row) /= cmdp.transition.row(row).sum();
        cmdp.transition(row, 0) += 1.0 - cmdp.transition.row(row).sum();
    }
    cmdp.psi = Matrix(n * m, k);
    for (Index i = 0; i < (n * m) * k; ++i) cmdp.psi(i / k, i % k) = unif(rng);
    cmdp.b = Vector::Zero(k);
    cmdp.validate();
    return cmdp;
}

Matrix random_stochastic(Index n, Index m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    Matrix p(n * m, n);
    for (Index row = 0; row < n * m; ++row) {
        for (Index j = 0; j < n; ++j) p(row, j) = unif(rng);
        p.row(row) /= p.row(row).sum();
        p(row, 0) += 1.0 - p.row(row).sum();
    }
    return p;
}

GridworldConfig default_gridworld() { return GridworldConfig{}; }

}  // namespace

TEST_CASE("active sets on the worked single-state instances") {
    const Cmdp cmdp = single_state_cmdp();
    Vector v(2);
    v << 0.25, 0.75;
    const ActiveSets at_boundary = active_sets(cmdp, OccupancyMeasure(1, 2, v));
    REQUIRE(at_boundary.safety_active.size() == 1);
    CHECK(at_boundary.safety_active[0] == 0);
    CHECK(at_boundary.nonneg_active.empty());

    v << 0.5, 0.5;
    const ActiveSets interior = active_sets(cmdp, OccupancyMeasure(1, 2, v));
    CHECK(interior.safety_active.empty());
    CHECK(interior.nonneg_active.empty());

    // quadratic-regularizer optimum of the unconstrained example
    const Cmdp free = single_state_cmdp(2.0);
    v << 0.0, 1.0;
    const ActiveSets vertex = active_sets(free, OccupancyMeasure(1, 2, v));
    REQUIRE(vertex.nonneg_active.size() == 1);
    CHECK(vertex.nonneg_active[0] == 0);

    v << 0.0, 1.5;
    CHECK_THROWS_AS(active_sets(single_state_cmdp(0.75), OccupancyMeasure(1, 2, v)),
                    ValidationError);
}

TEST_CASE("shaping subspace basics") {
    Matrix p = Matrix::Ones(2, 1);
    const Matrix basis = shaping_subspace_basis(p, 0.5);
    CHECK(basis(0, 0) == doctest::Approx(0.5));
    CHECK(basis(1, 0) == doctest::Approx(0.5));

    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix pt = random_stochastic(4, 3, rng);
        const Matrix b = shaping_subspace_basis(pt, 0.9);
        REQUIRE(matrix_rank(b) == 4);
        // (E - gamma P) 1_n = (1 - gamma) 1_nm
        const Vector image = b * Vector::Ones(4);
        REQUIRE((image - Vector::Constant(12, 0.1)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("cone membership decides the single-state example") {
    const Cmdp cmdp = single_state_cmdp();
    Vector mu_e(2);
    mu_e << 0.25, 0.75;
    const OccupancyMeasure mu(1, 2, mu_e);
    const Regularizer entropy = Regularizer::entropy(1.0);

    Vector r(2);
    r << 0.0, 2.0;
    CHECK(reward_in_solution_cone(cmdp, mu, r, entropy));

    r << 2.0, 0.0;
    CHECK(!reward_in_solution_cone(cmdp, mu, r, entropy));
}

TEST_CASE("membership by construction for interior unconstrained points") {
    std::mt19937_64 rng(19);
    const Regularizer entropy = Regularizer::entropy(1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Cmdp cmdp = random_cmdp(3, 2, rng);
        std::uniform_real_distribution<double> unif(0.05, 1.0);
        Vector raw(6);
        for (Index i = 0; i < 6; ++i) raw[i] = unif(rng);
        // feasible interior occupancy: use a random policy's exact occupancy
        Policy policy;
        policy.pi = Matrix(3, 2);
        for (Index s = 0; s < 3; ++s) {
            policy.pi(s, 0) = unif(rng);
            policy.pi(s, 1) = 1.0 - policy.pi(s, 0);
        }
        const OccupancyMeasure mu = occupancy_from_policy(cmdp, policy);
        Vector eta(3);
        for (Index i = 0; i < 3; ++i) eta[i] = unif(rng) - 0.5;
        const Vector r = regularizer_gradient(mu, entropy) +
                         shaping_subspace_basis(cmdp.transition, cmdp.gamma) * eta;
        REQUIRE(reward_in_solution_cone(cmdp, mu, r, entropy));
    }
}

TEST_CASE("cone membership returns false on the boundary for entropy") {
    const Cmdp cmdp = single_state_cmdp(2.0);
    Vector v(2);
    v << 0.0, 1.0;
    Vector r(2);
    r << 0.0, 2.0;
    CHECK(!reward_in_solution_cone(cmdp, OccupancyMeasure(1, 2, v), r,
                                   Regularizer::entropy(1.0)));
}

TEST_CASE("soundness: forward solutions always pass the cone test") {
    std::mt19937_64 rng(21);
    const Regularizer entropy = Regularizer::entropy(1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Cmdp cmdp = random_cmdp(4, 3, rng, 1);
        const Vector r = Vector::NullaryExpr(12, [&]() {
            return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        });
        // wedge the threshold so Slater holds
        const OccupancyMeasure uniform_mu =
            occupancy_from_policy(cmdp, Policy::uniform(4, 3));
        const SoftSolution soft = soft_value_iteration(cmdp, r, 1.0, 1e-10);
        const double cu = cmdp.psi.col(0).dot(uniform_mu.mu);
        const double co = cmdp.psi.col(0).dot(soft.occupancy.mu);
        cmdp.b[0] = co > cu ? 0.5 * (cu + co) : cu + 0.05;
        const ConstrainedSolution sol = solve_rl_constrained(cmdp, r, 1.0, 1e-7);
        REQUIRE(reward_in_solution_cone(cmdp, sol.occupancy, r, entropy, 1e-5));
    }
}

TEST_CASE("completeness: shifted rewards reproduce the same occupancy") {
    std::mt19937_64 rng(25);
    const double beta = 1.0;
    for (int trial = 0; trial < 5; ++trial) {
        Cmdp cmdp = random_cmdp(4, 3, rng, 1);
        Vector r = Vector::NullaryExpr(12, [&]() {
            return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        });
        const OccupancyMeasure uniform_mu =
            occupancy_from_policy(cmdp, Policy::uniform(4, 3));
        const SoftSolution soft = soft_value_iteration(cmdp, r, beta, 1e-10);
        const double cu = cmdp.psi.col(0).dot(uniform_mu.mu);
        const double co = cmdp.psi.col(0).dot(soft.occupancy.mu);
        cmdp.b[0] = co > cu ? 0.5 * (cu + co) : cu + 0.05;
        const ConstrainedSolution base = solve_rl_constrained(cmdp, r, beta, 1e-8);
        const ActiveSets sets = active_sets(cmdp, base.occupancy, 1e-5);

        std::uniform_real_distribution<double> unif(0.0, 1.0);
        Vector eta(4);
        for (Index i = 0; i < 4; ++i) eta[i] = unif(rng) - 0.5;
        Vector shifted = r + shaping_subspace_basis(cmdp.transition, cmdp.gamma) * eta;
        for (Index idx : sets.safety_active) {
            shifted += unif(rng) * cmdp.psi.col(idx);
        }
        const ConstrainedSolution moved = solve_rl_constrained(cmdp, shifted, beta, 1e-8);
        REQUIRE((moved.occupancy.mu - base.occupancy.mu).cwiseAbs().maxCoeff() <= 1e-4);
    }
}

TEST_CASE("shaping invariance of unconstrained soft solutions") {
    std::mt19937_64 rng(27);
    const Cmdp cmdp = random_cmdp(4, 3, rng);
    const Vector r = Vector::NullaryExpr(12, [&]() {
        return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    });
    const SoftSolution base = soft_value_iteration(cmdp, r, 1.0, 1e-11);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Vector eta(4);
        for (Index i = 0; i < 4; ++i) eta[i] = unif(rng);
        const Vector shifted =
            r + shaping_subspace_basis(cmdp.transition, cmdp.gamma) * eta;
        const SoftSolution moved = soft_value_iteration(cmdp, shifted, 1.0, 1e-11);
        REQUIRE((moved.occupancy.mu - base.occupancy.mu).cwiseAbs().maxCoeff() <= 1e-6);
    }
}

TEST_CASE("rank condition separates the two gridworld reward classes") {
    const GridworldConfig config = default_gridworld();
    const Cmdp cmdp = build_gridworld(config);

    const RewardClass r1 = gridworld_boundary_class(config, NormKind::unbounded, 1.0);
    const IdentifiabilityReport rep1 = rank_condition(r1, cmdp);
    CHECK(rep1.condition_met);
    CHECK(rep1.rank_phi == 20);
    CHECK(rep1.shaping_dimension == 36);

    const RewardClass r2 = gridworld_full_class(config, NormKind::unbounded, 1.0);
    const IdentifiabilityReport rep2 = rank_condition(r2, cmdp);
    CHECK(!rep2.condition_met);
    CHECK(rep2.rank_phi == 36);
}

TEST_CASE("a constant feature column breaks the rank condition") {
    std::mt19937_64 rng(29);
    const Cmdp cmdp = random_cmdp(3, 2, rng);
    RewardClass rc;
    rc.phi = Matrix::Ones(6, 1);  // 1_nm lies in the shaping span
    rc.norm_kind = NormKind::unbounded;
    rc.radius = 1.0;
    CHECK(!rank_condition(rc, cmdp).condition_met);
}

TEST_CASE("potential shaping distance") {
    Vector r_e(4);
    r_e << 1.0, 0.0, -1.0, 2.0;
    CHECK(potential_shaping_distance(r_e + 5.0 * Vector::Ones(4), r_e) ==
          doctest::Approx(0.0).epsilon(1e-12));

    Vector r_hat(2);
    Vector r_base(2);
    r_hat << 1.0, -1.0;
    r_base << 0.0, 0.0;
    CHECK(potential_shaping_distance(r_hat, r_base) == doctest::Approx(std::sqrt(2.0)));

    // invariance to constant shifts of the first argument
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    Vector a(5), b(5);
    for (Index i = 0; i < 5; ++i) {
        a[i] = unif(rng);
        b[i] = unif(rng);
    }
    const double base = potential_shaping_distance(a, b);
    for (double c : {-3.0, 0.7, 12.0}) {
        CHECK(potential_shaping_distance(a + c * Vector::Ones(5), b) ==
              doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("witness pair certifies rank 2n-1") {
    for (Index n = 2; n <= 10; ++n) {
        const auto [p1, p2] = rank_witness_pair(n, 2);
        for (Index row = 0; row < p1.rows(); ++row) {
            REQUIRE(p1.row(row).sum() == 1.0);
            REQUIRE(p2.row(row).sum() == 1.0);
        }
        REQUIRE(generalizability_rank(p1, p2, 0.9) == 2 * n - 1);
    }
    // the appendix construction repeats across extra action blocks
    const auto [q1, q2] = rank_witness_pair(3, 4);
    CHECK(q1.rows() == 12);
    CHECK(generalizability_rank(q1, q2, 0.9) == 5);
    CHECK_THROWS_AS(rank_witness_pair(1, 2), ValidationError);
}

TEST_CASE("cone verdicts agree with ground-truth forward solves") {
    // For class rewards r = Phi w on the single-state instance, the membership
    // verdict at muE must coincide with "solving r reproduces muE".
    const Cmdp cmdp = single_state_cmdp();
    const ConstrainedSolution expert = solve_rl_constrained(cmdp, *cmdp.reward, 1.0, 1e-9);
    const Regularizer entropy = Regularizer::entropy(1.0);
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        Vector w(2);
        w << unif(rng), unif(rng);
        const bool member = reward_in_solution_cone(cmdp, expert.occupancy, w, entropy, 1e-6);
        const ConstrainedSolution sol = solve_rl_constrained(cmdp, w, 1.0, 1e-9);
        const bool reproduces =
            (sol.occupancy.mu - expert.occupancy.mu).cwiseAbs().maxCoeff() <= 1e-5;
        REQUIRE(member == reproduces);
    }
}

TEST_CASE("identical laws collapse the joint rank to n") {
    std::mt19937_64 rng(35);
    const Matrix p = random_stochastic(4, 2, rng);
    CHECK(generalizability_rank(p, p, 0.9) == 4);
}

TEST_CASE("perturbed pairs keep the witness rank") {
    std::mt19937_64 rng(37);
    const auto [w1, w2] = rank_witness_pair(4, 2);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix q1 = random_stochastic(4, 2, rng);
        const Matrix q2 = random_stochastic(4, 2, rng);
        const double tau = 0.3;
        const Matrix p1 = (1.0 - tau) * q1 + tau * w1;
        const Matrix p2 = (1.0 - tau) * q2 + tau * w2;
        REQUIRE(generalizability_rank(p1, p2, 0.9) == 7);
    }
}
