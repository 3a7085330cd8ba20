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

#include "cirl/numerics.hpp"
#include "cirl/occupancy.hpp"

#include <cmath>
#include <random>

using namespace cirl;

namespace {

// Single-state CMDP with two actions and the occupancy constraint
// mu(a2) <= 3/4 used throughout the worked examples.
Cmdp single_state_cmdp(bool constrained = true, double b = 0.75) {
    Cmdp cmdp;
    cmdp.n = 1;
    cmdp.m = 2;
    cmdp.gamma = 0.9;
    cmdp.nu0 = Vector::Ones(1);
    cmdp.transition = Matrix::Ones(2, 1);
    if (constrained) {
        cmdp.psi = Matrix(2, 1);
        cmdp.psi << 0.0, 1.0;
        cmdp.b = Vector::Constant(1, b);
    } else {
        cmdp.psi = Matrix(2, 0);
        cmdp.b = Vector(0);
    }
    cmdp.reward = Vector(2);
    *cmdp.reward << 0.0, 2.0;
    cmdp.validate();
    return cmdp;
}

// Two-state chain: action 0 moves s1 -> s2 and keeps s2 absorbing, action 1
// stays in place.
Cmdp chain_cmdp(double gamma = 0.5) {
    Cmdp cmdp;
    cmdp.n = 2;
    cmdp.m = 2;
    cmdp.gamma = gamma;
    cmdp.nu0 = Vector(2);
    cmdp.nu0 << 1.0, 0.0;
    cmdp.transition = Matrix::Zero(4, 2);
    cmdp.transition(sa_index(2, 0, 0), 1) = 1.0;  // s1 --a1--> s2
    cmdp.transition(sa_index(2, 1, 0), 1) = 1.0;  // s2 --a1--> s2
    cmdp.transition(sa_index(2, 0, 1), 0) = 1.0;  // s1 --a2--> s1
    cmdp.transition(sa_index(2, 1, 1), 1) = 1.0;  // s2 --a2--> s2
    cmdp.psi = Matrix(4, 0);
    cmdp.b = Vector(0);
    cmdp.validate();
    return cmdp;
}

Cmdp random_cmdp(Index n, Index m, std::mt19937_64& rng) {
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
    cmdp.psi = Matrix(n * m, 0);
    cmdp.b = Vector(0);
    cmdp.validate();
    return cmdp;
}

Policy random_policy(Index n, Index m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    Policy policy;
    policy.pi = Matrix(n, m);
    for (Index s = 0; s < n; ++s) {
        for (Index a = 0; a < m; ++a) policy.pi(s, a) = unif(rng);
        policy.pi.row(s) /= policy.pi.row(s).sum();
        policy.pi(s, 0) += 1.0 - policy.pi.row(s).sum();
    }
    return policy;
}

OccupancyMeasure random_interior_occupancy(Index n, Index m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    Vector mu(n * m);
    for (Index i = 0; i < n * m; ++i) mu[i] = unif(rng);
    mu /= mu.sum();
    return OccupancyMeasure(n, m, std::move(mu));
}

}  // namespace

TEST_CASE("Cmdp validation rejects malformed inputs") {
    Cmdp cmdp = single_state_cmdp();
    CHECK_NOTHROW(cmdp.validate());

    Cmdp bad = cmdp;
    bad.transition(0, 0) = 0.5;
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    bad = cmdp;
    bad.gamma = 1.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    bad = cmdp;
    bad.m = 1;
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    bad = cmdp;
    bad.nu0[0] = 0.5;
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    bad = cmdp;
    bad.b = Vector(0);
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("OccupancyMeasure clamps tiny negatives and rejects large ones") {
    Vector v(2);
    v << -5e-13, 1.0;
    const OccupancyMeasure mu(1, 2, v);
    CHECK(mu.mu[0] == 0.0);

    v << -1e-9, 1.0;
    CHECK_THROWS_AS(OccupancyMeasure(1, 2, v), ValidationError);
}

TEST_CASE("occupancy of a single-state policy is the policy row") {
    const Cmdp cmdp = single_state_cmdp();
    Policy policy;
    policy.pi = Matrix(1, 2);
    policy.pi << 0.3, 0.7;
    const OccupancyMeasure mu = occupancy_from_policy(cmdp, policy);
    CHECK(mu.mu[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(mu.mu[1] == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("occupancy of the deterministic chain matches the geometric series") {
    const Cmdp cmdp = chain_cmdp(0.5);
    Policy policy;
    policy.pi = Matrix(2, 2);
    policy.pi << 1.0, 0.0, 1.0, 0.0;  // always the advancing action

    // Oracle: nu(s) = (1-gamma) sum_t gamma^t P(s_t = s), summed explicitly.
    Vector dist(2);
    dist << 1.0, 0.0;
    Vector nu_oracle = Vector::Zero(2);
    double weight = 1.0 - cmdp.gamma;
    for (int t = 0; t < 200; ++t) {
        nu_oracle += weight * dist;
        Vector next = Vector::Zero(2);
        next[1] = dist[0] + dist[1];  // both states advance to s2 under a1
        dist = next;
        weight *= cmdp.gamma;
    }
    CHECK(nu_oracle[0] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(nu_oracle[1] == doctest::Approx(0.5).epsilon(1e-10));

    const OccupancyMeasure mu = occupancy_from_policy(cmdp, policy);
    const Vector nu = mu.state_marginals();
    CHECK(nu[0] == doctest::Approx(nu_oracle[0]).epsilon(1e-10));
    CHECK(nu[1] == doctest::Approx(nu_oracle[1]).epsilon(1e-10));
}

TEST_CASE("flow feasibility holds for every policy") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const Cmdp cmdp = random_cmdp(4, 3, rng);
        const Policy policy = random_policy(4, 3, rng);
        const OccupancyMeasure mu = occupancy_from_policy(cmdp, policy);
        REQUIRE(bellman_flow_residual(cmdp, mu) <= 1e-10);
        REQUIRE(std::abs(mu.total_mass() - 1.0) <= 1e-10);
    }
}

TEST_CASE("single-state flow residual reduces to normalization") {
    const Cmdp cmdp = single_state_cmdp();
    Vector v(2);
    v << 0.25, 0.75;
    const OccupancyMeasure mu(1, 2, v);
    CHECK(bellman_flow_residual(cmdp, mu) <= 1e-15);
}

TEST_CASE("uniform occupancy on the chain is not stationary") {
    const Cmdp cmdp = chain_cmdp(0.5);
    const OccupancyMeasure mu(2, 2, Vector::Constant(4, 0.25));
    CHECK(bellman_flow_residual(cmdp, mu) > 0.01);
}

TEST_CASE("policy_from_occupancy is the normalized conditional") {
    Vector v(2);
    v << 0.25, 0.75;
    const Policy policy = policy_from_occupancy(v, 1, 2);
    CHECK(policy.pi(0, 0) == doctest::Approx(0.25));
    CHECK(policy.pi(0, 1) == doctest::Approx(0.75));
}

TEST_CASE("unvisited states get the uniform row") {
    Vector v(4);
    v << 0.5, 0.0, 0.5, 0.0;  // state 2 unvisited (action-major, n=2, m=2)
    const Policy policy = policy_from_occupancy(v, 2, 2);
    CHECK(policy.pi(1, 0) == doctest::Approx(0.5));
    CHECK(policy.pi(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("round trip policy -> occupancy -> policy on visited states") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const Cmdp cmdp = random_cmdp(5, 3, rng);
        const Policy policy = random_policy(5, 3, rng);
        const OccupancyMeasure mu = occupancy_from_policy(cmdp, policy);
        const Policy back = policy_from_occupancy(mu);
        const Vector nu = mu.state_marginals();
        for (Index s = 0; s < cmdp.n; ++s) {
            if (nu[s] < 1e-9) continue;
            REQUIRE((back.pi.row(s) - policy.pi.row(s)).cwiseAbs().maxCoeff() <= 1e-9);
        }
    }
}

TEST_CASE("entropy regularizer fixed values") {
    const Regularizer entropy = Regularizer::entropy(1.0);

    Vector v(2);
    v << 0.5, 0.5;
    CHECK(regularizer_value(OccupancyMeasure(1, 2, v), entropy) ==
          doctest::Approx(-std::log(2.0)).epsilon(1e-12));

    // Occupancy of a deterministic policy: all per-state action choices are
    // point masses, so the conditional entropy vanishes.
    const Cmdp chain = chain_cmdp(0.5);
    Policy det;
    det.pi = Matrix(2, 2);
    det.pi << 1.0, 0.0, 1.0, 0.0;
    const OccupancyMeasure mu = occupancy_from_policy(chain, det);
    CHECK(regularizer_value(mu, entropy) == doctest::Approx(0.0).epsilon(1e-12));

    Vector q(2);
    q << 0.0, 1.0;
    CHECK(regularizer_value(OccupancyMeasure(1, 2, q), Regularizer::quadratic(1.0)) ==
          doctest::Approx(0.5));
    CHECK(regularizer_value(OccupancyMeasure(1, 2, q), Regularizer::none()) == 0.0);
}

TEST_CASE("entropy value bounds -beta log m <= f <= 0") {
    std::mt19937_64 rng(9);
    const Regularizer entropy = Regularizer::entropy(1.7);
    for (int trial = 0; trial < 100; ++trial) {
        const OccupancyMeasure mu = random_interior_occupancy(3, 4, rng);
        const double f = regularizer_value(mu, entropy);
        REQUIRE(f <= 1e-12);
        REQUIRE(f >= -1.7 * std::log(4.0) - 1e-12);
    }
}

TEST_CASE("strict convexity of the entropy regularizer") {
    std::mt19937_64 rng(13);
    const Regularizer entropy = Regularizer::entropy(1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const OccupancyMeasure mu1 = random_interior_occupancy(3, 3, rng);
        const OccupancyMeasure mu2 = random_interior_occupancy(3, 3, rng);
        if ((mu1.mu - mu2.mu).cwiseAbs().maxCoeff() < 1e-6) continue;
        for (double alpha : {0.25, 0.5, 0.75}) {
            const OccupancyMeasure mix(3, 3, alpha * mu1.mu + (1.0 - alpha) * mu2.mu);
            const double lhs = regularizer_value(mix, entropy);
            const double rhs = alpha * regularizer_value(mu1, entropy) +
                               (1.0 - alpha) * regularizer_value(mu2, entropy);
            REQUIRE(lhs < rhs - 1e-12);
        }
    }
}

TEST_CASE("entropy gradient fixed values (single state)") {
    const Regularizer entropy = Regularizer::entropy(1.0);
    Vector v(2);
    v << 0.25, 0.75;
    const Vector g = regularizer_gradient(OccupancyMeasure(1, 2, v), entropy);
    CHECK(g[0] == doctest::Approx(std::log(0.25) + 1.0).epsilon(1e-12));
    CHECK(g[1] == doctest::Approx(std::log(0.75) + 1.0).epsilon(1e-12));
    CHECK(g[0] == doctest::Approx(-0.386).epsilon(2e-3));
    CHECK(g[1] == doctest::Approx(0.712).epsilon(2e-3));

    v << 0.12, 0.88;
    const Vector g2 = regularizer_gradient(OccupancyMeasure(1, 2, v), entropy);
    CHECK(g2[0] == doctest::Approx(-1.12).epsilon(1e-2));
    CHECK(g2[1] == doctest::Approx(0.87).epsilon(1e-2));
}

TEST_CASE("entropy gradient throws on the relative boundary") {
    const Regularizer entropy = Regularizer::entropy(1.0);
    Vector v(2);
    v << 0.0, 1.0;
    CHECK_THROWS_AS(regularizer_gradient(OccupancyMeasure(1, 2, v), entropy),
                    BoundaryGradientError);

    // unvisited state (n = 2): all of state 2's mass is zero
    Vector w(4);
    w << 0.5, 0.0, 0.5, 0.0;
    CHECK_THROWS_AS(regularizer_gradient(OccupancyMeasure(2, 2, w), entropy),
                    BoundaryGradientError);
}

TEST_CASE("analytic gradients match central finite differences") {
    std::mt19937_64 rng(17);
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const bool single = trial % 2 == 0;
        const Index n = single ? 1 : 3;
        const Index m = single ? 4 : 2;
        const Regularizer reg =
            trial % 4 < 2 ? Regularizer::entropy(0.8) : Regularizer::quadratic(1.3);
        OccupancyMeasure mu = random_interior_occupancy(n, m, rng);
        const auto value = [&](const Vector& x) {
            return regularizer_value(OccupancyMeasure(n, m, x), reg);
        };
        const Vector analytic = regularizer_gradient(mu, reg);
        const Vector fd = finite_difference_gradient(value, mu.mu, 1e-6);
        const double rel = (analytic - fd).cwiseAbs().maxCoeff() /
                           std::max(1.0, analytic.cwiseAbs().maxCoeff());
        REQUIRE(rel <= 1e-4);
        ++checked;
    }
    CHECK(checked == 100);
}

TEST_CASE("objective fixed values") {
    Vector v(2);
    v << 0.25, 0.75;
    const OccupancyMeasure mu(1, 2, v);
    Vector r(2);
    r << 0.0, 2.0;

    CHECK(objective(mu, Vector::Zero(2), Regularizer::none()) == 0.0);

    const double expected =
        1.5 - (0.25 * std::log(0.25) + 0.75 * std::log(0.75));
    CHECK(objective(mu, r, Regularizer::entropy(1.0)) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(objective(mu, r, Regularizer::entropy(1.0)) == doctest::Approx(2.0624).epsilon(1e-3));
}

TEST_CASE("constraint_violation fixed values") {
    const Cmdp cmdp = single_state_cmdp();
    Vector v(2);
    v << 0.25, 0.75;
    const Vector active = constraint_violation(cmdp, OccupancyMeasure(1, 2, v));
    CHECK(active.size() == 1);
    CHECK(active[0] == doctest::Approx(0.0).epsilon(1e-14));

    v << 0.0, 1.0;
    const Vector violated = constraint_violation(cmdp, OccupancyMeasure(1, 2, v));
    CHECK(violated[0] == doctest::Approx(0.25).epsilon(1e-14));

    const Cmdp free = single_state_cmdp(false);
    CHECK(constraint_violation(free, OccupancyMeasure(1, 2, v)).size() == 0);
}
