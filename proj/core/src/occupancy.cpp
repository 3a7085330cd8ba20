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

#include "cirl/occupancy.hpp"

#include "cirl/numerics.hpp"

#include <cmath>

namespace cirl {

namespace {

void check_dims(const Cmdp& cmdp, const OccupancyMeasure& mu) {
    if (mu.n != cmdp.n || mu.m != cmdp.m) {
        throw ValidationError("occupancy measure dimensions disagree with the CMDP");
    }
}

}  // namespace

Matrix policy_transition_matrix(const Cmdp& cmdp, const Policy& policy) {
    if (policy.num_states() != cmdp.n || policy.num_actions() != cmdp.m) {
        throw ValidationError("policy dimensions disagree with the CMDP");
    }
    Matrix p_pi = Matrix::Zero(cmdp.n, cmdp.n);
    for (Index a = 0; a < cmdp.m; ++a) {
        p_pi += policy.pi.col(a).asDiagonal() * cmdp.transition.block(a * cmdp.n, 0, cmdp.n, cmdp.n);
    }
    return p_pi;
}

OccupancyMeasure occupancy_from_policy(const Cmdp& cmdp, const Policy& policy) {
    const Matrix p_pi = policy_transition_matrix(cmdp, policy);
    const Matrix system =
        Matrix::Identity(cmdp.n, cmdp.n) - cmdp.gamma * p_pi.transpose();
    Vector nu;
    try {
        nu = solve_linear(system, (1.0 - cmdp.gamma) * cmdp.nu0);
    } catch (const SingularMatrixError&) {
        // I - gamma P_pi^T is strictly diagonally dominant-free of singularity
        // for gamma < 1, so reaching this means the inputs were corrupted.
        throw SingularMatrixError("occupancy_from_policy: flow system singular despite gamma < 1");
    }
    Vector mu(cmdp.n * cmdp.m);
    for (Index a = 0; a < cmdp.m; ++a) {
        for (Index s = 0; s < cmdp.n; ++s) {
            mu[sa_index(cmdp.n, s, a)] = policy.pi(s, a) * nu[s];
        }
    }
    return OccupancyMeasure(cmdp.n, cmdp.m, std::move(mu));
}

Policy policy_from_occupancy(const Vector& mu, Index n, Index m) {
    if (mu.size() != n * m) {
        throw ValidationError("policy_from_occupancy: vector length must be n*m");
    }
    Policy policy;
    policy.pi = Matrix::Zero(n, m);
    for (Index s = 0; s < n; ++s) {
        double mass = 0.0;
        for (Index a = 0; a < m; ++a) mass += std::max(mu[sa_index(n, s, a)], 0.0);
        if (mass > tol::state_mass) {
            for (Index a = 0; a < m; ++a) {
                policy.pi(s, a) = std::max(mu[sa_index(n, s, a)], 0.0) / mass;
            }
        } else {
            policy.pi.row(s).setConstant(1.0 / static_cast<double>(m));
        }
    }
    return policy;
}

Policy policy_from_occupancy(const OccupancyMeasure& mu) {
    return policy_from_occupancy(mu.mu, mu.n, mu.m);
}

double bellman_flow_residual(const Cmdp& cmdp, const OccupancyMeasure& mu) {
    check_dims(cmdp, mu);
    Vector lhs = mu.state_marginals() - cmdp.gamma * cmdp.transition.transpose() * mu.mu;
    lhs -= (1.0 - cmdp.gamma) * cmdp.nu0;
    return lhs.cwiseAbs().maxCoeff();
}

double regularizer_value(const OccupancyMeasure& mu, const Regularizer& reg) {
    switch (reg.kind) {
        case RegularizerKind::none:
            return 0.0;
        case RegularizerKind::quadratic:
            return 0.5 * reg.beta * mu.mu.squaredNorm();
        case RegularizerKind::entropy:
            break;
    }
    double sum = 0.0;
    if (mu.n == 1) {
        // Single state: f = beta sum_a mu(a) log mu(a), the convention whose
        // gradient is beta (log mu + 1).
        for (Index i = 0; i < mu.mu.size(); ++i) {
            const double x = mu.mu[i];
            if (x > 0.0) sum += x * std::log(x);
        }
    } else {
        const Vector nu = mu.state_marginals();
        for (Index s = 0; s < mu.n; ++s) {
            if (nu[s] <= 0.0) continue;  // all entries of this state are zero
            for (Index a = 0; a < mu.m; ++a) {
                const double x = mu(s, a);
                if (x > 0.0) sum += x * std::log(x / nu[s]);
            }
        }
    }
    return reg.beta * sum;
}

Vector regularizer_gradient(const OccupancyMeasure& mu, const Regularizer& reg) {
    switch (reg.kind) {
        case RegularizerKind::none:
            return Vector::Zero(mu.mu.size());
        case RegularizerKind::quadratic:
            return reg.beta * mu.mu;
        case RegularizerKind::entropy:
            break;
    }
    Vector grad(mu.mu.size());
    if (mu.n == 1) {
        for (Index i = 0; i < mu.mu.size(); ++i) {
            if (mu.mu[i] <= tol::grad_boundary) {
                throw BoundaryGradientError(
                    "entropy gradient undefined on the relative boundary");
            }
            grad[i] = reg.beta * (std::log(mu.mu[i]) + 1.0);
        }
        return grad;
    }
    const Vector nu = mu.state_marginals();
    for (Index s = 0; s < mu.n; ++s) {
        if (nu[s] <= tol::grad_boundary) {
            throw BoundaryGradientError("entropy gradient undefined: unvisited state");
        }
        for (Index a = 0; a < mu.m; ++a) {
            const double pi_sa = mu(s, a) / nu[s];
            if (pi_sa <= tol::grad_boundary) {
                throw BoundaryGradientError(
                    "entropy gradient undefined on the relative boundary");
            }
            grad[sa_index(mu.n, s, a)] = reg.beta * std::log(pi_sa);
        }
    }
    return grad;
}

double objective(const OccupancyMeasure& mu, const Vector& r, const Regularizer& reg) {
    if (r.size() != mu.mu.size()) {
        throw ValidationError("objective: reward length must be n*m");
    }
    return r.dot(mu.mu) - regularizer_value(mu, reg);
}

Vector constraint_violation(const Cmdp& cmdp, const OccupancyMeasure& mu) {
    check_dims(cmdp, mu);
    if (cmdp.num_constraints() == 0) return Vector(0);
    return cmdp.psi.transpose() * mu.mu - cmdp.b;
}

}  // namespace cirl
