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

#include "cirl/identifiability.hpp"

#include "cirl/numerics.hpp"
#include "cirl/occupancy.hpp"

#include <cmath>

namespace cirl {

ActiveSets active_sets(const Cmdp& cmdp, const OccupancyMeasure& mu, double tol) {
    if (mu.n != cmdp.n || mu.m != cmdp.m) {
        throw ValidationError("active_sets: occupancy dimensions disagree with the CMDP");
    }
    const Vector violation = constraint_violation(cmdp, mu);
    for (Index i = 0; i < violation.size(); ++i) {
        if (violation[i] > tol) {
            throw ValidationError("active_sets: occupancy measure is infeasible");
        }
    }
    ActiveSets sets;
    for (Index i = 0; i < violation.size(); ++i) {
        if (std::abs(violation[i]) <= tol) sets.safety_active.push_back(i);
    }
    for (Index idx = 0; idx < mu.mu.size(); ++idx) {
        if (mu.mu[idx] <= tol) sets.nonneg_active.push_back(idx);
    }
    return sets;
}

Matrix shaping_subspace_basis(const Matrix& transition, double gamma) {
    const Index nm = transition.rows();
    const Index n = transition.cols();
    if (nm % n != 0) throw ValidationError("shaping_subspace_basis: transition must be nm x n");
    return stacked_identity(n, nm / n) - gamma * transition;
}

bool reward_in_solution_cone(const Cmdp& cmdp, const OccupancyMeasure& mu, const Vector& r,
                             const Regularizer& reg, double tol) {
    if (r.size() != cmdp.num_state_actions()) {
        throw ValidationError("reward_in_solution_cone: reward length must be n*m");
    }
    const ActiveSets sets = active_sets(cmdp, mu, tol);

    Vector grad;
    if (reg.kind == RegularizerKind::entropy) {
        // The entropy subdifferential is empty on the relative boundary, so no
        // reward can make such a mu optimal.
        try {
            grad = regularizer_gradient(mu, reg);
        } catch (const BoundaryGradientError&) {
            return false;
        }
    } else {
        grad = regularizer_gradient(mu, reg);
    }

    // Decide whether r - grad f(mu) lies in U + cone(active Psi_i)
    // + cone(-e_sa): free eta for the shaping part, nonnegative cone
    // coefficients for the rest. Solver-produced inputs carry numerical noise,
    // so instead of asking for exact equality the LP minimizes the sup-norm
    // residual t of (cone expression) - (r - grad f) and the verdict is
    // t <= tol. The two row blocks encode residual <= t and residual >= -t
    // with nonnegative slacks.
    const Index nm = cmdp.num_state_actions();
    const Index num_c = static_cast<Index>(sets.safety_active.size());
    const Index num_e = static_cast<Index>(sets.nonneg_active.size());
    const Index cone_cols = cmdp.n + num_c + num_e;

    Matrix cone = Matrix::Zero(nm, cone_cols);
    cone.leftCols(cmdp.n) = shaping_subspace_basis(cmdp.transition, cmdp.gamma);
    for (Index j = 0; j < num_c; ++j) {
        cone.col(cmdp.n + j) = cmdp.psi.col(sets.safety_active[static_cast<std::size_t>(j)]);
    }
    for (Index j = 0; j < num_e; ++j) {
        cone(sets.nonneg_active[static_cast<std::size_t>(j)], cmdp.n + num_c + j) = -1.0;
    }
    const Vector target = r - grad;

    const Index t_col = cone_cols;            // sup-norm bound variable
    const Index slack_start = cone_cols + 1;  // 2 nm slack columns
    const Index cols = slack_start + 2 * nm;
    Matrix a_eq = Matrix::Zero(2 * nm, cols);
    Vector b_eq(2 * nm);
    a_eq.topLeftCorner(nm, cone_cols) = cone;
    a_eq.bottomLeftCorner(nm, cone_cols) = cone;
    for (Index i = 0; i < nm; ++i) {
        a_eq(i, t_col) = -1.0;            // cone_i - t + s_i = target_i
        a_eq(i, slack_start + i) = 1.0;
        a_eq(nm + i, t_col) = 1.0;        // cone_i + t - s'_i = target_i
        a_eq(nm + i, slack_start + nm + i) = -1.0;
        b_eq[i] = target[i];
        b_eq[nm + i] = target[i];
    }
    std::vector<bool> nonneg(static_cast<std::size_t>(cols), true);
    for (Index j = 0; j < cmdp.n; ++j) nonneg[static_cast<std::size_t>(j)] = false;

    Vector objective = Vector::Zero(cols);
    objective[t_col] = -1.0;  // maximize -t = minimize the sup-norm residual
    const auto solution = detail::lp_maximize({a_eq, b_eq, nonneg}, objective);
    if (!solution) return false;  // cannot happen: t large enough is feasible
    return (*solution)[t_col] <= tol;
}

IdentifiabilityReport rank_condition(const RewardClass& reward_class, const Cmdp& cmdp) {
    const Index nm = cmdp.num_state_actions();
    if (reward_class.phi.rows() != nm) {
        throw ValidationError("rank_condition: feature matrix must have nm rows");
    }
    const Matrix shaping = shaping_subspace_basis(cmdp.transition, cmdp.gamma);
    Matrix xi(nm, cmdp.n + cmdp.num_constraints());
    xi.leftCols(cmdp.n) = shaping;
    if (cmdp.num_constraints() > 0) xi.rightCols(cmdp.num_constraints()) = cmdp.psi;

    Matrix joint(nm, reward_class.phi.cols() + xi.cols());
    joint.leftCols(reward_class.phi.cols()) = reward_class.phi;
    joint.rightCols(xi.cols()) = xi;

    IdentifiabilityReport report;
    report.rank_phi = matrix_rank(reward_class.phi);
    report.rank_xi = matrix_rank(xi);
    report.rank_joint = matrix_rank(joint);
    report.condition_met = report.rank_joint == report.rank_phi + report.rank_xi;
    report.shaping_dimension = matrix_rank(shaping);
    return report;
}

double potential_shaping_distance(const Vector& r_hat, const Vector& r_expert) {
    if (r_hat.size() != r_expert.size()) {
        throw ValidationError("potential_shaping_distance: length mismatch");
    }
    Vector diff = r_hat - r_expert;
    diff.array() -= diff.mean();
    return diff.norm();
}

std::pair<Matrix, Matrix> rank_witness_pair(Index n, Index m) {
    if (n < 2 || m < 2) throw ValidationError("rank_witness_pair: need n >= 2 and m >= 2");
    // D shifts each state to its successor; the last state is absorbing.
    Matrix d = Matrix::Zero(n, n);
    for (Index i = 0; i + 1 < n; ++i) d(i, i + 1) = 1.0;
    d(n - 1, n - 1) = 1.0;
    const Matrix id = Matrix::Identity(n, n);

    Matrix p1(n * m, n);
    Matrix p2(n * m, n);
    for (Index a = 0; a < m; ++a) {
        p1.block(a * n, 0, n, n) = (a % 2 == 0) ? id : d;
        p2.block(a * n, 0, n, n) = (a % 2 == 0) ? d : id;
    }
    return {p1, p2};
}

Index generalizability_rank(const Matrix& p1, const Matrix& p2, double gamma) {
    if (p1.rows() != p2.rows() || p1.cols() != p2.cols()) {
        throw ValidationError("generalizability_rank: transition shapes disagree");
    }
    const Index n = p1.cols();
    Matrix joint(p1.rows(), 2 * n);
    joint.leftCols(n) = shaping_subspace_basis(p1, gamma);
    joint.rightCols(n) = shaping_subspace_basis(p2, gamma);
    return matrix_rank(joint);
}

}  // namespace cirl
