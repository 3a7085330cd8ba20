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

#include "cirl/forward.hpp"

#include "cirl/logging.hpp"
#include "cirl/numerics.hpp"

#include <cmath>
#include <sstream>

namespace cirl {

namespace {

// beta * logsumexp(x / beta) with max subtraction.
double soft_max(const Vector& x, double beta) {
    const double m = x.maxCoeff();
    double acc = 0.0;
    for (Index i = 0; i < x.size(); ++i) acc += std::exp((x[i] - m) / beta);
    return m + beta * std::log(acc);
}

Policy softmax_policy(const Vector& q, Index n, Index m, double beta) {
    Policy policy;
    policy.pi = Matrix(n, m);
    Vector row(m);
    for (Index s = 0; s < n; ++s) {
        for (Index a = 0; a < m; ++a) row[a] = q[sa_index(n, s, a)] / beta;
        const double mx = row.maxCoeff();
        double z = 0.0;
        for (Index a = 0; a < m; ++a) {
            row[a] = std::exp(row[a] - mx);
            z += row[a];
        }
        policy.pi.row(s) = row.transpose() / z;
    }
    return policy;
}

SoftSolution soft_value_iteration_impl(const Cmdp& cmdp, const Vector& r, double beta,
                                       double tol, int max_iter, const Vector* warm_start) {
    const Index n = cmdp.n;
    const Index m = cmdp.m;
    Vector v = warm_start != nullptr ? *warm_start : Vector::Zero(n);
    Vector q(n * m);
    Vector v_next(n);
    Vector per_state(m);

    const double stop = tol * (1.0 - cmdp.gamma) / (2.0 * cmdp.gamma);
    double change = std::numeric_limits<double>::infinity();
    int iter = 0;
    while (iter < max_iter) {
        q = r + cmdp.gamma * (cmdp.transition * v);
        for (Index s = 0; s < n; ++s) {
            for (Index a = 0; a < m; ++a) per_state[a] = q[sa_index(n, s, a)];
            v_next[s] = soft_max(per_state, beta);
        }
        change = (v_next - v).cwiseAbs().maxCoeff();
        v.swap(v_next);
        ++iter;
        if (change <= stop) break;
    }

    SoftSolution sol;
    sol.iterations = iter;
    sol.converged = change <= stop;
    sol.residual = cmdp.gamma / (1.0 - cmdp.gamma) * change;
    sol.value = v;
    sol.qvalue = r + cmdp.gamma * (cmdp.transition * v);
    sol.policy = softmax_policy(sol.qvalue, n, m, beta);
    sol.occupancy = occupancy_from_policy(cmdp, sol.policy);
    return sol;
}

// Assembles the equality system of the feasible polytope with slack columns
// for the safety constraints: [(E - gamma P)^T, 0; Psi^T, I] [mu; s] = rhs.
void feasible_set_system(const Cmdp& cmdp, Matrix& a_eq, Vector& b_eq,
                         std::vector<bool>& nonneg) {
    const Index nm = cmdp.num_state_actions();
    const Index k = cmdp.num_constraints();
    const Matrix flow =
        (stacked_identity(cmdp.n, cmdp.m) - cmdp.gamma * cmdp.transition).transpose();
    a_eq = Matrix::Zero(cmdp.n + k, nm + k);
    a_eq.topLeftCorner(cmdp.n, nm) = flow;
    if (k > 0) {
        a_eq.bottomLeftCorner(k, nm) = cmdp.psi.transpose();
        a_eq.bottomRightCorner(k, k) = Matrix::Identity(k, k);
    }
    b_eq = Vector(cmdp.n + k);
    b_eq.head(cmdp.n) = (1.0 - cmdp.gamma) * cmdp.nu0;
    if (k > 0) b_eq.tail(k) = cmdp.b;
    nonneg.assign(static_cast<std::size_t>(nm + k), true);
}

}  // namespace

namespace detail {

Vector soft_policy_q_values(const Cmdp& cmdp, const Policy& policy, const Vector& r,
                            double beta) {
    const Index n = cmdp.n;
    const Index m = cmdp.m;
    if (r.size() != n * m) throw ValidationError("soft_policy_q_values: reward length");
    const Matrix p_pi = policy_transition_matrix(cmdp, policy);
    Vector rhs = Vector::Zero(n);
    for (Index s = 0; s < n; ++s) {
        double acc = 0.0;
        for (Index a = 0; a < m; ++a) {
            const double p = policy.pi(s, a);
            acc += p * r[sa_index(n, s, a)];
            if (p > 0.0) acc -= beta * p * std::log(p);
        }
        rhs[s] = acc;
    }
    const Vector v =
        solve_linear(Matrix::Identity(n, n) - cmdp.gamma * p_pi, rhs);
    return r + cmdp.gamma * (cmdp.transition * v);
}

}  // namespace detail

SoftSolution soft_value_iteration(const Cmdp& cmdp, const Vector& r, double beta,
                                  double tol, int max_iter) {
    if (!(beta > 0.0)) throw ValidationError("soft_value_iteration: beta must be positive");
    if (!(tol > 0.0)) throw ValidationError("soft_value_iteration: tol must be positive");
    if (r.size() != cmdp.num_state_actions()) {
        throw ValidationError("soft_value_iteration: reward length must be n*m");
    }
    return soft_value_iteration_impl(cmdp, r, beta, tol, max_iter, nullptr);
}

ConstrainedSolution solve_rl_constrained(const Cmdp& cmdp, const Vector& r, double beta,
                                         double tol, int dual_max_iter) {
    if (!(beta > 0.0)) throw ValidationError("solve_rl_constrained: beta must be positive");
    if (!(tol > 0.0)) throw ValidationError("solve_rl_constrained: tol must be positive");
    if (r.size() != cmdp.num_state_actions()) {
        throw ValidationError("solve_rl_constrained: reward length must be n*m");
    }
    if (!slater_check(cmdp)) {
        throw ValidationError("solve_rl_constrained: Slater's condition fails");
    }

    const Index k = cmdp.num_constraints();
    const double inner_tol = std::min(tol * 0.1, 1e-9);

    if (k == 0) {
        SoftSolution inner = soft_value_iteration(cmdp, r, beta, inner_tol);
        ConstrainedSolution sol;
        sol.occupancy = inner.occupancy;
        sol.policy = inner.policy;
        sol.dual = Vector(0);
        sol.duality_gap = 0.0;
        sol.iterations = inner.iterations;
        sol.converged = inner.converged;
        return sol;
    }

    // Base scheme: diminishing steps eta_t = c / sqrt(t). Near the optimum
    // the dual is smooth, so a projected Barzilai-Borwein secant step (guarded
    // by the concavity test below) replaces the diminishing step whenever the
    // curvature estimate is usable; plain 1/sqrt(t) ascent alone needs
    // millions of iterations to push complementary slackness to 1e-8.
    const double psi_scale = cmdp.psi.cwiseAbs().rowwise().sum().maxCoeff();
    const double step_scale = 1.0 / (1.0 + psi_scale);

    Vector xi = Vector::Zero(k);
    Vector v_warm = Vector::Zero(cmdp.n);
    Vector xi_prev;
    Vector grad_prev;
    bool have_prev = false;
    SoftSolution inner;
    for (int t = 1; t <= dual_max_iter; ++t) {
        inner = soft_value_iteration_impl(cmdp, r - cmdp.psi * xi, beta, inner_tol,
                                          1 << 22, &v_warm);
        v_warm = inner.value;
        const Vector slack = cmdp.psi.transpose() * inner.occupancy.mu - cmdp.b;
        const double residual = project_nonneg(slack).maxCoeff();
        double comp = 0.0;
        for (Index i = 0; i < k; ++i) comp = std::max(comp, xi[i] * (-slack[i]));
        // The reported gap xi^T (b - Psi^T mu) must come out nonnegative up to
        // 1e-8, which bounds how much residual violation the final xi may pair
        // with.
        if (residual <= tol && comp <= tol && -xi.dot(slack) >= -1e-8) {
            ConstrainedSolution sol;
            sol.occupancy = inner.occupancy;
            sol.policy = inner.policy;
            sol.dual = xi;
            sol.duality_gap = -xi.dot(slack);
            sol.iterations = t;
            sol.converged = true;
            return sol;
        }
        double eta = step_scale / std::sqrt(static_cast<double>(t));
        if (have_prev) {
            const Vector d_xi = xi - xi_prev;
            const Vector d_grad = slack - grad_prev;
            const double curvature = -d_xi.dot(d_grad);
            if (curvature > 1e-16 && d_xi.squaredNorm() > 0.0) {
                eta = std::min(d_xi.squaredNorm() / curvature, 1e8);
            }
        }
        xi_prev = xi;
        grad_prev = slack;
        have_prev = true;
        xi = project_nonneg(xi + eta * slack);
    }
    std::ostringstream msg;
    msg << "solve_rl_constrained: dual ascent did not reach tol " << tol << " within "
        << dual_max_iter << " iterations";
    throw ConvergenceError(msg.str());
}

bool slater_check(const Cmdp& cmdp) {
    const Index nm = cmdp.num_state_actions();
    const Index k = cmdp.num_constraints();
    const double eps = tol::slater_margin;

    // Substitute mu = x + eps with x >= 0 and add slack s >= 0 for
    // Psi^T mu <= b - eps.
    Matrix a_eq;
    Vector b_eq;
    std::vector<bool> nonneg;
    feasible_set_system(cmdp, a_eq, b_eq, nonneg);
    const Vector ones_shift = Vector::Constant(nm, eps);
    b_eq.head(cmdp.n) -= a_eq.topLeftCorner(cmdp.n, nm) * ones_shift;
    if (k > 0) {
        b_eq.tail(k) -= cmdp.psi.transpose() * ones_shift + Vector::Constant(k, eps);
    }
    const LpResult res = lp_feasible({a_eq, b_eq, nonneg});
    return res.status == LpStatus::feasible;
}

OccupancyMeasure slater_witness(const Cmdp& cmdp) {
    const Index nm = cmdp.num_state_actions();
    const Index k = cmdp.num_constraints();
    const double eps = tol::slater_margin;

    Matrix a_eq;
    Vector b_eq;
    std::vector<bool> nonneg;
    feasible_set_system(cmdp, a_eq, b_eq, nonneg);
    const Vector ones_shift = Vector::Constant(nm, eps);
    b_eq.head(cmdp.n) -= a_eq.topLeftCorner(cmdp.n, nm) * ones_shift;
    if (k > 0) {
        b_eq.tail(k) -= cmdp.psi.transpose() * ones_shift + Vector::Constant(k, eps);
    }
    const LpResult res = lp_feasible({a_eq, b_eq, nonneg});
    if (res.status != LpStatus::feasible) {
        throw ValidationError("slater_witness: no strictly feasible occupancy measure");
    }
    Vector mu = res.witness.head(nm) + ones_shift;
    return OccupancyMeasure(cmdp.n, cmdp.m, std::move(mu));
}

FrankWolfeSolution frank_wolfe_solve(const Cmdp& cmdp, const Vector& r,
                                     const Regularizer& reg, int iters) {
    if (r.size() != cmdp.num_state_actions()) {
        throw ValidationError("frank_wolfe_solve: reward length must be n*m");
    }
    const Index nm = cmdp.num_state_actions();
    const Index k = cmdp.num_constraints();

    Matrix a_eq;
    Vector b_eq;
    std::vector<bool> nonneg;
    feasible_set_system(cmdp, a_eq, b_eq, nonneg);

    // Entropy gradients are undefined on the boundary, so every run starts at
    // the strictly feasible Slater witness.
    OccupancyMeasure mu = slater_witness(cmdp);

    Vector subproblem_obj = Vector::Zero(nm + k);
    FrankWolfeSolution sol;
    for (int t = 1; t <= iters; ++t) {
        const Vector grad = r - regularizer_gradient(mu, reg);
        subproblem_obj.head(nm) = grad;
        const auto vertex = detail::lp_maximize({a_eq, b_eq, nonneg}, subproblem_obj);
        if (!vertex) throw ValidationError("frank_wolfe_solve: feasible set is empty");
        const Vector direction = vertex->head(nm) - mu.mu;
        sol.gap = grad.dot(direction);
        sol.iterations = t;
        if (sol.gap <= 1e-14) break;

        double alpha;
        switch (reg.kind) {
            case RegularizerKind::quadratic: {
                const double denom = reg.beta * direction.squaredNorm();
                alpha = denom > 0.0 ? std::min(1.0, std::max(0.0, sol.gap / denom)) : 1.0;
                break;
            }
            case RegularizerKind::none:
                alpha = 1.0;  // the LP vertex is optimal
                break;
            case RegularizerKind::entropy:
            default:
                alpha = 2.0 / (static_cast<double>(t) + 2.0);
                break;
        }
        mu = OccupancyMeasure(cmdp.n, cmdp.m, mu.mu + alpha * direction);
        if (reg.kind == RegularizerKind::none && alpha == 1.0) {
            sol.gap = 0.0;  // the iterate is the subproblem optimum itself
            break;
        }
    }
    sol.occupancy = std::move(mu);
    return sol;
}

}  // namespace cirl
