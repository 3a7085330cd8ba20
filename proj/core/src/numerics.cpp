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

#include "cirl/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace cirl {

Vector solve_linear(const Matrix& a, const Vector& rhs) {
    if (a.rows() != a.cols()) throw ValidationError("solve_linear: matrix must be square");
    if (a.rows() != rhs.size()) throw ValidationError("solve_linear: dimension mismatch");
    const Index n = a.rows();

    Matrix work = a;
    Vector x = rhs;
    Vector scale(n);
    for (Index i = 0; i < n; ++i) {
        scale[i] = work.row(i).cwiseAbs().maxCoeff();
        if (scale[i] == 0.0) throw SingularMatrixError("solve_linear: zero row");
    }
    std::vector<Index> perm(n);
    std::iota(perm.begin(), perm.end(), Index{0});

    for (Index k = 0; k < n; ++k) {
        // Scaled partial pivoting: pick the row with the largest entry
        // relative to its own scale.
        Index best = k;
        double best_ratio = std::abs(work(perm[k], k)) / scale[perm[k]];
        for (Index i = k + 1; i < n; ++i) {
            const double ratio = std::abs(work(perm[i], k)) / scale[perm[i]];
            if (ratio > best_ratio) {
                best_ratio = ratio;
                best = i;
            }
        }
        std::swap(perm[k], perm[best]);
        const Index pr = perm[k];
        if (std::abs(work(pr, k)) < 1e-12 * scale[pr]) {
            throw SingularMatrixError("solve_linear: pivot below 1e-12 of row scale");
        }
        for (Index i = k + 1; i < n; ++i) {
            const Index ri = perm[i];
            const double factor = work(ri, k) / work(pr, k);
            if (factor == 0.0) continue;
            work.row(ri).segment(k, n - k) -= factor * work.row(pr).segment(k, n - k);
            x[ri] -= factor * x[pr];
        }
    }
    Vector out(n);
    for (Index k = n - 1; k >= 0; --k) {
        const Index pr = perm[k];
        double acc = x[pr];
        for (Index j = k + 1; j < n; ++j) acc -= work(pr, j) * out[j];
        out[k] = acc / work(pr, k);
    }
    return out;
}

Index matrix_rank(const Matrix& a, double tol) {
    if (!(tol > 0.0)) throw ValidationError("matrix_rank: tolerance must be positive");
    Matrix work = a;
    const Index rows = work.rows();
    const Index cols = work.cols();
    Index rank = 0;
    for (Index col = 0; col < cols && rank < rows; ++col) {
        Index pivot_row = rank;
        double pivot_val = std::abs(work(rank, col));
        for (Index i = rank + 1; i < rows; ++i) {
            if (std::abs(work(i, col)) > pivot_val) {
                pivot_val = std::abs(work(i, col));
                pivot_row = i;
            }
        }
        if (pivot_val <= tol) continue;
        work.row(pivot_row).swap(work.row(rank));
        for (Index i = rank + 1; i < rows; ++i) {
            const double factor = work(i, col) / work(rank, col);
            if (factor != 0.0) work.row(i) -= factor * work.row(rank);
        }
        ++rank;
    }
    return rank;
}

Index matrix_rank(const Matrix& a) {
    if (a.size() == 0) return 0;
    const double max_abs = a.cwiseAbs().maxCoeff();
    if (max_abs == 0.0) return 0;
    const double tol = 1e-9 * max_abs * static_cast<double>(std::max(a.rows(), a.cols()));
    return matrix_rank(a, tol);
}

namespace {

constexpr double kPivotEps = 1e-10;
constexpr double kPhase1Tol = 1e-9;

// Dense simplex tableau in canonical form. Reduced costs are recomputed from
// the tableau at selection time; an incrementally updated cost row drifts
// after a few hundred pivots and can fake an improving ray.
struct Tableau {
    Matrix a;                  // p x ncols
    Vector rhs;                // p, kept nonnegative
    Vector cost;               // ncols, the minimization costs of this phase
    std::vector<Index> basis;  // p, column index of the basic variable per row
    std::vector<char> is_basic;

    double reduced_cost(Index col) const {
        double value = cost[col];
        for (Index i = 0; i < a.rows(); ++i) {
            const double cb = cost[basis[i]];
            if (cb != 0.0) value -= cb * a(i, col);
        }
        return value;
    }

    void pivot(Index row, Index col) {
        const double piv = a(row, col);
        a.row(row) /= piv;
        rhs[row] /= piv;
        for (Index i = 0; i < a.rows(); ++i) {
            if (i == row) continue;
            const double factor = a(i, col);
            if (factor == 0.0) continue;
            a.row(i) -= factor * a.row(row);
            rhs[i] -= factor * rhs[row];
        }
        is_basic[static_cast<std::size_t>(basis[row])] = 0;
        is_basic[static_cast<std::size_t>(col)] = 1;
        basis[row] = col;
    }
};

// Minimizes tableau.cost with Bland's rule. num_enterable limits the columns
// allowed to enter (bans artificials in phase 2). Returns false when the
// pivot cap is hit.
bool run_simplex(Tableau& t, Index num_enterable, std::size_t max_pivots, std::size_t& used) {
    for (;;) {
        Index entering = -1;
        for (Index j = 0; j < num_enterable; ++j) {
            if (t.is_basic[static_cast<std::size_t>(j)]) continue;
            if (t.reduced_cost(j) < -kPivotEps) {
                entering = j;
                break;  // Bland: smallest eligible index
            }
        }
        if (entering < 0) return true;  // optimal

        Index leaving = -1;
        double best_ratio = 0.0;
        for (Index i = 0; i < t.a.rows(); ++i) {
            const double coeff = t.a(i, entering);
            if (coeff > kPivotEps) {
                const double ratio = t.rhs[i] / coeff;
                if (leaving < 0 || ratio < best_ratio - 1e-15 ||
                    (std::abs(ratio - best_ratio) <= 1e-15 && t.basis[i] < t.basis[leaving])) {
                    leaving = i;
                    best_ratio = ratio;
                }
            }
        }
        if (leaving < 0) {
            throw ConvergenceError("simplex: unbounded direction encountered");
        }
        if (++used > max_pivots) return false;
        t.pivot(leaving, entering);
    }
}

struct StandardForm {
    Matrix a;                        // p x ncols (split free variables)
    Vector b;                        // p, nonnegative after sign flips
    std::vector<Index> plus_col;     // original var -> column of its (positive) part
    std::vector<Index> minus_col;    // original var -> column of the negative part, or -1
    Index num_cols = 0;
};

StandardForm to_standard_form(const LpFeasibilityProblem& problem) {
    const Index p = problem.a_eq.rows();
    const Index q = problem.a_eq.cols();
    if (problem.b_eq.size() != p) throw ValidationError("lp: b_eq length mismatch");
    if (static_cast<Index>(problem.nonnegative.size()) != q) {
        throw ValidationError("lp: bound marker length mismatch");
    }
    if (!problem.a_eq.allFinite() || !problem.b_eq.allFinite()) {
        throw ValidationError("lp: entries must be finite");
    }

    StandardForm sf;
    sf.plus_col.resize(q);
    sf.minus_col.assign(q, -1);
    Index ncols = 0;
    for (Index j = 0; j < q; ++j) {
        sf.plus_col[j] = ncols++;
        if (!problem.nonnegative[j]) sf.minus_col[j] = ncols++;
    }
    sf.num_cols = ncols;
    sf.a = Matrix::Zero(p, ncols);
    sf.b = problem.b_eq;
    for (Index j = 0; j < q; ++j) {
        sf.a.col(sf.plus_col[j]) = problem.a_eq.col(j);
        if (sf.minus_col[j] >= 0) sf.a.col(sf.minus_col[j]) = -problem.a_eq.col(j);
    }
    for (Index i = 0; i < p; ++i) {
        if (sf.b[i] < 0.0) {
            sf.a.row(i) = -sf.a.row(i);
            sf.b[i] = -sf.b[i];
        }
    }
    return sf;
}

Vector recombine(const StandardForm& sf, const Tableau& t, Index q) {
    Vector x = Vector::Zero(sf.num_cols);
    for (Index i = 0; i < t.a.rows(); ++i) {
        if (t.basis[i] < sf.num_cols) x[t.basis[i]] = t.rhs[i];
    }
    Vector out(q);
    for (Index j = 0; j < q; ++j) {
        out[j] = x[sf.plus_col[j]];
        if (sf.minus_col[j] >= 0) out[j] -= x[sf.minus_col[j]];
    }
    return out;
}

std::size_t pivot_cap(const LpFeasibilityProblem& problem) {
    if (problem.max_pivots > 0) return problem.max_pivots;
    const std::size_t p = static_cast<std::size_t>(problem.a_eq.rows());
    const std::size_t q = static_cast<std::size_t>(problem.a_eq.cols());
    return 10 * (p + q) * (p + q);
}

// Runs phase 1 and leaves the tableau feasible for the original system with
// artificial columns removed from the basis (redundant rows are dropped).
// Returns false when infeasible.
bool phase1(const StandardForm& sf, Tableau& t, std::size_t max_pivots, std::size_t& used) {
    const Index p = sf.a.rows();
    const Index ncols = sf.num_cols;
    t.a = Matrix::Zero(p, ncols + p);
    t.a.leftCols(ncols) = sf.a;
    t.a.rightCols(p) = Matrix::Identity(p, p);
    t.rhs = sf.b;
    t.basis.resize(p);
    t.is_basic.assign(static_cast<std::size_t>(ncols + p), 0);
    for (Index i = 0; i < p; ++i) {
        t.basis[i] = ncols + i;
        t.is_basic[static_cast<std::size_t>(ncols + i)] = 1;
    }

    // Phase-1 objective: minimize the sum of the artificial variables.
    t.cost = Vector::Zero(ncols + p);
    t.cost.tail(p).setOnes();

    if (!run_simplex(t, ncols + p, max_pivots, used)) {
        throw ConvergenceError("lp_feasible: pivot cap exceeded in phase 1");
    }

    double infeasibility = 0.0;
    for (Index i = 0; i < p; ++i) {
        if (t.basis[i] >= ncols) infeasibility += t.rhs[i];
    }
    if (infeasibility > kPhase1Tol) return false;

    // Drive remaining artificials out of the basis; rows with no original
    // pivot are redundant and removed.
    std::vector<Index> keep;
    for (Index i = 0; i < p; ++i) {
        if (t.basis[i] < ncols) {
            keep.push_back(i);
            continue;
        }
        Index col = -1;
        for (Index j = 0; j < ncols; ++j) {
            if (std::abs(t.a(i, j)) > kPivotEps) {
                col = j;
                break;
            }
        }
        if (col >= 0) {
            t.pivot(i, col);
            keep.push_back(i);
        }
        // else: redundant constraint, drop the row below
    }
    if (static_cast<Index>(keep.size()) != p) {
        Matrix a2(static_cast<Index>(keep.size()), t.a.cols());
        Vector rhs2(static_cast<Index>(keep.size()));
        std::vector<Index> basis2;
        for (std::size_t i = 0; i < keep.size(); ++i) {
            a2.row(static_cast<Index>(i)) = t.a.row(keep[i]);
            rhs2[static_cast<Index>(i)] = t.rhs[keep[i]];
            basis2.push_back(t.basis[keep[i]]);
        }
        t.a = std::move(a2);
        t.rhs = std::move(rhs2);
        t.basis = std::move(basis2);
        t.is_basic.assign(t.is_basic.size(), 0);
        for (Index col : t.basis) t.is_basic[static_cast<std::size_t>(col)] = 1;
    }
    return true;
}

}  // namespace

LpResult lp_feasible(const LpFeasibilityProblem& problem) {
    const StandardForm sf = to_standard_form(problem);
    Tableau t;
    std::size_t used = 0;
    if (!phase1(sf, t, pivot_cap(problem), used)) {
        return {LpStatus::infeasible, Vector()};
    }
    return {LpStatus::feasible, recombine(sf, t, problem.a_eq.cols())};
}

namespace detail {

std::optional<Vector> lp_maximize(const LpFeasibilityProblem& problem, const Vector& objective) {
    if (objective.size() != problem.a_eq.cols()) {
        throw ValidationError("lp_maximize: objective length mismatch");
    }
    const StandardForm sf = to_standard_form(problem);
    Tableau t;
    std::size_t used = 0;
    const std::size_t cap = pivot_cap(problem);
    if (!phase1(sf, t, cap, used)) return std::nullopt;

    // Phase 2: minimize -objective over the split columns; artificial columns
    // are barred from entering.
    t.cost.setZero();
    for (Index j = 0; j < problem.a_eq.cols(); ++j) {
        t.cost[sf.plus_col[j]] = -objective[j];
        if (sf.minus_col[j] >= 0) t.cost[sf.minus_col[j]] = objective[j];
    }
    if (!run_simplex(t, sf.num_cols, cap, used)) {
        throw ConvergenceError("lp_maximize: pivot cap exceeded in phase 2");
    }
    return recombine(sf, t, problem.a_eq.cols());
}

}  // namespace detail

Vector project_l1_ball(const Vector& w, double radius) {
    if (!(radius > 0.0)) throw ValidationError("project_l1_ball: radius must be positive");
    if (w.cwiseAbs().sum() <= radius) return w;

    // Sort-then-threshold: theta solves sum max(|w_i| - theta, 0) = radius.
    std::vector<double> u(w.data(), w.data() + w.size());
    for (double& v : u) v = std::abs(v);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        cumulative += u[j];
        const double candidate = (cumulative - radius) / static_cast<double>(j + 1);
        if (u[j] - candidate > 0.0) {
            theta = candidate;
        } else {
            break;
        }
    }
    Vector out(w.size());
    for (Index i = 0; i < w.size(); ++i) {
        const double mag = std::abs(w[i]) - theta;
        out[i] = mag > 0.0 ? (w[i] > 0.0 ? mag : -mag) : 0.0;
    }
    return out;
}

Vector project_nonneg(const Vector& x) {
    return x.unaryExpr([](double v) { return v > 0.0 ? v : 0.0; });
}

Vector finite_difference_gradient(const std::function<double(const Vector&)>& fn,
                                  const Vector& x, double h) {
    Vector grad(x.size());
    Vector probe = x;
    for (Index i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + h;
        const double fplus = fn(probe);
        probe[i] = x[i] - h;
        const double fminus = fn(probe);
        probe[i] = x[i];
        grad[i] = (fplus - fminus) / (2.0 * h);
    }
    return grad;
}

}  // namespace cirl
