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

#include "cirl/types.hpp"

#include <cmath>
#include <sstream>

namespace cirl {

Matrix stacked_identity(Index n, Index m) {
    Matrix e = Matrix::Zero(n * m, n);
    for (Index a = 0; a < m; ++a) {
        e.block(a * n, 0, n, n) = Matrix::Identity(n, n);
    }
    return e;
}

void Cmdp::validate() const {
    if (n < 1) throw ValidationError("Cmdp: need at least one state");
    if (m < 2) throw ValidationError("Cmdp: need more than one action");
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw ValidationError("Cmdp: gamma must lie in (0,1)");
    }
    if (nu0.size() != n) throw ValidationError("Cmdp: nu0 must have length n");
    if (nu0.minCoeff() < 0.0) throw ValidationError("Cmdp: nu0 has a negative entry");
    if (std::abs(nu0.sum() - 1.0) > tol::stochastic) {
        throw ValidationError("Cmdp: nu0 does not sum to one");
    }
    if (transition.rows() != n * m || transition.cols() != n) {
        throw ValidationError("Cmdp: transition must be nm x n");
    }
    for (Index row = 0; row < transition.rows(); ++row) {
        if (transition.row(row).minCoeff() < 0.0) {
            std::ostringstream msg;
            msg << "Cmdp: transition row " << row << " has a negative entry";
            throw ValidationError(msg.str());
        }
        if (std::abs(transition.row(row).sum() - 1.0) > tol::stochastic) {
            std::ostringstream msg;
            msg << "Cmdp: transition row " << row << " does not sum to one";
            throw ValidationError(msg.str());
        }
    }
    if (psi.size() > 0 && psi.rows() != n * m) {
        throw ValidationError("Cmdp: psi must have nm rows");
    }
    if (b.size() != psi.cols()) {
        throw ValidationError("Cmdp: psi and b disagree on the number of constraints");
    }
    if (reward && reward->size() != n * m) {
        throw ValidationError("Cmdp: reward must have length nm");
    }
}

Cmdp Cmdp::without_constraints() const {
    Cmdp out = *this;
    out.psi = Matrix(n * m, 0);
    out.b = Vector(0);
    return out;
}

Cmdp Cmdp::with_thresholds(const Vector& new_b) const {
    if (new_b.size() != b.size()) {
        throw ValidationError("with_thresholds: threshold length mismatch");
    }
    Cmdp out = *this;
    out.b = new_b;
    return out;
}

Policy Policy::uniform(Index n, Index m) {
    Policy p;
    p.pi = Matrix::Constant(n, m, 1.0 / static_cast<double>(m));
    return p;
}

void Policy::validate() const {
    if (pi.rows() < 1 || pi.cols() < 1) throw ValidationError("Policy: empty matrix");
    for (Index s = 0; s < pi.rows(); ++s) {
        if (pi.row(s).minCoeff() < 0.0) {
            throw ValidationError("Policy: negative probability");
        }
        if (std::abs(pi.row(s).sum() - 1.0) > tol::stochastic) {
            throw ValidationError("Policy: row does not sum to one");
        }
    }
}

OccupancyMeasure::OccupancyMeasure(Index n_states, Index n_actions, Vector values)
    : n(n_states), m(n_actions), mu(std::move(values)) {
    if (mu.size() != n * m) {
        throw ValidationError("OccupancyMeasure: vector length must be n*m");
    }
    for (Index i = 0; i < mu.size(); ++i) {
        if (mu[i] < 0.0) {
            if (mu[i] < -tol::clamp_negative) {
                throw ValidationError("OccupancyMeasure: entry below -1e-12");
            }
            mu[i] = 0.0;
        }
    }
}

Vector OccupancyMeasure::state_marginals() const {
    Vector nu = Vector::Zero(n);
    for (Index a = 0; a < m; ++a) {
        nu += mu.segment(a * n, n);
    }
    return nu;
}

Regularizer Regularizer::entropy(double beta) {
    if (!(beta > 0.0)) throw ValidationError("Regularizer: entropy weight must be positive");
    return {RegularizerKind::entropy, beta};
}

Regularizer Regularizer::quadratic(double beta) {
    if (!(beta > 0.0)) throw ValidationError("Regularizer: quadratic weight must be positive");
    return {RegularizerKind::quadratic, beta};
}

}  // namespace cirl
