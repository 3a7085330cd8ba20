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

#include "cirl/gridworld.hpp"

#include <cmath>

namespace cirl {

namespace {
constexpr int kNumActions = 4;
// up, down, left, right
constexpr int kDx[kNumActions] = {0, 0, -1, 1};
constexpr int kDy[kNumActions] = {-1, 1, 0, 0};
}  // namespace

void GridworldConfig::validate() const {
    if (width < 1 || height < 1) throw ValidationError("gridworld: empty grid");
    if (!(success_prob > 0.0 && success_prob <= 1.0)) {
        throw ValidationError("gridworld: success_prob must lie in (0,1]");
    }
    if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("gridworld: gamma in (0,1)");
    if (!(beta > 0.0)) throw ValidationError("gridworld: beta must be positive");
    const int n = num_cells();
    for (const auto& [cell, value] : reward_cells) {
        (void)value;
        if (cell < 0 || cell >= n) throw ValidationError("gridworld: reward cell out of range");
    }
    for (const auto& rect : constraint_rects) {
        if (rect.empty()) throw ValidationError("gridworld: empty constraint rectangle");
        for (int cell : rect) {
            if (cell < 0 || cell >= n) {
                throw ValidationError("gridworld: constraint cell out of range");
            }
        }
    }
    if (b.size() != constraint_rects.size()) {
        throw ValidationError("gridworld: thresholds and rectangles disagree");
    }
}

Cmdp build_gridworld(const GridworldConfig& config) {
    config.validate();
    const int w = config.width;
    const int h = config.height;
    const Index n = config.num_cells();
    const Index m = kNumActions;

    Cmdp cmdp;
    cmdp.n = n;
    cmdp.m = m;
    cmdp.gamma = config.gamma;

    cmdp.nu0 = Vector::Constant(n, 1.0 / static_cast<double>(n));
    cmdp.nu0[n - 1] = 1.0 - cmdp.nu0.head(n - 1).sum();

    const auto move = [&](Index s, int action) -> Index {
        const int x = static_cast<int>(s) % w;
        const int y = static_cast<int>(s) / w;
        const int nx = x + kDx[action];
        const int ny = y + kDy[action];
        if (nx < 0 || nx >= w || ny < 0 || ny >= h) return s;  // off-grid: stay
        return static_cast<Index>(ny) * w + nx;
    };

    cmdp.transition = Matrix::Zero(n * m, n);
    const double slip_share = (1.0 - config.success_prob) / static_cast<double>(kNumActions);
    for (Index s = 0; s < n; ++s) {
        for (Index a = 0; a < m; ++a) {
            const Index row = sa_index(n, s, a);
            const Index target = move(s, static_cast<int>(a));
            cmdp.transition(row, target) += config.success_prob;
            for (int dir = 0; dir < kNumActions; ++dir) {
                cmdp.transition(row, move(s, dir)) += slip_share;
            }
            // Let the intended target absorb the floating point residual so
            // the row sums to one exactly.
            cmdp.transition(row, target) += 1.0 - cmdp.transition.row(row).sum();
        }
    }

    Vector reward = Vector::Zero(n * m);
    for (const auto& [cell, value] : config.reward_cells) {
        for (Index a = 0; a < m; ++a) reward[sa_index(n, cell, a)] = value;
    }
    cmdp.reward = reward;

    const Index k = static_cast<Index>(config.constraint_rects.size());
    cmdp.psi = Matrix::Zero(n * m, k);
    for (Index i = 0; i < k; ++i) {
        for (int cell : config.constraint_rects[static_cast<std::size_t>(i)]) {
            for (Index a = 0; a < m; ++a) cmdp.psi(sa_index(n, cell, a), i) = 1.0;
        }
    }
    cmdp.b = Vector(k);
    for (Index i = 0; i < k; ++i) cmdp.b[i] = config.b[static_cast<std::size_t>(i)];

    cmdp.validate();
    return cmdp;
}

std::vector<Index> boundary_cells(int width, int height) {
    std::vector<Index> cells;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (x == 0 || y == 0 || x == width - 1 || y == height - 1) {
                cells.push_back(static_cast<Index>(y) * width + x);
            }
        }
    }
    return cells;
}

Matrix state_indicator_features(Index n, Index m, const std::vector<Index>& states) {
    Matrix phi = Matrix::Zero(n * m, static_cast<Index>(states.size()));
    for (std::size_t j = 0; j < states.size(); ++j) {
        for (Index a = 0; a < m; ++a) {
            phi(sa_index(n, states[j], a), static_cast<Index>(j)) = 1.0;
        }
    }
    return phi;
}

RewardClass gridworld_boundary_class(const GridworldConfig& config, NormKind kind,
                                     double radius) {
    RewardClass rc;
    rc.phi = state_indicator_features(config.num_cells(), kNumActions,
                                      boundary_cells(config.width, config.height));
    rc.norm_kind = kind;
    rc.radius = radius;
    return rc;
}

RewardClass gridworld_full_class(const GridworldConfig& config, NormKind kind, double radius) {
    std::vector<Index> all(static_cast<std::size_t>(config.num_cells()));
    for (std::size_t s = 0; s < all.size(); ++s) all[s] = static_cast<Index>(s);
    RewardClass rc;
    rc.phi = state_indicator_features(config.num_cells(), kNumActions, all);
    rc.norm_kind = kind;
    rc.radius = radius;
    return rc;
}

}  // namespace cirl
