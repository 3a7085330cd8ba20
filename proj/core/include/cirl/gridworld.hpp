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

#include "cirl/irl.hpp"
#include "cirl/types.hpp"

#include <utility>
#include <vector>

namespace cirl {

/**
 * Stochastic gridworld: cells are states (row-major, s = y * width + x),
 * actions are up/down/left/right. An action reaches its target with
 * probability success_prob; the residual slip mass is split evenly over the
 * four cardinal directions, and any move off the grid stays in place. The
 * reward is state-dependent (copied across actions) and each constraint is
 * the indicator of one cell rectangle.
 */
struct GridworldConfig {
    int width = 6;
    int height = 6;
    double success_prob = 0.9;
    double gamma = 0.9;
    double beta = 1.0;
    /// (cell, reward) pairs; default two opposite corners at 0.5.
    std::vector<std::pair<int, double>> reward_cells = {{0, 0.5}, {35, 0.5}};
    /// Cell sets, one per safety constraint; default two 2x2 blocks on the
    /// diagonal between the reward corners.
    std::vector<std::vector<int>> constraint_rects = {{7, 8, 13, 14}, {21, 22, 27, 28}};
    /// Constraint thresholds, one per rectangle.
    std::vector<double> b = {0.02, 0.02};

    int num_cells() const { return width * height; }
    void validate() const;
};

/// Actions in the gridworld, in layout order.
enum GridAction { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };

/// Builds the CMDP for a gridworld config. Transition rows sum to 1 exactly
/// (the intended-target entry absorbs the floating point residual). The
/// initial distribution is uniform over all cells.
Cmdp build_gridworld(const GridworldConfig& config);

/// Indices of the boundary cells of a width x height grid, row-major order.
std::vector<Index> boundary_cells(int width, int height);

/// Feature matrix with one state-indicator column E_s per listed state
/// (each column is 1 on all (s, a) rows of that state).
Matrix state_indicator_features(Index n, Index m, const std::vector<Index>& states);

/// The two reward classes of the gridworld study: features on boundary states
/// only, or on all states.
RewardClass gridworld_boundary_class(const GridworldConfig& config, NormKind kind, double radius);
RewardClass gridworld_full_class(const GridworldConfig& config, NormKind kind, double radius);

}  // namespace cirl
