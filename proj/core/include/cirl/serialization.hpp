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

#include "cirl/experiments.hpp"
#include "cirl/forward.hpp"
#include "cirl/gridworld.hpp"
#include "cirl/identifiability.hpp"
#include "cirl/irl.hpp"
#include "cirl/types.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace cirl {

using Json = nlohmann::json;

// CMDP files use the nested schema
//   {"n":int, "m":int, "gamma":float, "nu0":[...],
//    "P": [s][a][s'], "Psi": [i][s][a], "b": [...], "r": [s][a] (optional)}
// and are converted to the action-major flat layout on load, with full
// validation.
Cmdp cmdp_from_json(const Json& j);
Json cmdp_to_json(const Cmdp& cmdp);
Cmdp load_cmdp(const std::string& path);
void save_cmdp(const Cmdp& cmdp, const std::string& path);

// Reward class files: either an explicit feature matrix
//   {"phi": [[...]] with nm rows, "norm": "l1"|"l2"|"unbounded", "radius": c}
// or the state-indicator shorthand {"state_indicators": [s, ...], ...}.
RewardClass reward_class_from_json(const Json& j, Index n, Index m);
Json reward_class_to_json(const RewardClass& rc);
RewardClass load_reward_class(const std::string& path, Index n, Index m);

// Demonstrations are JSON lines, one trajectory per line: [[s,a],[s,a],...].
Demonstrations load_demonstrations(const std::string& path);
void save_demonstrations(const Demonstrations& demos, const std::string& path);

Json solver_config_to_json(const SolverConfig& config);
SolverConfig solver_config_from_json(const Json& j);

Json gda_config_to_json(const GdaConfig& config);
GdaConfig gda_config_from_json(const Json& j);

Json gridworld_config_to_json(const GridworldConfig& config);
GridworldConfig gridworld_config_from_json(const Json& j);

Json soft_solution_to_json(const SoftSolution& sol);
Json constrained_solution_to_json(const ConstrainedSolution& sol);

Json irl_result_to_json(const IrlResult& result);
/// Trace sidecar, columns: episode,ipm,max_violation,lagrangian.
void save_trace_csv(const IrlResult& result, const std::string& path);

Json identifiability_report_to_json(const IdentifiabilityReport& report);

Json occupancy_to_json(const OccupancyMeasure& mu);
OccupancyMeasure occupancy_from_json(const Json& j);

/// Formats a double with round-trip precision for CSV output (deterministic
/// across runs).
std::string format_double(double x);

/// FNV-1a hash of a canonical JSON dump, as a hex string.
std::string config_hash(const Json& j);

}  // namespace cirl
