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

#include "cirl/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace cirl {

namespace {

Json require(const Json& j, const char* key) {
    if (!j.contains(key)) {
        throw ValidationError(std::string("missing required field: ") + key);
    }
    return j.at(key);
}

Vector vector_from_json(const Json& j) {
    if (!j.is_array()) throw ValidationError("expected a JSON array of numbers");
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = j[i].get<double>();
    return v;
}

Json vector_to_json(const Vector& v) {
    Json out = Json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Json matrix_to_json(const Matrix& m) {
    Json out = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        out.push_back(row);
    }
    return out;
}

}  // namespace

Cmdp cmdp_from_json(const Json& j) {
    Cmdp cmdp;
    cmdp.n = require(j, "n").get<Index>();
    cmdp.m = require(j, "m").get<Index>();
    cmdp.gamma = require(j, "gamma").get<double>();
    if (cmdp.n < 1 || cmdp.m < 2) throw ValidationError("cmdp json: invalid n or m");
    cmdp.nu0 = vector_from_json(require(j, "nu0"));

    const Json p = require(j, "P");
    if (static_cast<Index>(p.size()) != cmdp.n) throw ValidationError("cmdp json: P must have n rows");
    cmdp.transition = Matrix::Zero(cmdp.n * cmdp.m, cmdp.n);
    for (Index s = 0; s < cmdp.n; ++s) {
        const Json& per_action = p[static_cast<std::size_t>(s)];
        if (static_cast<Index>(per_action.size()) != cmdp.m) {
            throw ValidationError("cmdp json: P[s] must have m entries");
        }
        for (Index a = 0; a < cmdp.m; ++a) {
            const Vector row = vector_from_json(per_action[static_cast<std::size_t>(a)]);
            if (row.size() != cmdp.n) throw ValidationError("cmdp json: P[s][a] must have n entries");
            cmdp.transition.row(sa_index(cmdp.n, s, a)) = row.transpose();
        }
    }

    if (j.contains("Psi") && !j.at("Psi").is_null()) {
        const Json psi = j.at("Psi");
        const Index k = static_cast<Index>(psi.size());
        cmdp.psi = Matrix::Zero(cmdp.n * cmdp.m, k);
        for (Index i = 0; i < k; ++i) {
            const Json& per_state = psi[static_cast<std::size_t>(i)];
            if (static_cast<Index>(per_state.size()) != cmdp.n) {
                throw ValidationError("cmdp json: Psi[i] must have n rows");
            }
            for (Index s = 0; s < cmdp.n; ++s) {
                const Vector row = vector_from_json(per_state[static_cast<std::size_t>(s)]);
                if (row.size() != cmdp.m) {
                    throw ValidationError("cmdp json: Psi[i][s] must have m entries");
                }
                for (Index a = 0; a < cmdp.m; ++a) cmdp.psi(sa_index(cmdp.n, s, a), i) = row[a];
            }
        }
        cmdp.b = vector_from_json(require(j, "b"));
    } else {
        cmdp.psi = Matrix(cmdp.n * cmdp.m, 0);
        cmdp.b = Vector(0);
    }

    if (j.contains("r") && !j.at("r").is_null()) {
        const Json r = j.at("r");
        if (static_cast<Index>(r.size()) != cmdp.n) throw ValidationError("cmdp json: r must have n rows");
        Vector reward(cmdp.n * cmdp.m);
        for (Index s = 0; s < cmdp.n; ++s) {
            const Vector row = vector_from_json(r[static_cast<std::size_t>(s)]);
            if (row.size() != cmdp.m) throw ValidationError("cmdp json: r[s] must have m entries");
            for (Index a = 0; a < cmdp.m; ++a) reward[sa_index(cmdp.n, s, a)] = row[a];
        }
        cmdp.reward = reward;
    }

    cmdp.validate();
    return cmdp;
}

Json cmdp_to_json(const Cmdp& cmdp) {
    Json j;
    j["n"] = cmdp.n;
    j["m"] = cmdp.m;
    j["gamma"] = cmdp.gamma;
    j["nu0"] = vector_to_json(cmdp.nu0);
    Json p = Json::array();
    for (Index s = 0; s < cmdp.n; ++s) {
        Json per_action = Json::array();
        for (Index a = 0; a < cmdp.m; ++a) {
            per_action.push_back(vector_to_json(cmdp.transition.row(sa_index(cmdp.n, s, a))));
        }
        p.push_back(per_action);
    }
    j["P"] = p;
    if (cmdp.num_constraints() > 0) {
        Json psi = Json::array();
        for (Index i = 0; i < cmdp.num_constraints(); ++i) {
            Json per_state = Json::array();
            for (Index s = 0; s < cmdp.n; ++s) {
                Json row = Json::array();
                for (Index a = 0; a < cmdp.m; ++a) row.push_back(cmdp.psi(sa_index(cmdp.n, s, a), i));
                per_state.push_back(row);
            }
            psi.push_back(per_state);
        }
        j["Psi"] = psi;
        j["b"] = vector_to_json(cmdp.b);
    }
    if (cmdp.reward) {
        Json r = Json::array();
        for (Index s = 0; s < cmdp.n; ++s) {
            Json row = Json::array();
            for (Index a = 0; a < cmdp.m; ++a) row.push_back((*cmdp.reward)[sa_index(cmdp.n, s, a)]);
            r.push_back(row);
        }
        j["r"] = r;
    }
    return j;
}

Cmdp load_cmdp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open CMDP file: " + path);
    Json j;
    in >> j;  // nlohmann parse errors carry the byte position
    return cmdp_from_json(j);
}

void save_cmdp(const Cmdp& cmdp, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open output file: " + path);
    out << cmdp_to_json(cmdp).dump(2) << "\n";
}

RewardClass reward_class_from_json(const Json& j, Index n, Index m) {
    RewardClass rc;
    if (j.contains("phi")) {
        const Json phi = j.at("phi");
        const Index rows = static_cast<Index>(phi.size());
        if (rows != n * m) throw ValidationError("reward class json: phi must have n*m rows");
        const Index cols = static_cast<Index>(phi[0].size());
        rc.phi = Matrix(rows, cols);
        for (Index i = 0; i < rows; ++i) {
            const Vector row = vector_from_json(phi[static_cast<std::size_t>(i)]);
            if (row.size() != cols) throw ValidationError("reward class json: ragged phi");
            rc.phi.row(i) = row.transpose();
        }
    } else if (j.contains("state_indicators")) {
        std::vector<Index> states;
        for (const auto& v : j.at("state_indicators")) {
            const Index s = v.get<Index>();
            if (s < 0 || s >= n) throw ValidationError("reward class json: state index out of range");
            states.push_back(s);
        }
        rc.phi = Matrix::Zero(n * m, static_cast<Index>(states.size()));
        for (std::size_t col = 0; col < states.size(); ++col) {
            for (Index a = 0; a < m; ++a) {
                rc.phi(sa_index(n, states[col], a), static_cast<Index>(col)) = 1.0;
            }
        }
    } else {
        throw ValidationError("reward class json: need phi or state_indicators");
    }
    const std::string norm = j.value("norm", std::string("unbounded"));
    if (norm == "l1") {
        rc.norm_kind = NormKind::l1;
    } else if (norm == "l2") {
        rc.norm_kind = NormKind::l2;
    } else if (norm == "unbounded") {
        rc.norm_kind = NormKind::unbounded;
    } else {
        throw ValidationError("reward class json: norm must be l1, l2 or unbounded");
    }
    rc.radius = j.value("radius", 1.0);
    rc.validate();
    return rc;
}

Json reward_class_to_json(const RewardClass& rc) {
    Json j;
    j["phi"] = matrix_to_json(rc.phi);
    switch (rc.norm_kind) {
        case NormKind::l1: j["norm"] = "l1"; break;
        case NormKind::l2: j["norm"] = "l2"; break;
        case NormKind::unbounded: j["norm"] = "unbounded"; break;
    }
    j["radius"] = rc.radius;
    return j;
}

RewardClass load_reward_class(const std::string& path, Index n, Index m) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open reward class file: " + path);
    Json j;
    in >> j;
    return reward_class_from_json(j, n, m);
}

Demonstrations load_demonstrations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open demonstrations file: " + path);
    Demonstrations demos;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const Json j = Json::parse(line);
        std::vector<std::pair<int, int>> traj;
        for (const auto& pair : j) {
            if (!pair.is_array() || pair.size() != 2) {
                throw ValidationError("demonstrations: each step must be a [state, action] pair");
            }
            traj.emplace_back(pair[0].get<int>(), pair[1].get<int>());
        }
        demos.trajectories.push_back(std::move(traj));
    }
    if (demos.trajectories.empty()) throw ValidationError("demonstrations: empty file");
    demos.horizon = static_cast<int>(demos.trajectories.front().size()) - 1;
    return demos;
}

void save_demonstrations(const Demonstrations& demos, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open output file: " + path);
    for (const auto& traj : demos.trajectories) {
        Json line = Json::array();
        for (const auto& [s, a] : traj) line.push_back(Json::array({s, a}));
        out << line.dump() << "\n";
    }
}

Json solver_config_to_json(const SolverConfig& config) {
    return Json{{"tol", config.tol},
                {"beta", config.beta},
                {"max_iter", config.max_iter},
                {"dual_max_iter", config.dual_max_iter},
                {"frank_wolfe_iters", config.frank_wolfe_iters}};
}

SolverConfig solver_config_from_json(const Json& j) {
    SolverConfig config;
    config.tol = j.value("tol", config.tol);
    config.beta = j.value("beta", config.beta);
    config.max_iter = j.value("max_iter", config.max_iter);
    config.dual_max_iter = j.value("dual_max_iter", config.dual_max_iter);
    config.frank_wolfe_iters = j.value("frank_wolfe_iters", config.frank_wolfe_iters);
    return config;
}

Json gda_config_to_json(const GdaConfig& config) {
    return Json{{"eta", config.eta},           {"episodes", config.episodes},
                {"beta", config.beta},         {"seed", config.seed},
                {"record_every", config.record_every}, {"npg_eta", config.npg_eta}};
}

GdaConfig gda_config_from_json(const Json& j) {
    GdaConfig config;
    config.eta = j.value("eta", config.eta);
    config.episodes = j.value("episodes", config.episodes);
    config.beta = j.value("beta", config.beta);
    config.seed = j.value("seed", config.seed);
    config.record_every = j.value("record_every", config.record_every);
    config.npg_eta = j.value("npg_eta", config.npg_eta);
    config.validate();
    return config;
}

Json gridworld_config_to_json(const GridworldConfig& config) {
    Json j;
    j["width"] = config.width;
    j["height"] = config.height;
    j["success_prob"] = config.success_prob;
    j["gamma"] = config.gamma;
    j["beta"] = config.beta;
    Json cells = Json::array();
    for (const auto& [cell, value] : config.reward_cells) {
        cells.push_back(Json::array({cell, value}));
    }
    j["reward_cells"] = cells;
    j["constraint_rects"] = config.constraint_rects;
    j["b"] = config.b;
    return j;
}

GridworldConfig gridworld_config_from_json(const Json& j) {
    GridworldConfig config;
    config.width = j.value("width", config.width);
    config.height = j.value("height", config.height);
    config.success_prob = j.value("success_prob", config.success_prob);
    config.gamma = j.value("gamma", config.gamma);
    config.beta = j.value("beta", config.beta);
    if (j.contains("reward_cells")) {
        config.reward_cells.clear();
        for (const auto& pair : j.at("reward_cells")) {
            config.reward_cells.emplace_back(pair[0].get<int>(), pair[1].get<double>());
        }
    }
    if (j.contains("constraint_rects")) {
        config.constraint_rects = j.at("constraint_rects").get<std::vector<std::vector<int>>>();
    }
    if (j.contains("b")) config.b = j.at("b").get<std::vector<double>>();
    config.validate();
    return config;
}

Json soft_solution_to_json(const SoftSolution& sol) {
    Json j;
    j["value"] = vector_to_json(sol.value);
    j["qvalue"] = vector_to_json(sol.qvalue);
    j["policy"] = matrix_to_json(sol.policy.pi);
    j["occupancy"] = vector_to_json(sol.occupancy.mu);
    j["iterations"] = sol.iterations;
    j["residual"] = sol.residual;
    j["converged"] = sol.converged;
    return j;
}

Json constrained_solution_to_json(const ConstrainedSolution& sol) {
    Json j;
    j["occupancy"] = vector_to_json(sol.occupancy.mu);
    j["policy"] = matrix_to_json(sol.policy.pi);
    j["dual"] = vector_to_json(sol.dual);
    j["duality_gap"] = sol.duality_gap;
    j["iterations"] = sol.iterations;
    j["converged"] = sol.converged;
    return j;
}

Json irl_result_to_json(const IrlResult& result) {
    Json j;
    j["weights"] = vector_to_json(result.weights);
    j["reward"] = vector_to_json(result.reward);
    j["dual"] = vector_to_json(result.dual);
    j["policy"] = matrix_to_json(result.policy.pi);
    j["occupancy"] = vector_to_json(result.occupancy.mu);
    return j;
}

void save_trace_csv(const IrlResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open output file: " + path);
    out << "episode,ipm,max_violation,lagrangian\n";
    for (const auto& point : result.trace) {
        out << point.episode << "," << format_double(point.ipm) << ","
            << format_double(point.max_violation) << "," << format_double(point.lagrangian)
            << "\n";
    }
}

Json identifiability_report_to_json(const IdentifiabilityReport& report) {
    return Json{{"rank_phi", report.rank_phi},
                {"rank_xi", report.rank_xi},
                {"rank_joint", report.rank_joint},
                {"condition_met", report.condition_met},
                {"shaping_dimension", report.shaping_dimension}};
}

Json occupancy_to_json(const OccupancyMeasure& mu) {
    return Json{{"n", mu.n}, {"m", mu.m}, {"mu", vector_to_json(mu.mu)}};
}

OccupancyMeasure occupancy_from_json(const Json& j) {
    return OccupancyMeasure(require(j, "n").get<Index>(), require(j, "m").get<Index>(),
                            vector_from_json(require(j, "mu")));
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

std::string config_hash(const Json& j) {
    const std::string dump = j.dump();
    std::uint64_t hash = 1469598103934665603ULL;  // FNV-1a 64
    for (unsigned char c : dump) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace cirl
