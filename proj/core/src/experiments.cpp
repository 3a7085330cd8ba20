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

#include "cirl/experiments.hpp"

#include "cirl/forward.hpp"
#include "cirl/identifiability.hpp"
#include "cirl/logging.hpp"
#include "cirl/occupancy.hpp"
#include "cirl/serialization.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

namespace cirl {

namespace {

// Canonical uniform double in [0, 1) from a 64-bit draw.
double canonical(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Inverse-CDF draw from a probability row (any Eigen expression).
template <typename Row>
int sample_index(const Row& probs, std::mt19937_64& rng) {
    const double u = canonical(rng);
    double acc = 0.0;
    const int size = static_cast<int>(probs.size());
    for (int i = 0; i < size; ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    return size - 1;
}

int hardware_jobs(int requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

void run_parallel(int jobs, int num_tasks, const std::function<void(int)>& task) {
    if (jobs <= 1 || num_tasks <= 1) {
        for (int i = 0; i < num_tasks; ++i) task(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    const int pool = std::min(jobs, num_tasks);
    workers.reserve(static_cast<std::size_t>(pool));
    for (int t = 0; t < pool; ++t) {
        workers.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= num_tasks) return;
                task(i);
            }
        });
    }
    for (auto& worker : workers) worker.join();
}

double quantile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open output file: " + path);
    out << content;
}

Json grid_json(const Vector& state_values, int width, int height) {
    Json rows = Json::array();
    for (int y = 0; y < height; ++y) {
        Json row = Json::array();
        for (int x = 0; x < width; ++x) row.push_back(state_values[y * width + x]);
        rows.push_back(row);
    }
    return rows;
}

Json policy_json(const Policy& policy) {
    Json rows = Json::array();
    for (Index s = 0; s < policy.num_states(); ++s) {
        Json row = Json::array();
        for (Index a = 0; a < policy.num_actions(); ++a) row.push_back(policy.pi(s, a));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c) {
    // splitmix64 finalizer over the mixed words
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (a + 1) + 0xbf58476d1ce4e5b9ULL * (b + 1) +
                      0x94d049bb133111ebULL * (c + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string version_string() { return "cirl-0.1.0"; }

Demonstrations sample_demonstrations(const Cmdp& cmdp, const Policy& policy, int count_n,
                                     int horizon_t, std::uint64_t seed) {
    if (count_n < 1) throw ValidationError("sample_demonstrations: need at least one trajectory");
    if (horizon_t < 0) throw ValidationError("sample_demonstrations: negative horizon");
    policy.validate();
    if (policy.num_states() != cmdp.n || policy.num_actions() != cmdp.m) {
        throw ValidationError("sample_demonstrations: policy dimensions disagree");
    }

    std::mt19937_64 rng(seed);
    Demonstrations demos;
    demos.horizon = horizon_t;
    demos.trajectories.resize(static_cast<std::size_t>(count_n));
    for (auto& traj : demos.trajectories) {
        traj.reserve(static_cast<std::size_t>(horizon_t) + 1);
        int s = sample_index(cmdp.nu0, rng);
        for (int t = 0; t <= horizon_t; ++t) {
            const int a = sample_index(policy.pi.row(s), rng);
            traj.emplace_back(s, a);
            s = sample_index(cmdp.transition.row(sa_index(cmdp.n, s, a)), rng);
        }
    }
    return demos;
}

const GeneralizationRow& GeneralizationReport::find(const std::string& method,
                                                    const std::string& regime) const {
    for (const auto& row : rows) {
        if (row.method == method && row.regime == regime) return row;
    }
    throw ValidationError("GeneralizationReport: no row " + method + "/" + regime);
}

GeneralizationReport run_generalization_experiment(const GridworldConfig& config,
                                                   const std::string& out_dir,
                                                   const ExperimentOptions& options) {
    std::filesystem::create_directories(out_dir);
    const Cmdp cmdp = build_gridworld(config);
    const Vector r_expert = *cmdp.reward;
    const Regularizer reg = Regularizer::entropy(config.beta);

    log_info("generalization: solving the expert at the training threshold");
    const ConstrainedSolution expert_train =
        solve_rl_constrained(cmdp, r_expert, config.beta, options.solver_tol);
    const Cmdp cmdp_test = cmdp.with_thresholds(
        Vector::Constant(cmdp.num_constraints(), options.test_threshold));
    const ConstrainedSolution expert_test =
        solve_rl_constrained(cmdp_test, r_expert, config.beta, options.solver_tol);

    struct Method {
        std::string name;
        bool boundary_class;
        bool constrained;
    };
    const std::vector<Method> methods = {
        {"R1_F", true, true}, {"R2_F", false, true}, {"R1_M", true, false}, {"R2_M", false, false}};

    GeneralizationReport report;
    report.version = version_string();
    Json meta_runs = Json::array();

    struct MethodOutput {
        bool ok = false;
        std::string note;
        Vector reward;
        Policy policy;
    };
    std::vector<MethodOutput> outputs(methods.size());

    const auto run_method = [&](int idx) {
        const Method& method = methods[static_cast<std::size_t>(idx)];
        const RewardClass rc = method.boundary_class
                                   ? gridworld_boundary_class(config, NormKind::l2, options.class_radius)
                                   : gridworld_full_class(config, NormKind::l2, options.class_radius);
        const Cmdp& train_cmdp_full = cmdp;
        const Cmdp train_cmdp =
            method.constrained ? train_cmdp_full : train_cmdp_full.without_constraints();
        GdaConfig gda;
        gda.eta = options.gda_eta;
        gda.episodes = options.gda_episodes;
        gda.beta = config.beta;
        gda.seed = derive_seed(options.seed, 17, static_cast<std::uint64_t>(idx), 0);
        gda.record_every = std::max(1, options.gda_episodes / 200);
        MethodOutput& out = outputs[static_cast<std::size_t>(idx)];
        try {
            const IrlResult result = gda_irl(train_cmdp, rc, expert_train.occupancy, gda);
            out.ok = true;
            out.reward = result.reward;
            out.policy = result.policy;
        } catch (const std::exception& e) {
            out.note = e.what();
        }
    };
    run_parallel(hardware_jobs(options.jobs), static_cast<int>(methods.size()), run_method);

    for (std::size_t idx = 0; idx < methods.size(); ++idx) {
        const Method& method = methods[idx];
        const MethodOutput& out = outputs[idx];
        Json run_meta;
        run_meta["method"] = method.name;
        run_meta["gda_converged"] = out.ok;
        if (!out.ok) {
            run_meta["note"] = out.note;
            for (const char* regime : {"train", "test"}) {
                GeneralizationRow row;
                row.method = method.name;
                row.regime = regime;
                row.delta_mu = std::nan("");
                row.delta_j = std::nan("");
                row.converged = false;
                row.note = out.note;
                report.rows.push_back(row);
            }
            meta_runs.push_back(run_meta);
            continue;
        }
        for (const char* regime : {"train", "test"}) {
            const bool is_train = std::string(regime) == "train";
            const Cmdp& eval_cmdp = is_train ? cmdp : cmdp_test;
            const ConstrainedSolution& expert = is_train ? expert_train : expert_test;
            GeneralizationRow row;
            row.method = method.name;
            row.regime = regime;
            try {
                const ConstrainedSolution sol =
                    solve_rl_constrained(eval_cmdp, out.reward, config.beta, options.eval_tol);
                row.delta_mu = (expert.occupancy.mu - sol.occupancy.mu).cwiseAbs().sum();
                row.delta_j = objective(expert.occupancy, r_expert, reg) -
                              objective(sol.occupancy, r_expert, reg);
            } catch (const std::exception& e) {
                row.delta_mu = std::nan("");
                row.delta_j = std::nan("");
                row.converged = false;
                row.note = e.what();
            }
            report.rows.push_back(row);
        }
        meta_runs.push_back(run_meta);
    }

    // metrics.csv in fixed method/regime order
    std::ostringstream csv;
    csv << "method,b_regime,delta_mu,delta_j\n";
    for (const auto& row : report.rows) {
        csv << row.method << "," << row.regime << "," << format_double(row.delta_mu) << ","
            << format_double(row.delta_j) << "\n";
    }
    write_file(out_dir + "/metrics.csv", csv.str());

    // reward / policy dumps
    Json reward_grids;
    Json policy_grids;
    Vector expert_state_reward(cmdp.n);
    for (Index s = 0; s < cmdp.n; ++s) expert_state_reward[s] = r_expert[sa_index(cmdp.n, s, 0)];
    reward_grids["expert"] = grid_json(expert_state_reward, config.width, config.height);
    policy_grids["expert"] = policy_json(expert_train.policy);
    for (std::size_t idx = 0; idx < methods.size(); ++idx) {
        if (!outputs[idx].ok) continue;
        Vector state_reward(cmdp.n);
        for (Index s = 0; s < cmdp.n; ++s) {
            state_reward[s] = outputs[idx].reward[sa_index(cmdp.n, s, 0)];
        }
        reward_grids[methods[idx].name] = grid_json(state_reward, config.width, config.height);
        policy_grids[methods[idx].name] = policy_json(outputs[idx].policy);
    }
    write_file(out_dir + "/reward_grid.json", reward_grids.dump(2) + "\n");
    write_file(out_dir + "/policy_grid.json", policy_grids.dump(2) + "\n");

    const Json config_json = gridworld_config_to_json(config);
    report.config_hash = config_hash(config_json);
    report.seeds = {options.seed};
    Json meta;
    meta["config"] = config_json;
    meta["options"] = {{"gda_episodes", options.gda_episodes},
                       {"gda_eta", options.gda_eta},
                       {"solver_tol", options.solver_tol},
                       {"eval_tol", options.eval_tol},
                       {"test_threshold", options.test_threshold},
                       {"class_radius", options.class_radius},
                       {"seed", options.seed}};
    meta["runs"] = meta_runs;
    meta["seeds"] = report.seeds;
    meta["config_hash"] = report.config_hash;
    meta["version"] = report.version;
    write_file(out_dir + "/run_meta.json", meta.dump(2) + "\n");
    return report;
}

double FiniteSampleReport::value(const std::string& method, int n, double q, bool reward) const {
    for (const auto& row : rows) {
        if (row.method == method && row.num_trajectories == n &&
            std::abs(row.quantile - q) < 1e-12) {
            return reward ? row.reward_error : row.policy_error;
        }
    }
    throw ValidationError("FiniteSampleReport: missing row");
}

FiniteSampleReport run_finite_sample_experiment(const GridworldConfig& config,
                                                const std::vector<int>& trajectory_counts,
                                                int horizon_t, int num_seeds,
                                                const std::string& out_dir,
                                                const ExperimentOptions& options) {
    if (trajectory_counts.empty()) {
        throw ValidationError("run_finite_sample_experiment: no trajectory counts");
    }
    if (num_seeds < 1) throw ValidationError("run_finite_sample_experiment: need seeds >= 1");
    std::filesystem::create_directories(out_dir);

    const Cmdp cmdp = build_gridworld(config);
    const Cmdp cmdp_free = cmdp.without_constraints();
    const Vector r_expert = *cmdp.reward;

    log_info("finite-sample: solving the expert policy");
    const ConstrainedSolution expert =
        solve_rl_constrained(cmdp, r_expert, config.beta, options.solver_tol);

    struct Method {
        std::string name;
        NormKind kind;
        double radius;
        bool constrained;
    };
    const std::vector<Method> methods = {{"R2l1_F", NormKind::l1, 1.0, true},
                                         {"R2l2_F", NormKind::l2, 1.0 / std::sqrt(2.0), true},
                                         {"R2l1_M", NormKind::l1, 1.0, false},
                                         {"R2l2_M", NormKind::l2, 1.0 / std::sqrt(2.0), false}};

    // Empirical occupancies per (N, seed); sampling is cheap and sequential.
    const int num_counts = static_cast<int>(trajectory_counts.size());
    std::vector<OccupancyMeasure> estimates(
        static_cast<std::size_t>(num_counts * num_seeds));
    for (int ci = 0; ci < num_counts; ++ci) {
        for (int seed_i = 0; seed_i < num_seeds; ++seed_i) {
            const std::uint64_t seed =
                derive_seed(options.seed, 1, static_cast<std::uint64_t>(trajectory_counts[ci]),
                            static_cast<std::uint64_t>(seed_i));
            const Demonstrations demos = sample_demonstrations(
                cmdp, expert.policy, trajectory_counts[ci], horizon_t, seed);
            estimates[static_cast<std::size_t>(ci * num_seeds + seed_i)] =
                estimate_occupancy(demos, config.gamma, cmdp.n, cmdp.m);
        }
    }

    struct Cell {
        double policy_error = std::nan("");
        double reward_error = std::nan("");
    };
    const int num_methods = static_cast<int>(methods.size());
    std::vector<Cell> cells(static_cast<std::size_t>(num_counts * num_seeds * num_methods));

    const auto run_cell = [&](int task) {
        const int mi = task % num_methods;
        const int seed_i = (task / num_methods) % num_seeds;
        const int ci = task / (num_methods * num_seeds);
        const Method& method = methods[static_cast<std::size_t>(mi)];
        const RewardClass rc = gridworld_full_class(config, method.kind, method.radius);
        GdaConfig gda;
        gda.eta = options.gda_eta;
        gda.episodes = options.gda_episodes_finite;
        gda.beta = config.beta;
        gda.seed = derive_seed(options.seed, 2, static_cast<std::uint64_t>(task), 0);
        gda.record_every = std::max(1, gda.episodes / 50);
        Cell& cell = cells[static_cast<std::size_t>(task)];
        try {
            const IrlResult result =
                gda_irl(method.constrained ? cmdp : cmdp_free, rc,
                        estimates[static_cast<std::size_t>(ci * num_seeds + seed_i)], gda);
            cell.policy_error = (expert.policy.pi - result.policy.pi).cwiseAbs().sum();
            cell.reward_error = potential_shaping_distance(result.reward, r_expert);
        } catch (const std::exception& e) {
            log_info(std::string("finite-sample cell failed: ") + e.what());
        }
    };
    run_parallel(hardware_jobs(options.jobs), num_counts * num_seeds * num_methods, run_cell);

    FiniteSampleReport report;
    report.version = version_string();
    for (int seed_i = 0; seed_i < num_seeds; ++seed_i) {
        report.seeds.push_back(derive_seed(options.seed, 1, 0, static_cast<std::uint64_t>(seed_i)));
    }

    std::ostringstream csv;
    csv << "method,N,quantile,policy_error,reward_error\n";
    for (int mi = 0; mi < num_methods; ++mi) {
        for (int ci = 0; ci < num_counts; ++ci) {
            std::vector<double> pol;
            std::vector<double> rew;
            for (int seed_i = 0; seed_i < num_seeds; ++seed_i) {
                const Cell& cell =
                    cells[static_cast<std::size_t>((ci * num_seeds + seed_i) * num_methods + mi)];
                if (!std::isnan(cell.policy_error)) {
                    pol.push_back(cell.policy_error);
                    rew.push_back(cell.reward_error);
                }
            }
            if (pol.empty()) continue;
            for (double q : {0.1, 0.5, 0.9}) {
                FiniteSampleRow row;
                row.method = methods[static_cast<std::size_t>(mi)].name;
                row.num_trajectories = trajectory_counts[static_cast<std::size_t>(ci)];
                row.quantile = q;
                row.policy_error = quantile(pol, q);
                row.reward_error = quantile(rew, q);
                report.rows.push_back(row);
                csv << row.method << "," << row.num_trajectories << "," << format_double(q) << ","
                    << format_double(row.policy_error) << "," << format_double(row.reward_error)
                    << "\n";
            }
        }
    }
    write_file(out_dir + "/metrics.csv", csv.str());

    const Json config_json = gridworld_config_to_json(config);
    report.config_hash = config_hash(config_json);
    Json meta;
    meta["config"] = config_json;
    meta["options"] = {{"gda_episodes_finite", options.gda_episodes_finite},
                       {"gda_eta", options.gda_eta},
                       {"solver_tol", options.solver_tol},
                       {"horizon", horizon_t},
                       {"trajectory_counts", trajectory_counts},
                       {"num_seeds", num_seeds},
                       {"seed", options.seed}};
    meta["seeds"] = report.seeds;
    meta["config_hash"] = report.config_hash;
    meta["version"] = report.version;
    write_file(out_dir + "/run_meta.json", meta.dump(2) + "\n");
    return report;
}

}  // namespace cirl
