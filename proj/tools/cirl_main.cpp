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
#include "cirl/irl.hpp"
#include "cirl/logging.hpp"
#include "cirl/occupancy.hpp"
#include "cirl/serialization.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace cirl;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNoConvergence = 2;

void write_json_file(const Json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open output file: " + path);
    out << j.dump(2) << "\n";
}

GridworldConfig load_gridworld_config(const std::string& path) {
    if (path.empty()) return GridworldConfig{};
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    Json j;
    in >> j;
    return gridworld_config_from_json(j);
}

struct SolveArgs {
    std::string env;
    std::string out;
    std::string config_path;
    double beta = 1.0;
    double tol = 1e-8;
    int max_iter = 200000;
    int dual_max_iter = 2000000;
    bool unconstrained = false;
    bool json = false;
};

int run_solve(SolveArgs args) {
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in) throw ValidationError("cannot open solver config: " + args.config_path);
        Json j;
        in >> j;
        const SolverConfig config = solver_config_from_json(j);
        args.beta = config.beta;
        args.tol = config.tol;
        args.max_iter = config.max_iter;
        args.dual_max_iter = config.dual_max_iter;
    }
    Cmdp cmdp = load_cmdp(args.env);
    if (!cmdp.reward) throw ValidationError("solve: the CMDP file carries no reward r");
    if (args.unconstrained) cmdp = cmdp.without_constraints();

    Json out;
    if (cmdp.num_constraints() > 0) {
        const ConstrainedSolution sol =
            solve_rl_constrained(cmdp, *cmdp.reward, args.beta, args.tol, args.dual_max_iter);
        out = constrained_solution_to_json(sol);
        out["kind"] = "constrained";
        if (!args.json) {
            std::printf("constrained solve: %d dual iterations, duality gap %.3e\n",
                        sol.iterations, sol.duality_gap);
            std::printf("dual xi:");
            for (Index i = 0; i < sol.dual.size(); ++i) std::printf(" %.6f", sol.dual[i]);
            std::printf("\noccupancy mass %.9f\n", sol.occupancy.total_mass());
        }
    } else {
        const SoftSolution sol =
            soft_value_iteration(cmdp, *cmdp.reward, args.beta, args.tol, args.max_iter);
        if (!sol.converged) {
            throw ConvergenceError("solve: soft value iteration hit the iteration cap");
        }
        out = soft_solution_to_json(sol);
        out["kind"] = "soft";
        if (!args.json) {
            std::printf("soft solve: %d sweeps, residual %.3e\n", sol.iterations, sol.residual);
        }
    }
    if (args.json) std::printf("%s\n", out.dump(2).c_str());
    if (!args.out.empty()) write_json_file(out, args.out);
    return kExitOk;
}

struct IrlArgs {
    std::string env;
    std::string features;
    std::string demos;
    std::string expert_occupancy;
    bool expert_exact = false;
    std::string out;
    GdaConfig gda;
    double solve_tol = 1e-8;
    bool json = false;
};

int run_irl(const IrlArgs& args) {
    const Cmdp cmdp = load_cmdp(args.env);
    const RewardClass rc = load_reward_class(args.features, cmdp.n, cmdp.m);

    OccupancyMeasure mu_expert;
    if (!args.demos.empty()) {
        const Demonstrations demos = load_demonstrations(args.demos);
        mu_expert = estimate_occupancy(demos, cmdp.gamma, cmdp.n, cmdp.m);
    } else if (!args.expert_occupancy.empty()) {
        std::ifstream in(args.expert_occupancy);
        if (!in) throw ValidationError("cannot open occupancy file: " + args.expert_occupancy);
        Json j;
        in >> j;
        mu_expert = occupancy_from_json(j);
    } else if (args.expert_exact) {
        if (!cmdp.reward) {
            throw ValidationError("--expert-exact needs a reward in the CMDP file");
        }
        mu_expert = solve_rl_constrained(cmdp, *cmdp.reward, args.gda.beta, args.solve_tol)
                        .occupancy;
    } else {
        throw ValidationError("irl: provide --demos, --expert-occupancy or --expert-exact");
    }

    const IrlResult result = gda_irl(cmdp, rc, mu_expert, args.gda);
    const Json out = irl_result_to_json(result);
    if (args.json) std::printf("%s\n", out.dump(2).c_str());
    if (!args.out.empty()) {
        std::filesystem::create_directories(args.out);
        write_json_file(out, args.out + "/result.json");
        save_trace_csv(result, args.out + "/trace.csv");
        if (!args.json) {
            std::printf("wrote %s/result.json and %s/trace.csv\n", args.out.c_str(),
                        args.out.c_str());
        }
    }
    if (!args.json && !result.trace.empty()) {
        std::printf("terminal ipm distance %.3e, max violation %.3e\n",
                    result.trace.back().ipm, result.trace.back().max_violation);
    }
    return kExitOk;
}

struct IdentifyArgs {
    std::string env;
    std::string features;
    std::string reward;
    std::string occupancy;
    std::string out;
    double beta = 1.0;
    double tol = tol::active_default;
    bool json = false;
};

int run_identify(const IdentifyArgs& args) {
    const Cmdp cmdp = load_cmdp(args.env);
    const RewardClass rc = load_reward_class(args.features, cmdp.n, cmdp.m);
    const IdentifiabilityReport report = rank_condition(rc, cmdp);
    Json out;
    out["ranks"] = identifiability_report_to_json(report);
    out["condition_met"] = report.condition_met;

    if (!args.reward.empty() || !args.occupancy.empty()) {
        if (args.reward.empty() || args.occupancy.empty()) {
            throw ValidationError("identify: --reward and --occupancy must be given together");
        }
        std::ifstream rin(args.reward);
        if (!rin) throw ValidationError("cannot open reward file: " + args.reward);
        Json rj;
        rin >> rj;
        Vector r(cmdp.num_state_actions());
        if (!rj.is_array() || static_cast<Index>(rj.size()) != r.size()) {
            throw ValidationError("identify: reward file must be a flat n*m array");
        }
        for (Index i = 0; i < r.size(); ++i) r[i] = rj[static_cast<std::size_t>(i)].get<double>();

        std::ifstream min(args.occupancy);
        if (!min) throw ValidationError("cannot open occupancy file: " + args.occupancy);
        Json mj;
        min >> mj;
        const OccupancyMeasure mu = occupancy_from_json(mj);

        const ActiveSets sets = active_sets(cmdp, mu, args.tol);
        out["active_sets"] = {{"safety", sets.safety_active}, {"nonneg", sets.nonneg_active}};
        out["membership"] =
            reward_in_solution_cone(cmdp, mu, r, Regularizer::entropy(args.beta), args.tol);
    }

    if (args.json) std::printf("%s\n", out.dump(2).c_str());
    if (!args.out.empty()) write_json_file(out, args.out);
    if (!args.json) {
        std::printf("condition_met=%s (rank phi %lld + rank xi %lld vs joint %lld)\n",
                    report.condition_met ? "true" : "false",
                    static_cast<long long>(report.rank_phi),
                    static_cast<long long>(report.rank_xi),
                    static_cast<long long>(report.rank_joint));
        if (out.contains("membership")) {
            std::printf("membership=%s\n", out["membership"].get<bool>() ? "true" : "false");
        }
    }
    return kExitOk;
}

int run_gridworld_gen(const std::string& config_path, const std::string& out_dir) {
    const GridworldConfig config = load_gridworld_config(config_path);
    const Cmdp cmdp = build_gridworld(config);
    std::filesystem::create_directories(out_dir);
    save_cmdp(cmdp, out_dir + "/grid.json");
    write_json_file(gridworld_config_to_json(config), out_dir + "/config.json");

    const auto dump_class = [&](const RewardClass& rc, const std::string& name) {
        write_json_file(reward_class_to_json(rc), out_dir + "/" + name);
    };
    dump_class(gridworld_boundary_class(config, NormKind::l2, 10.0), "R1.json");
    dump_class(gridworld_full_class(config, NormKind::l2, 10.0), "R2.json");
    dump_class(gridworld_full_class(config, NormKind::l1, 1.0), "R2_l1.json");
    dump_class(gridworld_full_class(config, NormKind::l2, 1.0 / std::sqrt(2.0)), "R2_l2.json");
    std::printf("wrote grid.json, config.json and the feature files to %s\n", out_dir.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tabular constrained-MDP and constrained-IRL toolkit"};
    app.require_subcommand(1);

    // solve
    SolveArgs solve_args;
    CLI::App* solve = app.add_subcommand("solve", "solve the forward (C)MDP problem");
    solve->add_option("--env", solve_args.env, "CMDP JSON file")->required();
    solve->add_option("--solver-config", solve_args.config_path,
                      "SolverConfig JSON; takes precedence over the individual flags");
    solve->add_option("--beta", solve_args.beta, "entropy regularization weight");
    solve->add_option("--tol", solve_args.tol, "solver tolerance");
    solve->add_option("--max-iter", solve_args.max_iter, "soft value iteration cap");
    solve->add_option("--dual-max-iter", solve_args.dual_max_iter, "dual ascent cap");
    solve->add_flag("--unconstrained", solve_args.unconstrained, "drop the safety constraints");
    solve->add_option("--out", solve_args.out, "write the solution JSON here");
    solve->add_flag("--json", solve_args.json, "print machine-parsable JSON on stdout");

    // irl
    IrlArgs irl_args;
    CLI::App* irl = app.add_subcommand("irl", "recover a reward from expert data");
    irl->add_option("--env", irl_args.env, "CMDP JSON file")->required();
    irl->add_option("--features", irl_args.features, "reward class JSON file")->required();
    irl->add_option("--demos", irl_args.demos, "demonstrations JSON-lines file");
    irl->add_option("--expert-occupancy", irl_args.expert_occupancy,
                    "expert occupancy JSON file");
    irl->add_flag("--expert-exact", irl_args.expert_exact,
                  "solve the CMDP's own reward for the expert occupancy");
    irl->add_option("--eta", irl_args.gda.eta, "learning rate");
    irl->add_option("--episodes", irl_args.gda.episodes, "episode budget");
    irl->add_option("--beta", irl_args.gda.beta, "entropy regularization weight");
    irl->add_option("--seed", irl_args.gda.seed, "seed recorded with the run");
    irl->add_option("--record-every", irl_args.gda.record_every, "trace stride");
    irl->add_option("--npg-eta", irl_args.gda.npg_eta,
                    "policy step size (default (1-gamma)/beta)");
    irl->add_option("--tol", irl_args.solve_tol, "expert solve tolerance");
    irl->add_option("--out", irl_args.out, "output directory");
    irl->add_flag("--json", irl_args.json, "print machine-parsable JSON on stdout");

    // identify
    IdentifyArgs identify_args;
    CLI::App* identify = app.add_subcommand("identify", "identifiability analysis");
    identify->add_option("--env", identify_args.env, "CMDP JSON file")->required();
    identify->add_option("--features", identify_args.features, "reward class JSON file")
        ->required();
    identify->add_option("--reward", identify_args.reward,
                         "flat n*m reward JSON array for the membership test");
    identify->add_option("--occupancy", identify_args.occupancy,
                         "occupancy JSON file for the membership test");
    identify->add_option("--beta", identify_args.beta, "entropy regularization weight");
    identify->add_option("--tol", identify_args.tol, "active-set tolerance");
    identify->add_option("--out", identify_args.out, "write the report JSON here");
    identify->add_flag("--json", identify_args.json, "print machine-parsable JSON on stdout");

    // gridworld-gen
    std::string gen_config;
    std::string gen_out = "gridworld";
    CLI::App* gen = app.add_subcommand("gridworld-gen", "emit the gridworld CMDP and features");
    gen->add_option("--config", gen_config, "gridworld config JSON (defaults when omitted)");
    gen->add_option("--out", gen_out, "output directory");

    // experiment-generalization
    std::string exp_gen_config;
    std::string exp_gen_out = "generalization";
    ExperimentOptions exp_gen_options;
    CLI::App* exp_gen =
        app.add_subcommand("experiment-generalization", "reward-transfer study");
    exp_gen->add_option("--config", exp_gen_config, "gridworld config JSON");
    exp_gen->add_option("--out", exp_gen_out, "output directory")->required();
    exp_gen->add_option("--episodes", exp_gen_options.gda_episodes, "GDA episode budget");
    exp_gen->add_option("--eta", exp_gen_options.gda_eta, "GDA learning rate");
    exp_gen->add_option("--tol", exp_gen_options.solver_tol, "expert solve tolerance");
    exp_gen->add_option("--jobs", exp_gen_options.jobs, "worker threads (0 = cores)");
    exp_gen->add_option("--seed", exp_gen_options.seed, "base seed");

    // experiment-finite-sample
    std::string exp_fs_config;
    std::string exp_fs_out = "finite_sample";
    std::vector<int> exp_fs_counts = {10, 100, 1000};
    int exp_fs_horizon = 1000;
    int exp_fs_seeds = 10;
    ExperimentOptions exp_fs_options;
    CLI::App* exp_fs =
        app.add_subcommand("experiment-finite-sample", "sample-complexity study");
    exp_fs->add_option("--config", exp_fs_config, "gridworld config JSON");
    exp_fs->add_option("--out", exp_fs_out, "output directory")->required();
    exp_fs->add_option("--counts", exp_fs_counts, "trajectory counts")->delimiter(',');
    exp_fs->add_option("--horizon", exp_fs_horizon, "trajectory length T");
    exp_fs->add_option("--seeds", exp_fs_seeds, "number of seeds");
    exp_fs->add_option("--episodes", exp_fs_options.gda_episodes_finite, "GDA episode budget");
    exp_fs->add_option("--eta", exp_fs_options.gda_eta, "GDA learning rate");
    exp_fs->add_option("--jobs", exp_fs_options.jobs, "worker threads (0 = cores)");
    exp_fs->add_option("--seed", exp_fs_options.seed, "base seed");

    // sample-size
    double ss_eps = 0.0;
    double ss_delta = 0.0;
    double ss_r = 1.0;
    long long ss_d = 1;
    double ss_gamma = 0.9;
    bool ss_json = false;
    CLI::App* ss = app.add_subcommand("sample-size", "finite-sample prescription (N, T)");
    ss->add_option("--eps", ss_eps, "target suboptimality")->required();
    ss->add_option("--delta", ss_delta, "failure probability")->required();
    ss->add_option("--R", ss_r, "feature bound R");
    ss->add_option("--d", ss_d, "feature dimension");
    ss->add_option("--gamma", ss_gamma, "discount factor");
    ss->add_flag("--json", ss_json, "print machine-parsable JSON on stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (solve->parsed()) return run_solve(solve_args);
        if (irl->parsed()) {
            irl_args.gda.validate();
            return run_irl(irl_args);
        }
        if (identify->parsed()) return run_identify(identify_args);
        if (gen->parsed()) return run_gridworld_gen(gen_config, gen_out);
        if (exp_gen->parsed()) {
            const GridworldConfig config = load_gridworld_config(exp_gen_config);
            run_generalization_experiment(config, exp_gen_out, exp_gen_options);
            std::printf("wrote the generalization report to %s\n", exp_gen_out.c_str());
            return kExitOk;
        }
        if (exp_fs->parsed()) {
            const GridworldConfig config = load_gridworld_config(exp_fs_config);
            run_finite_sample_experiment(config, exp_fs_counts, exp_fs_horizon, exp_fs_seeds,
                                         exp_fs_out, exp_fs_options);
            std::printf("wrote the finite-sample report to %s\n", exp_fs_out.c_str());
            return kExitOk;
        }
        if (ss->parsed()) {
            const SampleSize s = sample_size(ss_eps, ss_delta, ss_r, ss_d, ss_gamma);
            if (ss_json) {
                std::printf("%s\n",
                            Json{{"N", s.num_trajectories}, {"T", s.horizon}}.dump().c_str());
            } else {
                std::printf("N=%lld T=%lld\n", s.num_trajectories, s.horizon);
            }
            return kExitOk;
        }
    } catch (const ConvergenceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNoConvergence;
    } catch (const Json::parse_error& e) {
        std::fprintf(stderr, "error: malformed JSON: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    }
    return kExitValidation;
}
