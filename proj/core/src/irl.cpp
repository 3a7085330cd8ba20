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

#include "cirl/irl.hpp"

#include "cirl/forward.hpp"
#include "cirl/numerics.hpp"
#include "cirl/occupancy.hpp"

#include <cmath>
#include <sstream>

namespace cirl {

void RewardClass::validate() const {
    if (phi.cols() < 1) throw ValidationError("RewardClass: need at least one feature");
    if (norm_kind != NormKind::unbounded && !(radius > 0.0)) {
        throw ValidationError("RewardClass: radius must be positive for bounded classes");
    }
}

void Demonstrations::validate(Index n, Index m) const {
    if (trajectories.empty()) throw ValidationError("Demonstrations: empty data set");
    const std::size_t len = static_cast<std::size_t>(horizon) + 1;
    for (const auto& traj : trajectories) {
        if (traj.size() != len) {
            throw ValidationError("Demonstrations: trajectories must share one length");
        }
        for (const auto& [s, a] : traj) {
            if (s < 0 || s >= n || a < 0 || a >= m) {
                throw ValidationError("Demonstrations: state or action index out of range");
            }
        }
    }
}

void GdaConfig::validate() const {
    if (!(eta > 0.0)) throw ValidationError("GdaConfig: eta must be positive");
    if (episodes < 1) throw ValidationError("GdaConfig: episodes must be at least 1");
    if (!(beta > 0.0)) throw ValidationError("GdaConfig: beta must be positive");
    if (record_every < 1) throw ValidationError("GdaConfig: record_every must be at least 1");
}

OccupancyMeasure estimate_occupancy(const Demonstrations& demos, double gamma, Index n,
                                    Index m) {
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw ValidationError("estimate_occupancy: gamma must lie in (0,1)");
    }
    demos.validate(n, m);
    Vector mu = Vector::Zero(n * m);
    for (const auto& traj : demos.trajectories) {
        double weight = 1.0;
        for (const auto& [s, a] : traj) {
            mu[sa_index(n, s, a)] += weight;
            weight *= gamma;
        }
    }
    mu *= (1.0 - gamma) / static_cast<double>(demos.trajectories.size());
    return OccupancyMeasure(n, m, std::move(mu));
}

double ipm_distance(const RewardClass& reward_class, const OccupancyMeasure& mu,
                    const OccupancyMeasure& mu_ref) {
    if (mu.mu.size() != mu_ref.mu.size() || mu.mu.size() != reward_class.phi.rows()) {
        throw ValidationError("ipm_distance: dimension mismatch");
    }
    const Vector diff = reward_class.phi.transpose() * (mu.mu - mu_ref.mu);
    switch (reward_class.norm_kind) {
        case NormKind::l1:
            return reward_class.radius * diff.cwiseAbs().maxCoeff();
        case NormKind::l2:
            return reward_class.radius * diff.norm();
        case NormKind::unbounded:
            break;
    }
    throw ValidationError(
        "ipm_distance: the unbounded class induces a characteristic function; "
        "use unbounded_ipm_verdict");
}

IpmVerdict unbounded_ipm_verdict(const OccupancyMeasure& mu, const OccupancyMeasure& mu_ref) {
    if (mu.mu.size() != mu_ref.mu.size()) {
        throw ValidationError("unbounded_ipm_verdict: dimension mismatch");
    }
    const double diff = (mu.mu - mu_ref.mu).cwiseAbs().maxCoeff();
    return diff <= 1e-12 ? IpmVerdict::equal : IpmVerdict::unequal;
}

Policy npg_step(const Cmdp& cmdp, const Policy& policy, const Vector& r, double beta,
                double eta) {
    if (policy.num_states() != cmdp.n || policy.num_actions() != cmdp.m) {
        throw ValidationError("npg_step: policy dimensions disagree with the CMDP");
    }
    if (policy.pi.minCoeff() <= 0.0) {
        throw ValidationError("npg_step: policy must be strictly positive");
    }
    const double eta_max = (1.0 - cmdp.gamma) / beta;
    if (!(eta > 0.0) || eta > eta_max * (1.0 + 1e-12)) {
        throw ValidationError("npg_step: eta must lie in (0, (1-gamma)/beta]");
    }

    const Vector q = detail::soft_policy_q_values(cmdp, policy, r, beta);
    const double retain = 1.0 - eta * beta / (1.0 - cmdp.gamma);
    const double q_scale = eta / (1.0 - cmdp.gamma);

    Policy next;
    next.pi = Matrix(cmdp.n, cmdp.m);
    Vector logits(cmdp.m);
    for (Index s = 0; s < cmdp.n; ++s) {
        for (Index a = 0; a < cmdp.m; ++a) {
            logits[a] = retain * std::log(policy.pi(s, a)) +
                        q_scale * q[sa_index(cmdp.n, s, a)];
        }
        const double mx = logits.maxCoeff();
        double z = 0.0;
        for (Index a = 0; a < cmdp.m; ++a) {
            logits[a] = std::exp(logits[a] - mx);
            z += logits[a];
        }
        next.pi.row(s) = logits.transpose() / z;
    }
    return next;
}

IrlResult gda_irl(const Cmdp& cmdp, const RewardClass& reward_class,
                  const OccupancyMeasure& mu_expert, const GdaConfig& config) {
    reward_class.validate();
    config.validate();
    if (reward_class.norm_kind == NormKind::unbounded) {
        throw ValidationError("gda_irl: needs a bounded reward class");
    }
    if (mu_expert.mu.size() != cmdp.num_state_actions()) {
        throw ValidationError("gda_irl: expert occupancy dimension mismatch");
    }

    const Index d = reward_class.dim();
    const Index k = cmdp.num_constraints();
    const double npg_eta = config.npg_eta > 0.0 ? config.npg_eta
                                                : (1.0 - cmdp.gamma) / config.beta;

    Policy policy = Policy::uniform(cmdp.n, cmdp.m);
    Vector w = Vector::Zero(d);
    Vector xi = Vector::Zero(k);

    const auto project_w = [&](const Vector& v) {
        if (reward_class.norm_kind == NormKind::l1) {
            return project_l1_ball(v, reward_class.radius);
        }
        const double norm = v.norm();
        if (norm <= reward_class.radius) return v;
        return Vector((reward_class.radius / norm) * v);
    };

    IrlResult result;
    OccupancyMeasure mu;
    const Regularizer reg = Regularizer::entropy(config.beta);
    for (int episode = 1; episode <= config.episodes; ++episode) {
        Vector r = reward_class.phi * w;
        if (k > 0) r -= cmdp.psi * xi;
        policy = npg_step(cmdp, policy, r, config.beta, npg_eta);
        mu = occupancy_from_policy(cmdp, policy);

        const Vector feature_gap = reward_class.phi.transpose() * (mu.mu - mu_expert.mu);
        w = project_w(w - config.eta * feature_gap);
        Vector slack(0);
        if (k > 0) {
            slack = cmdp.b - cmdp.psi.transpose() * mu.mu;
            xi = project_nonneg(xi - config.eta * slack);
        }

        const double lagrangian = w.dot(feature_gap) - regularizer_value(mu, reg) +
                                  (k > 0 ? xi.dot(slack) : 0.0);
        if (std::abs(lagrangian) > 1e6) {
            std::ostringstream msg;
            msg << "gda_irl: Lagrangian magnitude " << std::abs(lagrangian)
                << " exceeded the divergence guard at episode " << episode;
            throw ConvergenceError(msg.str());
        }
        if (episode % config.record_every == 0 || episode == config.episodes) {
            TracePoint point;
            point.episode = episode;
            point.ipm = ipm_distance(reward_class, mu, mu_expert);
            point.max_violation = k > 0 ? project_nonneg(-slack).maxCoeff() : 0.0;
            point.lagrangian = lagrangian;
            result.trace.push_back(point);
        }
    }

    result.weights = w;
    result.reward = reward_class.phi * w;
    result.dual = xi;
    result.policy = policy;
    result.occupancy = mu;
    return result;
}

SampleSize sample_size(double epsilon, double delta, double feature_bound_R, Index d,
                       double gamma) {
    if (!(feature_bound_R > 0.0)) throw ValidationError("sample_size: R must be positive");
    if (!(epsilon > 0.0 && epsilon <= 8.0 * feature_bound_R)) {
        throw ValidationError("sample_size: need 0 < epsilon <= 8R");
    }
    if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("sample_size: delta in (0,1)");
    if (d < 1) throw ValidationError("sample_size: d must be at least 1");
    if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("sample_size: gamma in (0,1)");

    SampleSize out;
    const double n_real = 32.0 * feature_bound_R * feature_bound_R / (epsilon * epsilon) *
                          std::log(2.0 * static_cast<double>(d) / delta);
    out.num_trajectories = static_cast<long long>(std::ceil(n_real));
    const double t_real = std::log(epsilon / (8.0 * feature_bound_R)) / std::log(gamma);
    out.horizon = static_cast<long long>(std::ceil(t_real));
    return out;
}

}  // namespace cirl
