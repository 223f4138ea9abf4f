#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "iu/errors.hpp"
#include "iu/iu_nets.hpp"
#include "iu/replay.hpp"
#include "iu/reward_lang.hpp"
#include "iu/rng.hpp"

namespace iu::learn {

struct LearnerConfig {
    double gamma = 0.99;
    double lr_actor = 1e-4;
    double lr_critic = 1e-3;
    double tau = 0.001;
    int batch = 64;
    int updates_per_step = 1;
    // no parameter changes until the buffer holds this many transitions
    int warmup = 1000;

    void validate() const;
};

// Actor-critic pair with target copies, replay and the task list. One writer
// thread; evaluation runs on snapshots.
struct IUAgent {
    net::ActorNet actor;
    net::ActorNet actor_target;
    net::CriticNet critic;
    net::CriticNet critic_target;
    replay::ReplayBuffer buffer;
    LearnerConfig config;
    std::vector<reward::TaskSpec> tasks;

    int n_tasks() const { return static_cast<int>(tasks.size()); }

    static IUAgent create(int obs_dim, std::vector<reward::TaskSpec> tasks,
                          const LearnerConfig& cfg, RandomStream& rng,
                          std::size_t replay_capacity = 200000, int actor_width = 200,
                          int critic_width = 400);
};

// Mini-batch in matrix form, one column per sample.
struct BatchView {
    Eigen::MatrixXd s;       // obs_dim x B
    Eigen::MatrixXd a;       // 2 x B
    Eigen::MatrixXd r;       // T x B
    Eigen::MatrixXd s_next;  // obs_dim x B

    static BatchView from(std::span<const replay::Transition> batch, int n_tasks);
};

// delta[j][i] = r_j^i + gamma * Q'_i(s_{j+1}, mu'_i(s_{j+1})) - Q_i(s_j, a_j);
// the same stored action a_j feeds every online Q_i. Returned as batch x T.
Eigen::MatrixXd td_errors(const IUAgent& agent, const BatchView& batch);

// Gradient accumulation only (exposed so tests can finite-difference the
// losses); returns the diagnostic the corresponding update returns.
double critic_grads(IUAgent& agent, const BatchView& batch);
double actor_grads(IUAgent& agent, const BatchView& batch);

// Loss values matching the gradients above (targets detached).
double critic_loss(const IUAgent& agent, const BatchView& batch);
double actor_objective(const IUAgent& agent, const BatchView& batch);

// One Adam step each. The critic step descends on the batch-mean summed
// squared TD error; the actor step ascends the batch-mean summed Q of its own
// actions. Targets are untouched; the actor update leaves critic parameters
// unchanged.
double critic_update(IUAgent& agent, const BatchView& batch);
double actor_update(IUAgent& agent, const BatchView& batch);

struct TrainDiag {
    bool skipped = false;  // buffer below batch/warmup
    double critic_diag = 0.0;
    double actor_diag = 0.0;
};

// sample -> critic_update -> actor_update -> blend both targets.
TrainDiag train_step(IUAgent& agent, RandomStream& rng);

}  // namespace iu::learn
