#pragma once

#include <Eigen/Dense>
#include <vector>

#include "iu/checkpoint.hpp"
#include "iu/nn_core.hpp"
#include "iu/rng.hpp"

namespace iu::net {

// Multi-head actor: two shared tanh layers, then one non-shared tanh layer
// per task emitting the 2-d action. Every head reads the same trunk
// activations, so head outputs always lie in (-1, 1).
struct ActorNet {
    int obs_dim = 0;
    int action_dim = 2;
    int n_tasks = 0;
    int width = 200;

    nn::Mlp trunk;
    std::vector<nn::Mlp> heads;

    static ActorNet create(int obs_dim, int n_tasks, RandomStream& rng, int width = 200,
                           int action_dim = 2);
};

// Critic: two shared tanh layers over the observation; per task, a tanh
// branch maps the action to trunk width, is added pointwise to the trunk
// output, passed through tanh, and reduced to a scalar Q by a non-shared
// linear head. Q^i depends on the action only through branch i.
struct CriticNet {
    int obs_dim = 0;
    int action_dim = 2;
    int n_tasks = 0;
    int width = 400;

    nn::Mlp trunk;
    std::vector<nn::Mlp> branches;  // action -> width, tanh
    std::vector<nn::Mlp> heads;     // width -> 1, linear

    static CriticNet create(int obs_dim, int n_tasks, RandomStream& rng, int width = 400,
                            int action_dim = 2);
};

// ---- single-observation evaluation ----

// Row i is head i's action for this observation. T x action_dim.
Eigen::MatrixXd actor_forward(const ActorNet& actor, const Eigen::VectorXd& obs);

Eigen::Vector2d actor_forward_head(const ActorNet& actor, const Eigen::VectorXd& obs, int task);

double critic_forward(const CriticNet& critic, const Eigen::VectorXd& obs,
                      const Eigen::Vector2d& action, int task);

// Component i equals critic_forward(critic, obs, actions.row(i), i); the
// observation trunk is evaluated once. actions is T x action_dim.
Eigen::VectorXd critic_forward_all(const CriticNet& critic, const Eigen::VectorXd& obs,
                                   const Eigen::MatrixXd& actions);

// ---- batched training path (one column per sample) ----

struct ActorBatchCache {
    nn::ForwardCache trunk;
    std::vector<nn::ForwardCache> heads;
};

// Returns one action_dim x B matrix per head.
std::vector<Eigen::MatrixXd> actor_forward_batch(const ActorNet& actor,
                                                 const Eigen::MatrixXd& obs,
                                                 ActorBatchCache* cache = nullptr);

// Accumulates parameter gradients of <d_actions[i], head_i output> summed
// over heads into trunk and head stores.
void actor_backward_batch(ActorNet& actor, const ActorBatchCache& cache,
                          const std::vector<Eigen::MatrixXd>& d_actions);

struct CriticBatchCache {
    nn::ForwardCache trunk;
    std::vector<nn::ForwardCache> branches;
    std::vector<Eigen::MatrixXd> junction;  // tanh(trunk + branch), width x B, per task
    std::vector<nn::ForwardCache> heads;
    std::uint64_t trunk_revision = 0;
};

// Per-task action batches (each action_dim x B). Row i of the result holds
// Q^i for the batch.
Eigen::MatrixXd critic_forward_batch(const CriticNet& critic, const Eigen::MatrixXd& obs,
                                     const std::vector<Eigen::MatrixXd>& actions_per_task,
                                     CriticBatchCache* cache = nullptr);

// Same stored action evaluated by every task's critic.
Eigen::MatrixXd critic_forward_batch_shared(const CriticNet& critic, const Eigen::MatrixXd& obs,
                                            const Eigen::MatrixXd& actions,
                                            CriticBatchCache* cache = nullptr);

// Backward of <dq, Q> through heads, junction, branches and trunk. Returns
// the gradient with respect to each task's action batch. Parameter grads are
// accumulated only when accumulate_param_grads is set (the actor update needs
// action gradients without touching critic grads).
std::vector<Eigen::MatrixXd> critic_backward_batch(CriticNet& critic, const CriticBatchCache& cache,
                                                   const Eigen::MatrixXd& dq,
                                                   bool accumulate_param_grads = true);

// ---- maintenance ----

void zero_grads(ActorNet& a);
void zero_grads(CriticNet& c);
void adam_step(ActorNet& a, double lr, const nn::AdamConfig& cfg = {});
void adam_step(CriticNet& c, double lr, const nn::AdamConfig& cfg = {});
void blend_targets(ActorNet& target, const ActorNet& online, double tau);
void blend_targets(CriticNet& target, const CriticNet& online, double tau);

void put_actor(ckpt::Container& c, const std::string& prefix, const ActorNet& a);
ActorNet get_actor(const ckpt::Container& c, const std::string& prefix);
void put_critic(ckpt::Container& c, const std::string& prefix, const CriticNet& n);
CriticNet get_critic(const ckpt::Container& c, const std::string& prefix);

}  // namespace iu::net
