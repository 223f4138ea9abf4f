#include "iu/iu_nets.hpp"

#include <string>

namespace iu::net {

namespace {
constexpr double kFinalInitRange = 3e-3;

void check_task(int task, int n_tasks) {
    if (task < 0 || task >= n_tasks)
        throw ShapeError("task index " + std::to_string(task) + " out of range [0," +
                         std::to_string(n_tasks) + ")");
}
}  // namespace

ActorNet ActorNet::create(int obs_dim, int n_tasks, RandomStream& rng, int width,
                          int action_dim) {
    if (obs_dim <= 0 || n_tasks <= 0 || width <= 0 || action_dim <= 0)
        throw ConfigError("ActorNet: dims and task count must be positive");
    ActorNet a;
    a.obs_dim = obs_dim;
    a.action_dim = action_dim;
    a.n_tasks = n_tasks;
    a.width = width;
    a.trunk = nn::Mlp::create({{obs_dim, width, nn::Activation::Tanh},
                               {width, width, nn::Activation::Tanh}},
                              rng);
    a.heads.reserve(n_tasks);
    for (int i = 0; i < n_tasks; ++i)
        a.heads.push_back(nn::Mlp::create({{width, action_dim, nn::Activation::Tanh}}, rng,
                                          kFinalInitRange));
    return a;
}

CriticNet CriticNet::create(int obs_dim, int n_tasks, RandomStream& rng, int width,
                            int action_dim) {
    if (obs_dim <= 0 || n_tasks <= 0 || width <= 0 || action_dim <= 0)
        throw ConfigError("CriticNet: dims and task count must be positive");
    CriticNet c;
    c.obs_dim = obs_dim;
    c.action_dim = action_dim;
    c.n_tasks = n_tasks;
    c.width = width;
    c.trunk = nn::Mlp::create({{obs_dim, width, nn::Activation::Tanh},
                               {width, width, nn::Activation::Tanh}},
                              rng);
    c.branches.reserve(n_tasks);
    c.heads.reserve(n_tasks);
    for (int i = 0; i < n_tasks; ++i)
        c.branches.push_back(nn::Mlp::create({{action_dim, width, nn::Activation::Tanh}}, rng));
    for (int i = 0; i < n_tasks; ++i)
        c.heads.push_back(nn::Mlp::create({{width, 1, nn::Activation::Linear}}, rng,
                                          kFinalInitRange));
    return c;
}

Eigen::MatrixXd actor_forward(const ActorNet& actor, const Eigen::VectorXd& obs) {
    const Eigen::MatrixXd trunk_out = actor.trunk.forward(obs);
    Eigen::MatrixXd actions(actor.n_tasks, actor.action_dim);
    for (int i = 0; i < actor.n_tasks; ++i)
        actions.row(i) = actor.heads[i].forward(trunk_out).col(0).transpose();
    return actions;
}

Eigen::Vector2d actor_forward_head(const ActorNet& actor, const Eigen::VectorXd& obs, int task) {
    check_task(task, actor.n_tasks);
    const Eigen::MatrixXd trunk_out = actor.trunk.forward(obs);
    return actor.heads[task].forward(trunk_out).col(0);
}

double critic_forward(const CriticNet& critic, const Eigen::VectorXd& obs,
                      const Eigen::Vector2d& action, int task) {
    check_task(task, critic.n_tasks);
    const Eigen::MatrixXd trunk_out = critic.trunk.forward(obs);
    const Eigen::MatrixXd branch_out = critic.branches[task].forward(action);
    const Eigen::MatrixXd junction = (trunk_out + branch_out).array().tanh();
    return critic.heads[task].forward(junction)(0, 0);
}

Eigen::VectorXd critic_forward_all(const CriticNet& critic, const Eigen::VectorXd& obs,
                                   const Eigen::MatrixXd& actions) {
    if (actions.rows() != critic.n_tasks || actions.cols() != critic.action_dim)
        throw ShapeError("critic_forward_all: actions must be T x action_dim");
    const Eigen::MatrixXd trunk_out = critic.trunk.forward(obs);
    Eigen::VectorXd q(critic.n_tasks);
    for (int i = 0; i < critic.n_tasks; ++i) {
        const Eigen::MatrixXd branch_out = critic.branches[i].forward(actions.row(i).transpose());
        const Eigen::MatrixXd junction = (trunk_out + branch_out).array().tanh();
        q(i) = critic.heads[i].forward(junction)(0, 0);
    }
    return q;
}

std::vector<Eigen::MatrixXd> actor_forward_batch(const ActorNet& actor,
                                                 const Eigen::MatrixXd& obs,
                                                 ActorBatchCache* cache) {
    if (cache) cache->heads.assign(actor.n_tasks, nn::ForwardCache{});
    const Eigen::MatrixXd trunk_out =
        actor.trunk.forward(obs, cache ? &cache->trunk : nullptr);
    std::vector<Eigen::MatrixXd> actions;
    actions.reserve(actor.n_tasks);
    for (int i = 0; i < actor.n_tasks; ++i)
        actions.push_back(actor.heads[i].forward(trunk_out, cache ? &cache->heads[i] : nullptr));
    return actions;
}

void actor_backward_batch(ActorNet& actor, const ActorBatchCache& cache,
                          const std::vector<Eigen::MatrixXd>& d_actions) {
    if (static_cast<int>(d_actions.size()) != actor.n_tasks)
        throw ShapeError("actor_backward_batch: need one gradient per head");
    Eigen::MatrixXd d_trunk = Eigen::MatrixXd::Zero(actor.width, cache.trunk.acts.back().cols());
    for (int i = 0; i < actor.n_tasks; ++i)
        d_trunk += actor.heads[i].backward(cache.heads[i], d_actions[i]);
    actor.trunk.backward(cache.trunk, d_trunk);
}

namespace {

Eigen::MatrixXd critic_forward_batch_impl(const CriticNet& critic, const Eigen::MatrixXd& obs,
                                          const std::vector<Eigen::MatrixXd>* per_task,
                                          const Eigen::MatrixXd* shared,
                                          CriticBatchCache* cache) {
    const auto B = obs.cols();
    if (cache) {
        cache->branches.assign(critic.n_tasks, nn::ForwardCache{});
        cache->heads.assign(critic.n_tasks, nn::ForwardCache{});
        cache->junction.assign(critic.n_tasks, Eigen::MatrixXd{});
        cache->trunk_revision = critic.trunk.params.revision;
    }
    const Eigen::MatrixXd trunk_out = critic.trunk.forward(obs, cache ? &cache->trunk : nullptr);
    Eigen::MatrixXd q(critic.n_tasks, B);
    for (int i = 0; i < critic.n_tasks; ++i) {
        const Eigen::MatrixXd& a = per_task ? (*per_task)[i] : *shared;
        if (a.rows() != critic.action_dim || a.cols() != B)
            throw ShapeError("critic_forward_batch: action batch for task " + std::to_string(i) +
                             " must be action_dim x B");
        const Eigen::MatrixXd branch_out =
            critic.branches[i].forward(a, cache ? &cache->branches[i] : nullptr);
        Eigen::MatrixXd junction = (trunk_out + branch_out).array().tanh();
        q.row(i) = critic.heads[i].forward(junction, cache ? &cache->heads[i] : nullptr).row(0);
        if (cache) cache->junction[i] = std::move(junction);
    }
    return q;
}

}  // namespace

Eigen::MatrixXd critic_forward_batch(const CriticNet& critic, const Eigen::MatrixXd& obs,
                                     const std::vector<Eigen::MatrixXd>& actions_per_task,
                                     CriticBatchCache* cache) {
    if (static_cast<int>(actions_per_task.size()) != critic.n_tasks)
        throw ShapeError("critic_forward_batch: need one action batch per task");
    return critic_forward_batch_impl(critic, obs, &actions_per_task, nullptr, cache);
}

Eigen::MatrixXd critic_forward_batch_shared(const CriticNet& critic, const Eigen::MatrixXd& obs,
                                            const Eigen::MatrixXd& actions,
                                            CriticBatchCache* cache) {
    return critic_forward_batch_impl(critic, obs, nullptr, &actions, cache);
}

std::vector<Eigen::MatrixXd> critic_backward_batch(CriticNet& critic, const CriticBatchCache& cache,
                                                   const Eigen::MatrixXd& dq,
                                                   bool accumulate_param_grads) {
    if (dq.rows() != critic.n_tasks)
        throw ShapeError("critic_backward_batch: dq must have one row per task");
    if (cache.trunk_revision != critic.trunk.params.revision)
        throw ShapeError("critic_backward_batch: stale cache");
    const auto B = dq.cols();
    Eigen::MatrixXd d_trunk = Eigen::MatrixXd::Zero(critic.width, B);
    std::vector<Eigen::MatrixXd> d_actions;
    d_actions.reserve(critic.n_tasks);
    for (int i = 0; i < critic.n_tasks; ++i) {
        const Eigen::MatrixXd d_junction =
            critic.heads[i].backward(cache.heads[i], dq.row(i), accumulate_param_grads);
        // tanh junction: gradient through the pointwise add splits identically
        // to trunk and branch
        const Eigen::MatrixXd d_sum =
            d_junction.array() * (1.0 - cache.junction[i].array().square());
        d_trunk += d_sum;
        d_actions.push_back(
            critic.branches[i].backward(cache.branches[i], d_sum, accumulate_param_grads));
    }
    critic.trunk.backward(cache.trunk, d_trunk, accumulate_param_grads);
    return d_actions;
}

void zero_grads(ActorNet& a) {
    nn::zero_grads(a.trunk.params);
    for (auto& h : a.heads) nn::zero_grads(h.params);
}

void zero_grads(CriticNet& c) {
    nn::zero_grads(c.trunk.params);
    for (auto& b : c.branches) nn::zero_grads(b.params);
    for (auto& h : c.heads) nn::zero_grads(h.params);
}

void adam_step(ActorNet& a, double lr, const nn::AdamConfig& cfg) {
    nn::adam_step(a.trunk.params, lr, cfg);
    for (auto& h : a.heads) nn::adam_step(h.params, lr, cfg);
}

void adam_step(CriticNet& c, double lr, const nn::AdamConfig& cfg) {
    nn::adam_step(c.trunk.params, lr, cfg);
    for (auto& b : c.branches) nn::adam_step(b.params, lr, cfg);
    for (auto& h : c.heads) nn::adam_step(h.params, lr, cfg);
}

void blend_targets(ActorNet& target, const ActorNet& online, double tau) {
    if (target.n_tasks != online.n_tasks) throw ShapeError("blend_targets: actor head count mismatch");
    nn::blend_targets(target.trunk.params, online.trunk.params, tau);
    for (int i = 0; i < target.n_tasks; ++i)
        nn::blend_targets(target.heads[i].params, online.heads[i].params, tau);
}

void blend_targets(CriticNet& target, const CriticNet& online, double tau) {
    if (target.n_tasks != online.n_tasks) throw ShapeError("blend_targets: critic head count mismatch");
    nn::blend_targets(target.trunk.params, online.trunk.params, tau);
    for (int i = 0; i < target.n_tasks; ++i) {
        nn::blend_targets(target.branches[i].params, online.branches[i].params, tau);
        nn::blend_targets(target.heads[i].params, online.heads[i].params, tau);
    }
}

void put_actor(ckpt::Container& c, const std::string& prefix, const ActorNet& a) {
    Eigen::MatrixXd meta(4, 1);
    meta << a.obs_dim, a.action_dim, a.n_tasks, a.width;
    c.put_matrix(prefix + ".meta", meta);
    ckpt::put_params(c, prefix + ".trunk", a.trunk.params);
    for (int i = 0; i < a.n_tasks; ++i)
        ckpt::put_params(c, prefix + ".head" + std::to_string(i), a.heads[i].params);
}

ActorNet get_actor(const ckpt::Container& c, const std::string& prefix) {
    const Eigen::MatrixXd meta = c.get_matrix(prefix + ".meta");
    ActorNet a;
    a.obs_dim = static_cast<int>(meta(0));
    a.action_dim = static_cast<int>(meta(1));
    a.n_tasks = static_cast<int>(meta(2));
    a.width = static_cast<int>(meta(3));
    a.trunk.spec = {{a.obs_dim, a.width, nn::Activation::Tanh},
                    {a.width, a.width, nn::Activation::Tanh}};
    a.trunk.params = ckpt::get_params(c, prefix + ".trunk", a.trunk.spec);
    for (int i = 0; i < a.n_tasks; ++i) {
        nn::Mlp head;
        head.spec = {{a.width, a.action_dim, nn::Activation::Tanh}};
        head.params = ckpt::get_params(c, prefix + ".head" + std::to_string(i), head.spec);
        a.heads.push_back(std::move(head));
    }
    return a;
}

void put_critic(ckpt::Container& c, const std::string& prefix, const CriticNet& n) {
    Eigen::MatrixXd meta(4, 1);
    meta << n.obs_dim, n.action_dim, n.n_tasks, n.width;
    c.put_matrix(prefix + ".meta", meta);
    ckpt::put_params(c, prefix + ".trunk", n.trunk.params);
    for (int i = 0; i < n.n_tasks; ++i) {
        ckpt::put_params(c, prefix + ".branch" + std::to_string(i), n.branches[i].params);
        ckpt::put_params(c, prefix + ".head" + std::to_string(i), n.heads[i].params);
    }
}

CriticNet get_critic(const ckpt::Container& c, const std::string& prefix) {
    const Eigen::MatrixXd meta = c.get_matrix(prefix + ".meta");
    CriticNet n;
    n.obs_dim = static_cast<int>(meta(0));
    n.action_dim = static_cast<int>(meta(1));
    n.n_tasks = static_cast<int>(meta(2));
    n.width = static_cast<int>(meta(3));
    n.trunk.spec = {{n.obs_dim, n.width, nn::Activation::Tanh},
                    {n.width, n.width, nn::Activation::Tanh}};
    n.trunk.params = ckpt::get_params(c, prefix + ".trunk", n.trunk.spec);
    for (int i = 0; i < n.n_tasks; ++i) {
        nn::Mlp branch;
        branch.spec = {{n.action_dim, n.width, nn::Activation::Tanh}};
        branch.params = ckpt::get_params(c, prefix + ".branch" + std::to_string(i), branch.spec);
        n.branches.push_back(std::move(branch));
        nn::Mlp head;
        head.spec = {{n.width, 1, nn::Activation::Linear}};
        head.params = ckpt::get_params(c, prefix + ".head" + std::to_string(i), head.spec);
        n.heads.push_back(std::move(head));
    }
    return n;
}

}  // namespace iu::net
