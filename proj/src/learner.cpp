#include "iu/learner.hpp"

#include <cmath>

namespace iu::learn {

void LearnerConfig::validate() const {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("learner: gamma must be in [0,1)");
    if (!(lr_actor > 0.0) || !(lr_critic > 0.0))
        throw ConfigError("learner: learning rates must be positive");
    if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("learner: tau must be in (0,1]");
    if (batch <= 0) throw ConfigError("learner: batch must be positive");
    if (updates_per_step < 0) throw ConfigError("learner: updates_per_step must be >= 0");
    if (warmup < 0) throw ConfigError("learner: warmup must be >= 0");
}

IUAgent IUAgent::create(int obs_dim, std::vector<reward::TaskSpec> tasks,
                        const LearnerConfig& cfg, RandomStream& rng,
                        std::size_t replay_capacity, int actor_width, int critic_width) {
    cfg.validate();
    if (tasks.empty()) throw ConfigError("IUAgent: need at least one task");
    const int T = static_cast<int>(tasks.size());
    IUAgent a{net::ActorNet::create(obs_dim, T, rng, actor_width),
              net::ActorNet{},
              net::CriticNet::create(obs_dim, T, rng, critic_width),
              net::CriticNet{},
              replay::ReplayBuffer(replay_capacity),
              cfg,
              std::move(tasks)};
    a.actor_target = a.actor;    // targets start as exact copies
    a.critic_target = a.critic;
    return a;
}

BatchView BatchView::from(std::span<const replay::Transition> batch, int n_tasks) {
    if (batch.empty()) throw ConfigError("learner: empty batch");
    const auto B = static_cast<Eigen::Index>(batch.size());
    const auto sd = batch[0].s.size();
    BatchView v;
    v.s.resize(sd, B);
    v.a.resize(2, B);
    v.r.resize(n_tasks, B);
    v.s_next.resize(sd, B);
    for (Eigen::Index j = 0; j < B; ++j) {
        const auto& t = batch[static_cast<std::size_t>(j)];
        if (t.r.size() != n_tasks)
            throw ShapeError("learner: transition reward vector length " +
                             std::to_string(t.r.size()) + " does not match task count " +
                             std::to_string(n_tasks));
        v.s.col(j) = t.s;
        v.a.col(j) = t.a;
        v.r.col(j) = t.r;
        v.s_next.col(j) = t.s_next;
    }
    return v;
}

namespace {

// Q'_i(s', mu'_i(s')) for all tasks, T x B. Only target networks appear here.
Eigen::MatrixXd target_q_next(const IUAgent& agent, const Eigen::MatrixXd& s_next) {
    const std::vector<Eigen::MatrixXd> next_actions =
        net::actor_forward_batch(agent.actor_target, s_next);
    return net::critic_forward_batch(agent.critic_target, s_next, next_actions);
}

}  // namespace

Eigen::MatrixXd td_errors(const IUAgent& agent, const BatchView& batch) {
    if (batch.r.rows() != agent.n_tasks())
        throw ShapeError("td_errors: reward rows do not match task count");
    const Eigen::MatrixXd q_next = target_q_next(agent, batch.s_next);
    const Eigen::MatrixXd q_online =
        net::critic_forward_batch_shared(agent.critic, batch.s, batch.a);
    const Eigen::MatrixXd delta = batch.r + agent.config.gamma * q_next - q_online;  // T x B
    return delta.transpose();
}

double critic_loss(const IUAgent& agent, const BatchView& batch) {
    const Eigen::MatrixXd delta = td_errors(agent, batch);
    const double B = static_cast<double>(batch.s.cols());
    return 0.5 * delta.array().square().sum() / B;
}

double critic_grads(IUAgent& agent, const BatchView& batch) {
    const Eigen::Index B = batch.s.cols();
    const Eigen::MatrixXd q_next = target_q_next(agent, batch.s_next);

    net::CriticBatchCache cache;
    const Eigen::MatrixXd q_online =
        net::critic_forward_batch_shared(agent.critic, batch.s, batch.a, &cache);
    const Eigen::MatrixXd delta = batch.r + agent.config.gamma * q_next - q_online;  // T x B
    if (!delta.allFinite()) throw NumericError("critic update: non-finite TD error");

    // d/dQ of (1/B) sum_j sum_i 0.5 delta^2 with detached targets
    const Eigen::MatrixXd dq = -delta / static_cast<double>(B);
    net::critic_backward_batch(agent.critic, cache, dq);

    return 0.5 * delta.array().square().sum() /
           static_cast<double>(B * agent.n_tasks());
}

double critic_update(IUAgent& agent, const BatchView& batch) {
    const double diag = critic_grads(agent, batch);
    net::adam_step(agent.critic, agent.config.lr_critic);
    return diag;
}

double actor_objective(const IUAgent& agent, const BatchView& batch) {
    const std::vector<Eigen::MatrixXd> actions = net::actor_forward_batch(agent.actor, batch.s);
    const Eigen::MatrixXd q = net::critic_forward_batch(agent.critic, batch.s, actions);
    return q.sum() / static_cast<double>(batch.s.cols());
}

double actor_grads(IUAgent& agent, const BatchView& batch) {
    const Eigen::Index B = batch.s.cols();

    net::ActorBatchCache actor_cache;
    const std::vector<Eigen::MatrixXd> actions =
        net::actor_forward_batch(agent.actor, batch.s, &actor_cache);

    net::CriticBatchCache critic_cache;
    const Eigen::MatrixXd q = net::critic_forward_batch(agent.critic, batch.s, actions, &critic_cache);

    // ascend J = (1/B) sum_j sum_i Q_i; Adam minimizes, so feed -dJ
    const Eigen::MatrixXd dq =
        Eigen::MatrixXd::Constant(agent.n_tasks(), B, -1.0 / static_cast<double>(B));
    const std::vector<Eigen::MatrixXd> d_actions = net::critic_backward_batch(
        agent.critic, critic_cache, dq, /*accumulate_param_grads=*/false);
    net::actor_backward_batch(agent.actor, actor_cache, d_actions);

    for (const auto& da : d_actions)
        if (!da.allFinite()) throw NumericError("actor update: non-finite action gradient");

    return q.sum() / static_cast<double>(B);
}

double actor_update(IUAgent& agent, const BatchView& batch) {
    const double diag = actor_grads(agent, batch);
    net::adam_step(agent.actor, agent.config.lr_actor);
    return diag;
}

TrainDiag train_step(IUAgent& agent, RandomStream& rng) {
    TrainDiag d;
    const std::size_t need =
        std::max<std::size_t>(static_cast<std::size_t>(agent.config.batch),
                              static_cast<std::size_t>(agent.config.warmup));
    if (agent.buffer.size() < need) {
        d.skipped = true;
        return d;
    }
    const std::vector<replay::Transition> sampled =
        agent.buffer.sample(static_cast<std::size_t>(agent.config.batch), rng);
    const BatchView batch = BatchView::from(sampled, agent.n_tasks());
    d.critic_diag = critic_update(agent, batch);
    d.actor_diag = actor_update(agent, batch);
    net::blend_targets(agent.actor_target, agent.actor, agent.config.tau);
    net::blend_targets(agent.critic_target, agent.critic, agent.config.tau);
    return d;
}

}  // namespace iu::learn
