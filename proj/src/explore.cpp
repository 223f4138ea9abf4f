#include "iu/explore.hpp"

#include <cmath>

namespace iu::explore {

OUNoise::OUNoise(const OUParams& p) : params_(p), x_(p.mu) {
    if (!(p.theta > 0.0)) throw ConfigError("OU noise: theta must be > 0");
    if (!(p.sigma >= 0.0)) throw ConfigError("OU noise: sigma must be >= 0");
    if (!(p.dt > 0.0)) throw ConfigError("OU noise: dt must be > 0");
}

void OUNoise::reset() { x_ = params_.mu; }

Eigen::Vector2d OUNoise::step(RandomStream& rng) {
    const double root_dt = std::sqrt(params_.dt);
    Eigen::Vector2d eps(rng.gauss(), rng.gauss());
    x_ += params_.theta * (params_.mu - x_) * params_.dt + params_.sigma * root_dt * eps;
    return x_;
}

Eigen::Vector2d behavior_action(const net::ActorNet& actor, const Eigen::VectorXd& obs,
                                int intentional, OUNoise& noise, RandomStream& rng) {
    if (intentional < 0 || intentional >= actor.n_tasks)
        throw ShapeError("behavior_action: intentional task index out of range");
    Eigen::Vector2d a = actor_forward_head(actor, obs, intentional) + noise.step(rng);
    return a.cwiseMax(-1.0).cwiseMin(1.0);
}

}  // namespace iu::explore
