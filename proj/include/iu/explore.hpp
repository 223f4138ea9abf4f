#pragma once

#include <Eigen/Dense>

#include "iu/errors.hpp"
#include "iu/iu_nets.hpp"
#include "iu/rng.hpp"

namespace iu::explore {

struct OUParams {
    double theta = 0.15;   // mean reversion rate
    double sigma = 0.2;    // diffusion
    double dt = 1.0;       // in control-step units
    Eigen::Vector2d mu = Eigen::Vector2d::Zero();  // long-run mean
};

// Temporally correlated exploration noise:
//   x' = x + theta * (mu - x) * dt + sigma * sqrt(dt) * eps
class OUNoise {
public:
    explicit OUNoise(const OUParams& p);

    // Back to the long-run mean; called at episode starts.
    void reset();

    Eigen::Vector2d step(RandomStream& rng);

    const Eigen::Vector2d& value() const { return x_; }
    void set_value(const Eigen::Vector2d& x) { x_ = x; }
    const OUParams& params() const { return params_; }

private:
    OUParams params_;
    Eigen::Vector2d x_;
};

// beta(a|s) = mu^i(s) + Z, clamped to the action bounds [-1,1]^2.
Eigen::Vector2d behavior_action(const net::ActorNet& actor, const Eigen::VectorXd& obs,
                                int intentional, OUNoise& noise, RandomStream& rng);

}  // namespace iu::explore
