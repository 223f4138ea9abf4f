#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "iu/explore.hpp"

using namespace iu;
using explore::OUNoise;
using explore::OUParams;

TEST_CASE("ou: deterministic mean reversion with sigma = 0") {
    OUParams p;
    p.theta = 0.15;
    p.sigma = 0.0;
    p.dt = 1.0;
    RandomStream rng(1);
    OUNoise m(p);
    m.set_value(Eigen::Vector2d(1.0, 1.0));
    const Eigen::Vector2d x1 = m.step(rng);
    CHECK(x1.x() == doctest::Approx(0.85).epsilon(1e-15));
    CHECK(x1.y() == doctest::Approx(0.85).epsilon(1e-15));
}

TEST_CASE("ou: x = mu is a fixed point when sigma = 0") {
    OUParams p;
    p.sigma = 0.0;
    p.mu = Eigen::Vector2d(0.2, -0.3);
    OUNoise n(p);
    RandomStream rng(2);
    for (int i = 0; i < 100; ++i) {
        const Eigen::Vector2d x = n.step(rng);
        CHECK(x == p.mu);
    }
}

TEST_CASE("ou: invalid parameters rejected at construction") {
    OUParams p;
    p.theta = 0.0;
    CHECK_THROWS_AS(OUNoise{p}, ConfigError);
    p.theta = 0.15;
    p.sigma = -0.1;
    CHECK_THROWS_AS(OUNoise{p}, ConfigError);
    p.sigma = 0.2;
    p.dt = 0.0;
    CHECK_THROWS_AS(OUNoise{p}, ConfigError);
}

TEST_CASE("ou: lag-1 autocorrelation approximates 1 - theta*dt") {
    OUParams p;
    p.theta = 0.15;
    p.sigma = 0.2;
    p.dt = 1.0;
    OUNoise n(p);
    RandomStream rng(42);
    const long N = 100000;
    std::vector<double> xs(N);
    for (long i = 0; i < N; ++i) xs[static_cast<std::size_t>(i)] = n.step(rng).x();
    double mean = 0;
    for (double v : xs) mean += v;
    mean /= static_cast<double>(N);
    double num = 0, den = 0;
    for (long i = 0; i + 1 < N; ++i) {
        num += (xs[static_cast<std::size_t>(i)] - mean) * (xs[static_cast<std::size_t>(i + 1)] - mean);
        den += (xs[static_cast<std::size_t>(i)] - mean) * (xs[static_cast<std::size_t>(i)] - mean);
    }
    const double rho = num / den;
    CHECK(std::abs(rho - (1.0 - p.theta * p.dt)) < 0.02);
}

TEST_CASE("behavior_action: sigma = 0 and zero noise reduce to the head output") {
    RandomStream init(3);
    net::ActorNet actor = net::ActorNet::create(4, 3, init, 16);
    OUParams p;
    p.sigma = 0.0;
    OUNoise n(p);
    RandomStream rng(4);
    Eigen::VectorXd obs(4);
    obs << 0.1, -0.2, 0.3, 0.4;
    const Eigen::Vector2d a = explore::behavior_action(actor, obs, 1, n, rng);
    const Eigen::Vector2d mu = net::actor_forward_head(actor, obs, 1);
    CHECK(a == mu);
}

TEST_CASE("behavior_action: sum clamps to [-1,1]") {
    RandomStream init(5);
    net::ActorNet actor = net::ActorNet::create(3, 1, init, 8);
    // drive a head output near 0.9 via its bias, then add noise 0.5
    actor.heads[0].params.layers[0].W.setZero();
    actor.heads[0].params.layers[0].b.setConstant(std::atanh(0.9));
    OUParams p;
    p.sigma = 0.0;
    p.mu = Eigen::Vector2d(0.5, 0.5);  // fixed "noise" of +0.5
    OUNoise n(p);
    RandomStream rng(6);
    const Eigen::Vector2d a =
        explore::behavior_action(actor, Eigen::Vector3d(0, 0, 0), 0, n, rng);
    CHECK(a.x() == 1.0);
    CHECK(a.y() == 1.0);
}

TEST_CASE("behavior_action: task index validated") {
    RandomStream init(7);
    net::ActorNet actor = net::ActorNet::create(3, 2, init, 8);
    OUNoise n(OUParams{});
    RandomStream rng(8);
    CHECK_THROWS_AS(explore::behavior_action(actor, Eigen::Vector3d(0, 0, 0), 2, n, rng),
                    ShapeError);
}

TEST_CASE("behavior_action: action sequence is temporally correlated, not iid") {
    RandomStream init(9);
    net::ActorNet actor = net::ActorNet::create(3, 1, init, 8);
    // zero policy isolates the noise process in the actions
    actor.trunk.params.layers[0].W.setZero();
    actor.trunk.params.layers[1].W.setZero();
    for (auto& l : actor.heads[0].params.layers) {
        l.W.setZero();
        l.b.setZero();
    }
    OUParams p;  // defaults: theta 0.15, sigma 0.2
    OUNoise n(p);
    RandomStream rng(10);
    const long N = 20000;
    std::vector<double> xs;
    for (long i = 0; i < N; ++i)
        xs.push_back(explore::behavior_action(actor, Eigen::Vector3d(0, 0, 0), 0, n, rng).x());
    double mean = 0;
    for (double v : xs) mean += v;
    mean /= static_cast<double>(N);
    double num = 0, den = 0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        num += (xs[i] - mean) * (xs[i + 1] - mean);
        den += (xs[i] - mean) * (xs[i] - mean);
    }
    CHECK(num / den > 0.5);  // iid would hover near 0
}
