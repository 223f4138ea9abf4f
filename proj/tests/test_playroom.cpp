#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>

#include "iu/playroom.hpp"

using namespace iu;
using room::ArenaConfig;
using room::WorldState;

namespace {

ArenaConfig three_block_cfg() {
    ArenaConfig cfg;
    cfg.colors = {room::Color::Red, room::Color::Blue, room::Color::Green};
    cfg.pad = room::PadConfig{{0.65, 0.65}, 0.1};
    return cfg;
}

}  // namespace

TEST_CASE("reset: pairwise clearance and zero velocities") {
    ArenaConfig cfg = three_block_cfg();
    RandomStream rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        const WorldState s = room::reset(cfg, rng);
        CHECK(s.step_count == 0);
        CHECK(s.fist_vel.norm() == 0.0);
        std::vector<Eigen::Vector2d> centers{s.fist_pos};
        for (const auto& b : s.blocks) {
            CHECK(b.vel.norm() == 0.0);
            centers.push_back(b.pos);
        }
        for (std::size_t i = 0; i < centers.size(); ++i)
            for (std::size_t j = i + 1; j < centers.size(); ++j)
                CHECK((centers[i] - centers[j]).norm() >= cfg.object_diameter_m);
        CHECK(room::invariant_violation(s, cfg) <= 0.0);
    }
}

TEST_CASE("reset: fixed seed reproduces the layout") {
    ArenaConfig cfg = three_block_cfg();
    RandomStream r1(42), r2(42);
    const WorldState a = room::reset(cfg, r1);
    const WorldState b = room::reset(cfg, r2);
    CHECK(a.fist_pos == b.fist_pos);
    for (std::size_t i = 0; i < a.blocks.size(); ++i) CHECK(a.blocks[i].pos == b.blocks[i].pos);
}

TEST_CASE("reset: crowded arena fails with a configuration error") {
    ArenaConfig cfg;
    cfg.side_m = 0.26;  // barely above the validity bound, far too tight for 4 bodies
    cfg.colors = {room::Color::Red, room::Color::Blue, room::Color::Green};
    RandomStream rng(3);
    CHECK_THROWS_AS(room::reset(cfg, rng), ConfigError);
}

TEST_CASE("reset: block-center marginal is near uniform over the inner region") {
    ArenaConfig cfg;  // 2 blocks
    RandomStream rng(77);
    const double lo = cfg.margin();
    const double span = cfg.side_m - 2 * cfg.margin();
    long counts[4][4] = {};
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const WorldState s = room::reset(cfg, rng);
        const auto& p = s.blocks[0].pos;  // red marginal
        int gx = std::min(3, static_cast<int>((p.x() - lo) / span * 4));
        int gy = std::min(3, static_cast<int>((p.y() - lo) / span * 4));
        counts[gx][gy] += 1;
    }
    // chi-squared against uniform over 16 cells, 15 dof; p > 0.001 -> chi2 < 37.70
    double chi2 = 0.0;
    const double expect = n / 16.0;
    for (auto& row : counts)
        for (long c : row) chi2 += (c - expect) * (c - expect) / expect;
    CHECK(chi2 < 37.70);
}

TEST_CASE("step: free integration moves the fist by action*max_speed*dt") {
    ArenaConfig cfg;
    RandomStream rng(5);
    WorldState s = room::reset(cfg, rng);
    s.fist_pos = Eigen::Vector2d(0.4, 0.4);
    s.blocks[0].pos = Eigen::Vector2d(0.1, 0.1);
    s.blocks[1].pos = Eigen::Vector2d(0.7, 0.1);
    room::step(s, cfg, Eigen::Vector2d(1.0, 0.0));
    CHECK(s.fist_pos.x() == doctest::Approx(0.42).epsilon(1e-15));
    CHECK(s.fist_pos.y() == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(s.step_count == 1);
}

TEST_CASE("step: head-on push leaves exact contact distance along the center line") {
    ArenaConfig cfg;
    RandomStream rng(6);
    WorldState s = room::reset(cfg, rng);
    s.fist_pos = Eigen::Vector2d(0.3, 0.4);
    s.blocks[0].pos = Eigen::Vector2d(0.41, 0.4);  // 0.11 < diameter 0.12
    s.blocks[0].vel.setZero();
    s.blocks[1].pos = Eigen::Vector2d(0.7, 0.7);
    room::step(s, cfg, Eigen::Vector2d(1.0, 0.0));
    const double dist = (s.blocks[0].pos - s.fist_pos).norm();
    CHECK(std::abs(dist - cfg.object_diameter_m) < 1e-9);
    // displaced along the line of centers: same y
    CHECK(std::abs(s.blocks[0].pos.y() - 0.4) < 1e-12);
    CHECK(s.blocks[0].pos.x() > 0.41);
    // the push transferred velocity to the block
    CHECK(s.blocks[0].vel.x() > 0.0);
}

TEST_CASE("step: border clamps blocks to the inner region but admits the fist") {
    ArenaConfig cfg;
    RandomStream rng(7);
    WorldState s = room::reset(cfg, rng);
    const double hi = cfg.side_m - cfg.object_diameter_m / 2;
    s.fist_pos = Eigen::Vector2d(0.45, 0.4);
    s.blocks[0].pos = Eigen::Vector2d(0.60, 0.4);
    s.blocks[1].pos = Eigen::Vector2d(0.1, 0.1);
    for (int i = 0; i < 30; ++i) room::step(s, cfg, Eigen::Vector2d(1.0, 0.0));
    CHECK(s.blocks[0].pos.x() == hi);  // clamped at side - diameter/2
    // the wall-pinned block stops the fist one diameter short of the clamp line
    CHECK(s.fist_pos.x() == doctest::Approx(hi - cfg.object_diameter_m).epsilon(1e-9));
    CHECK(room::invariant_violation(s, cfg) <= 1e-9);  // no overlap despite the jam
}

TEST_CASE("step: fist reaches the corner strip") {
    ArenaConfig cfg;
    RandomStream rng(8);
    WorldState s = room::reset(cfg, rng);
    s.blocks[0].pos = Eigen::Vector2d(0.2, 0.2);
    s.blocks[1].pos = Eigen::Vector2d(0.2, 0.6);
    s.fist_pos = Eigen::Vector2d(0.6, 0.6);
    for (int i = 0; i < 100; ++i) room::step(s, cfg, Eigen::Vector2d(1.0, 1.0));
    CHECK(s.fist_pos.x() == cfg.side_m);
    CHECK(s.fist_pos.y() == cfg.side_m);
}

TEST_CASE("step: non-finite action rejected") {
    ArenaConfig cfg;
    RandomStream rng(9);
    WorldState s = room::reset(cfg, rng);
    CHECK_THROWS_AS(room::step(s, cfg, Eigen::Vector2d(std::nan(""), 0.0)), NumericError);
}

TEST_CASE("step: quiescence, block speeds decay below 1e-6 within 50 steps") {
    ArenaConfig cfg;
    RandomStream rng(10);
    WorldState s = room::reset(cfg, rng);
    s.fist_pos = Eigen::Vector2d(0.7, 0.7);
    s.blocks[0].pos = Eigen::Vector2d(0.2, 0.2);
    s.blocks[0].vel = Eigen::Vector2d(0.02, -0.015);  // drifting, no contact
    s.blocks[1].pos = Eigen::Vector2d(0.6, 0.2);
    for (int i = 0; i < 50; ++i) room::step(s, cfg, Eigen::Vector2d(0.0, 0.0));
    for (const auto& b : s.blocks) CHECK(b.vel.norm() < 1e-6);
}

TEST_CASE("step: determinism, same seed and actions give bit-identical trajectories") {
    ArenaConfig cfg = three_block_cfg();
    auto run = [&] {
        RandomStream rng(11);
        WorldState s = room::reset(cfg, rng);
        RandomStream act(12);
        for (int i = 0; i < 500; ++i)
            room::step(s, cfg, Eigen::Vector2d(act.uniform(-1, 1), act.uniform(-1, 1)));
        return s;
    };
    const WorldState a = run();
    const WorldState b = run();
    CHECK(a.fist_pos == b.fist_pos);
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
        CHECK(a.blocks[i].pos == b.blocks[i].pos);
        CHECK(a.blocks[i].vel == b.blocks[i].vel);
    }
}

TEST_CASE("step: pad never alters contact resolution") {
    ArenaConfig with_pad = three_block_cfg();
    ArenaConfig no_pad = with_pad;
    no_pad.pad.reset();
    RandomStream r1(13), r2(13);
    WorldState a = room::reset(with_pad, r1);
    WorldState b = room::reset(no_pad, r2);
    RandomStream act(14);
    for (int i = 0; i < 2000; ++i) {
        const Eigen::Vector2d u(act.uniform(-1, 1), act.uniform(-1, 1));
        room::step(a, with_pad, u);
        room::step(b, no_pad, u);
    }
    CHECK(a.fist_pos == b.fist_pos);
    for (std::size_t i = 0; i < a.blocks.size(); ++i) CHECK(a.blocks[i].pos == b.blocks[i].pos);
}

TEST_CASE("step: fuzz containment and overlap invariants (unit-test scale)") {
    ArenaConfig cfg = three_block_cfg();
    RandomStream rng(15);
    WorldState s = room::reset(cfg, rng);
    RandomStream act(16);
    double worst = 0.0;
    for (int i = 0; i < 50000; ++i) {
        // biased random walk so the fist spends time grinding into walls/corners
        Eigen::Vector2d u(act.uniform(-1, 1), act.uniform(-1, 1));
        if (act.uniform01() < 0.3) u = Eigen::Vector2d(1.0, 1.0);
        room::step(s, cfg, u);
        worst = std::max(worst, room::invariant_violation(s, cfg));
        if (i % 600 == 599) s = room::reset(cfg, rng);
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("observe: coincident and offset arithmetic, dimensions") {
    ArenaConfig cfg;
    RandomStream rng(17);
    WorldState s = room::reset(cfg, rng);
    s.fist_pos = Eigen::Vector2d(0.4, 0.4);  // arena center
    s.blocks[0].pos = Eigen::Vector2d(0.4, 0.4);
    s.blocks[1].pos = Eigen::Vector2d(0.1, 0.7);
    Eigen::VectorXd obs = room::observe(s, cfg);
    CHECK(obs.size() == 2 * 2 + 2);
    CHECK(obs(0) == 0.0);  // red relative x
    CHECK(obs(1) == 0.0);
    CHECK(obs(4) == 0.0);  // fist absolute, centered
    CHECK(obs(5) == 0.0);

    s.fist_pos = Eigen::Vector2d(0.1, 0.2);
    s.blocks[0].pos = Eigen::Vector2d(0.3, 0.2);
    obs = room::observe(s, cfg);
    CHECK(obs(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(obs(1) == 0.0);

    ArenaConfig cfg3 = three_block_cfg();
    RandomStream rng3(18);
    const WorldState s3 = room::reset(cfg3, rng3);
    CHECK(room::observe(s3, cfg3).size() == 10);  // 3 blocks + pad -> 10
}

TEST_CASE("trajectory writer: header carries the field order") {
    ArenaConfig cfg = three_block_cfg();
    RandomStream rng(19);
    WorldState s = room::reset(cfg, rng);
    const std::string path = "/tmp/iu_traj_test.traj";
    {
        room::TrajectoryWriter w(path, cfg, {"near(fist,red)"});
        w.append(s, Eigen::Vector2d(0.5, -0.5), Eigen::VectorXd::Ones(1));
    }
    std::ifstream is(path);
    std::string all((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    CHECK(all.find("# iu-trajectory v1") != std::string::npos);
    CHECK(all.find("red_x red_y blue_x blue_y green_x green_y pad_x pad_y") != std::string::npos);
    CHECK(all.find("near(fist,red)") != std::string::npos);
    std::filesystem::remove(path);
}
