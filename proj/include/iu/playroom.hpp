#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "iu/errors.hpp"
#include "iu/rng.hpp"

namespace iu::room {

enum class Color { Red, Blue, Green };

const char* to_string(Color c);
Color color_from_string(const std::string& s);

struct PadConfig {
    Eigen::Vector2d center;
    double radius = 0.1;  // display only; the pad never collides
};

struct ArenaConfig {
    double side_m = 0.8;
    double object_diameter_m = 0.12;
    std::vector<Color> colors = {Color::Red, Color::Blue};
    std::optional<PadConfig> pad;
    double dt = 0.05;        // control step, seconds
    double max_speed = 0.4;  // fist speed cap, m/s
    int episode_steps = 300;

    int n_blocks() const { return static_cast<int>(colors.size()); }
    double radius() const { return object_diameter_m / 2.0; }
    // Block centers live in [margin, side - margin]^2; the fist may enter the
    // outer strip but never leaves [0, side]^2.
    double margin() const { return radius(); }
    int obs_dim() const { return 2 * (n_blocks() + (pad ? 1 : 0)) + 2; }

    void validate() const;
};

struct Block {
    Color color;
    Eigen::Vector2d pos;
    Eigen::Vector2d vel;
};

struct WorldState {
    Eigen::Vector2d fist_pos;
    Eigen::Vector2d fist_vel;
    std::vector<Block> blocks;  // aligned with ArenaConfig::colors
    std::optional<Eigen::Vector2d> pad_pos;
    long step_count = 0;
};

// Uniform placement in the inner region with pairwise center clearance of at
// least one object diameter (fist included); velocities zero.
WorldState reset(const ArenaConfig& cfg, RandomStream& rng);

// Velocity-controlled fist, quasi-static block pushing. The fist is
// kinematic: it pushes blocks along contact normals and yields only when a
// block is jammed against the border. Block velocities decay with a
// half-life of two control steps.
void step(WorldState& state, const ArenaConfig& cfg, const Eigen::Vector2d& action);

// Relative block (and pad) positions scaled by side/2, then the fist's
// absolute position normalized to [-1,1]^2.
Eigen::VectorXd observe(const WorldState& state, const ArenaConfig& cfg);

// Largest containment or overlap violation in meters (0 when all invariants
// hold); used by fuzz tests.
double invariant_violation(const WorldState& state, const ArenaConfig& cfg);

// Line-delimited trajectory records; see the header lines it writes for the
// field order.
class TrajectoryWriter {
public:
    TrajectoryWriter(const std::string& path, const ArenaConfig& cfg,
                     const std::vector<std::string>& task_names);
    void append(const WorldState& state, const Eigen::Vector2d& action,
                const Eigen::VectorXd& rewards);

private:
    std::ofstream out_;
    int n_blocks_;
    bool has_pad_;
};

}  // namespace iu::room
