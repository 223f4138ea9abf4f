#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "iu/explore.hpp"
#include "iu/learner.hpp"
#include "iu/playroom.hpp"
#include "iu/reward_lang.hpp"

namespace iu::harness {

enum class BehaviorMode { Fixed, RandomEpisode };

struct RunSettings {
    long total_env_steps = 300000;
    long eval_every = 5000;
    int eval_episodes = 10;
    std::vector<std::uint64_t> seeds = {1};
    std::string out_dir = "runs/run";
    bool save_replay = false;
};

struct ExperimentConfig {
    room::ArenaConfig arena;
    learn::LearnerConfig learner;
    std::size_t replay_capacity = 200000;
    explore::OUParams ou;
    BehaviorMode mode = BehaviorMode::Fixed;
    std::string intentional;  // task name or alias; empty selects the suite default
    reward::Suite suite = reward::Suite::Suite18;
    std::vector<std::string> custom_tasks;  // expressions, used when suite == custom
    double epsilon_m = 0.20;
    RunSettings run;

    std::vector<reward::TaskSpec> build_tasks() const;
    std::string intentional_or_default() const;
    void validate() const;
};

// Flat key = value text; '#' starts a comment. Unknown keys are rejected.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Proportional stand-in for "upper right corner": center at 13/16 of the
// side, display radius side/8.
room::PadConfig default_pad(double side_m);

struct EvalStats {
    double mean = 0, min = 0, max = 0;
};

// `episodes` fresh episodes following one head greedily (no exploration
// noise); episodic return is the mean per-step indicator reward. Touches no
// learner state.
EvalStats evaluate_policy(const net::ActorNet& actor, int task,
                          const std::vector<reward::TaskSpec>& tasks,
                          const room::ArenaConfig& arena, int episodes, RandomStream& rng);

struct EvalRecord {
    long env_step = 0;
    std::string task;
    double mean = 0, min = 0, max = 0;
};

// CSV with header env_step,task,mean,min,max; the task field is quoted
// (canonical names contain commas), doubles are %.17g so re-parsing is exact.
void write_eval_records(const std::string& path, const std::vector<EvalRecord>& records);
std::vector<EvalRecord> load_eval_records(const std::string& path);

// Optional per-eval-point progress callback: (env_step, records at this
// point). Return false to stop training early.
using EvalCallback =
    std::function<bool(long env_step, const std::vector<EvalRecord>& point_records)>;

// The full loop: act with OU exploration on the intentional head, store full
// reward vectors, train every step, evaluate every head on the eval grid,
// checkpoint at eval points. Returns the run directory.
std::string run_training(const ExperimentConfig& cfg, std::uint64_t seed,
                         const EvalCallback& on_eval = nullptr);

// Checkpoint container layout used by run_training; enough to rebuild the
// agent and arena for evaluation or resumption.
void save_agent_checkpoint(const std::string& path, const learn::IUAgent& agent,
                           const room::ArenaConfig& arena, int intentional, long env_step,
                           bool include_replay);

struct LoadedCheckpoint {
    learn::IUAgent agent;
    room::ArenaConfig arena;
    int intentional = 0;
    long env_step = 0;
};
LoadedCheckpoint load_agent_checkpoint(const std::string& path);

// Learning-curve SVGs (per task plus a combined sheet) from
// <run_dir>/eval_records.csv and one XY plot per *.traj file in the run
// directory.
void emit_plots(const std::string& run_dir);

// Greedy rollout of one head written as a .traj file.
void dump_trajectory(const std::string& path, const net::ActorNet& actor, int task,
                     const std::vector<reward::TaskSpec>& tasks, const room::ArenaConfig& arena,
                     RandomStream& rng);

}  // namespace iu::harness
