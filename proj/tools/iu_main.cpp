#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "iu/harness.hpp"

namespace {

// exit codes: 0 ok, 2 config, 3 numeric, 4 io, 1 other
int run_guarded(const std::function<void()>& fn) {
    try {
        fn();
        return 0;
    } catch (const iu::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const iu::reward::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const iu::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const iu::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-head DDPG agent in a 2D playroom"};
    app.require_subcommand(1);

    // ---- train ----
    auto* train = app.add_subcommand("train", "run training from a config file");
    std::string config_path;
    long seed_override = -1;
    std::string out_override;
    train->add_option("--config", config_path, "config file (key = value lines)")->required();
    train->add_option("--seed", seed_override, "override run.seeds with a single seed");
    train->add_option("--out", out_override, "override run.dir");

    // ---- eval ----
    auto* eval = app.add_subcommand("eval", "evaluate one head of a checkpoint");
    std::string ckpt_path, task_name, dump_path;
    int eval_episodes = 10;
    long eval_seed = 1;
    eval->add_option("--checkpoint", ckpt_path, "checkpoint file")->required();
    eval->add_option("--task", task_name, "task name (canonical or gather_to_pad)")->required();
    eval->add_option("--episodes", eval_episodes, "evaluation episodes");
    eval->add_option("--seed", eval_seed, "evaluation seed");
    eval->add_option("--dump", dump_path, "also write a .traj rollout to this path");

    // ---- tasks ----
    auto* tasks_cmd = app.add_subcommand("tasks", "task suite utilities");
    auto* tasks_list = tasks_cmd->add_subcommand("list", "print the canonical suite");
    int blocks = 2;
    bool with_pad = false;
    tasks_list->add_option("--blocks", blocks, "number of blocks (2 or 3)");
    tasks_list->add_flag("--pad", with_pad, "include goal-pad tasks");

    // ---- plot ----
    auto* plot = app.add_subcommand("plot", "render learning curves and trajectories");
    std::string run_dir;
    plot->add_option("--run", run_dir, "run directory with eval_records.csv")->required();

    CLI11_PARSE(app, argc, argv);

    if (*train) {
        return run_guarded([&] {
            iu::harness::ExperimentConfig cfg = iu::harness::load_config(config_path);
            if (!out_override.empty()) cfg.run.out_dir = out_override;
            std::vector<std::uint64_t> seeds = cfg.run.seeds;
            if (seed_override >= 0) seeds = {static_cast<std::uint64_t>(seed_override)};
            for (std::uint64_t seed : seeds) {
                const std::string dir = iu::harness::run_training(
                    cfg, seed, [&](long step, const std::vector<iu::harness::EvalRecord>& point) {
                        double intentional_mean = 0.0;
                        const std::string name = cfg.intentional_or_default();
                        for (const auto& r : point)
                            if (r.task == name) intentional_mean = r.mean;
                        std::printf("seed %llu step %ld  intentional %.3f\n",
                                    static_cast<unsigned long long>(seed), step, intentional_mean);
                        std::fflush(stdout);
                        return true;
                    });
                std::printf("run written to %s\n", dir.c_str());
            }
        });
    }

    if (*eval) {
        return run_guarded([&] {
            iu::harness::LoadedCheckpoint lc = iu::harness::load_agent_checkpoint(ckpt_path);
            const int t = iu::reward::find_task(lc.agent.tasks, task_name);
            if (t < 0) throw iu::ConfigError("task '" + task_name + "' is not in this checkpoint");
            iu::RandomStream rng(static_cast<std::uint64_t>(eval_seed));
            const iu::harness::EvalStats st = iu::harness::evaluate_policy(
                lc.agent.actor, t, lc.agent.tasks, lc.arena, eval_episodes, rng);
            std::printf("task %s  episodes %d  mean %.4f  min %.4f  max %.4f\n",
                        lc.agent.tasks[static_cast<std::size_t>(t)].name.c_str(), eval_episodes,
                        st.mean, st.min, st.max);
            if (!dump_path.empty()) {
                iu::RandomStream traj_rng = rng.derive(1);
                iu::harness::dump_trajectory(dump_path, lc.agent.actor, t, lc.agent.tasks,
                                             lc.arena, traj_rng);
                std::printf("trajectory written to %s\n", dump_path.c_str());
            }
        });
    }

    if (*tasks_list) {
        return run_guarded([&] {
            using iu::reward::Suite;
            if (blocks != 2 && blocks != 3)
                throw iu::ConfigError("tasks list: --blocks must be 2 or 3");
            std::vector<iu::reward::TaskSpec> suite;
            if (!with_pad) {
                suite = iu::reward::build_suite(blocks == 2 ? Suite::Suite18 : Suite::Suite36);
            } else {
                if (blocks != 3)
                    throw iu::ConfigError("tasks list: pad suites are defined for 3 blocks");
                suite = iu::reward::build_suite(Suite::Suite43);
            }
            for (const auto& t : suite) std::printf("%s\n", t.name.c_str());
        });
    }

    if (*plot) {
        return run_guarded([&] {
            iu::harness::emit_plots(run_dir);
            std::printf("plots written to %s/plots\n", run_dir.c_str());
        });
    }

    return 0;
}
