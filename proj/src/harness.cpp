#include "iu/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "iu/svg_plot.hpp"

namespace fs = std::filesystem;

namespace iu::harness {

namespace {

// rng stream ids hanging off the per-run master seed
constexpr std::uint64_t kStreamInit = 1;
constexpr std::uint64_t kStreamEnv = 2;
constexpr std::uint64_t kStreamNoise = 3;
constexpr std::uint64_t kStreamReplay = 4;
constexpr std::uint64_t kStreamBehavior = 5;
constexpr std::uint64_t kStreamEval = 6;

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
    }
}

long to_long(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long d = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config: key '" + key + "' expects true/false, got '" + v + "'");
}

std::string sanitize(const std::string& name) {
    std::string out;
    for (char c : name)
        out += (std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    return out;
}

const char* task_color(const std::string& name, bool intentional) {
    if (intentional) return "#c23b22";
    (void)name;
    return "#8a8a8a";
}

}  // namespace

room::PadConfig default_pad(double side_m) {
    return {{side_m * 13.0 / 16.0, side_m * 13.0 / 16.0}, side_m / 8.0};
}

std::vector<reward::TaskSpec> ExperimentConfig::build_tasks() const {
    if (suite == reward::Suite::Custom) {
        if (custom_tasks.empty())
            throw ConfigError("config: custom suite needs a task list (tasks.inline or tasks.file)");
        std::vector<reward::TaskSpec> out;
        for (const auto& t : custom_tasks)
            out.push_back(reward::TaskSpec::compile(
                reward::parse(reward::resolve_task_alias(trim(t))), epsilon_m));
        return out;
    }
    return reward::build_suite(suite, epsilon_m);
}

std::string ExperimentConfig::intentional_or_default() const {
    if (!intentional.empty()) return reward::resolve_task_alias(intentional);
    switch (suite) {
        case reward::Suite::Suite18:
        case reward::Suite::Suite36:
            return "near(red,blue)";
        case reward::Suite::Suite7:
        case reward::Suite::Suite43:
            return reward::resolve_task_alias("gather_to_pad");
        case reward::Suite::Custom:
            return reward::resolve_task_alias(trim(custom_tasks.front()));
    }
    throw ConfigError("config: cannot derive an intentional task");
}

void ExperimentConfig::validate() const {
    arena.validate();
    learner.validate();
    if (replay_capacity == 0) throw ConfigError("config: replay.capacity must be positive");
    if (run.eval_episodes < 1) throw ConfigError("config: run.eval_episodes must be >= 1");
    if (run.eval_every <= 0) throw ConfigError("config: run.eval_every must be positive");
    if (run.total_env_steps < 0) throw ConfigError("config: run.total_env_steps must be >= 0");
    if (run.seeds.empty()) throw ConfigError("config: run.seeds must not be empty");
    const auto tasks = build_tasks();
    reward::validate_tasks(tasks, arena);
    if (reward::find_task(tasks, intentional_or_default()) < 0)
        throw ConfigError("config: intentional task '" + intentional_or_default() +
                          "' is not in the suite");
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    bool colors_set = false;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    std::optional<std::string> tasks_file;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));

        if (key == "arena.side_m") cfg.arena.side_m = to_double(key, val);
        else if (key == "arena.object_diameter_m") cfg.arena.object_diameter_m = to_double(key, val);
        else if (key == "arena.colors") {
            cfg.arena.colors.clear();
            for (const auto& c : split(val, ',')) cfg.arena.colors.push_back(room::color_from_string(c));
            colors_set = true;
        } else if (key == "arena.blocks") {
            const long n = to_long(key, val);
            if (n < 1 || n > 3) throw ConfigError("config: arena.blocks must be 1..3");
            cfg.arena.colors.assign({room::Color::Red, room::Color::Blue, room::Color::Green});
            cfg.arena.colors.resize(static_cast<std::size_t>(n));
            colors_set = true;
        } else if (key == "arena.pad") {
            if (val == "none") cfg.arena.pad.reset();
            else if (val == "default") cfg.arena.pad = default_pad(cfg.arena.side_m);
            else {
                const auto parts = split(val, ',');
                if (parts.size() != 3)
                    throw ConfigError("config: arena.pad expects 'x,y,r', 'default' or 'none'");
                cfg.arena.pad = room::PadConfig{{to_double(key, parts[0]), to_double(key, parts[1])},
                                                to_double(key, parts[2])};
            }
        } else if (key == "arena.dt") cfg.arena.dt = to_double(key, val);
        else if (key == "arena.max_speed") cfg.arena.max_speed = to_double(key, val);
        else if (key == "arena.episode_steps") cfg.arena.episode_steps = static_cast<int>(to_long(key, val));
        else if (key == "learner.gamma") cfg.learner.gamma = to_double(key, val);
        else if (key == "learner.lr_actor") cfg.learner.lr_actor = to_double(key, val);
        else if (key == "learner.lr_critic") cfg.learner.lr_critic = to_double(key, val);
        else if (key == "learner.tau") cfg.learner.tau = to_double(key, val);
        else if (key == "learner.batch") cfg.learner.batch = static_cast<int>(to_long(key, val));
        else if (key == "learner.updates_per_step")
            cfg.learner.updates_per_step = static_cast<int>(to_long(key, val));
        else if (key == "learner.warmup") cfg.learner.warmup = static_cast<int>(to_long(key, val));
        else if (key == "replay.capacity") cfg.replay_capacity = static_cast<std::size_t>(to_long(key, val));
        else if (key == "explore.theta") cfg.ou.theta = to_double(key, val);
        else if (key == "explore.sigma") cfg.ou.sigma = to_double(key, val);
        else if (key == "behavior.mode") {
            if (val == "fixed") cfg.mode = BehaviorMode::Fixed;
            else if (val == "random_episode") cfg.mode = BehaviorMode::RandomEpisode;
            else throw ConfigError("config: behavior.mode must be fixed or random_episode");
        } else if (key == "behavior.intentional_task") cfg.intentional = val;
        else if (key == "suite") cfg.suite = reward::suite_from_string(val);
        else if (key == "reward.epsilon_m") cfg.epsilon_m = to_double(key, val);
        else if (key == "tasks.inline") cfg.custom_tasks = split(val, ';');
        else if (key == "tasks.file") tasks_file = val;
        else if (key == "run.total_env_steps") cfg.run.total_env_steps = to_long(key, val);
        else if (key == "run.eval_every") cfg.run.eval_every = to_long(key, val);
        else if (key == "run.eval_episodes") cfg.run.eval_episodes = static_cast<int>(to_long(key, val));
        else if (key == "run.seeds") {
            cfg.run.seeds.clear();
            for (const auto& s : split(val, ','))
                cfg.run.seeds.push_back(static_cast<std::uint64_t>(to_long(key, s)));
        } else if (key == "run.dir") cfg.run.out_dir = val;
        else if (key == "run.save_replay") cfg.run.save_replay = to_bool(key, val);
        else throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }

    if (tasks_file) {
        std::ifstream f(*tasks_file);
        if (!f) throw ConfigError("config: cannot open tasks.file '" + *tasks_file + "'");
        std::stringstream ss;
        ss << f.rdbuf();
        cfg.custom_tasks.clear();
        for (const auto& t : reward::parse_task_lines(ss.str(), cfg.epsilon_m))
            cfg.custom_tasks.push_back(t.name);
    }

    // colors follow the suite unless set explicitly
    if (!colors_set) {
        switch (cfg.suite) {
            case reward::Suite::Suite18:
                cfg.arena.colors = {room::Color::Red, room::Color::Blue};
                break;
            case reward::Suite::Suite36:
            case reward::Suite::Suite7:
            case reward::Suite::Suite43:
                cfg.arena.colors = {room::Color::Red, room::Color::Blue, room::Color::Green};
                break;
            case reward::Suite::Custom:
                break;
        }
    }
    if ((cfg.suite == reward::Suite::Suite7 || cfg.suite == reward::Suite::Suite43) &&
        !cfg.arena.pad)
        cfg.arena.pad = default_pad(cfg.arena.side_m);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

EvalStats evaluate_policy(const net::ActorNet& actor, int task,
                          const std::vector<reward::TaskSpec>& tasks,
                          const room::ArenaConfig& arena, int episodes, RandomStream& rng) {
    if (episodes < 1) throw ConfigError("evaluate_policy: episodes must be >= 1");
    if (task < 0 || task >= static_cast<int>(tasks.size()))
        throw ConfigError("evaluate_policy: task index out of range");
    EvalStats st;
    st.min = 1.0;
    st.max = 0.0;
    double sum = 0.0;
    for (int e = 0; e < episodes; ++e) {
        room::WorldState state = room::reset(arena, rng);
        double total = 0.0;
        for (int t = 0; t < arena.episode_steps; ++t) {
            const Eigen::VectorXd obs = room::observe(state, arena);
            const Eigen::Vector2d a = net::actor_forward_head(actor, obs, task);
            room::step(state, arena, a);
            total += tasks[static_cast<std::size_t>(task)].evaluate(state);
        }
        const double ret = total / arena.episode_steps;
        sum += ret;
        st.min = std::min(st.min, ret);
        st.max = std::max(st.max, ret);
    }
    st.mean = sum / episodes;
    return st;
}

void write_eval_records(const std::string& path, const std::vector<EvalRecord>& records) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("eval records: cannot open '" + path + "' for writing");
    os << "env_step,task,mean,min,max\n";
    for (const auto& r : records)
        os << r.env_step << ",\"" << r.task << "\"," << g17(r.mean) << "," << g17(r.min) << ","
           << g17(r.max) << "\n";
    if (!os) throw IoError("eval records: write to '" + path + "' failed");
}

std::vector<EvalRecord> load_eval_records(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("eval records: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(is, line) || trim(line) != "env_step,task,mean,min,max")
        throw IoError("eval records: '" + path + "' has an unexpected header");
    std::vector<EvalRecord> out;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        EvalRecord r;
        const auto c1 = line.find(',');
        const auto q1 = line.find('"', c1);
        const auto q2 = line.find('"', q1 + 1);
        if (c1 == std::string::npos || q1 == std::string::npos || q2 == std::string::npos)
            throw IoError("eval records: '" + path + "' line " + std::to_string(lineno) +
                          " is malformed");
        r.env_step = std::stol(line.substr(0, c1));
        r.task = line.substr(q1 + 1, q2 - q1 - 1);
        const auto rest = split(line.substr(q2 + 2), ',');
        if (rest.size() != 3)
            throw IoError("eval records: '" + path + "' line " + std::to_string(lineno) +
                          " is malformed");
        r.mean = std::stod(rest[0]);
        r.min = std::stod(rest[1]);
        r.max = std::stod(rest[2]);
        out.push_back(std::move(r));
    }
    return out;
}

void save_agent_checkpoint(const std::string& path, const learn::IUAgent& agent,
                           const room::ArenaConfig& arena, int intentional, long env_step,
                           bool include_replay) {
    ckpt::Container c;
    c.put_scalar("format", 1);
    c.put_scalar("env_step", static_cast<double>(env_step));
    c.put_scalar("intentional", intentional);

    Eigen::MatrixXd am(6, 1);
    am << arena.side_m, arena.object_diameter_m, arena.dt, arena.max_speed,
        static_cast<double>(arena.episode_steps), arena.pad ? 1.0 : 0.0;
    c.put_matrix("arena.meta", am);
    if (arena.pad) {
        Eigen::MatrixXd pm(3, 1);
        pm << arena.pad->center.x(), arena.pad->center.y(), arena.pad->radius;
        c.put_matrix("arena.pad", pm);
    }
    std::string colors;
    for (std::size_t i = 0; i < arena.colors.size(); ++i) {
        if (i) colors += ",";
        colors += room::to_string(arena.colors[i]);
    }
    c.put_bytes("arena.colors", colors);

    std::string tasks_text;
    for (const auto& t : agent.tasks) tasks_text += t.name + "\n";
    c.put_bytes("tasks", tasks_text);
    c.put_scalar("epsilon_m", agent.tasks.empty() ? 0.2 : agent.tasks[0].epsilon_m);

    Eigen::MatrixXd lc(7, 1);
    lc << agent.config.gamma, agent.config.lr_actor, agent.config.lr_critic, agent.config.tau,
        static_cast<double>(agent.config.batch), static_cast<double>(agent.config.updates_per_step),
        static_cast<double>(agent.config.warmup);
    c.put_matrix("learner.meta", lc);
    c.put_scalar("replay.capacity", static_cast<double>(agent.buffer.capacity()));

    net::put_actor(c, "actor", agent.actor);
    net::put_actor(c, "actor_target", agent.actor_target);
    net::put_critic(c, "critic", agent.critic);
    net::put_critic(c, "critic_target", agent.critic_target);
    if (include_replay) agent.buffer.dump(c, "replay");
    c.save(path);
}

LoadedCheckpoint load_agent_checkpoint(const std::string& path) {
    const ckpt::Container c = ckpt::Container::load(path);
    room::ArenaConfig arena;
    const Eigen::MatrixXd am = c.get_matrix("arena.meta");
    arena.side_m = am(0);
    arena.object_diameter_m = am(1);
    arena.dt = am(2);
    arena.max_speed = am(3);
    arena.episode_steps = static_cast<int>(am(4));
    if (am(5) > 0.5) {
        const Eigen::MatrixXd pm = c.get_matrix("arena.pad");
        arena.pad = room::PadConfig{{pm(0), pm(1)}, pm(2)};
    } else {
        arena.pad.reset();
    }
    arena.colors.clear();
    for (const auto& s : split(c.get_bytes("arena.colors"), ','))
        arena.colors.push_back(room::color_from_string(s));

    const double eps = c.get_scalar("epsilon_m");
    std::vector<reward::TaskSpec> tasks = reward::parse_task_lines(c.get_bytes("tasks"), eps);

    learn::LearnerConfig lc;
    const Eigen::MatrixXd lm = c.get_matrix("learner.meta");
    lc.gamma = lm(0);
    lc.lr_actor = lm(1);
    lc.lr_critic = lm(2);
    lc.tau = lm(3);
    lc.batch = static_cast<int>(lm(4));
    lc.updates_per_step = static_cast<int>(lm(5));
    lc.warmup = static_cast<int>(lm(6));

    const auto capacity = static_cast<std::size_t>(c.get_scalar("replay.capacity"));
    replay::ReplayBuffer buffer =
        c.has("replay.meta") ? replay::ReplayBuffer::restore(c, "replay")
                             : replay::ReplayBuffer(capacity);

    LoadedCheckpoint out{
        learn::IUAgent{net::get_actor(c, "actor"), net::get_actor(c, "actor_target"),
                       net::get_critic(c, "critic"), net::get_critic(c, "critic_target"),
                       std::move(buffer), lc, std::move(tasks)},
        arena, static_cast<int>(c.get_scalar("intentional")),
        static_cast<long>(c.get_scalar("env_step"))};
    return out;
}

std::string run_training(const ExperimentConfig& cfg, std::uint64_t seed,
                         const EvalCallback& on_eval) {
    cfg.validate();
    std::vector<reward::TaskSpec> tasks = cfg.build_tasks();
    const int T = static_cast<int>(tasks.size());
    const int intentional = reward::find_task(tasks, cfg.intentional_or_default());

    const fs::path run_dir = fs::path(cfg.run.out_dir) / ("seed" + std::to_string(seed));
    fs::create_directories(run_dir);

    RandomStream master(seed);
    RandomStream rng_init = master.derive(kStreamInit);
    RandomStream rng_env = master.derive(kStreamEnv);
    RandomStream rng_noise = master.derive(kStreamNoise);
    RandomStream rng_replay = master.derive(kStreamReplay);
    RandomStream rng_behavior = master.derive(kStreamBehavior);
    const RandomStream rng_eval_base = master.derive(kStreamEval);

    learn::IUAgent agent = learn::IUAgent::create(cfg.arena.obs_dim(), tasks, cfg.learner,
                                                  rng_init, cfg.replay_capacity);
    explore::OUNoise noise(cfg.ou);

    std::vector<EvalRecord> records;
    const std::string records_path = (run_dir / "eval_records.csv").string();
    const std::string ckpt_path = (run_dir / "checkpoint.bin").string();

    // config snapshot for the run directory
    {
        std::ofstream meta(run_dir / "run_meta.txt");
        meta << "seed = " << seed << "\n";
        meta << "suite = " << reward::to_string(cfg.suite) << "\n";
        meta << "tasks = " << T << "\n";
        meta << "intentional = " << tasks[static_cast<std::size_t>(intentional)].name << "\n";
        meta << "total_env_steps = " << cfg.run.total_env_steps << "\n";
    }

    long eval_index = 0;
    bool stop_early = false;
    auto run_eval = [&](long env_step) {
        std::vector<EvalRecord> point;
        RandomStream eval_rng = rng_eval_base.derive(static_cast<std::uint64_t>(eval_index));
        for (int t = 0; t < T; ++t) {
            RandomStream task_rng = eval_rng.derive(static_cast<std::uint64_t>(t));
            const EvalStats st = evaluate_policy(agent.actor, t, agent.tasks, cfg.arena,
                                                 cfg.run.eval_episodes, task_rng);
            point.push_back({env_step, agent.tasks[static_cast<std::size_t>(t)].name, st.mean,
                             st.min, st.max});
        }
        records.insert(records.end(), point.begin(), point.end());
        write_eval_records(records_path, records);
        save_agent_checkpoint(ckpt_path, agent, cfg.arena, intentional, env_step,
                              cfg.run.save_replay);
        ++eval_index;
        if (on_eval && !on_eval(env_step, point)) stop_early = true;
    };

    room::WorldState state = room::reset(cfg.arena, rng_env);
    noise.reset();
    int episode_step = 0;
    int acting = intentional;
    if (cfg.mode == BehaviorMode::RandomEpisode) acting = rng_behavior.uniform_int(T);

    for (long step = 0;; ++step) {
        if (step % cfg.run.eval_every == 0 || step == cfg.run.total_env_steps) {
            run_eval(step);
            if (step == cfg.run.total_env_steps || stop_early) break;
        }

        const Eigen::VectorXd obs = room::observe(state, cfg.arena);
        const Eigen::Vector2d action =
            explore::behavior_action(agent.actor, obs, acting, noise, rng_noise);
        room::step(state, cfg.arena, action);
        const Eigen::VectorXd r = reward_vector(agent.tasks, state);
        agent.buffer.push({obs, action, r, room::observe(state, cfg.arena)});

        for (int u = 0; u < cfg.learner.updates_per_step; ++u)
            learn::train_step(agent, rng_replay);

        if (++episode_step >= cfg.arena.episode_steps) {
            state = room::reset(cfg.arena, rng_env);
            noise.reset();
            episode_step = 0;
            if (cfg.mode == BehaviorMode::RandomEpisode) acting = rng_behavior.uniform_int(T);
        }
    }
    return run_dir.string();
}

void dump_trajectory(const std::string& path, const net::ActorNet& actor, int task,
                     const std::vector<reward::TaskSpec>& tasks, const room::ArenaConfig& arena,
                     RandomStream& rng) {
    std::vector<std::string> names;
    for (const auto& t : tasks) names.push_back(t.name);
    room::TrajectoryWriter w(path, arena, names);
    room::WorldState state = room::reset(arena, rng);
    w.append(state, Eigen::Vector2d::Zero(), reward_vector(tasks, state));
    for (int t = 0; t < arena.episode_steps; ++t) {
        const Eigen::VectorXd obs = room::observe(state, arena);
        const Eigen::Vector2d a = net::actor_forward_head(actor, obs, task);
        room::step(state, arena, a);
        w.append(state, a, reward_vector(tasks, state));
    }
}

namespace {

struct TrajData {
    double side = 0.8;
    std::optional<svg::Disc> pad;
    std::vector<std::string> fields;
    std::vector<std::vector<double>> rows;
};

TrajData load_traj(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("plot: cannot open trajectory '" + path + "'");
    TrajData td;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# fields:", 0) == 0) {
                std::istringstream fs(line.substr(9));
                std::string tok;
                while (fs >> tok) td.fields.push_back(tok);
            } else {
                std::istringstream hs(line.substr(1));
                std::string tok;
                while (hs >> tok) {
                    if (tok.rfind("side_m=", 0) == 0) td.side = std::stod(tok.substr(7));
                    if (tok.rfind("pad=", 0) == 0) {
                        const auto parts = split(tok.substr(4), ',');
                        if (parts.size() == 3)
                            td.pad = svg::Disc{{std::stod(parts[0]), std::stod(parts[1])},
                                               std::stod(parts[2])};
                    }
                }
            }
            continue;
        }
        std::istringstream rs(line);
        std::vector<double> row;
        double v;
        while (rs >> v) row.push_back(v);
        if (!row.empty()) td.rows.push_back(std::move(row));
    }
    if (td.fields.empty() || td.rows.empty())
        throw IoError("plot: trajectory '" + path + "' is missing a field header or data rows");
    return td;
}

int field_index(const TrajData& td, const std::string& name) {
    for (std::size_t i = 0; i < td.fields.size(); ++i)
        if (td.fields[i] == name) return static_cast<int>(i);
    return -1;
}

void plot_trajectory(const std::string& traj_path, const std::string& out_path) {
    const TrajData td = load_traj(traj_path);
    std::vector<svg::XyPath> paths;
    auto extract = [&](const std::string& base, const std::string& color, double width) {
        const int xi = field_index(td, base + "_x");
        const int yi = field_index(td, base + "_y");
        if (xi < 0 || yi < 0) return;
        svg::XyPath p;
        p.label = base;
        p.color = color;
        p.width = width;
        for (const auto& row : td.rows) {
            if (static_cast<int>(row.size()) <= std::max(xi, yi))
                throw IoError("plot: trajectory '" + traj_path + "' has a short data row");
            p.points.emplace_back(row[static_cast<std::size_t>(xi)],
                                  row[static_cast<std::size_t>(yi)]);
        }
        paths.push_back(std::move(p));
    };
    extract("red", "#c23b22", 1.5);
    extract("blue", "#2a5fa5", 1.5);
    extract("green", "#3c8a3c", 1.5);
    extract("fist", "#000000", 2.0);
    std::vector<svg::Disc> discs;
    if (td.pad) discs.push_back(*td.pad);
    svg::write_xy_chart(out_path, fs::path(traj_path).filename().string(), td.side, paths, discs);
}

}  // namespace

void emit_plots(const std::string& run_dir) {
    const fs::path dir(run_dir);
    const fs::path records_path = dir / "eval_records.csv";
    if (!fs::exists(records_path))
        throw IoError("plot: missing eval records file '" + records_path.string() + "'");
    const std::vector<EvalRecord> records = load_eval_records(records_path.string());

    // group by task, keeping first-appearance order
    std::vector<std::string> order;
    std::map<std::string, svg::Series> by_task;
    for (const auto& r : records) {
        auto it = by_task.find(r.task);
        if (it == by_task.end()) {
            order.push_back(r.task);
            svg::Series s;
            s.label = r.task;
            s.band = true;
            it = by_task.emplace(r.task, std::move(s)).first;
        }
        it->second.x.push_back(static_cast<double>(r.env_step));
        it->second.y.push_back(r.mean);
        it->second.ylo.push_back(r.min);
        it->second.yhi.push_back(r.max);
    }

    const fs::path plots = dir / "plots";
    fs::create_directories(plots);

    std::string intentional;
    {
        std::ifstream meta(dir / "run_meta.txt");
        std::string line;
        while (meta && std::getline(meta, line)) {
            if (line.rfind("intentional = ", 0) == 0) intentional = line.substr(14);
        }
    }

    int idx = 0;
    std::vector<svg::Series> combined;
    for (const auto& name : order) {
        svg::Series s = by_task[name];
        char prefix[16];
        std::snprintf(prefix, sizeof prefix, "curve_%03d_", idx++);
        svg::write_line_chart((plots / (prefix + sanitize(name) + ".svg")).string(), name, "env steps",
                         "episodic return", {s}, 0.0, 1.0);
        s.band = false;
        s.color = task_color(name, name == intentional);
        combined.push_back(std::move(s));
    }
    // the intentional curve last so it draws on top
    std::stable_partition(combined.begin(), combined.end(),
                          [&](const svg::Series& s) { return s.label != intentional; });
    svg::write_line_chart((plots / "all_tasks.svg").string(), "all task heads", "env steps",
                     "episodic return", combined, 0.0, 1.0);

    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".traj") {
            plot_trajectory(entry.path().string(),
                            (plots / ("traj_" + sanitize(entry.path().stem().string()) + ".svg"))
                                .string());
        }
    }
}

}  // namespace iu::harness
