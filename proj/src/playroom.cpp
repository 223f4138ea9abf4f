#include "iu/playroom.hpp"

#include <cmath>
#include <cstdio>

namespace iu::room {

namespace {

// per-step block velocity decay: half-life of 2*dt
const double kDamping = std::exp2(-0.5);

// overlaps smaller than this are treated as resolved
constexpr double kContactTol = 1e-12;

Eigen::Vector2d clamp_box(const Eigen::Vector2d& p, double lo, double hi) {
    return {std::min(std::max(p.x(), lo), hi), std::min(std::max(p.y(), lo), hi)};
}

bool clamp_block(Block& b, const ArenaConfig& cfg) {
    const double lo = cfg.margin();
    const double hi = cfg.side_m - cfg.margin();
    bool changed = false;
    if (b.pos.x() < lo) { b.pos.x() = lo; if (b.vel.x() < 0) b.vel.x() = 0; changed = true; }
    if (b.pos.x() > hi) { b.pos.x() = hi; if (b.vel.x() > 0) b.vel.x() = 0; changed = true; }
    if (b.pos.y() < lo) { b.pos.y() = lo; if (b.vel.y() < 0) b.vel.y() = 0; changed = true; }
    if (b.pos.y() > hi) { b.pos.y() = hi; if (b.vel.y() > 0) b.vel.y() = 0; changed = true; }
    return changed;
}

Eigen::Vector2d contact_normal(const Eigen::Vector2d& from, const Eigen::Vector2d& to) {
    Eigen::Vector2d d = to - from;
    const double dist = d.norm();
    if (dist < 1e-15) return {1.0, 0.0};  // coincident centers: deterministic fallback
    return d / dist;
}

}  // namespace

const char* to_string(Color c) {
    switch (c) {
        case Color::Red: return "red";
        case Color::Blue: return "blue";
        case Color::Green: return "green";
    }
    return "?";
}

Color color_from_string(const std::string& s) {
    if (s == "red") return Color::Red;
    if (s == "blue") return Color::Blue;
    if (s == "green") return Color::Green;
    throw ConfigError("unknown color '" + s + "'");
}

void ArenaConfig::validate() const {
    if (!(side_m > 2.0 * object_diameter_m))
        throw ConfigError("arena: side must exceed two object diameters");
    if (colors.empty() || colors.size() > 3)
        throw ConfigError("arena: between 1 and 3 blocks supported");
    for (std::size_t i = 0; i < colors.size(); ++i)
        for (std::size_t j = i + 1; j < colors.size(); ++j)
            if (colors[i] == colors[j]) throw ConfigError("arena: duplicate block color");
    if (!(dt > 0.0)) throw ConfigError("arena: dt must be positive");
    if (!(max_speed > 0.0)) throw ConfigError("arena: max_speed must be positive");
    if (episode_steps <= 0) throw ConfigError("arena: episode_steps must be positive");
    if (pad) {
        if (pad->center.x() < 0 || pad->center.x() > side_m || pad->center.y() < 0 ||
            pad->center.y() > side_m)
            throw ConfigError("arena: pad center outside the arena");
    }
}

WorldState reset(const ArenaConfig& cfg, RandomStream& rng) {
    cfg.validate();
    const double lo = cfg.margin();
    const double hi = cfg.side_m - cfg.margin();
    const double clearance = cfg.object_diameter_m;
    const int n = cfg.n_blocks();

    for (int attempt = 0; attempt < 10000; ++attempt) {
        std::vector<Eigen::Vector2d> centers;
        centers.reserve(n + 1);
        for (int k = 0; k < n + 1; ++k)
            centers.emplace_back(rng.uniform(lo, hi), rng.uniform(lo, hi));
        bool ok = true;
        for (int i = 0; i < n + 1 && ok; ++i)
            for (int j = i + 1; j < n + 1 && ok; ++j)
                if ((centers[i] - centers[j]).norm() < clearance) ok = false;
        if (!ok) continue;

        WorldState s;
        s.fist_pos = centers[0];
        s.fist_vel.setZero();
        for (int k = 0; k < n; ++k)
            s.blocks.push_back({cfg.colors[k], centers[k + 1], Eigen::Vector2d::Zero()});
        if (cfg.pad) s.pad_pos = cfg.pad->center;
        s.step_count = 0;
        return s;
    }
    throw ConfigError("arena reset: placement rejection sampling failed (arena too crowded)");
}

namespace {

// Push blocks out of the fist and out of each other; blocks never move the
// fist. Returns the worst residual overlap, which is nonzero only when the
// block chain is jammed against the border.
double project_blocks(WorldState& state, const ArenaConfig& cfg) {
    const double contact = cfg.object_diameter_m;
    const int n = static_cast<int>(state.blocks.size());
    for (int pass = 0; pass < 64; ++pass) {
        bool moved = false;
        for (auto& b : state.blocks) {
            const double dist = (b.pos - state.fist_pos).norm();
            if (contact - dist > kContactTol) {
                const Eigen::Vector2d nrm = contact_normal(state.fist_pos, b.pos);
                b.pos = state.fist_pos + nrm * contact;
                const double rel = (state.fist_vel - b.vel).dot(nrm);
                if (rel > 0) b.vel += nrm * rel;
                moved = true;
            }
        }
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                Block& bi = state.blocks[static_cast<std::size_t>(i)];
                Block& bj = state.blocks[static_cast<std::size_t>(j)];
                const double dist = (bi.pos - bj.pos).norm();
                if (contact - dist > kContactTol) {
                    const Eigen::Vector2d nrm = contact_normal(bi.pos, bj.pos);
                    const double push = (contact - dist) / 2.0;
                    bi.pos -= nrm * push;
                    bj.pos += nrm * push;
                    const double rel = (bi.vel - bj.vel).dot(nrm);
                    if (rel > 0) {
                        bi.vel -= nrm * (rel / 2.0);
                        bj.vel += nrm * (rel / 2.0);
                    }
                    moved = true;
                }
            }
        }
        // a clamp can re-introduce an overlap, so it keeps the loop alive
        for (auto& b : state.blocks) moved |= clamp_block(b, cfg);
        if (!moved) break;
    }
    double worst = 0.0;
    for (const auto& b : state.blocks)
        worst = std::max(worst, contact - (b.pos - state.fist_pos).norm());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            worst = std::max(worst, contact - (state.blocks[static_cast<std::size_t>(i)].pos -
                                               state.blocks[static_cast<std::size_t>(j)].pos)
                                                  .norm());
    return worst;
}

constexpr double kCleanTol = 1e-10;

}  // namespace

void step(WorldState& state, const ArenaConfig& cfg, const Eigen::Vector2d& action) {
    if (!action.allFinite()) throw NumericError("playroom step: non-finite action");
    const Eigen::Vector2d a = action.cwiseMax(-1.0).cwiseMin(1.0);

    state.fist_vel = a * cfg.max_speed;
    const Eigen::Vector2d fist_from = state.fist_pos;
    const Eigen::Vector2d fist_to =
        clamp_box(fist_from + state.fist_vel * cfg.dt, 0.0, cfg.side_m);

    for (auto& b : state.blocks) b.pos += b.vel * cfg.dt;
    const std::vector<Block> drifted = state.blocks;

    state.fist_pos = fist_to;
    double resid = project_blocks(state, cfg);
    if (resid > kCleanTol) {
        // Jammed: the push is blocked by the border, so the fist stops at the
        // largest fraction of its travel that still resolves cleanly.
        auto try_alpha = [&](double alpha, WorldState& out) {
            out = state;
            out.blocks = drifted;
            out.fist_pos = clamp_box(fist_from + alpha * (fist_to - fist_from), 0.0, cfg.side_m);
            return project_blocks(out, cfg);
        };
        WorldState best;
        if (try_alpha(0.0, best) > kCleanTol) {
            // cannot happen from a valid pre-step state; keep the zero-travel
            // resolution as the safest outcome
        }
        double lo = 0.0, hi = 1.0;
        WorldState candidate;
        for (int it = 0; it < 50; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (try_alpha(mid, candidate) <= kCleanTol) {
                lo = mid;
                best = candidate;
            } else {
                hi = mid;
            }
        }
        state = best;
    }

    for (auto& b : state.blocks) b.vel *= kDamping;
    state.step_count += 1;
}

Eigen::VectorXd observe(const WorldState& state, const ArenaConfig& cfg) {
    const double half = cfg.side_m / 2.0;
    Eigen::VectorXd obs(cfg.obs_dim());
    int k = 0;
    for (const auto& b : state.blocks) {
        obs.segment<2>(k) = (b.pos - state.fist_pos) / half;
        k += 2;
    }
    if (cfg.pad) {
        if (!state.pad_pos) throw ConfigError("observe: config has a pad but the state does not");
        obs.segment<2>(k) = (*state.pad_pos - state.fist_pos) / half;
        k += 2;
    }
    obs.segment<2>(k) = (state.fist_pos - Eigen::Vector2d(half, half)) / half;
    return obs;
}

double invariant_violation(const WorldState& state, const ArenaConfig& cfg) {
    const double lo = cfg.margin();
    const double hi = cfg.side_m - cfg.margin();
    const double contact = cfg.object_diameter_m;
    double worst = 0.0;
    auto worse = [&](double v) { worst = std::max(worst, v); };

    for (const auto& b : state.blocks) {
        worse(lo - b.pos.x());
        worse(b.pos.x() - hi);
        worse(lo - b.pos.y());
        worse(b.pos.y() - hi);
        worse(contact - (b.pos - state.fist_pos).norm());
    }
    worse(0.0 - state.fist_pos.x());
    worse(state.fist_pos.x() - cfg.side_m);
    worse(0.0 - state.fist_pos.y());
    worse(state.fist_pos.y() - cfg.side_m);
    for (std::size_t i = 0; i < state.blocks.size(); ++i)
        for (std::size_t j = i + 1; j < state.blocks.size(); ++j)
            worse(contact - (state.blocks[i].pos - state.blocks[j].pos).norm());
    return worst;
}

TrajectoryWriter::TrajectoryWriter(const std::string& path, const ArenaConfig& cfg,
                                   const std::vector<std::string>& task_names)
    : out_(path, std::ios::trunc), n_blocks_(cfg.n_blocks()), has_pad_(cfg.pad.has_value()) {
    if (!out_) throw IoError("trajectory: cannot open '" + path + "' for writing");
    out_ << "# iu-trajectory v1\n";
    out_ << "# side_m=" << cfg.side_m << " object_diameter_m=" << cfg.object_diameter_m;
    if (cfg.pad)
        out_ << " pad=" << cfg.pad->center.x() << "," << cfg.pad->center.y() << ","
             << cfg.pad->radius;
    out_ << "\n# tasks:";
    for (const auto& t : task_names) out_ << " " << t;
    out_ << "\n# fields: step fist_x fist_y";
    for (const auto& c : cfg.colors) out_ << " " << to_string(c) << "_x " << to_string(c) << "_y";
    if (cfg.pad) out_ << " pad_x pad_y";
    out_ << " action_x action_y r[0..T-1]\n";
}

void TrajectoryWriter::append(const WorldState& state, const Eigen::Vector2d& action,
                              const Eigen::VectorXd& rewards) {
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, " %.17g", v);
        out_ << buf;
    };
    out_ << state.step_count;
    put(state.fist_pos.x());
    put(state.fist_pos.y());
    for (const auto& b : state.blocks) {
        put(b.pos.x());
        put(b.pos.y());
    }
    if (has_pad_ && state.pad_pos) {
        put(state.pad_pos->x());
        put(state.pad_pos->y());
    }
    put(action.x());
    put(action.y());
    for (Eigen::Index i = 0; i < rewards.size(); ++i) put(rewards(i));
    out_ << "\n";
}

}  // namespace iu::room
