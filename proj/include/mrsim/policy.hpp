#pragma once

// Pluggable per-robot decision functions for running episodes without a
// training stack: uniform random, scripted goal-seeking, a predator-prey
// encircler, and feedforward networks loaded from a text weights file.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mrsim/scenario.hpp"

namespace mrsim {

enum class PolicyKind { Random, ScriptedGoal, PreyChaser, FeedforwardFile };

struct PolicySpec {
    PolicyKind kind = PolicyKind::Random;
    std::string path;    // feedforward weights file
    bool greedy = true;  // feedforward: argmax vs softmax sampling

    /// Accepted forms: "random", "scripted_goal", "prey_chaser",
    /// "feedforward:<path>" (greedy), "feedforward_sample:<path>".
    static PolicySpec parse(const std::string& text) {
        PolicySpec spec;
        if (text == "random") {
            spec.kind = PolicyKind::Random;
        } else if (text == "scripted_goal" || text == "scripted") {
            spec.kind = PolicyKind::ScriptedGoal;
        } else if (text == "prey_chaser") {
            spec.kind = PolicyKind::PreyChaser;
        } else if (text.rfind("feedforward:", 0) == 0) {
            spec.kind = PolicyKind::FeedforwardFile;
            spec.path = text.substr(12);
        } else if (text.rfind("feedforward_sample:", 0) == 0) {
            spec.kind = PolicyKind::FeedforwardFile;
            spec.path = text.substr(19);
            spec.greedy = false;
        } else {
            throw std::invalid_argument("unknown policy '" + text + "'");
        }
        if (spec.kind == PolicyKind::FeedforwardFile && spec.path.empty())
            throw std::invalid_argument("feedforward policy needs a weights file path");
        return spec;
    }

    std::string to_string() const {
        switch (kind) {
            case PolicyKind::Random: return "random";
            case PolicyKind::ScriptedGoal: return "scripted_goal";
            case PolicyKind::PreyChaser: return "prey_chaser";
            case PolicyKind::FeedforwardFile:
                return (greedy ? "feedforward:" : "feedforward_sample:") + path;
        }
        return "random";
    }
};

enum class Activation { Relu, Tanh, Identity };

struct DenseLayer {
    int in = 0, out = 0;
    Activation activation = Activation::Identity;
    std::vector<double> w;  // out x in, row-major
    std::vector<double> b;  // out
};

inline constexpr int kWeightsFormatVersion = 1;

/// Ordered dense layers; the last layer must emit the 5 action logits.
struct FeedforwardWeights {
    std::vector<DenseLayer> layers;

    int input_dim() const { return layers.empty() ? 0 : layers.front().in; }
    int output_dim() const { return layers.empty() ? 0 : layers.back().out; }

    void validate() const {
        if (layers.empty()) throw std::invalid_argument("weights: no layers");
        for (std::size_t i = 0; i < layers.size(); ++i) {
            const auto& l = layers[i];
            if (l.in <= 0 || l.out <= 0)
                throw std::invalid_argument("weights: bad layer dimensions");
            if (l.w.size() != static_cast<std::size_t>(l.in) * l.out ||
                l.b.size() != static_cast<std::size_t>(l.out))
                throw std::invalid_argument("weights: matrix size mismatch");
            if (i > 0 && layers[i - 1].out != l.in)
                throw std::invalid_argument("weights: layer dimensions do not chain");
        }
        if (output_dim() != kNumActions)
            throw std::invalid_argument("weights: final layer must emit " +
                                        std::to_string(kNumActions) + " logits");
    }

    std::vector<double> forward(const std::vector<double>& obs) const {
        if (static_cast<int>(obs.size()) != input_dim())
            throw std::invalid_argument("feedforward: observation size " +
                                        std::to_string(obs.size()) + " does not match expected " +
                                        std::to_string(input_dim()));
        std::vector<double> x = obs;
        for (const auto& l : layers) {
            std::vector<double> y(static_cast<std::size_t>(l.out));
            for (int o = 0; o < l.out; ++o) {
                double s = l.b[static_cast<std::size_t>(o)];
                for (int i = 0; i < l.in; ++i)
                    s += l.w[static_cast<std::size_t>(o) * l.in + i] * x[static_cast<std::size_t>(i)];
                switch (l.activation) {
                    case Activation::Relu: y[static_cast<std::size_t>(o)] = s > 0 ? s : 0; break;
                    case Activation::Tanh: y[static_cast<std::size_t>(o)] = std::tanh(s); break;
                    case Activation::Identity: y[static_cast<std::size_t>(o)] = s; break;
                }
            }
            x = std::move(y);
        }
        return x;
    }

    static Activation parse_activation(const std::string& s) {
        if (s == "relu") return Activation::Relu;
        if (s == "tanh") return Activation::Tanh;
        if (s == "identity") return Activation::Identity;
        throw std::invalid_argument("weights: unknown activation '" + s + "'");
    }

    static const char* activation_name(Activation a) {
        switch (a) {
            case Activation::Relu: return "relu";
            case Activation::Tanh: return "tanh";
            case Activation::Identity: return "identity";
        }
        return "identity";
    }

    // Self-describing text format; see docs/weights_format.md.
    static FeedforwardWeights from_text(const std::string& text) {
        std::istringstream is(text);
        std::string tok;
        FeedforwardWeights ff;
        if (!(is >> tok) || tok != "mrsim-weights")
            throw std::invalid_argument("weights: missing 'mrsim-weights' magic");
        int version, num_layers;
        if (!(is >> version) || version != kWeightsFormatVersion)
            throw std::invalid_argument("weights: unsupported format version");
        if (!(is >> tok) || tok != "layers" || !(is >> num_layers) || num_layers <= 0)
            throw std::invalid_argument("weights: bad layer count");
        for (int l = 0; l < num_layers; ++l) {
            DenseLayer layer;
            int index;
            std::string act;
            if (!(is >> tok) || tok != "layer" || !(is >> index >> layer.in >> layer.out >> act))
                throw std::invalid_argument("weights: bad layer header");
            layer.activation = parse_activation(act);
            layer.w.resize(static_cast<std::size_t>(layer.in) * layer.out);
            layer.b.resize(static_cast<std::size_t>(layer.out));
            for (auto& v : layer.w)
                if (!(is >> v)) throw std::invalid_argument("weights: truncated matrix");
            for (auto& v : layer.b)
                if (!(is >> v)) throw std::invalid_argument("weights: truncated bias");
            ff.layers.push_back(std::move(layer));
        }
        ff.validate();
        return ff;
    }

    static FeedforwardWeights load(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw std::runtime_error("weights: cannot open '" + path + "'");
        std::stringstream ss;
        ss << f.rdbuf();
        return from_text(ss.str());
    }

    std::string to_text() const {
        std::ostringstream os;
        os << "mrsim-weights " << kWeightsFormatVersion << "\n";
        os << "layers " << layers.size() << "\n";
        char buf[40];
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const auto& layer = layers[l];
            os << "layer " << l << " " << layer.in << " " << layer.out << " "
               << activation_name(layer.activation) << "\n";
            for (int o = 0; o < layer.out; ++o) {
                for (int i = 0; i < layer.in; ++i) {
                    std::snprintf(buf, sizeof buf, "%.17g", layer.w[static_cast<std::size_t>(o) * layer.in + i]);
                    os << (i ? " " : "") << buf;
                }
                os << "\n";
            }
            for (int o = 0; o < layer.out; ++o) {
                std::snprintf(buf, sizeof buf, "%.17g", layer.b[static_cast<std::size_t>(o)]);
                os << (o ? " " : "") << buf;
            }
            os << "\n";
        }
        return os.str();
    }
};

/// Everything a policy may consult beyond its own observation vector.
struct PolicyContext {
    const EnvState* state = nullptr;
    const ScenarioConfig* cfg = nullptr;
    const Scenario* scenario = nullptr;
    int robot = 0;
};

namespace policydetail {

// Score each candidate waypoint by where the robot can actually be at the
// end of this env step (the controller covers at most si_max * dt *
// sub_steps meters), not by the waypoint itself: fixed-length waypoints
// would otherwise park the robot a half-step away from off-axis goals.
inline DiscreteAction argmin_action_toward(const RobotPose& pose, const Vec2& target,
                                           double step_size, const ScenarioConfig& cfg) {
    const SimParams& params = cfg.params;
    const double travel = params.si_max_speed * params.dt * cfg.sub_steps;
    const Rect arena = params.arena();
    DiscreteAction best = DiscreteAction::Stay;
    double best_d = std::numeric_limits<double>::infinity();
    for (int a = 0; a < kNumActions; ++a) {
        Vec2 wp = pose.position() + action_direction(static_cast<DiscreteAction>(a)) * step_size;
        wp.x = clamp(wp.x, arena.xmin, arena.xmax);
        wp.y = clamp(wp.y, arena.ymin, arena.ymax);
        Vec2 to_wp = wp - pose.position();
        double len = to_wp.norm();
        Vec2 reached = pose.position();
        if (len > 1e-12) reached = pose.position() + to_wp * (std::min(travel, len) / len);
        double d = distance(reached, target);
        if (d < best_d) {
            best_d = d;
            best = static_cast<DiscreteAction>(a);
        }
    }
    return best;
}

// Scripted navigation: plan a route to the goal on a coarse occupancy grid
// (other robots inflated by the barrier's stall radius), then pick the
// action that best tracks the path. Recomputed every step, so the plan
// adapts as the blockers move; a straight shot degenerates to plain greedy
// descent. Pure function of the current state.
inline DiscreteAction scripted_goal_action(const EnvState& state, const ScenarioConfig& cfg,
                                           int robot, const Vec2& goal, double step_size) {
    const SimParams& params = cfg.params;
    const double travel = params.si_max_speed * params.dt * cfg.sub_steps;
    const double robot_clear = cfg.barrier.safety_radius + 2.0 * cfg.gains.projection_distance +
                               0.03;
    const double wall_clear = cfg.barrier.boundary_margin + cfg.gains.projection_distance + 0.03;
    const Rect arena = params.arena();
    const Vec2 self = state.poses[static_cast<std::size_t>(robot)].position();

    // Occupancy grid over the arena.
    const double cell = 0.05;
    const int cols = static_cast<int>((arena.xmax - arena.xmin) / cell);
    const int rows = static_cast<int>((arena.ymax - arena.ymin) / cell);
    auto cell_center = [&](int c, int r) -> Vec2 {
        return {arena.xmin + (c + 0.5) * cell, arena.ymin + (r + 0.5) * cell};
    };
    auto cell_of = [&](const Vec2& p) -> std::pair<int, int> {
        int c = static_cast<int>(clamp((p.x - arena.xmin) / cell, 0.0, cols - 1.0));
        int r = static_cast<int>(clamp((p.y - arena.ymin) / cell, 0.0, rows - 1.0));
        return {c, r};
    };
    std::vector<char> blocked(static_cast<std::size_t>(cols) * rows, 0);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            Vec2 p = cell_center(c, r);
            bool b = p.x < arena.xmin + wall_clear || p.x > arena.xmax - wall_clear ||
                     p.y < arena.ymin + wall_clear || p.y > arena.ymax - wall_clear;
            for (std::size_t j = 0; j < state.poses.size() && !b; ++j) {
                if (static_cast<int>(j) == robot) continue;
                b = distance(p, state.poses[j].position()) < robot_clear;
            }
            blocked[static_cast<std::size_t>(r) * cols + c] = b ? 1 : 0;
        }

    auto [sc, sr] = cell_of(self);
    auto [gc, gr] = cell_of(goal);
    // The start is free by fiat; a blocked goal cell falls back to the
    // nearest free cell (another robot may be parked beside the goal).
    blocked[static_cast<std::size_t>(sr) * cols + sc] = 0;
    if (blocked[static_cast<std::size_t>(gr) * cols + gc]) {
        double best_d = std::numeric_limits<double>::infinity();
        int bc = gc, br = gr;
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                if (blocked[static_cast<std::size_t>(r) * cols + c]) continue;
                double d = distance(cell_center(c, r), goal);
                if (d < best_d) {
                    best_d = d;
                    bc = c;
                    br = r;
                }
            }
        gc = bc;
        gr = br;
    }

    // BFS from the goal so every free cell knows its distance-to-goal; then
    // steering just descends that field.
    std::vector<int> dist_field(static_cast<std::size_t>(cols) * rows, -1);
    std::vector<int> queue;
    queue.reserve(static_cast<std::size_t>(cols) * rows);
    dist_field[static_cast<std::size_t>(gr) * cols + gc] = 0;
    queue.push_back(gr * cols + gc);
    static constexpr int dc[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    static constexpr int dr[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    for (std::size_t head = 0; head < queue.size(); ++head) {
        int idx = queue[head];
        int c = idx % cols, r = idx / cols;
        for (int k = 0; k < 8; ++k) {
            int nc = c + dc[k], nr = r + dr[k];
            if (nc < 0 || nr < 0 || nc >= cols || nr >= rows) continue;
            std::size_t ni = static_cast<std::size_t>(nr) * cols + nc;
            if (blocked[ni] || dist_field[ni] >= 0) continue;
            dist_field[ni] = dist_field[static_cast<std::size_t>(r) * cols + c] + 1;
            queue.push_back(nr * cols + nc);
        }
    }

    // Subgoal: walk a few cells downhill from the start cell.
    Vec2 subgoal = goal;
    if (dist_field[static_cast<std::size_t>(sr) * cols + sc] > 0) {
        int c = sc, r = sr;
        for (int hop = 0; hop < 5; ++hop) {
            int cur = dist_field[static_cast<std::size_t>(r) * cols + c];
            if (cur <= 0) break;
            for (int k = 0; k < 8; ++k) {
                int nc = c + dc[k], nr = r + dr[k];
                if (nc < 0 || nr < 0 || nc >= cols || nr >= rows) continue;
                int nd = dist_field[static_cast<std::size_t>(nr) * cols + nc];
                if (nd >= 0 && nd < cur) {
                    c = nc;
                    r = nr;
                    break;
                }
            }
        }
        subgoal = cell_center(c, r);
        if (dist_field[static_cast<std::size_t>(sr) * cols + sc] <= 5) subgoal = goal;
    }

    // Pick the action whose reachable point this step best tracks the
    // subgoal without closing in on a blocker.
    DiscreteAction best = DiscreteAction::Stay;
    double best_score = std::numeric_limits<double>::infinity();
    for (int a = 0; a < kNumActions; ++a) {
        Vec2 wp = self + action_direction(static_cast<DiscreteAction>(a)) * step_size;
        wp.x = clamp(wp.x, arena.xmin, arena.xmax);
        wp.y = clamp(wp.y, arena.ymin, arena.ymax);
        Vec2 to_wp = wp - self;
        double len = to_wp.norm();
        Vec2 reached = self;
        if (len > 1e-12) reached = self + to_wp * (std::min(travel, len) / len);
        double score = distance(reached, subgoal);
        for (std::size_t j = 0; j < state.poses.size(); ++j) {
            if (static_cast<int>(j) == robot) continue;
            Vec2 other = state.poses[j].position();
            double d_new = distance(reached, other);
            if (d_new < distance(self, other) && d_new < robot_clear)
                score += (robot_clear - d_new);
        }
        if (score < best_score) {
            best_score = score;
            best = static_cast<DiscreteAction>(a);
        }
    }
    return best;
}

// Encircling chaser. The prey outruns any single pursuer in the open, but
// it only flees the nearest robot, so it can be herded: the closest robot
// applies pressure from the anti-corner side while the others man the two
// escape routes along the nearest corner's walls. Once the prey is boxed
// in, everyone converges on its predicted next position (the prey rule is
// deterministic and fully observable, so lead pursuit is exact).
inline DiscreteAction prey_chaser_action(const PolicyContext& ctx) {
    const auto& state = *ctx.state;
    const auto& cfg = *ctx.cfg;
    const auto& pp = std::get<PredatorPreyState>(state.scenario);
    const Rect arena = cfg.params.arena();
    std::vector<Vec2> predators;
    for (const auto& p : state.poses) predators.push_back(p.position());

    // Nearest corner to the prey, and the two wall directions out of it.
    double sx = pp.prey.x >= 0 ? 1.0 : -1.0;
    double sy = pp.prey.y >= 0 ? 1.0 : -1.0;
    Vec2 corner{sx * arena.xmax, sy * arena.ymax};
    Vec2 along_x{-sx, 0.0};
    Vec2 along_y{0.0, -sy};

    // Roles: nearest robot drives, the rest block (ties break by index).
    int driver = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < predators.size(); ++j) {
        double d = distance(predators[j], pp.prey);
        if (d < best_d) {
            best_d = d;
            driver = static_cast<int>(j);
        }
    }

    Vec2 target;
    const double corner_dist = distance(pp.prey, corner);
    if (corner_dist < 0.7) {
        // Squeeze: converge on where the prey will be after its move.
        target = prey_heuristic(pp.prey, predators, PredatorPreyScenario::prey_step(cfg), arena);
    } else if (ctx.robot == driver) {
        // Pressure from the side opposite the corner.
        Vec2 drive_dir = (corner - pp.prey) * (1.0 / corner_dist);
        target = pp.prey - drive_dir * 0.15;
    } else {
        // Stations on the two escape routes, slightly off the walls.
        int slot = 0;
        for (std::size_t j = 0; j < predators.size(); ++j) {
            if (static_cast<int>(j) == driver) continue;
            if (static_cast<int>(j) == ctx.robot) break;
            ++slot;
        }
        double reach = 0.55 + 0.35 * static_cast<double>(slot / 2);
        target = (slot % 2 == 0) ? corner + along_x * reach + along_y * 0.14
                                 : corner + along_y * reach + along_x * 0.14;
    }
    target.x = clamp(target.x, arena.xmin, arena.xmax);
    target.y = clamp(target.y, arena.ymin, arena.ymax);
    const double step = cfg.step_sizes[static_cast<std::size_t>(ctx.robot)];
    return argmin_action_toward(state.poses[static_cast<std::size_t>(ctx.robot)], target, step,
                                cfg);
}

} // namespace policydetail

class Policy {
public:
    explicit Policy(PolicySpec spec) : spec_(std::move(spec)) {
        if (spec_.kind == PolicyKind::FeedforwardFile) weights_ = FeedforwardWeights::load(spec_.path);
    }
    Policy(PolicySpec spec, FeedforwardWeights weights)
        : spec_(std::move(spec)), weights_(std::move(weights)) {
        weights_.validate();
    }

    const PolicySpec& spec() const { return spec_; }

    DiscreteAction act(const std::vector<double>& obs, SplitRng& rng,
                       const PolicyContext& ctx) const {
        switch (spec_.kind) {
            case PolicyKind::Random:
                return static_cast<DiscreteAction>(rng.uniform_int(kNumActions));
            case PolicyKind::ScriptedGoal: {
                Vec2 goal = ctx.scenario->scripted_goal(*ctx.state, *ctx.cfg, ctx.robot);
                auto sizes = ctx.scenario->step_sizes(*ctx.state, *ctx.cfg);
                return policydetail::scripted_goal_action(*ctx.state, *ctx.cfg, ctx.robot, goal,
                                                          sizes[static_cast<std::size_t>(ctx.robot)]);
            }
            case PolicyKind::PreyChaser:
                return policydetail::prey_chaser_action(ctx);
            case PolicyKind::FeedforwardFile: {
                std::vector<double> logits = weights_.forward(obs);
                if (spec_.greedy) {
                    int best = 0;
                    for (int a = 1; a < kNumActions; ++a)
                        if (logits[static_cast<std::size_t>(a)] >
                            logits[static_cast<std::size_t>(best)])
                            best = a;
                    return static_cast<DiscreteAction>(best);
                }
                // Softmax sample.
                double mx = logits[0];
                for (double l : logits) mx = std::max(mx, l);
                std::vector<double> p(logits.size());
                double z = 0.0;
                for (std::size_t i = 0; i < logits.size(); ++i) {
                    p[i] = std::exp(logits[i] - mx);
                    z += p[i];
                }
                double u = rng.uniform() * z;
                for (std::size_t i = 0; i < p.size(); ++i) {
                    u -= p[i];
                    if (u <= 0.0) return static_cast<DiscreteAction>(i);
                }
                return static_cast<DiscreteAction>(kNumActions - 1);
            }
        }
        return DiscreteAction::Stay;
    }

private:
    PolicySpec spec_;
    FeedforwardWeights weights_;
};

} // namespace mrsim
