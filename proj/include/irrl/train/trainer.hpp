#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "irrl/errors.hpp"
#include "irrl/net/model.hpp"
#include "irrl/net/param_tree.hpp"
#include "irrl/net/tape.hpp"
#include "irrl/ped/sfm.hpp"
#include "irrl/rng.hpp"
#include "irrl/sim/env.hpp"
#include "irrl/sim/frame.hpp"
#include "irrl/train/stats.hpp"
#include "irrl/vec2.hpp"

namespace irrl {

struct TrainerConfig {
    double gamma = 0.98;           // TD discount per step (dt = 0.25 s -> ~0.92/s)
    double target_entropy = -2.0;  // H, minus the action dimension
    double lr_actor = 1e-4;
    double lr_critic = 1e-3;
    double lr_alpha = 1e-4;
    double init_alpha = 0.02;
    double residual_bound = 0.5;  // m/s, residual action box half-width
    double v_max = 1.0;           // m/s, combined-action norm cap
    bool scratch_mode = false;    // base action forced to zero (ablation)
    int embed_dim = 64;
    int hidden_dim = 128;
};

inline void validate(const TrainerConfig& cfg, const std::string& prefix) {
    auto fail = [&](const char* field, const char* why) {
        throw ConfigError(prefix + "." + field + " " + why);
    };
    if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) fail("gamma", "must be in (0, 1)");
    if (!(cfg.lr_actor > 0.0)) fail("lr_actor", "must be > 0");
    if (!(cfg.lr_critic > 0.0)) fail("lr_critic", "must be > 0");
    if (!(cfg.lr_alpha > 0.0)) fail("lr_alpha", "must be > 0");
    if (!(cfg.init_alpha > 0.0)) fail("init_alpha", "must be > 0");
    if (!(cfg.residual_bound > 0.0)) fail("residual_bound", "must be > 0");
    if (!(cfg.v_max > 0.0)) fail("v_max", "must be > 0");
    if (cfg.embed_dim < 1) fail("embed_dim", "must be >= 1");
    if (cfg.hidden_dim < 1) fail("hidden_dim", "must be >= 1");
}

/// u = a_base + a_res, norm-clipped to v_max. In scratch mode the base action
/// is dropped.
inline Vec2 compose_action(const Vec2& a_base, const Vec2& a_res, double v_max,
                           bool scratch_mode = false) {
    const Vec2 u = scratch_mode ? a_res : a_base + a_res;
    return clip_norm(u, v_max);
}

/// Per-step training diagnostics.
struct TrainStepTrace {
    double td_error = 0.0;
    double sigma_delta = 1.0;
    double actor_loss = 0.0;
    double critic_loss = 0.0;
    double alpha_loss = 0.0;
    double alpha = 0.0;  // temperature used by this step's updates
    Vec2 combined_action;
    bool skipped = false;  // non-finite TD error: all updates skipped
};

/// Discount base of the *reported* return metric. The exponent is elapsed
/// time scaled by the preferred speed, so reported returns stay comparable
/// across TD-discount settings and step sizes.
inline constexpr double kReturnMetricGamma = 0.9;

struct EpisodeOutcome {
    TerminalKind terminal = TerminalKind::None;
    double duration = 0.0;             // s
    double return_discounted = 0.0;    // sum of 0.9^(t * dt * v_pref) * r_t
    double return_undiscounted = 0.0;
    int steps = 0;
};

/// Incremental residual actor-critic. Exactly one network update per
/// environment step; the only retained transition is the one currently being
/// processed. No replay buffer, no batching, no target networks.
class Trainer {
public:
    Trainer(TrainerConfig cfg, std::uint64_t seed) : cfg_(cfg), seed_(seed) {
        validate(cfg_, "trainer");
        RngStream init_rng(mix_seed(seed, 2));
        const ModelDims dims{cfg_.embed_dim, cfg_.hidden_dim};
        actor_ = build_actor_params(dims, init_rng);
        critic_ = build_critic_params(dims, init_rng);
        log_alpha_ = std::log(cfg_.init_alpha);
        noise_rng_.reseed(mix_seed(seed, 1));
    }

    const TrainerConfig& config() const { return cfg_; }
    ParamTree& actor() { return actor_; }
    ParamTree& critic() { return critic_; }
    const ParamTree& actor() const { return actor_; }
    const ParamTree& critic() const { return critic_; }
    double alpha() const { return std::exp(log_alpha_); }
    double log_alpha() const { return log_alpha_; }
    void set_log_alpha(double v) { log_alpha_ = v; }
    ScaleState& scale_state() { return scale_; }
    const ScaleState& scale_state() const { return scale_; }
    double episode_return() const { return episode_return_; }
    std::int64_t episode_count() const { return episode_count_; }
    std::int64_t step_count() const { return step_count_; }
    std::int64_t skipped_updates() const {
        return delta_skips_ + actor_.skipped_updates + critic_.skipped_updates;
    }
    double last_sigma_delta() const { return last_sigma_delta_; }
    RngStream& noise_rng() { return noise_rng_; }
    RngStream::State noise_rng_state() const { return noise_rng_.save(); }

    /// Restore loop counters and running state (checkpoint resume).
    void restore_progress(std::int64_t episodes, std::int64_t steps, double log_alpha,
                          const ScaleState& scale, const RngStream::State& noise_state,
                          std::int64_t delta_skips) {
        episode_count_ = episodes;
        step_count_ = steps;
        log_alpha_ = log_alpha;
        scale_ = scale;
        noise_rng_.restore(noise_state);
        delta_skips_ = delta_skips;
        episode_return_ = 0.0;
    }

    std::int64_t delta_skips() const { return delta_skips_; }

    /// One incremental update from the latest transition. `sample` is the
    /// residual actually executed at `s_t` (used only to rebuild u_t);
    /// `a_base_next` is the base action at `s_next` in that state's body
    /// frame. `episode_end` marks any episode end; `truncated` marks a time
    /// limit, which still bootstraps.
    TrainStepTrace train_step(const ObservationFrame& s_t, const Vec2& a_base_t,
                              const GaussianSample& sample, double reward,
                              const ObservationFrame& s_next, const Vec2& a_base_next,
                              bool episode_end, bool truncated) {
        TrainStepTrace trace;
        trace.alpha = alpha();

        // A non-finite reward would poison the running statistics; drop the
        // whole step before anything absorbs it.
        if (!std::isfinite(reward)) {
            trace.skipped = true;
            trace.td_error = std::numeric_limits<double>::quiet_NaN();
            delta_skips_ += 1;
            finish_step(episode_end);
            return trace;
        }

        // Running reward/discount/return statistics drive the TD-error scale.
        episode_return_ += reward;
        double sigma_delta;
        if (episode_end) {
            sigma_delta = scale_td_error(reward, 0.0, episode_return_, scale_);
        } else {
            sigma_delta = scale_td_error(reward, cfg_.gamma, std::nullopt, scale_);
        }
        trace.sigma_delta = sigma_delta;
        last_sigma_delta_ = sigma_delta;

        // Bootstrap action at the next state (fresh sample, as in the outer loop).
        tape_next_.clear();
        {
            const int a_slot = tape_next_.attach(actor_);
            const int c_slot = tape_next_.attach(critic_);
            const Vec2 noise{noise_rng_.normal(), noise_rng_.normal()};
            const ActorNodes next_nodes = actor_forward_tape(
                tape_next_, a_slot, actor_, s_next, base_for_net(a_base_next), noise,
                cfg_.residual_bound);
            const Vec2 res_next = tape_next_.vec2(next_nodes.residual);
            const double logp_next = tape_next_.scalar(next_nodes.log_prob);
            const Vec2 u_next = compose_action(a_base_next, res_next, cfg_.v_max, cfg_.scratch_mode);
            const NodeId u_next_node = tape_next_.input(u_next);
            const double q_next = tape_next_.scalar(
                critic_forward_tape(tape_next_, c_slot, critic_, s_next, u_next_node));

            const double gamma_eff = (episode_end && !truncated) ? 0.0 : cfg_.gamma;
            const double target = reward + gamma_eff * (q_next - trace.alpha * logp_next);

            // TD error at the executed transition.
            const Vec2 u_t = compose_action(a_base_t, sample.residual_action, cfg_.v_max,
                                            cfg_.scratch_mode);
            trace.combined_action = u_t;
            tape_q_.clear();
            const int q_slot = tape_q_.attach(critic_);
            const NodeId u_t_node = tape_q_.input(u_t);
            const NodeId q_t_node = critic_forward_tape(tape_q_, q_slot, critic_, s_t, u_t_node);
            const double q_t = tape_q_.scalar(q_t_node);
            trace.td_error = target - q_t;
            trace.critic_loss = trace.td_error / sigma_delta;

            if (!std::isfinite(trace.td_error)) {
                trace.skipped = true;
                delta_skips_ += 1;
                finish_step(episode_end);
                return trace;
            }

            // Critic: semi-gradient step on the scaled TD error, target constant.
            tape_q_.backward({{q_t_node, -trace.td_error / sigma_delta}});
            sgd_step(critic_, cfg_.lr_critic);
        }

        // Actor: fresh reparameterized sample at s_t; gradient reaches the
        // critic input through the composed action, critic frozen.
        double logp_fresh;
        {
            tape_actor_.clear();
            const int a_slot = tape_actor_.attach(actor_);
            const int c_slot = tape_actor_.attach(critic_);
            const Vec2 noise{noise_rng_.normal(), noise_rng_.normal()};
            const ActorNodes fresh = actor_forward_tape(tape_actor_, a_slot, actor_, s_t,
                                                        base_for_net(a_base_t), noise,
                                                        cfg_.residual_bound);
            NodeId u_node = fresh.residual;
            if (!cfg_.scratch_mode) {
                const double base_arr[2] = {a_base_t.x, a_base_t.y};
                u_node = tape_actor_.add_const_vec(u_node, std::span<const double>(base_arr, 2));
            }
            u_node = tape_actor_.clip_norm(u_node, cfg_.v_max);
            const NodeId q_node = critic_forward_tape(tape_actor_, c_slot, critic_, s_t, u_node);
            logp_fresh = tape_actor_.scalar(fresh.log_prob);
            trace.actor_loss = -tape_actor_.scalar(q_node) + trace.alpha * logp_fresh;
            tape_actor_.backward({{q_node, -1.0}, {fresh.log_prob, trace.alpha}});
            sgd_step(actor_, cfg_.lr_actor);
            critic_.zero_grads();
        }

        // Temperature: minimize -alpha (log pi + H) in log space, log pi constant.
        trace.alpha_loss = -trace.alpha * (logp_fresh + cfg_.target_entropy);
        if (std::isfinite(logp_fresh)) {
            log_alpha_ += cfg_.lr_alpha * trace.alpha * (logp_fresh + cfg_.target_entropy);
        }

        finish_step(episode_end);
        return trace;
    }

    /// Run one training episode: reset, then act / step / update once per
    /// transition until the episode ends.
    EpisodeOutcome run_episode(Environment& env, const PedController& peds,
                               const SfmParams& base_params) {
        ObservationFrame obs = env.reset(episode_env_seed(episode_count_));
        Vec2 a_base = base_action(env, base_params);
        EpisodeOutcome outcome;
        const double disc_step = env.config().dt * env.config().robot_pref_speed;

        while (true) {
            tape_exec_.clear();
            const int slot = tape_exec_.attach(actor_);
            const Vec2 noise{noise_rng_.normal(), noise_rng_.normal()};
            const GaussianSample sample = extract_sample(
                tape_exec_, actor_forward_tape(tape_exec_, slot, actor_, obs, base_for_net(a_base),
                                               noise, cfg_.residual_bound));
            const Vec2 u = compose_action(a_base, sample.residual_action, cfg_.v_max,
                                          cfg_.scratch_mode);
            const StepResult sr = env.step(u, peds);
            const bool episode_end = sr.terminal != TerminalKind::None;
            const bool truncated = sr.terminal == TerminalKind::Timeout;
            const Vec2 a_base_next = base_action(env, base_params);

            train_step(obs, a_base, sample, sr.reward, sr.obs, a_base_next, episode_end, truncated);

            outcome.return_undiscounted += sr.reward;
            outcome.return_discounted +=
                std::pow(kReturnMetricGamma, static_cast<double>(outcome.steps) * disc_step) * sr.reward;
            outcome.steps += 1;
            obs = sr.obs;
            a_base = a_base_next;
            if (episode_end) {
                outcome.terminal = sr.terminal;
                outcome.duration = env.state().sim_time;
                break;
            }
        }
        return outcome;
    }

    /// Base action at the environment's current state, in the body frame used
    /// by the matching observation. Zero in scratch mode.
    Vec2 base_action(Environment& env, const SfmParams& base_params) {
        if (cfg_.scratch_mode) return {0.0, 0.0};
        const EnvState& st = env.mutable_state();
        const Vec2 world = sfm_policy(st.robot, st.humans, base_params, env.config().dt,
                                      env.mutable_state().agent_rng[0]);
        return world_to_body(world, robot_heading(st.robot));
    }

    std::uint64_t episode_env_seed(std::int64_t episode_index) const {
        return mix_seed(mix_seed(seed_, 3), static_cast<std::uint64_t>(episode_index));
    }

private:
    Vec2 base_for_net(const Vec2& a_base) const {
        return cfg_.scratch_mode ? Vec2{0.0, 0.0} : a_base;
    }

    void finish_step(bool episode_end) {
        step_count_ += 1;
        if (episode_end) {
            episode_count_ += 1;
            episode_return_ = 0.0;
        }
    }

    TrainerConfig cfg_;
    std::uint64_t seed_ = 0;
    ParamTree actor_;
    ParamTree critic_;
    double log_alpha_ = 0.0;
    ScaleState scale_;
    double episode_return_ = 0.0;
    std::int64_t episode_count_ = 0;
    std::int64_t step_count_ = 0;
    std::int64_t delta_skips_ = 0;
    double last_sigma_delta_ = 1.0;
    RngStream noise_rng_;
    Tape tape_next_;
    Tape tape_q_;
    Tape tape_actor_;
    Tape tape_exec_;
};

/// Deterministic policy evaluation: the residual is bound * tanh(mean) (zero
/// noise); `theta` null evaluates the base policy alone. Consumes no trainer
/// randomness, so evaluation never perturbs training reproducibility.
inline EpisodeOutcome eval_episode(Environment& env, std::uint64_t env_seed,
                                   const PedController& peds, const SfmParams& base_params,
                                   ParamTree* theta, const TrainerConfig& cfg,
                                   Tape* scratch_tape = nullptr) {
    ObservationFrame obs = env.reset(env_seed);
    EpisodeOutcome outcome;
    const double disc_step = env.config().dt * env.config().robot_pref_speed;
    Tape local;
    Tape& tape = scratch_tape ? *scratch_tape : local;

    while (true) {
        Vec2 a_base{0.0, 0.0};
        if (!cfg.scratch_mode) {
            const EnvState& st = env.state();
            const Vec2 world = sfm_policy(st.robot, st.humans, base_params, env.config().dt,
                                          env.mutable_state().agent_rng[0]);
            a_base = world_to_body(world, robot_heading(st.robot));
        }
        Vec2 residual{0.0, 0.0};
        if (theta != nullptr) {
            tape.clear();
            const int slot = tape.attach(*theta);
            const ActorNodes nodes = actor_forward_tape(tape, slot, *theta, obs, a_base,
                                                        {0.0, 0.0}, cfg.residual_bound);
            residual = tape.vec2(nodes.residual);
        }
        const Vec2 u = compose_action(a_base, residual, cfg.v_max, cfg.scratch_mode);
        const StepResult sr = env.step(u, peds);
        outcome.return_undiscounted += sr.reward;
        outcome.return_discounted +=
            std::pow(kReturnMetricGamma, static_cast<double>(outcome.steps) * disc_step) * sr.reward;
        outcome.steps += 1;
        obs = sr.obs;
        if (sr.terminal != TerminalKind::None) {
            outcome.terminal = sr.terminal;
            outcome.duration = env.state().sim_time;
            break;
        }
    }
    return outcome;
}

}  // namespace irrl
