#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "irrl/io/checkpoint.hpp"
#include "irrl/io/csv.hpp"
#include "irrl/io/fs.hpp"
#include "irrl/io/run_config.hpp"
#include "irrl/io/svg.hpp"
#include "irrl/train/trainer.hpp"
#include "irrl/version.hpp"

namespace irrl {

namespace fs = std::filesystem;

inline std::string config_hash(const RunConfig& cfg) {
    const std::string text = to_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : text) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline PedController ped_controller_of(const RunConfig& cfg) {
    PedController p;
    p.kind = cfg.env.ped_model;
    p.sfm = cfg.sfm;
    p.orca = cfg.orca;
    return p;
}

inline std::uint64_t eval_env_seed(std::uint64_t eval_seed_base, std::int64_t episode) {
    return mix_seed(eval_seed_base, static_cast<std::uint64_t>(episode));
}

/// Metrics of one evaluation block (fixed episode set, deterministic policy).
struct EvalStats {
    double return_disc_mean = 0.0;
    double return_undisc_mean = 0.0;
    double success_rate = 0.0;
    double collision_rate = 0.0;
    double timeout_rate = 0.0;
    double exec_time_mean = std::numeric_limits<double>::quiet_NaN();  // successes only
    std::int64_t episodes = 0;
};

/// Observer invoked after reset (result == nullptr) and after every step.
using StepObserver = std::function<void(const EnvState&, const StepResult*)>;

/// Same loop as eval_episode but with a recording hook.
inline EpisodeOutcome eval_episode_observed(Environment& env, std::uint64_t env_seed,
                                            const PedController& peds,
                                            const SfmParams& base_params, ParamTree* theta,
                                            const TrainerConfig& cfg, Tape* tape,
                                            const StepObserver& observer) {
    ObservationFrame obs = env.reset(env_seed);
    if (observer) observer(env.state(), nullptr);
    EpisodeOutcome outcome;
    const double disc_step = env.config().dt * env.config().robot_pref_speed;
    Tape local;
    Tape& t = tape ? *tape : local;
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
            t.clear();
            const int slot = t.attach(*theta);
            const ActorNodes nodes =
                actor_forward_tape(t, slot, *theta, obs, a_base, {0.0, 0.0}, cfg.residual_bound);
            residual = t.vec2(nodes.residual);
        }
        const Vec2 u = compose_action(a_base, residual, cfg.v_max, cfg.scratch_mode);
        const StepResult sr = env.step(u, peds);
        if (observer) observer(env.state(), &sr);
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

/// Deterministic evaluation over the fixed episode set
/// {mix_seed(eval_seed_base, e)}. theta == nullptr evaluates the base policy.
inline EvalStats evaluate_policy(const RunConfig& cfg, ParamTree* theta, std::int64_t episodes,
                                 Environment& env, Tape& tape,
                                 const StepObserver& observer = {},
                                 std::int64_t observe_first = 0) {
    const PedController peds = ped_controller_of(cfg);
    EvalStats stats;
    stats.episodes = episodes;
    double exec_sum = 0.0;
    std::int64_t successes = 0;
    const StepObserver no_observer;
    for (std::int64_t e = 0; e < episodes; ++e) {
        const std::uint64_t env_seed = eval_env_seed(cfg.eval_seed_base, e);
        const bool observe = observer && e < observe_first;
        const EpisodeOutcome out =
            eval_episode_observed(env, env_seed, peds, cfg.sfm_base, theta, cfg.trainer, &tape,
                                  observe ? observer : no_observer);
        stats.return_disc_mean += out.return_discounted;
        stats.return_undisc_mean += out.return_undiscounted;
        switch (out.terminal) {
            case TerminalKind::Success:
                stats.success_rate += 1.0;
                exec_sum += out.duration;
                ++successes;
                break;
            case TerminalKind::Collision:
                stats.collision_rate += 1.0;
                break;
            default:
                stats.timeout_rate += 1.0;
                break;
        }
    }
    const double n = static_cast<double>(episodes);
    stats.return_disc_mean /= n;
    stats.return_undisc_mean /= n;
    stats.success_rate /= n;
    stats.collision_rate /= n;
    stats.timeout_rate /= n;
    if (successes > 0) exec_sum /= static_cast<double>(successes);
    stats.exec_time_mean =
        successes > 0 ? exec_sum : std::numeric_limits<double>::quiet_NaN();
    return stats;
}

inline constexpr const char* kCurveHeader =
    "episode,eval_return_mean,eval_success,eval_collision,eval_timeout,exec_time_mean,alpha,"
    "sigma_delta_last";

struct TrainSeedResult {
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;
    std::int64_t skipped_updates = 0;
    std::string curve_path;
    std::string final_checkpoint_path;
};

/// Train one seed to cfg.episodes, appending one curve row per evaluation
/// checkpoint and checkpointing every checkpoint_every episodes (last three
/// kept, plus the final). Pass a loaded trainer to resume a split run.
inline TrainSeedResult train_seed(const RunConfig& cfg, std::uint64_t seed,
                                  const std::string& seed_dir,
                                  std::optional<Trainer> resumed = std::nullopt) {
    const auto t0 = std::chrono::steady_clock::now();
    ensure_dir(seed_dir);
    Trainer trainer = resumed ? std::move(*resumed) : Trainer(cfg.trainer, seed);
    Environment train_env(cfg.env);
    Environment eval_env(cfg.env);
    Tape eval_tape;
    const PedController peds = ped_controller_of(cfg);

    const std::string curve_path = seed_dir + "/curve.csv";
    CsvWriter curve(curve_path, kCurveHeader, /*append=*/resumed.has_value());
    std::vector<std::int64_t> kept_checkpoints;

    for (std::int64_t ep = trainer.episode_count(); ep < cfg.episodes; ++ep) {
        trainer.run_episode(train_env, peds, cfg.sfm_base);
        const std::int64_t done = ep + 1;
        if (done % cfg.eval_every == 0) {
            const EvalStats ev =
                evaluate_policy(cfg, &trainer.actor(), cfg.eval_episodes, eval_env, eval_tape);
            curve.row()
                .col(done)
                .col(ev.return_disc_mean)
                .col(ev.success_rate)
                .col(ev.collision_rate)
                .col(ev.timeout_rate)
                .col(ev.exec_time_mean)
                .col(trainer.alpha())
                .col(trainer.last_sigma_delta());
            curve.flush();
        }
        if (done % cfg.checkpoint_every == 0 && done != cfg.episodes) {
            const std::string path = seed_dir + "/checkpoint_ep" + std::to_string(done) + ".json";
            save_checkpoint(trainer, cfg, seed, path);
            kept_checkpoints.push_back(done);
            if (kept_checkpoints.size() > 3) {
                const std::string old = seed_dir + "/checkpoint_ep" +
                                        std::to_string(kept_checkpoints.front()) + ".json";
                kept_checkpoints.erase(kept_checkpoints.begin());
                std::error_code ec;
                fs::remove(old, ec);
            }
        }
    }

    TrainSeedResult result;
    result.seed = seed;
    result.skipped_updates = trainer.skipped_updates();
    result.curve_path = curve_path;
    result.final_checkpoint_path = seed_dir + "/checkpoint_final.json";
    save_checkpoint(trainer, cfg, seed, result.final_checkpoint_path);
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json manifest{{"schema_version", 1},
                  {"tool_version", kToolVersion},
                  {"config_hash", config_hash(cfg)},
                  {"seed", seed},
                  {"episodes", cfg.episodes},
                  {"wall_time_seconds", result.wall_seconds},
                  {"skipped_updates", result.skipped_updates}};
    write_file(seed_dir + "/manifest.json", manifest.dump(2) + "\n");
    return result;
}

/// Run every seed of the campaign, in parallel when hardware allows. Existing
/// non-empty output directories are refused unless `force` is set.
inline std::vector<TrainSeedResult> run_training_campaign(const RunConfig& cfg, bool force,
                                                          bool quiet = false) {
    const auto t0 = std::chrono::steady_clock::now();
    if (fs::exists(cfg.output_dir) && !fs::is_empty(cfg.output_dir) && !force) {
        throw ConfigError("output directory exists and is not empty: " + cfg.output_dir +
                          " (re-run with --force to overwrite)");
    }
    ensure_dir(cfg.output_dir);
    write_file(cfg.output_dir + "/config.json", to_json(cfg).dump(2) + "\n");

    std::vector<TrainSeedResult> results(cfg.seeds.size());
    std::vector<std::exception_ptr> errors(cfg.seeds.size());
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>(hw, cfg.seeds.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cfg.seeds.size()) return;
            const std::uint64_t seed = cfg.seeds[i];
            try {
                const std::string dir = cfg.output_dir + "/seed_" + std::to_string(seed);
                results[i] = train_seed(cfg, seed, dir);
                if (!quiet) {
                    std::string line = "seed " + std::to_string(seed) + " done in " +
                                       std::to_string(results[i].wall_seconds) + " s\n";
                    std::cout << line << std::flush;
                }
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    json seeds_json = json::array();
    for (const TrainSeedResult& r : results) {
        seeds_json.push_back(json{{"seed", r.seed},
                                  {"wall_time_seconds", r.wall_seconds},
                                  {"skipped_updates", r.skipped_updates}});
    }
    json manifest{{"schema_version", 1},
                  {"tool_version", kToolVersion},
                  {"config_hash", config_hash(cfg)},
                  {"episodes", cfg.episodes},
                  {"wall_time_seconds",
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()},
                  {"seeds", seeds_json}};
    write_file(cfg.output_dir + "/manifest.json", manifest.dump(2) + "\n");
    return results;
}

struct SeedMetrics {
    std::uint64_t seed = 0;
    EvalStats stats;
};

struct Aggregate {
    double mean = 0.0;
    double stddev = 0.0;  // population std across seeds
};

inline Aggregate aggregate_of(const std::vector<double>& values) {
    Aggregate a;
    if (values.empty()) return a;
    bool all_equal = true;
    for (double v : values) all_equal = all_equal && v == values.front();
    if (all_equal) {
        a.mean = values.front();  // keeps identical inputs at exactly zero spread
        return a;
    }
    for (double v : values) a.mean += v;
    a.mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - a.mean) * (v - a.mean);
    a.stddev = std::sqrt(var / static_cast<double>(values.size()));
    return a;
}

struct MetricsReport {
    std::vector<SeedMetrics> per_seed;
    Aggregate success_rate, collision_rate, timeout_rate, exec_time_mean, return_disc,
        return_undisc;
    std::string policy_label;
    std::string ped_model;
    std::int64_t episodes_per_seed = 0;
};

inline MetricsReport aggregate_metrics(std::vector<SeedMetrics> per_seed,
                                       const std::string& policy_label,
                                       const std::string& ped_model, std::int64_t episodes) {
    MetricsReport report;
    report.per_seed = std::move(per_seed);
    report.policy_label = policy_label;
    report.ped_model = ped_model;
    report.episodes_per_seed = episodes;
    auto collect = [&](auto field) {
        std::vector<double> vals;
        for (const SeedMetrics& s : report.per_seed) {
            const double v = field(s.stats);
            if (std::isfinite(v)) vals.push_back(v);
        }
        return aggregate_of(vals);
    };
    report.success_rate = collect([](const EvalStats& s) { return s.success_rate; });
    report.collision_rate = collect([](const EvalStats& s) { return s.collision_rate; });
    report.timeout_rate = collect([](const EvalStats& s) { return s.timeout_rate; });
    report.exec_time_mean = collect([](const EvalStats& s) { return s.exec_time_mean; });
    report.return_disc = collect([](const EvalStats& s) { return s.return_disc_mean; });
    report.return_undisc = collect([](const EvalStats& s) { return s.return_undisc_mean; });
    return report;
}

inline json to_json(const MetricsReport& r) {
    json per_seed = json::array();
    for (const SeedMetrics& s : r.per_seed) {
        per_seed.push_back(json{{"seed", s.seed},
                                {"success_rate", s.stats.success_rate},
                                {"collision_rate", s.stats.collision_rate},
                                {"timeout_rate", s.stats.timeout_rate},
                                {"exec_time_mean", s.stats.exec_time_mean},
                                {"return_mean_discounted", s.stats.return_disc_mean},
                                {"return_mean_undiscounted", s.stats.return_undisc_mean},
                                {"episodes", s.stats.episodes}});
    }
    auto agg = [](const Aggregate& a) { return json{{"mean", a.mean}, {"std", a.stddev}}; };
    return json{{"schema_version", 1},
                {"tool_version", kToolVersion},
                {"policy", r.policy_label},
                {"ped_model", r.ped_model},
                {"episodes_per_seed", r.episodes_per_seed},
                {"per_seed", per_seed},
                {"aggregate", json{{"success_rate", agg(r.success_rate)},
                                   {"collision_rate", agg(r.collision_rate)},
                                   {"timeout_rate", agg(r.timeout_rate)},
                                   {"exec_time_mean", agg(r.exec_time_mean)},
                                   {"return_mean_discounted", agg(r.return_disc)},
                                   {"return_mean_undiscounted", agg(r.return_undisc)}}},
                {"metadata",
                 json{{"exec_time_note", "mean over successful episodes only"},
                      {"return_discount_note",
                       "discount exponent is elapsed time times preferred speed"}}}};
}

inline void print_metrics_table(const MetricsReport& r, std::ostream& out) {
    char line[256];
    out << "policy: " << r.policy_label << "  pedestrians: " << r.ped_model
        << "  episodes/seed: " << r.episodes_per_seed << "\n";
    std::snprintf(line, sizeof(line), "%-8s %9s %11s %9s %11s %13s\n", "seed", "success",
                  "collision", "timeout", "exec[s]", "return(disc)");
    out << line;
    for (const SeedMetrics& s : r.per_seed) {
        std::snprintf(line, sizeof(line), "%-8llu %9.3f %11.3f %9.3f %11.2f %13.4f\n",
                      static_cast<unsigned long long>(s.seed), s.stats.success_rate,
                      s.stats.collision_rate, s.stats.timeout_rate, s.stats.exec_time_mean,
                      s.stats.return_disc_mean);
        out << line;
    }
    std::snprintf(line, sizeof(line), "%-8s %5.3f+-%.3f %7.3f+-%.3f %5.3f+-%.3f %7.2f+-%.2f %9.4f+-%.4f\n",
                  "mean", r.success_rate.mean, r.success_rate.stddev, r.collision_rate.mean,
                  r.collision_rate.stddev, r.timeout_rate.mean, r.timeout_rate.stddev,
                  r.exec_time_mean.mean, r.exec_time_mean.stddev, r.return_disc.mean,
                  r.return_disc.stddev);
    out << line;
}

inline constexpr const char* kTrajectoryHeader =
    "step,sim_time,agent_id,x,y,vx,vy,reward,terminal_flag";

/// CSV recorder: one row per agent per step (agent 0 is the robot); the step's
/// reward and terminal flag repeat on every row of that step.
class TrajectoryRecorder {
public:
    explicit TrajectoryRecorder(const std::string& path) : csv_(path, kTrajectoryHeader) {}

    void operator()(const EnvState& st, const StepResult* sr) {
        const double reward = sr ? sr->reward : 0.0;
        const char* flag = sr ? to_string(sr->terminal) : "none";
        write_agent(st, 0, st.robot, reward, flag);
        for (std::size_t i = 0; i < st.humans.size(); ++i) {
            write_agent(st, static_cast<int>(i) + 1, st.humans[i], reward, flag);
        }
        csv_.flush();
    }

private:
    void write_agent(const EnvState& st, int id, const WorldAgent& agent, double reward,
                     const char* flag) {
        csv_.row()
            .col(st.step_count)
            .col(st.sim_time)
            .col(static_cast<std::int64_t>(id))
            .col(agent.position.x)
            .col(agent.position.y)
            .col(agent.velocity.x)
            .col(agent.velocity.y)
            .col(reward)
            .col(std::string(flag));
    }

    CsvWriter csv_;
};

/// Full evaluation campaign (the `eval` subcommand): one metrics block per
/// seed on the shared deterministic episode set, optional trajectory export
/// for the first seed.
inline MetricsReport run_eval_campaign(const RunConfig& cfg, ParamTree* theta,
                                       const std::string& policy_label, std::int64_t episodes,
                                       const std::string& out_dir, std::int64_t traj_episodes) {
    if (!out_dir.empty()) ensure_dir(out_dir);
    std::vector<SeedMetrics> per_seed;
    Environment env(cfg.env);
    Tape tape;
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
        SeedMetrics sm;
        sm.seed = cfg.seeds[i];
        if (i == 0 && traj_episodes > 0 && !out_dir.empty()) {
            ensure_dir(out_dir + "/traj");
            std::int64_t current = -1;
            std::unique_ptr<TrajectoryRecorder> recorder;
            const StepObserver observer = [&](const EnvState& st, const StepResult* sr) {
                if (sr == nullptr) {
                    ++current;
                    recorder = std::make_unique<TrajectoryRecorder>(
                        out_dir + "/traj/ep_" + std::to_string(current) + ".csv");
                }
                (*recorder)(st, sr);
            };
            sm.stats = evaluate_policy(cfg, theta, episodes, env, tape, observer, traj_episodes);
        } else {
            sm.stats = evaluate_policy(cfg, theta, episodes, env, tape);
        }
        per_seed.push_back(sm);
    }
    MetricsReport report = aggregate_metrics(std::move(per_seed), policy_label,
                                             to_string(cfg.env.ped_model), episodes);
    if (!out_dir.empty()) write_file(out_dir + "/metrics.json", to_json(report).dump(2) + "\n");
    return report;
}

/// The `plot` subcommand: learning-curve CSVs become per-seed and mean+-std
/// band SVGs; trajectory CSVs become spatial plots. Curve inputs must share
/// one episode grid.
inline void run_plot(const std::vector<std::string>& inputs, const std::string& out_dir,
                     double goal_tolerance_marker = 0.3) {
    ensure_dir(out_dir);
    std::vector<std::string> curve_files;
    std::vector<std::string> traj_files;
    for (const std::string& path : inputs) {
        const CsvTable t = read_csv(path);
        if (!t.header.empty() && t.header[0] == "episode") {
            curve_files.push_back(path);
        } else if (!t.header.empty() && t.header[0] == "step") {
            traj_files.push_back(path);
        } else {
            throw ConfigError("unrecognized CSV header in " + path);
        }
    }

    if (!curve_files.empty()) {
        std::vector<CurveSeries> series;
        std::vector<double> grid;
        std::vector<std::string> offending;
        for (const std::string& path : curve_files) {
            const CsvTable t = read_csv(path);
            const int ep_col = t.column("episode");
            const int ret_col = t.column("eval_return_mean");
            if (ep_col < 0 || ret_col < 0) throw ConfigError("missing curve columns in " + path);
            CurveSeries s;
            s.label = fs::path(path).parent_path().filename().string();
            if (s.label.empty()) s.label = fs::path(path).stem().string();
            for (const auto& row : t.rows) {
                s.x.push_back(std::stod(row[static_cast<std::size_t>(ep_col)]));
                s.y.push_back(std::stod(row[static_cast<std::size_t>(ret_col)]));
            }
            if (grid.empty()) {
                grid = s.x;
            } else if (grid != s.x) {
                offending.push_back(path);
            }
            series.push_back(std::move(s));
        }
        if (!offending.empty()) {
            std::string msg = "episode grids do not match " + curve_files.front() + ":";
            for (const std::string& p : offending) msg += " " + p;
            throw ConfigError(msg);
        }
        write_curves_svg(out_dir + "/curves_seeds.svg", series, "evaluation return per seed",
                         "training episodes", "mean discounted return");
        std::vector<double> mean(grid.size(), 0.0);
        std::vector<double> stddev(grid.size(), 0.0);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            std::vector<double> vals;
            for (const CurveSeries& s : series) vals.push_back(s.y[i]);
            const Aggregate a = aggregate_of(vals);
            mean[i] = a.mean;
            stddev[i] = a.stddev;
        }
        write_band_svg(out_dir + "/curves_band.svg", grid, mean, stddev,
                       "evaluation return, mean +- std across seeds", "training episodes",
                       "mean discounted return");
    }

    for (const std::string& path : traj_files) {
        const CsvTable t = read_csv(path);
        const int id_col = t.column("agent_id");
        const int x_col = t.column("x");
        const int y_col = t.column("y");
        if (id_col < 0 || x_col < 0 || y_col < 0) {
            throw ConfigError("missing trajectory columns in " + path);
        }
        std::vector<TrajectorySeries> agents;
        for (const auto& row : t.rows) {
            const int id = std::stoi(row[static_cast<std::size_t>(id_col)]);
            while (static_cast<int>(agents.size()) <= id) {
                TrajectorySeries s;
                s.agent_id = static_cast<int>(agents.size());
                agents.push_back(s);
            }
            agents[static_cast<std::size_t>(id)].points.push_back(
                {std::stod(row[static_cast<std::size_t>(x_col)]),
                 std::stod(row[static_cast<std::size_t>(y_col)])});
        }
        Vec2 goal{0.0, 0.0};
        if (!agents.empty() && !agents[0].points.empty()) goal = -agents[0].points.front();
        const std::string name = fs::path(path).stem().string();
        write_trajectory_svg(out_dir + "/traj_" + name + ".svg", agents, goal,
                             goal_tolerance_marker, "trajectories: " + name);
    }
}

}  // namespace irrl
