// Command-line driver: train / eval / plot around the irrl library.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "irrl/harness/harness.hpp"
#include "irrl/io/checkpoint.hpp"
#include "irrl/io/run_config.hpp"
#include "irrl/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitSchema = 4;

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string seeds;
    std::string out;
    std::string ped;
};

irrl::json load_config_doc(const std::string& path) {
    irrl::json doc = irrl::to_json(irrl::RunConfig{});
    if (!path.empty()) {
        irrl::json file = irrl::json::parse(irrl::read_file(path), nullptr, false);
        if (file.is_discarded()) throw irrl::ConfigError("config is not valid JSON: " + path);
        if (!file.is_object()) throw irrl::ConfigError("config must be a JSON object: " + path);
        for (auto it = file.begin(); it != file.end(); ++it) {
            if (it->is_object() && doc.contains(it.key()) && doc[it.key()].is_object()) {
                for (auto jt = it->begin(); jt != it->end(); ++jt) {
                    doc[it.key()][jt.key()] = jt.value();
                }
            } else {
                doc[it.key()] = it.value();
            }
        }
    }
    return doc;
}

irrl::RunConfig build_config(const CommonOpts& opts,
                             const std::vector<std::string>& extra_overrides = {}) {
    irrl::json doc = load_config_doc(opts.config_path);
    for (const std::string& ov : opts.overrides) {
        const std::size_t eq = ov.find('=');
        if (eq == std::string::npos) {
            throw irrl::ConfigError("--set expects key=value, got '" + ov + "'");
        }
        irrl::apply_override(doc, ov.substr(0, eq), ov.substr(eq + 1));
    }
    for (const std::string& ov : extra_overrides) {
        const std::size_t eq = ov.find('=');
        irrl::apply_override(doc, ov.substr(0, eq), ov.substr(eq + 1));
    }
    irrl::RunConfig cfg = irrl::run_config_from_json(doc);
    if (!opts.seeds.empty()) cfg.seeds = irrl::parse_seed_list(opts.seeds);
    if (!opts.out.empty()) cfg.output_dir = opts.out;
    if (!opts.ped.empty()) {
        if (opts.ped == "sfm") {
            cfg.env.ped_model = irrl::PedModelKind::Sfm;
        } else if (opts.ped == "orca") {
            cfg.env.ped_model = irrl::PedModelKind::Orca;
        } else {
            throw irrl::ConfigError("--ped must be sfm or orca");
        }
    }
    irrl::validate(cfg);
    return cfg;
}

int run_train(const CommonOpts& opts, std::int64_t episodes, bool scratch, bool force,
              const std::string& resume) {
    std::vector<std::string> extra;
    if (episodes > 0) extra.push_back("episodes=" + std::to_string(episodes));
    if (scratch) extra.push_back("trainer.scratch_mode=true");
    irrl::RunConfig cfg = build_config(opts, extra);

    if (!resume.empty()) {
        irrl::LoadedCheckpoint loaded = irrl::load_checkpoint(resume);
        cfg.trainer = loaded.config.trainer;  // resumed nets must keep their shapes
        irrl::validate(cfg);
        if (loaded.trainer.episode_count() >= cfg.episodes) {
            throw irrl::ConfigError("checkpoint already has " +
                                    std::to_string(loaded.trainer.episode_count()) +
                                    " episodes; nothing to resume for episodes=" +
                                    std::to_string(cfg.episodes));
        }
        const std::string dir = cfg.output_dir + "/seed_" + std::to_string(loaded.seed);
        irrl::ensure_dir(cfg.output_dir);
        irrl::train_seed(cfg, loaded.seed, dir, std::move(loaded.trainer));
        std::cout << "resumed seed " << loaded.seed << " to " << cfg.episodes << " episodes\n";
        return kExitOk;
    }

    const auto results = irrl::run_training_campaign(cfg, force);
    std::cout << "trained " << results.size() << " seed(s) for " << cfg.episodes
              << " episodes each; outputs in " << cfg.output_dir << "\n";
    return kExitOk;
}

int run_eval(const CommonOpts& opts, const std::string& checkpoint_path,
             const std::string& policy, std::int64_t episodes, std::int64_t traj) {
    if (checkpoint_path.empty() && policy.empty()) {
        throw irrl::ConfigError("eval needs a checkpoint path or --policy sfm");
    }
    if (!checkpoint_path.empty() && !policy.empty()) {
        throw irrl::ConfigError("give either a checkpoint path or --policy, not both");
    }
    if (!policy.empty() && policy != "sfm") {
        throw irrl::ConfigError("--policy supports only 'sfm'");
    }

    std::optional<irrl::LoadedCheckpoint> loaded;
    irrl::RunConfig cfg;
    if (!checkpoint_path.empty()) {
        loaded = irrl::load_checkpoint(checkpoint_path);
        // The checkpoint's own config is the base; --set/--seeds/--ped/--out
        // still apply on top. The trainer section stays as trained.
        irrl::json doc = irrl::to_json(loaded->config);
        for (const std::string& ov : opts.overrides) {
            const std::size_t eq = ov.find('=');
            if (eq == std::string::npos) {
                throw irrl::ConfigError("--set expects key=value, got '" + ov + "'");
            }
            irrl::apply_override(doc, ov.substr(0, eq), ov.substr(eq + 1));
        }
        cfg = irrl::run_config_from_json(doc);
        cfg.trainer = loaded->config.trainer;
        if (!opts.seeds.empty()) cfg.seeds = irrl::parse_seed_list(opts.seeds);
        if (!opts.out.empty()) cfg.output_dir = opts.out;
        if (!opts.ped.empty()) {
            if (opts.ped != "sfm" && opts.ped != "orca") {
                throw irrl::ConfigError("--ped must be sfm or orca");
            }
            cfg.env.ped_model =
                opts.ped == "orca" ? irrl::PedModelKind::Orca : irrl::PedModelKind::Sfm;
        }
        irrl::validate(cfg);
    } else {
        cfg = build_config(opts);
    }

    const std::string out_dir = opts.out.empty() ? cfg.output_dir : opts.out;
    irrl::ParamTree* theta = loaded ? &loaded->trainer.actor() : nullptr;
    const std::string label = loaded ? "checkpoint:" + checkpoint_path : "sfm-base";
    const irrl::MetricsReport report =
        irrl::run_eval_campaign(cfg, theta, label, episodes, out_dir, traj);
    irrl::print_metrics_table(report, std::cout);
    std::cout << "metrics written to " << out_dir << "/metrics.json\n";
    return kExitOk;
}

int run_plot_cmd(const std::vector<std::string>& inputs, const std::string& out,
                 double goal_tol) {
    if (inputs.empty()) throw irrl::ConfigError("plot needs at least one input CSV");
    irrl::run_plot(inputs, out.empty() ? "." : out, goal_tol);
    std::cout << "plots written to " << (out.empty() ? "." : out) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"circle-crossing crowd navigation: incremental residual RL workbench"};
    app.set_version_flag("--version", irrl::kToolVersion);
    app.require_subcommand(1);

    CommonOpts opts;
    std::int64_t episodes_flag = 0;
    bool scratch = false;
    bool force = false;
    std::string resume;

    CLI::App* train = app.add_subcommand("train", "train the residual policy over seeds");
    train->add_option("--config", opts.config_path, "config JSON path");
    train->add_option("--seeds", opts.seeds, "seed list: 1,2,3 or 1..5");
    train->add_option("--episodes", episodes_flag, "episode budget per seed");
    train->add_option("--ped", opts.ped, "pedestrian model: sfm|orca");
    train->add_flag("--scratch", scratch, "train from scratch (no base policy)");
    train->add_option("--out", opts.out, "output directory");
    train->add_flag("--force", force, "allow writing into an existing output directory");
    train->add_option("--set", opts.overrides, "config override key=value (repeatable)");
    train->add_option("--resume", resume, "checkpoint to resume from");

    std::string eval_checkpoint;
    std::string eval_policy;
    std::int64_t eval_episodes = 500;
    std::int64_t traj = 0;
    CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint or the base policy");
    eval->add_option("checkpoint", eval_checkpoint, "checkpoint JSON path");
    eval->add_option("--policy", eval_policy, "evaluate a built-in policy (sfm)");
    eval->add_option("--config", opts.config_path, "config JSON path");
    eval->add_option("--episodes", eval_episodes, "evaluation episodes per seed");
    eval->add_option("--seeds", opts.seeds, "seed list: 1,2,3 or 1..5");
    eval->add_option("--ped", opts.ped, "pedestrian model: sfm|orca");
    eval->add_option("--out", opts.out, "output directory for metrics/trajectories");
    eval->add_option("--set", opts.overrides, "config override key=value (repeatable)");
    eval->add_option("--traj", traj, "export trajectory CSVs for the first N episodes");

    std::vector<std::string> plot_inputs;
    std::string plot_out;
    double goal_tol = 0.3;
    CLI::App* plot = app.add_subcommand("plot", "render curve/trajectory CSVs to SVG");
    plot->add_option("inputs", plot_inputs, "curve or trajectory CSV files")->required();
    plot->add_option("--out", plot_out, "output directory");
    plot->add_option("--goal-tol", goal_tol, "goal marker radius for trajectory plots [m]");

    try {
        app.parse(argc, argv);
        if (train->parsed()) return run_train(opts, episodes_flag, scratch, force, resume);
        if (eval->parsed()) {
            return run_eval(opts, eval_checkpoint, eval_policy, eval_episodes, traj);
        }
        if (plot->parsed()) return run_plot_cmd(plot_inputs, plot_out, goal_tol);
        return kExitConfig;
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    } catch (const irrl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const irrl::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const irrl::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
