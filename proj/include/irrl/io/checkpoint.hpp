#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include <json.hpp>

#include "irrl/errors.hpp"
#include "irrl/io/base64.hpp"
#include "irrl/io/fs.hpp"
#include "irrl/io/run_config.hpp"
#include "irrl/net/param_tree.hpp"
#include "irrl/train/trainer.hpp"

namespace irrl {

inline constexpr int kCheckpointSchemaVersion = 1;

namespace checkpoint_detail {

inline json param_tree_to_json(const ParamTree& tree) {
    json params = json::array();
    for (const Param& p : tree.params) {
        params.push_back(json{{"name", p.name},
                              {"rows", p.rows},
                              {"cols", p.cols},
                              {"data", encode_f64_le(p.w)}});
    }
    return json{{"skipped_updates", tree.skipped_updates}, {"params", params}};
}

inline void param_tree_from_json(const json& j, ParamTree& tree) {
    const json& params = j.at("params");
    if (params.size() != tree.params.size()) {
        throw SchemaError("checkpoint parameter count mismatch: expected " +
                          std::to_string(tree.params.size()) + ", found " +
                          std::to_string(params.size()));
    }
    for (const json& pj : params) {
        const std::string name = pj.at("name").get<std::string>();
        Param& p = tree.at(tree.find(name));
        if (pj.at("rows").get<int>() != p.rows || pj.at("cols").get<int>() != p.cols) {
            throw SchemaError("checkpoint shape mismatch for parameter " + name);
        }
        std::vector<double> w = decode_f64_le(pj.at("data").get<std::string>());
        if (w.size() != p.w.size()) {
            throw SchemaError("checkpoint payload size mismatch for parameter " + name);
        }
        p.w = std::move(w);
    }
    tree.skipped_updates = j.at("skipped_updates").get<std::int64_t>();
}

inline json stat_to_json(const OnlineStat& s) {
    return json{{"n", s.n}, {"mean", s.mean}, {"m2", s.m2}};
}

inline OnlineStat stat_from_json(const json& j) {
    OnlineStat s;
    s.n = j.at("n").get<std::int64_t>();
    s.mean = j.at("mean").get<double>();
    s.m2 = j.at("m2").get<double>();
    return s;
}

inline json rng_to_json(const RngStream::State& st) {
    return json{{"s0", st.s[0]}, {"s1", st.s[1]}, {"s2", st.s[2]}, {"s3", st.s[3]},
                {"has_spare", st.has_spare}, {"spare", st.spare}};
}

inline RngStream::State rng_from_json(const json& j) {
    RngStream::State st;
    st.s[0] = j.at("s0").get<std::uint64_t>();
    st.s[1] = j.at("s1").get<std::uint64_t>();
    st.s[2] = j.at("s2").get<std::uint64_t>();
    st.s[3] = j.at("s3").get<std::uint64_t>();
    st.has_spare = j.at("has_spare").get<bool>();
    st.spare = j.at("spare").get<double>();
    return st;
}

}  // namespace checkpoint_detail

inline json checkpoint_to_json(const Trainer& trainer, const RunConfig& cfg, std::uint64_t seed) {
    return json{{"schema_version", kCheckpointSchemaVersion},
                {"kind", "irrl-checkpoint"},
                {"config", to_json(cfg)},
                {"seed", seed},
                {"episode_count", trainer.episode_count()},
                {"step_count", trainer.step_count()},
                {"delta_skips", trainer.delta_skips()},
                {"log_alpha", trainer.log_alpha()},
                {"scale", json{{"reward", checkpoint_detail::stat_to_json(
                                              trainer.scale_state().stat_reward)},
                               {"gamma", checkpoint_detail::stat_to_json(
                                             trainer.scale_state().stat_gamma)},
                               {"return_sq", checkpoint_detail::stat_to_json(
                                                 trainer.scale_state().stat_return_sq)}}},
                {"noise_rng", checkpoint_detail::rng_to_json(trainer.noise_rng_state())},
                {"actor", checkpoint_detail::param_tree_to_json(trainer.actor())},
                {"critic", checkpoint_detail::param_tree_to_json(trainer.critic())}};
}

inline void save_checkpoint(const Trainer& trainer, const RunConfig& cfg, std::uint64_t seed,
                            const std::string& path) {
    write_file(path, checkpoint_to_json(trainer, cfg, seed).dump(2) + "\n");
}

struct LoadedCheckpoint {
    RunConfig config;
    std::uint64_t seed = 0;
    Trainer trainer;
};

/// Rebuild a trainer in the exact state it was saved in. Schema mismatches
/// raise SchemaError naming the expected and found versions.
inline LoadedCheckpoint load_checkpoint_json(const json& j) {
    if (!j.is_object() || !j.contains("schema_version")) {
        throw SchemaError("not a checkpoint file (missing schema_version)");
    }
    const int version = j.at("schema_version").get<int>();
    if (version != kCheckpointSchemaVersion) {
        throw SchemaError("checkpoint schema mismatch: expected version " +
                          std::to_string(kCheckpointSchemaVersion) + ", found " +
                          std::to_string(version));
    }
    RunConfig cfg = run_config_from_json(j.at("config"));
    const std::uint64_t seed = j.at("seed").get<std::uint64_t>();
    LoadedCheckpoint loaded{cfg, seed, Trainer(cfg.trainer, seed)};

    checkpoint_detail::param_tree_from_json(j.at("actor"), loaded.trainer.actor());
    checkpoint_detail::param_tree_from_json(j.at("critic"), loaded.trainer.critic());
    ScaleState scale;
    scale.stat_reward = checkpoint_detail::stat_from_json(j.at("scale").at("reward"));
    scale.stat_gamma = checkpoint_detail::stat_from_json(j.at("scale").at("gamma"));
    scale.stat_return_sq = checkpoint_detail::stat_from_json(j.at("scale").at("return_sq"));
    loaded.trainer.restore_progress(j.at("episode_count").get<std::int64_t>(),
                                    j.at("step_count").get<std::int64_t>(),
                                    j.at("log_alpha").get<double>(), scale,
                                    checkpoint_detail::rng_from_json(j.at("noise_rng")),
                                    j.at("delta_skips").get<std::int64_t>());
    return loaded;
}

inline LoadedCheckpoint load_checkpoint(const std::string& path) {
    json j = json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) throw SchemaError("checkpoint is not valid JSON: " + path);
    return load_checkpoint_json(j);
}

}  // namespace irrl
