#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "irrl/errors.hpp"
#include "irrl/ped/orca.hpp"
#include "irrl/ped/sfm.hpp"
#include "irrl/sim/env.hpp"
#include "irrl/train/trainer.hpp"

namespace irrl {

using nlohmann::json;

/// Full experiment configuration: one JSON document with nested sections.
struct RunConfig {
    EnvConfig env;
    TrainerConfig trainer;
    SfmParams sfm;  // pedestrians
    // Robot base policy: same force law, longer repulsion range. The wider
    // braking envelope puts the plain-SFM success rate near its usual
    // operating point in this scenario while pedestrians keep stock constants.
    SfmParams sfm_base{.relax_time = 0.5,
                       .rep_strength = 2.0,
                       .rep_range = 1.2,
                       .body_force = 0.0,
                       .neighbor_cutoff = 5.0};
    OrcaParams orca;
    std::int64_t episodes = 5000;
    std::int64_t eval_every = 100;
    std::int64_t eval_episodes = 100;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    std::string output_dir = "runs/out";
    std::uint64_t eval_seed_base = 1000000;
    std::int64_t checkpoint_every = 1000;
};

namespace config_detail {

/// Strict JSON object reader: typed field access plus unknown-key detection,
/// with dotted field paths in every diagnostic.
class StrictObj {
public:
    StrictObj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + " must be a JSON object");
    }

    void get(const char* key, double& out) {
        const json* v = fetch(key);
        if (!v) return;
        if (!v->is_number()) throw ConfigError(path_of(key) + " must be a number");
        out = v->get<double>();
    }

    void get(const char* key, bool& out) {
        const json* v = fetch(key);
        if (!v) return;
        if (!v->is_boolean()) throw ConfigError(path_of(key) + " must be a boolean");
        out = v->get<bool>();
    }

    void get(const char* key, int& out) {
        const json* v = fetch(key);
        if (!v) return;
        if (!v->is_number_integer()) throw ConfigError(path_of(key) + " must be an integer");
        out = v->get<int>();
    }

    void get(const char* key, std::int64_t& out) {
        const json* v = fetch(key);
        if (!v) return;
        if (!v->is_number_integer()) throw ConfigError(path_of(key) + " must be an integer");
        out = v->get<std::int64_t>();
    }

    void get(const char* key, std::uint64_t& out) {
        const json* v = fetch(key);
        if (!v) return;
        if (!v->is_number_integer() || (v->is_number_integer() && v->get<std::int64_t>() < 0 &&
                                        !v->is_number_unsigned())) {
            throw ConfigError(path_of(key) + " must be a non-negative integer");
        }
        out = v->get<std::uint64_t>();
    }

    void get(const char* key, std::string& out) {
        const json* v = fetch(key);
        if (!v) return;
        if (!v->is_string()) throw ConfigError(path_of(key) + " must be a string");
        out = v->get<std::string>();
    }

    void get(const char* key, PedModelKind& out) {
        std::string s = to_string(out);
        get(key, s);
        if (s == "sfm") {
            out = PedModelKind::Sfm;
        } else if (s == "orca") {
            out = PedModelKind::Orca;
        } else {
            throw ConfigError(path_of(key) + " must be \"sfm\" or \"orca\"");
        }
    }

    void get(const char* key, std::vector<std::uint64_t>& out) {
        const json* v = fetch(key);
        if (!v) return;
        if (!v->is_array()) throw ConfigError(path_of(key) + " must be an array of integers");
        out.clear();
        for (const json& e : *v) {
            if (!e.is_number_integer()) {
                throw ConfigError(path_of(key) + " must contain only integers");
            }
            out.push_back(e.get<std::uint64_t>());
        }
    }

    const json* sub(const char* key) { return fetch(key); }

    /// Throws on keys this reader never asked for.
    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.contains(it.key())) {
                throw ConfigError("unknown config key: " + path_of(it.key().c_str()));
            }
        }
    }

private:
    const json* fetch(const char* key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    std::string path_of(const char* key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

inline void read_section(const json* j, const std::string& path, EnvConfig& cfg) {
    if (!j) return;
    StrictObj o(*j, path);
    o.get("n_humans", cfg.n_humans);
    o.get("circle_radius", cfg.circle_radius);
    o.get("dt", cfg.dt);
    o.get("time_limit", cfg.time_limit);
    o.get("robot_radius", cfg.robot_radius);
    o.get("human_radius", cfg.human_radius);
    o.get("discomfort_dist", cfg.discomfort_dist);
    o.get("goal_tolerance", cfg.goal_tolerance);
    o.get("ped_model", cfg.ped_model);
    o.get("position_jitter", cfg.position_jitter);
    o.get("robot_pref_speed", cfg.robot_pref_speed);
    o.get("human_pref_speed", cfg.human_pref_speed);
    o.get("pedestrians_see_robot", cfg.pedestrians_see_robot);
    o.finish();
}

inline void read_section(const json* j, const std::string& path, TrainerConfig& cfg) {
    if (!j) return;
    StrictObj o(*j, path);
    o.get("gamma", cfg.gamma);
    o.get("target_entropy", cfg.target_entropy);
    o.get("lr_actor", cfg.lr_actor);
    o.get("lr_critic", cfg.lr_critic);
    o.get("lr_alpha", cfg.lr_alpha);
    o.get("init_alpha", cfg.init_alpha);
    o.get("residual_bound", cfg.residual_bound);
    o.get("v_max", cfg.v_max);
    o.get("scratch_mode", cfg.scratch_mode);
    o.get("embed_dim", cfg.embed_dim);
    o.get("hidden_dim", cfg.hidden_dim);
    o.finish();
}

inline void read_section(const json* j, const std::string& path, SfmParams& cfg) {
    if (!j) return;
    StrictObj o(*j, path);
    o.get("relax_time", cfg.relax_time);
    o.get("rep_strength", cfg.rep_strength);
    o.get("rep_range", cfg.rep_range);
    o.get("body_force", cfg.body_force);
    o.get("neighbor_cutoff", cfg.neighbor_cutoff);
    o.finish();
}

inline void read_section(const json* j, const std::string& path, OrcaParams& cfg) {
    if (!j) return;
    StrictObj o(*j, path);
    o.get("time_horizon", cfg.time_horizon);
    o.get("neighbor_dist", cfg.neighbor_dist);
    o.get("max_speed", cfg.max_speed);
    o.get("safety_margin", cfg.safety_margin);
    o.finish();
}

}  // namespace config_detail

inline json to_json(const EnvConfig& c) {
    return json{{"n_humans", c.n_humans},
                {"circle_radius", c.circle_radius},
                {"dt", c.dt},
                {"time_limit", c.time_limit},
                {"robot_radius", c.robot_radius},
                {"human_radius", c.human_radius},
                {"discomfort_dist", c.discomfort_dist},
                {"goal_tolerance", c.goal_tolerance},
                {"ped_model", to_string(c.ped_model)},
                {"position_jitter", c.position_jitter},
                {"robot_pref_speed", c.robot_pref_speed},
                {"human_pref_speed", c.human_pref_speed},
                {"pedestrians_see_robot", c.pedestrians_see_robot}};
}

inline json to_json(const TrainerConfig& c) {
    return json{{"gamma", c.gamma},
                {"target_entropy", c.target_entropy},
                {"lr_actor", c.lr_actor},
                {"lr_critic", c.lr_critic},
                {"lr_alpha", c.lr_alpha},
                {"init_alpha", c.init_alpha},
                {"residual_bound", c.residual_bound},
                {"v_max", c.v_max},
                {"scratch_mode", c.scratch_mode},
                {"embed_dim", c.embed_dim},
                {"hidden_dim", c.hidden_dim}};
}

inline json to_json(const SfmParams& c) {
    return json{{"relax_time", c.relax_time},
                {"rep_strength", c.rep_strength},
                {"rep_range", c.rep_range},
                {"body_force", c.body_force},
                {"neighbor_cutoff", c.neighbor_cutoff}};
}

inline json to_json(const OrcaParams& c) {
    return json{{"time_horizon", c.time_horizon},
                {"neighbor_dist", c.neighbor_dist},
                {"max_speed", c.max_speed},
                {"safety_margin", c.safety_margin}};
}

inline json to_json(const RunConfig& c) {
    return json{{"env", to_json(c.env)},
                {"trainer", to_json(c.trainer)},
                {"sfm", to_json(c.sfm)},
                {"sfm_base", to_json(c.sfm_base)},
                {"orca", to_json(c.orca)},
                {"episodes", c.episodes},
                {"eval_every", c.eval_every},
                {"eval_episodes", c.eval_episodes},
                {"seeds", c.seeds},
                {"output_dir", c.output_dir},
                {"eval_seed_base", c.eval_seed_base},
                {"checkpoint_every", c.checkpoint_every}};
}

inline void validate(const SfmParams& c, const std::string& prefix) {
    auto fail = [&](const char* field, const char* why) {
        throw ConfigError(prefix + "." + field + " " + why);
    };
    if (!(c.relax_time > 0.0)) fail("relax_time", "must be > 0");
    if (c.rep_strength < 0.0) fail("rep_strength", "must be >= 0");
    if (!(c.rep_range > 0.0)) fail("rep_range", "must be > 0");
    if (c.body_force < 0.0) fail("body_force", "must be >= 0");
    if (c.neighbor_cutoff < 0.0) fail("neighbor_cutoff", "must be >= 0");
}

inline void validate(const OrcaParams& c, const std::string& prefix) {
    auto fail = [&](const char* field, const char* why) {
        throw ConfigError(prefix + "." + field + " " + why);
    };
    if (!(c.time_horizon > 0.0)) fail("time_horizon", "must be > 0");
    if (c.neighbor_dist < 0.0) fail("neighbor_dist", "must be >= 0");
    if (!(c.max_speed > 0.0)) fail("max_speed", "must be > 0");
    if (c.safety_margin < 0.0) fail("safety_margin", "must be >= 0");
}

inline void validate(const RunConfig& c) {
    validate(c.env, "env");
    validate(c.trainer, "trainer");
    validate(c.sfm, "sfm");
    validate(c.sfm_base, "sfm_base");
    validate(c.orca, "orca");
    if (c.episodes <= 0) throw ConfigError("episodes must be > 0");
    if (c.eval_every <= 0) throw ConfigError("eval_every must be > 0");
    if (c.eval_episodes <= 0) throw ConfigError("eval_episodes must be > 0");
    if (c.checkpoint_every <= 0) throw ConfigError("checkpoint_every must be > 0");
    if (c.seeds.empty()) throw ConfigError("seeds must be non-empty");
    std::vector<std::uint64_t> sorted = c.seeds;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ConfigError("seeds must be distinct");
    }
    if (c.output_dir.empty()) throw ConfigError("output_dir must be non-empty");
    if (c.trainer.v_max > c.env.robot_pref_speed + 1e-9) {
        throw ConfigError("trainer.v_max must not exceed env.robot_pref_speed");
    }
}

/// Parse a full config document: defaults overlaid with the provided JSON,
/// unknown keys rejected with their dotted path, then validated.
inline RunConfig run_config_from_json(const json& j) {
    RunConfig cfg;
    config_detail::StrictObj top(j, "");
    config_detail::read_section(top.sub("env"), "env", cfg.env);
    config_detail::read_section(top.sub("trainer"), "trainer", cfg.trainer);
    config_detail::read_section(top.sub("sfm"), "sfm", cfg.sfm);
    config_detail::read_section(top.sub("sfm_base"), "sfm_base", cfg.sfm_base);
    config_detail::read_section(top.sub("orca"), "orca", cfg.orca);
    top.get("episodes", cfg.episodes);
    top.get("eval_every", cfg.eval_every);
    top.get("eval_episodes", cfg.eval_episodes);
    top.get("seeds", cfg.seeds);
    top.get("output_dir", cfg.output_dir);
    top.get("eval_seed_base", cfg.eval_seed_base);
    top.get("checkpoint_every", cfg.checkpoint_every);
    top.finish();
    validate(cfg);
    return cfg;
}

/// Apply one CLI override `section.key=value` onto the config document. The
/// dotted path must already exist (typo protection); the value is parsed as a
/// JSON literal, falling back to a plain string.
inline void apply_override(json& doc, const std::string& dotted_key, const std::string& value) {
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = dotted_key.find('.', start);
        const std::string part = dotted_key.substr(start, dot - start);
        if (part.empty()) throw ConfigError("bad --set key: " + dotted_key);
        if (!node->is_object() || !node->contains(part)) {
            throw ConfigError("unknown config key: " + dotted_key);
        }
        node = &(*node)[part];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    json parsed = json::parse(value, nullptr, false);
    if (parsed.is_discarded()) parsed = value;
    *node = parsed;
}

/// Seed list syntax: "1,2,3" or an inclusive range "1..5".
inline std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    auto parse_one = [](const std::string& s) -> std::uint64_t {
        try {
            std::size_t used = 0;
            const unsigned long long v = std::stoull(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("bad seed value: '" + s + "'");
        }
    };
    const std::size_t range = text.find("..");
    if (range != std::string::npos) {
        const std::uint64_t lo = parse_one(text.substr(0, range));
        const std::uint64_t hi = parse_one(text.substr(range + 2));
        if (hi < lo) throw ConfigError("bad seed range: " + text);
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        return seeds;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        seeds.push_back(parse_one(text.substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return seeds;
}

}  // namespace irrl
