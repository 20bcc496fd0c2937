#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <vector>

#include "irrl/io/base64.hpp"
#include "irrl/io/checkpoint.hpp"
#include "irrl/io/csv.hpp"
#include "irrl/io/fs.hpp"
#include "irrl/io/run_config.hpp"
#include "irrl/rng.hpp"

using namespace irrl;

namespace {

std::string temp_dir(const std::string& tag) {
    const std::string dir =
        (std::filesystem::temp_directory_path() / ("irrl_io_" + tag)).string();
    std::filesystem::remove_all(dir);
    ensure_dir(dir);
    return dir;
}

}  // namespace

TEST_CASE("base64 known vectors") {
    const std::vector<std::uint8_t> man{'M', 'a', 'n'};
    CHECK(base64_encode(man) == "TWFu");
    const std::vector<std::uint8_t> ma{'M', 'a'};
    CHECK(base64_encode(ma) == "TWE=");
    const std::vector<std::uint8_t> m{'M'};
    CHECK(base64_encode(m) == "TQ==");
    CHECK(base64_decode("TWFu") == man);
    CHECK(base64_decode("TWE=") == ma);
    CHECK(base64_decode("TQ==") == m);
    CHECK_THROWS_AS(base64_decode("a"), SchemaError);
    CHECK_THROWS_AS(base64_decode("!!!!"), SchemaError);
}

TEST_CASE("f64 payloads round-trip bit-exactly") {
    RngStream rng(1);
    std::vector<double> values;
    for (int i = 0; i < 257; ++i) values.push_back(rng.normal() * std::pow(10.0, i % 60 - 30));
    values.push_back(0.0);
    values.push_back(-0.0);
    values.push_back(std::numeric_limits<double>::infinity());
    values.push_back(-std::numeric_limits<double>::infinity());
    values.push_back(std::numeric_limits<double>::quiet_NaN());
    values.push_back(std::numeric_limits<double>::denorm_min());
    const std::string text = encode_f64_le(values);
    const std::vector<double> back = decode_f64_le(text);
    REQUIRE(back.size() == values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::uint64_t a, b;
        std::memcpy(&a, &values[i], 8);
        std::memcpy(&b, &back[i], 8);
        CHECK(a == b);
    }
}

TEST_CASE("format_double is shortest round-trip") {
    CHECK(format_double(0.25) == "0.25");
    CHECK(format_double(1.0) == "1");
    const double v = 0.1 + 0.2;
    CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("config serialization is a fixed point of parsing") {
    RunConfig cfg;
    cfg.env.n_humans = 7;
    cfg.trainer.gamma = 0.95;
    cfg.seeds = {4, 9};
    cfg.output_dir = "runs/x";
    const json j1 = to_json(cfg);
    const RunConfig parsed = run_config_from_json(j1);
    const json j2 = to_json(parsed);
    CHECK(j1 == j2);
    CHECK(j1.dump(2) == j2.dump(2));
}

TEST_CASE("unknown keys and bad types are reported with their path") {
    json doc = to_json(RunConfig{});
    doc["env"]["n_hummans"] = 3;
    CHECK_THROWS_WITH_AS(run_config_from_json(doc), "unknown config key: env.n_hummans",
                         ConfigError);
    json doc2 = to_json(RunConfig{});
    doc2["trainer"]["gamma"] = "fast";
    CHECK_THROWS_WITH_AS(run_config_from_json(doc2), "trainer.gamma must be a number",
                         ConfigError);
    json doc3 = to_json(RunConfig{});
    doc3["env"]["dt"] = -0.5;
    CHECK_THROWS_WITH_AS(run_config_from_json(doc3), "env.dt must be > 0", ConfigError);
}

TEST_CASE("validation rejects duplicate seeds and bad budgets") {
    json doc = to_json(RunConfig{});
    doc["seeds"] = {1, 1};
    CHECK_THROWS_AS(run_config_from_json(doc), ConfigError);
    json doc2 = to_json(RunConfig{});
    doc2["episodes"] = 0;
    CHECK_THROWS_AS(run_config_from_json(doc2), ConfigError);
}

TEST_CASE("apply_override navigates dotted paths and parses literals") {
    json doc = to_json(RunConfig{});
    apply_override(doc, "trainer.gamma", "0.5");
    apply_override(doc, "env.ped_model", "orca");
    apply_override(doc, "episodes", "42");
    apply_override(doc, "env.pedestrians_see_robot", "false");
    const RunConfig cfg = run_config_from_json(doc);
    CHECK(cfg.trainer.gamma == 0.5);
    CHECK(cfg.env.ped_model == PedModelKind::Orca);
    CHECK(cfg.episodes == 42);
    CHECK(cfg.env.pedestrians_see_robot == false);
    CHECK_THROWS_WITH_AS(apply_override(doc, "trainer.gama", "0.5"),
                         "unknown config key: trainer.gama", ConfigError);
}

TEST_CASE("seed list parsing") {
    CHECK(parse_seed_list("1,2,3") == std::vector<std::uint64_t>{1, 2, 3});
    CHECK(parse_seed_list("1..5") == std::vector<std::uint64_t>{1, 2, 3, 4, 5});
    CHECK(parse_seed_list("7") == std::vector<std::uint64_t>{7});
    CHECK_THROWS_AS(parse_seed_list("5..1"), ConfigError);
    CHECK_THROWS_AS(parse_seed_list("a,b"), ConfigError);
}

TEST_CASE("checkpoint round trip restores the trainer bit-exactly") {
    const std::string dir = temp_dir("ckpt");
    RunConfig cfg;
    cfg.env.n_humans = 2;
    cfg.env.time_limit = 8.0;
    cfg.trainer.embed_dim = 8;
    cfg.trainer.hidden_dim = 12;
    cfg.episodes = 3;
    cfg.seeds = {11};

    Trainer trainer(cfg.trainer, 11);
    Environment env(cfg.env);
    PedController peds;
    peds.kind = cfg.env.ped_model;
    peds.sfm = cfg.sfm;
    peds.orca = cfg.orca;
    for (int ep = 0; ep < 3; ++ep) trainer.run_episode(env, peds, cfg.sfm_base);

    const std::string path = dir + "/ck.json";
    save_checkpoint(trainer, cfg, 11, path);
    LoadedCheckpoint loaded = load_checkpoint(path);
    CHECK(loaded.seed == 11);
    CHECK(loaded.trainer.episode_count() == trainer.episode_count());
    CHECK(loaded.trainer.step_count() == trainer.step_count());
    CHECK(loaded.trainer.log_alpha() == trainer.log_alpha());
    CHECK(loaded.trainer.scale_state() == trainer.scale_state());
    CHECK(loaded.trainer.noise_rng_state() == trainer.noise_rng_state());
    for (std::size_t i = 0; i < trainer.actor().params.size(); ++i) {
        CHECK(loaded.trainer.actor().params[i].w == trainer.actor().params[i].w);
    }
    for (std::size_t i = 0; i < trainer.critic().params.size(); ++i) {
        CHECK(loaded.trainer.critic().params[i].w == trainer.critic().params[i].w);
    }

    // load -> save is byte-identical
    const std::string path2 = dir + "/ck2.json";
    save_checkpoint(loaded.trainer, loaded.config, loaded.seed, path2);
    CHECK(read_file(path) == read_file(path2));
}

TEST_CASE("checkpoint schema mismatch names the versions") {
    const std::string dir = temp_dir("schema");
    RunConfig cfg;
    cfg.trainer.embed_dim = 4;
    cfg.trainer.hidden_dim = 6;
    Trainer trainer(cfg.trainer, 1);
    json j = checkpoint_to_json(trainer, cfg, 1);
    j["schema_version"] = 999;
    const std::string path = dir + "/bad.json";
    write_file(path, j.dump());
    CHECK_THROWS_WITH_AS(load_checkpoint(path),
                         "checkpoint schema mismatch: expected version 1, found 999",
                         SchemaError);
}

TEST_CASE("csv writer emits stable rows and read_csv parses them back") {
    const std::string dir = temp_dir("csv");
    const std::string path = dir + "/t.csv";
    {
        CsvWriter w(path, "a,b,c");
        w.row().col(static_cast<std::int64_t>(1)).col(0.5).col(std::string("x"));
        w.row().col(static_cast<std::int64_t>(2)).col(1.0 / 3.0).col(std::string(""));
    }
    const CsvTable t = read_csv(path);
    CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][0] == "1");
    CHECK(t.rows[0][1] == "0.5");
    CHECK(t.rows[1][2] == "");
    CHECK(std::stod(t.rows[1][1]) == 1.0 / 3.0);
}
