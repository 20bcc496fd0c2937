#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "irrl/harness/harness.hpp"
#include "irrl/io/checkpoint.hpp"

using namespace irrl;

namespace {

std::string temp_dir(const std::string& tag) {
    const std::string dir =
        (std::filesystem::temp_directory_path() / ("irrl_harness_" + tag)).string();
    std::filesystem::remove_all(dir);
    return dir;
}

RunConfig mini_config(const std::string& out) {
    RunConfig cfg;
    cfg.env.n_humans = 2;
    cfg.env.time_limit = 8.0;
    cfg.trainer.embed_dim = 8;
    cfg.trainer.hidden_dim = 12;
    cfg.episodes = 30;
    cfg.eval_every = 10;
    cfg.eval_episodes = 3;
    cfg.checkpoint_every = 15;
    cfg.seeds = {1, 2};
    cfg.output_dir = out;
    return cfg;
}

/// Extract the points="..." attribute of the first element with this class.
std::vector<Vec2> svg_points(const std::string& svg, const std::string& cls) {
    const std::string needle = "class=\"" + cls + "\"";
    const std::size_t at = svg.find(needle);
    REQUIRE(at != std::string::npos);
    const std::size_t pts = svg.find("points=\"", at);
    REQUIRE(pts != std::string::npos);
    const std::size_t end = svg.find('"', pts + 8);
    std::vector<Vec2> out;
    std::string token;
    std::stringstream ss(svg.substr(pts + 8, end - pts - 8));
    while (ss >> token) {
        const std::size_t comma = token.find(',');
        out.push_back({std::stod(token.substr(0, comma)), std::stod(token.substr(comma + 1))});
    }
    return out;
}

Vec2 svg_circle_center(const std::string& svg, const std::string& cls) {
    const std::string needle = "class=\"" + cls + "\"";
    const std::size_t at = svg.find(needle);
    REQUIRE(at != std::string::npos);
    const std::size_t cx = svg.find("cx=\"", at);
    const std::size_t cy = svg.find("cy=\"", at);
    REQUIRE(cx != std::string::npos);
    REQUIRE(cy != std::string::npos);
    return {std::stod(svg.substr(cx + 4)), std::stod(svg.substr(cy + 4))};
}

}  // namespace

TEST_CASE("training campaign writes curves, checkpoints and manifests deterministically") {
    const std::string out1 = temp_dir("campaign1");
    const std::string out2 = temp_dir("campaign2");
    RunConfig cfg = mini_config(out1);
    run_training_campaign(cfg, false, /*quiet=*/true);

    for (const std::uint64_t seed : cfg.seeds) {
        const std::string dir = out1 + "/seed_" + std::to_string(seed);
        const CsvTable curve = read_csv(dir + "/curve.csv");
        CHECK(curve.rows.size() == 3);  // 30 episodes, eval every 10
        CHECK(curve.header[0] == "episode");
        CHECK(curve.rows[0][0] == "10");
        CHECK(curve.rows[2][0] == "30");
        CHECK(std::filesystem::exists(dir + "/checkpoint_ep15.json"));
        CHECK(std::filesystem::exists(dir + "/checkpoint_final.json"));
        CHECK(std::filesystem::exists(dir + "/manifest.json"));
        // partition invariant on each eval row
        const int s = curve.column("eval_success");
        const int c = curve.column("eval_collision");
        const int t = curve.column("eval_timeout");
        for (const auto& row : curve.rows) {
            const double total = std::stod(row[static_cast<std::size_t>(s)]) +
                                 std::stod(row[static_cast<std::size_t>(c)]) +
                                 std::stod(row[static_cast<std::size_t>(t)]);
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    // identical rerun is byte-identical on curves and config
    RunConfig cfg2 = mini_config(out2);
    run_training_campaign(cfg2, false, true);
    for (const std::uint64_t seed : cfg.seeds) {
        const std::string a = out1 + "/seed_" + std::to_string(seed) + "/curve.csv";
        const std::string b = out2 + "/seed_" + std::to_string(seed) + "/curve.csv";
        CHECK(read_file(a) == read_file(b));
    }
    json c1 = json::parse(read_file(out1 + "/config.json"));
    json c2 = json::parse(read_file(out2 + "/config.json"));
    c1.erase("output_dir");
    c2.erase("output_dir");
    CHECK(c1 == c2);
}

TEST_CASE("existing non-empty output directory is refused without force") {
    const std::string out = temp_dir("refuse");
    ensure_dir(out);
    write_file(out + "/stale.txt", "old");
    RunConfig cfg = mini_config(out);
    cfg.episodes = 5;
    cfg.eval_every = 5;
    cfg.eval_episodes = 1;
    CHECK_THROWS_AS(run_training_campaign(cfg, false, true), ConfigError);
    CHECK_NOTHROW(run_training_campaign(cfg, true, true));
}

TEST_CASE("split training resumes to the same final state as a straight run") {
    const std::string straight_dir = temp_dir("straight");
    const std::string split_dir = temp_dir("split");

    RunConfig cfg = mini_config(straight_dir);
    cfg.seeds = {5};
    cfg.episodes = 24;
    cfg.eval_every = 8;
    cfg.checkpoint_every = 12;
    run_training_campaign(cfg, false, true);

    RunConfig phase1 = cfg;
    phase1.output_dir = split_dir;
    phase1.episodes = 12;
    run_training_campaign(phase1, false, true);
    LoadedCheckpoint loaded =
        load_checkpoint(split_dir + "/seed_5/checkpoint_final.json");
    CHECK(loaded.trainer.episode_count() == 12);
    RunConfig phase2 = cfg;
    phase2.output_dir = split_dir;
    train_seed(phase2, 5, split_dir + "/seed_5", std::move(loaded.trainer));

    // Final state is bit-identical; the checkpoint files differ only in the
    // embedded output_dir, so compare the loaded state.
    LoadedCheckpoint straight = load_checkpoint(straight_dir + "/seed_5/checkpoint_final.json");
    LoadedCheckpoint split = load_checkpoint(split_dir + "/seed_5/checkpoint_final.json");
    CHECK(straight.trainer.episode_count() == split.trainer.episode_count());
    CHECK(straight.trainer.log_alpha() == split.trainer.log_alpha());
    CHECK(straight.trainer.scale_state() == split.trainer.scale_state());
    CHECK(straight.trainer.noise_rng_state() == split.trainer.noise_rng_state());
    for (std::size_t i = 0; i < straight.trainer.actor().params.size(); ++i) {
        CHECK(straight.trainer.actor().params[i].w == split.trainer.actor().params[i].w);
    }
    for (std::size_t i = 0; i < straight.trainer.critic().params.size(); ++i) {
        CHECK(straight.trainer.critic().params[i].w == split.trainer.critic().params[i].w);
    }
    CHECK(read_file(straight_dir + "/seed_5/curve.csv") ==
          read_file(split_dir + "/seed_5/curve.csv"));
}

TEST_CASE("sfm-only evaluation is identical across seeds and partitions to one") {
    RunConfig cfg = mini_config(temp_dir("eval"));
    cfg.seeds = {1, 2, 3};
    const MetricsReport report =
        run_eval_campaign(cfg, nullptr, "sfm-base", 40, cfg.output_dir, 0);
    REQUIRE(report.per_seed.size() == 3);
    for (const SeedMetrics& s : report.per_seed) {
        CHECK(s.stats.success_rate == report.per_seed[0].stats.success_rate);
        CHECK(s.stats.return_disc_mean == report.per_seed[0].stats.return_disc_mean);
        CHECK(s.stats.success_rate + s.stats.collision_rate + s.stats.timeout_rate ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(report.success_rate.stddev == 0.0);
    CHECK(std::filesystem::exists(cfg.output_dir + "/metrics.json"));

    // cross-seed aggregate arithmetic matches a direct recomputation
    double mean = 0.0;
    for (const SeedMetrics& s : report.per_seed) mean += s.stats.success_rate;
    mean /= 3.0;
    CHECK(std::abs(report.success_rate.mean - mean) <= 1e-12);
}

TEST_CASE("cross-seed aggregates match a direct recomputation") {
    std::vector<SeedMetrics> per_seed(3);
    const double succ[3] = {0.8, 0.9, 0.7};
    const double ret[3] = {0.12, 0.2, 0.17};
    for (int i = 0; i < 3; ++i) {
        per_seed[static_cast<std::size_t>(i)].seed = static_cast<std::uint64_t>(i + 1);
        per_seed[static_cast<std::size_t>(i)].stats.success_rate = succ[i];
        per_seed[static_cast<std::size_t>(i)].stats.return_disc_mean = ret[i];
        per_seed[static_cast<std::size_t>(i)].stats.collision_rate = 1.0 - succ[i];
    }
    const MetricsReport r = aggregate_metrics(per_seed, "x", "sfm", 10);
    auto check_agg = [](const Aggregate& a, const double* v) {
        const double mean = (v[0] + v[1] + v[2]) / 3.0;
        double var = 0.0;
        for (int i = 0; i < 3; ++i) var += (v[i] - mean) * (v[i] - mean);
        const double stddev = std::sqrt(var / 3.0);
        CHECK(std::abs(a.mean - mean) <= 1e-12);
        CHECK(std::abs(a.stddev - stddev) <= 1e-12);
    };
    check_agg(r.success_rate, succ);
    check_agg(r.return_disc, ret);
}

TEST_CASE("evaluating a checkpoint twice gives identical reports") {
    const std::string out = temp_dir("evalck");
    RunConfig cfg = mini_config(out);
    cfg.seeds = {1};
    cfg.episodes = 10;
    cfg.eval_every = 5;
    run_training_campaign(cfg, false, true);
    LoadedCheckpoint l1 = load_checkpoint(out + "/seed_1/checkpoint_final.json");
    LoadedCheckpoint l2 = load_checkpoint(out + "/seed_1/checkpoint_final.json");
    const MetricsReport r1 = run_eval_campaign(l1.config, &l1.trainer.actor(), "ck", 20, "", 0);
    const MetricsReport r2 = run_eval_campaign(l2.config, &l2.trainer.actor(), "ck", 20, "", 0);
    CHECK(r1.per_seed[0].stats.return_disc_mean == r2.per_seed[0].stats.return_disc_mean);
    CHECK(r1.per_seed[0].stats.success_rate == r2.per_seed[0].stats.success_rate);
    CHECK(to_json(r1).dump() == to_json(r2).dump());
}

TEST_CASE("plot renders per-seed curves and a zero-width band for identical inputs") {
    const std::string dir = temp_dir("plot");
    ensure_dir(dir);
    const std::string csv = "episode,eval_return_mean\n100,0.1\n200,0.3\n300,0.25\n";
    write_file(dir + "/a.csv", csv);
    write_file(dir + "/b.csv", csv);
    write_file(dir + "/c.csv", csv);
    run_plot({dir + "/a.csv", dir + "/b.csv", dir + "/c.csv"}, dir + "/plots");
    CHECK(std::filesystem::exists(dir + "/plots/curves_seeds.svg"));
    const std::string band = read_file(dir + "/plots/curves_band.svg");
    const std::vector<Vec2> poly = svg_points(band, "band");
    REQUIRE(poly.size() == 6);  // 3 upper + 3 lower points
    CHECK(poly[0].y == poly[5].y);  // zero-width band collapses
    CHECK(poly[1].y == poly[4].y);
    CHECK(poly[2].y == poly[3].y);
}

TEST_CASE("plot rejects mismatched episode grids and lists the offender") {
    const std::string dir = temp_dir("plotbad");
    ensure_dir(dir);
    write_file(dir + "/a.csv", "episode,eval_return_mean\n100,0.1\n200,0.3\n");
    write_file(dir + "/b.csv", "episode,eval_return_mean\n100,0.1\n250,0.3\n");
    try {
        run_plot({dir + "/a.csv", dir + "/b.csv"}, dir + "/plots");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("b.csv") != std::string::npos);
    }
}

TEST_CASE("a successful episode's trajectory plot ends inside the goal marker") {
    const std::string out = temp_dir("traj");
    RunConfig cfg = mini_config(out);
    cfg.seeds = {1};
    cfg.env.n_humans = 0;  // guaranteed success for the base policy
    cfg.env.time_limit = 30.0;
    const MetricsReport report = run_eval_campaign(cfg, nullptr, "sfm-base", 1, out, 1);
    REQUIRE(report.per_seed[0].stats.success_rate == 1.0);
    const std::string csv_path = out + "/traj/ep_0.csv";
    REQUIRE(std::filesystem::exists(csv_path));

    run_plot({csv_path}, out + "/plots");
    const std::string svg = read_file(out + "/plots/traj_ep_0.svg");
    const std::vector<Vec2> robot = svg_points(svg, "robot");
    REQUIRE(!robot.empty());
    const Vec2 goal = svg_circle_center(svg, "goal");
    CHECK(distance(robot.back(), goal) <= cfg.env.goal_tolerance + 1e-9);
}
