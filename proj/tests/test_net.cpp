#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "irrl/net/model.hpp"
#include "irrl/net/param_tree.hpp"
#include "irrl/net/tape.hpp"
#include "irrl/rng.hpp"
#include "irrl/train/trainer.hpp"

using namespace irrl;

namespace {

constexpr double kFdStep = 1e-5;
constexpr double kFdTol = 1e-4;

double rel_err(double analytic, double numeric) {
    return std::abs(analytic - numeric) /
           std::max({std::abs(analytic), std::abs(numeric), 1e-3});
}

/// Central finite difference of `eval` w.r.t. `*slot`.
double fd_slope(double* slot, const std::function<double()>& eval) {
    const double saved = *slot;
    *slot = saved + kFdStep;
    const double up = eval();
    *slot = saved - kFdStep;
    const double down = eval();
    *slot = saved;
    return (up - down) / (2.0 * kFdStep);
}

void randomize(ParamTree& tree, RngStream& rng, double scale = 0.5) {
    for (Param& p : tree.params) {
        for (double& w : p.w) w = rng.uniform(-scale, scale);
    }
}

ObservationFrame random_obs(RngStream& rng, int n_humans) {
    ObservationFrame obs;
    for (double& v : obs.robot_feat) v = rng.uniform(-2.0, 2.0);
    for (int i = 0; i < n_humans; ++i) {
        obs.human_feats.push_back({rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0),
                                   rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
    }
    return obs;
}

/// FD vs backward for a single op: loss = sum(op(x) .* coeffs).
void check_unary_op(const std::function<NodeId(Tape&, NodeId)>& op, std::vector<double> x0,
                    RngStream& rng) {
    std::size_t out_size = 0;
    {
        Tape probe;
        out_size = static_cast<std::size_t>(probe.size(op(probe, probe.input(x0))));
    }
    std::vector<double> coeffs(out_size);
    for (double& c : coeffs) c = rng.uniform(-1.0, 1.0);

    std::vector<double> x = x0;
    const auto eval = [&]() {
        Tape t;
        const NodeId in = t.input(x);
        const NodeId y = op(t, in);
        const NodeId c = t.input(coeffs);
        return t.scalar(t.sum_reduce(t.mul_elem(y, c)));
    };

    Tape t;
    const NodeId in = t.input(x, /*requires_grad=*/true);
    const NodeId y = op(t, in);
    const NodeId c = t.input(coeffs);
    const NodeId loss = t.sum_reduce(t.mul_elem(y, c));
    t.backward({{loss, 1.0}});
    const auto grad = t.input_grad(in);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double numeric = fd_slope(&x[i], eval);
        CHECK(rel_err(grad[i], numeric) <= kFdTol);
    }
}

}  // namespace

TEST_CASE("penultimate_normalize basics") {
    const std::vector<double> v{3.0, 4.0};
    const auto n = penultimate_normalize(v);
    CHECK(n[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(n[1] == doctest::Approx(0.8).epsilon(1e-15));

    RngStream rng(3);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> x(8);
        for (double& e : x) e = rng.uniform(-4.0, 4.0);
        const auto y = penultimate_normalize(x);
        double norm = 0.0;
        for (double e : y) norm += e * e;
        CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-12));
    }

    const std::vector<double> zero{0.0, 0.0, 0.0};
    const auto z = penultimate_normalize(zero);
    CHECK(z == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("softmax weights are a distribution") {
    Tape t;
    const std::vector<double> scores{0.3, -1.2, 2.0};
    const NodeId sm = t.softmax(t.input(scores));
    const auto w = t.value(sm);
    double sum = 0.0;
    for (double v : w) {
        CHECK(v > 0.0);
        sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("elementwise and structural ops match finite differences") {
    RngStream rng(17);
    const std::vector<double> smooth{0.7, -0.9, 1.3, -0.4};
    const std::vector<double> positive{0.8, 1.7, 0.2, 2.5};

    check_unary_op([](Tape& t, NodeId x) { return t.relu(x); }, {0.7, -0.9, 1.3, -0.4}, rng);
    check_unary_op([](Tape& t, NodeId x) { return t.leaky_relu(x, 0.2); }, smooth, rng);
    check_unary_op([](Tape& t, NodeId x) { return t.tanh(x); }, smooth, rng);
    check_unary_op([](Tape& t, NodeId x) { return t.exp(x); }, smooth, rng);
    check_unary_op([](Tape& t, NodeId x) { return t.log(x); }, positive, rng);
    check_unary_op([](Tape& t, NodeId x) { return t.square(x); }, smooth, rng);
    check_unary_op([](Tape& t, NodeId x) { return t.affine_const(x, 1.7, -0.3); }, smooth, rng);
    check_unary_op([](Tape& t, NodeId x) { return t.scale_const(x, -2.2); }, smooth, rng);
    check_unary_op([](Tape& t, NodeId x) { return t.clamp_range(x, -0.5, 0.5); },
                   {0.2, -1.4, 0.45, 3.0}, rng);
    check_unary_op([](Tape& t, NodeId x) { return t.l2_normalize(x); }, smooth, rng);
    check_unary_op([](Tape& t, NodeId x) { return t.clip_norm(x, 10.0); }, smooth, rng);
    check_unary_op([](Tape& t, NodeId x) { return t.clip_norm(x, 0.5); }, smooth, rng);
    check_unary_op([](Tape& t, NodeId x) { return t.softmax(x); }, smooth, rng);
    check_unary_op([](Tape& t, NodeId x) { return t.slice(x, 1, 2); }, smooth, rng);
    check_unary_op([](Tape& t, NodeId x) { return t.concat2(x, t.square(x)); }, smooth, rng);
    const std::vector<double> cvec{0.5, -1.5, 2.5, 0.25};
    check_unary_op([&](Tape& t, NodeId x) { return t.add_const_vec(x, cvec); }, smooth, rng);
    check_unary_op([&](Tape& t, NodeId x) { return t.axpy_const(x, cvec, t.square(x)); }, smooth,
                   rng);
    check_unary_op(
        [&](Tape& t, NodeId x) {
            const NodeId other = t.input(cvec);
            return t.mul_elem(t.add(x, other), t.sub(x, other));
        },
        smooth, rng);
    check_unary_op(
        [](Tape& t, NodeId x) {
            const NodeId w = t.slice(x, 0, 2);
            const NodeId v1 = t.slice(x, 1, 3);
            const NodeId v2 = t.slice(x, 0, 3);
            const NodeId parts[2] = {v1, v2};
            return t.weighted_sum(t.softmax(w), std::span<const NodeId>(parts, 2));
        },
        smooth, rng);
}

TEST_CASE("linear and dot_param gradients match finite differences") {
    RngStream rng(23);
    ParamTree tree;
    const int w_idx = tree.add_uniform("w", 3, 4, rng);
    const int b_idx = tree.add_uniform_bias("b", 3, 4, rng);
    const int a_idx = tree.add_uniform("a", 3, 1, rng);
    std::vector<double> x{0.4, -1.1, 0.9, 0.3};
    std::vector<double> coeffs{0.7, -0.2, 1.1};

    const auto eval = [&]() {
        Tape t;
        const int slot = t.attach(tree);
        const NodeId y = t.linear(slot, w_idx, b_idx, t.input(x));
        const NodeId scaled = t.mul_elem(y, t.input(coeffs));
        const NodeId dot = t.dot_param(slot, a_idx, t.tanh(scaled));
        return t.scalar(dot);
    };

    Tape t;
    const int slot = t.attach(tree);
    const NodeId in = t.input(x, true);
    const NodeId y = t.linear(slot, w_idx, b_idx, in);
    const NodeId scaled = t.mul_elem(y, t.input(coeffs));
    const NodeId loss = t.dot_param(slot, a_idx, t.tanh(scaled));
    t.backward({{loss, 1.0}});

    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(rel_err(t.input_grad(in)[i], fd_slope(&x[i], eval)) <= kFdTol);
    }
    for (int p : {w_idx, b_idx, a_idx}) {
        Param& param = tree.at(p);
        for (int i = 0; i < param.size(); ++i) {
            const double numeric = fd_slope(&param.w[static_cast<std::size_t>(i)], eval);
            CHECK(rel_err(param.g[static_cast<std::size_t>(i)], numeric) <= kFdTol);
        }
    }
}

TEST_CASE("norm of a normalized vector has zero gradient") {
    std::vector<double> x{1.2, -0.4, 0.8};
    Tape t;
    const NodeId in = t.input(x, true);
    const NodeId normed = t.l2_normalize(in);
    const NodeId loss = t.sum_reduce(t.square(normed));
    t.backward({{loss, 1.0}});
    for (double g : t.input_grad(in)) CHECK(std::abs(g) <= 1e-10);
}

TEST_CASE("backward is linear in the seed") {
    RngStream rng(31);
    ParamTree tree;
    const ModelDims dims{6, 8};
    model_detail::build_common(tree, dims, 2, 4, rng);
    randomize(tree, rng);
    const ObservationFrame obs = random_obs(rng, 2);
    const Vec2 a_base{0.2, -0.3};
    const Vec2 noise{0.4, -1.2};

    auto grads_for = [&](double s_q, double s_lp) {
        Tape t;
        const int slot = t.attach(tree);
        const ActorNodes nodes = actor_forward_tape(t, slot, tree, obs, a_base, noise, 1.0);
        const NodeId probe = t.sum_reduce(nodes.residual);
        t.backward({{probe, s_q}, {nodes.log_prob, s_lp}});
        std::vector<double> flat;
        for (const Param& p : tree.params) flat.insert(flat.end(), p.g.begin(), p.g.end());
        tree.zero_grads();
        return flat;
    };

    const auto g1 = grads_for(1.0, 0.0);
    const auto g2 = grads_for(0.0, 1.0);
    const auto combo = grads_for(0.7, -1.3);
    for (std::size_t i = 0; i < combo.size(); ++i) {
        CHECK(std::abs(combo[i] - (0.7 * g1[i] - 1.3 * g2[i])) <= 1e-10);
    }
}

TEST_CASE("a consumed tape refuses a second backward") {
    Tape t;
    const NodeId x = t.input(std::vector<double>{1.0, 2.0}, true);
    const NodeId loss = t.sum_reduce(x);
    t.backward({{loss, 1.0}});
    CHECK_THROWS_AS(t.backward({{loss, 1.0}}), std::logic_error);
    t.clear();
    const NodeId y = t.input(std::vector<double>{1.0}, true);
    CHECK_NOTHROW(t.backward({{y, 1.0}}));
}

TEST_CASE("crowd aggregation is permutation invariant") {
    RngStream rng(41);
    ParamTree actor = build_actor_params({8, 12}, rng);
    randomize(actor, rng);
    ObservationFrame obs = random_obs(rng, 5);
    const Vec2 a_base{0.1, 0.2};

    const GaussianSample base = actor_forward(actor, obs, a_base, {0, 0}, 1.0);
    ObservationFrame shuffled = obs;
    std::swap(shuffled.human_feats[0], shuffled.human_feats[4]);
    std::swap(shuffled.human_feats[1], shuffled.human_feats[3]);
    const GaussianSample perm = actor_forward(actor, shuffled, a_base, {0, 0}, 1.0);
    CHECK(std::abs(base.mean.x - perm.mean.x) <= 1e-12);
    CHECK(std::abs(base.mean.y - perm.mean.y) <= 1e-12);
    CHECK(std::abs(base.log_std.x - perm.log_std.x) <= 1e-12);
    CHECK(std::abs(base.log_std.y - perm.log_std.y) <= 1e-12);

    ParamTree critic = build_critic_params({8, 12}, rng);
    randomize(critic, rng);
    const double q0 = critic_value(critic, obs, {0.3, -0.2});
    const double q1 = critic_value(critic, shuffled, {0.3, -0.2});
    CHECK(std::abs(q0 - q1) <= 1e-12);
}

TEST_CASE("zero-crowd aggregation ignores the attention vector") {
    RngStream rng(43);
    ParamTree tree;
    model_detail::build_common(tree, {8, 12}, 2, 4, rng);
    randomize(tree, rng);
    const ObservationFrame obs = random_obs(rng, 0);
    const auto before = aggregate_crowd(tree, obs);
    Param& att_a = tree.at(tree.find("att.a"));
    for (double& v : att_a.w) v = rng.uniform(-9.0, 9.0);
    const auto after = aggregate_crowd(tree, obs);
    CHECK(before == after);
}

TEST_CASE("forward passes handle 0..20 pedestrians with fixed output size") {
    RngStream rng(47);
    ParamTree actor = build_actor_params({8, 12}, rng);
    ParamTree critic = build_critic_params({8, 12}, rng);
    randomize(actor, rng);
    randomize(critic, rng);
    for (int n = 0; n <= 20; ++n) {
        const ObservationFrame obs = random_obs(rng, n);
        const auto agg = aggregate_crowd(actor, obs);
        CHECK(agg.size() == 16);
        const GaussianSample s = actor_forward(actor, obs, {0.1, 0.1}, {0.3, -0.4}, 1.0);
        CHECK(std::isfinite(s.log_prob));
        CHECK(std::isfinite(critic_value(critic, obs, s.residual_action)));
    }
}

TEST_CASE("actor at zero noise returns the squashed mean") {
    RngStream rng(53);
    ParamTree actor = build_actor_params({8, 12}, rng);
    randomize(actor, rng);
    const ObservationFrame obs = random_obs(rng, 3);
    const double bound = 0.8;
    const GaussianSample s = actor_forward(actor, obs, {0.2, -0.1}, {0, 0}, bound);
    CHECK(s.residual_action.x == bound * std::tanh(s.mean.x));
    CHECK(s.residual_action.y == bound * std::tanh(s.mean.y));
    CHECK(s.pre_squash.x == s.mean.x);
}

TEST_CASE("sampled residuals stay strictly inside the bound") {
    RngStream rng(59);
    ParamTree actor = build_actor_params({8, 12}, rng);
    randomize(actor, rng);
    const ObservationFrame obs = random_obs(rng, 2);
    const double bound = 0.7;
    for (int rep = 0; rep < 2000; ++rep) {
        const GaussianSample s =
            actor_forward(actor, obs, {0.0, 0.0}, {rng.normal(), rng.normal()}, bound);
        CHECK(std::abs(s.residual_action.x) < bound);
        CHECK(std::abs(s.residual_action.y) < bound);
    }
}

TEST_CASE("log_prob composition matches the closed form") {
    RngStream rng(61);
    ParamTree actor = build_actor_params({8, 12}, rng);
    randomize(actor, rng);
    const ObservationFrame obs = random_obs(rng, 2);
    const double bound = 1.0;
    for (int rep = 0; rep < 20; ++rep) {
        const Vec2 noise{rng.normal(), rng.normal()};
        const GaussianSample s = actor_forward(actor, obs, {0.1, 0.0}, noise, bound);
        double expect = 0.0;
        const double zs[2] = {s.pre_squash.x, s.pre_squash.y};
        const double means[2] = {s.mean.x, s.mean.y};
        const double log_stds[2] = {s.log_std.x, s.log_std.y};
        for (int k = 0; k < 2; ++k) {
            const double std_k = std::exp(log_stds[k]);
            const double ratio = (zs[k] - means[k]) / std_k;
            expect += -0.9189385332046727 - log_stds[k] - 0.5 * ratio * ratio;
            const double tk = std::tanh(zs[k]);
            expect -= std::log(1.0 - tk * tk + 1e-6);
            expect -= std::log(bound);
        }
        CHECK(s.log_prob == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("sampled action density matches a histogram of a million draws") {
    RngStream rng(67);
    ParamTree actor = build_actor_params({8, 12}, rng);
    randomize(actor, rng);
    // Keep the policy concentrated inside the box so the histogram's bin-mean
    // density is well approximated by a few sub-samples.
    Param& head_w = actor.at(actor.find("head.w"));
    Param& head_b = actor.at(actor.find("head.b"));
    for (double& v : head_w.w) v = rng.uniform(-0.05, 0.05);
    head_b.w = {0.25, -0.3, -1.5, -1.4};
    const ObservationFrame obs = random_obs(rng, 2);
    const Vec2 a_base{0.1, -0.2};
    const double bound = 1.0;

    const GaussianSample at_mean = actor_forward(actor, obs, a_base, {0, 0}, bound);
    const double mean[2] = {at_mean.mean.x, at_mean.mean.y};
    const double stddev[2] = {std::exp(at_mean.log_std.x), std::exp(at_mean.log_std.y)};

    constexpr int kBins = 40;
    constexpr int kSamples = 1000000;
    std::vector<int> counts(kBins * kBins, 0);
    for (int s = 0; s < kSamples; ++s) {
        const double z0 = mean[0] + stddev[0] * rng.normal();
        const double z1 = mean[1] + stddev[1] * rng.normal();
        const double a0 = bound * std::tanh(z0);
        const double a1 = bound * std::tanh(z1);
        const int bx = std::min(kBins - 1, static_cast<int>((a0 + bound) / (2 * bound) * kBins));
        const int by = std::min(kBins - 1, static_cast<int>((a1 + bound) / (2 * bound) * kBins));
        counts[static_cast<std::size_t>(by * kBins + bx)] += 1;
    }

    const double cell = 2.0 * bound / kBins;
    const double area = cell * cell;
    std::vector<std::pair<int, int>> ranked;  // (count, bin)
    for (int b = 0; b < kBins * kBins; ++b) ranked.push_back({counts[static_cast<std::size_t>(b)], b});
    std::sort(ranked.rbegin(), ranked.rend());

    const auto density_at = [&](double a0, double a1) {
        const double z0 = std::atanh(a0 / bound);
        const double z1 = std::atanh(a1 / bound);
        const Vec2 noise{(z0 - mean[0]) / stddev[0], (z1 - mean[1]) / stddev[1]};
        return std::exp(actor_forward(actor, obs, a_base, noise, bound).log_prob);
    };

    int checked = 0;
    for (int r = 0; r < 160 && checked < 100; ++r) {
        const int b = ranked[static_cast<std::size_t>(r)].second;
        const int by = b / kBins;
        const int bx = b % kBins;
        const double x0 = -bound + bx * cell;
        const double y0 = -bound + by * cell;
        // 3x3 subcell average approximates the bin-mean density
        double dens = 0.0;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                dens += density_at(x0 + cell * (i + 0.5) / 3.0, y0 + cell * (j + 0.5) / 3.0);
            }
        }
        dens /= 9.0;
        const double empirical =
            static_cast<double>(counts[static_cast<std::size_t>(b)]) / (kSamples * area);
        CHECK(std::abs(empirical - dens) / dens <= 0.05);
        ++checked;
    }
    REQUIRE(checked == 100);
}

TEST_CASE("critic with a zero head outputs exactly zero") {
    RngStream rng(71);
    ParamTree critic = build_critic_params({8, 12}, rng);
    for (int rep = 0; rep < 10; ++rep) {
        const ObservationFrame obs = random_obs(rng, rep % 4);
        CHECK(critic_value(critic, obs, {rng.uniform(-1, 1), rng.uniform(-1, 1)}) == 0.0);
    }
}

TEST_CASE("critic distinguishes actions") {
    RngStream rng(73);
    ParamTree critic = build_critic_params({8, 12}, rng);
    randomize(critic, rng);
    const ObservationFrame obs = random_obs(rng, 3);
    const Vec2 u{0.6, -0.3};
    CHECK(std::abs(critic_value(critic, obs, u) - critic_value(critic, obs, -u)) > 0.0);
}

TEST_CASE("full actor and critic losses match finite differences") {
    RngStream rng(79);
    for (int config = 0; config < 5; ++config) {
        const ModelDims dims{4 + config, 6 + 2 * config};
        ParamTree actor = build_actor_params(dims, rng);
        ParamTree critic = build_critic_params(dims, rng);
        randomize(actor, rng);
        randomize(critic, rng);
        const ObservationFrame obs = random_obs(rng, config % 4);
        const Vec2 a_base{rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)};
        const Vec2 noise{rng.normal(), rng.normal()};
        const Vec2 u{rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8)};
        const double alpha = 0.2;
        const double bound = 1.0;
        const double v_max = 1.0;

        const auto actor_loss = [&]() {
            Tape t;
            const int a_slot = t.attach(actor);
            const int c_slot = t.attach(critic);
            const ActorNodes nodes = actor_forward_tape(t, a_slot, actor, obs, a_base, noise, bound);
            const double base_arr[2] = {a_base.x, a_base.y};
            NodeId u_node = t.add_const_vec(nodes.residual, std::span<const double>(base_arr, 2));
            u_node = t.clip_norm(u_node, v_max);
            const NodeId q = critic_forward_tape(t, c_slot, critic, obs, u_node);
            return -t.scalar(q) + alpha * t.scalar(nodes.log_prob);
        };

        {
            Tape t;
            const int a_slot = t.attach(actor);
            const int c_slot = t.attach(critic);
            const ActorNodes nodes = actor_forward_tape(t, a_slot, actor, obs, a_base, noise, bound);
            const double base_arr[2] = {a_base.x, a_base.y};
            NodeId u_node = t.add_const_vec(nodes.residual, std::span<const double>(base_arr, 2));
            u_node = t.clip_norm(u_node, v_max);
            const NodeId q = critic_forward_tape(t, c_slot, critic, obs, u_node);
            t.backward({{q, -1.0}, {nodes.log_prob, alpha}});
        }
        for (Param& p : actor.params) {
            for (int k = 0; k < std::min(6, p.size()); ++k) {
                const int i = p.size() <= 6 ? k : (k * 37) % p.size();
                const double numeric = fd_slope(&p.w[static_cast<std::size_t>(i)], actor_loss);
                CHECK(rel_err(p.g[static_cast<std::size_t>(i)], numeric) <= kFdTol);
            }
        }
        actor.zero_grads();
        critic.zero_grads();

        const auto critic_loss = [&]() {
            Tape t;
            const int c_slot = t.attach(critic);
            const NodeId u_node = t.input(u);
            return t.scalar(critic_forward_tape(t, c_slot, critic, obs, u_node));
        };
        Tape t;
        const int c_slot = t.attach(critic);
        const NodeId u_node = t.input(u, true);
        const NodeId q = critic_forward_tape(t, c_slot, critic, obs, u_node);
        t.backward({{q, 1.0}});
        for (Param& p : critic.params) {
            for (int k = 0; k < std::min(6, p.size()); ++k) {
                const int i = p.size() <= 6 ? k : (k * 37) % p.size();
                const double numeric = fd_slope(&p.w[static_cast<std::size_t>(i)], critic_loss);
                CHECK(rel_err(p.g[static_cast<std::size_t>(i)], numeric) <= kFdTol);
            }
        }
        // gradient w.r.t. the action input (the path the actor update uses)
        Vec2 u_var = u;
        const auto critic_loss_u = [&]() {
            Tape tt;
            const int slot = tt.attach(critic);
            const NodeId un = tt.input(u_var);
            return tt.scalar(critic_forward_tape(tt, slot, critic, obs, un));
        };
        CHECK(rel_err(t.input_grad(u_node)[0], fd_slope(&u_var.x, critic_loss_u)) <= kFdTol);
        CHECK(rel_err(t.input_grad(u_node)[1], fd_slope(&u_var.y, critic_loss_u)) <= kFdTol);
        critic.zero_grads();
    }
}

TEST_CASE("sgd_step applies the plain rule and zeroes gradients") {
    ParamTree tree;
    tree.add_zero("p", 1, 1);
    tree.at(0).w[0] = 1.0;
    tree.at(0).g[0] = 2.0;
    CHECK(sgd_step(tree, 0.1));
    CHECK(tree.at(0).w[0] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(tree.at(0).g[0] == 0.0);

    // zero gradients: parameters unchanged
    CHECK(sgd_step(tree, 0.1));
    CHECK(tree.at(0).w[0] == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("sgd_step skips entirely on a non-finite gradient") {
    ParamTree tree;
    tree.add_zero("a", 2, 2);
    tree.add_zero("b", 3, 1);
    tree.at(0).w = {1, 2, 3, 4};
    tree.at(0).g = {0.1, 0.2, 0.3, 0.4};
    tree.at(1).g[1] = std::numeric_limits<double>::quiet_NaN();
    CHECK_FALSE(sgd_step(tree, 0.5));
    CHECK(tree.at(0).w == std::vector<double>{1, 2, 3, 4});
    CHECK(tree.skipped_updates == 1);
    for (double g : tree.at(0).g) CHECK(g == 0.0);
}
