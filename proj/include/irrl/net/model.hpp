#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "irrl/net/param_tree.hpp"
#include "irrl/net/tape.hpp"
#include "irrl/rng.hpp"
#include "irrl/sim/types.hpp"
#include "irrl/vec2.hpp"

namespace irrl {

inline constexpr int kRobotFeatDim = 5;
inline constexpr int kHumanFeatDim = 4;
inline constexpr double kLeakySlope = 0.2;
inline constexpr double kLogStdMin = -10.0;
inline constexpr double kLogStdMax = 2.0;
inline constexpr double kTanhEps = 1e-6;

struct ModelDims {
    int embed = 64;
    int hidden = 128;
};

/// Fixed parameter order shared by actor and critic so tape builders can refer
/// to parameters by index.
struct NetLayout {
    int robot_embed_w, robot_embed_b;
    int human_embed_w, human_embed_b;
    int att_w, att_a, att_v;
    int trunk_w, trunk_b;
    int head_w, head_b;
};

namespace model_detail {

inline NetLayout build_common(ParamTree& tree, const ModelDims& dims, int action_dim,
                              int head_dim, RngStream& rng) {
    NetLayout ly;
    const int e = dims.embed;
    ly.robot_embed_w = tree.add_uniform("robot_embed.w", e, kRobotFeatDim, rng);
    ly.robot_embed_b = tree.add_uniform_bias("robot_embed.b", e, kRobotFeatDim, rng);
    ly.human_embed_w = tree.add_uniform("human_embed.w", e, kHumanFeatDim, rng);
    ly.human_embed_b = tree.add_uniform_bias("human_embed.b", e, kHumanFeatDim, rng);
    ly.att_w = tree.add_uniform("att.w", e, 2 * e, rng);
    ly.att_a = tree.add_uniform("att.a", e, 1, rng);
    ly.att_v = tree.add_uniform("att.v", e, e, rng);
    const int trunk_in = 2 * e + action_dim;
    ly.trunk_w = tree.add_uniform("trunk.w", dims.hidden, trunk_in, rng);
    ly.trunk_b = tree.add_uniform_bias("trunk.b", dims.hidden, trunk_in, rng);
    // Zero head: the fresh critic outputs exactly 0 and the fresh actor is a
    // zero-mean unit-log-std residual, so the combined policy starts at the
    // base policy.
    ly.head_w = tree.add_zero("head.w", head_dim, dims.hidden);
    ly.head_b = tree.add_zero("head.b", head_dim, 1);
    return ly;
}

inline NetLayout layout_from(const ParamTree& tree) {
    NetLayout ly;
    ly.robot_embed_w = tree.find("robot_embed.w");
    ly.robot_embed_b = tree.find("robot_embed.b");
    ly.human_embed_w = tree.find("human_embed.w");
    ly.human_embed_b = tree.find("human_embed.b");
    ly.att_w = tree.find("att.w");
    ly.att_a = tree.find("att.a");
    ly.att_v = tree.find("att.v");
    ly.trunk_w = tree.find("trunk.w");
    ly.trunk_b = tree.find("trunk.b");
    ly.head_w = tree.find("head.w");
    ly.head_b = tree.find("head.b");
    return ly;
}

}  // namespace model_detail

/// Actor network parameters: head outputs [mean(2), log_std(2)].
inline ParamTree build_actor_params(const ModelDims& dims, RngStream& rng) {
    ParamTree tree;
    model_detail::build_common(tree, dims, 2, 4, rng);
    return tree;
}

/// Critic network parameters: scalar Q head.
inline ParamTree build_critic_params(const ModelDims& dims, RngStream& rng) {
    ParamTree tree;
    model_detail::build_common(tree, dims, 2, 1, rng);
    return tree;
}

/// L2-normalize a feature vector; inputs shorter than 1e-8 are divided by 1e-8
/// instead so the map stays well-defined at zero.
inline std::vector<double> penultimate_normalize(std::span<const double> feat) {
    double norm_sq = 0.0;
    for (double v : feat) norm_sq += v * v;
    double norm = std::sqrt(norm_sq);
    if (norm < Tape::kNormEps) norm = Tape::kNormEps;
    std::vector<double> out(feat.size());
    for (std::size_t i = 0; i < feat.size(); ++i) out[i] = feat[i] / norm;
    return out;
}

/// Crowd aggregation: embed the robot and each pedestrian, run one attention
/// round on the star graph (robot attends over itself and every pedestrian),
/// and concatenate the robot embedding with the attention-pooled value vector.
/// Output size is 2 * embed regardless of crowd size; with zero pedestrians
/// the pooled vector reduces to the robot's own value vector.
inline NodeId aggregate_crowd_tape(Tape& tape, int slot, const ParamTree& tree,
                                   const ObservationFrame& obs) {
    const NetLayout ly = model_detail::layout_from(tree);
    const NodeId x_robot = tape.input(std::span<const double>(obs.robot_feat, kRobotFeatDim));
    const NodeId h_robot = tape.relu(tape.linear(slot, ly.robot_embed_w, ly.robot_embed_b, x_robot));

    std::vector<NodeId> members;
    members.reserve(obs.human_feats.size() + 1);
    members.push_back(h_robot);
    for (const auto& feat : obs.human_feats) {
        const NodeId x = tape.input(std::span<const double>(feat.data(), kHumanFeatDim));
        members.push_back(tape.relu(tape.linear(slot, ly.human_embed_w, ly.human_embed_b, x)));
    }

    std::vector<NodeId> scores;
    std::vector<NodeId> values;
    scores.reserve(members.size());
    values.reserve(members.size());
    for (const NodeId h : members) {
        const NodeId pair = tape.concat2(h_robot, h);
        const NodeId hidden = tape.leaky_relu(tape.linear(slot, ly.att_w, -1, pair), kLeakySlope);
        scores.push_back(tape.dot_param(slot, ly.att_a, hidden));
        values.push_back(tape.linear(slot, ly.att_v, -1, h));
    }
    const NodeId weights = tape.softmax(tape.concat(scores));
    const NodeId pooled = tape.weighted_sum(weights, values);
    return tape.concat2(h_robot, pooled);
}

/// Value-level convenience wrapper around the tape builder.
inline std::vector<double> aggregate_crowd(ParamTree& tree, const ObservationFrame& obs) {
    Tape tape;
    const int slot = tape.attach(tree);
    const NodeId agg = aggregate_crowd_tape(tape, slot, tree, obs);
    const auto v = tape.value(agg);
    return {v.begin(), v.end()};
}

/// Squashed-Gaussian residual sample with everything needed for the losses.
struct GaussianSample {
    Vec2 residual_action;
    Vec2 pre_squash;
    double log_prob = 0.0;
    Vec2 mean;
    Vec2 log_std;
};

/// Node handles of an actor forward pass, for loss assembly and backward.
struct ActorNodes {
    NodeId mean = -1;
    NodeId log_std = -1;
    NodeId pre_squash = -1;
    NodeId residual = -1;
    NodeId log_prob = -1;
};

/// Actor forward pass on `tape`. Input is the aggregated crowd feature joined
/// with the base action; the penultimate feature vector is L2-normalized
/// before the output layer. The head yields (mean, log_std); with the supplied
/// standard-normal `noise` the reparameterized sample is
///   z = mean + exp(log_std) .* noise,  a = bound * tanh(z),
/// and log_prob is the density of `a` (Gaussian log-density of z with the
/// tanh and scale corrections).
inline ActorNodes actor_forward_tape(Tape& tape, int slot, const ParamTree& theta,
                                     const ObservationFrame& obs, const Vec2& a_base,
                                     const Vec2& noise, double residual_bound) {
    const NetLayout ly = model_detail::layout_from(theta);
    const NodeId agg = aggregate_crowd_tape(tape, slot, theta, obs);
    const NodeId base_in = tape.input(a_base);
    const NodeId trunk_in = tape.concat2(agg, base_in);
    const NodeId hidden = tape.relu(tape.linear(slot, ly.trunk_w, ly.trunk_b, trunk_in));
    const NodeId normed = tape.l2_normalize(hidden);
    const NodeId head = tape.linear(slot, ly.head_w, ly.head_b, normed);

    ActorNodes nodes;
    nodes.mean = tape.slice(head, 0, 2);
    nodes.log_std = tape.clamp_range(tape.slice(head, 2, 2), kLogStdMin, kLogStdMax);
    const NodeId std_dev = tape.exp(nodes.log_std);
    const double noise_arr[2] = {noise.x, noise.y};
    nodes.pre_squash = tape.axpy_const(std_dev, std::span<const double>(noise_arr, 2), nodes.mean);
    const NodeId squashed = tape.tanh(nodes.pre_squash);
    nodes.residual = tape.scale_const(squashed, residual_bound);

    // log N(z; mean, std) per component: -0.5 log(2 pi) - log_std - 0.5 ((z - mean)/std)^2
    const NodeId diff = tape.sub(nodes.pre_squash, nodes.mean);
    const NodeId inv_std = tape.exp(tape.scale_const(nodes.log_std, -1.0));
    const NodeId ratio_sq = tape.square(tape.mul_elem(diff, inv_std));
    const NodeId gauss =
        tape.sub(tape.affine_const(ratio_sq, -0.5, -0.9189385332046727), nodes.log_std);
    // tanh change of variables: - log(1 - tanh(z)^2 + eps) - log(bound)
    const NodeId one_minus_sq = tape.affine_const(tape.square(squashed), -1.0, 1.0 + kTanhEps);
    const NodeId correction = tape.log(one_minus_sq);
    const NodeId per_component =
        tape.affine_const(tape.sub(gauss, correction), 1.0, -std::log(residual_bound));
    nodes.log_prob = tape.sum_reduce(per_component);
    return nodes;
}

inline GaussianSample extract_sample(const Tape& tape, const ActorNodes& nodes) {
    GaussianSample s;
    s.residual_action = tape.vec2(nodes.residual);
    s.pre_squash = tape.vec2(nodes.pre_squash);
    s.log_prob = tape.scalar(nodes.log_prob);
    s.mean = tape.vec2(nodes.mean);
    s.log_std = tape.vec2(nodes.log_std);
    return s;
}

/// Value-level actor forward.
inline GaussianSample actor_forward(ParamTree& theta, const ObservationFrame& obs,
                                    const Vec2& a_base, const Vec2& noise, double residual_bound) {
    Tape tape;
    const int slot = tape.attach(theta);
    return extract_sample(tape, actor_forward_tape(tape, slot, theta, obs, a_base, noise,
                                                   residual_bound));
}

/// Critic forward pass; `u_node` must hold the combined action (base plus
/// residual). Returns the scalar Q node.
inline NodeId critic_forward_tape(Tape& tape, int slot, const ParamTree& phi,
                                  const ObservationFrame& obs, NodeId u_node) {
    const NetLayout ly = model_detail::layout_from(phi);
    const NodeId agg = aggregate_crowd_tape(tape, slot, phi, obs);
    const NodeId trunk_in = tape.concat2(agg, u_node);
    const NodeId hidden = tape.relu(tape.linear(slot, ly.trunk_w, ly.trunk_b, trunk_in));
    const NodeId normed = tape.l2_normalize(hidden);
    return tape.linear(slot, ly.head_w, ly.head_b, normed);
}

/// Value-level critic forward.
inline double critic_value(ParamTree& phi, const ObservationFrame& obs, const Vec2& u) {
    Tape tape;
    const int slot = tape.attach(phi);
    const NodeId u_node = tape.input(u);
    return tape.scalar(critic_forward_tape(tape, slot, phi, obs, u_node));
}

/// Model dimensions recovered from a parameter tree's shapes.
inline ModelDims dims_of(const ParamTree& tree) {
    ModelDims dims;
    dims.embed = tree.at(tree.find("robot_embed.w")).rows;
    dims.hidden = tree.at(tree.find("trunk.w")).rows;
    return dims;
}

}  // namespace irrl
