#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "icefloe/floe.hpp"
#include "icefloe/graph.hpp"
#include "icefloe/mlp.hpp"

namespace icefloe::cn {

// Standardization constants learned from the training set and stored with
// the model; raw feature scales span three orders of magnitude.
struct FeatureStats {
    Vec node_mean, node_std;  // per node-feature column
    double edge_mean = 0.0, edge_std = 1.0;
    double target_mean = 0.0, target_std = 1.0;
};

enum class TargetKind { Velocity, Position };
std::string to_string(TargetKind t);
TargetKind target_from_string(const std::string& s);

// Message-passing surrogate: an edge network over (receiver, sender,
// displacement) features and a node network over (features, aggregated
// messages), predicting the next-step per-floe velocity (or position for
// the ablation variant).
struct CNParams {
    FloeSystem system;  // geometry the model was trained on
    double dt = 1e-4;

    int history_length = 2;  // 1 = conditioned on a single state + velocity
    TargetKind target = TargetKind::Velocity;
    int d_phi = 100;
    nn::Mlp phi;    // edge network
    nn::Mlp gamma;  // node network
    FeatureStats stats;

    int node_feature_count() const { return history_length == 2 ? 4 : 3; }
    int n_nodes() const { return system.n_floes + 2; }
};

// One row per node (walls included): for the two-step history the columns
// are previous position, current position, finite-difference velocity,
// radius. Wall rows carry the fixed wall position and zeros.
struct NodeFeatureBlock {
    Mat f;
};

// Node features built from two consecutive position vectors. v_current is
// only consulted for history_length == 1.
NodeFeatureBlock features_from_positions(const Vec& x_prev, const Vec& x_current,
                                         const Vec& v_current, const FloeSystem& system,
                                         double dt, int history_length);

// Features and edge displacements for step j of a trajectory (inputs taken
// at j-2 and j-1, matching a training target at j).
std::pair<NodeFeatureBlock, Vec> marshal_features(const Trajectory& traj,
                                                  const graph::ChainGraph& g, long j,
                                                  int history_length = 2);

// One message-passing step; returns the de-normalized prediction per node.
Vec cn_forward(const NodeFeatureBlock& block, const Vec& edge_feats,
               const graph::ChainGraph& g, const CNParams& params,
               kernels::Exec mode = kernels::Exec::Parallel);

// Batched forward over b independent samples stacked row-wise
// (b*n_nodes node rows, b*n_edges edge rows); returns b*n_nodes predictions.
Vec cn_forward_stacked(const Mat& node_features, const Mat& edge_features,
                       const graph::ChainGraph& g, const CNParams& params,
                       kernels::Exec mode);

// Mean squared error over floes (walls are never included in targets).
double cn_loss(const Vec& predicted, const Vec& target);

// A stacked batch of training pairs in raw units.
struct PairBatch {
    int batch = 0;
    Mat node_features;  // (batch * n_nodes) x F
    Mat edge_features;  // (batch * n_edges) x 1
    Vec targets;        // batch * n_floes
};

PairBatch assemble_batch(const std::vector<Trajectory>& trajs,
                         const std::vector<std::pair<int, long>>& picks,
                         const graph::ChainGraph& g, int history_length, TargetKind target);

// Normalized MSE over the batch plus parameter gradients for both networks.
double cn_batch_gradient(const CNParams& params, const graph::ChainGraph& g,
                         const PairBatch& batch, nn::MlpGrads& phi_grads,
                         nn::MlpGrads& gamma_grads, kernels::Exec mode);

struct TrainOptions {
    int batch_size = 100;
    double learning_rate = 1e-4;
    double lr_decay = 0.99;
    int epochs = 40;
    long pairs_per_epoch = 20000;
    double validation_fraction = 0.1;
    long validation_pairs = 2000;
    // optional stopping: quit once the validation one-step velocity RMSE
    // falls below this (0 disables), or when the wall-clock budget is spent
    double stop_val_velocity_rmse = 0.0;
    double max_seconds = 0.0;
    std::uint64_t seed = 1;
    bool verbose = false;  // per-epoch progress on stderr

    int history_length = 2;
    TargetKind target = TargetKind::Velocity;
    nn::Activation activation = nn::Activation::Mish;
    int d_phi = 100;
    std::vector<int> phi_hidden = {150, 150, 150, 150};
    std::vector<int> gamma_hidden = {100};
    kernels::Exec exec = kernels::Exec::Parallel;

    // Edge-displacement normalization scale. Zero standardizes with the
    // training-set std like the other features; a positive value fixes the
    // scale in length units. Contact geometry lives at the floe-diameter
    // scale, far below the typical separation, so anchoring the scale
    // there makes the contact zone visible to the edge network much
    // earlier in training.
    double edge_scale = 0.0;

    // Start both output layers at zero: messages then carry no noise until
    // the edge network learns something, and the node network settles the
    // velocity passthrough first.
    bool zero_init_outputs = false;
};

struct EpochStats {
    int epoch = 0;
    double lr = 0.0;
    double train_mse = 0.0;  // normalized scale
    double val_mse = 0.0;
    double val_velocity_rmse = 0.0;  // raw units
};

struct TrainResult {
    CNParams params;
    std::vector<EpochStats> history;
    double persistence_val_rmse = 0.0;  // copy-last-velocity baseline on val pairs
    int epochs_run = 0;
};

// Trains on the corpus (whole trajectories held out for validation).
// Throws DataTooShort when no trajectory has three states and NonFiniteLoss
// when a batch produces a non-finite loss. A warm start resumes from an
// existing model (fresh optimizer state); its architecture and statistics
// are kept.
TrainResult train(const std::vector<Trajectory>& trajectories, const TrainOptions& opt,
                  const CNParams* warm_start = nullptr);

// Autoregressive rollout seeded with two consecutive ground-truth states.
// The returned trajectory starts with those two states.
Trajectory rollout(const SimState& s0, const SimState& s1, const FloeSystem& system,
                   const CNParams& params, long n_steps,
                   kernels::Exec mode = kernels::Exec::Parallel);

// Same loop with a pluggable velocity predictor (used to cross-check the
// integration against ground truth).
Trajectory rollout_with_predictor(
    const SimState& s0, const SimState& s1, const FloeSystem& system, double dt, long n_steps,
    const std::function<Vec(const SimState& prev, const SimState& cur)>& next_velocities);

}  // namespace icefloe::cn
