#include "icefloe/cn.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <numeric>

#include "icefloe/errors.hpp"

namespace icefloe::cn {

std::string to_string(TargetKind t) {
    return t == TargetKind::Velocity ? "velocity" : "position";
}

TargetKind target_from_string(const std::string& s) {
    if (s == "velocity") return TargetKind::Velocity;
    if (s == "position") return TargetKind::Position;
    throw InvalidConfig("unknown target kind: " + s);
}

NodeFeatureBlock features_from_positions(const Vec& x_prev, const Vec& x_current,
                                         const Vec& v_current, const FloeSystem& system,
                                         double dt, int history_length) {
    const int n = system.n_floes;
    if (int(x_prev.size()) != n || int(x_current.size()) != n)
        throw DimensionMismatch("features_from_positions: one position per floe required");
    const int f = history_length == 2 ? 4 : 3;
    NodeFeatureBlock block;
    block.f = Mat(n + 2, f);
    auto fill = [&](int row, double xp, double xc, double v, double r) {
        if (history_length == 2) {
            block.f(row, 0) = xp;
            block.f(row, 1) = xc;
            block.f(row, 2) = v;
            block.f(row, 3) = r;
        } else {
            block.f(row, 0) = xc;
            block.f(row, 1) = v;
            block.f(row, 2) = r;
        }
    };
    fill(0, system.domain_left, system.domain_left, 0.0, 0.0);
    for (int i = 0; i < n; ++i) {
        const double v = history_length == 2
                             ? (x_current[std::size_t(i)] - x_prev[std::size_t(i)]) / dt
                             : v_current[std::size_t(i)];
        fill(i + 1, x_prev[std::size_t(i)], x_current[std::size_t(i)], v,
             system.radius[std::size_t(i)]);
    }
    fill(n + 1, system.domain_right, system.domain_right, 0.0, 0.0);
    return block;
}

std::pair<NodeFeatureBlock, Vec> marshal_features(const Trajectory& traj,
                                                  const graph::ChainGraph& g, long j,
                                                  int history_length) {
    const long lo = history_length == 2 ? 2 : 1;
    if (j < lo || j >= traj.n_states())
        throw IndexOutOfRange("marshal_features: step index outside the trajectory");
    const SimState& prev = traj.states[std::size_t(j - (history_length == 2 ? 2 : 1))];
    const SimState& cur = traj.states[std::size_t(j - 1)];
    NodeFeatureBlock block = features_from_positions(
        history_length == 2 ? prev.x : cur.x, cur.x, cur.v, traj.system, traj.dt,
        history_length);
    const Vec positions =
        graph::chain_positions(cur.x, traj.system.domain_left, traj.system.domain_right);
    return {std::move(block), graph::edge_features(positions, g.rel)};
}

namespace {

// receiver -> incident edge list, edges ascending
std::vector<std::vector<int>> edges_by_receiver(const graph::ChainGraph& g) {
    std::vector<std::vector<int>> by(std::size_t(g.rel.n_nodes));
    for (int e = 0; e < g.rel.n_edges; ++e)
        by[std::size_t(g.recv_node[std::size_t(e)])].push_back(e);
    return by;
}

struct StackedForward {
    Mat nodes_norm;
    Mat phi_in;        // (b*n_edges) x (2F+1), normalized
    Mat gamma_in;      // (b*n_nodes) x (F+d_phi), normalized
    nn::ForwardCache phi_cache, gamma_cache;
    Mat messages;      // phi output
    Mat output;        // gamma output, normalized
    // backward scratch
    Mat upstream, gamma_in_grads, msg_upstream;
};

// one reusable workspace per thread; every element is rewritten before use
StackedForward& workspace() {
    thread_local StackedForward ws;
    return ws;
}

void reshape(Mat& m, int rows, int cols) {
    m.rows = rows;
    m.cols = cols;
    m.a.resize(std::size_t(rows) * cols);
}

void run_stacked_forward(const Mat& node_features, const Mat& edge_features,
                         const graph::ChainGraph& g, const CNParams& params,
                         kernels::Exec mode, bool keep_caches, StackedForward& fwd) {
    const int f = params.node_feature_count();
    const int n_nodes = g.rel.n_nodes;
    const int n_edges = g.rel.n_edges;
    if (node_features.cols != f)
        throw DimensionMismatch("cn_forward: node feature width mismatch");
    if (node_features.rows % n_nodes != 0 || edge_features.cols != 1)
        throw DimensionMismatch("cn_forward: stacked shapes do not match the graph");
    const int b = node_features.rows / n_nodes;
    if (edge_features.rows != b * n_edges)
        throw DimensionMismatch("cn_forward: edge rows do not match the batch");

    const FeatureStats& st = params.stats;
    if (int(st.node_mean.size()) != f || int(st.node_std.size()) != f)
        throw DimensionMismatch("cn_forward: normalization stats width mismatch");

    Mat& nodes_norm = fwd.nodes_norm;
    reshape(nodes_norm, node_features.rows, node_features.cols);
    for (int r = 0; r < nodes_norm.rows; ++r)
        for (int c = 0; c < f; ++c)
            nodes_norm(r, c) = (node_features(r, c) - st.node_mean[std::size_t(c)]) /
                               st.node_std[std::size_t(c)];

    reshape(fwd.phi_in, b * n_edges, 2 * f + 1);
#pragma omp parallel for schedule(static) if (mode == kernels::Exec::Parallel)
    for (int row = 0; row < b * n_edges; ++row) {
        const int s = row / n_edges;
        const int e = row % n_edges;
        const double* recv = nodes_norm.row(s * n_nodes + g.recv_node[std::size_t(e)]);
        const double* send = nodes_norm.row(s * n_nodes + g.send_node[std::size_t(e)]);
        double* out = fwd.phi_in.row(row);
        for (int c = 0; c < f; ++c) out[c] = recv[c];
        for (int c = 0; c < f; ++c) out[f + c] = send[c];
        out[2 * f] = (edge_features(row, 0) - st.edge_mean) / st.edge_std;
    }

    nn::mlp_forward_into(params.phi, fwd.phi_in, fwd.messages,
                         keep_caches ? &fwd.phi_cache : nullptr, mode);

    const int d_phi = params.phi.output_width();
    const auto by_recv = edges_by_receiver(g);
    reshape(fwd.gamma_in, b * n_nodes, f + d_phi);
#pragma omp parallel for schedule(static) if (mode == kernels::Exec::Parallel)
    for (int row = 0; row < b * n_nodes; ++row) {
        const int s = row / n_nodes;
        const int node = row % n_nodes;
        double* out = fwd.gamma_in.row(row);
        const double* feats = nodes_norm.row(row);
        for (int c = 0; c < f; ++c) out[c] = feats[c];
        for (int c = 0; c < d_phi; ++c) out[f + c] = 0.0;
        for (int e : by_recv[std::size_t(node)]) {
            const double* msg = fwd.messages.row(s * n_edges + e);
            for (int c = 0; c < d_phi; ++c) out[f + c] += msg[c];
        }
    }

    nn::mlp_forward_into(params.gamma, fwd.gamma_in, fwd.output,
                         keep_caches ? &fwd.gamma_cache : nullptr, mode);
}

}  // namespace

Vec cn_forward_stacked(const Mat& node_features, const Mat& edge_features,
                       const graph::ChainGraph& g, const CNParams& params,
                       kernels::Exec mode) {
    StackedForward& fwd = workspace();
    run_stacked_forward(node_features, edge_features, g, params, mode, false, fwd);
    Vec out(std::size_t(fwd.output.rows));
    for (int r = 0; r < fwd.output.rows; ++r)
        out[std::size_t(r)] = fwd.output(r, 0) * params.stats.target_std + params.stats.target_mean;
    return out;
}

Vec cn_forward(const NodeFeatureBlock& block, const Vec& edge_feats, const graph::ChainGraph& g,
               const CNParams& params, kernels::Exec mode) {
    Mat edges(int(edge_feats.size()), 1);
    edges.a = edge_feats;
    return cn_forward_stacked(block.f, edges, g, params, mode);
}

double cn_loss(const Vec& predicted, const Vec& target) {
    if (predicted.size() != target.size()) throw DimensionMismatch("cn_loss: length mismatch");
    if (target.empty()) throw EmptyTarget("cn_loss: empty target");
    double acc = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        const double d = predicted[i] - target[i];
        acc += d * d;
    }
    return acc / double(target.size());
}

PairBatch assemble_batch(const std::vector<Trajectory>& trajs,
                         const std::vector<std::pair<int, long>>& picks,
                         const graph::ChainGraph& g, int history_length, TargetKind target) {
    if (picks.empty()) throw EmptyInput("assemble_batch: no picks");
    const int n_nodes = g.rel.n_nodes;
    const int n_edges = g.rel.n_edges;
    const int n_floes = g.n_floes;
    const int f = history_length == 2 ? 4 : 3;
    PairBatch batch;
    batch.batch = int(picks.size());
    batch.node_features = Mat(batch.batch * n_nodes, f);
    batch.edge_features = Mat(batch.batch * n_edges, 1);
    batch.targets.resize(std::size_t(batch.batch) * n_floes);
    for (int s = 0; s < batch.batch; ++s) {
        const auto& [t, j] = picks[std::size_t(s)];
        const Trajectory& traj = trajs[std::size_t(t)];
        auto [block, edges] = marshal_features(traj, g, j, history_length);
        for (int r = 0; r < n_nodes; ++r)
            for (int c = 0; c < f; ++c) batch.node_features(s * n_nodes + r, c) = block.f(r, c);
        for (int e = 0; e < n_edges; ++e)
            batch.edge_features(s * n_edges + e, 0) = edges[std::size_t(e)];
        const SimState& tgt = traj.states[std::size_t(j)];
        for (int i = 0; i < n_floes; ++i)
            batch.targets[std::size_t(s) * n_floes + std::size_t(i)] =
                target == TargetKind::Velocity ? tgt.v[std::size_t(i)] : tgt.x[std::size_t(i)];
    }
    return batch;
}

double cn_batch_gradient(const CNParams& params, const graph::ChainGraph& g,
                         const PairBatch& batch, nn::MlpGrads& phi_grads,
                         nn::MlpGrads& gamma_grads, kernels::Exec mode) {
    StackedForward& fwd = workspace();
    run_stacked_forward(batch.node_features, batch.edge_features, g, params, mode, true, fwd);

    const int n_nodes = g.rel.n_nodes;
    const int n_edges = g.rel.n_edges;
    const int n_floes = g.n_floes;
    const int b = batch.batch;
    const FeatureStats& st = params.stats;

    // normalized MSE over floe rows; wall rows carry no loss
    const double denom = double(b) * double(n_floes);
    Mat& upstream = fwd.upstream;
    reshape(upstream, b * n_nodes, 1);
    upstream.a.assign(upstream.a.size(), 0.0);
    double loss = 0.0;
    for (int s = 0; s < b; ++s) {
        for (int i = 0; i < n_floes; ++i) {
            const int row = s * n_nodes + 1 + i;
            const double target_norm =
                (batch.targets[std::size_t(s) * n_floes + std::size_t(i)] - st.target_mean) /
                st.target_std;
            const double d = fwd.output(row, 0) - target_norm;
            loss += d * d;
            upstream(row, 0) = 2.0 * d / denom;
        }
    }
    loss /= denom;

    Mat& gamma_in_grads = fwd.gamma_in_grads;
    nn::mlp_backward_batch(params.gamma, fwd.gamma_cache, upstream, gamma_grads,
                           &gamma_in_grads, mode);

    // route the aggregated-message gradient back to each incident edge
    const int f = params.node_feature_count();
    const int d_phi = params.phi.output_width();
    Mat& msg_upstream = fwd.msg_upstream;
    reshape(msg_upstream, b * n_edges, d_phi);
#pragma omp parallel for schedule(static) if (mode == kernels::Exec::Parallel)
    for (int row = 0; row < b * n_edges; ++row) {
        const int s = row / n_edges;
        const int e = row % n_edges;
        const double* src = gamma_in_grads.row(s * n_nodes + g.recv_node[std::size_t(e)]);
        double* dst = msg_upstream.row(row);
        for (int c = 0; c < d_phi; ++c) dst[c] = src[f + c];
    }
    nn::mlp_backward_batch(params.phi, fwd.phi_cache, msg_upstream, phi_grads, nullptr, mode);
    return loss;
}

namespace {

std::size_t uniform_index(Rng& rng, std::size_t n) {
    const auto i = std::size_t(rng.uniform() * double(n));
    return i < n ? i : n - 1;
}

FeatureStats compute_stats(const std::vector<Trajectory>& trajs,
                           const std::vector<int>& train_idx, const graph::ChainGraph& g,
                           int history_length, TargetKind target) {
    const int f = history_length == 2 ? 4 : 3;
    Vec sum(std::size_t(f), 0.0), sumsq(std::size_t(f), 0.0);
    double e_sum = 0.0, e_sumsq = 0.0, t_sum = 0.0, t_sumsq = 0.0;
    double n_node = 0.0, n_edge = 0.0, n_target = 0.0;
    const long lo = history_length == 2 ? 2 : 1;
    for (int t : train_idx) {
        const Trajectory& traj = trajs[std::size_t(t)];
        for (long j = lo; j < traj.n_states(); ++j) {
            auto [block, edges] = marshal_features(traj, g, j, history_length);
            for (int r = 0; r < block.f.rows; ++r)
                for (int c = 0; c < f; ++c) {
                    sum[std::size_t(c)] += block.f(r, c);
                    sumsq[std::size_t(c)] += block.f(r, c) * block.f(r, c);
                }
            n_node += block.f.rows;
            for (double e : edges) {
                e_sum += e;
                e_sumsq += e * e;
            }
            n_edge += double(edges.size());
            const SimState& tgt = traj.states[std::size_t(j)];
            for (int i = 0; i < traj.n_floes(); ++i) {
                const double v = target == TargetKind::Velocity ? tgt.v[std::size_t(i)]
                                                                : tgt.x[std::size_t(i)];
                t_sum += v;
                t_sumsq += v * v;
            }
            n_target += traj.n_floes();
        }
    }
    auto finish = [](double s, double sq, double n, double& mean, double& sd) {
        mean = s / n;
        const double var = std::max(sq / n - mean * mean, 0.0);
        sd = var > 1e-24 ? std::sqrt(var) : 1.0;
    };
    FeatureStats st;
    st.node_mean.resize(std::size_t(f));
    st.node_std.resize(std::size_t(f));
    for (int c = 0; c < f; ++c)
        finish(sum[std::size_t(c)], sumsq[std::size_t(c)], n_node, st.node_mean[std::size_t(c)],
               st.node_std[std::size_t(c)]);
    finish(e_sum, e_sumsq, n_edge, st.edge_mean, st.edge_std);
    finish(t_sum, t_sumsq, n_target, st.target_mean, st.target_std);
    return st;
}

struct ValSet {
    std::vector<std::pair<int, long>> picks;
    PairBatch batch;
};

// raw-unit one-step velocity RMSE of the model and of the persistence
// baseline on a fixed pick set
void evaluate_picks(const CNParams& params, const graph::ChainGraph& g,
                    const std::vector<Trajectory>& trajs, const ValSet& val,
                    kernels::Exec mode, double& mse_norm, double& velocity_rmse,
                    double& persistence_rmse) {
    const Vec pred = cn_forward_stacked(val.batch.node_features, val.batch.edge_features, g,
                                        params, mode);
    const int n_nodes = g.rel.n_nodes;
    const int n_floes = g.n_floes;
    double acc_norm = 0.0, acc_vel = 0.0, acc_persist = 0.0;
    double count = 0.0;
    for (int s = 0; s < val.batch.batch; ++s) {
        const auto& [t, j] = val.picks[std::size_t(s)];
        const Trajectory& traj = trajs[std::size_t(t)];
        for (int i = 0; i < n_floes; ++i) {
            const double raw_target =
                val.batch.targets[std::size_t(s) * n_floes + std::size_t(i)];
            const double raw_pred = pred[std::size_t(s * n_nodes + 1 + i)];
            const double dn = (raw_pred - raw_target) / params.stats.target_std;
            acc_norm += dn * dn;

            const double v_true = traj.states[std::size_t(j)].v[std::size_t(i)];
            double v_pred, v_persist;
            if (params.target == TargetKind::Velocity) {
                v_pred = raw_pred;
            } else {
                const double x_cur = traj.states[std::size_t(j - 1)].x[std::size_t(i)];
                v_pred = (raw_pred - x_cur) / params.dt;
            }
            v_persist = traj.states[std::size_t(j - 1)].v[std::size_t(i)];
            acc_vel += (v_pred - v_true) * (v_pred - v_true);
            acc_persist += (v_persist - v_true) * (v_persist - v_true);
            count += 1.0;
        }
    }
    mse_norm = acc_norm / count;
    velocity_rmse = std::sqrt(acc_vel / count);
    persistence_rmse = std::sqrt(acc_persist / count);
}

}  // namespace

TrainResult train(const std::vector<Trajectory>& trajectories, const TrainOptions& opt,
                  const CNParams* warm_start) {
    if (trajectories.empty()) throw DataTooShort("train: empty corpus");
    const long min_states = opt.history_length == 2 ? 3 : 2;
    for (std::size_t t = 0; t < trajectories.size(); ++t)
        if (trajectories[t].n_states() < min_states)
            throw DataTooShort("train: trajectory " + std::to_string(t) +
                               " has fewer than " + std::to_string(min_states) + " states");
    const FloeSystem& system = trajectories.front().system;
    const double dt = trajectories.front().dt;
    for (const Trajectory& t : trajectories)
        if (t.n_floes() != system.n_floes || t.dt != dt)
            throw Misaligned("train: corpus mixes floe counts or time steps");

    const graph::ChainGraph g = graph::build_chain_graph(system.n_floes);

    // whole-trajectory holdout
    std::vector<int> order(trajectories.size());
    std::iota(order.begin(), order.end(), 0);
    Rng split_rng = Rng::substream(opt.seed, 0);
    for (std::size_t i = order.size(); i > 1; --i) {
        const std::size_t k = uniform_index(split_rng, i);
        std::swap(order[i - 1], order[k]);
    }
    int n_val = 0;
    if (order.size() >= 2)
        n_val = std::clamp(int(std::lround(opt.validation_fraction * double(order.size()))), 1,
                           int(order.size()) - 1);
    std::vector<int> train_idx(order.begin(), order.end() - n_val);
    std::vector<int> val_idx(order.end() - n_val, order.end());
    if (val_idx.empty()) val_idx = train_idx;  // single-trajectory corpus

    CNParams params;
    if (warm_start) {
        if (warm_start->system.n_floes != system.n_floes ||
            warm_start->history_length != opt.history_length ||
            warm_start->target != opt.target)
            throw Misaligned("train: warm start does not match the requested configuration");
        params = *warm_start;
    } else {
        params.system = system;
        params.dt = dt;
        params.history_length = opt.history_length;
        params.target = opt.target;
        params.d_phi = opt.d_phi;
        params.stats = compute_stats(trajectories, train_idx, g, opt.history_length, opt.target);
        if (opt.edge_scale > 0.0) {
            params.stats.edge_mean = 0.0;
            params.stats.edge_std = opt.edge_scale;
        }

        const int f = params.node_feature_count();
        std::vector<int> phi_widths{2 * f + 1};
        phi_widths.insert(phi_widths.end(), opt.phi_hidden.begin(), opt.phi_hidden.end());
        phi_widths.push_back(opt.d_phi);
        std::vector<int> gamma_widths{f + opt.d_phi};
        gamma_widths.insert(gamma_widths.end(), opt.gamma_hidden.begin(), opt.gamma_hidden.end());
        gamma_widths.push_back(1);
        Rng phi_rng = Rng::substream(opt.seed, 1);
        Rng gamma_rng = Rng::substream(opt.seed, 2);
        params.phi = nn::make_mlp(phi_widths, opt.activation, phi_rng);
        params.gamma = nn::make_mlp(gamma_widths, opt.activation, gamma_rng);
        if (opt.zero_init_outputs) {
            params.phi.weights.back().a.assign(params.phi.weights.back().a.size(), 0.0);
            params.gamma.weights.back().a.assign(params.gamma.weights.back().a.size(), 0.0);
        }
    }

    nn::AdamState phi_adam = nn::make_adam(params.phi, opt.learning_rate, opt.lr_decay);
    nn::AdamState gamma_adam = nn::make_adam(params.gamma, opt.learning_rate, opt.lr_decay);

    const long j_lo = opt.history_length == 2 ? 2 : 1;
    auto sample_picks = [&](Rng& rng, const std::vector<int>& from, int count) {
        std::vector<std::pair<int, long>> picks;
        picks.reserve(std::size_t(count));
        for (int i = 0; i < count; ++i) {
            const int t = from[uniform_index(rng, from.size())];
            const long n = trajectories[std::size_t(t)].n_states();
            const long j = j_lo + long(uniform_index(rng, std::size_t(n - j_lo)));
            picks.emplace_back(t, j);
        }
        return picks;
    };

    Rng val_rng = Rng::substream(opt.seed, 4);
    ValSet val;
    val.picks = sample_picks(val_rng, val_idx, int(opt.validation_pairs));
    val.batch = assemble_batch(trajectories, val.picks, g, opt.history_length, opt.target);

    Rng batch_rng = Rng::substream(opt.seed, 3);
    const int steps_per_epoch = std::max(1, int(opt.pairs_per_epoch / opt.batch_size));
    const auto t_start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    };

    TrainResult result;
    long global_step = 0;
    for (int epoch = 0; epoch < opt.epochs; ++epoch) {
        double train_loss = 0.0;
        for (int s = 0; s < steps_per_epoch; ++s, ++global_step) {
            const auto picks = sample_picks(batch_rng, train_idx, opt.batch_size);
            const PairBatch batch =
                assemble_batch(trajectories, picks, g, opt.history_length, opt.target);
            nn::MlpGrads phi_grads = nn::zero_grads(params.phi);
            nn::MlpGrads gamma_grads = nn::zero_grads(params.gamma);
            const double loss =
                cn_batch_gradient(params, g, batch, phi_grads, gamma_grads, opt.exec);
            if (!std::isfinite(loss))
                throw NonFiniteLoss(global_step, "train: non-finite loss at batch " +
                                                     std::to_string(global_step));
            nn::adam_step(params.phi, phi_grads, phi_adam);
            nn::adam_step(params.gamma, gamma_grads, gamma_adam);
            train_loss += loss;
        }
        train_loss /= double(steps_per_epoch);
        phi_adam.decay_epoch();
        gamma_adam.decay_epoch();

        EpochStats es;
        es.epoch = epoch;
        es.lr = phi_adam.learning_rate();
        es.train_mse = train_loss;
        evaluate_picks(params, g, trajectories, val, opt.exec, es.val_mse,
                       es.val_velocity_rmse, result.persistence_val_rmse);
        result.history.push_back(es);
        result.epochs_run = epoch + 1;
        if (opt.verbose)
            std::fprintf(stderr,
                         "epoch %4d  lr %.3g  train mse %.4e  val mse %.4e  "
                         "val velocity rmse %.5f\n",
                         epoch, es.lr, es.train_mse, es.val_mse, es.val_velocity_rmse);

        if (opt.stop_val_velocity_rmse > 0.0 &&
            es.val_velocity_rmse < opt.stop_val_velocity_rmse)
            break;
        if (opt.max_seconds > 0.0 && elapsed() > opt.max_seconds) break;
    }
    result.params = std::move(params);
    return result;
}

Trajectory rollout_with_predictor(
    const SimState& s0, const SimState& s1, const FloeSystem& system, double dt, long n_steps,
    const std::function<Vec(const SimState&, const SimState&)>& next_velocities) {
    Trajectory traj;
    traj.system = system;
    traj.dt = dt;
    traj.states = {s0, s1};
    traj.states.reserve(std::size_t(n_steps) + 2);
    for (long s = 0; s < n_steps; ++s) {
        const SimState& prev = traj.states[traj.states.size() - 2];
        const SimState& cur = traj.states.back();
        const Vec v_next = next_velocities(prev, cur);
        SimState next;
        next.time_index = cur.time_index + 1;
        next.v = v_next;
        next.x.resize(std::size_t(system.n_floes));
        for (int i = 0; i < system.n_floes; ++i) {
            next.x[std::size_t(i)] = cur.x[std::size_t(i)] + v_next[std::size_t(i)] * dt;
            if (!std::isfinite(next.x[std::size_t(i)]))
                throw NonFiniteState(next.time_index, "rollout diverged at step " +
                                                          std::to_string(next.time_index));
        }
        traj.states.push_back(std::move(next));
    }
    return traj;
}

Trajectory rollout(const SimState& s0, const SimState& s1, const FloeSystem& system,
                   const CNParams& params, long n_steps, kernels::Exec mode) {
    if (system.n_floes != params.system.n_floes)
        throw Misaligned("rollout: model was trained for a different floe count");
    const graph::ChainGraph g = graph::build_chain_graph(system.n_floes);
    const double dt = params.dt;
    auto predict = [&](const SimState& prev, const SimState& cur) {
        const NodeFeatureBlock block = features_from_positions(prev.x, cur.x, cur.v, system, dt,
                                                               params.history_length);
        const Vec positions =
            graph::chain_positions(cur.x, system.domain_left, system.domain_right);
        const Vec edges = graph::edge_features(positions, g.rel);
        const Vec pred = cn_forward(block, edges, g, params, mode);
        Vec v_next(std::size_t(system.n_floes));
        for (int i = 0; i < system.n_floes; ++i) {
            const double p = pred[std::size_t(i + 1)];
            v_next[std::size_t(i)] = params.target == TargetKind::Velocity
                                         ? p
                                         : (p - cur.x[std::size_t(i)]) / dt;
        }
        return v_next;
    };
    return rollout_with_predictor(s0, s1, system, dt, n_steps, predict);
}

}  // namespace icefloe::cn
