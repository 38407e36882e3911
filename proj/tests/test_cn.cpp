#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "icefloe/cn.hpp"
#include "icefloe/dem.hpp"
#include "icefloe/errors.hpp"

using namespace icefloe;
using cn::TargetKind;
using kernels::Exec;

namespace {

FloeSystem small_system(int n, double right) {
    return FloeSystem::uniform(n, 1.0, 1.0, 2e7, 0.0, right);
}

cn::CNParams random_params(const FloeSystem& sys, int d_phi, std::vector<int> phi_hidden,
                           std::vector<int> gamma_hidden, std::uint64_t seed,
                           int history = 2) {
    cn::CNParams p;
    p.system = sys;
    p.dt = 1e-4;
    p.history_length = history;
    p.d_phi = d_phi;
    const int f = p.node_feature_count();
    std::vector<int> pw{2 * f + 1};
    pw.insert(pw.end(), phi_hidden.begin(), phi_hidden.end());
    pw.push_back(d_phi);
    std::vector<int> gw{f + d_phi};
    gw.insert(gw.end(), gamma_hidden.begin(), gamma_hidden.end());
    gw.push_back(1);
    Rng r1 = Rng::substream(seed, 1), r2 = Rng::substream(seed, 2);
    p.phi = nn::make_mlp(pw, nn::Activation::Mish, r1);
    p.gamma = nn::make_mlp(gw, nn::Activation::Mish, r2);
    p.stats.node_mean.assign(std::size_t(f), 0.5);
    p.stats.node_std.assign(std::size_t(f), 20.0);
    p.stats.edge_mean = 0.0;
    p.stats.edge_std = 10.0;
    p.stats.target_mean = 2.0;
    p.stats.target_std = 100.0;
    return p;
}

// message passing re-implemented with plain loops and the public mlp API
Vec oracle_cn(const cn::NodeFeatureBlock& block, const Vec& edges,
              const graph::ChainGraph& g, const cn::CNParams& p) {
    const int f = p.node_feature_count();
    Mat norm = block.f;
    for (int r = 0; r < norm.rows; ++r)
        for (int c = 0; c < f; ++c)
            norm(r, c) = (norm(r, c) - p.stats.node_mean[std::size_t(c)]) /
                         p.stats.node_std[std::size_t(c)];
    std::vector<Vec> messages;
    for (int e = 0; e < g.rel.n_edges; ++e) {
        Vec in;
        for (int c = 0; c < f; ++c) in.push_back(norm(g.recv_node[std::size_t(e)], c));
        for (int c = 0; c < f; ++c) in.push_back(norm(g.send_node[std::size_t(e)], c));
        in.push_back((edges[std::size_t(e)] - p.stats.edge_mean) / p.stats.edge_std);
        messages.push_back(nn::mlp_forward(p.phi, in));
    }
    Vec out;
    for (int node = 0; node < g.rel.n_nodes; ++node) {
        Vec in;
        for (int c = 0; c < f; ++c) in.push_back(norm(node, c));
        Vec agg(std::size_t(p.d_phi), 0.0);
        for (int e = 0; e < g.rel.n_edges; ++e)
            if (g.recv_node[std::size_t(e)] == node)
                for (int c = 0; c < p.d_phi; ++c) agg[std::size_t(c)] += messages[std::size_t(e)][std::size_t(c)];
        in.insert(in.end(), agg.begin(), agg.end());
        out.push_back(nn::mlp_forward(p.gamma, in)[0] * p.stats.target_std +
                      p.stats.target_mean);
    }
    return out;
}

std::vector<Trajectory> constant_velocity_corpus(int n_trajs, long n_steps, Rng& rng) {
    const FloeSystem sys = small_system(2, 10000.0);
    std::vector<Trajectory> out;
    for (int t = 0; t < n_trajs; ++t) {
        Trajectory traj;
        traj.system = sys;
        traj.dt = 1e-4;
        Vec x{2000.0 + rng.uniform(0.0, 500.0), 6000.0 + rng.uniform(0.0, 500.0)};
        Vec v{(rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(2.0, 5.0),
              (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(2.0, 5.0)};
        for (long j = 0; j <= n_steps; ++j) {
            SimState s;
            s.time_index = j;
            s.x = {x[0] + v[0] * 1e-4 * double(j), x[1] + v[1] * 1e-4 * double(j)};
            s.v = v;
            traj.states.push_back(std::move(s));
        }
        out.push_back(std::move(traj));
    }
    return out;
}

}  // namespace

TEST_CASE("marshalled features: positions, finite-difference velocity, radius") {
    const FloeSystem sys = small_system(1, 100.0);
    Trajectory traj;
    traj.system = sys;
    traj.dt = 1e-4;
    for (long j = 0; j < 3; ++j) {
        SimState s;
        s.time_index = j;
        s.x = {10.0 + 0.015 * double(j)};  // 150 * 1e-4 per step
        s.v = {150.0};
        traj.states.push_back(std::move(s));
    }
    const graph::ChainGraph g = graph::build_chain_graph(1);
    const auto [block, edges] = cn::marshal_features(traj, g, 2);

    REQUIRE(block.f.rows == 3);
    REQUIRE(block.f.cols == 4);
    // wall rows: fixed position twice, zero velocity, zero radius
    CHECK(block.f(0, 0) == 0.0);
    CHECK(block.f(0, 1) == 0.0);
    CHECK(block.f(0, 2) == 0.0);
    CHECK(block.f(0, 3) == 0.0);
    CHECK(block.f(2, 0) == 100.0);
    CHECK(block.f(2, 1) == 100.0);
    // floe row: both positions and the recovered velocity
    CHECK(block.f(1, 0) == 10.0);
    CHECK(block.f(1, 1) == doctest::Approx(10.015).epsilon(1e-15));
    CHECK(block.f(1, 2) == doctest::Approx(150.0).epsilon(1e-12));
    CHECK(block.f(1, 3) == 1.0);

    // edge displacements at the current positions
    CHECK(edges[0] == doctest::Approx(10.015));   // wall -> floe
    CHECK(edges[1] == doctest::Approx(-10.015));  // floe -> wall
    CHECK(edges[2] == doctest::Approx(89.985));
    CHECK(edges[3] == doctest::Approx(-89.985));

    CHECK_THROWS_AS(cn::marshal_features(traj, g, 1), IndexOutOfRange);
    CHECK_THROWS_AS(cn::marshal_features(traj, g, 3), IndexOutOfRange);
}

TEST_CASE("stationary system marshals a zero velocity column") {
    const FloeSystem sys = small_system(2, 50.0);
    const SimState s0{0, {10.0, 20.0}, {0.0, 0.0}};
    const Trajectory traj = dem::generate_trajectory(s0, sys, 2, 1e-4);
    const graph::ChainGraph g = graph::build_chain_graph(2);
    const auto [block, edges] = cn::marshal_features(traj, g, 2);
    for (int r = 0; r < block.f.rows; ++r) CHECK(block.f(r, 2) == 0.0);
}

TEST_CASE("single-state history carries the stored velocity") {
    const FloeSystem sys = small_system(1, 100.0);
    Trajectory traj;
    traj.system = sys;
    traj.dt = 1e-4;
    traj.states = {{0, {10.0}, {42.0}}, {1, {10.1}, {42.0}}};
    const graph::ChainGraph g = graph::build_chain_graph(1);
    const auto [block, edges] = cn::marshal_features(traj, g, 1, 1);
    REQUIRE(block.f.cols == 3);
    CHECK(block.f(1, 0) == 10.0);
    CHECK(block.f(1, 1) == 42.0);
    CHECK(block.f(1, 2) == 1.0);
    CHECK(block.f(0, 1) == 0.0);  // wall velocity
}

TEST_CASE("zero networks predict the de-normalized target mean") {
    const FloeSystem sys = small_system(3, 50.0);
    cn::CNParams p = random_params(sys, 6, {5}, {4}, 1);
    for (Mat& w : p.phi.weights) w.a.assign(w.a.size(), 0.0);
    for (Vec& b : p.phi.biases) b.assign(b.size(), 0.0);
    for (Mat& w : p.gamma.weights) w.a.assign(w.a.size(), 0.0);
    for (Vec& b : p.gamma.biases) b.assign(b.size(), 0.0);

    const graph::ChainGraph g = graph::build_chain_graph(3);
    cn::NodeFeatureBlock block;
    block.f = Mat(5, 4);
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 4; ++c) block.f(r, c) = 3.0 * r + c;
    const Vec edges(std::size_t(g.rel.n_edges), 1.5);
    for (double v : cn::cn_forward(block, edges, g, p))
        CHECK(v == doctest::Approx(p.stats.target_mean));
}

TEST_CASE("message passing matches a loop-based oracle") {
    Rng rng(9);
    for (int n_floes : {1, 3}) {
        const FloeSystem sys = small_system(n_floes, 60.0);
        const cn::CNParams p = random_params(sys, 7, {11, 8}, {6}, 77);
        const graph::ChainGraph g = graph::build_chain_graph(n_floes);
        cn::NodeFeatureBlock block;
        block.f = Mat(n_floes + 2, 4);
        for (double& v : block.f.a) v = rng.uniform(-30.0, 30.0);
        Vec edges(std::size_t(g.rel.n_edges), 0.0);
        for (double& v : edges) v = rng.uniform(-20.0, 20.0);

        const Vec got = cn::cn_forward(block, edges, g, p);
        const Vec want = oracle_cn(block, edges, g, p);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i)
            CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-10));
    }
}

TEST_CASE("shared parameters make predictions equivariant to floe relabelling") {
    const int n = 4;
    const FloeSystem sys = small_system(n, 80.0);
    const cn::CNParams p = random_params(sys, 5, {9}, {7}, 13);
    const graph::ChainGraph g = graph::build_chain_graph(n);

    Rng rng(21);
    cn::NodeFeatureBlock block;
    block.f = Mat(n + 2, 4);
    for (double& v : block.f.a) v = rng.uniform(-10.0, 10.0);
    Vec edges(std::size_t(g.rel.n_edges), 0.0);
    for (double& v : edges) v = rng.uniform(-5.0, 5.0);
    const Vec base = cn::cn_forward(block, edges, g, p);

    // relabel interior nodes by a rotation and edges by reversal
    std::vector<int> node_map(std::size_t(n + 2));
    node_map[0] = 0;
    node_map[std::size_t(n + 1)] = n + 1;
    for (int i = 1; i <= n; ++i) node_map[std::size_t(i)] = 1 + (i % n);
    std::vector<int> edge_map(std::size_t(g.rel.n_edges));
    for (int e = 0; e < g.rel.n_edges; ++e) edge_map[std::size_t(e)] = g.rel.n_edges - 1 - e;

    graph::ChainGraph pg;
    pg.n_floes = n;
    pg.rel.n_nodes = n + 2;
    pg.rel.n_edges = g.rel.n_edges;
    pg.rel.sender = Mat(n + 2, g.rel.n_edges);
    pg.rel.receiver = Mat(n + 2, g.rel.n_edges);
    pg.send_node.resize(std::size_t(g.rel.n_edges));
    pg.recv_node.resize(std::size_t(g.rel.n_edges));
    for (int e = 0; e < g.rel.n_edges; ++e) {
        const int ne = edge_map[std::size_t(e)];
        const int s = node_map[std::size_t(g.send_node[std::size_t(e)])];
        const int r = node_map[std::size_t(g.recv_node[std::size_t(e)])];
        pg.send_node[std::size_t(ne)] = s;
        pg.recv_node[std::size_t(ne)] = r;
        pg.rel.sender(s, ne) = 1.0;
        pg.rel.receiver(r, ne) = 1.0;
    }
    pg.perm = graph::build_permutation(pg.rel);

    cn::NodeFeatureBlock pblock;
    pblock.f = Mat(n + 2, 4);
    for (int r = 0; r < n + 2; ++r)
        for (int c = 0; c < 4; ++c) pblock.f(node_map[std::size_t(r)], c) = block.f(r, c);
    Vec pedges(std::size_t(g.rel.n_edges), 0.0);
    for (int e = 0; e < g.rel.n_edges; ++e)
        pedges[std::size_t(edge_map[std::size_t(e)])] = edges[std::size_t(e)];

    const Vec permuted = cn::cn_forward(pblock, pedges, pg, p);
    for (int r = 0; r < n + 2; ++r)
        CHECK(permuted[std::size_t(node_map[std::size_t(r)])] ==
              doctest::Approx(base[std::size_t(r)]).epsilon(1e-10));
}

TEST_CASE("loss: exact zero, hand value, and floe-permutation invariance") {
    CHECK(cn::cn_loss({1.0, 2.0}, {1.0, 2.0}) == 0.0);
    CHECK(cn::cn_loss({0.0, 0.0}, {3.0, 4.0}) == doctest::Approx(12.5));
    CHECK(cn::cn_loss({0.0, 0.0, 5.0}, {3.0, 4.0, 5.0}) ==
          doctest::Approx(cn::cn_loss({0.0, 5.0, 0.0}, {4.0, 5.0, 3.0})));
    CHECK_THROWS_AS(cn::cn_loss({}, {}), EmptyTarget);
    CHECK_THROWS_AS(cn::cn_loss({1.0}, {1.0, 2.0}), DimensionMismatch);
}

TEST_CASE("batch gradients agree with central finite differences") {
    const FloeSystem sys = small_system(2, 40.0);
    Rng rng(31);
    const SimState init = dem::sample_initial_conditions(sys, rng);
    const Trajectory traj = dem::generate_trajectory(init, sys, 50, 1e-4);
    const std::vector<Trajectory> trajs{traj};
    const graph::ChainGraph g = graph::build_chain_graph(2);

    cn::CNParams p = random_params(sys, 5, {7}, {6}, 3);
    const std::vector<std::pair<int, long>> picks{{0, 2}, {0, 17}, {0, 44}};
    const cn::PairBatch batch = cn::assemble_batch(trajs, picks, g, 2, TargetKind::Velocity);

    nn::MlpGrads pg = nn::zero_grads(p.phi);
    nn::MlpGrads gg = nn::zero_grads(p.gamma);
    const double loss0 = cn::cn_batch_gradient(p, g, batch, pg, gg, Exec::Serial);
    CHECK(std::isfinite(loss0));

    auto loss_at = [&](const cn::CNParams& q) {
        nn::MlpGrads a = nn::zero_grads(q.phi);
        nn::MlpGrads b = nn::zero_grads(q.gamma);
        return cn::cn_batch_gradient(q, g, batch, a, b, Exec::Serial);
    };
    const double h = 1e-5;
    auto check_grads = [&](nn::Mlp& net, const nn::MlpGrads& grads) {
        for (int l = 0; l < net.n_layers(); ++l) {
            Mat& w = net.weights[std::size_t(l)];
            for (std::size_t i = 0; i < w.a.size(); i += 5) {
                const double saved = w.a[i];
                w.a[i] = saved + h;
                const double up = loss_at(p);
                w.a[i] = saved - h;
                const double dn = loss_at(p);
                w.a[i] = saved;
                CHECK(grads.weights[std::size_t(l)].a[i] ==
                      doctest::Approx((up - dn) / (2.0 * h)).epsilon(1e-4).scale(1e-2));
            }
        }
    };
    check_grads(p.phi, pg);
    check_grads(p.gamma, gg);
}

TEST_CASE("serial and parallel batch gradients are bit-identical") {
    const FloeSystem sys = small_system(3, 50.0);
    Rng rng(41);
    const SimState init = dem::sample_initial_conditions(sys, rng);
    const std::vector<Trajectory> trajs{dem::generate_trajectory(init, sys, 40, 1e-4)};
    const graph::ChainGraph g = graph::build_chain_graph(3);
    const cn::CNParams p = random_params(sys, 8, {12, 9}, {10}, 7);
    std::vector<std::pair<int, long>> picks;
    for (long j = 2; j < 30; ++j) picks.emplace_back(0, j);
    const cn::PairBatch batch = cn::assemble_batch(trajs, picks, g, 2, TargetKind::Velocity);

    nn::MlpGrads ps = nn::zero_grads(p.phi), gs = nn::zero_grads(p.gamma);
    nn::MlpGrads pp = nn::zero_grads(p.phi), gp = nn::zero_grads(p.gamma);
    const double ls = cn::cn_batch_gradient(p, g, batch, ps, gs, Exec::Serial);
    const double lp = cn::cn_batch_gradient(p, g, batch, pp, gp, Exec::Parallel);
    CHECK(ls == lp);
    for (int l = 0; l < p.phi.n_layers(); ++l)
        CHECK(ps.weights[std::size_t(l)].a == pp.weights[std::size_t(l)].a);
    for (int l = 0; l < p.gamma.n_layers(); ++l)
        CHECK(gs.weights[std::size_t(l)].a == gp.weights[std::size_t(l)].a);
}

TEST_CASE("rollout with zero steps returns only the seeds") {
    const FloeSystem sys = small_system(2, 50.0);
    const cn::CNParams p = random_params(sys, 4, {5}, {4}, 5);
    const SimState s0{0, {10.0, 20.0}, {1.0, -1.0}};
    const SimState s1{1, {10.0001, 19.9999}, {1.0, -1.0}};
    const Trajectory traj = cn::rollout(s0, s1, sys, p, 0);
    REQUIRE(traj.n_states() == 2);
    CHECK(traj.states[0].x == s0.x);
    CHECK(traj.states[1].x == s1.x);
}

TEST_CASE("rollout with oracle velocities reproduces the reference positions exactly") {
    const FloeSystem sys = small_system(3, 60.0);
    Rng rng(51);
    const SimState init = dem::sample_initial_conditions(sys, rng);
    const Trajectory truth = dem::generate_trajectory(init, sys, 400, 1e-4);

    const Trajectory replay = cn::rollout_with_predictor(
        truth.states[0], truth.states[1], sys, 1e-4, truth.n_states() - 2,
        [&](const SimState&, const SimState& cur) {
            return truth.states[std::size_t(cur.time_index + 1)].v;
        });
    REQUIRE(replay.n_states() == truth.n_states());
    for (long j = 0; j < truth.n_states(); ++j)
        CHECK(replay.states[std::size_t(j)].x == truth.states[std::size_t(j)].x);
}

TEST_CASE("training fits the constant-velocity identity map") {
    Rng rng(61);
    const auto corpus = constant_velocity_corpus(60, 80, rng);

    cn::TrainOptions opt;
    opt.batch_size = 50;
    opt.learning_rate = 1e-2;
    opt.lr_decay = 0.93;
    opt.epochs = 100;
    opt.pairs_per_epoch = 5000;
    opt.validation_pairs = 400;
    opt.seed = 5;
    opt.d_phi = 8;
    opt.phi_hidden = {24};
    opt.gamma_hidden = {24};
    const cn::TrainResult result = cn::train(corpus, opt);

    REQUIRE(!result.history.empty());
    double min_val = result.history.front().val_mse;
    for (const cn::EpochStats& e : result.history) {
        CHECK(std::isfinite(e.train_mse));
        CHECK(std::isfinite(e.val_mse));
        min_val = std::min(min_val, e.val_mse);
    }
    CHECK(result.history.back().val_mse <= 2.0 * min_val);
    CHECK(result.history.back().val_velocity_rmse < 1e-2);
}

TEST_CASE("training is deterministic per seed") {
    Rng rng(71);
    const auto corpus = constant_velocity_corpus(3, 60, rng);
    cn::TrainOptions opt;
    opt.batch_size = 20;
    opt.epochs = 2;
    opt.pairs_per_epoch = 200;
    opt.validation_pairs = 50;
    opt.seed = 9;
    opt.d_phi = 4;
    opt.phi_hidden = {6};
    opt.gamma_hidden = {5};
    const cn::TrainResult a = cn::train(corpus, opt);
    const cn::TrainResult b = cn::train(corpus, opt);
    for (int l = 0; l < a.params.phi.n_layers(); ++l)
        CHECK(a.params.phi.weights[std::size_t(l)].a == b.params.phi.weights[std::size_t(l)].a);
    for (int l = 0; l < a.params.gamma.n_layers(); ++l)
        CHECK(a.params.gamma.weights[std::size_t(l)].a ==
              b.params.gamma.weights[std::size_t(l)].a);
}

TEST_CASE("degenerate corpora are rejected") {
    CHECK_THROWS_AS(cn::train({}, cn::TrainOptions{}), DataTooShort);

    Trajectory too_short;
    too_short.system = small_system(1, 50.0);
    too_short.dt = 1e-4;
    too_short.states = {{0, {10.0}, {0.0}}, {1, {10.0}, {0.0}}};
    CHECK_THROWS_AS(cn::train({too_short}, cn::TrainOptions{}), DataTooShort);
}

TEST_CASE("a non-finite corpus aborts with the batch index") {
    Rng rng(81);
    auto corpus = constant_velocity_corpus(1, 60, rng);
    corpus[0].states[30].x[0] = std::nan("");
    cn::TrainOptions opt;
    opt.batch_size = 30;
    opt.epochs = 1;
    opt.pairs_per_epoch = 600;
    opt.validation_pairs = 10;
    opt.d_phi = 4;
    opt.phi_hidden = {5};
    opt.gamma_hidden = {4};
    CHECK_THROWS_AS(cn::train(corpus, opt), NonFiniteLoss);
}
