// Timing comparison between the serial and OpenMP paths of the hot
// kernels: dense layer products, a full training batch gradient, the
// batched ensemble forecast, and multi-trajectory generation.

#include <chrono>
#include <cstdio>
#include <functional>

#include "icefloe/cn.hpp"
#include "icefloe/dem.hpp"
#include "icefloe/filters.hpp"
#include "icefloe/kernels.hpp"
#include "icefloe/rng.hpp"

using namespace icefloe;
using kernels::Exec;

namespace {

double time_of(const std::function<void()>& fn, int reps) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / reps;
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-28s serial %9.3f ms   parallel %9.3f ms   speedup %5.2fx\n", name,
                serial * 1e3, parallel * 1e3, serial / parallel);
}

Mat random_mat(int r, int c, Rng& rng) {
    Mat m(r, c);
    for (double& v : m.a) v = rng.uniform(-1.0, 1.0);
    return m;
}

}  // namespace

int main() {
    Rng rng(42);

    {  // dense layer product at training shape
        const Mat a = random_mat(1200, 150, rng);
        const Mat w = random_mat(150, 150, rng);
        const Vec b(150, 0.1);
        Mat c;
        const double ts = time_of([&] { kernels::affine(a, w, b, c, Exec::Serial); }, 50);
        const double tp = time_of([&] { kernels::affine(a, w, b, c, Exec::Parallel); }, 50);
        report("affine 1200x150x150", ts, tp);
    }

    const FloeSystem system = FloeSystem::uniform(5, 1.0, 1.0, 2e7, 0.0, 50.0);
    {  // trajectory batch
        const double ts = time_of(
            [&] { dem::generate_corpus(system, 8, 2000, 1e-4, 7, 150, 200, Exec::Serial); }, 3);
        const double tp = time_of(
            [&] { dem::generate_corpus(system, 8, 2000, 1e-4, 7, 150, 200, Exec::Parallel); },
            3);
        report("generate 8 trajectories", ts, tp);
    }

    const auto corpus = dem::generate_corpus(system, 4, 400, 1e-4, 7);
    cn::TrainOptions opt;
    opt.epochs = 1;
    opt.pairs_per_epoch = 100;
    opt.validation_pairs = 100;
    const cn::TrainResult seed_model = cn::train(corpus, opt);
    const graph::ChainGraph g = graph::build_chain_graph(system.n_floes);

    {  // one batch gradient at the paper architecture
        Rng pick_rng(3);
        std::vector<std::pair<int, long>> picks;
        for (int i = 0; i < 100; ++i)
            picks.emplace_back(int(pick_rng.uniform() * 4), 2 + long(pick_rng.uniform() * 398));
        const cn::PairBatch batch =
            cn::assemble_batch(corpus, picks, g, 2, cn::TargetKind::Velocity);
        auto run = [&](Exec mode) {
            nn::MlpGrads pg = nn::zero_grads(seed_model.params.phi);
            nn::MlpGrads gg = nn::zero_grads(seed_model.params.gamma);
            cn::cn_batch_gradient(seed_model.params, g, batch, pg, gg, mode);
        };
        const double ts = time_of([&] { run(Exec::Serial); }, 10);
        const double tp = time_of([&] { run(Exec::Parallel); }, 10);
        report("batch gradient (100 pairs)", ts, tp);
    }

    {  // one forecast step for a 100-member ensemble
        auto advance_serial = da::make_cn_forecast(seed_model.params, Exec::Serial);
        auto advance_parallel = da::make_cn_forecast(seed_model.params, Exec::Parallel);
        std::vector<Vec> members(100, Vec(10, 0.0));
        Rng member_rng(9);
        for (Vec& m : members) {
            for (int k = 0; k < 5; ++k) {
                m[std::size_t(k)] = 5.0 + 9.0 * k + member_rng.uniform();
                m[std::size_t(5 + k)] = m[std::size_t(k)] + 0.015;
            }
        }
        auto members_s = members, members_p = members;
        const double ts = time_of([&] { advance_serial(members_s); }, 20);
        const double tp = time_of([&] { advance_parallel(members_p); }, 20);
        report("ensemble forecast (I=100)", ts, tp);
    }

    return 0;
}
