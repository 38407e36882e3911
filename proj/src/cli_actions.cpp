#include "icefloe/cli_actions.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>

#include "icefloe/checkpoint.hpp"
#include "icefloe/dem.hpp"
#include "icefloe/errors.hpp"
#include "icefloe/graph.hpp"
#include "icefloe/metrics.hpp"
#include "icefloe/render.hpp"
#include "icefloe/traj_io.hpp"

namespace icefloe::cli {

using nlohmann::json;

namespace {
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace

json to_json(const GenerateConfig& c) {
    return {{"command", "generate"},   {"floes", c.floes},
            {"domain", {c.domain_left, c.domain_right}},
            {"steps", c.steps},        {"dt", c.dt},
            {"youngs_modulus", c.youngs_modulus},
            {"radius", c.radius},      {"thickness", c.thickness},
            {"density", c.density},    {"v_min", c.v_min},
            {"v_max", c.v_max},        {"seed", c.seed},
            {"count", c.count},        {"out", c.out}};
}

std::vector<std::string> run_generate(const GenerateConfig& c) {
    const FloeSystem system = FloeSystem::uniform(c.floes, c.radius, c.thickness,
                                                  c.youngs_modulus, c.domain_left,
                                                  c.domain_right, c.density);
    const std::string config = to_json(c).dump();
    std::vector<std::string> written;
    long collisions = 0;
    for (int k = 0; k < c.count; ++k) {
        Rng rng = Rng::substream(c.seed, std::uint64_t(k));
        const SimState init = dem::sample_initial_conditions(system, rng, c.v_min, c.v_max);
        const Trajectory traj = dem::generate_trajectory(init, system, c.steps, c.dt);
        std::string path = c.out;
        if (c.count > 1) {
            const std::size_t dot = path.rfind('.');
            const std::string suffix = "_" + std::to_string(k);
            if (dot == std::string::npos)
                path += suffix;
            else
                path.insert(dot, suffix);
        }
        io::write_trajectory(path, traj, config);
        collisions += dem::count_collision_events(traj);
        written.push_back(path);
    }
    std::cout << "generate: " << c.floes << " floes, " << c.steps << " steps, " << c.count
              << " trajectorie(s), " << collisions << " collision event(s) -> "
              << written.front() << (c.count > 1 ? " .." : "") << "\n";
    return written;
}

json to_json(const TrainCliConfig& c) {
    return {{"command", "train"},
            {"data", c.data},
            {"out", c.out},
            {"loss_history", c.loss_history},
            {"epochs", c.epochs},
            {"pairs_per_epoch", c.pairs_per_epoch},
            {"batch", c.batch},
            {"learning_rate", c.learning_rate},
            {"lr_decay", c.lr_decay},
            {"validation_fraction", c.validation_fraction},
            {"stop_val_velocity_rmse", c.stop_val_velocity_rmse},
            {"max_seconds", c.max_seconds},
            {"d_phi", c.d_phi},
            {"history", c.history},
            {"activation", c.activation},
            {"target", c.target},
            {"seed", c.seed},
            {"edge_scale", c.edge_scale},
            {"zero_init_outputs", c.zero_init_outputs}};
}

cn::TrainResult run_train(const TrainCliConfig& c) {
    if (c.data.empty()) throw InvalidConfig("train: no input trajectories");
    std::vector<Trajectory> corpus;
    corpus.reserve(c.data.size());
    for (const std::string& path : c.data) corpus.push_back(io::read_trajectory(path));

    cn::TrainOptions opt;
    opt.batch_size = c.batch;
    opt.learning_rate = c.learning_rate;
    opt.lr_decay = c.lr_decay;
    opt.epochs = c.epochs;
    opt.pairs_per_epoch = c.pairs_per_epoch;
    opt.validation_fraction = c.validation_fraction;
    opt.stop_val_velocity_rmse = c.stop_val_velocity_rmse;
    opt.max_seconds = c.max_seconds;
    opt.seed = c.seed;
    opt.history_length = c.history;
    opt.target = cn::target_from_string(c.target);
    opt.activation = nn::activation_from_string(c.activation);
    opt.d_phi = c.d_phi;
    opt.verbose = c.verbose;
    opt.edge_scale = c.edge_scale;
    opt.zero_init_outputs = c.zero_init_outputs;

    cn::TrainResult result = cn::train(corpus, opt);
    io::save_checkpoint(c.out, result.params, to_json(c));

    if (!c.loss_history.empty()) {
        std::string csv = "# config=" + to_json(c).dump() + "\n";
        csv += "epoch,lr,train_mse,val_mse,val_velocity_rmse\n";
        for (const cn::EpochStats& e : result.history)
            csv += std::to_string(e.epoch) + "," + fmt(e.lr) + "," + fmt(e.train_mse) + "," +
                   fmt(e.val_mse) + "," + fmt(e.val_velocity_rmse) + "\n";
        io::atomic_write_text(c.loss_history, csv);
    }
    std::cout << "train: " << result.epochs_run << " epoch(s), final val velocity rmse "
              << (result.history.empty() ? 0.0 : result.history.back().val_velocity_rmse)
              << " (persistence " << result.persistence_val_rmse << ") -> " << c.out << "\n";
    return result;
}

json to_json(const RolloutConfig& c) {
    return {{"command", "rollout"},
            {"checkpoint", c.checkpoint},
            {"init", c.init},
            {"steps", c.steps},
            {"out", c.out}};
}

void run_rollout(const RolloutConfig& c) {
    const io::Checkpoint ck = io::load_checkpoint(c.checkpoint);
    const Trajectory init = io::read_trajectory(c.init);
    if (init.n_states() < 2) throw DataTooShort("rollout: need two initial states");
    const Trajectory pred = cn::rollout(init.states[0], init.states[1], init.system, ck.params,
                                        c.steps);
    io::write_trajectory(c.out, pred, to_json(c).dump());
    std::cout << "rollout: " << c.steps << " step(s), "
              << dem::count_ordering_violations(pred) << " ordering violation(s) -> " << c.out
              << "\n";
}

json to_json(const AssimilateConfig& c) {
    return {{"command", "assimilate"},
            {"checkpoint", c.checkpoint},
            {"truth", c.truth},
            {"filter", c.filter},
            {"members", c.members},
            {"sigma_model", c.sigma_model},
            {"sigma_obs", c.sigma_obs},
            {"interval", c.interval},
            {"inflation", c.inflation},
            {"observed", c.observed},
            {"steps", c.steps},
            {"seed", c.seed},
            {"out", c.out},
            {"diagnostics", c.diagnostics}};
}

std::vector<int> parse_observed(const std::string& spec, int n_floes) {
    if (spec == "even") return da::ObservationModel::even_floes(n_floes);
    if (spec == "all") {
        std::vector<int> idx(std::size_t(n_floes), 0);
        for (int i = 0; i < n_floes; ++i) idx[std::size_t(i)] = i;
        return idx;
    }
    std::vector<int> idx;
    const char* p = spec.c_str();
    while (*p) {
        char* end = nullptr;
        const long v = std::strtol(p, &end, 10);
        if (end == p) throw InvalidConfig("assimilate: bad observed-floes list '" + spec + "'");
        idx.push_back(int(v));
        p = end;
        if (*p == ',') ++p;
    }
    return idx;
}

da::AssimilationResult run_assimilate(const AssimilateConfig& c) {
    const io::Checkpoint ck = io::load_checkpoint(c.checkpoint);
    const Trajectory truth = io::read_trajectory(c.truth);

    da::AssimilationOptions opt;
    opt.filter = da::filter_from_string(c.filter);
    opt.ensemble_size = c.members;
    opt.sigma_model = c.sigma_model;
    opt.sigma_obs = c.sigma_obs;
    opt.interval = c.interval;
    opt.inflation = c.inflation;
    opt.observed_floes = parse_observed(c.observed, truth.n_floes());
    opt.seed = c.seed;
    opt.n_steps = c.steps;

    const da::AssimilationResult result = da::run_assimilation(truth, ck.params, opt);
    const std::string config = to_json(c).dump();
    io::write_trajectory(c.out, result.mean_trajectory, config);

    std::string csv = "# config=" + config + "\n";
    csv += "step,rmse,spread,analysis\n";
    for (const da::StepDiagnostic& d : result.diagnostics)
        csv += std::to_string(d.step) + "," + fmt(d.rmse) + "," + fmt(d.spread) + "," +
               (d.analysis ? "1" : "0") + "\n";
    io::atomic_write_text(c.diagnostics, csv);

    std::cout << "assimilate: " << c.filter << ", " << result.n_analyses
              << " analysis step(s), time-mean rmse " << result.time_mean_rmse << " -> "
              << c.out << "\n";
    return result;
}

json to_json(const EvaluateConfig& c) {
    return {{"command", "evaluate"}, {"checkpoint", c.checkpoint}, {"pred", c.pred},
            {"truth", c.truth},      {"out", c.out},               {"pcc_chart", c.pcc_chart}};
}

void run_evaluate(const EvaluateConfig& c) {
    const io::Checkpoint ck = io::load_checkpoint(c.checkpoint);
    const Trajectory pred = io::read_trajectory(c.pred);
    const Trajectory truth = io::read_trajectory(c.truth);
    const metrics::SkillReport report = metrics::evaluate(pred, truth, ck.params);

    std::string out = "# config=" + to_json(c).dump() + "\n";
    out += "one_step_position_rmse=" + fmt(report.one_step_position_rmse) + "\n";
    out += "one_step_velocity_rmse=" + fmt(report.one_step_velocity_rmse) + "\n";
    out += "simulation_rmse=" + fmt(report.simulation_rmse) + "\n";
    out += "mean_pcc=" + fmt(report.mean_pcc) + "\n";
    out += "horizon=" + std::to_string(report.horizon) + "\n";
    out += "persistence_velocity_rmse=" + fmt(metrics::persistence_velocity_rmse(truth)) + "\n";
    for (std::size_t i = 0; i < report.pcc_per_floe.size(); ++i)
        out += "pcc_floe_" + std::to_string(i) + "=" + fmt(report.pcc_per_floe[i]) + "\n";
    io::atomic_write_text(c.out, out);

    if (!c.pcc_chart.empty())
        io::atomic_write_text(c.pcc_chart,
                              render::to_ppm(render::render_pcc_chart(report.pcc_per_floe)));
    std::cout << "evaluate: simulation rmse " << report.simulation_rmse << ", mean pcc "
              << report.mean_pcc << " -> " << c.out << "\n";
}

json to_json(const RenderConfig& c) {
    return {{"command", "render"}, {"traj", c.traj},     {"out_dir", c.out_dir},
            {"from", c.from},      {"to", c.to},         {"stride", c.stride},
            {"width", c.width},    {"height", c.height}};
}

std::vector<std::string> run_render(const RenderConfig& c) {
    const Trajectory traj = io::read_trajectory(c.traj);
    const long to = c.to < 0 ? traj.n_states() - 1 : c.to;
    render::RenderOptions opt;
    opt.width = c.width;
    opt.height = c.height;
    const auto written = render::render_frames(traj, c.from, to, c.stride, c.out_dir, opt);
    std::cout << "render: " << written.size() << " frame(s) -> " << c.out_dir << "\n";
    return written;
}

std::string run_graph_debug(int n_floes) {
    const graph::ChainGraph g = graph::build_chain_graph(n_floes);
    std::string out = format_relations(g.rel);
    out += format_permutation(g.perm);
    return out;
}

}  // namespace icefloe::cli
