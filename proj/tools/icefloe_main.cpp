// icefloe: deterministic 1D floe collision simulator, learned surrogate,
// and ensemble Kalman filtering in one CLI.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "icefloe/cli_actions.hpp"
#include "icefloe/errors.hpp"

namespace {

std::uint64_t default_seed() {
    if (const char* env = std::getenv("ICEFLOE_SEED"))
        return std::strtoull(env, nullptr, 10);
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace icefloe;

    CLI::App app{"1D sea-ice floe collision simulation, learned surrogate, and data assimilation"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a config file (flags override)");

    cli::GenerateConfig gen;
    gen.seed = default_seed();
    auto* c_gen = app.add_subcommand("generate", "Generate ground-truth trajectories");
    c_gen->add_option("--floes", gen.floes, "Number of floes");
    c_gen->add_option("--domain", [&gen](const std::vector<std::string>& v) {
        return std::sscanf(v.at(0).c_str(), "%lf,%lf", &gen.domain_left, &gen.domain_right) == 2;
    }, "Domain as L,R")->type_name("L,R");
    c_gen->add_option("--steps", gen.steps, "Steps per trajectory");
    c_gen->add_option("--dt", gen.dt, "Time-step length");
    c_gen->add_option("--youngs-modulus", gen.youngs_modulus, "Contact stiffness E");
    c_gen->add_option("--radius", gen.radius, "Floe radius");
    c_gen->add_option("--thickness", gen.thickness, "Floe thickness");
    c_gen->add_option("--density", gen.density, "Floe density");
    c_gen->add_option("--vmin", gen.v_min, "Minimum initial speed");
    c_gen->add_option("--vmax", gen.v_max, "Maximum initial speed");
    c_gen->add_option("--seed", gen.seed, "Random seed");
    c_gen->add_option("--count", gen.count, "Number of trajectories");
    c_gen->add_option("--out", gen.out, "Output trajectory file");

    cli::TrainCliConfig train;
    train.seed = default_seed();
    auto* c_train = app.add_subcommand("train", "Train the collision network");
    c_train->add_option("--data", train.data, "Input trajectory files")->required();
    c_train->add_option("--out", train.out, "Checkpoint path");
    c_train->add_option("--loss-history", train.loss_history, "Loss history CSV");
    c_train->add_option("--epochs", train.epochs, "Training epochs");
    c_train->add_option("--pairs-per-epoch", train.pairs_per_epoch, "Sampled pairs per epoch");
    c_train->add_option("--batch", train.batch, "Batch size");
    c_train->add_option("--lr", train.learning_rate, "Initial learning rate");
    c_train->add_option("--lr-decay", train.lr_decay, "Per-epoch learning-rate factor");
    c_train->add_option("--val-fraction", train.validation_fraction, "Held-out trajectory fraction");
    c_train->add_option("--stop-val-rmse", train.stop_val_velocity_rmse,
                        "Stop once val velocity RMSE drops below this (0 = off)");
    c_train->add_option("--max-seconds", train.max_seconds, "Wall-clock training cap (0 = off)");
    c_train->add_option("--d-phi", train.d_phi, "Edge-message width");
    c_train->add_option("--history", train.history, "History length (2 or 1)");
    c_train->add_option("--activation", train.activation, "mish | relu | silu");
    c_train->add_option("--target", train.target, "velocity | position");
    c_train->add_option("--seed", train.seed, "Random seed");
    c_train->add_flag("--verbose", train.verbose, "Per-epoch progress on stderr");
    c_train->add_option("--edge-scale", train.edge_scale,
                        "Fixed edge-feature scale in length units (0 = standardize)");
    c_train->add_flag("--zero-init-outputs", train.zero_init_outputs,
                      "Start both output layers at zero");

    cli::RolloutConfig roll;
    auto* c_roll = app.add_subcommand("rollout", "Autoregressive surrogate rollout");
    c_roll->add_option("--checkpoint", roll.checkpoint, "Model checkpoint")->required();
    c_roll->add_option("--init", roll.init, "Trajectory providing the first two states")->required();
    c_roll->add_option("--steps", roll.steps, "Steps to predict");
    c_roll->add_option("--out", roll.out, "Output trajectory file");

    cli::AssimilateConfig assim;
    assim.seed = default_seed();
    auto* c_assim = app.add_subcommand("assimilate", "Correct a surrogate run with observations");
    c_assim->add_option("--checkpoint", assim.checkpoint, "Model checkpoint")->required();
    c_assim->add_option("--truth", assim.truth, "Ground-truth trajectory")->required();
    c_assim->add_option("--filter", assim.filter, "enkf | etkf");
    c_assim->add_option("--members", assim.members, "Ensemble size");
    c_assim->add_option("--sigma-model", assim.sigma_model, "Process noise sigma");
    c_assim->add_option("--sigma-obs", assim.sigma_obs, "Observation noise sigma");
    c_assim->add_option("--interval", assim.interval, "Steps between observations");
    c_assim->add_option("--inflation", assim.inflation, "ETKF covariance inflation");
    c_assim->add_option("--observed", assim.observed, "even | all | comma-separated floe indices");
    c_assim->add_option("--steps", assim.steps, "Horizon (0 = full truth)");
    c_assim->add_option("--seed", assim.seed, "Random seed");
    c_assim->add_option("--out", assim.out, "Assimilated trajectory file");
    c_assim->add_option("--diagnostics", assim.diagnostics, "Per-step diagnostics CSV");

    cli::EvaluateConfig eval;
    auto* c_eval = app.add_subcommand("evaluate", "Skill scores for a prediction");
    c_eval->add_option("--checkpoint", eval.checkpoint, "Model checkpoint")->required();
    c_eval->add_option("--pred", eval.pred, "Predicted trajectory")->required();
    c_eval->add_option("--truth", eval.truth, "Ground-truth trajectory")->required();
    c_eval->add_option("--out", eval.out, "Report file (key=value lines)");
    c_eval->add_option("--pcc-chart", eval.pcc_chart, "Optional per-floe PCC chart (PPM)");

    cli::RenderConfig render;
    auto* c_render = app.add_subcommand("render", "Render trajectory frames (PPM)");
    c_render->add_option("--traj", render.traj, "Trajectory file")->required();
    c_render->add_option("--out-dir", render.out_dir, "Frame directory");
    c_render->add_option("--from", render.from, "First step");
    c_render->add_option("--to", render.to, "Last step (-1 = end)");
    c_render->add_option("--stride", render.stride, "Step stride");
    c_render->add_option("--width", render.width, "Frame width in pixels");
    c_render->add_option("--height", render.height, "Frame height in pixels");

    int graph_floes = 10;
    auto* c_graph = app.add_subcommand("graph", "Print the chain relation matrices");
    c_graph->add_option("--floes", graph_floes, "Number of floes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (c_gen->parsed()) cli::run_generate(gen);
        if (c_train->parsed()) cli::run_train(train);
        if (c_roll->parsed()) cli::run_rollout(roll);
        if (c_assim->parsed()) cli::run_assimilate(assim);
        if (c_eval->parsed()) cli::run_evaluate(eval);
        if (c_render->parsed()) cli::run_render(render);
        if (c_graph->parsed()) std::cout << cli::run_graph_debug(graph_floes);
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
