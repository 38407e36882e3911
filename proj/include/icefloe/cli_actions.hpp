#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "icefloe/cn.hpp"
#include "icefloe/filters.hpp"

namespace icefloe::cli {

// Every run function validates its inputs, performs the pipeline stage,
// writes artifacts atomically with the producing config embedded, and
// prints a short summary to stdout. Reruns with the same config are
// byte-identical.

struct GenerateConfig {
    int floes = 10;
    double domain_left = 0.0, domain_right = 100.0;
    long steps = 10000;
    double dt = 1e-4;
    double youngs_modulus = 2e7;
    double radius = 1.0, thickness = 1.0, density = 1.0;
    double v_min = 150.0, v_max = 200.0;
    std::uint64_t seed = 1;
    int count = 1;
    std::string out = "trajectory.csv";
};
nlohmann::json to_json(const GenerateConfig& c);
std::vector<std::string> run_generate(const GenerateConfig& c);

struct TrainCliConfig {
    std::vector<std::string> data;
    std::string out = "checkpoint.json";
    std::string loss_history;  // optional CSV
    int epochs = 40;
    long pairs_per_epoch = 20000;
    int batch = 100;
    double learning_rate = 1e-4;
    double lr_decay = 0.99;
    double validation_fraction = 0.1;
    double stop_val_velocity_rmse = 0.0;
    double max_seconds = 0.0;
    int d_phi = 100;
    int history = 2;
    std::string activation = "mish";
    std::string target = "velocity";
    std::uint64_t seed = 1;
    bool verbose = false;
    double edge_scale = 0.0;       // 0 = standardize from data
    bool zero_init_outputs = false;
};
nlohmann::json to_json(const TrainCliConfig& c);
cn::TrainResult run_train(const TrainCliConfig& c);

struct RolloutConfig {
    std::string checkpoint;
    std::string init;  // trajectory file providing the first two states
    long steps = 1000;
    std::string out = "rollout.csv";
};
nlohmann::json to_json(const RolloutConfig& c);
void run_rollout(const RolloutConfig& c);

struct AssimilateConfig {
    std::string checkpoint;
    std::string truth;
    std::string filter = "enkf";
    int members = 100;
    double sigma_model = 1.0;
    double sigma_obs = 1.0;
    long interval = 100;
    double inflation = 1.0;
    std::string observed = "even";  // even | all | comma-separated indices
    long steps = 0;                 // 0 = full truth horizon
    std::uint64_t seed = 1;
    std::string out = "assimilated.csv";
    std::string diagnostics = "diagnostics.csv";
};
nlohmann::json to_json(const AssimilateConfig& c);
da::AssimilationResult run_assimilate(const AssimilateConfig& c);

struct EvaluateConfig {
    std::string checkpoint;
    std::string pred;
    std::string truth;
    std::string out = "report.txt";
    std::string pcc_chart;  // optional PPM
};
nlohmann::json to_json(const EvaluateConfig& c);
void run_evaluate(const EvaluateConfig& c);

struct RenderConfig {
    std::string traj;
    std::string out_dir = "frames";
    long from = 0;
    long to = -1;  // -1 = last state
    long stride = 1;
    int width = 800;
    int height = 120;
};
nlohmann::json to_json(const RenderConfig& c);
std::vector<std::string> run_render(const RenderConfig& c);

// Debug print of the chain incidence matrices and edge permutation.
std::string run_graph_debug(int n_floes);

std::vector<int> parse_observed(const std::string& spec, int n_floes);

}  // namespace icefloe::cli
