#include "icefloe/checkpoint.hpp"

#include "icefloe/errors.hpp"
#include "icefloe/traj_io.hpp"

namespace icefloe::io {

using nlohmann::json;

namespace {

json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows; ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols; ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat mat_from_json(const json& j) {
    const int rows = int(j.size());
    const int cols = rows ? int(j.at(0).size()) : 0;
    Mat m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        const json& row = j.at(std::size_t(r));
        if (int(row.size()) != cols) throw InvalidConfig("checkpoint: ragged weight matrix");
        for (int c = 0; c < cols; ++c) m(r, c) = row.at(std::size_t(c)).get<double>();
    }
    return m;
}

json mlp_to_json(const nn::Mlp& mlp) {
    json j;
    j["widths"] = mlp.widths;
    j["weights"] = json::array();
    j["biases"] = json::array();
    for (int l = 0; l < mlp.n_layers(); ++l) {
        j["weights"].push_back(mat_to_json(mlp.weights[std::size_t(l)]));
        j["biases"].push_back(mlp.biases[std::size_t(l)]);
    }
    return j;
}

nn::Mlp mlp_from_json(const json& j, nn::Activation activation) {
    nn::Mlp mlp;
    mlp.widths = j.at("widths").get<std::vector<int>>();
    mlp.activation = activation;
    for (const json& w : j.at("weights")) mlp.weights.push_back(mat_from_json(w));
    for (const json& b : j.at("biases")) mlp.biases.push_back(b.get<Vec>());
    if (mlp.widths.size() < 2 || mlp.weights.size() + 1 != mlp.widths.size() ||
        mlp.biases.size() != mlp.weights.size())
        throw InvalidConfig("checkpoint: inconsistent network layout");
    for (std::size_t l = 0; l + 1 < mlp.widths.size(); ++l) {
        if (mlp.weights[l].rows != mlp.widths[l] || mlp.weights[l].cols != mlp.widths[l + 1] ||
            int(mlp.biases[l].size()) != mlp.widths[l + 1])
            throw InvalidConfig("checkpoint: weight shapes do not match widths");
    }
    return mlp;
}

}  // namespace

std::string format_checkpoint(const cn::CNParams& params, const json& config) {
    json j;
    j["format"] = "icefloe-checkpoint";
    j["version"] = kCheckpointVersion;
    j["config"] = config;
    j["system"] = {{"n_floes", params.system.n_floes},
                   {"radius", params.system.radius},
                   {"thickness", params.system.thickness},
                   {"mass", params.system.mass},
                   {"youngs_modulus", params.system.youngs_modulus},
                   {"domain", {params.system.domain_left, params.system.domain_right}}};
    j["dt"] = params.dt;
    j["model"] = {{"history_length", params.history_length},
                  {"target", cn::to_string(params.target)},
                  {"activation", nn::to_string(params.phi.activation)},
                  {"d_phi", params.d_phi},
                  {"phi", mlp_to_json(params.phi)},
                  {"gamma", mlp_to_json(params.gamma)},
                  {"stats",
                   {{"node_mean", params.stats.node_mean},
                    {"node_std", params.stats.node_std},
                    {"edge_mean", params.stats.edge_mean},
                    {"edge_std", params.stats.edge_std},
                    {"target_mean", params.stats.target_mean},
                    {"target_std", params.stats.target_std}}}};
    return j.dump(1);
}

void save_checkpoint(const std::string& path, const cn::CNParams& params, const json& config) {
    atomic_write_text(path, format_checkpoint(params, config));
}

Checkpoint load_checkpoint(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text(path));
    } catch (const json::exception& e) {
        throw InvalidConfig("checkpoint " + path + ": " + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != "icefloe-checkpoint")
            throw InvalidConfig("checkpoint " + path + ": unknown format marker");
        if (j.at("version").get<int>() != kCheckpointVersion)
            throw InvalidConfig("checkpoint " + path + ": unsupported version");
        Checkpoint ck;
        ck.config = j.value("config", json::object());
        const json& sys = j.at("system");
        ck.params.system.n_floes = sys.at("n_floes").get<int>();
        ck.params.system.radius = sys.at("radius").get<Vec>();
        ck.params.system.thickness = sys.at("thickness").get<Vec>();
        ck.params.system.mass = sys.at("mass").get<Vec>();
        ck.params.system.youngs_modulus = sys.at("youngs_modulus").get<double>();
        ck.params.system.domain_left = sys.at("domain").at(0).get<double>();
        ck.params.system.domain_right = sys.at("domain").at(1).get<double>();
        ck.params.dt = j.at("dt").get<double>();
        const json& model = j.at("model");
        ck.params.history_length = model.at("history_length").get<int>();
        ck.params.target = cn::target_from_string(model.at("target").get<std::string>());
        const nn::Activation act =
            nn::activation_from_string(model.at("activation").get<std::string>());
        ck.params.d_phi = model.at("d_phi").get<int>();
        ck.params.phi = mlp_from_json(model.at("phi"), act);
        ck.params.gamma = mlp_from_json(model.at("gamma"), act);
        const json& stats = model.at("stats");
        ck.params.stats.node_mean = stats.at("node_mean").get<Vec>();
        ck.params.stats.node_std = stats.at("node_std").get<Vec>();
        ck.params.stats.edge_mean = stats.at("edge_mean").get<double>();
        ck.params.stats.edge_std = stats.at("edge_std").get<double>();
        ck.params.stats.target_mean = stats.at("target_mean").get<double>();
        ck.params.stats.target_std = stats.at("target_std").get<double>();
        ck.params.system.validate();
        return ck;
    } catch (const json::exception& e) {
        throw InvalidConfig("checkpoint " + path + ": " + e.what());
    }
}

}  // namespace icefloe::io
