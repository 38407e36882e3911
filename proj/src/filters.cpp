#include "icefloe/filters.hpp"

#include <cmath>
#include <memory>

#include "icefloe/errors.hpp"
#include "icefloe/graph.hpp"

namespace icefloe::da {

std::vector<int> ObservationModel::even_floes(int n_floes) {
    std::vector<int> idx;
    for (int i = 0; i < n_floes; i += 2) idx.push_back(i);
    return idx;
}

Mat ObservationModel::selection(int n_floes) const {
    Mat h(int(observed_floes.size()), 2 * n_floes);
    for (std::size_t r = 0; r < observed_floes.size(); ++r) {
        const int floe = observed_floes[r];
        if (floe < 0 || floe >= n_floes)
            throw InvalidConfig("ObservationModel: observed floe out of range");
        h(int(r), n_floes + floe) = 1.0;
    }
    return h;
}

std::string to_string(FilterKind k) { return k == FilterKind::EnKF ? "enkf" : "etkf"; }

FilterKind filter_from_string(const std::string& s) {
    if (s == "enkf") return FilterKind::EnKF;
    if (s == "etkf") return FilterKind::Etkf;
    throw InvalidConfig("unknown filter kind: " + s);
}

void apply_process_noise(Ensemble& ens, double sigma_model, std::vector<Rng>* member_rngs) {
    if (!member_rngs || sigma_model <= 0.0) return;
    const int n = ens.n_floes;
    for (int i = 0; i < ens.size(); ++i) {
        Rng& rng = (*member_rngs)[std::size_t(i)];
        Vec& u = ens.members[std::size_t(i)];
        for (int k = 0; k < n; ++k) {
            const double q = sigma_model * rng.normal();
            u[std::size_t(k)] += q;
            u[std::size_t(n + k)] += q;
        }
    }
}

void forecast_step(Ensemble& ens, const ForecastFn& advance, const NoiseModel& noise,
                   std::vector<Rng>* member_rngs, long step_index) {
    advance(ens.members);
    apply_process_noise(ens, noise.sigma_model, member_rngs);
    for (int i = 0; i < ens.size(); ++i)
        for (double v : ens.members[std::size_t(i)])
            if (!std::isfinite(v))
                throw NonFiniteMember(step_index, i, "forecast produced a non-finite member");
}

namespace {

Vec ensemble_mean(const std::vector<Vec>& members) {
    Vec mean(members.front().size(), 0.0);
    for (const Vec& m : members)
        for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += m[k];
    for (double& v : mean) v /= double(members.size());
    return mean;
}

// anomaly columns about the mean: dim x I
Mat anomalies(const std::vector<Vec>& members, const Vec& mean) {
    Mat u(int(mean.size()), int(members.size()));
    for (std::size_t i = 0; i < members.size(); ++i)
        for (std::size_t k = 0; k < mean.size(); ++k)
            u(int(k), int(i)) = members[i][k] - mean[k];
    return u;
}

Vec apply_h(const Mat& h, const Vec& u) {
    Vec out(std::size_t(h.rows), 0.0);
    for (int r = 0; r < h.rows; ++r) {
        double acc = 0.0;
        for (int c = 0; c < h.cols; ++c) acc += h(r, c) * u[std::size_t(c)];
        out[std::size_t(r)] = acc;
    }
    return out;
}

}  // namespace

void enkf_update(std::vector<Vec>& members, const Vec& y, const Mat& h, double sigma_obs,
                 std::vector<Rng>* member_rngs) {
    const int n_members = int(members.size());
    if (n_members < 2) throw InvalidConfig("enkf_update: need at least two members");
    const int m = h.rows;
    if (int(y.size()) != m) throw DimensionMismatch("enkf_update: observation length");
    if (m == 0) return;

    const Vec mean = ensemble_mean(members);
    const Mat u = anomalies(members, mean);
    const Mat v = matmul(h, u);  // m x I

    const double scale = 1.0 / double(n_members - 1);
    Mat s(m, m);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) {
            double acc = 0.0;
            for (int i = 0; i < n_members; ++i) acc += v(r, i) * v(c, i);
            s(r, c) = acc * scale;
        }
    for (int r = 0; r < m; ++r) s(r, r) += sigma_obs * sigma_obs;

    // B = U V^T / (I-1); gain K = B S^-1 via S K^T = B^T
    Mat bt(m, u.rows);
    for (int r = 0; r < m; ++r)
        for (int d = 0; d < u.rows; ++d) {
            double acc = 0.0;
            for (int i = 0; i < n_members; ++i) acc += u(d, i) * v(r, i);
            bt(r, d) = acc * scale;
        }
    Mat kt = bt;
    if (!cholesky_solve(s, kt)) {
        Mat jittered = s;
        for (int r = 0; r < m; ++r) jittered(r, r) += 1e-10;
        kt = bt;
        if (!cholesky_solve(jittered, kt))
            throw SingularInnovationCovariance("enkf_update: innovation covariance singular");
    }

    for (int i = 0; i < n_members; ++i) {
        Vec& member = members[std::size_t(i)];
        Vec innovation = apply_h(h, member);
        for (int r = 0; r < m; ++r) {
            double yr = y[std::size_t(r)];
            if (member_rngs) yr += sigma_obs * (*member_rngs)[std::size_t(i)].normal();
            innovation[std::size_t(r)] = yr - innovation[std::size_t(r)];
        }
        for (std::size_t d = 0; d < member.size(); ++d) {
            double acc = 0.0;
            for (int r = 0; r < m; ++r) acc += kt(r, int(d)) * innovation[std::size_t(r)];
            member[d] += acc;
        }
    }
}

EtkfTransform etkf_transform(const Mat& v, double sigma_obs, double inflation) {
    const int n_members = v.cols;
    const int m = v.rows;
    const double r_inv = 1.0 / (sigma_obs * sigma_obs);
    EtkfTransform tr;
    tr.j = Mat(n_members, n_members);
    const double prior = double(n_members - 1) / (1.0 + inflation);
    for (int a = 0; a < n_members; ++a) {
        for (int b = 0; b < n_members; ++b) {
            double acc = 0.0;
            for (int r = 0; r < m; ++r) acc += v(r, a) * v(r, b);
            tr.j(a, b) = acc * r_inv + (a == b ? prior : 0.0);
        }
    }
    Mat x;
    Vec lambda;
    if (!jacobi_eigensymm(tr.j, x, lambda))
        throw DecompositionFailure("etkf_transform: eigendecomposition did not converge");
    for (double l : lambda)
        if (!(l > 1e-12))
            throw DecompositionFailure("etkf_transform: J is not positive definite");

    tr.j_inv = Mat(n_members, n_members);
    tr.t = Mat(n_members, n_members);
    const double root = std::sqrt(double(n_members - 1));
    for (int a = 0; a < n_members; ++a)
        for (int b = 0; b < n_members; ++b) {
            double inv = 0.0, t = 0.0;
            for (int k = 0; k < n_members; ++k) {
                const double xab = x(a, k) * x(b, k);
                inv += xab / lambda[std::size_t(k)];
                t += xab / std::sqrt(lambda[std::size_t(k)]);
            }
            tr.j_inv(a, b) = inv;
            tr.t(a, b) = root * t;
        }
    return tr;
}

void etkf_update(std::vector<Vec>& members, const Vec& y, const Mat& h, double sigma_obs,
                 double inflation) {
    const int n_members = int(members.size());
    if (n_members < 2) throw InvalidConfig("etkf_update: need at least two members");
    const int m = h.rows;
    if (int(y.size()) != m) throw DimensionMismatch("etkf_update: observation length");
    if (m == 0) return;

    Vec mean = ensemble_mean(members);
    Mat u = anomalies(members, mean);
    const Mat v = matmul(h, u);
    const EtkfTransform tr = etkf_transform(v, sigma_obs, inflation);

    // K = U J^-1 V^T R^-1
    const double r_inv = 1.0 / (sigma_obs * sigma_obs);
    const Mat uj = matmul(u, tr.j_inv);       // dim x I
    const Mat k = matmul(uj, transpose(v));   // dim x m

    Vec innovation = apply_h(h, mean);
    for (int r = 0; r < m; ++r) innovation[std::size_t(r)] = y[std::size_t(r)] - innovation[std::size_t(r)];
    for (int d = 0; d < u.rows; ++d) {
        double acc = 0.0;
        for (int r = 0; r < m; ++r) acc += k(d, r) * innovation[std::size_t(r)];
        mean[std::size_t(d)] += acc * r_inv;
    }

    const Mat updated = matmul(u, tr.t);
    for (int i = 0; i < n_members; ++i)
        for (int d = 0; d < u.rows; ++d)
            members[std::size_t(i)][std::size_t(d)] = updated(d, i) + mean[std::size_t(d)];
}

void enkf_analysis(Ensemble& ens, const Vec& y, const Mat& h, double sigma_obs,
                   double sigma_model, std::vector<Rng>* member_rngs) {
    apply_process_noise(ens, sigma_model, member_rngs);
    enkf_update(ens.members, y, h, sigma_obs, member_rngs);
}

void etkf_analysis(Ensemble& ens, const Vec& y, const Mat& h, double sigma_obs,
                   double sigma_model, double inflation, std::vector<Rng>* member_rngs) {
    apply_process_noise(ens, sigma_model, member_rngs);
    etkf_update(ens.members, y, h, sigma_obs, inflation);
}

namespace {

double position_rmse(const Vec& mean, const Vec& truth_x, int n_floes) {
    double acc = 0.0;
    for (int i = 0; i < n_floes; ++i) {
        const double d = mean[std::size_t(n_floes + i)] - truth_x[std::size_t(i)];
        acc += d * d;
    }
    return std::sqrt(acc / double(n_floes));
}

double position_spread(const std::vector<Vec>& members, const Vec& mean, int n_floes) {
    double acc = 0.0;
    for (int k = 0; k < n_floes; ++k) {
        double var = 0.0;
        for (const Vec& m : members) {
            const double d = m[std::size_t(n_floes + k)] - mean[std::size_t(n_floes + k)];
            var += d * d;
        }
        acc += std::sqrt(var / double(members.size()));
    }
    return acc / double(n_floes);
}

}  // namespace

AssimilationResult run_assimilation_core(const Trajectory& truth, const ForecastFn& advance,
                                         const AssimilationOptions& opt) {
    if (truth.n_states() < 3) throw DataTooShort("run_assimilation: truth too short");
    if (opt.ensemble_size < 2) throw InvalidConfig("run_assimilation: need at least 2 members");
    const int n = truth.n_floes();
    const long horizon =
        opt.n_steps > 0 ? std::min(opt.n_steps, truth.n_states() - 1) : truth.n_states() - 1;

    ObservationModel obs;
    obs.observed_floes =
        opt.observed_floes.empty() ? ObservationModel::even_floes(n) : opt.observed_floes;
    obs.sigma_obs = opt.sigma_obs;
    obs.interval = opt.interval;
    const Mat h = obs.selection(n);

    std::vector<Rng> member_rngs;
    member_rngs.reserve(std::size_t(opt.ensemble_size));
    for (int i = 0; i < opt.ensemble_size; ++i)
        member_rngs.push_back(Rng::substream(opt.seed, 1000 + std::uint64_t(i)));
    Rng obs_rng = Rng::substream(opt.seed, 1);

    Ensemble ens;
    ens.n_floes = n;
    ens.members.assign(std::size_t(opt.ensemble_size), Vec(std::size_t(2 * n), 0.0));
    for (int i = 0; i < opt.ensemble_size; ++i) {
        Vec& u = ens.members[std::size_t(i)];
        for (int k = 0; k < n; ++k) {
            u[std::size_t(k)] = truth.states[0].x[std::size_t(k)];
            u[std::size_t(n + k)] = truth.states[1].x[std::size_t(k)];
        }
    }
    apply_process_noise(ens, opt.sigma_model, &member_rngs);

    AssimilationResult result;
    result.mean_trajectory.system = truth.system;
    result.mean_trajectory.dt = truth.dt;
    auto push_mean_state = [&](long j) {
        const Vec mean = ensemble_mean(ens.members);
        SimState s;
        s.time_index = j;
        s.x.assign(mean.begin() + n, mean.end());
        s.v.resize(std::size_t(n));
        for (int k = 0; k < n; ++k)
            s.v[std::size_t(k)] =
                (mean[std::size_t(n + k)] - mean[std::size_t(k)]) / truth.dt;
        result.mean_trajectory.states.push_back(std::move(s));

        StepDiagnostic d;
        d.step = j;
        d.rmse = position_rmse(mean, truth.states[std::size_t(j)].x, n);
        d.spread = position_spread(ens.members, mean, n);
        result.diagnostics.push_back(d);
    };

    {  // state 0: the lagged half of the initial ensemble
        const Vec mean = ensemble_mean(ens.members);
        SimState s0;
        s0.time_index = 0;
        s0.x.assign(mean.begin(), mean.begin() + n);
        s0.v.assign(std::size_t(n), 0.0);
        result.mean_trajectory.states.push_back(std::move(s0));
    }
    push_mean_state(1);

    // Between observations members apply the prediction model only; the
    // process noise enters through the initial spread and the analysis-time
    // perturbations. Injecting q every step instead would random-walk the
    // ensemble mean by sigma*sqrt(interval/I) between analyses, which at
    // sigma = 1 swamps the surrogate's own error.
    const NoiseModel no_noise{0.0};
    for (long j = 2; j <= horizon; ++j) {
        forecast_step(ens, advance, no_noise, &member_rngs, j);
        const bool observe = obs.interval > 0 && j % obs.interval == 0;
        if (observe) {
            Vec truth_member(std::size_t(2 * n), 0.0);
            for (int k = 0; k < n; ++k) {
                truth_member[std::size_t(k)] = truth.states[std::size_t(j - 1)].x[std::size_t(k)];
                truth_member[std::size_t(n + k)] = truth.states[std::size_t(j)].x[std::size_t(k)];
            }
            Vec y = apply_h(h, truth_member);
            for (double& val : y) val += opt.sigma_obs * obs_rng.normal();
            if (opt.filter == FilterKind::EnKF)
                enkf_analysis(ens, y, h, opt.sigma_obs, opt.sigma_model, &member_rngs);
            else
                etkf_analysis(ens, y, h, opt.sigma_obs, opt.sigma_model, opt.inflation,
                              &member_rngs);
            ++result.n_analyses;
        }
        push_mean_state(j);
        result.diagnostics.back().analysis = observe;
    }

    double acc = 0.0;
    for (const StepDiagnostic& d : result.diagnostics) acc += d.rmse;
    result.time_mean_rmse = acc / double(result.diagnostics.size());
    return result;
}

ForecastFn make_cn_forecast(const cn::CNParams& params, kernels::Exec mode) {
    const auto g = std::make_shared<graph::ChainGraph>(
        graph::build_chain_graph(params.system.n_floes));
    return [params, g, mode](std::vector<Vec>& members) {
        const int n = params.system.n_floes;
        const int n_nodes = g->rel.n_nodes;
        const int n_edges = g->rel.n_edges;
        const int b = int(members.size());
        const int f = params.node_feature_count();
        Mat nodes(b * n_nodes, f);
        Mat edges(b * n_edges, 1);
        Vec x_prev(std::size_t(n), 0.0), x_cur(std::size_t(n), 0.0), v_cur(std::size_t(n), 0.0);
        for (int s = 0; s < b; ++s) {
            const Vec& u = members[std::size_t(s)];
            for (int k = 0; k < n; ++k) {
                x_prev[std::size_t(k)] = u[std::size_t(k)];
                x_cur[std::size_t(k)] = u[std::size_t(n + k)];
                v_cur[std::size_t(k)] =
                    (u[std::size_t(n + k)] - u[std::size_t(k)]) / params.dt;
            }
            const cn::NodeFeatureBlock block = cn::features_from_positions(
                x_prev, x_cur, v_cur, params.system, params.dt, params.history_length);
            for (int r = 0; r < n_nodes; ++r)
                for (int c = 0; c < f; ++c) nodes(s * n_nodes + r, c) = block.f(r, c);
            const Vec pos = graph::chain_positions(x_cur, params.system.domain_left,
                                                   params.system.domain_right);
            const Vec e = graph::edge_features(pos, g->rel);
            for (int k = 0; k < n_edges; ++k) edges(s * n_edges + k, 0) = e[std::size_t(k)];
        }
        const Vec pred = cn::cn_forward_stacked(nodes, edges, *g, params, mode);
        for (int s = 0; s < b; ++s) {
            Vec& u = members[std::size_t(s)];
            for (int k = 0; k < n; ++k) {
                const double cur = u[std::size_t(n + k)];
                const double p = pred[std::size_t(s * n_nodes + 1 + k)];
                const double next = params.target == cn::TargetKind::Velocity
                                        ? cur + p * params.dt
                                        : p;
                u[std::size_t(k)] = cur;
                u[std::size_t(n + k)] = next;
            }
        }
    };
}

AssimilationResult run_assimilation(const Trajectory& truth, const cn::CNParams& model,
                                    const AssimilationOptions& opt) {
    if (truth.n_floes() != model.system.n_floes || truth.dt != model.dt)
        throw Misaligned("run_assimilation: truth and model disagree on geometry or dt");
    return run_assimilation_core(truth, make_cn_forecast(model, opt.exec), opt);
}

}  // namespace icefloe::da
