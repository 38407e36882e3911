#include "icefloe/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "icefloe/errors.hpp"
#include "icefloe/graph.hpp"

namespace icefloe::metrics {

double mse(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw LengthMismatch("mse: length mismatch");
    if (a.empty()) throw EmptyInput("mse: empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc / double(a.size());
}

double rmse(const Vec& a, const Vec& b) { return std::sqrt(mse(a, b)); }

double pcc(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw LengthMismatch("pcc: length mismatch");
    if (a.size() < 2) throw EmptyInput("pcc: need at least two samples");
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= double(a.size());
    mb /= double(a.size());
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    if (va <= 0.0 || vb <= 0.0)
        throw DegenerateSeries("pcc: zero-variance series has no correlation");
    return cov / (std::sqrt(va) * std::sqrt(vb));
}

namespace {
long common_horizon(const Trajectory& pred, const Trajectory& truth, long horizon) {
    if (pred.n_floes() != truth.n_floes() || pred.dt != truth.dt)
        throw Misaligned("trajectories disagree on floe count or dt");
    const long n = std::min(pred.n_states(), truth.n_states());
    if (horizon > 0 && horizon + 1 < n) return horizon + 1;
    return n;
}
}  // namespace

double simulation_rmse(const Trajectory& pred, const Trajectory& truth, long horizon) {
    const long n = common_horizon(pred, truth, horizon);
    if (n == 0) throw EmptyInput("simulation_rmse: empty trajectories");
    double acc = 0.0;
    for (long j = 0; j < n; ++j)
        acc += rmse(pred.states[std::size_t(j)].x, truth.states[std::size_t(j)].x);
    return acc / double(n);
}

Vec pcc_per_floe(const Trajectory& pred, const Trajectory& truth, long horizon) {
    const long n = common_horizon(pred, truth, horizon);
    const int floes = truth.n_floes();
    Vec out(std::size_t(floes), 0.0);
    Vec a(std::size_t(n), 0.0), b(std::size_t(n), 0.0);
    for (int i = 0; i < floes; ++i) {
        for (long j = 0; j < n; ++j) {
            a[std::size_t(j)] = pred.states[std::size_t(j)].x[std::size_t(i)];
            b[std::size_t(j)] = truth.states[std::size_t(j)].x[std::size_t(i)];
        }
        out[std::size_t(i)] = pcc(a, b);
    }
    return out;
}

SkillReport evaluate(const Trajectory& pred, const Trajectory& truth,
                     const cn::CNParams& params, kernels::Exec mode) {
    if (truth.n_floes() != params.system.n_floes || truth.dt != params.dt)
        throw Misaligned("evaluate: truth and model disagree on geometry or dt");
    SkillReport report;
    report.horizon = common_horizon(pred, truth, 0) - 1;

    // teacher-forced one-step metrics over the truth
    const graph::ChainGraph g = graph::build_chain_graph(truth.n_floes());
    const long lo = params.history_length == 2 ? 2 : 1;
    double acc_x = 0.0, acc_v = 0.0, count = 0.0;
    for (long j = lo; j < truth.n_states(); ++j) {
        auto [block, edges] = cn::marshal_features(truth, g, j, params.history_length);
        const Vec out = cn::cn_forward(block, edges, g, params, mode);
        const SimState& cur = truth.states[std::size_t(j - 1)];
        const SimState& tgt = truth.states[std::size_t(j)];
        for (int i = 0; i < truth.n_floes(); ++i) {
            const double p = out[std::size_t(i + 1)];
            double x_hat, v_hat;
            if (params.target == cn::TargetKind::Velocity) {
                v_hat = p;
                x_hat = cur.x[std::size_t(i)] + p * truth.dt;
            } else {
                x_hat = p;
                v_hat = (p - cur.x[std::size_t(i)]) / truth.dt;
            }
            acc_x += (x_hat - tgt.x[std::size_t(i)]) * (x_hat - tgt.x[std::size_t(i)]);
            acc_v += (v_hat - tgt.v[std::size_t(i)]) * (v_hat - tgt.v[std::size_t(i)]);
            count += 1.0;
        }
    }
    report.one_step_position_rmse = std::sqrt(acc_x / count);
    report.one_step_velocity_rmse = std::sqrt(acc_v / count);

    report.simulation_rmse = simulation_rmse(pred, truth);
    report.pcc_per_floe = pcc_per_floe(pred, truth);
    double acc = 0.0;
    for (double p : report.pcc_per_floe) acc += p;
    report.mean_pcc = acc / double(report.pcc_per_floe.size());
    return report;
}

double persistence_velocity_rmse(const Trajectory& truth) {
    if (truth.n_states() < 3) throw DataTooShort("persistence baseline: trajectory too short");
    double acc = 0.0, count = 0.0;
    for (long j = 2; j < truth.n_states(); ++j) {
        const SimState& prev = truth.states[std::size_t(j - 1)];
        const SimState& cur = truth.states[std::size_t(j)];
        for (int i = 0; i < truth.n_floes(); ++i) {
            const double d = prev.v[std::size_t(i)] - cur.v[std::size_t(i)];
            acc += d * d;
            count += 1.0;
        }
    }
    return std::sqrt(acc / count);
}

std::vector<HorizonPoint> horizon_sweep(const cn::CNParams& params, const Trajectory& truth,
                                        const std::vector<long>& horizons,
                                        kernels::Exec mode) {
    if (horizons.empty()) throw EmptyInput("horizon_sweep: no horizons");
    for (std::size_t i = 1; i < horizons.size(); ++i)
        if (horizons[i] <= horizons[i - 1])
            throw InvalidConfig("horizon_sweep: horizons must be increasing");
    const long max_h = horizons.back();
    if (truth.n_states() < max_h + 1)
        throw DataTooShort("horizon_sweep: truth shorter than the largest horizon");

    const Trajectory pred = cn::rollout(truth.states[0], truth.states[1], truth.system, params,
                                        max_h - 1, mode);
    std::vector<HorizonPoint> out;
    for (long h : horizons) {
        HorizonPoint p;
        p.horizon = h;
        p.simulation_rmse = simulation_rmse(pred, truth, h);
        const Vec per_floe = pcc_per_floe(pred, truth, h);
        double acc = 0.0;
        for (double v : per_floe) acc += v;
        p.pcc = acc / double(per_floe.size());
        out.push_back(p);
    }
    return out;
}

}  // namespace icefloe::metrics
