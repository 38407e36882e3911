#pragma once

#include <vector>

#include "icefloe/cn.hpp"
#include "icefloe/floe.hpp"

namespace icefloe::metrics {

double mse(const Vec& a, const Vec& b);
double rmse(const Vec& a, const Vec& b);

// Pearson pattern correlation; throws DegenerateSeries when either input
// has zero variance.
double pcc(const Vec& a, const Vec& b);

struct SkillReport {
    double one_step_position_rmse = 0.0;
    double one_step_velocity_rmse = 0.0;
    double simulation_rmse = 0.0;  // time-averaged positional RMSE of the rollout
    Vec pcc_per_floe;
    double mean_pcc = 0.0;
    long horizon = 0;
};

// Time-averaged per-step positional RMSE between two aligned trajectories.
double simulation_rmse(const Trajectory& pred, const Trajectory& truth, long horizon = 0);

// Per-floe PCC of the position time series, then the average.
Vec pcc_per_floe(const Trajectory& pred, const Trajectory& truth, long horizon = 0);

// One-step metrics are computed teacher-forced on the truth; rollout
// metrics compare the free-run prediction against the truth.
SkillReport evaluate(const Trajectory& pred, const Trajectory& truth,
                     const cn::CNParams& params,
                     kernels::Exec mode = kernels::Exec::Parallel);

// One-step velocity RMSE of the copy-last-velocity baseline on a truth
// trajectory.
double persistence_velocity_rmse(const Trajectory& truth);

struct HorizonPoint {
    long horizon = 0;
    double pcc = 0.0;
    double simulation_rmse = 0.0;
};

// Rolls the model out to the largest horizon once and scores each prefix.
std::vector<HorizonPoint> horizon_sweep(const cn::CNParams& params, const Trajectory& truth,
                                        const std::vector<long>& horizons,
                                        kernels::Exec mode = kernels::Exec::Parallel);

}  // namespace icefloe::metrics
