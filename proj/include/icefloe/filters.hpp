#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "icefloe/cn.hpp"
#include "icefloe/floe.hpp"
#include "icefloe/linalg.hpp"
#include "icefloe/rng.hpp"

namespace icefloe::da {

// Ensemble members hold the two consecutive position vectors the surrogate
// needs: [x_{t-1} | x_t], dimension 2 * n_floes.
struct Ensemble {
    int n_floes = 0;
    std::vector<Vec> members;

    int size() const { return int(members.size()); }
    int dim() const { return 2 * n_floes; }
};

// Linear partial observation: the current positions of a floe subset, with
// uncorrelated noise of variance sigma_obs^2, available every `interval`
// steps.
struct ObservationModel {
    std::vector<int> observed_floes;
    double sigma_obs = 1.0;
    long interval = 100;

    static std::vector<int> even_floes(int n_floes);
    // selection matrix over the member layout, one unit row per observed floe
    Mat selection(int n_floes) const;
};

struct NoiseModel {
    double sigma_model = 1.0;
};

enum class FilterKind { EnKF, Etkf };
std::string to_string(FilterKind k);
FilterKind filter_from_string(const std::string& s);

// Advances every member one step in place: [x_{t-1}|x_t] -> [x_t|x_{t+1}].
using ForecastFn = std::function<void(std::vector<Vec>&)>;

// Process noise: one draw per floe, added to both history copies of that
// floe so the implied finite-difference velocity is preserved (an
// independent draw per copy would inject velocity noise of order
// sigma/dt). Draws come from the per-member streams; null means zero noise.
void apply_process_noise(Ensemble& ens, double sigma_model, std::vector<Rng>* member_rngs);

// g then process noise; throws NonFiniteMember if a member leaves the
// representable range.
void forecast_step(Ensemble& ens, const ForecastFn& advance, const NoiseModel& noise,
                   std::vector<Rng>* member_rngs, long step_index = -1);

// -- analysis updates, member-layout agnostic ---------------------------

// Stochastic EnKF update with perturbed observations. Null member_rngs
// zeroes the observation perturbations (exact hand algebra). Throws
// SingularInnovationCovariance when the innovation covariance cannot be
// factored even with jitter.
void enkf_update(std::vector<Vec>& members, const Vec& y, const Mat& h, double sigma_obs,
                 std::vector<Rng>* member_rngs);

struct EtkfTransform {
    Mat j;      // (I-1)/(1+r) * I + V^T R^-1 V
    Mat j_inv;
    Mat t;      // sqrt(I-1) * X * diag(lambda^-1/2) * X^T
};

// Symmetric eigendecomposition of the transform core; throws
// DecompositionFailure when J is not positive definite within tolerance.
EtkfTransform etkf_transform(const Mat& v, double sigma_obs, double inflation);

// Deterministic square-root update: mean moved by the gain, anomalies
// multiplied by the transform.
void etkf_update(std::vector<Vec>& members, const Vec& y, const Mat& h, double sigma_obs,
                 double inflation);

// -- spec-shaped analysis (process-noise perturbation then update) -------
void enkf_analysis(Ensemble& ens, const Vec& y, const Mat& h, double sigma_obs,
                   double sigma_model, std::vector<Rng>* member_rngs);
void etkf_analysis(Ensemble& ens, const Vec& y, const Mat& h, double sigma_obs,
                   double sigma_model, double inflation, std::vector<Rng>* member_rngs);

struct StepDiagnostic {
    long step = 0;
    double rmse = 0.0;    // ensemble-mean current positions vs truth
    double spread = 0.0;  // mean std of current positions across members
    bool analysis = false;
};

struct AssimilationOptions {
    FilterKind filter = FilterKind::EnKF;
    int ensemble_size = 100;
    double sigma_model = 1.0;
    double sigma_obs = 1.0;
    long interval = 100;
    double inflation = 1.0;           // ETKF spread factor (r in the transform)
    std::vector<int> observed_floes;  // empty = even-indexed half
    std::uint64_t seed = 1;
    long n_steps = 0;  // 0 = full truth horizon
    kernels::Exec exec = kernels::Exec::Parallel;
};

struct AssimilationResult {
    Trajectory mean_trajectory;
    std::vector<StepDiagnostic> diagnostics;
    double time_mean_rmse = 0.0;
    long n_analyses = 0;
};

// Members start from the first two truth states plus process-noise spread.
// Every step advances the members with the prediction model; observation
// steps synthesize y = H * truth + noise, perturb the members with the
// process noise, and run the chosen analysis.
AssimilationResult run_assimilation_core(const Trajectory& truth, const ForecastFn& advance,
                                         const AssimilationOptions& opt);

// The learned surrogate as the forecast model.
ForecastFn make_cn_forecast(const cn::CNParams& params, kernels::Exec mode);

AssimilationResult run_assimilation(const Trajectory& truth, const cn::CNParams& model,
                                    const AssimilationOptions& opt);

}  // namespace icefloe::da
