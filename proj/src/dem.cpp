#include "icefloe/dem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "icefloe/errors.hpp"

namespace icefloe {

void FloeSystem::validate() const {
    if (n_floes < 1) throw InvalidConfig("FloeSystem: n_floes must be >= 1");
    if (int(radius.size()) != n_floes || int(thickness.size()) != n_floes ||
        int(mass.size()) != n_floes)
        throw InvalidConfig("FloeSystem: per-floe arrays must have n_floes entries");
    for (int i = 0; i < n_floes; ++i) {
        if (!(radius[i] > 0.0) || !(thickness[i] > 0.0) || !(mass[i] > 0.0))
            throw InvalidConfig("FloeSystem: radius, thickness, mass must be positive");
    }
    if (!(youngs_modulus > 0.0)) throw InvalidConfig("FloeSystem: E must be positive");
    if (!(domain_left < domain_right)) throw InvalidConfig("FloeSystem: empty domain");
    double diameters = 0.0;
    for (double r : radius) diameters += 2.0 * r;
    if (!(diameters < domain_right - domain_left))
        throw InvalidConfig("FloeSystem: domain too narrow for the floes");
}

FloeSystem FloeSystem::uniform(int n, double r, double h, double e, double left, double right,
                               double density) {
    FloeSystem s;
    s.n_floes = n;
    s.radius.assign(std::size_t(std::max(n, 0)), r);
    s.thickness.assign(std::size_t(std::max(n, 0)), h);
    s.mass.assign(std::size_t(std::max(n, 0)), density * M_PI * r * r * h);
    s.youngs_modulus = e;
    s.domain_left = left;
    s.domain_right = right;
    s.validate();
    return s;
}

namespace dem {

double overlap(double x_i, double r_i, double x_j, double r_j) {
    return std::abs(x_i - x_j) - (r_i + r_j);
}

double contact_force_on_i(double x_i, double r_i, double h_i, double x_j, double r_j,
                          double h_j, double youngs_modulus) {
    const double gap = overlap(x_i, r_i, x_j, r_j);
    if (gap >= 0.0) return 0.0;
    const double harmonic_radius = 2.0 * r_i * r_j / (r_i + r_j);
    const double magnitude = harmonic_radius * std::min(h_i, h_j) * youngs_modulus * (-gap);
    return x_i < x_j ? -magnitude : magnitude;
}

double boundary_force(double x_i, double r_i, double h_i, double wall_position,
                      double youngs_modulus) {
    const double gap = std::abs(x_i - wall_position) - r_i;
    if (gap >= 0.0) return 0.0;
    const double magnitude = 2.0 * r_i * h_i * youngs_modulus * (-gap);
    return x_i < wall_position ? -magnitude : magnitude;
}

Vec net_forces(const SimState& state, const FloeSystem& system) {
    const int n = system.n_floes;
    Vec f(std::size_t(n), 0.0);
    f[0] += boundary_force(state.x[0], system.radius[0], system.thickness[0],
                           system.domain_left, system.youngs_modulus);
    f[n - 1] += boundary_force(state.x[n - 1], system.radius[n - 1], system.thickness[n - 1],
                               system.domain_right, system.youngs_modulus);
    for (int i = 0; i + 1 < n; ++i) {
        // one evaluation per pair so the reaction cancels exactly
        const double fi = contact_force_on_i(state.x[i], system.radius[i], system.thickness[i],
                                             state.x[i + 1], system.radius[i + 1],
                                             system.thickness[i + 1], system.youngs_modulus);
        f[i] += fi;
        f[i + 1] -= fi;
    }
    return f;
}

SimState step(const SimState& state, const FloeSystem& system, double dt) {
    if (!(dt > 0.0)) throw InvalidConfig("step: dt must be positive");
    const Vec f = net_forces(state, system);
    SimState next;
    next.time_index = state.time_index + 1;
    const int n = system.n_floes;
    next.x.resize(std::size_t(n));
    next.v.resize(std::size_t(n));
    for (int i = 0; i < n; ++i) {
        next.v[i] = state.v[i] + f[i] / system.mass[i] * dt;
        next.x[i] = state.x[i] + next.v[i] * dt;
    }
    for (int i = 0; i + 1 < n; ++i) {
        if (!(next.x[i] < next.x[i + 1]))
            throw OrderingViolation(next.time_index,
                                    "step: floe passed its neighbour; reduce dt");
    }
    return next;
}

SimState sample_initial_conditions(const FloeSystem& system, Rng& rng, double v_min,
                                   double v_max) {
    system.validate();
    const int n = system.n_floes;
    double diameters = 0.0;
    for (double r : system.radius) diameters += 2.0 * r;
    const double slack = (system.domain_right - system.domain_left) - diameters;
    if (!(slack > 0.0)) throw PackingFailure("sample_initial_conditions: no room to place floes");

    // Sorted uniform draws on the slack interval, then shifted by the
    // cumulative diameters: uniform over all ordered non-overlapping
    // placements, so it matches rejection sampling without its failures.
    Vec y(std::size_t(n), 0.0);
    for (int i = 0; i < n; ++i) y[i] = rng.uniform(0.0, slack);
    std::sort(y.begin(), y.end());

    SimState state;
    state.time_index = 0;
    state.x.resize(std::size_t(n));
    state.v.resize(std::size_t(n));
    double offset = system.domain_left;
    for (int i = 0; i < n; ++i) {
        state.x[i] = offset + system.radius[i] + y[i];
        offset += 2.0 * system.radius[i];
    }
    for (int i = 0; i < n; ++i) {
        const double speed = rng.uniform(v_min, v_max);
        const bool rightward = rng.uniform() < 0.5;
        state.v[i] = rightward ? speed : -speed;
    }
    return state;
}

Trajectory generate_trajectory(const SimState& init, const FloeSystem& system, long n_steps,
                               double dt) {
    Trajectory traj;
    traj.system = system;
    traj.dt = dt;
    traj.states.reserve(std::size_t(n_steps) + 1);
    traj.states.push_back(init);
    for (long s = 0; s < n_steps; ++s)
        traj.states.push_back(step(traj.states.back(), system, dt));
    return traj;
}

std::vector<Trajectory> generate_corpus(const FloeSystem& system, int n_trajectories,
                                        long n_steps, double dt, std::uint64_t base_seed,
                                        double v_min, double v_max, kernels::Exec mode) {
    std::vector<Trajectory> out;
    out.resize(std::size_t(n_trajectories));
#pragma omp parallel for schedule(dynamic) if (mode == kernels::Exec::Parallel)
    for (int t = 0; t < n_trajectories; ++t) {
        Rng rng = Rng::substream(base_seed, std::uint64_t(t));
        const SimState init = sample_initial_conditions(system, rng, v_min, v_max);
        out[std::size_t(t)] = generate_trajectory(init, system, n_steps, dt);
    }
    return out;
}

long count_collision_events(const Trajectory& traj) {
    const FloeSystem& sys = traj.system;
    const int n = sys.n_floes;
    long events = 0;
    // contact flags per pair: [wall-left, floe pairs..., wall-right]
    std::vector<bool> in_contact(std::size_t(n) + 1, false);
    for (const SimState& s : traj.states) {
        for (int p = 0; p <= n; ++p) {
            bool contact;
            if (p == 0)
                contact = std::abs(s.x[0] - sys.domain_left) - sys.radius[0] < 0.0;
            else if (p == n)
                contact = std::abs(s.x[n - 1] - sys.domain_right) - sys.radius[n - 1] < 0.0;
            else
                contact = overlap(s.x[p - 1], sys.radius[p - 1], s.x[p], sys.radius[p]) < 0.0;
            if (contact && !in_contact[std::size_t(p)]) ++events;
            in_contact[std::size_t(p)] = contact;
        }
    }
    return events;
}

long count_ordering_violations(const Trajectory& traj) {
    long bad = 0;
    for (const SimState& s : traj.states) {
        for (std::size_t i = 0; i + 1 < s.x.size(); ++i) {
            if (!(s.x[i] < s.x[i + 1])) {
                ++bad;
                break;
            }
        }
    }
    return bad;
}

bool within_domain(const Trajectory& traj, double tol) {
    for (const SimState& s : traj.states)
        for (double x : s.x)
            if (x < traj.system.domain_left - tol || x > traj.system.domain_right + tol)
                return false;
    return true;
}

}  // namespace dem
}  // namespace icefloe
