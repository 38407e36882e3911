#pragma once

#include <cstdint>

#include "icefloe/floe.hpp"
#include "icefloe/kernels.hpp"
#include "icefloe/rng.hpp"

namespace icefloe::dem {

// Transient overlap allowed by the penalty contact model before a state is
// considered out of the domain; half a unit radius.
inline constexpr double kBoundaryTol = 0.5;

// Signed surface gap between two disks; negative iff they overlap.
double overlap(double x_i, double r_i, double x_j, double r_j);

// Hookean contact-normal force acting on floe i from floe j. Zero without
// overlap; otherwise harmonic-mean radius times the thinner thickness times
// the modulus times the overlap depth, directed away from floe j.
double contact_force_on_i(double x_i, double r_i, double h_i, double x_j, double r_j,
                          double h_j, double youngs_modulus);

// Wall contact, the infinite-radius limit of the pair force: effective
// coefficient 2 * r_i * h_i * E, pushing the floe back into the domain.
double boundary_force(double x_i, double r_i, double h_i, double wall_position,
                      double youngs_modulus);

// Per-floe sum of the chain contact forces (left/right neighbour or wall).
Vec net_forces(const SimState& state, const FloeSystem& system);

// One semi-implicit Euler step: velocity from the previous force, then
// position from the new velocity. Throws OrderingViolation when the updated
// positions are no longer strictly increasing (dt too large for the
// stiffness).
SimState step(const SimState& state, const FloeSystem& system, double dt);

// Uniformly random non-overlapping sorted placement plus speeds drawn from
// [v_min, v_max] with random sign. Throws PackingFailure when the domain
// cannot hold the floes.
SimState sample_initial_conditions(const FloeSystem& system, Rng& rng, double v_min = 150.0,
                                   double v_max = 200.0);

Trajectory generate_trajectory(const SimState& init, const FloeSystem& system, long n_steps,
                               double dt);

// Independent trajectories from substreams of base_seed; members of the
// batch may be generated in parallel.
std::vector<Trajectory> generate_corpus(const FloeSystem& system, int n_trajectories,
                                        long n_steps, double dt, std::uint64_t base_seed,
                                        double v_min = 150.0, double v_max = 200.0,
                                        kernels::Exec mode = kernels::Exec::Parallel);

// Number of contact onsets (floe-floe or floe-wall) over a trajectory.
long count_collision_events(const Trajectory& traj);

// Steps whose state breaks x[i] < x[i+1]; 0 for every DEM trajectory, may
// be positive for learned rollouts.
long count_ordering_violations(const Trajectory& traj);

// True when every position lies inside [domain_left - tol, domain_right + tol].
bool within_domain(const Trajectory& traj, double tol = kBoundaryTol);

}  // namespace icefloe::dem
