#pragma once

#include <vector>

#include "icefloe/linalg.hpp"

namespace icefloe {

// Static description of the floe chain: disk floes between two stationary
// walls. Everything is unitless.
struct FloeSystem {
    int n_floes = 0;
    Vec radius;
    Vec thickness;
    Vec mass;
    double youngs_modulus = 2e7;
    double domain_left = 0.0;
    double domain_right = 100.0;

    // Throws InvalidConfig when an invariant is broken: positive geometry,
    // domain_left < domain_right, and enough room to place all floes
    // without initial overlap.
    void validate() const;

    // n identical floes; mass = density * pi * r^2 * h per disk.
    static FloeSystem uniform(int n, double radius, double thickness, double youngs_modulus,
                              double domain_left, double domain_right, double density = 1.0);
};

struct SimState {
    long time_index = 0;
    Vec x;
    Vec v;
};

struct Trajectory {
    FloeSystem system;
    double dt = 1e-4;
    std::vector<SimState> states;

    int n_floes() const { return system.n_floes; }
    long n_states() const { return long(states.size()); }
};

}  // namespace icefloe
