#pragma once

#include <string>
#include <vector>

#include "icefloe/floe.hpp"

namespace icefloe::render {

struct Image {
    int width = 0, height = 0;
    std::vector<unsigned char> rgb;

    Image() = default;
    Image(int w, int h) : width(w), height(h), rgb(std::size_t(w) * h * 3, 255) {}
    void set(int x, int y, unsigned char r, unsigned char g, unsigned char b);
};

// binary PPM (P6); deterministic bytes for fixed input
std::string to_ppm(const Image& img);

struct RenderOptions {
    int width = 800;
    int height = 120;
};

// One frame: wall bars at the domain ends, each floe a filled circle of its
// radius in a stable per-floe colour, step index annotated top-left.
Image render_state(const SimState& state, const FloeSystem& system, long time_index,
                   const RenderOptions& opt = {});

// Frames for steps from..to (inclusive) at the given stride; returns the
// written paths. Throws RangeOutOfBounds for indices outside the trajectory.
std::vector<std::string> render_frames(const Trajectory& traj, long from, long to, long stride,
                                       const std::string& out_dir,
                                       const RenderOptions& opt = {});

// Bar chart of per-floe pattern correlations in the same palette.
Image render_pcc_chart(const Vec& pcc_per_floe, const RenderOptions& opt = {});

}  // namespace icefloe::render
