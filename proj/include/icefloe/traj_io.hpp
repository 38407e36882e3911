#pragma once

#include <string>

#include "icefloe/floe.hpp"

namespace icefloe::io {

// Writes the whole content to a temporary file next to `path` and renames
// it into place, so an interrupted run never leaves a truncated artifact.
void atomic_write_text(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

// Trajectory file layout (plain text, comma separated):
//   # n_floes=<N> dt=<dt> domain=<L>,<R> radii=<r0,..> thickness=<h0,..>
//   # config=<json>                (optional provenance comment lines)
//   t,x_0,..,x_{N-1},v_0,..,v_{N-1}
//   <one row per step>
// Values are printed with 17 significant digits so a read-back is exact.
std::string format_trajectory(const Trajectory& traj, const std::string& config_comment = "");
void write_trajectory(const std::string& path, const Trajectory& traj,
                      const std::string& config_comment = "");

// Young's modulus and mass are not part of the file contract; the returned
// system carries the defaults (E = 2e7, density 1).
Trajectory read_trajectory(const std::string& path);

}  // namespace icefloe::io
