#include "homeodyn/trajectory.hpp"

#include <cmath>

#include "homeodyn/errors.hpp"

namespace homeodyn {

std::size_t Trajectory::col_index(const std::string& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return i;
  throw ConfigError("unknown trajectory variable '" + label + "'");
}

Trajectory resample_window(const Trajectory& traj, double t_start, double t_stop) {
  if (traj.size() < 2) throw NumericsError("resample_window: trajectory too short");
  if (!(traj.t0 <= t_start && t_start < t_stop && t_stop <= traj.t_final() + 1e-9 * traj.dt))
    throw ConfigError("resample_window: window outside trajectory span");

  // Snap to the sample grid; the 1e-9*dt slack absorbs representation error in
  // caller-computed window edges.
  const auto i0 = static_cast<std::size_t>(std::ceil((t_start - traj.t0) / traj.dt - 1e-9));
  auto i1 = static_cast<std::size_t>(std::floor((t_stop - traj.t0) / traj.dt + 1e-9));
  if (i1 >= traj.size()) i1 = traj.size() - 1;
  if (i1 <= i0) throw ConfigError("resample_window: window shorter than one step");

  Trajectory out;
  out.t0 = traj.time_at(i0);
  out.dt = traj.dt;
  out.labels = traj.labels;
  out.cols.reserve(traj.cols.size());
  for (const auto& c : traj.cols)
    out.cols.emplace_back(c.begin() + static_cast<std::ptrdiff_t>(i0),
                          c.begin() + static_cast<std::ptrdiff_t>(i1) + 1);
  return out;
}

}  // namespace homeodyn
