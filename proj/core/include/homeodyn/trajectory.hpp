#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace homeodyn {

/// Uniformly sampled multivariate time series.  Sample i sits at exactly
/// t0 + i*dt where dt is the *recording* step (integration step times
/// record stride).  Columns are stored per variable.
struct Trajectory {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> cols;  // cols[v][i], all same length

  std::size_t dim() const { return cols.size(); }
  std::size_t size() const { return cols.empty() ? 0 : cols[0].size(); }
  double time_at(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
  double t_final() const { return size() == 0 ? t0 : time_at(size() - 1); }
  double duration() const { return size() < 2 ? 0.0 : static_cast<double>(size() - 1) * dt; }

  /// Column index for a variable name; throws ConfigError if unknown.
  std::size_t col_index(const std::string& label) const;
  const std::vector<double>& col(const std::string& label) const { return cols[col_index(label)]; }
};

/// Contiguous sub-trajectory covering [t_start, t_stop]; preserves dt.
/// Pre: t0 <= t_start < t_stop <= t_final().
Trajectory resample_window(const Trajectory& traj, double t_start, double t_stop);

}  // namespace homeodyn
