#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "homeodyn/distributions.hpp"
#include "homeodyn/errors.hpp"
#include "homeodyn/rng.hpp"

namespace homeodyn {

enum class NoiseDist { normal, folded_normal };

NoiseDist parse_noise_dist(std::string_view name);
std::string_view to_string(NoiseDist d);

/// Piecewise-constant stochastic replacement of one named model parameter.
/// The parameter is redrawn every refresh_interval time units (snapped to the
/// integration step grid) and held constant in between.  When mean is absent
/// the parameter's deterministic value at run start is used as the mean, which
/// is what parameter sweeps over the noisy parameter want.
struct NoiseProcess {
  std::string target;
  NoiseDist dist = NoiseDist::normal;
  std::optional<double> mean;
  double sigma = 0.0;
  double refresh_interval = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// The realized piecewise-constant path: values[k] applies on
/// [k*interval, (k+1)*interval).  interval is the refresh snapped to the step
/// grid; draws are in stream order.
struct ParameterPath {
  double interval = 0.0;
  std::vector<double> values;
};

ParameterPath noise_schedule(const NoiseProcess& proc, double t_end, double dt,
                             double fallback_mean);

/// Stateful per-run sampler used inside the integration loop.  Holds its own
/// stream so that concurrent sweep points stay independent.
class NoiseSampler {
 public:
  NoiseSampler(const NoiseProcess& proc, double dt, double fallback_mean,
               std::uint64_t seed_override);

  /// One refresh every k_refresh steps, starting at global step 0.
  bool refresh_due(std::int64_t global_step) const {
    return global_step % k_refresh_ == 0;
  }
  double draw();
  std::int64_t k_refresh() const { return k_refresh_; }

 private:
  Rng rng_;
  NoiseDist dist_;
  double mean_;
  double sigma_;
  std::int64_t k_refresh_;
};

}  // namespace homeodyn
