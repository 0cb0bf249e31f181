#include "homeodyn/noise.hpp"

#include <cmath>

namespace homeodyn {

NoiseDist parse_noise_dist(std::string_view name) {
  if (name == "normal") return NoiseDist::normal;
  if (name == "folded-normal" || name == "folded_normal") return NoiseDist::folded_normal;
  throw ConfigError("unknown noise distribution '" + std::string(name) +
                    "' (expected normal or folded-normal)");
}

std::string_view to_string(NoiseDist d) {
  return d == NoiseDist::normal ? "normal" : "folded-normal";
}

void NoiseProcess::validate() const {
  if (target.empty()) throw ConfigError("noise: target parameter not set");
  if (sigma < 0.0) throw ConfigError("noise: sigma must be non-negative");
  if (!(refresh_interval > 0.0)) throw ConfigError("noise: refresh interval must be positive");
}

namespace {
std::int64_t snapped_refresh_steps(double refresh_interval, double dt) {
  const auto k = static_cast<std::int64_t>(std::llround(refresh_interval / dt));
  if (k < 1)
    throw ConfigError("noise: refresh interval must be at least one integration step");
  return k;
}
}  // namespace

ParameterPath noise_schedule(const NoiseProcess& proc, double t_end, double dt,
                             double fallback_mean) {
  proc.validate();
  if (!(dt > 0.0) || !(t_end > 0.0)) throw ConfigError("noise_schedule: dt and t_end must be positive");
  const std::int64_t k = snapped_refresh_steps(proc.refresh_interval, dt);
  const auto n_steps = static_cast<std::int64_t>(std::floor(t_end / dt + 1e-9));

  ParameterPath path;
  path.interval = static_cast<double>(k) * dt;
  const std::int64_t n_draws = n_steps <= 0 ? 1 : (n_steps + k - 1) / k;
  path.values.reserve(static_cast<std::size_t>(n_draws));
  NoiseSampler sampler(proc, dt, fallback_mean, proc.seed);
  for (std::int64_t i = 0; i < n_draws; ++i) path.values.push_back(sampler.draw());
  return path;
}

NoiseSampler::NoiseSampler(const NoiseProcess& proc, double dt, double fallback_mean,
                           std::uint64_t seed_override)
    : rng_(seed_override),
      dist_(proc.dist),
      mean_(proc.mean.value_or(fallback_mean)),
      sigma_(proc.sigma),
      k_refresh_(snapped_refresh_steps(proc.refresh_interval, dt)) {
  if (sigma_ < 0.0) throw ConfigError("noise: sigma must be non-negative");
}

double NoiseSampler::draw() {
  return dist_ == NoiseDist::normal ? sample_normal(mean_, sigma_, rng_)
                                    : sample_folded_normal(mean_, sigma_, rng_);
}

}  // namespace homeodyn
