#include "homeodyn/distributions.hpp"

#include <cmath>

namespace homeodyn {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kSqrt2OverPi = 0.79788456080286535588;  // sqrt(2/pi)

void check_sigma(double sigma) {
  if (sigma < 0.0) throw ConfigError("sigma must be non-negative");
  if (!std::isfinite(sigma)) throw ConfigError("sigma must be finite");
}
}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_survival(double x) { return 0.5 * std::erfc(x / kSqrt2); }

double sample_normal(double mean, double sigma, Rng& rng) {
  check_sigma(sigma);
  return mean + sigma * rng.next_normal();
}

double sample_folded_normal(double mean, double sigma, Rng& rng) {
  return std::abs(sample_normal(mean, sigma, rng));
}

FoldedNormalMoments folded_normal_moments(double mean, double sigma) {
  check_sigma(sigma);
  FoldedNormalMoments out;
  if (sigma == 0.0) {
    out.mean = std::abs(mean);
    out.sigma = 0.0;
    return out;
  }
  const double z = mean / sigma;
  out.mean = kSqrt2OverPi * sigma * std::exp(-0.5 * z * z) + mean * std::erf(z / kSqrt2);
  const double var = mean * mean + sigma * sigma - out.mean * out.mean;
  out.sigma = var > 0.0 ? std::sqrt(var) : 0.0;
  return out;
}

double folded_normal_cdf(double x, double mean, double sigma) {
  check_sigma(sigma);
  if (x < 0.0) return 0.0;
  if (sigma == 0.0) return x >= std::abs(mean) ? 1.0 : 0.0;
  // P(-x <= X <= x) = Phi((x-m)/s) + Phi((x+m)/s) - 1
  return normal_cdf((x - mean) / sigma) + normal_cdf((x + mean) / sigma) - 1.0;
}

}  // namespace homeodyn
