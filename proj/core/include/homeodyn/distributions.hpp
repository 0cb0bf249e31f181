#pragma once

#include "homeodyn/errors.hpp"
#include "homeodyn/rng.hpp"

namespace homeodyn {

/// Standard normal CDF and survival function, accurate to ~1e-15 via erfc.
double normal_cdf(double x);
double normal_survival(double x);

/// Draw from N(mean, sigma^2); sigma = 0 degenerates to the constant mean.
double sample_normal(double mean, double sigma, Rng& rng);

/// Draw |X| with X ~ N(mean, sigma^2).
double sample_folded_normal(double mean, double sigma, Rng& rng);

struct FoldedNormalMoments {
  double mean = 0.0;
  double sigma = 0.0;
};

/// Exact mean and standard deviation of |X|, X ~ N(mean, sigma^2):
///   E|X|   = sqrt(2/pi) sigma exp(-m^2 / 2 sigma^2) + m erf(m / (sigma sqrt(2)))
///   Var|X| = m^2 + sigma^2 - E|X|^2
/// The erf term is m Pr(X > 0) - m Pr(X < 0) written compactly; for m = 0 this
/// reduces to the half-normal mean sqrt(2/pi) sigma.
FoldedNormalMoments folded_normal_moments(double mean, double sigma);

/// CDF of the folded normal, P(|X| <= x); 0 for x < 0.
double folded_normal_cdf(double x, double mean, double sigma);

}  // namespace homeodyn
