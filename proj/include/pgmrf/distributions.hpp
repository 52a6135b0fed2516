#pragma once

#include <cstdint>
#include <limits>

#include "pgmrf/rng.hpp"

namespace pgmrf {

/// Half-open interval (lo, hi] that intensity draws are restricted to.
/// The default is the whole positive half-line.
struct Support {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return x > lo && x <= hi; }
  bool unbounded() const { return lo <= 0.0 && hi == std::numeric_limits<double>::infinity(); }

  friend bool operator==(const Support&, const Support&) = default;
};

/// Throws std::invalid_argument unless 0 <= lo < hi.
void require_valid(const Support& s);

/// Gamma(shape, scale) restricted to `support`. Shape-scale convention:
/// the untruncated mean is shape * scale.
struct TruncatedGammaParams {
  double shape = 1.0;
  double scale = 1.0;
  Support support{};
};

// -- Samplers ----------------------------------------------------------------
// All parameter violations throw std::invalid_argument.

/// Marsaglia-Tsang squeeze for shape >= 1, boosted by U^(1/shape) below 1.
double sample_gamma(double shape, double scale, RngStream& rng);

/// Exact draw from the truncated gamma. When the untruncated mass inside the
/// support is at least kRejectionMassThreshold it rejects from the untruncated
/// gamma; otherwise it inverts the regularized incomplete gamma function.
/// Throws NumericalError when the mass is below 1e-300.
double sample_truncated_gamma(const TruncatedGammaParams& p, RngStream& rng);

inline constexpr double kRejectionMassThreshold = 0.1;

/// Inverse gamma with density proportional to u^(-shape-1) exp(-scale_param/u),
/// drawn as 1 / Gamma(shape, 1/scale_param).
double sample_inverse_gamma(double shape, double scale_param, RngStream& rng);

/// Inversion below mean 10, Hormann's PTRS transformed rejection above.
std::uint32_t sample_poisson(double mean, RngStream& rng);

bool sample_bernoulli(double p, RngStream& rng);

// -- Probability of the support ------------------------------------------------

/// Untruncated gamma probability of the support interval.
double truncated_gamma_mass(const TruncatedGammaParams& p);

/// CDF of the truncated gamma at x.
double truncated_gamma_cdf(double x, const TruncatedGammaParams& p);

// -- Log densities -------------------------------------------------------------
// Natural log; -inf outside the support.

double log_density_gamma(double x, double shape, double scale);
double log_density_truncated_gamma(double x, const TruncatedGammaParams& p);
double log_density_inverse_gamma(double u, double shape, double scale_param);
double log_mass_poisson(std::uint32_t k, double mean);
double log_mass_bernoulli(std::uint32_t y, double p);

}  // namespace pgmrf
