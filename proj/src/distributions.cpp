#include "pgmrf/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "pgmrf/errors.hpp"

namespace pgmrf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinMass = 1e-300;
constexpr int kMaxRejections = 1000;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be finite and > 0 (got " +
                                std::to_string(v) + ")");
  }
}

void require_valid(const TruncatedGammaParams& p) {
  require_positive(p.shape, "gamma shape");
  require_positive(p.scale, "gamma scale");
  require_valid(p.support);
}

// Marsaglia & Tsang (2000), shape >= 1, unit scale.
double gamma_unit_ge1(double shape, RngStream& rng) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

// Probability of (lo, hi] in units of the scale. Uses the upper tail Q when
// lo sits to the right of the mode region so that small far-tail masses keep
// their relative precision.
struct IntervalMass {
  bool upper;     // true: computed from Q, false: from P
  double at_lo;   // P(lo) or Q(lo)
  double at_hi;   // P(hi) or Q(hi)
  double mass;
};

IntervalMass interval_mass(const TruncatedGammaParams& p) {
  namespace bm = boost::math;
  const double a = p.shape;
  const double zlo = std::max(p.support.lo, 0.0) / p.scale;
  const double zhi = p.support.hi / p.scale;
  IntervalMass m{};
  m.upper = zlo > a;
  if (m.upper) {
    m.at_lo = bm::gamma_q(a, zlo);
    m.at_hi = std::isinf(zhi) ? 0.0 : bm::gamma_q(a, zhi);
    m.mass = m.at_lo - m.at_hi;
  } else {
    m.at_lo = zlo == 0.0 ? 0.0 : bm::gamma_p(a, zlo);
    m.at_hi = std::isinf(zhi) ? 1.0 : bm::gamma_p(a, zhi);
    m.mass = m.at_hi - m.at_lo;
  }
  return m;
}

double inverse_cdf_draw(const TruncatedGammaParams& p, const IntervalMass& m, RngStream& rng) {
  namespace bm = boost::math;
  const double u = rng.uniform();
  double z;
  if (m.upper) {
    const double q = m.at_lo - u * m.mass;
    z = bm::gamma_q_inv(p.shape, q);
  } else {
    const double q = m.at_lo + u * m.mass;
    z = bm::gamma_p_inv(p.shape, q);
  }
  // Guard rounding at the interval ends.
  const double x = z * p.scale;
  const double lo_next = std::nextafter(p.support.lo, kInf);
  return std::clamp(x, lo_next, p.support.hi);
}

}  // namespace

void require_valid(const Support& s) {
  if (!(s.lo >= 0.0) || !(s.hi > s.lo) || std::isnan(s.hi)) {
    throw std::invalid_argument("support must satisfy 0 <= lo < hi");
  }
}

double sample_gamma(double shape, double scale, RngStream& rng) {
  require_positive(shape, "gamma shape");
  require_positive(scale, "gamma scale");
  if (shape >= 1.0) return scale * gamma_unit_ge1(shape, rng);
  // Gamma(a) = Gamma(a + 1) * U^(1/a); done in logs to survive tiny shapes.
  const double g = gamma_unit_ge1(shape + 1.0, rng);
  const double log_u = std::log(rng.uniform());
  const double x = g * std::exp(log_u / shape);
  return scale * std::max(x, std::numeric_limits<double>::min());
}

double sample_truncated_gamma(const TruncatedGammaParams& p, RngStream& rng) {
  require_valid(p);
  if (p.support.unbounded()) return sample_gamma(p.shape, p.scale, rng);
  const IntervalMass m = interval_mass(p);
  if (!(m.mass >= kMinMass)) {
    throw NumericalError("truncated gamma: support (" + std::to_string(p.support.lo) + ", " +
                         std::to_string(p.support.hi) + "] has negligible mass for shape " +
                         std::to_string(p.shape) + ", scale " + std::to_string(p.scale));
  }
  if (m.mass >= kRejectionMassThreshold) {
    for (int n = 0; n < kMaxRejections; ++n) {
      const double x = sample_gamma(p.shape, p.scale, rng);
      if (p.support.contains(x)) return x;
    }
  }
  return inverse_cdf_draw(p, m, rng);
}

double sample_inverse_gamma(double shape, double scale_param, RngStream& rng) {
  require_positive(shape, "inverse-gamma shape");
  require_positive(scale_param, "inverse-gamma scale");
  return 1.0 / sample_gamma(shape, 1.0 / scale_param, rng);
}

std::uint32_t sample_poisson(double mean, RngStream& rng) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("Poisson mean must be finite and >= 0");
  }
  if (mean == 0.0) return 0;
  if (mean < 10.0) {
    double p = std::exp(-mean);
    double cdf = p;
    const double u = rng.uniform();
    std::uint32_t k = 0;
    while (u > cdf && k < 1000) {
      ++k;
      p *= mean / k;
      cdf += p;
    }
    return k;
  }
  // Hormann (1993), "The transformed rejection method for generating Poisson
  // random variables", algorithm PTRS.
  const double smu = std::sqrt(mean);
  const double b = 0.931 + 2.53 * smu;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint32_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * log_mean - std::lgamma(k + 1.0)) {
      return static_cast<std::uint32_t>(k);
    }
  }
}

bool sample_bernoulli(double p, RngStream& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("Bernoulli p must lie in [0, 1]");
  return rng.uniform() < p;
}

double truncated_gamma_mass(const TruncatedGammaParams& p) {
  require_valid(p);
  return interval_mass(p).mass;
}

double truncated_gamma_cdf(double x, const TruncatedGammaParams& p) {
  require_valid(p);
  if (x <= p.support.lo) return 0.0;
  if (x >= p.support.hi) return 1.0;
  TruncatedGammaParams partial = p;
  partial.support.hi = x;
  return interval_mass(partial).mass / interval_mass(p).mass;
}

double log_density_gamma(double x, double shape, double scale) {
  require_positive(shape, "gamma shape");
  require_positive(scale, "gamma scale");
  if (!(x > 0.0)) return -kInf;
  return (shape - 1.0) * std::log(x) - x / scale - std::lgamma(shape) - shape * std::log(scale);
}

double log_density_truncated_gamma(double x, const TruncatedGammaParams& p) {
  require_valid(p);
  if (!p.support.contains(x)) return -kInf;
  const double base = log_density_gamma(x, p.shape, p.scale);
  return p.support.unbounded() ? base : base - std::log(interval_mass(p).mass);
}

double log_density_inverse_gamma(double u, double shape, double scale_param) {
  require_positive(shape, "inverse-gamma shape");
  require_positive(scale_param, "inverse-gamma scale");
  if (!(u > 0.0)) return -kInf;
  return shape * std::log(scale_param) - std::lgamma(shape) - (shape + 1.0) * std::log(u) -
         scale_param / u;
}

double log_mass_poisson(std::uint32_t k, double mean) {
  if (!(mean >= 0.0)) throw std::invalid_argument("Poisson mean must be >= 0");
  if (mean == 0.0) return k == 0 ? 0.0 : -kInf;
  return k * std::log(mean) - mean - std::lgamma(k + 1.0);
}

double log_mass_bernoulli(std::uint32_t y, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("Bernoulli p must lie in [0, 1]");
  if (y > 1) return -kInf;
  return y == 1 ? std::log(p) : std::log1p(-p);
}

}  // namespace pgmrf
