#pragma once

#include <cstdint>
#include <string>

#include "pgmrf/core.hpp"

namespace pgmrf {

/// Ideal photon counter (Poisson) or non photon-number-resolving detector
/// that saturates at one detection per period (Bernoulli).
enum class ModelKind { Poisson, Bernoulli };

std::string to_string(ModelKind kind);
/// Accepts "poisson" / "bernoulli"; throws std::invalid_argument otherwise.
ModelKind parse_model_kind(const std::string& text);

struct ObservationModel {
  ModelKind kind = ModelKind::Poisson;
  EfficiencyMap eta;
  Mask mask;

  /// eta = 1 everywhere and every site valid.
  static ObservationModel uniform(ModelKind kind, const Geometry& g);
};

/// Floor applied to exact zeros when rescaling intensity images.
inline constexpr double kIntensityFloor = 1e-6;

/// 1 - exp(-eta * x), evaluated through expm1.
double detection_probability(double eta, double x);

/// Log-likelihood contribution of one site. Masked sites (valid == false)
/// contribute 0 whatever y holds. Throws ValidationError for a Bernoulli y
/// outside {0, 1}.
double loglik_pixel(ModelKind kind, std::uint32_t y, double eta, double x, bool valid);

double loglik_total(const ObservationModel& model, const CountStack& y, const IntensityStack& x);

/// Throws ValidationError naming the first offending site when y is not a
/// valid observation stack for `kind` (binary for Bernoulli).
void validate_observations(ModelKind kind, const CountStack& y);

/// Independent per-site draws: Poisson(eta x) or Bernoulli(1 - exp(-eta x)).
/// Masked sites emit 0.
CountStack simulate(const ObservationModel& model, const IntensityStack& x, std::uint64_t seed);

/// Rescales so the mean over all sites equals target_mean. Exact zeros are
/// first lifted to kIntensityFloor.
IntensityStack scale_to_target(const IntensityStack& raw, double target_mean);

}  // namespace pgmrf
