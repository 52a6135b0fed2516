#include "pgmrf/observation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "pgmrf/distributions.hpp"
#include "pgmrf/errors.hpp"

namespace pgmrf {

std::string to_string(ModelKind kind) {
  return kind == ModelKind::Poisson ? "poisson" : "bernoulli";
}

ModelKind parse_model_kind(const std::string& text) {
  if (text == "poisson") return ModelKind::Poisson;
  if (text == "bernoulli") return ModelKind::Bernoulli;
  throw std::invalid_argument("unknown observation model '" + text + "'");
}

ObservationModel ObservationModel::uniform(ModelKind kind, const Geometry& g) {
  return {kind, EfficiencyMap(g.rows, g.cols, 1.0), Mask(g)};
}

double detection_probability(double eta, double x) { return -std::expm1(-eta * x); }

double loglik_pixel(ModelKind kind, std::uint32_t y, double eta, double x, bool valid) {
  if (!valid) return 0.0;
  const double rate = eta * x;
  if (kind == ModelKind::Poisson) {
    return log_mass_poisson(y, rate);
  }
  if (y > 1) {
    throw ValidationError("Bernoulli observation must be 0 or 1 (got " + std::to_string(y) + ")");
  }
  // log(1 - e^{-r}) via expm1 keeps precision for r well below 1e-8.
  return y == 0 ? -rate : std::log(-std::expm1(-rate));
}

double loglik_total(const ObservationModel& model, const CountStack& y, const IntensityStack& x) {
  require_same_shape(y.geometry(), x.geometry(), "loglik_total");
  require_same_shape(y.geometry(), model.mask.geometry(), "loglik_total mask");
  const Geometry& g = y.geometry();
  double total = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (!model.mask.valid(k)) continue;
    const GridIndex idx = g.index(k);
    total += loglik_pixel(model.kind, y.data()[k], model.eta(idx.row, idx.col), x.data()[k], true);
  }
  return total;
}

void validate_observations(ModelKind kind, const CountStack& y) {
  if (kind != ModelKind::Bernoulli) return;
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (y.data()[k] > 1) {
      throw ValidationError("bernoulli observations must be binary; first offending site " +
                            to_string(y.geometry().index(k)) + " holds " +
                            std::to_string(y.data()[k]));
    }
  }
}

CountStack simulate(const ObservationModel& model, const IntensityStack& x, std::uint64_t seed) {
  require_same_shape(x.geometry(), model.mask.geometry(), "simulate");
  const Geometry& g = x.geometry();
  CountStack y(g, 0u);
  const RngKey key{seed, 0};
  const auto n = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto site = static_cast<std::size_t>(k);
    if (!model.mask.valid(site)) continue;
    const GridIndex idx = g.index(site);
    const double rate = model.eta(idx.row, idx.col) * x.data()[site];
    RngStream rng = key.stream(site, StreamTag::Simulate);
    if (model.kind == ModelKind::Poisson) {
      y.data()[site] = sample_poisson(rate, rng);
    } else {
      y.data()[site] = rng.uniform() < detection_probability(1.0, rate) ? 1u : 0u;
    }
  }
  return y;
}

IntensityStack scale_to_target(const IntensityStack& raw, double target_mean) {
  if (!(target_mean > 0.0) || !std::isfinite(target_mean)) {
    throw std::invalid_argument("target mean must be finite and > 0");
  }
  IntensityStack out = raw;
  double sum = 0.0;
  for (double& v : out.data()) {
    if (v < 0.0 || !std::isfinite(v)) {
      throw ValidationError("intensity images must be finite and non-negative");
    }
    sum += v;
  }
  if (!(sum > 0.0)) throw ValidationError("scale_to_target: input has zero mean");
  for (double& v : out.data()) v = std::max(v, kIntensityFloor);
  const double mean = std::accumulate(out.data().begin(), out.data().end(), 0.0) /
                      static_cast<double>(out.size());
  const double factor = target_mean / mean;
  for (double& v : out.data()) v *= factor;
  return out;
}

}  // namespace pgmrf
