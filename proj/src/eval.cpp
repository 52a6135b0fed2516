#include "pgmrf/eval.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pgmrf/errors.hpp"
#include "pgmrf/rng.hpp"

namespace pgmrf {

namespace {

void check_frame(const IntensityStack& truth, const IntensityStack& estimate, std::size_t t) {
  require_same_shape(truth.geometry(), estimate.geometry(), "nmse");
  if (t >= truth.frames()) throw std::out_of_range("frame index out of range");
}

double frame_energy(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  if (!(e > 0.0)) throw ValidationError("nmse: reference frame is identically zero");
  return e;
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

double nmse(const IntensityStack& truth, const IntensityStack& estimate, std::size_t t) {
  check_frame(truth, estimate, t);
  const auto x = truth.frame(t);
  const auto xh = estimate.frame(t);
  double num = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) num += (x[k] - xh[k]) * (x[k] - xh[k]);
  return num / frame_energy(x);
}

double nmse(const IntensityStack& truth, const IntensityStack& estimate, std::size_t t,
            const Mask& exclude) {
  check_frame(truth, estimate, t);
  require_same_shape(truth.geometry(), exclude.geometry(), "nmse mask");
  const std::size_t base = t * truth.geometry().pixels_per_frame();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < truth.geometry().pixels_per_frame(); ++k) {
    if (!exclude.valid(base + k)) continue;
    const double x = truth.data()[base + k];
    const double d = x - estimate.data()[base + k];
    num += d * d;
    den += x * x;
  }
  if (!(den > 0.0)) throw ValidationError("nmse: reference frame is identically zero");
  return num / den;
}

double nse_std(const IntensityStack& truth, const IntensityStack& estimate, std::size_t t) {
  check_frame(truth, estimate, t);
  const auto x = truth.frame(t);
  const auto xh = estimate.frame(t);
  const double n = static_cast<double>(x.size());
  const double norm = frame_energy(x) / n;
  double mean = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) mean += (x[k] - xh[k]) * (x[k] - xh[k]) / norm;
  mean /= n;
  double var = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double e = (x[k] - xh[k]) * (x[k] - xh[k]) / norm - mean;
    var += e * e;
  }
  return std::sqrt(var / n);
}

std::vector<FrameMetrics> frame_metrics(const IntensityStack& truth,
                                        const IntensityStack& estimate) {
  require_same_shape(truth.geometry(), estimate.geometry(), "frame_metrics");
  std::vector<FrameMetrics> rows;
  for (std::size_t t = 0; t < truth.frames(); ++t) {
    rows.push_back({t, nmse(truth, estimate, t), nse_std(truth, estimate, t), std::nan("")});
  }
  return rows;
}

std::vector<FrameMetrics> frame_metrics(const IntensityStack& truth, const IntensityStack& estimate,
                                        const CountStack& observations) {
  require_same_shape(truth.geometry(), observations.geometry(), "frame_metrics observations");
  auto rows = frame_metrics(truth, estimate);
  for (auto& r : rows) {
    double sum = 0.0;
    for (std::uint32_t v : observations.frame(r.frame)) sum += v;
    r.detection_rate = sum / static_cast<double>(truth.geometry().pixels_per_frame());
  }
  return rows;
}

std::vector<DetectionRow> detection_table(const IntensityStack& x, const EfficiencyMap& eta,
                                          std::size_t n_reps, std::uint64_t seed,
                                          std::span<const double> targets) {
  if (n_reps == 0) throw std::invalid_argument("detection_table: n_reps must be positive");
  const Geometry& g = x.geometry();
  ObservationModel poisson{ModelKind::Poisson, eta, Mask(g)};
  ObservationModel bernoulli{ModelKind::Bernoulli, eta, Mask(g)};
  std::vector<DetectionRow> rows;
  for (std::size_t ti = 0; ti < targets.size(); ++ti) {
    const IntensityStack scaled = scale_to_target(x, targets[ti]);
    DetectionRow row;
    row.target_mean = targets[ti];
    for (std::size_t r = 0; r < n_reps; ++r) {
      const std::uint64_t s = splitmix64(seed ^ splitmix64(ti * 1000003ull + r));
      double sp = 0.0;
      double sb = 0.0;
      const CountStack yp = simulate(poisson, scaled, s);
      const CountStack yb = simulate(bernoulli, scaled, splitmix64(s));
      for (std::uint32_t v : yp.data()) sp += v;
      for (std::uint32_t v : yb.data()) sb += v;
      row.poisson_mean += sp / static_cast<double>(g.size());
      row.bernoulli_mean += sb / static_cast<double>(g.size());
    }
    row.poisson_mean /= static_cast<double>(n_reps);
    row.bernoulli_mean /= static_cast<double>(n_reps);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const GridIndex idx = g.index(k);
      row.bernoulli_expected += detection_probability(eta(idx.row, idx.col), scaled.data()[k]);
    }
    row.bernoulli_expected /= static_cast<double>(g.size());
    rows.push_back(row);
  }
  return rows;
}

IntegrationResult integrate_and_threshold(const CountStack& y, std::size_t group_size) {
  if (group_size < 1) throw std::invalid_argument("group size must be >= 1");
  const Geometry& g = y.geometry();
  const std::size_t groups = g.frames / group_size;
  if (groups == 0) {
    throw std::invalid_argument("group size " + std::to_string(group_size) + " exceeds the " +
                                std::to_string(g.frames) + " available frames");
  }
  IntegrationResult out{CountStack(g.with_frames(groups), 0u), g.frames - groups * group_size};
  const std::size_t per_frame = g.pixels_per_frame();
  for (std::size_t q = 0; q < groups; ++q) {
    auto dst = out.frames.frame(q);
    for (std::size_t f = q * group_size; f < (q + 1) * group_size; ++f) {
      const auto src = y.frame(f);
      for (std::size_t k = 0; k < per_frame; ++k) dst[k] = (dst[k] > 0 || src[k] > 0) ? 1u : 0u;
    }
  }
  return out;
}

std::string to_string(SceneKind kind) {
  switch (kind) {
    case SceneKind::Piecewise: return "piecewise";
    case SceneKind::Smooth: return "smooth";
    case SceneKind::Moving: return "moving";
  }
  return "piecewise";
}

SceneKind parse_scene_kind(const std::string& text) {
  if (text == "piecewise") return SceneKind::Piecewise;
  if (text == "smooth") return SceneKind::Smooth;
  if (text == "moving") return SceneKind::Moving;
  throw std::invalid_argument("unknown scene '" + text + "'");
}

namespace {

constexpr double kSmoothAmplitude = 0.25;
constexpr int kSmoothTerms = 3;
constexpr int kSmoothMaxFrequency = 2;

void fill_piecewise(IntensityStack& x, RngStream& rng) {
  const double rows = static_cast<double>(x.rows());
  const double cols = static_cast<double>(x.cols());
  const double ci = rows / 2.0 + (rng.uniform() - 0.5) * rows / 8.0;
  const double cj = cols / 2.0 + (rng.uniform() - 0.5) * cols / 8.0;
  const double width = std::max(std::min(rows, cols) / 10.0, 1.0);
  const auto shift = static_cast<std::size_t>(rng.uniform() * kPiecewiseLevels.size());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double r = std::hypot(static_cast<double>(i) + 0.5 - ci, static_cast<double>(j) + 0.5 - cj);
      const auto ring = static_cast<std::size_t>(r / width);
      x(i, j, 0) = kPiecewiseLevels[(ring + shift) % kPiecewiseLevels.size()];
    }
  }
}

void fill_smooth(IntensityStack& x, RngStream& rng) {
  struct Term {
    int fi, fj;
    double phase;
  };
  std::array<Term, kSmoothTerms> terms{};
  for (auto& t : terms) {
    do {
      t.fi = static_cast<int>(rng.uniform() * (kSmoothMaxFrequency + 1));
      t.fj = static_cast<int>(rng.uniform() * (kSmoothMaxFrequency + 1));
    } while (t.fi == 0 && t.fj == 0);
    t.phase = 2.0 * std::numbers::pi * rng.uniform();
  }
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      double v = 1.0;
      for (const auto& t : terms) {
        v += kSmoothAmplitude *
             std::cos(2.0 * std::numbers::pi *
                          (t.fi * static_cast<double>(i) / static_cast<double>(x.rows()) +
                           t.fj * static_cast<double>(j) / static_cast<double>(x.cols())) +
                      t.phase);
      }
      x(i, j, 0) = v;
    }
  }
}

void fill_blob(IntensityStack& x, RngStream& rng) {
  const double rows = static_cast<double>(x.rows());
  const double cols = static_cast<double>(x.cols());
  const double ci = rows / 2.0 + (rng.uniform() - 0.5) * rows / 4.0;
  const double cj = rng.uniform() * cols;
  const double sigma = std::max(std::min(rows, cols) / 6.0, 0.5);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double di = static_cast<double>(i) - ci;
      double dj = std::fabs(static_cast<double>(j) - cj);
      dj = std::min(dj, cols - dj);  // cyclic distance
      x(i, j, 0) = 0.3 + 1.5 * std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
    }
  }
}

}  // namespace

IntensityStack make_scene(SceneKind kind, std::size_t rows, std::size_t cols, std::size_t frames,
                          std::uint64_t seed) {
  IntensityStack x(Geometry{rows, cols, frames});
  RngStream rng(seed, 0, static_cast<std::uint64_t>(kind), StreamTag::Scene);
  switch (kind) {
    case SceneKind::Piecewise: fill_piecewise(x, rng); break;
    case SceneKind::Smooth: fill_smooth(x, rng); break;
    case SceneKind::Moving: fill_blob(x, rng); break;
  }
  for (std::size_t t = 1; t < frames; ++t) {
    const std::size_t shift = kind == SceneKind::Moving ? (t * kMovingVelocity) % cols : 0;
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        x(i, (j + shift) % cols, t) = x(i, j, 0);
      }
    }
  }
  return x;
}

double smooth_scene_gradient_bound(std::size_t rows, std::size_t cols) {
  const double n = static_cast<double>(std::min(rows, cols));
  return kSmoothTerms * kSmoothAmplitude * 2.0 * std::numbers::pi * kSmoothMaxFrequency / n;
}

}  // namespace pgmrf
