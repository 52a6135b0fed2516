#pragma once

#include <array>
#include <span>
#include <cstdint>
#include <string>
#include <vector>

#include "pgmrf/core.hpp"
#include "pgmrf/observation.hpp"

namespace pgmrf {

/// Normalized MSE of frame t:  sum (x - x_hat)^2 / sum x^2.
/// Sites where `exclude` is invalid are left out when a mask is given.
/// Throws ValidationError on shape mismatch or a zero denominator.
double nmse(const IntensityStack& truth, const IntensityStack& estimate, std::size_t t);
double nmse(const IntensityStack& truth, const IntensityStack& estimate, std::size_t t,
            const Mask& exclude);

/// Population standard deviation over pixels of
/// (x - x_hat)^2 / (sum x^2 / n_pixels).
double nse_std(const IntensityStack& truth, const IntensityStack& estimate, std::size_t t);

struct FrameMetrics {
  std::size_t frame = 0;
  double nmse = 0.0;
  double nse_std = 0.0;
  double detection_rate = 0.0;  // mean observed count; NaN without observations
};

std::vector<FrameMetrics> frame_metrics(const IntensityStack& truth, const IntensityStack& estimate);
std::vector<FrameMetrics> frame_metrics(const IntensityStack& truth, const IntensityStack& estimate,
                                        const CountStack& observations);

/// Mean intensities swept in the synthetic single-image experiments.
inline constexpr std::array<double, 6> kTargetMeanGrid{0.025, 0.05, 0.1, 0.5, 0.8, 1.0};

struct DetectionRow {
  double target_mean = 0.0;
  double poisson_mean = 0.0;    // average count, Poisson detector
  double bernoulli_mean = 0.0;  // average count, saturating detector
  double bernoulli_expected = 0.0;  // mean of 1 - exp(-eta x)
};

/// For each target mean of the grid: rescale X, simulate n_reps Poisson and
/// Bernoulli datasets (seeds derived from `seed`) and report average counts.
std::vector<DetectionRow> detection_table(const IntensityStack& x, const EfficiencyMap& eta,
                                          std::size_t n_reps, std::uint64_t seed,
                                          std::span<const double> targets = kTargetMeanGrid);

struct IntegrationResult {
  CountStack frames;
  std::size_t dropped = 0;  // trailing frames that did not fill a group
};

/// Sums non-overlapping groups of `group_size` frames and thresholds the sum at
/// one detection. Throws std::invalid_argument for group_size < 1 or a group
/// larger than the stack.
IntegrationResult integrate_and_threshold(const CountStack& y, std::size_t group_size);

enum class SceneKind { Piecewise, Smooth, Moving };

std::string to_string(SceneKind kind);
SceneKind parse_scene_kind(const std::string& text);

/// Seeded synthetic intensity fields, all strictly positive:
///   Piecewise: concentric rings drawn from kPiecewiseLevels (<= 8 values),
///   Smooth:    offset sum of three low-frequency cosines,
///   Moving:    smooth blob on a background, shifted one column per frame
///              (cyclic).
/// Piecewise and Smooth repeat the same image in every frame.
IntensityStack make_scene(SceneKind kind, std::size_t rows, std::size_t cols, std::size_t frames,
                          std::uint64_t seed);

inline constexpr std::array<double, 6> kPiecewiseLevels{0.15, 1.0, 0.45, 1.6, 0.7, 2.2};

/// Bound on |x(i+1,j) - x(i,j)| and |x(i,j+1) - x(i,j)| for Smooth scenes.
double smooth_scene_gradient_bound(std::size_t rows, std::size_t cols);

/// Column shift per frame of the Moving scene.
inline constexpr std::size_t kMovingVelocity = 1;

}  // namespace pgmrf
