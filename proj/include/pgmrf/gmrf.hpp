#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pgmrf/core.hpp"
#include "pgmrf/distributions.hpp"
#include "pgmrf/observation.hpp"
#include "pgmrf/rng.hpp"

namespace pgmrf {

/// Projection box for the regularization hyperparameters.
inline constexpr double kHyperMin = 1e-3;
inline constexpr double kHyperMax = 1e3;

/// Hidden gamma-MRF state: intensities X, spatial auxiliaries U (one per
/// pixel per frame, cyclic wrap) and, for the spatio-temporal prior, temporal
/// auxiliaries W with frames + 1 frames.
///
/// Under TimeBoundary::Cyclic, W frame T is the same variable as W frame 0
/// and is kept as a copy of it.
struct GmrfState {
  IntensityStack x;
  IntensityStack u;
  std::optional<IntensityStack> w;
  std::vector<double> alpha;  // spatial regularization, one entry per frame
  double beta = 1.0;          // temporal regularization (3D only)
  double gamma_boundary = 1.0;
  Support support{};
  TimeBoundary time_boundary = TimeBoundary::Fixed;

  const Geometry& geometry() const { return x.geometry(); }
  bool temporal() const { return w.has_value(); }
  double alpha_at(std::size_t t) const { return alpha[t]; }
};

/// Throws std::invalid_argument when fields are inconsistent (shapes, alpha
/// length, non-positive hyperparameters).
void validate_state(const GmrfState& s);

/// Arithmetic mean of the four X neighbours of U site `u_site`.
double u_tilde(const IntensityStack& x, const GridIndex& u_site);

/// Mean of x at frames t-1 and t for W site (i,j,t), t in [0, T]. Ghost frames
/// take `gamma` (Fixed) or wrap around (Cyclic).
double w_tilde(const IntensityStack& x, double gamma, TimeBoundary boundary,
               const GridIndex& w_site);

/// Harmonic mean of the four U neighbours of X site `x_site`.
double x_bar(const IntensityStack& u, const GridIndex& x_site);

/// Harmonic mean of the two W neighbours of X site `x_site`.
double w_harmonic(const IntensityStack& w, const GridIndex& x_site);

/// Scale of the spatio-temporal prior conditional of x:
///   1 / (alpha / x_bar + beta / w_harmonic).
/// Each U edge contributes rate alpha/4 and each W edge beta/2, which is the
/// form that agrees with the inverse-gamma conditionals of U and W. As
/// beta -> 0 it tends to x_bar / alpha, the spatial-only scale.
double x_tilde(const IntensityStack& u, const IntensityStack& w, double alpha, double beta,
               const GridIndex& x_site);

/// Fresh U field: u ~ InvGamma(alpha_t, alpha_t * u_tilde), all sites
/// independent given X.
IntensityStack sample_u(const GmrfState& s, RngKey key, int threads = 1);

/// Fresh W field: w ~ InvGamma(beta, beta * w_tilde). Throws std::logic_error
/// when the state has no temporal layer.
IntensityStack sample_w(const GmrfState& s, RngKey key, int threads = 1);

/// Prior conditional of x at `idx` given U (and W):
///   spatial:          Gamma_X(alpha, x_bar / alpha)
///   spatio-temporal:  Gamma_X(alpha + beta, x_tilde)
TruncatedGammaParams prior_conditional_x(const GmrfState& s, const GridIndex& idx);

/// Unnormalized log joint prior density of (X, U[, W]) at fixed
/// hyperparameters (the partition function is not included).
double log_prior_unnormalized(const GmrfState& s);

/// Per-frame score of log alpha and the score of log beta, summed over all
/// sites, built from the conditional densities of X, U and W.
struct HyperScores {
  std::vector<double> log_alpha;  // one entry per frame
  double log_beta = 0.0;
};
HyperScores hyperparameter_scores(const GmrfState& s, int threads = 1);

struct PriorSettings {
  bool temporal = false;
  double alpha = 1.0;
  double beta = 1.0;
  Support support{};
  TimeBoundary time_boundary = TimeBoundary::Fixed;
};

/// Chain starting point. X is the per-pixel inversion of the 3x3 box-smoothed
/// detection rate (Poisson: rate/eta, Bernoulli: -log(1 - min(rate, 0.99))/eta),
/// floored at kIntensityFloor and clipped into the support; U and W come from
/// one auxiliary sweep. gamma_boundary is temporal_boundary_value(y, mask).
GmrfState initial_state(const CountStack& y, const ObservationModel& model,
                        const PriorSettings& prior, std::uint64_t seed, int threads = 1);

}  // namespace pgmrf
