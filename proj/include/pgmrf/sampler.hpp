#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pgmrf/core.hpp"
#include "pgmrf/distributions.hpp"
#include "pgmrf/gmrf.hpp"
#include "pgmrf/observation.hpp"
#include "pgmrf/rng.hpp"

namespace pgmrf {

/// Which hyperparameters are tuned during burn-in.
enum class Adaptation { Off, Alpha, AlphaBeta };

std::string to_string(Adaptation a);
/// Accepts "off", "alpha", "alpha-beta".
Adaptation parse_adaptation(const std::string& text);

struct SamplerConfig {
  std::size_t n_mc = 2000;  // total iterations, burn-in included
  std::size_t n_bi = 600;   // discarded burn-in iterations
  bool temporal = false;    // spatio-temporal (3D) prior when true
  ModelKind model = ModelKind::Bernoulli;
  Adaptation adapt = Adaptation::Off;
  double alpha0 = 4.0;
  double beta0 = 4.0;
  Support support{};
  std::uint64_t seed = 1;
  std::size_t thinning = 1;
  /// Use x_bar / (1 + x_bar * eta) as the spatial-only Poisson posterior scale
  /// instead of the conjugate x_bar / (alpha + x_bar * eta). Only useful for
  /// comparison: the resulting kernel does not target the stated prior.
  bool uncorrected_spatial_scale = false;
  TimeBoundary time_boundary = TimeBoundary::Fixed;
  /// Adapt one alpha per frame instead of a single shared value.
  bool per_frame_alpha = false;
  int threads = 1;
  /// Store kept samples to report per-pixel 5/50/95% quantiles.
  bool keep_quantiles = false;
  /// Never resample U/W: the X kernel then runs with the auxiliaries of the
  /// initial state. Used to check single-site conditionals.
  bool freeze_auxiliaries = false;
  /// Record the unnormalized log posterior at every iteration.
  bool track_log_posterior = false;

  std::size_t kept() const { return (n_mc - n_bi) / thinning; }
  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

struct HyperSample {
  std::size_t iteration = 0;
  std::vector<double> alpha;
  double beta = 0.0;
};

struct ChainSummary {
  IntensityStack x_mmse;
  IntensityStack x_var;  // per-pixel posterior variance of the kept samples
  std::optional<std::array<IntensityStack, 3>> x_quantiles;  // 5%, 50%, 95%
  /// Acceptance frequency over kept iterations. Sites updated by an exact
  /// conditional draw (masked, Poisson, Bernoulli y = 0) record 1.
  IntensityStack accept_rate;
  std::vector<HyperSample> hyper_trace;
  std::vector<double> log_posterior_trace;
  std::vector<std::string> warnings;
  std::size_t kept = 0;
  GmrfState final_state;

  /// Mean acceptance over valid Bernoulli sites with y = 1; NaN when none.
  double mean_accept_rate_detected(const CountStack& y, const Mask& mask) const;
};

/// Poisson-gamma conjugate update for a valid pixel:
///   spatio-temporal: Gamma_X(alpha + beta + y, x_tilde / (1 + x_tilde eta))
///   spatial:         Gamma_X(alpha + y, x_bar / (alpha + x_bar eta))
/// With uncorrected_spatial_scale the spatial scale is x_bar / (1 + x_bar eta).
TruncatedGammaParams posterior_conditional_x_poisson(const GmrfState& s, std::uint32_t y,
                                                     double eta, const GridIndex& idx,
                                                     bool uncorrected_spatial_scale = false);

/// log rho for the Bernoulli Metropolis-Hastings move whose proposal is the
/// Poisson conditional. The shared prior factor cancels, leaving
///   rho = g(eta x*) / g(eta x)   with g(v) = (e^v - 1) / v   for y = 1,
///   rho = 1                                                    for y = 0.
double mh_log_ratio_bernoulli(std::uint32_t y, double eta, double x_candidate, double x_current);

struct MhOutcome {
  double x = 0.0;
  bool accepted = false;
};

/// One Metropolis-Hastings update of x at a valid Bernoulli site. Draws the
/// candidate, then one uniform, from `rng`; accepts when log(u) < log(rho).
MhOutcome mh_step_bernoulli(const GmrfState& s, std::uint32_t y, double eta,
                            const GridIndex& idx, double x_current, RngStream& rng,
                            bool uncorrected_spatial_scale = false);

struct IterationReport {
  std::size_t mh_proposed = 0;  // Bernoulli sites with y = 1
  std::size_t mh_accepted = 0;
  bool adapted = false;
  std::string warning;
};

/// One sweep in the fixed order: U, then W (3D), then every X site (masked:
/// prior conditional; Poisson: conjugate draw; Bernoulli: MH), then the
/// hyperparameter update when adaptation is on and k <= n_bi. `accepted`
/// receives one flag per X site when non-empty.
IterationReport gibbs_iteration(GmrfState& s, const CountStack& y, const ObservationModel& model,
                                const SamplerConfig& config, std::uint32_t k,
                                std::span<std::uint8_t> accepted = {});

struct AdaptResult {
  bool updated = false;
  std::string warning;
};

/// Projected stochastic-approximation step on (log alpha, log beta):
/// theta += delta_k * score, delta_k = 10 / n_sites * k^-0.8, projected onto
/// [kHyperMin, kHyperMax]. Non-finite scores skip the update with a warning.
AdaptResult adapt_hyperparameters(GmrfState& s, std::size_t k, const SamplerConfig& config);

/// Step size of the adaptation at iteration k for `sites` X sites.
double adaptation_step(std::size_t k, std::size_t sites);

/// Unnormalized log posterior: log prior (fixed hyperparameters) + log likelihood.
double log_posterior_unnormalized(const GmrfState& s, const CountStack& y,
                                  const ObservationModel& model);

/// Runs n_mc iterations from initial_state(...) and averages the kept samples.
ChainSummary run_chain(const CountStack& y, const ObservationModel& model,
                       const SamplerConfig& config);

/// Same, from a caller-provided starting state.
ChainSummary run_chain(const CountStack& y, const ObservationModel& model,
                       const SamplerConfig& config, GmrfState start);

}  // namespace pgmrf
