#include "pgmrf/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pgmrf/errors.hpp"

namespace pgmrf {

namespace {

// log((e^v - 1) / v) without overflow for large v.
double log_g(double v) { return std::log(-std::expm1(-v)) + v - std::log(v); }

// Literal-scale Bernoulli move: the proposal is no longer the exact Poisson
// conditional, so the ratio keeps every factor.
double generic_log_ratio(const TruncatedGammaParams& prior, const TruncatedGammaParams& proposal,
                         std::uint32_t y, double eta, double x_new, double x_old) {
  auto target = [&](double x) {
    return log_density_gamma(x, prior.shape, prior.scale) +
           loglik_pixel(ModelKind::Bernoulli, y, eta, x, true);
  };
  auto q = [&](double x) { return log_density_gamma(x, proposal.shape, proposal.scale); };
  return (target(x_new) - target(x_old)) - (q(x_new) - q(x_old));
}

void check_site_stats(const GmrfState& s) {
  for (double a : s.alpha) {
    if (!std::isfinite(a)) throw NumericalError("alpha became non-finite");
  }
}

}  // namespace

std::string to_string(Adaptation a) {
  switch (a) {
    case Adaptation::Off: return "off";
    case Adaptation::Alpha: return "alpha";
    case Adaptation::AlphaBeta: return "alpha-beta";
  }
  return "off";
}

Adaptation parse_adaptation(const std::string& text) {
  if (text == "off") return Adaptation::Off;
  if (text == "alpha") return Adaptation::Alpha;
  if (text == "alpha-beta") return Adaptation::AlphaBeta;
  throw std::invalid_argument("unknown adaptation mode '" + text + "'");
}

void SamplerConfig::validate() const {
  if (n_mc == 0) throw std::invalid_argument("n_mc must be positive");
  if (n_bi >= n_mc) throw std::invalid_argument("burn-in must be shorter than the chain");
  if (thinning == 0) throw std::invalid_argument("thinning must be positive");
  if (kept() == 0) throw std::invalid_argument("thinning leaves no kept samples");
  if (!(alpha0 > 0.0) || !(beta0 > 0.0)) {
    throw std::invalid_argument("alpha0 and beta0 must be positive");
  }
  if (adapt == Adaptation::AlphaBeta && !temporal) {
    throw std::invalid_argument("beta adaptation requires the temporal prior");
  }
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (n_mc > 0xFFFFFFFFu) throw std::invalid_argument("n_mc exceeds the RNG iteration counter");
  require_valid(support);
}

double ChainSummary::mean_accept_rate_detected(const CountStack& y, const Mask& mask) const {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (mask.valid(k) && y.data()[k] == 1) {
      sum += accept_rate.data()[k];
      ++n;
    }
  }
  return n == 0 ? std::nan("") : sum / static_cast<double>(n);
}

TruncatedGammaParams posterior_conditional_x_poisson(const GmrfState& s, std::uint32_t y,
                                                     double eta, const GridIndex& idx,
                                                     bool uncorrected_spatial_scale) {
  const double a = s.alpha[idx.frame];
  if (s.temporal()) {
    const double xt = x_tilde(s.u, *s.w, a, s.beta, idx);
    return {a + s.beta + y, xt / (1.0 + xt * eta), s.support};
  }
  const double xb = x_bar(s.u, idx);
  const double denom = (uncorrected_spatial_scale ? 1.0 : a) + xb * eta;
  return {a + y, xb / denom, s.support};
}

double mh_log_ratio_bernoulli(std::uint32_t y, double eta, double x_candidate, double x_current) {
  if (y == 0) return 0.0;
  return log_g(eta * x_candidate) - log_g(eta * x_current);
}

MhOutcome mh_step_bernoulli(const GmrfState& s, std::uint32_t y, double eta, const GridIndex& idx,
                            double x_current, RngStream& rng, bool uncorrected_spatial_scale) {
  const TruncatedGammaParams proposal =
      posterior_conditional_x_poisson(s, y, eta, idx, uncorrected_spatial_scale);
  const double candidate = sample_truncated_gamma(proposal, rng);
  double log_rho;
  if (uncorrected_spatial_scale && !s.temporal()) {
    log_rho = generic_log_ratio(prior_conditional_x(s, idx), proposal, y, eta, candidate,
                                x_current);
  } else {
    log_rho = mh_log_ratio_bernoulli(y, eta, candidate, x_current);
  }
  const double u = rng.uniform();
  if (std::log(u) < log_rho) return {candidate, true};
  return {x_current, false};
}

double adaptation_step(std::size_t k, std::size_t sites) {
  return 10.0 / static_cast<double>(sites) * std::pow(static_cast<double>(k), -0.8);
}

AdaptResult adapt_hyperparameters(GmrfState& s, std::size_t k, const SamplerConfig& config) {
  AdaptResult out;
  if (config.adapt == Adaptation::Off || k == 0 || k > config.n_bi) return out;
  const Geometry& g = s.geometry();
  const HyperScores scores = hyperparameter_scores(s, config.threads);
  const double lo = std::log(kHyperMin);
  const double hi = std::log(kHyperMax);
  auto project = [&](double value, double step, double score) {
    return std::exp(std::clamp(std::log(value) + step * score, lo, hi));
  };

  bool finite = std::isfinite(scores.log_beta);
  for (double v : scores.log_alpha) finite = finite && std::isfinite(v);
  if (!finite) {
    out.warning = "iteration " + std::to_string(k) + ": non-finite adaptation score, step skipped";
    return out;
  }

  if (config.per_frame_alpha) {
    const double step = adaptation_step(k, g.pixels_per_frame());
    for (std::size_t t = 0; t < g.frames; ++t) {
      s.alpha[t] = project(s.alpha[t], step, scores.log_alpha[t]);
    }
  } else {
    double total = 0.0;
    for (double v : scores.log_alpha) total += v;
    const double updated = project(s.alpha[0], adaptation_step(k, g.size()), total);
    std::fill(s.alpha.begin(), s.alpha.end(), updated);
  }
  if (config.adapt == Adaptation::AlphaBeta && s.temporal()) {
    s.beta = project(s.beta, adaptation_step(k, g.size()), scores.log_beta);
  }
  out.updated = true;
  return out;
}

double log_posterior_unnormalized(const GmrfState& s, const CountStack& y,
                                  const ObservationModel& model) {
  return log_prior_unnormalized(s) + loglik_total(model, y, s.x);
}

IterationReport gibbs_iteration(GmrfState& s, const CountStack& y, const ObservationModel& model,
                                const SamplerConfig& config, std::uint32_t k,
                                std::span<std::uint8_t> accepted) {
  const Geometry& g = s.geometry();
  const RngKey key{config.seed, k};
  if (!config.freeze_auxiliaries) {
    s.u = sample_u(s, key, config.threads);
    if (s.temporal()) s.w = sample_w(s, key, config.threads);
  }

  const auto n = static_cast<std::ptrdiff_t>(g.size());
  std::size_t proposed = 0;
  std::size_t accepted_count = 0;
  const bool record = !accepted.empty();
#pragma omp parallel for schedule(static) num_threads(config.threads) \
    reduction(+ : proposed, accepted_count)
  for (std::ptrdiff_t kk = 0; kk < n; ++kk) {
    const auto site = static_cast<std::size_t>(kk);
    const GridIndex idx = g.index(site);
    RngStream rng = key.stream(site, StreamTag::X);
    bool ok = true;
    if (!model.mask.valid(site)) {
      s.x.data()[site] = sample_truncated_gamma(prior_conditional_x(s, idx), rng);
    } else {
      const std::uint32_t obs = y.data()[site];
      const double eta = model.eta(idx.row, idx.col);
      if (model.kind == ModelKind::Poisson) {
        s.x.data()[site] = sample_truncated_gamma(
            posterior_conditional_x_poisson(s, obs, eta, idx, config.uncorrected_spatial_scale),
            rng);
      } else {
        const MhOutcome step = mh_step_bernoulli(s, obs, eta, idx, s.x.data()[site], rng,
                                                 config.uncorrected_spatial_scale);
        s.x.data()[site] = step.x;
        ok = step.accepted;
        if (obs == 1) {
          ++proposed;
          if (ok) ++accepted_count;
        }
      }
    }
    if (record) accepted[site] = ok ? 1 : 0;
  }

  IterationReport report;
  report.mh_proposed = proposed;
  report.mh_accepted = accepted_count;
  const AdaptResult adapt = adapt_hyperparameters(s, k, config);
  report.adapted = adapt.updated;
  report.warning = adapt.warning;
  return report;
}

ChainSummary run_chain(const CountStack& y, const ObservationModel& model,
                       const SamplerConfig& config) {
  config.validate();
  PriorSettings prior;
  prior.temporal = config.temporal;
  prior.alpha = config.alpha0;
  prior.beta = config.beta0;
  prior.support = config.support;
  prior.time_boundary = config.time_boundary;
  return run_chain(y, model, config, initial_state(y, model, prior, config.seed, config.threads));
}

ChainSummary run_chain(const CountStack& y, const ObservationModel& model,
                       const SamplerConfig& config, GmrfState start) {
  config.validate();
  validate_state(start);
  const Geometry& g = y.geometry();
  require_same_shape(g, start.geometry(), "run_chain state");
  require_same_shape(g, model.mask.geometry(), "run_chain mask");
  if (model.eta.rows() != g.rows || model.eta.cols() != g.cols) {
    throw ValidationError("run_chain: efficiency map does not match the frame size");
  }
  validate_observations(model.kind, y);
  if (start.temporal() != config.temporal) {
    throw std::invalid_argument("run_chain: start state and config disagree on the temporal prior");
  }

  const std::size_t n = g.size();
  const std::size_t kept_target = config.kept();
  ChainSummary out;
  out.x_mmse = IntensityStack(g, 0.0);
  IntensityStack m2(g, 0.0);
  std::vector<std::uint32_t> accept_counts(n, 0);
  std::vector<std::uint8_t> accepted(n, 1);
  std::vector<float> samples;
  if (config.keep_quantiles) samples.reserve(kept_target * n);
  if (kept_target < 10) {
    out.warnings.push_back("only " + std::to_string(kept_target) +
                           " kept samples; posterior summaries will be noisy");
  }

  GmrfState s = std::move(start);
  out.hyper_trace.push_back({0, s.alpha, s.beta});
  std::size_t kept = 0;
  for (std::size_t k = 1; k <= config.n_mc; ++k) {
    const IterationReport report =
        gibbs_iteration(s, y, model, config, static_cast<std::uint32_t>(k), accepted);
    if (!report.warning.empty()) out.warnings.push_back(report.warning);
    if (report.adapted) out.hyper_trace.push_back({k, s.alpha, s.beta});
    check_site_stats(s);
    if (config.track_log_posterior) {
      out.log_posterior_trace.push_back(log_posterior_unnormalized(s, y, model));
    }
    if (k <= config.n_bi || (k - config.n_bi) % config.thinning != 0) continue;
    ++kept;
    const double inv = 1.0 / static_cast<double>(kept);
    for (std::size_t site = 0; site < n; ++site) {
      // Welford running mean / sum of squared deviations.
      const double x = s.x.data()[site];
      const double delta = x - out.x_mmse.data()[site];
      out.x_mmse.data()[site] += delta * inv;
      m2.data()[site] += delta * (x - out.x_mmse.data()[site]);
      accept_counts[site] += accepted[site];
    }
    if (config.keep_quantiles) {
      for (double x : s.x.data()) samples.push_back(static_cast<float>(x));
    }
  }
  if (kept != kept_target) throw std::logic_error("run_chain: kept-sample bookkeeping mismatch");

  out.kept = kept;
  out.x_var = std::move(m2);
  out.accept_rate = IntensityStack(g, 0.0);
  for (std::size_t site = 0; site < n; ++site) {
    out.x_var.data()[site] /= static_cast<double>(kept);
    out.accept_rate.data()[site] =
        static_cast<double>(accept_counts[site]) / static_cast<double>(kept);
  }
  if (config.keep_quantiles) {
    std::array<IntensityStack, 3> q{IntensityStack(g), IntensityStack(g), IntensityStack(g)};
    std::vector<float> column(kept);
    constexpr std::array<double, 3> levels{0.05, 0.5, 0.95};
    for (std::size_t site = 0; site < n; ++site) {
      for (std::size_t r = 0; r < kept; ++r) column[r] = samples[r * n + site];
      std::sort(column.begin(), column.end());
      for (std::size_t l = 0; l < 3; ++l) {
        // Linear interpolation between order statistics.
        const double pos = levels[l] * static_cast<double>(kept - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, kept - 1);
        const double frac = pos - static_cast<double>(lo);
        q[l].data()[site] = (1.0 - frac) * column[lo] + frac * column[hi];
      }
    }
    out.x_quantiles = std::move(q);
  }
  out.final_state = std::move(s);
  return out;
}

}  // namespace pgmrf
