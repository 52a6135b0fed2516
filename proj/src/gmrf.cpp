#include "pgmrf/gmrf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/digamma.hpp>

namespace pgmrf {

namespace {

std::size_t wrap_inc(std::size_t v, std::size_t n) { return v + 1 == n ? 0 : v + 1; }
std::size_t wrap_dec(std::size_t v, std::size_t n) { return v == 0 ? n - 1 : v - 1; }

// x at frame `t` of the extended time axis [-1, T]; -1 and T are ghosts.
double x_extended(const IntensityStack& x, double gamma, TimeBoundary boundary, std::size_t i,
                  std::size_t j, std::ptrdiff_t t) {
  const auto frames = static_cast<std::ptrdiff_t>(x.frames());
  if (t >= 0 && t < frames) return x(i, j, static_cast<std::size_t>(t));
  if (boundary == TimeBoundary::Fixed) return gamma;
  return x(i, j, static_cast<std::size_t>(t < 0 ? frames - 1 : 0));
}

// Number of distinct W frames: the cyclic boundary aliases frame T to 0.
std::size_t distinct_w_frames(const GmrfState& s) {
  return s.time_boundary == TimeBoundary::Cyclic ? s.x.frames() : s.x.frames() + 1;
}

double digamma(double v) { return boost::math::digamma(v); }

}  // namespace

void validate_state(const GmrfState& s) {
  const Geometry& g = s.x.geometry();
  require_valid(g);
  if (!(s.u.geometry() == g)) throw std::invalid_argument("GmrfState: U shape differs from X");
  if (s.w && !(s.w->geometry() == g.with_frames(g.frames + 1))) {
    throw std::invalid_argument("GmrfState: W must have frames + 1 frames");
  }
  if (s.alpha.size() != g.frames) {
    throw std::invalid_argument("GmrfState: alpha needs one entry per frame");
  }
  for (double a : s.alpha) {
    if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("GmrfState: alpha must be > 0");
  }
  if (!(s.beta > 0.0) || !std::isfinite(s.beta)) {
    throw std::invalid_argument("GmrfState: beta must be > 0");
  }
  if (!(s.gamma_boundary > 0.0)) throw std::invalid_argument("GmrfState: gamma must be > 0");
  require_valid(s.support);
}

double u_tilde(const IntensityStack& x, const GridIndex& u_site) {
  double sum = 0.0;
  for (const GridIndex& n : neighbors_x_of_u(u_site, x.geometry())) sum += x[n];
  return 0.25 * sum;
}

double w_tilde(const IntensityStack& x, double gamma, TimeBoundary boundary,
               const GridIndex& w_site) {
  if (w_site.frame > x.frames()) throw std::out_of_range("w_tilde: W frame out of range");
  const auto t = static_cast<std::ptrdiff_t>(w_site.frame);
  return 0.5 * (x_extended(x, gamma, boundary, w_site.row, w_site.col, t - 1) +
                x_extended(x, gamma, boundary, w_site.row, w_site.col, t));
}

double x_bar(const IntensityStack& u, const GridIndex& x_site) {
  double inv = 0.0;
  for (const GridIndex& n : neighbors_u_of_x(x_site, u.geometry())) inv += 1.0 / u[n];
  return 4.0 / inv;
}

double w_harmonic(const IntensityStack& w, const GridIndex& x_site) {
  const Geometry xg = w.geometry().with_frames(w.frames() - 1);
  double inv = 0.0;
  for (const GridIndex& n : neighbors_w_of_x(x_site, xg)) inv += 1.0 / w[n];
  return 2.0 / inv;
}

double x_tilde(const IntensityStack& u, const IntensityStack& w, double alpha, double beta,
               const GridIndex& x_site) {
  return 1.0 / (alpha / x_bar(u, x_site) + beta / w_harmonic(w, x_site));
}

IntensityStack sample_u(const GmrfState& s, RngKey key, int threads) {
  const Geometry& g = s.x.geometry();
  IntensityStack u(g);
  const auto n = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto site = static_cast<std::size_t>(k);
    const GridIndex idx = g.index(site);
    const double a = s.alpha[idx.frame];
    RngStream rng = key.stream(site, StreamTag::U);
    u.data()[site] = sample_inverse_gamma(a, a * u_tilde(s.x, idx), rng);
  }
  return u;
}

IntensityStack sample_w(const GmrfState& s, RngKey key, int threads) {
  if (!s.temporal()) {
    throw std::logic_error("sample_w: the spatial-only prior has no temporal auxiliaries");
  }
  const Geometry wg = s.x.geometry().with_frames(s.x.frames() + 1);
  IntensityStack w(wg);
  const auto n = static_cast<std::ptrdiff_t>(wg.pixels_per_frame() * distinct_w_frames(s));
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto site = static_cast<std::size_t>(k);
    const GridIndex idx = wg.index(site);
    RngStream rng = key.stream(site, StreamTag::W);
    w.data()[site] = sample_inverse_gamma(
        s.beta, s.beta * w_tilde(s.x, s.gamma_boundary, s.time_boundary, idx), rng);
  }
  if (s.time_boundary == TimeBoundary::Cyclic) {
    std::copy(w.frame(0).begin(), w.frame(0).end(), w.frame(s.x.frames()).begin());
  }
  return w;
}

TruncatedGammaParams prior_conditional_x(const GmrfState& s, const GridIndex& idx) {
  const double a = s.alpha[idx.frame];
  if (s.temporal()) {
    return {a + s.beta, x_tilde(s.u, *s.w, a, s.beta, idx), s.support};
  }
  return {a, x_bar(s.u, idx) / a, s.support};
}

double log_prior_unnormalized(const GmrfState& s) {
  const Geometry& g = s.x.geometry();
  const bool temporal = s.temporal();
  const std::size_t frames = g.frames;
  double total = 0.0;
  for (std::size_t t = 0; t < frames; ++t) {
    const double a = s.alpha[t];
    const double x_shape = temporal ? a + s.beta : a;
    for (std::size_t i = 0; i < g.rows; ++i) {
      for (std::size_t j = 0; j < g.cols; ++j) {
        const GridIndex idx{i, j, t};
        const double x = s.x[idx];
        const double u = s.u[idx];
        total += (x_shape - 1.0) * std::log(x) - (a + 1.0) * std::log(u);
        // x-u edges, one per U neighbour of x, coupling alpha/4.
        double inv_u = 0.0;
        for (const GridIndex& n : neighbors_u_of_x(idx, g)) inv_u += 1.0 / s.u[n];
        total -= 0.25 * a * x * inv_u;
      }
    }
  }
  if (temporal) {
    const IntensityStack& w = *s.w;
    const std::size_t wframes = distinct_w_frames(s);
    for (std::size_t t = 0; t < wframes; ++t) {
      for (std::size_t i = 0; i < g.rows; ++i) {
        for (std::size_t j = 0; j < g.cols; ++j) {
          const double wv = w(i, j, t);
          // Edges to the two temporally adjacent x (ghosts included), coupling beta/2.
          const double xsum = 2.0 * w_tilde(s.x, s.gamma_boundary, s.time_boundary, {i, j, t});
          total += -(s.beta + 1.0) * std::log(wv) - 0.5 * s.beta * xsum / wv;
        }
      }
    }
  }
  return total;
}

HyperScores hyperparameter_scores(const GmrfState& s, int threads) {
  const Geometry& g = s.x.geometry();
  const std::size_t per_frame = g.pixels_per_frame();
  const bool temporal = s.temporal();
  // Per-site contributions are written to disjoint slots and summed serially,
  // so the result does not depend on the thread count.
  std::vector<double> a_terms(g.size());
  std::vector<double> b_terms(temporal ? g.size() : 0);
  const auto n = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto site = static_cast<std::size_t>(k);
    const GridIndex idx = g.index(site);
    const double a = s.alpha[idx.frame];
    const double x = s.x.data()[site];
    const double xb = x_bar(s.u, idx);
    double da;
    if (temporal) {
      const double b = s.beta;
      const double wh = w_harmonic(*s.w, idx);
      const double rate = a / xb + b / wh;
      const double common = std::log(rate) - digamma(a + b) + std::log(x);
      da = common + (a + b) / (rate * xb) - x / xb;
      b_terms[site] = b * (common + (a + b) / (rate * wh) - x / wh);
    } else {
      da = -digamma(a) + std::log(a) + 1.0 - std::log(xb) + std::log(x) - x / xb;
    }
    const double u = s.u.data()[site];
    const double ut = u_tilde(s.x, idx);
    da += std::log(a * ut) + 1.0 - digamma(a) - std::log(u) - ut / u;
    a_terms[site] = a * da;
  }
  HyperScores out;
  out.log_alpha.assign(g.frames, 0.0);
  for (std::size_t site = 0; site < g.size(); ++site) out.log_alpha[site / per_frame] += a_terms[site];
  if (temporal) {
    double sum = 0.0;
    for (double v : b_terms) sum += v;
    const IntensityStack& w = *s.w;
    const double b = s.beta;
    const std::size_t wsites = per_frame * distinct_w_frames(s);
    for (std::size_t site = 0; site < wsites; ++site) {
      const GridIndex idx = w.geometry().index(site);
      const double wv = w.data()[site];
      const double wt = w_tilde(s.x, s.gamma_boundary, s.time_boundary, idx);
      sum += b * (std::log(b * wt) + 1.0 - digamma(b) - std::log(wv) - wt / wv);
    }
    out.log_beta = sum;
  }
  return out;
}

GmrfState initial_state(const CountStack& y, const ObservationModel& model,
                        const PriorSettings& prior, std::uint64_t seed, int threads) {
  const Geometry& g = y.geometry();
  require_same_shape(g, model.mask.geometry(), "initial_state");
  require_valid(prior.support);
  GmrfState s;
  s.alpha.assign(g.frames, prior.alpha);
  s.beta = prior.beta;
  s.support = prior.support;
  s.time_boundary = prior.time_boundary;
  s.gamma_boundary = temporal_boundary_value(y, model.mask);

  double global = 0.0;
  std::size_t valid = 0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (model.mask.valid(k)) {
      global += y.data()[k];
      ++valid;
    }
  }
  global /= static_cast<double>(valid);

  s.x = IntensityStack(g);
  const double hi = prior.support.hi;
  const double lo = std::nextafter(prior.support.lo, hi);
  for (std::size_t t = 0; t < g.frames; ++t) {
    for (std::size_t i = 0; i < g.rows; ++i) {
      for (std::size_t j = 0; j < g.cols; ++j) {
        double sum = 0.0;
        int count = 0;
        for (int di = -1; di <= 1; ++di) {
          for (int dj = -1; dj <= 1; ++dj) {
            std::size_t ii = i;
            std::size_t jj = j;
            if (di < 0) ii = wrap_dec(i, g.rows);
            if (di > 0) ii = wrap_inc(i, g.rows);
            if (dj < 0) jj = wrap_dec(j, g.cols);
            if (dj > 0) jj = wrap_inc(j, g.cols);
            const GridIndex n{ii, jj, t};
            if (!model.mask.valid(g.offset(n))) continue;
            sum += y[n];
            ++count;
          }
        }
        const double rate = count > 0 ? sum / count : global;
        const double eta = model.eta(i, j);
        double x = model.kind == ModelKind::Bernoulli ? -std::log1p(-std::min(rate, 0.99)) / eta
                                                      : rate / eta;
        x = std::max(x, kIntensityFloor);
        s.x(i, j, t) = std::clamp(x, lo, hi);
      }
    }
  }

  const RngKey key{seed, 0};
  // U and W draws for the starting point come from iteration 0 streams; the
  // chain itself uses iterations 1..n_mc.
  s.u = IntensityStack(g, 1.0);
  if (prior.temporal) s.w = IntensityStack(g.with_frames(g.frames + 1), 1.0);
  validate_state(s);
  s.u = sample_u(s, key, threads);
  if (prior.temporal) s.w = sample_w(s, key, threads);
  return s;
}

}  // namespace pgmrf
