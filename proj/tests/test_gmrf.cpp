#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "pgmrf/gmrf.hpp"

using namespace pgmrf;

namespace {

GmrfState make_state(const Geometry& g, double x, double u, double alpha, bool temporal,
                     double w = 1.0, double beta = 1.0) {
  GmrfState s;
  s.x = IntensityStack(g, x);
  s.u = IntensityStack(g, u);
  if (temporal) s.w = IntensityStack(g.with_frames(g.frames + 1), w);
  s.alpha.assign(g.frames, alpha);
  s.beta = beta;
  return s;
}

}  // namespace

TEST(UTilde, Examples) {
  const Geometry g{3, 3, 1};
  EXPECT_DOUBLE_EQ(u_tilde(IntensityStack(g, 0.7), {1, 1, 0}), 0.7);
  IntensityStack x(g, 0.0);
  x(1, 1, 0) = 1;
  x(2, 1, 0) = 2;
  x(1, 2, 0) = 3;
  x(2, 2, 0) = 4;
  EXPECT_DOUBLE_EQ(u_tilde(x, {1, 1, 0}), 2.5);
  EXPECT_DOUBLE_EQ(u_tilde(IntensityStack(Geometry{1, 1, 1}, 0.3), {0, 0, 0}), 0.3);
}

TEST(WTilde, Examples) {
  const Geometry g{1, 1, 3};
  const IntensityStack x(g, std::vector<double>{0.1, 0.2, 0.4});
  EXPECT_NEAR(w_tilde(x, 0.5, TimeBoundary::Fixed, {0, 0, 2}), 0.3, 1e-15);
  EXPECT_NEAR(w_tilde(x, 0.5, TimeBoundary::Fixed, {0, 0, 0}), 0.3, 1e-15);
  EXPECT_NEAR(w_tilde(x, 0.5, TimeBoundary::Fixed, {0, 0, 3}), 0.45, 1e-15);
  EXPECT_NEAR(w_tilde(x, 0.5, TimeBoundary::Cyclic, {0, 0, 0}), 0.25, 1e-15);
  EXPECT_NEAR(w_tilde(x, 0.5, TimeBoundary::Cyclic, {0, 0, 3}), 0.25, 1e-15);
  EXPECT_THROW(w_tilde(x, 0.5, TimeBoundary::Fixed, {0, 0, 4}), std::out_of_range);
}

TEST(XBar, Examples) {
  const Geometry g{2, 2, 1};
  EXPECT_DOUBLE_EQ(x_bar(IntensityStack(g, 2.0), {0, 0, 0}), 2.0);
  IntensityStack u(g, 1.0);
  u(1, 1, 0) = 1e12;  // one of the four neighbours of (0,0)
  EXPECT_NEAR(x_bar(u, {0, 0, 0}), 4.0 / 3.0, 1e-11);
}

TEST(XBar, BetweenMinAndMax) {
  const Geometry g{4, 4, 1};
  IntensityStack u(g);
  for (std::size_t k = 0; k < g.size(); ++k) u.data()[k] = 0.1 + 0.37 * k;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const GridIndex idx = g.index(k);
    double lo = INFINITY, hi = 0.0, arith = 0.0;
    for (const auto& n : neighbors_u_of_x(idx, g)) {
      lo = std::min(lo, u[n]);
      hi = std::max(hi, u[n]);
      arith += u[n] / 4.0;
    }
    const double h = x_bar(u, idx);
    EXPECT_GE(h, lo * (1 - 1e-15));
    EXPECT_LE(h, arith * (1 + 1e-15));
    EXPECT_LE(h, hi);
  }
}

TEST(XTilde, RateSum) {
  const Geometry g{2, 2, 2};
  const IntensityStack u(g, 0.4);
  IntensityStack w(g.with_frames(3), 0.2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) w(i, j, 1) = 0.6;
  // x_bar = 0.4, harmonic mean of (0.2, 0.6) = 0.3.
  EXPECT_NEAR(w_harmonic(w, {0, 0, 0}), 0.3, 1e-15);
  EXPECT_NEAR(x_tilde(u, w, 1.0, 1.0, {0, 0, 0}), 1.0 / (1.0 / 0.4 + 1.0 / 0.3), 1e-15);
  EXPECT_NEAR(x_tilde(u, w, 1.0, 1.0, {0, 0, 0}), 0.1714286, 1e-7);
  EXPECT_NEAR(x_tilde(IntensityStack(g, 2.0), IntensityStack(g.with_frames(3), 3.0), 4.0, 0.5, {1, 1, 1}),
              1.0 / (4.0 / 2.0 + 0.5 / 3.0), 1e-15);
}

TEST(PriorConditional, SpatialPreservesMean) {
  const GmrfState s = make_state({3, 3, 1}, 1.0, 2.0, 4.0, false);
  const auto p = prior_conditional_x(s, {1, 1, 0});
  EXPECT_DOUBLE_EQ(p.shape, 4.0);
  EXPECT_DOUBLE_EQ(p.scale, 0.5);
  EXPECT_DOUBLE_EQ(p.shape * p.scale, 2.0);
}

TEST(PriorConditional, TemporalShapeAndScale) {
  const GmrfState s = make_state({2, 2, 2}, 1.0, 0.4, 1.0, true, 0.3, 1.0);
  const auto p = prior_conditional_x(s, {0, 0, 1});
  EXPECT_DOUBLE_EQ(p.shape, 2.0);
  EXPECT_NEAR(p.scale, 1.0 / (1.0 / 0.4 + 1.0 / 0.3), 1e-15);
}

TEST(PriorConditional, VanishingBetaRecoversSpatial) {
  const Geometry g{3, 3, 2};
  const GmrfState flat = make_state(g, 1.0, 0.9, 2.5, false);
  const auto ref = prior_conditional_x(flat, {1, 2, 1});
  double previous = INFINITY;
  for (double beta : {1.0, 1e-2, 1e-4}) {
    const GmrfState s = make_state(g, 1.0, 0.9, 2.5, true, 0.7, beta);
    const auto p = prior_conditional_x(s, {1, 2, 1});
    const double gap = std::abs(p.scale - ref.scale) + std::abs(p.shape - ref.shape);
    EXPECT_LT(gap, previous);
    previous = gap;
  }
  EXPECT_LT(previous, 1e-3);
}

TEST(SampleU, InverseGammaMean) {
  const Geometry g{40, 40, 1};
  const double c = 0.6;
  const GmrfState s = make_state(g, c, 1.0, 2.0, false);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::uint32_t it = 1; it <= 200; ++it) {
    const IntensityStack u = sample_u(s, {7, it});
    for (double v : u.data()) sum += v;
    n += g.size();
  }
  // alpha c / (alpha - 1) = 2c; heavy tail, so only a loose band.
  EXPECT_NEAR(sum / n, 2.0 * c, 0.05);
}

TEST(SampleU, ConcentratesForLargeAlpha) {
  const Geometry g{20, 20, 1};
  const GmrfState s = make_state(g, 0.5, 1.0, 5000.0, false);
  const IntensityStack u = sample_u(s, {1, 1});
  for (double v : u.data()) EXPECT_NEAR(v, 0.5, 0.05);
}

TEST(SampleW, ConstantFieldAndConcentration) {
  const Geometry g{6, 6, 3};
  GmrfState s = make_state(g, 0.8, 1.0, 2.0, true, 1.0, 5000.0);
  s.gamma_boundary = 0.8;
  for (std::size_t k = 0; k < s.w->size(); ++k) {
    EXPECT_DOUBLE_EQ(w_tilde(s.x, s.gamma_boundary, s.time_boundary, s.w->geometry().index(k)), 0.8);
  }
  const IntensityStack w = sample_w(s, {2, 1});
  for (double v : w.data()) EXPECT_NEAR(v, 0.8, 0.08);
}

TEST(SampleW, CyclicAliasesLastFrame) {
  const Geometry g{3, 3, 4};
  GmrfState s = make_state(g, 0.5, 1.0, 2.0, true, 1.0, 2.0);
  s.time_boundary = TimeBoundary::Cyclic;
  const IntensityStack w = sample_w(s, {3, 5});
  for (std::size_t k = 0; k < g.pixels_per_frame(); ++k) {
    EXPECT_EQ(w.frame(0)[k], w.frame(4)[k]);
  }
}

TEST(SampleW, SpatialStateThrows) {
  const GmrfState s = make_state({2, 2, 1}, 1.0, 1.0, 1.0, false);
  EXPECT_THROW(sample_w(s, {1, 1}), std::logic_error);
}

TEST(SampleU, ThreadCountInvariant) {
  const Geometry g{17, 13, 3};
  GmrfState s = make_state(g, 1.0, 1.0, 3.0, true, 1.0, 2.0);
  for (std::size_t k = 0; k < g.size(); ++k) s.x.data()[k] = 0.1 + 0.01 * k;
  EXPECT_EQ(sample_u(s, {4, 2}, 1), sample_u(s, {4, 2}, 4));
  EXPECT_EQ(sample_w(s, {4, 2}, 1), sample_w(s, {4, 2}, 3));
}

// The conditional of x read off the joint prior must be the stated gamma law:
// the log-prior difference between two x values equals the log-density
// difference of prior_conditional_x.
TEST(LogPrior, ConditionalsAgreeWithJoint) {
  for (bool temporal : {false, true}) {
    const Geometry g{3, 4, 2};
    GmrfState s = make_state(g, 1.0, 1.0, 2.0, temporal, 1.0, 1.5);
    s.alpha = {2.0, 3.0};
    s.gamma_boundary = 0.4;
    for (std::size_t k = 0; k < g.size(); ++k) {
      s.x.data()[k] = 0.3 + 0.05 * k;
      s.u.data()[k] = 0.5 + 0.03 * k;
    }
    if (temporal)
      for (std::size_t k = 0; k < s.w->size(); ++k) s.w->data()[k] = 0.4 + 0.02 * k;
    const GridIndex site{2, 1, 1};
    const auto p = prior_conditional_x(s, site);
    const double a = 0.7, b = 1.9;
    GmrfState sa = s, sb = s;
    sa.x[site] = a;
    sb.x[site] = b;
    const double joint = log_prior_unnormalized(sb) - log_prior_unnormalized(sa);
    const double cond = oracle::log_gamma_density(b, p.shape, p.scale) -
                        oracle::log_gamma_density(a, p.shape, p.scale);
    EXPECT_NEAR(joint, cond, 1e-10) << temporal;

    // Same for one U site: InvGamma(alpha, alpha * u_tilde).
    const double ut = u_tilde(s.x, site);
    const double al = s.alpha[site.frame];
    sa = s;
    sb = s;
    sa.u[site] = 0.6;
    sb.u[site] = 1.4;
    auto log_ig = [&](double u) { return -(al + 1.0) * std::log(u) - al * ut / u; };
    EXPECT_NEAR(log_prior_unnormalized(sb) - log_prior_unnormalized(sa), log_ig(1.4) - log_ig(0.6),
                1e-10);
  }
}

TEST(LogPrior, WConditionalAgreesWithJoint) {
  const Geometry g{2, 2, 3};
  GmrfState s = make_state(g, 0.6, 0.9, 2.0, true, 0.8, 1.7);
  s.gamma_boundary = 0.3;
  for (std::size_t k = 0; k < g.size(); ++k) s.x.data()[k] = 0.2 + 0.07 * k;
  const GridIndex wsite{1, 0, 3};
  const double wt = w_tilde(s.x, s.gamma_boundary, s.time_boundary, wsite);
  GmrfState sa = s, sb = s;
  (*sa.w)[wsite] = 0.5;
  (*sb.w)[wsite] = 1.2;
  auto log_ig = [&](double w) { return -(s.beta + 1.0) * std::log(w) - s.beta * wt / w; };
  EXPECT_NEAR(log_prior_unnormalized(sb) - log_prior_unnormalized(sa), log_ig(1.2) - log_ig(0.5), 1e-10);
}

// The summed log-alpha score is the derivative of the log pseudo-likelihood;
// compare with a central difference of the same sum built from the oracle
// densities.
TEST(HyperScores, MatchFiniteDifference) {
  const Geometry g{3, 3, 2};
  GmrfState s = make_state(g, 1.0, 1.0, 2.0, true, 1.0, 1.5);
  s.gamma_boundary = 0.5;
  for (std::size_t k = 0; k < g.size(); ++k) {
    s.x.data()[k] = 0.4 + 0.04 * k;
    s.u.data()[k] = 0.7 + 0.02 * k;
  }
  for (std::size_t k = 0; k < s.w->size(); ++k) s.w->data()[k] = 0.5 + 0.03 * k;

  auto pseudo = [&](double alpha, double beta) {
    GmrfState t = s;
    t.alpha.assign(g.frames, alpha);
    t.beta = beta;
    double total = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const GridIndex idx = g.index(k);
      const auto p = prior_conditional_x(t, idx);
      total += oracle::log_gamma_density(t.x[idx], p.shape, p.scale);
      const double ut = u_tilde(t.x, idx);
      const double u = t.u[idx];
      total += alpha * std::log(alpha * ut) - std::lgamma(alpha) - (alpha + 1) * std::log(u) - alpha * ut / u;
    }
    for (std::size_t k = 0; k < t.w->size(); ++k) {
      const GridIndex idx = t.w->geometry().index(k);
      const double wt = w_tilde(t.x, t.gamma_boundary, t.time_boundary, idx);
      const double w = (*t.w)[idx];
      total += beta * std::log(beta * wt) - std::lgamma(beta) - (beta + 1) * std::log(w) - beta * wt / w;
    }
    return total;
  };
  const double h = 1e-5;
  const double a = 2.0, b = 1.5;
  const double d_log_a = (pseudo(a * std::exp(h), b) - pseudo(a * std::exp(-h), b)) / (2 * h);
  const double d_log_b = (pseudo(a, b * std::exp(h)) - pseudo(a, b * std::exp(-h))) / (2 * h);
  const HyperScores sc = hyperparameter_scores(s);
  EXPECT_NEAR(sc.log_alpha[0] + sc.log_alpha[1], d_log_a, 1e-5 * std::max(1.0, std::abs(d_log_a)));
  EXPECT_NEAR(sc.log_beta, d_log_b, 1e-5 * std::max(1.0, std::abs(d_log_b)));
  EXPECT_EQ(hyperparameter_scores(s, 1).log_beta, hyperparameter_scores(s, 4).log_beta);
}

TEST(HyperScores, SpatialMatchesFiniteDifference) {
  const Geometry g{4, 3, 1};
  GmrfState s = make_state(g, 1.0, 1.0, 3.0, false);
  for (std::size_t k = 0; k < g.size(); ++k) {
    s.x.data()[k] = 0.5 + 0.1 * std::sin(k);
    s.u.data()[k] = 0.6 + 0.1 * std::cos(k);
  }
  auto pseudo = [&](double alpha) {
    GmrfState t = s;
    t.alpha = {alpha};
    double total = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const GridIndex idx = g.index(k);
      const auto p = prior_conditional_x(t, idx);
      total += oracle::log_gamma_density(t.x[idx], p.shape, p.scale);
      const double ut = u_tilde(t.x, idx);
      const double u = t.u[idx];
      total += alpha * std::log(alpha * ut) - std::lgamma(alpha) - (alpha + 1) * std::log(u) - alpha * ut / u;
    }
    return total;
  };
  const double h = 1e-5;
  const double fd = (pseudo(3.0 * std::exp(h)) - pseudo(3.0 * std::exp(-h))) / (2 * h);
  EXPECT_NEAR(hyperparameter_scores(s).log_alpha[0], fd, 1e-5 * std::max(1.0, std::abs(fd)));
}

TEST(InitialState, ShapesAndSupport) {
  const Geometry g{5, 6, 3};
  CountStack y(g, 0u);
  y(2, 2, 1) = 1;
  ObservationModel m = ObservationModel::uniform(ModelKind::Bernoulli, g);
  m.mask.set({0, 0, 0}, false);
  PriorSettings prior;
  prior.temporal = true;
  prior.alpha = 3.0;
  prior.beta = 2.0;
  prior.support = {0.0, 0.5};
  const GmrfState s = initial_state(y, m, prior, 11);
  EXPECT_NO_THROW(validate_state(s));
  EXPECT_TRUE(s.temporal());
  EXPECT_EQ(s.w->frames(), 4u);
  EXPECT_DOUBLE_EQ(s.gamma_boundary, std::max(1.0 / (g.size() - 1), kGammaMin));
  for (double v : s.x.data()) {
    EXPECT_GT(v, 0.0);
    EXPECT_LE(v, 0.5);
  }
  EXPECT_GT(s.x(2, 2, 1), s.x(0, 3, 1));
  EXPECT_EQ(initial_state(y, m, prior, 11).u, s.u);
}

TEST(ValidateState, RejectsInconsistentFields) {
  GmrfState s = make_state({2, 2, 2}, 1.0, 1.0, 1.0, false);
  s.alpha = {1.0};
  EXPECT_THROW(validate_state(s), std::invalid_argument);
  s.alpha = {1.0, -1.0};
  EXPECT_THROW(validate_state(s), std::invalid_argument);
  s.alpha = {1.0, 1.0};
  s.w = IntensityStack(Geometry{2, 2, 2}, 1.0);
  EXPECT_THROW(validate_state(s), std::invalid_argument);
}
