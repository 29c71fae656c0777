#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "sbpg/error.hpp"
#include "sbpg/learn/agent.hpp"
#include "sbpg/learn/gradient.hpp"
#include "sbpg/learn/ou_noise.hpp"
#include "sbpg/learn/poly_model.hpp"
#include "sbpg/learn/sample_buffer.hpp"

namespace sbpg::learn {
namespace {

// n = 2 basis order: 1, a_L, a_F, a_L^2, a_F^2, a_L a_F
PolyModel quad(double c0, double cl, double cf, double cll, double cff, double clf) {
  return PolyModel(2, {c0, cl, cf, cll, cff, clf});
}

std::vector<Sample> sample_model(const PolyModel& lead, const PolyModel& follow, std::size_t n,
                                 Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Sample> out;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = u(rng);
    const double f = u(rng);
    out.push_back({a, f, lead.value(a, f), follow.value(a, f)});
  }
  return out;
}

// --- polynomial model -------------------------------------------------------

TEST(PolyModel, BasisOrder) {
  EXPECT_EQ(PolyModel::basis(2), (std::vector<Monomial>{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {0, 2}, {1, 1}}));
  EXPECT_EQ(PolyModel::basis_size(3), 10u);
  const auto b3 = PolyModel::basis(3);
  EXPECT_EQ(std::vector<Monomial>(b3.begin() + 6, b3.end()),
            (std::vector<Monomial>{{3, 0}, {0, 3}, {2, 1}, {1, 2}}));
  EXPECT_THROW(PolyModel(2, {1.0, 2.0}), std::invalid_argument);
}

TEST(PolyModel, DerivativesMatchMonomials) {
  const PolyModel m = quad(1.0, 2.0, 3.0, 4.0, 5.0, 6.0);
  const double a = 0.3;
  const double f = 0.7;
  EXPECT_DOUBLE_EQ(m.value(a, f), 1 + 2 * a + 3 * f + 4 * a * a + 5 * f * f + 6 * a * f);
  EXPECT_DOUBLE_EQ(m.d_leader(a, f), 2 + 8 * a + 6 * f);
  EXPECT_DOUBLE_EQ(m.d_follower(a, f), 3 + 10 * f + 6 * a);
  EXPECT_DOUBLE_EQ(m.d2_follower(a, f), 10.0);
  EXPECT_DOUBLE_EQ(m.d2_mixed(a, f), 6.0);
}

TEST(FitPoly, LinearExample) {
  Rng rng(5);
  const auto samples = sample_model(quad(1, 2, 3, 0, 0, 0), quad(1, 2, 3, 0, 0, 0), 20, rng);
  const auto fit = fit_poly(samples, Role::leader, 2, 0.0);
  const std::vector<double> expect{1, 2, 3, 0, 0, 0};
  for (std::size_t k = 0; k < 6; ++k) EXPECT_NEAR(fit.coefficients()[k], expect[k], 1e-8);
}

TEST(FitPoly, CrossTermExample) {
  Rng rng(6);
  const auto samples = sample_model(quad(0, 0, 0, 0, 0, 1), quad(0, 0, 0, 0, 0, 1), 20, rng);
  const auto fit = fit_poly(samples, Role::follower, 2, 0.0);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(fit.coefficients()[k], 0.0, 1e-8);
  EXPECT_NEAR(fit.coefficients()[5], 1.0, 1e-8);
}

TEST(FitPoly, IdenticalSamplesAreSingularWithoutRidge) {
  const std::vector<Sample> samples(12, Sample{0.4, 0.6, 1.0, 2.0});
  EXPECT_THROW(fit_poly(samples, Role::leader, 2, 0.0), SingularFitError);
  const auto fit = fit_poly(samples, Role::leader, 2, 1e-8);
  for (double c : fit.coefficients()) EXPECT_TRUE(std::isfinite(c));
  EXPECT_NEAR(fit.value(0.4, 0.6), 1.0, 1e-6);
}

TEST(FitPoly, TooFewSamplesIsSingular) {
  const std::vector<Sample> samples(5, Sample{0.1, 0.2, 0.3, 0.4});
  EXPECT_THROW(fit_poly(samples, Role::leader, 2, 1e-8), SingularFitError);
}

TEST(FitPoly, RecoversRandomRepresentablePolynomials) {
  Rng rng(7);
  std::uniform_real_distribution<double> c(-2.0, 2.0);
  for (int degree = 1; degree <= 4; ++degree) {
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> coef(PolyModel::basis_size(degree));
      for (auto& x : coef) x = c(rng);
      const PolyModel truth(degree, coef);
      const auto samples = sample_model(truth, truth, 4 * coef.size(), rng);
      const auto fit = fit_poly(samples, Role::follower, degree, 0.0);
      for (std::size_t k = 0; k < coef.size(); ++k) {
        EXPECT_NEAR(fit.coefficients()[k], coef[k], 1e-8) << "degree " << degree;
      }
    }
  }
}

// --- gradients --------------------------------------------------------------

TEST(LeaderGradient, HandDerivedExample) {
  const auto lead = quad(0, 1, 1, 0, 0, 0);
  const auto follow = quad(0, 0, 0, 0, -0.5, 1);
  for (double a : {0.0, 0.3, 1.0}) {
    for (double f : {0.0, 0.5, 1.0}) {
      const auto g = leader_gradient(lead, follow, a, f, 1e-6);
      EXPECT_FALSE(g.fallback);
      EXPECT_NEAR(g.value, 2.0, 1e-12);
    }
  }
}

TEST(LeaderGradient, FlatFollowerFallsBack) {
  const auto lead = quad(0, 0.7, 1, 0.5, 0, 0.25);
  const auto follow = quad(0, 0, 1, 0, 0, 1);
  const auto g = leader_gradient(lead, follow, 0.2, 0.4, 1e-6);
  EXPECT_TRUE(g.fallback);
  EXPECT_DOUBLE_EQ(g.value, lead.d_leader(0.2, 0.4));
}

// Total derivative of U_L(a, f*(a)) where f* is the stationary point of a
// concave quadratic follower, by central differences.
double stackelberg_fd(const PolyModel& lead, const PolyModel& follow, double a, double h) {
  const auto& c = follow.coefficients();
  auto response = [&](double x) { return -(c[2] + c[5] * x) / (2.0 * c[4]); };
  return (lead.value(a + h, response(a + h)) - lead.value(a - h, response(a - h))) / (2.0 * h);
}

TEST(LeaderGradient, MatchesImplicitFiniteDifference) {
  Rng rng(8);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  std::uniform_real_distribution<double> curv(-4.0, -0.25);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto lead = quad(c(rng), c(rng), c(rng), c(rng), c(rng), c(rng));
    const auto follow = quad(c(rng), c(rng), c(rng), c(rng), curv(rng), c(rng));
    const double a = u(rng);
    const auto& fc = follow.coefficients();
    const double f = -(fc[2] + fc[5] * a) / (2.0 * fc[4]);
    const auto g = leader_gradient(lead, follow, a, f, 1e-6);
    const double fd = stackelberg_fd(lead, follow, a, 1e-4);
    EXPECT_LE(std::abs(g.value - fd) / std::max(1.0, std::abs(g.value)), 1e-6);
  }
}

TEST(BoundedLeaderGradient, PinnedFollowerUsesDirectTerm) {
  const auto lead = quad(0, 1, 1, 0, 0, 0);
  // dU_F/da_F = 2 - a_F + a_L > 0 at a_F = 1: pinned at the upper bound
  const auto follow = quad(0, 0, 2, 0, -0.5, 1);
  const auto pinned = bounded_leader_gradient(lead, follow, 0.5, 1.0, 1e-6);
  EXPECT_FALSE(pinned.fallback);
  EXPECT_DOUBLE_EQ(pinned.value, 1.0);
  // Interior point keeps the implicit term.
  const auto free = bounded_leader_gradient(lead, quad(0, 0, 0, 0, -0.5, 1), 0.3, 0.3, 1e-6);
  EXPECT_NEAR(free.value, 2.0, 1e-12);
  // At the lower bound with an inward field the implicit term is kept.
  const auto inward = bounded_leader_gradient(lead, quad(0, 0, 0.5, 0, -0.5, 1), 0.3, 0.0, 1e-6);
  EXPECT_NEAR(inward.value, 2.0, 1e-12);
}

TEST(FollowerGradient, Examples) {
  // -(a_F - 0.6)^2 = -0.36 + 1.2 a_F - a_F^2
  EXPECT_NEAR(follower_gradient(quad(-0.36, 0, 1.2, 0, -1, 0), 0.5, 0.1), 1.0, 1e-15);
  EXPECT_EQ(follower_gradient(quad(3, 0, 0, 0, 0, 0), 0.5, 0.1), 0.0);
  EXPECT_DOUBLE_EQ(follower_gradient(quad(0, 0, 0, 0, 0, 1), 0.35, 0.8), 0.35);
}

TEST(LeaderUpdate, Examples) {
  EXPECT_NEAR(leader_update(ActionValue(0.5), 0.2, 0.4).value(), 0.58, 1e-15);
  EXPECT_EQ(leader_update(ActionValue(0.9), 1.0, 0.4), ActionValue(1.0));
  EXPECT_EQ(leader_update(ActionValue(0.1), -1.0, 0.4), ActionValue(0.0));
  EXPECT_EQ(leader_update(ActionValue(0.37), 0.0, 0.4), ActionValue(0.37));
}

TEST(FollowerUpdate, Examples) {
  Rng rng(1);
  OuNoise off;
  double v = 0.0;
  EXPECT_NEAR(follower_update(ActionValue(0.2), 0.4, {0.5, 0.0}, v, off, rng).value(), 0.4, 1e-15);
  v = 0.0;
  EXPECT_EQ(follower_update(ActionValue(0.2), 0.0, {0.5, 0.4}, v, off, rng), ActionValue(0.2));
}

TEST(FollowerUpdate, MomentumRecursion) {
  Rng rng(1);
  OuNoise off;
  double v = 0.3;
  const auto a = follower_update(ActionValue(0.5), 0.2, {0.5, 0.4}, v, off, rng);
  EXPECT_NEAR(v, 0.4 * 0.3 + 0.6 * 0.2, 1e-15);
  EXPECT_NEAR(a.value(), 0.5 + 0.5 * v, 1e-15);
}

TEST(FollowerUpdate, ZeroSigmaNoiseMatchesDisabled) {
  OuParams p;
  p.enabled = true;
  p.sigma = 0.0;
  for (int k = 0; k < 20; ++k) {
    Rng r1(k);
    Rng r2(k);
    OuNoise on(p);
    OuNoise off;
    double v1 = 0.1;
    double v2 = 0.1;
    EXPECT_EQ(follower_update(ActionValue(0.3), 0.2 * k - 2, {0.5, 0.4}, v1, on, r1),
              follower_update(ActionValue(0.3), 0.2 * k - 2, {0.5, 0.4}, v2, off, r2));
  }
}

TEST(OuNoise, DisabledDrawsNothing) {
  Rng a(9);
  Rng b(9);
  OuNoise off;
  EXPECT_EQ(off.sample(a), 0.0);
  EXPECT_EQ(a(), b());
}

TEST(OuNoise, MeanReversionWithoutDiffusion) {
  OuParams p;
  p.enabled = true;
  p.sigma = 0.0;
  p.mu = 1.0;
  OuNoise n(p);
  Rng rng(1);
  double x = 0.0;
  for (int k = 0; k < 500; ++k) x = n.sample(rng);
  EXPECT_NEAR(x, 1.0, 1e-9);
}

TEST(MultiStepFollower, OneStepEqualsSingleUpdate) {
  const auto follow = quad(0, 0.2, 0.5, 0, -1, 0.3);
  Rng r1(2);
  Rng r2(2);
  OuNoise n1;
  OuNoise n2;
  double v1 = 0.05;
  double v2 = 0.05;
  const ActionValue a0(0.3);
  const ActionValue lead(0.6);
  const auto multi = multi_step_follower(follow, lead, a0, 1, {0.5, 0.4}, v1, n1, r1);
  const auto single =
      follower_update(a0, follower_gradient(follow, lead.value(), a0.value()), {0.5, 0.4}, v2, n2, r2);
  EXPECT_EQ(multi, single);
  EXPECT_EQ(v1, v2);
}

TEST(MultiStepFollower, ConvergesToClampedArgmax) {
  Rng rng(3);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  std::uniform_real_distribution<double> curv(-2.0, -0.25);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  OuNoise off;
  for (int trial = 0; trial < 200; ++trial) {
    const auto follow = quad(c(rng), c(rng), c(rng), c(rng), curv(rng), c(rng));
    const double a = u(rng);
    const auto& k = follow.coefficients();
    const double argmax = std::clamp(-(k[2] + k[5] * a) / (2.0 * k[4]), 0.0, 1.0);
    double v = 0.0;
    const auto out = multi_step_follower(follow, ActionValue(a), ActionValue(u(rng)), 2000,
                                         {0.5, 0.4}, v, off, rng);
    EXPECT_NEAR(out.value(), argmax, 1e-3);
  }
}

TEST(MultiStepFollower, IncreasingUtilityHitsUpperBound) {
  Rng rng(4);
  OuNoise off;
  double v = 0.0;
  EXPECT_EQ(multi_step_follower(quad(0, 0, 1, 0, 0, 0), ActionValue(0.5), ActionValue(0.1), 50,
                                {0.5, 0.4}, v, off, rng),
            ActionValue(1.0));
}

TEST(BestResponseSample, Examples) {
  Rng rng(5);
  double lo = 1.0;
  double hi = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const double a = best_response_sample(ActionValue(0.5), 1.0, 0.0, rng).value();
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  EXPECT_LT(lo, 0.01);
  EXPECT_GT(hi, 0.99);
  EXPECT_EQ(best_response_sample(ActionValue(0.42), 0.0, 0.0, rng), ActionValue(0.42));
  for (int k = 0; k < 2000; ++k) {
    const double a = best_response_sample(ActionValue(0.95), 0.0, 0.1, rng).value();
    EXPECT_GE(a, 0.85 - 1e-15);
    EXPECT_LE(a, 1.0);
  }
}

TEST(BestResponseSample, NoStoredActionDrawsUniform) {
  Rng rng(6);
  double sum = 0.0;
  for (int k = 0; k < 4000; ++k) sum += best_response_sample(std::nullopt, 0.0, 0.0, rng).value();
  EXPECT_NEAR(sum / 4000, 0.5, 0.03);
}

TEST(SampleRing, EvictsOldest) {
  SampleRing ring(3);
  for (int k = 0; k < 5; ++k) ring.push({double(k), 0, 0, 0});
  ASSERT_EQ(ring.size(), 3u);
  const auto s = ring.samples();
  EXPECT_EQ(s[0].leader_action, 2.0);
  EXPECT_EQ(s[2].leader_action, 4.0);
}

TEST(ExplorationSchedule, LinearDecay) {
  ExplorationSchedule s;
  EXPECT_DOUBLE_EQ(s.epsilon(0, 9), s.epsilon_start);
  EXPECT_DOUBLE_EQ(s.epsilon(8, 9), s.epsilon_end);
  EXPECT_DOUBLE_EQ(s.radius(4, 9), 0.5 * (s.radius_start + s.radius_end));
}

TEST(LearnerConfig, Validation) {
  LearnerConfig c;
  EXPECT_NO_THROW(validate(c));
  c.follower_steps = 0;
  EXPECT_THROW(validate(c), ConfigError);
  c = {};
  c.fitted_jitter = 1.5;
  EXPECT_THROW(validate(c), ConfigError);
}

// --- stacked step -----------------------------------------------------------

TierPlan stack_plan(std::size_t k) {
  std::vector<std::size_t> order(k);
  for (std::size_t i = 0; i < k; ++i) order[i] = i;
  return tier_plan(StackVariant{ObjectiveHierarchy(order), std::vector<double>(k - 1, 0.65), {}});
}

TEST(StackedStep, ZeroGradientsKeepInitialFold) {
  for (auto mode : {CoalitionMode::additive, CoalitionMode::multiplicative}) {
    LearnerConfig lc;
    lc.coalition = mode;
    lc.explore_radius = 0.0;
    MapConfig mc;
    mc.leader_init = 0.3;
    StackelbergAgent agent(maps::SupportGrid(2, 4), stack_plan(3), lc, mc, 1);
    const std::vector<ActionValue> neutral(2, neutral_follower_action(mode));
    const ActionValue expect = coalition_fold(ActionValue(0.3), neutral, mode);
    const std::vector<double> s{0.4, 0.6};
    for (int k = 0; k < 40; ++k) {
      EXPECT_EQ(agent.decide(s, true).action, expect);
      agent.learn({0.0, 0.0, 0.0});
    }
    EXPECT_GT(agent.stats().fits, 0u);
  }
}

TEST(StackedStep, FourObjectivesRunThreeGames) {
  StackelbergAgent agent(maps::SupportGrid(2, 4), stack_plan(4), LearnerConfig{}, MapConfig{}, 2);
  EXPECT_EQ(agent.game_count(), 3u);
  const std::vector<double> s{0.2, 0.9};
  const auto& d = agent.decide(s, true);
  ASSERT_EQ(d.games.size(), 3u);
  EXPECT_EQ(d.games[1].leader, d.games[0].coalition);
  EXPECT_EQ(d.games[2].leader, d.games[1].coalition);
  EXPECT_EQ(d.action, d.games[2].coalition);
}

TEST(StackedStep, TwoTierStackMatchesDs2Agent) {
  LearnerConfig lc;
  lc.coalition = CoalitionMode::multiplicative;
  lc.fitted_jitter = 0.2;
  const Ds2Variant ds2{{0}, {1}, 0.65, std::nullopt};
  StackelbergAgent a(maps::SupportGrid(2, 5), tier_plan(ds2), lc, MapConfig{}, 17);
  StackelbergAgent b(maps::SupportGrid(2, 5), stack_plan(2), lc, MapConfig{}, 17);
  Rng rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    const std::vector<double> s{u(rng), u(rng)};
    ASSERT_EQ(a.decide(s, true).action, b.decide(s, true).action);
    const double x = a.last_decision().action.value();
    const std::vector<double> util{1.0 / (1.0 + std::abs(x - 0.6)), 1.0 / (1.0 + x)};
    a.learn(util);
    b.learn(util);
  }
  EXPECT_EQ(a.leader_map(), b.leader_map());
  EXPECT_EQ(a.follower_map(0), b.follower_map(0));
}

TEST(StackedStep, FittedLeaderClimbsConcaveUtility) {
  LearnerConfig lc;
  lc.alpha = 0.2;
  lc.ridge = 1e-6;
  lc.explore_radius = 0.1;
  MapConfig mc;
  mc.leader_init = 0.1;
  StackelbergAgent agent(maps::SupportGrid(1, 2), stack_plan(2), lc, mc, 3);
  const std::vector<double> s{0.0};
  for (int k = 0; k < 400; ++k) {
    const auto& d = agent.decide(s, true);
    const double x = d.games[0].leader.value();
    agent.learn({1.0 - (x - 0.7) * (x - 0.7), 0.0});
  }
  EXPECT_NEAR(agent.leader_map().cell(0).best_action.value(), 0.7, 0.05);
}

TEST(PolicyStep, ReadsWithoutWriting) {
  StackelbergAgent agent(maps::SupportGrid(2, 4), stack_plan(3), LearnerConfig{}, MapConfig{}, 5);
  const std::vector<double> s{0.5, 0.5};
  for (int k = 0; k < 10; ++k) {
    agent.decide(s, true);
    agent.learn({1.0, 0.5, 0.25});
  }
  const auto leader_before = agent.leader_map();
  const auto follower_before = agent.follower_map(1);
  agent.decide(s, false);
  EXPECT_EQ(agent.leader_map(), leader_before);
  EXPECT_EQ(agent.follower_map(1), follower_before);
}

TEST(VanillaAgent, StoresBestResponse) {
  VanillaAgent agent(maps::SupportGrid(1, 3), VanillaVariant{{1.0}}, MapConfig{},
                     ExplorationSchedule{}, 7);
  agent.begin_episode(0, 1);
  const std::vector<double> s{0.0};
  double best = -1.0;
  for (int k = 0; k < 200; ++k) {
    const double a = agent.decide(s, true).action.value();
    const double u = 1.0 - (a - 0.3) * (a - 0.3);
    best = std::max(best, u);
    agent.learn({u});
  }
  EXPECT_EQ(agent.map().cell(0).best_utility, best);
  EXPECT_NEAR(agent.map().cell(0).best_action.value(), 0.3, 0.05);
}

}  // namespace
}  // namespace sbpg::learn
