#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cgfact/effects.hpp"
#include "cgfact/errors.hpp"
#include "oracles.hpp"

using namespace cgfact;
namespace oracle = cgfact::testing;

namespace {

GroupedSample make(std::vector<CensoredRecord> recs, std::string label = "g") {
  return group_sample(std::move(recs), std::move(label));
}

GroupedSample uncensored(const std::vector<double>& times, std::string label) {
  std::vector<CensoredRecord> recs;
  for (double t : times) recs.push_back({t, 1});
  return make(std::move(recs), std::move(label));
}

}  // namespace

TEST(PairwiseEffect, WorkedExamples) {
  const auto s1 = km_survival(uncensored({1, 3}, "a"));
  const auto s2 = km_survival(uncensored({2, 4}, "b"));
  EXPECT_NEAR(pairwise_effect(s1, s2, 5.0), 0.25, 1e-15);
  EXPECT_NEAR(pairwise_effect(s2, s1, 5.0), 0.75, 1e-15);
  EXPECT_NEAR(pairwise_effect(s1, s2, 2.5), 0.375, 1e-15);
  EXPECT_NEAR(pairwise_effect(s1, s1, 5.0), 0.5, 1e-15);
}

TEST(PairwiseEffect, Errors) {
  const auto open = km_survival(make({{1, 1}, {2, 0}}));
  const auto closed = km_survival(uncensored({1, 3}, "a"));
  EXPECT_THROW(pairwise_effect(open, closed, 3.0), TauValidityError);
  EXPECT_THROW(pairwise_effect(closed, open, 3.0), TauValidityError);
  EXPECT_THROW(pairwise_effect(closed, closed, 0.0), DomainError);
}

TEST(PairwiseEffect, TiesAtTauCountAsHalf) {
  const auto s1 = km_survival(uncensored({1, 2, 3}, "a"));
  const auto s2 = km_survival(uncensored({2, 2, 5}, "b"));
  for (double tau : {1.0, 1.5, 2.0, 2.5, 3.0, 4.0}) {
    EXPECT_NEAR(pairwise_effect(s1, s2, tau), oracle::brute_force_mann_whitney({1, 2, 3}, {2, 2, 5}, tau),
                1e-12)
        << tau;
  }
}

TEST(PairwiseEffectProperty, UncensoredEqualsPairCounting) {
  std::mt19937_64 gen(23);
  for (int rep = 0; rep < 200; ++rep) {
    const bool ties = rep % 2 == 0;
    const auto gi = make(oracle::random_records(gen, 3 + rep % 25, 0.0, ties), "i");
    const auto gl = make(oracle::random_records(gen, 3 + rep % 17, 0.0, ties), "l");
    const auto si = km_survival(gi);
    const auto sl = km_survival(gl);
    const double tau = std::min(gi.max_time(), gl.max_time()) * (rep % 3 == 0 ? 0.6 : 1.0);
    const double expected =
        oracle::brute_force_mann_whitney(oracle::event_times(gi), oracle::event_times(gl), tau);
    EXPECT_NEAR(pairwise_effect(si, sl, tau), expected, 1e-12);
  }
}

TEST(PairwiseEffectProperty, AntisymmetryOnCensoredData) {
  std::mt19937_64 gen(29);
  const auto copula = make_copula(CopulaFamily::Clayton, 2.0);
  for (int rep = 0; rep < 100; ++rep) {
    const auto gi = make(oracle::random_records(gen, 5 + rep % 30, 0.3, rep % 4 == 0), "i");
    const auto gl = make(oracle::random_records(gen, 5 + rep % 20, 0.3, rep % 4 == 0), "l");
    const auto si = cg_survival(gi, copula);
    const auto sl = cg_survival(gl, copula);
    const double tau = std::min(gi.max_time(), gl.max_time());
    EXPECT_NEAR(pairwise_effect(si, sl, tau) + pairwise_effect(sl, si, tau), 1.0, 1e-12);
    EXPECT_NEAR(pairwise_effect(si, si, tau), 0.5, 1e-12);
  }
}

TEST(AggregationMatrix, Shape) {
  const auto a = aggregation_matrix(2);
  Eigen::MatrixXd expected(2, 4);
  expected << 0.5, 0.5, 0, 0, 0, 0, 0.5, 0.5;
  EXPECT_TRUE(a.isApprox(expected));
  const auto a3 = aggregation_matrix(3);
  EXPECT_EQ(a3.rows(), 3);
  EXPECT_EQ(a3.cols(), 9);
  EXPECT_NEAR(a3.sum(), 3.0, 1e-15);
}

TEST(RelativeEffects, FromW) {
  Eigen::VectorXd w(4);
  w << 0.5, 0.25, 0.75, 0.5;
  const auto p = relative_effects(w, 2);
  EXPECT_NEAR(p(0), 0.375, 1e-15);
  EXPECT_NEAR(p(1), 0.625, 1e-15);
  EXPECT_THROW(relative_effects(w, 3), ValidationError);
}

TEST(Dataset, Validation) {
  auto g = [](std::string l) { return make({{1, 1}, {2, 0}, {3, 1}}, std::move(l)); };
  EXPECT_THROW(Dataset({g("a")}, Layout::one_way(1)), ValidationError);
  EXPECT_THROW(Dataset({g("a"), g("a")}, Layout::one_way(2)), ValidationError);
  EXPECT_THROW(Dataset({g("a"), g("b")}, Layout::one_way(3)), ValidationError);
  EXPECT_THROW(Dataset({g("a"), g("b"), g("c")}, Layout::two_way(3, 1)), ValidationError);
  const Dataset ok({g("a"), g("b")}, Layout::one_way(2));
  EXPECT_EQ(ok.total_size(), 6u);
  EXPECT_EQ(ok.group_count(), 2u);
}

TEST(ResolveTau, Policies) {
  const Dataset data({make({{1, 1}, {4, 0}, {6, 0}}, "a"), make({{2, 1}, {3, 1}, {5, 0}}, "b")},
                     Layout::one_way(2));
  EXPECT_EQ(resolve_tau(data), 5.0);
  EXPECT_EQ(resolve_tau(data, TauPolicy::CommonSupport), 5.0);
  EXPECT_EQ(resolve_tau(data, TauPolicy::LeaveOneOutSafe), 3.0);
}

TEST(EstimateEffects, TwoGroupExample) {
  const Dataset data({uncensored({1, 3}, "a"), uncensored({2, 4}, "b")}, Layout::one_way(2));
  const auto est = estimate_effects(data, CopulaSpec{}, 5.0);
  EXPECT_NEAR(est.w(0, 1), 0.25, 1e-15);
  EXPECT_NEAR(est.p_hat(0), 0.375, 1e-15);
  EXPECT_NEAR(est.p_hat(1), 0.625, 1e-15);
  EXPECT_EQ(est.tau_used, 5.0);
  // Default tau: min over groups of the largest time.
  EXPECT_EQ(estimate_effects(data, CopulaSpec{}).tau_used, 3.0);
  EXPECT_THROW(estimate_effects(data, make_copula(CopulaFamily::FGM, 0.2), 3.0), NonArchimedeanError);
}

TEST(EstimateEffectsProperty, Invariants) {
  std::mt19937_64 gen(31);
  const std::vector<CopulaSpec> specs{CopulaSpec{}, make_copula(CopulaFamily::Clayton, 3.0),
                                      make_copula(CopulaFamily::Frank, -2.0),
                                      make_copula(CopulaFamily::Gumbel, 1.0)};
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t d = 2 + static_cast<std::size_t>(rep % 5);
    const auto data = oracle::random_dataset(gen, d, 4, 30, 0.3, rep % 3 == 0);
    const auto& copula = specs[static_cast<std::size_t>(rep) % specs.size()];
    const auto est = estimate_effects(data, copula);
    EXPECT_NEAR(est.p_hat.sum(), static_cast<double>(d) / 2.0, 1e-12);
    for (std::size_t i = 0; i < d; ++i) {
      EXPECT_EQ(est.w(i, i), 0.5);
      EXPECT_GE(est.p_hat(static_cast<Eigen::Index>(i)), 0.0);
      EXPECT_LE(est.p_hat(static_cast<Eigen::Index>(i)), 1.0);
      for (std::size_t l = 0; l < d; ++l) EXPECT_NEAR(est.w(i, l) + est.w(l, i), 1.0, 1e-12);
    }
  }
}

TEST(EstimateEffectsProperty, ConvergesToExponentialOracle) {
  // Large uncensored exponential samples: p_hat should be close to the
  // population effects.
  std::mt19937_64 gen(37);
  const std::vector<double> rates{1.0, 1.5, 0.7};
  const double tau = 1.2;
  std::vector<GroupedSample> groups;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    std::exponential_distribution<double> expo(rates[i]);
    std::vector<CensoredRecord> recs;
    for (int j = 0; j < 4000; ++j) recs.push_back({expo(gen), 1});
    groups.push_back(make(std::move(recs), "g" + std::to_string(i)));
  }
  const Dataset data(std::move(groups), Layout::one_way(3));
  const auto est = estimate_effects(data, CopulaSpec{}, tau);
  for (std::size_t i = 0; i < 3; ++i) {
    double p = 0.0;
    for (std::size_t l = 0; l < 3; ++l) p += oracle::exponential_pairwise(rates[i], rates[l], tau) / 3.0;
    EXPECT_NEAR(est.p_hat(static_cast<Eigen::Index>(i)), p, 0.015) << i;
  }
}
