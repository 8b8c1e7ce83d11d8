#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "cgfact/copulas.hpp"
#include "cgfact/errors.hpp"

using namespace cgfact;

namespace {

std::vector<double> unit_grid() {
  // 100 points spread log-uniformly over (1e-6, 1].
  std::vector<double> g;
  for (int k = 0; k < 100; ++k) g.push_back(std::pow(10.0, -6.0 + 6.0 * k / 99.0));
  return g;
}

std::vector<CopulaSpec> archimedean_specs() {
  return {
      CopulaSpec{},
      make_copula(CopulaFamily::Clayton, 0.5),
      make_copula(CopulaFamily::Clayton, 2.0),
      make_copula(CopulaFamily::Clayton, 8.0),
      make_copula(CopulaFamily::Gumbel, 0.5),
      make_copula(CopulaFamily::Gumbel, 1.0),
      make_copula(CopulaFamily::Gumbel, 4.0),
      make_copula(CopulaFamily::Frank, -5.0),
      make_copula(CopulaFamily::Frank, 3.0),
      make_copula(CopulaFamily::Frank, 12.0),
  };
}

}  // namespace

TEST(MakeCopula, ClaytonTauOneHalf) {
  const auto c = make_copula(CopulaFamily::Clayton, 2.0);
  EXPECT_EQ(c.family(), CopulaFamily::Clayton);
  EXPECT_DOUBLE_EQ(c.kendalls_tau(), 0.5);
}

TEST(MakeCopula, RejectsOutOfRangeTheta) {
  EXPECT_THROW(make_copula(CopulaFamily::Clayton, -1.0), DomainError);
  EXPECT_THROW(make_copula(CopulaFamily::Gumbel, -0.5), DomainError);
  EXPECT_THROW(make_copula(CopulaFamily::FGM, 1.5), DomainError);
  EXPECT_THROW(make_copula(CopulaFamily::Frank, std::numeric_limits<double>::infinity()), DomainError);
  EXPECT_THROW(make_copula(CopulaFamily::Clayton, std::nan("")), DomainError);
}

TEST(MakeCopula, ZeroThetaNormalisesToIndependence) {
  EXPECT_EQ(make_copula(CopulaFamily::Gumbel, 0.0).family(), CopulaFamily::Independence);
  EXPECT_EQ(make_copula(CopulaFamily::Clayton, 0.0).family(), CopulaFamily::Independence);
  EXPECT_EQ(make_copula(CopulaFamily::Frank, 1e-13).family(), CopulaFamily::Independence);
  EXPECT_EQ(make_copula(CopulaFamily::Frank, -1e-13).family(), CopulaFamily::Independence);
  // FGM keeps its tag at zero.
  EXPECT_EQ(make_copula(CopulaFamily::FGM, 0.0).family(), CopulaFamily::FGM);
}

TEST(Generator, ReferenceValues) {
  EXPECT_DOUBLE_EQ(make_copula(CopulaFamily::Clayton, 2.0).generator(0.5), 1.5);
  EXPECT_NEAR(make_copula(CopulaFamily::Gumbel, 1.0).generator(std::exp(-1.0)), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(CopulaSpec{}.generator(0.25), -std::log(0.25));
  for (const auto& c : archimedean_specs()) EXPECT_EQ(c.generator(1.0), 0.0) << c.describe();
}

TEST(Generator, DomainErrors) {
  const auto c = make_copula(CopulaFamily::Clayton, 2.0);
  EXPECT_THROW(c.generator(0.0), DomainError);
  EXPECT_THROW(c.generator(-0.1), DomainError);
  EXPECT_THROW(c.generator(1.0001), DomainError);
  EXPECT_THROW(c.generator_inverse(-1.0), DomainError);
  const auto fgm = make_copula(CopulaFamily::FGM, 0.5);
  EXPECT_THROW(fgm.generator(0.5), NonArchimedeanError);
  EXPECT_THROW(fgm.generator_inverse(0.5), NonArchimedeanError);
}

TEST(GeneratorInverse, ReferenceValues) {
  EXPECT_DOUBLE_EQ(make_copula(CopulaFamily::Clayton, 2.0).generator_inverse(1.5), 0.5);
  for (const auto& c : archimedean_specs()) {
    EXPECT_EQ(c.generator_inverse(0.0), 1.0) << c.describe();
    EXPECT_EQ(c.generator_inverse(std::numeric_limits<double>::infinity()), 0.0) << c.describe();
  }
  const auto frank = make_copula(CopulaFamily::Frank, 3.0);
  EXPECT_NEAR(frank.generator_inverse(frank.generator(0.4)), 0.4, 1e-10);
}

TEST(GeneratorProperty, RoundTripOnGrid) {
  for (const auto& c : archimedean_specs())
    for (double t : unit_grid())
      EXPECT_NEAR(c.generator_inverse(c.generator(t)), t, 1e-10) << c.describe() << " t=" << t;
}

TEST(GeneratorProperty, StrictlyDecreasingAndInverseNonincreasing) {
  const auto grid = unit_grid();
  for (const auto& c : archimedean_specs()) {
    for (std::size_t k = 1; k < grid.size(); ++k)
      EXPECT_GT(c.generator(grid[k - 1]), c.generator(grid[k])) << c.describe();
    double prev = 1.0;
    for (double s = 0.0; s < 50.0; s += 0.37) {
      const double v = c.generator_inverse(s);
      EXPECT_LE(v, prev) << c.describe();
      prev = v;
    }
  }
}

TEST(GeneratorProperty, LargeValuesNearZero) {
  EXPECT_GT(make_copula(CopulaFamily::Clayton, 2.0).generator(1e-12), 1e23);
  EXPECT_EQ(make_copula(CopulaFamily::Clayton, 400.0).generator(1e-3),
            std::numeric_limits<double>::infinity());
}

TEST(GeneratorProperty, ContinuityTowardIndependence) {
  const auto frank_pos = make_copula(CopulaFamily::Frank, 1e-8);
  const auto frank_neg = make_copula(CopulaFamily::Frank, -1e-8);
  const auto clayton = make_copula(CopulaFamily::Clayton, 1e-8);
  ASSERT_EQ(frank_pos.family(), CopulaFamily::Frank);
  ASSERT_EQ(clayton.family(), CopulaFamily::Clayton);
  for (double t : unit_grid()) {
    EXPECT_NEAR(frank_pos.generator(t), -std::log(t), 1e-6) << t;
    EXPECT_NEAR(frank_neg.generator(t), -std::log(t), 1e-6) << t;
    EXPECT_NEAR(clayton.generator(t), -std::log(t), 1e-6) << t;
  }
}

TEST(KendallsTau, ReferenceMaps) {
  EXPECT_DOUBLE_EQ(make_copula(CopulaFamily::Clayton, 2.0).kendalls_tau(), 0.5);
  EXPECT_DOUBLE_EQ(make_copula(CopulaFamily::Gumbel, 1.0).kendalls_tau(), 0.5);
  EXPECT_DOUBLE_EQ(make_copula(CopulaFamily::FGM, 1.0).kendalls_tau(), 2.0 / 9.0);
  EXPECT_EQ(CopulaSpec{}.kendalls_tau(), 0.0);
}

TEST(KendallsTau, FrankMatchesSeriesForDebyeIntegral) {
  // D1(x) = 1 - x/4 + x^2/36 - x^4/3600 + ... for small x; independent check
  // of the quadrature at theta = 0.5.
  const double x = 0.5;
  const double debye = 1.0 - x / 4.0 + x * x / 36.0 - std::pow(x, 4) / 3600.0 +
                       std::pow(x, 6) / 211680.0 - std::pow(x, 8) / 10886400.0;
  const double tau = 1.0 - 4.0 / x * (1.0 - debye);
  EXPECT_NEAR(frank_kendalls_tau(x), tau, 1e-10);
  // Odd in theta.
  EXPECT_NEAR(frank_kendalls_tau(-4.0), -frank_kendalls_tau(4.0), 1e-12);
}

TEST(ThetaFromTau, AlgebraicInverses) {
  EXPECT_DOUBLE_EQ(theta_from_tau(CopulaFamily::Clayton, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(theta_from_tau(CopulaFamily::Gumbel, 0.8), 4.0);
  EXPECT_DOUBLE_EQ(theta_from_tau(CopulaFamily::FGM, 2.0 / 9.0), 1.0);
}

TEST(ThetaFromTau, FrankRootFind) {
  // Root of the Debye-integral tau map, computed independently with
  // scipy.optimize.brentq over scipy.integrate.quad: 5.736282707019971.
  EXPECT_NEAR(theta_from_tau(CopulaFamily::Frank, 0.5), 5.736282707019971, 1e-7);
  EXPECT_NEAR(theta_from_tau(CopulaFamily::Frank, -0.5), -5.736282707019971, 1e-7);
}

TEST(ThetaFromTau, UnattainableTau) {
  EXPECT_THROW(theta_from_tau(CopulaFamily::Clayton, 1.0), DomainError);
  EXPECT_THROW(theta_from_tau(CopulaFamily::Clayton, -0.1), DomainError);
  EXPECT_THROW(theta_from_tau(CopulaFamily::Gumbel, -0.1), DomainError);
  EXPECT_THROW(theta_from_tau(CopulaFamily::FGM, 0.3), DomainError);
  EXPECT_THROW(theta_from_tau(CopulaFamily::Frank, 1.0), DomainError);
  EXPECT_THROW(theta_from_tau(CopulaFamily::Independence, 0.2), DomainError);
}

TEST(ThetaFromTauProperty, RoundTripOnParameterGrid) {
  for (double theta : {0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 20.0}) {
    for (auto fam : {CopulaFamily::Clayton, CopulaFamily::Gumbel, CopulaFamily::Frank}) {
      const double tau = make_copula(fam, theta).kendalls_tau();
      const double back = theta_from_tau(fam, tau);
      EXPECT_NEAR(make_copula(fam, back).kendalls_tau(), tau, 1e-8) << to_string(fam) << " " << theta;
      EXPECT_NEAR(back, theta, 1e-6 * std::max(1.0, theta)) << to_string(fam) << " " << theta;
    }
  }
  for (double theta : {-20.0, -3.0, -0.2}) {
    const double tau = make_copula(CopulaFamily::Frank, theta).kendalls_tau();
    EXPECT_NEAR(theta_from_tau(CopulaFamily::Frank, tau), theta, 1e-6 * std::abs(theta));
  }
}

TEST(ParseFamily, Names) {
  EXPECT_EQ(parse_copula_family("Clayton"), CopulaFamily::Clayton);
  EXPECT_EQ(parse_copula_family("fgm"), CopulaFamily::FGM);
  EXPECT_THROW(parse_copula_family("joe"), DomainError);
}
