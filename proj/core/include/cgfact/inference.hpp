#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cgfact/contrasts.hpp"
#include "cgfact/copulas.hpp"
#include "cgfact/effects.hpp"

namespace cgfact {

struct CovarianceEstimate {
  Eigen::MatrixXd v_phat;  // covariance of p_hat
  Eigen::MatrixXd v_asym;  // N * v_phat, covariance of sqrt(N)(p_hat - p)
  Eigen::VectorXd se;      // sqrt(diag(v_phat))
};

// Pooled delete-one jackknife over all N subjects:
//   V = N/(N-1) sum_ij (p^(-ij) - p^(.)) (p^(-ij) - p^(.))'.
// Each replicate refits the curve of the affected group and recomputes every
// pairwise effect that touches it. Requires n_i >= 3 in every group; throws
// TauValidityError naming the subject if a replicate's curve is undefined at tau.
CovarianceEstimate jackknife_covariance(const Dataset& data, const CopulaSpec& copula, double tau);

// The leave-one-out estimates themselves, one row per subject in group order.
Eigen::MatrixXd jackknife_replicates(const Dataset& data, const CopulaSpec& copula, double tau);

// Covariance from an N x d matrix of leave-one-out replicates.
CovarianceEstimate covariance_from_replicates(const Eigen::MatrixXd& replicates);

enum class CiScale { Plain, Logit };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Upper alpha point of the standard normal.
double normal_upper_quantile(double alpha);

// Plain: p +- z_{alpha/2} se. Logit: delta-method interval on logit(p) mapped
// back to (0, 1). Throws DomainError for p in {0, 1} on the logit scale.
Interval confidence_interval(double p, double se, double alpha, CiScale scale = CiScale::Plain);

std::vector<Interval> confidence_intervals(const EffectsEstimate& est, const CovarianceEstimate& cov,
                                           double alpha, CiScale scale = CiScale::Plain);

inline constexpr double kDefaultRankTolerance = 1e-12;

// Moore-Penrose inverse via SVD; singular values below rel_tol * largest are zeroed.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, double rel_tol = kDefaultRankTolerance);

// T = C'(CC')^+ C.
Eigen::MatrixXd projection_matrix(const Contrast& contrast, double rel_tol = kDefaultRankTolerance);

struct FStatistic {
  double f_value = 0.0;
  double trace_tv = 0.0;
};

// F = N p'Tp / tr(T V). Throws DegenerateError if tr(TV) is not positive.
FStatistic f_statistic(const Eigen::VectorXd& p_hat, const Eigen::MatrixXd& t,
                       const Eigen::MatrixXd& v_asym, std::size_t total_n);

// Eigenvalues of V^1/2 T V^1/2 (same nonzero spectrum as TV), ascending,
// with values below 1e-12 * max clamped to zero. Throws NumericError if V
// has a negative eigenvalue beyond rounding.
std::vector<double> null_eigenvalues(const Eigen::MatrixXd& t, const Eigen::MatrixXd& v_asym);

// Draws from sum_i lambda_i chi2_i(1) / trace, sorted ascending.
class NullSample {
 public:
  NullSample(std::span<const double> lambdas, double trace, std::size_t reps, std::uint64_t seed);

  // Empirical upper-alpha point: the smallest draw whose empirical CDF
  // reaches 1 - alpha.
  double critical_value(double alpha) const;
  // (1 + #{draws >= f}) / (R + 1).
  double p_value(double f) const;
  double mean() const;
  std::span<const double> draws() const noexcept { return draws_; }

 private:
  std::vector<double> draws_;
};

struct SimulationCalibration {
  double critical = 0.0;
  NullSample sample;

  double p_value(double f) const { return sample.p_value(f); }
};

// Throws DomainError for R < 100 or alpha outside (0,1), DegenerateError if
// every lambda is zero.
SimulationCalibration critical_value_simulation(std::span<const double> lambdas, double trace,
                                                double alpha, std::size_t reps, std::uint64_t seed);

struct AnalyticCalibration {
  double critical = 0.0;
  double f_hat = 0.0;  // Box degrees of freedom tr^2(TV) / tr(TVTV)

  // Upper tail of chi2(f_hat) at f * f_hat.
  double p_value(double f) const;
};

// Two-moment approximation c chi2(f): critical value chi2_{1-alpha}(f_hat) / f_hat.
AnalyticCalibration critical_value_analytic(const Eigen::MatrixXd& t, const Eigen::MatrixXd& v_asym,
                                            double alpha);

// Same, from a precomputed spectrum of TV.
AnalyticCalibration critical_value_analytic(std::span<const double> lambdas, double alpha);

enum class CalibrationMethod { Simulation, Analytic, Both };

inline bool uses_simulation(CalibrationMethod m) { return m != CalibrationMethod::Analytic; }
inline bool uses_analytic(CalibrationMethod m) { return m != CalibrationMethod::Simulation; }

struct TestOptions {
  double alpha = 0.05;
  CalibrationMethod method = CalibrationMethod::Both;
  std::size_t reps = 1000;
  std::uint64_t seed = 20240101;
};

struct TestResult {
  double f_value = 0.0;
  double trace_tv = 0.0;
  std::vector<double> eigenvalues;
  std::optional<double> crit_sim;
  std::optional<double> p_sim;
  std::optional<double> crit_analytic;
  std::optional<double> p_analytic;
  std::optional<double> f_hat_dof;
  bool reject_sim = false;
  bool reject_analytic = false;
  // The contrast is identically zero, so there is nothing to test.
  bool vacuous = false;
  double alpha = 0.05;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
};

// Test of H0: C p = 0 from an estimate and its covariance.
TestResult test_hypothesis(const Eigen::VectorXd& p_hat, const CovarianceEstimate& cov,
                           const Contrast& contrast, std::size_t total_n, const TestOptions& options);

// Effects, jackknife, projection, F and the requested calibrations.
TestResult run_test(const Dataset& data, const CopulaSpec& copula, double tau,
                    const Contrast& contrast, const TestOptions& options);

}  // namespace cgfact
