#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cgfact/contrasts.hpp"
#include "cgfact/effects.hpp"
#include "cgfact/rng.hpp"

namespace cgfact {

// Exponential event and censoring margins coupled by a Clayton survival
// copula, with censoring truncated at the administrative follow-up end tau.
struct Scenario {
  int id = 0;
  Layout layout;
  std::vector<double> lambda;  // event hazards
  std::vector<double> mu;      // censoring hazards
  double theta_true = 2.0;
  double tau = 1.0;
};

// The nine reference scenarios: 1-6 one-way with three groups, 7-9 two-way 2 x 3.
// Throws DomainError for an unknown id.
Scenario scenario(int id);

// Conditional-inversion draw (u, v) from the Clayton(theta) copula.
std::pair<double, double> sample_clayton_pair(double theta, Rng& rng);

// n subjects per group. Each group uses its own RNG stream derived from seed.
Dataset generate_scenario(const Scenario& s, std::size_t n_per_group, std::uint64_t seed);

// Population effects under exponential margins,
//   w_il = lambda_l/(lambda_i+lambda_l) (1 - e^-(lambda_i+lambda_l)tau) + e^-(lambda_i+lambda_l)tau / 2,
// aggregated by A. Independent of censoring.
Eigen::VectorXd true_effects_oracle(const Scenario& s);

// Global equality for one-way scenarios, main effect of factor A for two-way ones.
Contrast designated_contrast(const Scenario& s);

struct EffectSummary {
  double truth = 0.0;
  double mean = 0.0;
  double bias = 0.0;
  double sd = 0.0;
  double mean_se = 0.0;
  double coverage = 0.0;
};

struct ReplicationOptions {
  std::size_t calibration_reps = 1000;
  double ci_alpha = 0.05;
};

struct ReplicationSummary {
  int scenario_id = 0;
  std::size_t n_per_group = 0;
  std::size_t reps_requested = 0;
  std::size_t reps_completed = 0;
  std::size_t failures = 0;
  std::vector<std::string> failure_messages;  // distinct messages, capped
  double theta_true = 0.0;
  double theta_fit = 0.0;
  std::uint64_t seed = 0;
  std::size_t calibration_reps = 0;
  std::vector<EffectSummary> effects;
  std::vector<double> alphas;
  std::vector<double> rejection_sim;
  std::vector<double> rejection_analytic;
};

// Replication r draws its data from stream (seed, r), so runs with the same
// seed and a different theta_fit see identical datasets.
ReplicationSummary run_replications(const Scenario& s, std::size_t n_per_group, std::size_t reps,
                                    double theta_fit, std::span<const double> alphas,
                                    std::uint64_t seed, const ReplicationOptions& options = {});

std::vector<ReplicationSummary> misspecification_sweep(const Scenario& s, std::size_t n_per_group,
                                                       std::span<const double> theta_fits,
                                                       std::size_t reps, std::uint64_t seed,
                                                       std::span<const double> alphas,
                                                       const ReplicationOptions& options = {});

}  // namespace cgfact
