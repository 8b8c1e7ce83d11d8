#include "cgfact/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>

#include "cgfact/errors.hpp"
#include "cgfact/inference.hpp"
#include "cgfact/parallel.hpp"

namespace cgfact {

namespace {

constexpr std::size_t kMaxFailureMessages = 8;

std::string group_label(const Layout& layout, std::size_t index) {
  if (layout.kind == Layout::Kind::OneWay) return "g" + std::to_string(index + 1);
  return "a" + std::to_string(index / layout.b + 1) + ":b" + std::to_string(index % layout.b + 1);
}

struct ReplicationOutcome {
  std::optional<std::string> failure;
  Eigen::VectorXd p_hat;
  Eigen::VectorXd se;
  std::vector<bool> covered;
  std::vector<bool> reject_sim;
  std::vector<bool> reject_analytic;
};

ReplicationOutcome run_one(const Scenario& s, std::size_t n, const CopulaSpec& copula,
                           const Contrast& contrast, const Eigen::VectorXd& truth,
                           std::span<const double> alphas, std::uint64_t seed, std::size_t rep,
                           const ReplicationOptions& options) {
  ReplicationOutcome out;
  try {
    const Dataset data = generate_scenario(s, n, stream_seed(seed, rep, 0));
    const EffectsEstimate est = estimate_effects(data, copula, s.tau);
    const CovarianceEstimate cov = jackknife_covariance(data, copula, s.tau);
    out.p_hat = est.p_hat;
    out.se = cov.se;
    for (Eigen::Index i = 0; i < truth.size(); ++i) {
      const Interval ci = confidence_interval(est.p_hat(i), cov.se(i), options.ci_alpha);
      out.covered.push_back(ci.lo <= truth(i) && truth(i) <= ci.hi);
    }

    const Eigen::MatrixXd t = projection_matrix(contrast);
    const FStatistic f = f_statistic(est.p_hat, t, cov.v_asym, data.total_size());
    const auto lambdas = null_eigenvalues(t, cov.v_asym);
    const NullSample null(lambdas, f.trace_tv, options.calibration_reps, stream_seed(seed, rep, 1));
    for (double alpha : alphas) {
      out.reject_sim.push_back(f.f_value > null.critical_value(alpha));
      out.reject_analytic.push_back(f.f_value > critical_value_analytic(lambdas, alpha).critical);
    }
  } catch (const Error& e) {
    out.failure = e.what();
  }
  return out;
}

}  // namespace

Scenario scenario(int id) {
  const std::vector<double> flat3{1.0, 1.0, 1.0};
  const std::vector<double> rising3{1.0, 1.25, 1.5};
  const std::vector<double> falling3{1.25, 1.0, 0.75};
  const std::vector<double> flat6{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  const std::vector<double> rising6{1.0, 1.25, 1.5, 1.0, 1.25, 1.5};
  const std::vector<double> half_rising6{1.0, 1.25, 1.5, 1.0, 1.0, 1.0};

  Scenario s;
  s.id = id;
  switch (id) {
    case 1: s.layout = Layout::one_way(3); s.lambda = flat3; s.mu = flat3; break;
    case 2: s.layout = Layout::one_way(3); s.lambda = flat3; s.mu = rising3; break;
    case 3: s.layout = Layout::one_way(3); s.lambda = rising3; s.mu = flat3; break;
    case 4: s.layout = Layout::one_way(3); s.lambda = rising3; s.mu = rising3; break;
    case 5: s.layout = Layout::one_way(3); s.lambda = falling3; s.mu = flat3; break;
    case 6: s.layout = Layout::one_way(3); s.lambda = falling3; s.mu = rising3; break;
    case 7: s.layout = Layout::two_way(2, 3); s.lambda = flat6; s.mu = flat6; break;
    case 8: s.layout = Layout::two_way(2, 3); s.lambda = rising6; s.mu = flat6; break;
    case 9: s.layout = Layout::two_way(2, 3); s.lambda = half_rising6; s.mu = half_rising6; break;
    default: throw DomainError("unknown scenario " + std::to_string(id) + " (expected 1-9)");
  }
  return s;
}

std::pair<double, double> sample_clayton_pair(double theta, Rng& rng) {
  if (!(theta > 0.0)) throw DomainError("Clayton sampling requires theta > 0");
  const double u = rng.uniform();
  const double w = rng.uniform();
  // v = ((w^(-theta/(1+theta)) - 1) u^-theta + 1)^(-1/theta), in a form that
  // stays accurate as theta -> 0.
  const double a = std::expm1(-theta / (1.0 + theta) * std::log(w));
  const double b = std::exp(-theta * std::log(u));
  const double v = std::exp(-std::log1p(a * b) / theta);
  return {u, v};
}

Dataset generate_scenario(const Scenario& s, std::size_t n_per_group, std::uint64_t seed) {
  if (n_per_group < 3) throw DomainError("scenarios need at least 3 subjects per group");
  std::vector<GroupedSample> groups;
  groups.reserve(s.layout.groups());
  for (std::size_t i = 0; i < s.layout.groups(); ++i) {
    Rng rng(stream_seed(seed, i));
    std::vector<CensoredRecord> records;
    records.reserve(n_per_group);
    for (std::size_t j = 0; j < n_per_group; ++j) {
      const auto [a, b] = sample_clayton_pair(s.theta_true, rng);
      const double t = -std::log(a) / s.lambda[i];
      const double u = std::min(-std::log(b) / s.mu[i], s.tau);
      records.push_back({std::min(t, u), t <= u ? 1 : 0});
    }
    groups.push_back(group_sample(std::move(records), group_label(s.layout, i)));
  }
  return Dataset(std::move(groups), s.layout);
}

Eigen::VectorXd true_effects_oracle(const Scenario& s) {
  const std::size_t d = s.lambda.size();
  Eigen::VectorXd w(static_cast<Eigen::Index>(d * d));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t l = 0; l < d; ++l) {
      const double sum = s.lambda[i] + s.lambda[l];
      const double tail = std::exp(-sum * s.tau);
      w(static_cast<Eigen::Index>(i * d + l)) = s.lambda[l] / sum * (1.0 - tail) + tail / 2.0;
    }
  }
  return aggregation_matrix(d) * w;
}

Contrast designated_contrast(const Scenario& s) {
  if (s.layout.kind == Layout::Kind::OneWay) return one_way_global(s.layout.groups());
  return two_way_contrasts(s.layout.a, s.layout.b).main_a;
}

ReplicationSummary run_replications(const Scenario& s, std::size_t n_per_group, std::size_t reps,
                                    double theta_fit, std::span<const double> alphas,
                                    std::uint64_t seed, const ReplicationOptions& options) {
  if (reps < 100) throw DomainError("run_replications needs at least 100 replications");
  if (options.calibration_reps < 100) throw DomainError("calibration needs R >= 100");
  for (double a : alphas)
    if (!(a > 0.0 && a < 1.0)) throw DomainError("alpha must lie in (0, 1)");

  const CopulaSpec copula = make_copula(CopulaFamily::Clayton, theta_fit);
  const Contrast contrast = designated_contrast(s);
  const Eigen::VectorXd truth = true_effects_oracle(s);

  std::vector<ReplicationOutcome> outcomes(reps);
  parallel_for(reps, [&](std::size_t r) {
    outcomes[r] = run_one(s, n_per_group, copula, contrast, truth, alphas, seed, r, options);
  });

  ReplicationSummary out;
  out.scenario_id = s.id;
  out.n_per_group = n_per_group;
  out.reps_requested = reps;
  out.theta_true = s.theta_true;
  out.theta_fit = theta_fit;
  out.seed = seed;
  out.calibration_reps = options.calibration_reps;
  out.alphas.assign(alphas.begin(), alphas.end());

  const auto d = truth.size();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd sum_se = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd covered = Eigen::VectorXd::Zero(d);
  std::vector<double> rej_sim(alphas.size(), 0.0);
  std::vector<double> rej_an(alphas.size(), 0.0);
  std::set<std::string> seen;
  for (const auto& o : outcomes) {
    if (o.failure) {
      ++out.failures;
      if (seen.insert(*o.failure).second && out.failure_messages.size() < kMaxFailureMessages)
        out.failure_messages.push_back(*o.failure);
      continue;
    }
    ++out.reps_completed;
    sum += o.p_hat;
    sum_se += o.se;
    for (Eigen::Index i = 0; i < d; ++i) covered(i) += o.covered[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
    for (std::size_t k = 0; k < alphas.size(); ++k) {
      rej_sim[k] += o.reject_sim[k] ? 1.0 : 0.0;
      rej_an[k] += o.reject_analytic[k] ? 1.0 : 0.0;
    }
  }
  if (out.reps_completed == 0) throw NumericError("every replication failed");

  const double m = static_cast<double>(out.reps_completed);
  const Eigen::VectorXd mean = sum / m;
  Eigen::VectorXd ss = Eigen::VectorXd::Zero(d);
  for (const auto& o : outcomes)
    if (!o.failure) ss += (o.p_hat - mean).cwiseAbs2();

  for (Eigen::Index i = 0; i < d; ++i) {
    EffectSummary e;
    e.truth = truth(i);
    e.mean = mean(i);
    e.bias = mean(i) - truth(i);
    e.sd = m > 1.0 ? std::sqrt(ss(i) / (m - 1.0)) : 0.0;
    e.mean_se = sum_se(i) / m;
    e.coverage = covered(i) / m;
    out.effects.push_back(e);
  }
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    out.rejection_sim.push_back(rej_sim[k] / m);
    out.rejection_analytic.push_back(rej_an[k] / m);
  }
  return out;
}

std::vector<ReplicationSummary> misspecification_sweep(const Scenario& s, std::size_t n_per_group,
                                                       std::span<const double> theta_fits,
                                                       std::size_t reps, std::uint64_t seed,
                                                       std::span<const double> alphas,
                                                       const ReplicationOptions& options) {
  std::vector<ReplicationSummary> out;
  out.reserve(theta_fits.size());
  for (double theta : theta_fits)
    out.push_back(run_replications(s, n_per_group, reps, theta, alphas, seed, options));
  return out;
}

}  // namespace cgfact
