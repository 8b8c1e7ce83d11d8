#include "cgfact/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "cgfact/errors.hpp"
#include "cgfact/parallel.hpp"
#include "cgfact/rng.hpp"

namespace cgfact {

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
}

struct SubjectIndex {
  std::size_t group;
  std::size_t record;
};

std::vector<SubjectIndex> flatten_subjects(const Dataset& data) {
  std::vector<SubjectIndex> out;
  out.reserve(data.total_size());
  for (std::size_t i = 0; i < data.group_count(); ++i)
    for (std::size_t j = 0; j < data.group(i).size(); ++j) out.push_back({i, j});
  return out;
}

}  // namespace

Eigen::MatrixXd jackknife_replicates(const Dataset& data, const CopulaSpec& copula, double tau) {
  for (const auto& g : data.groups())
    if (g.size() < 3)
      throw InsufficientSampleError("the jackknife needs at least 3 subjects per group; group '" +
                                    g.label() + "' has " + std::to_string(g.size()));
  if (!(tau > 0.0)) throw DomainError("follow-up end tau must be positive");

  const std::size_t d = data.group_count();
  const auto curves = fit_curves(data, copula);
  const Eigen::VectorXd w_full = pairwise_effects(curves, tau);
  const auto subjects = flatten_subjects(data);

  Eigen::MatrixXd reps(static_cast<Eigen::Index>(subjects.size()), static_cast<Eigen::Index>(d));
  parallel_for(subjects.size(), [&](std::size_t k) {
    const auto [i, j] = subjects[k];
    const GroupedSample& group = data.group(i);
    const StepSurvival reduced = cg_survival(group.without(j), copula);
    if (!reduced.defined_at(tau)) {
      std::ostringstream os;
      os << "leave-one-out replicate without subject " << j << " (time " << group.records()[j].time
         << ") of group '" << group.label() << "' is not identified at tau = " << tau
         << "; choose a smaller tau";
      throw TauValidityError(os.str());
    }
    Eigen::VectorXd w = w_full;
    for (std::size_t l = 0; l < d; ++l) {
      if (l == i) continue;
      // Keep the orientation used for the full-data estimate: compute the
      // upper-triangle entry and fill its complement.
      const std::size_t lo = std::min(i, l);
      const std::size_t hi = std::max(i, l);
      const StepSurvival& c_lo = lo == i ? reduced : curves[lo];
      const StepSurvival& c_hi = hi == i ? reduced : curves[hi];
      const double v = pairwise_effect(c_lo, c_hi, tau);
      w(static_cast<Eigen::Index>(lo * d + hi)) = v;
      w(static_cast<Eigen::Index>(hi * d + lo)) = 1.0 - v;
    }
    reps.row(static_cast<Eigen::Index>(k)) = relative_effects(w, d).transpose();
  });
  return reps;
}

CovarianceEstimate covariance_from_replicates(const Eigen::MatrixXd& replicates) {
  const Eigen::Index n = replicates.rows();
  const Eigen::Index d = replicates.cols();
  if (n < 2) throw InsufficientSampleError("covariance needs at least two replicates");
  const double dn = static_cast<double>(n);
  const Eigen::RowVectorXd mean = replicates.colwise().sum() / dn;
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::RowVectorXd dev = replicates.row(k) - mean;
    v.noalias() += dev.transpose() * dev;
  }
  v *= dn / (dn - 1.0);

  CovarianceEstimate out;
  out.v_phat = v;
  out.v_asym = dn * v;
  out.se = v.diagonal().cwiseMax(0.0).cwiseSqrt();
  return out;
}

CovarianceEstimate jackknife_covariance(const Dataset& data, const CopulaSpec& copula, double tau) {
  return covariance_from_replicates(jackknife_replicates(data, copula, tau));
}

double normal_upper_quantile(double alpha) {
  require_alpha(alpha);
  return boost::math::quantile(boost::math::complement(boost::math::normal_distribution<>(), alpha));
}

Interval confidence_interval(double p, double se, double alpha, CiScale scale) {
  require_alpha(alpha);
  if (se < 0.0 || std::isnan(se)) throw DomainError("standard error must be nonnegative");
  const double z = normal_upper_quantile(alpha / 2.0);
  if (scale == CiScale::Plain) return {p - z * se, p + z * se};
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("logit interval is undefined for an estimate of exactly 0 or 1");
  const double centre = std::log(p / (1.0 - p));
  const double half = z * se / (p * (1.0 - p));
  auto expit = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  return {expit(centre - half), expit(centre + half)};
}

std::vector<Interval> confidence_intervals(const EffectsEstimate& est, const CovarianceEstimate& cov,
                                           double alpha, CiScale scale) {
  std::vector<Interval> out;
  for (Eigen::Index i = 0; i < est.p_hat.size(); ++i)
    out.push_back(confidence_interval(est.p_hat(i), cov.se(i), alpha, scale));
  return out;
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.size() == 0) return Eigen::MatrixXd::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = rel_tol * (s.size() > 0 ? s(0) : 0.0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > cutoff && s(k) > 0.0) inv(k) = 1.0 / s(k);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Eigen::MatrixXd projection_matrix(const Contrast& contrast, double rel_tol) {
  const Eigen::MatrixXd& c = contrast.matrix;
  return c.transpose() * pseudo_inverse(c * c.transpose(), rel_tol) * c;
}

FStatistic f_statistic(const Eigen::VectorXd& p_hat, const Eigen::MatrixXd& t,
                       const Eigen::MatrixXd& v_asym, std::size_t total_n) {
  const double trace = (t * v_asym).trace();
  const double scale = std::max(1.0, v_asym.cwiseAbs().maxCoeff());
  if (!(trace > 1e-14 * scale))
    throw DegenerateError("tr(T V) is not positive; the hypothesis cannot be tested from this data");
  const double quad = p_hat.dot(t * p_hat);
  return {static_cast<double>(total_n) * quad / trace, trace};
}

std::vector<double> null_eigenvalues(const Eigen::MatrixXd& t, const Eigen::MatrixXd& v_asym) {
  const Eigen::MatrixXd v_sym = 0.5 * (v_asym + v_asym.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ev(v_sym);
  Eigen::VectorXd d = ev.eigenvalues();
  const double largest = d.cwiseAbs().maxCoeff();
  if (d.minCoeff() < -1e-10 * std::max(largest, 1e-300))
    throw NumericError("covariance matrix is not positive semidefinite");
  d = d.cwiseMax(0.0);
  const Eigen::MatrixXd root = ev.eigenvectors() * d.cwiseSqrt().asDiagonal() * ev.eigenvectors().transpose();
  const Eigen::MatrixXd t_sym = 0.5 * (t + t.transpose());
  const Eigen::MatrixXd m = root * t_sym * root;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> mev(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  std::vector<double> out(mev.eigenvalues().data(), mev.eigenvalues().data() + mev.eigenvalues().size());
  const double top = out.empty() ? 0.0 : std::max(0.0, *std::max_element(out.begin(), out.end()));
  for (auto& x : out)
    if (x < 1e-12 * top || x < 0.0) x = 0.0;
  return out;
}

NullSample::NullSample(std::span<const double> lambdas, double trace, std::size_t reps,
                       std::uint64_t seed) {
  if (!(trace > 0.0)) throw DegenerateError("null distribution needs a positive trace");
  Rng rng(seed);
  draws_.resize(reps);
  for (auto& draw : draws_) {
    double acc = 0.0;
    for (double lambda : lambdas) {
      const double z = rng.normal();
      acc += lambda * z * z;
    }
    draw = acc / trace;
  }
  std::sort(draws_.begin(), draws_.end());
}

double NullSample::critical_value(double alpha) const {
  require_alpha(alpha);
  const auto r = static_cast<double>(draws_.size());
  auto k = static_cast<std::size_t>(std::ceil((1.0 - alpha) * r - 1e-9));
  k = std::clamp<std::size_t>(k, 1, draws_.size());
  return draws_[k - 1];
}

double NullSample::p_value(double f) const {
  const auto first = std::lower_bound(draws_.begin(), draws_.end(), f);
  const auto count = static_cast<double>(draws_.end() - first);
  return (1.0 + count) / (static_cast<double>(draws_.size()) + 1.0);
}

double NullSample::mean() const {
  return std::accumulate(draws_.begin(), draws_.end(), 0.0) / static_cast<double>(draws_.size());
}

SimulationCalibration critical_value_simulation(std::span<const double> lambdas, double trace,
                                                double alpha, std::size_t reps, std::uint64_t seed) {
  require_alpha(alpha);
  if (reps < 100) throw DomainError("the simulation calibration needs R >= 100");
  if (std::none_of(lambdas.begin(), lambdas.end(), [](double x) { return x > 0.0; }))
    throw DegenerateError("all eigenvalues of T V are zero");
  NullSample sample(lambdas, trace, reps, seed);
  const double c = sample.critical_value(alpha);
  return {c, std::move(sample)};
}

double AnalyticCalibration::p_value(double f) const {
  if (f <= 0.0) return 1.0;
  const boost::math::chi_squared_distribution<> chi(f_hat);
  return boost::math::cdf(boost::math::complement(chi, f * f_hat));
}

AnalyticCalibration critical_value_analytic(std::span<const double> lambdas, double alpha) {
  require_alpha(alpha);
  double trace = 0.0;
  double trace_sq = 0.0;
  for (double l : lambdas) {
    trace += l;
    trace_sq += l * l;
  }
  if (!(trace_sq > 0.0)) throw DegenerateError("tr(T V T V) is not positive");
  const double f_hat = trace * trace / trace_sq;
  const boost::math::chi_squared_distribution<> chi(f_hat);
  const double q = boost::math::quantile(boost::math::complement(chi, alpha));
  return {q / f_hat, f_hat};
}

AnalyticCalibration critical_value_analytic(const Eigen::MatrixXd& t, const Eigen::MatrixXd& v_asym,
                                            double alpha) {
  require_alpha(alpha);
  const Eigen::MatrixXd tv = t * v_asym;
  const double trace = tv.trace();
  const double trace_sq = (tv * tv).trace();
  if (!(trace_sq > 0.0) || !(trace > 0.0)) throw DegenerateError("tr(T V T V) is not positive");
  const double f_hat = trace * trace / trace_sq;
  const boost::math::chi_squared_distribution<> chi(f_hat);
  const double q = boost::math::quantile(boost::math::complement(chi, alpha));
  return {q / f_hat, f_hat};
}

TestResult test_hypothesis(const Eigen::VectorXd& p_hat, const CovarianceEstimate& cov,
                           const Contrast& contrast, std::size_t total_n, const TestOptions& options) {
  require_alpha(options.alpha);
  if (contrast.groups() != static_cast<std::size_t>(p_hat.size()))
    throw ValidationError("contrast and effect vector disagree on the number of groups");
  if (uses_simulation(options.method) && options.reps < 100)
    throw DomainError("the simulation calibration needs R >= 100");

  TestResult out;
  out.alpha = options.alpha;
  out.reps = uses_simulation(options.method) ? options.reps : 0;
  out.seed = options.seed;

  const Eigen::MatrixXd t = projection_matrix(contrast);
  if (t.cwiseAbs().maxCoeff() == 0.0) {
    out.vacuous = true;
    out.eigenvalues.assign(static_cast<std::size_t>(p_hat.size()), 0.0);
    if (uses_simulation(options.method)) out.p_sim = 1.0;
    if (uses_analytic(options.method)) out.p_analytic = 1.0;
    return out;
  }

  const FStatistic f = f_statistic(p_hat, t, cov.v_asym, total_n);
  out.f_value = f.f_value;
  out.trace_tv = f.trace_tv;
  out.eigenvalues = null_eigenvalues(t, cov.v_asym);

  if (uses_simulation(options.method)) {
    const auto sim = critical_value_simulation(out.eigenvalues, f.trace_tv, options.alpha,
                                               options.reps, options.seed);
    out.crit_sim = sim.critical;
    out.p_sim = sim.p_value(f.f_value);
    out.reject_sim = f.f_value > sim.critical;
  }
  if (uses_analytic(options.method)) {
    const auto an = critical_value_analytic(t, cov.v_asym, options.alpha);
    out.crit_analytic = an.critical;
    out.f_hat_dof = an.f_hat;
    out.p_analytic = an.p_value(f.f_value);
    out.reject_analytic = f.f_value > an.critical;
  }
  return out;
}

TestResult run_test(const Dataset& data, const CopulaSpec& copula, double tau,
                    const Contrast& contrast, const TestOptions& options) {
  const EffectsEstimate est = estimate_effects(data, copula, tau);
  const CovarianceEstimate cov = jackknife_covariance(data, copula, tau);
  return test_hypothesis(est.p_hat, cov, contrast, data.total_size(), options);
}

}  // namespace cgfact
