#include "cgfact/effects.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

#include "cgfact/errors.hpp"

namespace cgfact {

Dataset::Dataset(std::vector<GroupedSample> groups, Layout layout)
    : groups_(std::move(groups)), layout_(layout) {
  if (groups_.size() < 2) throw ValidationError("a dataset needs at least two groups");
  if (layout_.groups() != groups_.size()) {
    std::ostringstream os;
    os << "layout expects " << layout_.groups() << " groups but " << groups_.size() << " were given";
    throw ValidationError(os.str());
  }
  if (layout_.kind == Layout::Kind::TwoWay && (layout_.a < 2 || layout_.b < 2))
    throw ValidationError("a two-way layout needs at least two levels per factor");
  std::set<std::string> labels;
  for (const auto& g : groups_)
    if (!labels.insert(g.label()).second)
      throw ValidationError("duplicate group label '" + g.label() + "'");
}

std::size_t Dataset::total_size() const noexcept {
  std::size_t n = 0;
  for (const auto& g : groups_) n += g.size();
  return n;
}

double resolve_tau(const Dataset& data, TauPolicy policy) {
  double tau = std::numeric_limits<double>::infinity();
  for (const auto& g : data.groups()) {
    const auto& r = g.records();
    const double end = policy == TauPolicy::CommonSupport || r.size() < 2 ? r.back().time
                                                                          : r[r.size() - 2].time;
    tau = std::min(tau, end);
  }
  return tau;
}

double pairwise_effect(const StepSurvival& si, const StepSurvival& sl, double tau) {
  if (!(tau > 0.0)) throw DomainError("follow-up end tau must be positive");
  if (!si.defined_at(tau) || !sl.defined_at(tau)) {
    std::ostringstream os;
    os << "tau = " << tau << " exceeds the identified range of a survival curve (domain ends "
       << si.domain_end() << ", " << sl.domain_end() << ")";
    throw TauValidityError(os.str());
  }

  const auto ti = si.jump_times();
  const auto vi = si.values();
  const auto tl = sl.jump_times();
  const auto vl = sl.values();

  double integral = 0.0;
  double prev_l = 1.0;
  std::size_t pos = 0;       // first jump of S_i not before the current time
  double before_i = 1.0;     // S_i just before the current time
  // Jumps at tau itself belong to the tie term: min(T, tau) maps them onto tau.
  for (std::size_t k = 0; k < tl.size() && tl[k] < tau; ++k) {
    const double t = tl[k];
    while (pos < ti.size() && ti[pos] < t) before_i = vi[pos++];
    const double at_i = (pos < ti.size() && ti[pos] == t) ? vi[pos] : before_i;
    integral += 0.5 * (at_i + before_i) * (prev_l - vl[k]);
    prev_l = vl[k];
  }
  return integral + 0.5 * si.left_limit(tau) * sl.left_limit(tau);
}

Eigen::MatrixXd aggregation_matrix(std::size_t d) {
  if (d < 2) throw ValidationError("aggregation matrix needs d >= 2");
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) a.block(i, i * n, 1, n).setConstant(1.0 / static_cast<double>(d));
  return a;
}

Eigen::VectorXd pairwise_effects(std::span<const StepSurvival> curves, double tau) {
  const std::size_t d = curves.size();
  Eigen::VectorXd w(static_cast<Eigen::Index>(d * d));
  for (std::size_t i = 0; i < d; ++i) {
    w(static_cast<Eigen::Index>(i * d + i)) = 0.5;
    for (std::size_t l = i + 1; l < d; ++l) {
      const double wil = pairwise_effect(curves[i], curves[l], tau);
      w(static_cast<Eigen::Index>(i * d + l)) = wil;
      w(static_cast<Eigen::Index>(l * d + i)) = 1.0 - wil;
    }
  }
  return w;
}

Eigen::VectorXd relative_effects(const Eigen::VectorXd& w_hat, std::size_t d) {
  if (static_cast<std::size_t>(w_hat.size()) != d * d)
    throw ValidationError("w must have d^2 entries");
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::VectorXd p(n);
  for (Eigen::Index i = 0; i < n; ++i) p(i) = w_hat.segment(i * n, n).sum() / static_cast<double>(d);
  return p;
}

std::vector<StepSurvival> fit_curves(const Dataset& data, const CopulaSpec& copula) {
  std::vector<StepSurvival> curves;
  curves.reserve(data.group_count());
  for (const auto& g : data.groups()) curves.push_back(cg_survival(g, copula));
  return curves;
}

EffectsEstimate estimate_effects(const Dataset& data, const CopulaSpec& copula,
                                 std::optional<double> tau) {
  for (const auto& g : data.groups())
    if (g.size() < 2)
      throw InsufficientSampleError("group '" + g.label() + "' has fewer than 2 subjects");
  const double t = tau.value_or(resolve_tau(data, TauPolicy::CommonSupport));
  if (!(t > 0.0)) throw DomainError("follow-up end tau must be positive");

  const auto curves = fit_curves(data, copula);
  EffectsEstimate est;
  est.w_hat = pairwise_effects(curves, t);
  est.p_hat = relative_effects(est.w_hat, data.group_count());
  est.tau_used = t;
  est.copula_used = copula;
  return est;
}

}  // namespace cgfact
