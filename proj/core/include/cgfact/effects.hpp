#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cgfact/copulas.hpp"
#include "cgfact/survival.hpp"

namespace cgfact {

// One-way layout with d groups, or a two-way a x b layout whose groups are
// ordered row-major over (level of A, level of B).
struct Layout {
  enum class Kind { OneWay, TwoWay };

  Kind kind = Kind::OneWay;
  std::size_t a = 0;  // one-way: number of groups
  std::size_t b = 1;

  static Layout one_way(std::size_t d) { return {Kind::OneWay, d, 1}; }
  static Layout two_way(std::size_t a, std::size_t b) { return {Kind::TwoWay, a, b}; }

  std::size_t groups() const noexcept { return a * b; }
  friend bool operator==(const Layout&, const Layout&) = default;
};

class Dataset {
 public:
  // Throws ValidationError if there are fewer than two groups, labels repeat,
  // or the group count does not match the layout.
  Dataset(std::vector<GroupedSample> groups, Layout layout);

  const std::vector<GroupedSample>& groups() const noexcept { return groups_; }
  const GroupedSample& group(std::size_t i) const { return groups_.at(i); }
  const Layout& layout() const noexcept { return layout_; }
  std::size_t group_count() const noexcept { return groups_.size(); }
  std::size_t total_size() const noexcept;

 private:
  std::vector<GroupedSample> groups_;
  Layout layout_;
};

// How the follow-up end tau is chosen when the caller does not fix it.
enum class TauPolicy {
  // min_i max_j X_ij: the largest tau at which every group's curve is identified.
  CommonSupport,
  // min_i of the second-largest observed time per group. Every leave-one-out
  // curve is still identified there, so the jackknife cannot fail on tau.
  LeaveOneOutSafe,
};

double resolve_tau(const Dataset& data, TauPolicy policy = TauPolicy::CommonSupport);

struct EffectsEstimate {
  Eigen::VectorXd w_hat;  // d^2 entries, row-major: (w_11, ..., w_1d, w_21, ...)
  Eigen::VectorXd p_hat;  // d entries
  double tau_used = 0.0;
  CopulaSpec copula_used;

  std::size_t group_count() const noexcept { return static_cast<std::size_t>(p_hat.size()); }
  double w(std::size_t i, std::size_t l) const {
    return w_hat(static_cast<Eigen::Index>(i * group_count() + l));
  }
};

// Restricted Mann-Whitney effect of group i over group l,
//   P(min(T_i, tau) > min(T_l, tau)) + P(min(T_i, tau) = min(T_l, tau)) / 2
//     = -int_[0,tau) S_i^pm dS_l + S_i(tau-) S_l(tau-) / 2.
// For step curves an event exactly at tau is a tie with every survivor, so
// the integral stops short of tau and the tie term uses left limits. Throws
// TauValidityError if either curve is undefined at tau, DomainError if tau <= 0.
double pairwise_effect(const StepSurvival& si, const StepSurvival& sl, double tau);

// A = I_d (x) 1'_d / d, shape d x d^2.
Eigen::MatrixXd aggregation_matrix(std::size_t d);

// Builds w from per-group curves: w_ii = 1/2, w_li = 1 - w_il for l > i.
Eigen::VectorXd pairwise_effects(std::span<const StepSurvival> curves, double tau);

// p = A w.
Eigen::VectorXd relative_effects(const Eigen::VectorXd& w_hat, std::size_t d);

// Fits one CG curve per group under the shared copula and aggregates the
// pairwise effects. tau = nullopt resolves with TauPolicy::CommonSupport.
EffectsEstimate estimate_effects(const Dataset& data, const CopulaSpec& copula,
                                 std::optional<double> tau = std::nullopt);

std::vector<StepSurvival> fit_curves(const Dataset& data, const CopulaSpec& copula);

}  // namespace cgfact
