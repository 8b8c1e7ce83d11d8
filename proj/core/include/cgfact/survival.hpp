#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cgfact/copulas.hpp"

namespace cgfact {

// One subject: observed time X = min(T, U) and status delta = 1{T <= U}.
struct CensoredRecord {
  double time = 0.0;
  int status = 0;

  bool is_event() const noexcept { return status == 1; }
  friend bool operator==(const CensoredRecord&, const CensoredRecord&) = default;
};

// Records of one treatment group sorted by time. At equal times events come
// before censorings and the input order is otherwise preserved.
class GroupedSample {
 public:
  const std::vector<CensoredRecord>& records() const noexcept { return records_; }
  const std::string& label() const noexcept { return label_; }
  std::size_t size() const noexcept { return records_.size(); }
  // Number of records whose time equals the preceding record's time.
  std::size_t tie_count() const noexcept { return tie_count_; }
  std::size_t event_count() const noexcept;
  double max_time() const noexcept { return records_.back().time; }

  // Same group with the record at sorted position `index` removed.
  GroupedSample without(std::size_t index) const;

 private:
  friend GroupedSample group_sample(std::vector<CensoredRecord> records, std::string label);
  GroupedSample() = default;
  void count_ties();

  std::vector<CensoredRecord> records_;
  std::string label_;
  std::size_t tie_count_ = 0;
};

// Sorts and validates. Throws ValidationError on an empty list, a
// nonpositive or non-finite time, or a status other than 0/1.
GroupedSample group_sample(std::vector<CensoredRecord> records, std::string label);

// Number of records with time >= u.
std::size_t at_risk(const GroupedSample& sample, double u);

// Right-continuous nonincreasing step function starting at 1.
//
// The curve is identified on [0, domain_end]. If it has dropped to 0 (the
// last observation is an event) it is also defined as 0 beyond domain_end;
// otherwise evaluation past domain_end throws TauValidityError.
class StepSurvival {
 public:
  StepSurvival(std::vector<double> jump_times, std::vector<double> values, double domain_end);

  std::span<const double> jump_times() const noexcept { return jump_times_; }
  std::span<const double> values() const noexcept { return values_; }
  double domain_end() const noexcept { return domain_end_; }
  bool reaches_zero() const noexcept { return !values_.empty() && values_.back() == 0.0; }

  // True if the curve is defined at t.
  bool defined_at(double t) const noexcept;

  // S(t).
  double eval(double t) const;
  // S(t-).
  double left_limit(double t) const;
  // (S(t+) + S(t-)) / 2.
  double eval_pm(double t) const;

 private:
  void check_domain(double t) const;

  std::vector<double> jump_times_;
  std::vector<double> values_;
  double domain_end_;
};

// Copula-graphic estimator under an Archimedean copula:
//   S(t) = phi^-1( sum_{X_j <= t, event} phi((Y_j - 1)/n) - phi(Y_j / n) ),
// where Y_j is the number at risk at X_j. Tied records are processed one at
// a time in sorted order, each decrementing the risk set; jumps sharing a time
// are merged into one knot. Throws NonArchimedeanError for FGM and
// InsufficientSampleError for fewer than two records.
StepSurvival cg_survival(const GroupedSample& sample, const CopulaSpec& copula);

// Kaplan-Meier product-limit estimator, prod (1 - 1/Y_j).
StepSurvival km_survival(const GroupedSample& sample);

}  // namespace cgfact
