#include "cgfact/survival.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cgfact/errors.hpp"

namespace cgfact {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Neumaier compensated summation; an infinite term saturates the sum.
class CompensatedSum {
 public:
  void add(double x) {
    if (std::isinf(x) || std::isinf(sum_)) {
      sum_ += x;
      return;
    }
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return std::isinf(sum_) ? sum_ : sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

void require_estimable(const GroupedSample& sample) {
  if (sample.size() < 2)
    throw InsufficientSampleError("group '" + sample.label() +
                                  "' needs at least 2 records for survival estimation");
}

// Appends a knot, merging with the previous one when the time repeats.
void push_knot(std::vector<double>& times, std::vector<double>& values, double t, double v) {
  if (!times.empty() && times.back() == t) {
    values.back() = v;
  } else {
    times.push_back(t);
    values.push_back(v);
  }
}

}  // namespace

std::size_t GroupedSample::event_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(records_.begin(), records_.end(), [](const auto& r) { return r.is_event(); }));
}

void GroupedSample::count_ties() {
  tie_count_ = 0;
  for (std::size_t k = 1; k < records_.size(); ++k)
    if (records_[k].time == records_[k - 1].time) ++tie_count_;
}

GroupedSample GroupedSample::without(std::size_t index) const {
  if (index >= records_.size()) throw ValidationError("record index out of range");
  GroupedSample out;
  out.label_ = label_;
  out.records_.reserve(records_.size() - 1);
  for (std::size_t k = 0; k < records_.size(); ++k)
    if (k != index) out.records_.push_back(records_[k]);
  out.count_ties();
  return out;
}

GroupedSample group_sample(std::vector<CensoredRecord> records, std::string label) {
  if (records.empty()) throw ValidationError("group '" + label + "' is empty");
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    if (!std::isfinite(r.time) || r.time <= 0.0) {
      std::ostringstream os;
      os << "group '" << label << "', record " << k << ": time must be positive and finite (got "
         << r.time << ")";
      throw ValidationError(os.str());
    }
    if (r.status != 0 && r.status != 1) {
      std::ostringstream os;
      os << "group '" << label << "', record " << k << ": status must be 0 or 1 (got " << r.status
         << ")";
      throw ValidationError(os.str());
    }
  }
  std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.status > b.status;
  });
  GroupedSample out;
  out.records_ = std::move(records);
  out.label_ = std::move(label);
  out.count_ties();
  return out;
}

std::size_t at_risk(const GroupedSample& sample, double u) {
  const auto& r = sample.records();
  const auto it = std::lower_bound(r.begin(), r.end(), u,
                                   [](const CensoredRecord& rec, double v) { return rec.time < v; });
  return static_cast<std::size_t>(r.end() - it);
}

StepSurvival::StepSurvival(std::vector<double> jump_times, std::vector<double> values,
                           double domain_end)
    : jump_times_(std::move(jump_times)), values_(std::move(values)), domain_end_(domain_end) {
  if (jump_times_.size() != values_.size())
    throw ValidationError("step function needs one value per jump time");
  double prev_t = 0.0;
  double prev_v = 1.0;
  for (std::size_t k = 0; k < jump_times_.size(); ++k) {
    if (!(jump_times_[k] > prev_t)) throw ValidationError("jump times must be strictly increasing and positive");
    if (values_[k] < 0.0 || values_[k] > prev_v) throw ValidationError("survival values must be nonincreasing in [0, 1]");
    prev_t = jump_times_[k];
    prev_v = values_[k];
  }
  if (!jump_times_.empty() && jump_times_.back() > domain_end_)
    throw ValidationError("jump beyond the domain end");
}

bool StepSurvival::defined_at(double t) const noexcept {
  return t >= 0.0 && (t <= domain_end_ || reaches_zero());
}

void StepSurvival::check_domain(double t) const {
  if (t < 0.0 || std::isnan(t)) throw DomainError("survival curve evaluated at a negative time");
  if (!defined_at(t)) {
    std::ostringstream os;
    os << "survival curve is not identified at t = " << t << " (last observation " << domain_end_
       << " is censored)";
    throw TauValidityError(os.str());
  }
}

double StepSurvival::eval(double t) const {
  check_domain(t);
  const auto it = std::upper_bound(jump_times_.begin(), jump_times_.end(), t);
  if (it == jump_times_.begin()) return 1.0;
  return values_[static_cast<std::size_t>(it - jump_times_.begin()) - 1];
}

double StepSurvival::left_limit(double t) const {
  check_domain(t);
  const auto it = std::lower_bound(jump_times_.begin(), jump_times_.end(), t);
  if (it == jump_times_.begin()) return 1.0;
  return values_[static_cast<std::size_t>(it - jump_times_.begin()) - 1];
}

double StepSurvival::eval_pm(double t) const { return 0.5 * (eval(t) + left_limit(t)); }

StepSurvival cg_survival(const GroupedSample& sample, const CopulaSpec& copula) {
  if (!copula.is_archimedean())
    throw NonArchimedeanError("the copula-graphic estimator requires an Archimedean copula, got " +
                              copula.describe());
  require_estimable(sample);
  const auto& recs = sample.records();
  const std::size_t n = recs.size();
  const double dn = static_cast<double>(n);

  std::vector<double> times;
  std::vector<double> values;
  CompensatedSum running;
  for (std::size_t k = 0; k < n; ++k) {
    if (!recs[k].is_event()) continue;
    const std::size_t y = n - k;
    const double upper = y == 1 ? kInf : copula.generator(static_cast<double>(y - 1) / dn);
    const double lower = copula.generator(static_cast<double>(y) / dn);
    running.add(std::isinf(upper) ? kInf : upper - lower);
    push_knot(times, values, recs[k].time, copula.generator_inverse(running.value()));
  }
  return StepSurvival(std::move(times), std::move(values), sample.max_time());
}

StepSurvival km_survival(const GroupedSample& sample) {
  require_estimable(sample);
  const auto& recs = sample.records();
  const std::size_t n = recs.size();
  std::vector<double> times;
  std::vector<double> values;
  double s = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!recs[k].is_event()) continue;
    const double y = static_cast<double>(n - k);
    s *= 1.0 - 1.0 / y;
    push_knot(times, values, recs[k].time, s);
  }
  return StepSurvival(std::move(times), std::move(values), sample.max_time());
}

}  // namespace cgfact
