#include "cgfact/copulas.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "cgfact/errors.hpp"

namespace cgfact {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double finite_or_inf(double v) { return std::isfinite(v) ? v : kInf; }

// t / (e^t - 1), continuous at 0.
double debye_integrand(double t) {
  if (std::abs(t) < 1e-10) return 1.0 - t / 2.0;
  return t / std::expm1(t);
}

}  // namespace

std::string_view to_string(CopulaFamily family) {
  switch (family) {
    case CopulaFamily::Independence: return "independence";
    case CopulaFamily::Clayton: return "clayton";
    case CopulaFamily::Gumbel: return "gumbel";
    case CopulaFamily::Frank: return "frank";
    case CopulaFamily::FGM: return "fgm";
  }
  return "unknown";
}

CopulaFamily parse_copula_family(std::string_view name) {
  std::string lower(name);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "independence" || lower == "indep") return CopulaFamily::Independence;
  if (lower == "clayton") return CopulaFamily::Clayton;
  if (lower == "gumbel") return CopulaFamily::Gumbel;
  if (lower == "frank") return CopulaFamily::Frank;
  if (lower == "fgm") return CopulaFamily::FGM;
  throw DomainError("unknown copula family '" + std::string(name) + "'");
}

CopulaSpec make_copula(CopulaFamily family, double theta) {
  if (std::isnan(theta)) throw DomainError("copula parameter is NaN");
  switch (family) {
    case CopulaFamily::Independence:
      return CopulaSpec{};
    case CopulaFamily::Clayton:
      if (std::abs(theta) < kIndependenceThreshold) return CopulaSpec{};
      if (!(theta > 0.0) || !std::isfinite(theta))
        throw DomainError("Clayton copula requires theta > 0 (got " + std::to_string(theta) + ")");
      break;
    case CopulaFamily::Gumbel:
      if (std::abs(theta) < kIndependenceThreshold) return CopulaSpec{};
      if (!(theta >= 0.0) || !std::isfinite(theta))
        throw DomainError("Gumbel copula requires theta >= 0 (got " + std::to_string(theta) + ")");
      break;
    case CopulaFamily::Frank:
      if (std::abs(theta) < kIndependenceThreshold) return CopulaSpec{};
      if (!std::isfinite(theta))
        throw DomainError("Frank copula requires a finite theta != 0");
      break;
    case CopulaFamily::FGM:
      if (theta < -1.0 || theta > 1.0)
        throw DomainError("FGM copula requires -1 <= theta <= 1 (got " + std::to_string(theta) + ")");
      break;
  }
  return CopulaSpec(family, theta);
}

double CopulaSpec::generator(double t) const {
  if (!(t > 0.0) || t > 1.0)
    throw DomainError("generator argument must lie in (0, 1] (got " + std::to_string(t) + ")");
  if (t == 1.0) return 0.0;
  const double log_t = std::log(t);
  switch (family_) {
    case CopulaFamily::Independence:
      return -log_t;
    case CopulaFamily::Clayton:
      // (t^-theta - 1)/theta without cancellation for small theta.
      return finite_or_inf(std::expm1(-theta_ * log_t) / theta_);
    case CopulaFamily::Gumbel:
      return finite_or_inf(std::pow(-log_t, theta_ + 1.0));
    case CopulaFamily::Frank: {
      const double ratio = std::expm1(-theta_ * t) / std::expm1(-theta_);
      return finite_or_inf(-std::log(ratio));
    }
    case CopulaFamily::FGM:
      break;
  }
  throw NonArchimedeanError("the FGM copula is not Archimedean and has no generator");
}

double CopulaSpec::generator_inverse(double s) const {
  if (std::isnan(s) || s < 0.0)
    throw DomainError("generator inverse requires s >= 0 (got " + std::to_string(s) + ")");
  if (s == kInf || s == 0.0) {
    if (family_ == CopulaFamily::FGM)
      throw NonArchimedeanError("the FGM copula is not Archimedean and has no generator");
    return s == 0.0 ? 1.0 : 0.0;
  }
  switch (family_) {
    case CopulaFamily::Independence:
      return std::exp(-s);
    case CopulaFamily::Clayton:
      return std::exp(-std::log1p(theta_ * s) / theta_);
    case CopulaFamily::Gumbel:
      return std::exp(-std::pow(s, 1.0 / (theta_ + 1.0)));
    case CopulaFamily::Frank: {
      const double inner = std::log1p(std::exp(-s) * std::expm1(-theta_));
      const double t = -inner / theta_;
      return std::clamp(t, 0.0, 1.0);
    }
    case CopulaFamily::FGM:
      break;
  }
  throw NonArchimedeanError("the FGM copula is not Archimedean and has no generator");
}

double frank_kendalls_tau(double theta) {
  if (std::abs(theta) < kIndependenceThreshold) return 0.0;
  double error = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      debye_integrand, 0.0, theta, 15, 1e-14, &error);
  const double debye = integral / theta;
  return 1.0 - 4.0 / theta * (1.0 - debye);
}

double CopulaSpec::kendalls_tau() const {
  switch (family_) {
    case CopulaFamily::Independence: return 0.0;
    case CopulaFamily::Clayton: return theta_ / (theta_ + 2.0);
    case CopulaFamily::Gumbel: return theta_ / (theta_ + 1.0);
    case CopulaFamily::Frank: return frank_kendalls_tau(theta_);
    case CopulaFamily::FGM: return 2.0 * theta_ / 9.0;
  }
  return 0.0;
}

std::string CopulaSpec::describe() const {
  std::ostringstream os;
  os << to_string(family_);
  if (family_ != CopulaFamily::Independence) os << "(theta=" << theta_ << ")";
  return os.str();
}

double theta_from_tau(CopulaFamily family, double tau) {
  if (std::isnan(tau)) throw DomainError("Kendall's tau is NaN");
  switch (family) {
    case CopulaFamily::Independence:
      if (tau != 0.0) throw DomainError("the independence copula only attains tau = 0");
      return 0.0;
    case CopulaFamily::Clayton:
      if (tau < 0.0 || tau >= 1.0) throw DomainError("Clayton attains tau in [0, 1)");
      return 2.0 * tau / (1.0 - tau);
    case CopulaFamily::Gumbel:
      if (tau < 0.0 || tau >= 1.0) throw DomainError("Gumbel attains tau in [0, 1)");
      return tau / (1.0 - tau);
    case CopulaFamily::FGM:
      if (tau < -2.0 / 9.0 || tau > 2.0 / 9.0) throw DomainError("FGM attains tau in [-2/9, 2/9]");
      return 4.5 * tau;
    case CopulaFamily::Frank:
      break;
  }
  if (tau == 0.0) return 0.0;
  if (tau <= -1.0 || tau >= 1.0) throw DomainError("Frank attains tau in (-1, 1)");
  // tau(theta) is odd and increasing; expand the bracket until it covers tau.
  const double target = std::abs(tau);
  double hi = 1.0;
  while (frank_kendalls_tau(hi) < target) {
    hi *= 2.0;
    if (hi > 1e6) throw DomainError("Kendall's tau too close to 1 for the Frank copula");
  }
  auto f = [target](double th) { return frank_kendalls_tau(th) - target; };
  boost::uintmax_t max_iter = 200;
  const auto [lo_root, hi_root] = boost::math::tools::toms748_solve(
      f, kIndependenceThreshold, hi, f(kIndependenceThreshold), f(hi),
      boost::math::tools::eps_tolerance<double>(50), max_iter);
  const double theta = 0.5 * (lo_root + hi_root);
  return tau > 0.0 ? theta : -theta;
}

}  // namespace cgfact
