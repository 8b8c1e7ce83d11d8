#pragma once

#include <string>
#include <string_view>

namespace cgfact {

enum class CopulaFamily { Independence, Clayton, Gumbel, Frank, FGM };

std::string_view to_string(CopulaFamily family);

// Accepts the lower-case names used on the command line ("clayton", "fgm", ...).
CopulaFamily parse_copula_family(std::string_view name);

// Dependence model between the event time T and the censoring time U of one
// subject, P(T > t, U > u) = C(S(t), G(u)). A single CopulaSpec is shared by all
// treatment groups.
//
// Parameterisation:
//   Clayton   phi(t) = (t^-theta - 1) / theta,                 theta > 0
//   Gumbel    phi(t) = (-log t)^(theta + 1),                   theta >= 0
//   Frank     phi(t) = -log((e^(-theta t) - 1)/(e^-theta - 1)), theta != 0
//   FGM       C(u,v) = uv(1 + theta(1-u)(1-v)),                -1 <= theta <= 1
//
// NOTE: the Gumbel exponent is theta + 1, not theta. theta = 0 is therefore
// independence and Kendall's tau is theta / (theta + 1).
//
// FGM is not Archimedean. It carries a Kendall's tau but has no generator and
// cannot drive the copula-graphic estimator.
class CopulaSpec {
 public:
  // Independence.
  CopulaSpec() = default;

  CopulaFamily family() const noexcept { return family_; }
  double theta() const noexcept { return theta_; }
  bool is_archimedean() const noexcept { return family_ != CopulaFamily::FGM; }

  // phi(t) for t in (0, 1]. Returns +inf if the value is not representable.
  double generator(double t) const;

  // phi^-1(s) for s >= 0, with phi^-1(+inf) = 0.
  double generator_inverse(double s) const;

  double kendalls_tau() const;

  std::string describe() const;

  friend bool operator==(const CopulaSpec&, const CopulaSpec&) = default;

 private:
  friend CopulaSpec make_copula(CopulaFamily family, double theta);
  CopulaSpec(CopulaFamily family, double theta) : family_(family), theta_(theta) {}

  CopulaFamily family_ = CopulaFamily::Independence;
  double theta_ = 0.0;
};

// |theta| below this routes Clayton, Gumbel and Frank to Independence.
inline constexpr double kIndependenceThreshold = 1e-12;

// Validates theta against the family's range. Throws DomainError.
CopulaSpec make_copula(CopulaFamily family, double theta);

// Inverse of the Kendall's tau map. Throws DomainError for unattainable tau.
double theta_from_tau(CopulaFamily family, double tau);

// Frank's tau as a function of theta, 1 - 4/theta (1 - D1(theta)), with the
// Debye integral D1 evaluated by adaptive Gauss-Kronrod quadrature.
double frank_kendalls_tau(double theta);

}  // namespace cgfact
