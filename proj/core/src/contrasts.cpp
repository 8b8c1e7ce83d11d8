#include "cgfact/contrasts.hpp"

#include <cmath>
#include <sstream>

#include "cgfact/errors.hpp"

namespace cgfact {

std::string_view to_string(ContrastKind kind) {
  switch (kind) {
    case ContrastKind::OneWayGlobal: return "global";
    case ContrastKind::MainA: return "main-a";
    case ContrastKind::MainB: return "main-b";
    case ContrastKind::Interaction: return "interaction";
    case ContrastKind::Custom: return "custom";
  }
  return "unknown";
}

Eigen::MatrixXd centering_matrix(std::size_t d) {
  if (d < 2) throw ValidationError("centering matrix needs d >= 2");
  const auto n = static_cast<Eigen::Index>(d);
  return Eigen::MatrixXd::Identity(n, n) -
         Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(d));
}

Eigen::MatrixXd kronecker(const Eigen::MatrixXd& lhs, const Eigen::MatrixXd& rhs) {
  Eigen::MatrixXd out(lhs.rows() * rhs.rows(), lhs.cols() * rhs.cols());
  for (Eigen::Index i = 0; i < lhs.rows(); ++i)
    for (Eigen::Index j = 0; j < lhs.cols(); ++j)
      out.block(i * rhs.rows(), j * rhs.cols(), rhs.rows(), rhs.cols()) = lhs(i, j) * rhs;
  return out;
}

Contrast one_way_global(std::size_t d) { return {centering_matrix(d), ContrastKind::OneWayGlobal}; }

TwoWayContrasts two_way_contrasts(std::size_t a, std::size_t b) {
  if (a < 2 || b < 2) throw ValidationError("two-way contrasts need at least two levels per factor");
  const Eigen::MatrixXd pa = centering_matrix(a);
  const Eigen::MatrixXd pb = centering_matrix(b);
  const Eigen::MatrixXd mean_a =
      Eigen::MatrixXd::Constant(1, static_cast<Eigen::Index>(a), 1.0 / static_cast<double>(a));
  const Eigen::MatrixXd mean_b =
      Eigen::MatrixXd::Constant(1, static_cast<Eigen::Index>(b), 1.0 / static_cast<double>(b));
  return {
      {kronecker(pa, mean_b), ContrastKind::MainA},
      {kronecker(mean_a, pb), ContrastKind::MainB},
      {kronecker(pa, pb), ContrastKind::Interaction},
  };
}

Contrast validate_contrast(const Eigen::MatrixXd& matrix, std::size_t d, ContrastKind kind,
                           double tolerance) {
  if (static_cast<std::size_t>(matrix.cols()) != d) {
    std::ostringstream os;
    os << "contrast has " << matrix.cols() << " columns but the design has " << d << " groups";
    throw ValidationError(os.str());
  }
  if (matrix.rows() == 0) throw ValidationError("contrast matrix has no rows");
  if (!matrix.allFinite()) throw ValidationError("contrast matrix has non-finite entries");
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    const double sum = matrix.row(r).sum();
    if (std::abs(sum) > tolerance) {
      std::ostringstream os;
      os << "contrast row " << r + 1 << " sums to " << sum << ", not 0";
      throw ValidationError(os.str());
    }
  }
  return {matrix, kind};
}

}  // namespace cgfact
