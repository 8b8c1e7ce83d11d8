#pragma once

#include <cstddef>
#include <string_view>

#include <Eigen/Dense>

namespace cgfact {

enum class ContrastKind { OneWayGlobal, MainA, MainB, Interaction, Custom };

std::string_view to_string(ContrastKind kind);

// r x d matrix with zero row sums; encodes H0: C p = 0.
struct Contrast {
  Eigen::MatrixXd matrix;
  ContrastKind kind = ContrastKind::Custom;

  std::size_t groups() const noexcept { return static_cast<std::size_t>(matrix.cols()); }
};

// P_d = I_d - 1_d 1'_d / d.
Eigen::MatrixXd centering_matrix(std::size_t d);

Eigen::MatrixXd kronecker(const Eigen::MatrixXd& lhs, const Eigen::MatrixXd& rhs);

// Global equality p_1 = ... = p_d, C = P_d.
Contrast one_way_global(std::size_t d);

struct TwoWayContrasts {
  Contrast main_a;       // P_a (x) 1'_b / b
  Contrast main_b;       // 1'_a / a (x) P_b
  Contrast interaction;  // P_a (x) P_b
};

TwoWayContrasts two_way_contrasts(std::size_t a, std::size_t b);

// Accepts a user matrix iff it has d columns and every row sums to zero
// within `tolerance`. Throws ValidationError otherwise.
Contrast validate_contrast(const Eigen::MatrixXd& matrix, std::size_t d,
                           ContrastKind kind = ContrastKind::Custom, double tolerance = 1e-10);

}  // namespace cgfact
