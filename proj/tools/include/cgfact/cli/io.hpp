#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cgfact/effects.hpp"
#include "cgfact/errors.hpp"

namespace cgfact::cli {

// Raised for anything wrong with an input file: unreadable path, bad header,
// malformed rows. Messages carry the file name and line number.
class IngestionError : public Error {
 public:
  using Error::Error;
};

// Groups with fewer subjects than this are rejected (the jackknife needs 3).
inline constexpr std::size_t kMinGroupSize = 3;
// Groups smaller than this are accepted with a warning.
inline constexpr std::size_t kSmallGroupWarning = 10;

struct InputData {
  Dataset data;
  std::vector<std::string> warnings;
};

// One-way header `time,status,group`: groups ordered by label (byte-wise).
// Two-way header `time,status,factor_a,factor_b`: levels of each factor
// ordered by label, groups in row-major (A, B) order, labelled "A:B".
InputData read_csv(const std::filesystem::path& path);
InputData parse_csv(const std::string& text, const std::string& source = "<input>");

// Numeric CSV without header, one contrast row per line.
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

// Shortest decimal string that reads back to the same double.
std::string format_double(double x);

}  // namespace cgfact::cli
