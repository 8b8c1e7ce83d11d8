#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cgfact/cli/io.hpp"
#include "cgfact/contrasts.hpp"
#include "cgfact/copulas.hpp"
#include "cgfact/inference.hpp"

namespace cgfact::cli {

using Json = nlohmann::ordered_json;

// Bad option values that slipped past argument parsing (alpha out of range,
// contrast that does not fit the design, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

enum class SeedSource { Default, Environment, Flag };

inline constexpr std::uint64_t kDefaultSeed = 20240101;
inline constexpr const char* kSeedEnvVar = "CGFACT_SEED";

struct AnalysisConfig {
  std::string input;
  CopulaFamily family = CopulaFamily::Clayton;
  std::vector<double> thetas{0.0, 2.0, 4.0, 8.0};
  std::optional<double> tau;  // nullopt: auto
  std::string contrast = "global";  // global | main-a | main-b | interaction
  std::string contrast_file;         // overrides `contrast` when set
  double alpha = 0.05;
  CalibrationMethod method = CalibrationMethod::Both;
  std::size_t reps = 1000;
  std::uint64_t seed = kDefaultSeed;
  SeedSource seed_source = SeedSource::Default;
  CiScale ci_scale = CiScale::Plain;
};

// Contrast named by cfg for the given design. Throws UsageError when the
// selector does not apply (e.g. main-a on a one-way layout).
Contrast select_contrast(const AnalysisConfig& cfg, const Layout& layout);

// Runs every theta of the sensitivity list on one parsed dataset and returns
// the JSON report {config_echo, per_theta, warnings}.
Json analyze(const AnalysisConfig& cfg, const InputData& input);

// Effects and test tables as plain text.
void render_analysis(const Json& report, std::ostream& out);

std::string to_string(CalibrationMethod m);
std::string to_string(SeedSource s);

}  // namespace cgfact::cli
