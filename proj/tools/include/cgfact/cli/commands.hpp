#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cgfact/cli/analyze.hpp"
#include "cgfact/simulation.hpp"

namespace cgfact::cli {

// Long-format CSV `group,theta,time,survival`, one block per (theta, group).
// Each block starts at time 0 with survival 1 and lists every knot.
void write_curves(const Dataset& data, CopulaFamily family, const std::vector<double>& thetas,
                  std::ostream& out);

struct SimulateConfig {
  int scenario = 1;
  std::size_t n = 100;
  std::size_t reps = 500;
  std::vector<double> theta_fits{2.0};
  std::vector<double> alphas{0.10, 0.05, 0.01};
  std::size_t calibration_reps = 1000;
  std::uint64_t seed = kDefaultSeed;
  SeedSource seed_source = SeedSource::Default;
};

Json simulate(const SimulateConfig& cfg);
void render_simulation(const Json& report, std::ostream& out);

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitIngestion = 2,
  kExitNumeric = 3,
  kExitOutput = 4,
};

// Full command line front end; main() forwards here.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cgfact::cli
