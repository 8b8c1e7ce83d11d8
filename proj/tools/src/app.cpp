#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"

#include "cgfact/cli/commands.hpp"
#include "cgfact/parallel.hpp"

namespace cgfact::cli {

namespace {

class OutputError : public Error {
 public:
  using Error::Error;
};

void resolve_seed(const CLI::Option* flag, std::uint64_t& seed, SeedSource& source) {
  if (flag->count() > 0) {
    source = SeedSource::Flag;
    return;
  }
  const char* env = std::getenv(kSeedEnvVar);
  if (env == nullptr || *env == '\0') {
    source = SeedSource::Default;
    return;
  }
  const std::string text(env);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw UsageError(std::string(kSeedEnvVar) + "='" + text + "' is not an unsigned integer");
  seed = value;
  source = SeedSource::Environment;
}

// "-" means the given stream.
template <typename Writer>
void write_to(const std::string& path, std::ostream& fallback, Writer&& writer) {
  if (path == "-") {
    writer(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw OutputError("cannot open '" + path + "' for writing");
  writer(file);
  file.flush();
  if (!file) throw OutputError("failed writing '" + path + "'");
}

void write_json(const Json& report, const std::string& path, std::ostream& out) {
  write_to(path, out, [&](std::ostream& s) { s << report.dump(2) << '\n'; });
}

const std::map<std::string, CopulaFamily> kFamilies{{"independence", CopulaFamily::Independence},
                                                    {"clayton", CopulaFamily::Clayton},
                                                    {"gumbel", CopulaFamily::Gumbel},
                                                    {"frank", CopulaFamily::Frank}};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Treatment-effect estimation and testing for factorial survival designs under dependent censoring"};
  app.name("cgfact");
  app.require_subcommand(1);
  app.fallthrough();
  std::size_t threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();

  // analyze
  AnalysisConfig acfg;
  std::string family_text = "clayton";
  std::string tau_text = "auto";
  std::string method_text = "both";
  std::string ci_text = "plain";
  std::string analyze_json;
  bool analyze_quiet = false;
  auto* analyze_cmd = app.add_subcommand("analyze", "Estimate effects and test a contrast for each copula parameter");
  analyze_cmd->add_option("-i,--input", acfg.input, "CSV file (time,status,group or time,status,factor_a,factor_b)")
      ->required();
  analyze_cmd->add_option("--family", family_text, "Copula family: independence, clayton, gumbel or frank")
      ->transform(CLI::IsMember(kFamilies, CLI::ignore_case))
      ->capture_default_str();
  analyze_cmd->add_option("--theta", acfg.thetas, "Copula parameters for the sensitivity analysis")
      ->delimiter(',')
      ->capture_default_str();
  analyze_cmd->add_option("--tau", tau_text, "Follow-up end, a number or 'auto'")->capture_default_str();
  analyze_cmd->add_option("--contrast", acfg.contrast, "global, main-a, main-b or interaction")
      ->check(CLI::IsMember({"global", "main-a", "main-b", "interaction"}))
      ->capture_default_str();
  analyze_cmd->add_option("--contrast-file", acfg.contrast_file, "CSV contrast matrix (overrides --contrast)");
  analyze_cmd->add_option("--alpha", acfg.alpha, "Significance level")->capture_default_str();
  analyze_cmd->add_option("--method", method_text, "Calibration: sim, analytic or both")
      ->check(CLI::IsMember({"sim", "analytic", "both"}))
      ->capture_default_str();
  analyze_cmd->add_option("--reps", acfg.reps, "Monte Carlo replicates for the simulation calibration")
      ->capture_default_str();
  auto* analyze_seed = analyze_cmd->add_option("--seed", acfg.seed, "RNG seed (default: $CGFACT_SEED or 20240101)");
  analyze_cmd->add_option("--ci", ci_text, "Confidence interval scale: plain or logit")
      ->check(CLI::IsMember({"plain", "logit"}))
      ->capture_default_str();
  analyze_cmd->add_option("--json", analyze_json, "Write the JSON report here ('-' for stdout)");
  analyze_cmd->add_flag("-q,--quiet", analyze_quiet, "Suppress the text tables");

  // export-curves
  std::string curves_input;
  std::string curves_out;
  std::string curves_family_text = "clayton";
  std::vector<double> curves_thetas{0.0};
  auto* curves = app.add_subcommand("export-curves", "Write copula-graphic survival curves as long-format CSV");
  curves->add_option("-i,--input", curves_input, "CSV input file")->required();
  curves->add_option("--family", curves_family_text, "Copula family: independence, clayton, gumbel or frank")
      ->transform(CLI::IsMember(kFamilies, CLI::ignore_case))
      ->capture_default_str();
  curves->add_option("--theta", curves_thetas, "Copula parameters")->delimiter(',')->capture_default_str();
  curves->add_option("-o,--out", curves_out, "Output CSV ('-' for stdout)")->required();

  // simulate
  SimulateConfig scfg;
  std::string sim_json;
  bool sim_quiet = false;
  auto* sim = app.add_subcommand("simulate", "Run the scenario replication study");
  sim->add_option("--scenario", scfg.scenario, "Scenario id")->check(CLI::Range(1, 9))->required();
  sim->add_option("--n", scfg.n, "Subjects per group")->capture_default_str();
  sim->add_option("--reps", scfg.reps, "Replications")->capture_default_str();
  sim->add_option("--theta-fit", scfg.theta_fits, "Clayton parameters used for estimation")
      ->delimiter(',')
      ->capture_default_str();
  sim->add_option("--alpha", scfg.alphas, "Significance levels")->delimiter(',')->capture_default_str();
  sim->add_option("--calibration-reps", scfg.calibration_reps, "Monte Carlo replicates per test")
      ->capture_default_str();
  auto* sim_seed = sim->add_option("--seed", scfg.seed, "RNG seed (default: $CGFACT_SEED or 20240101)");
  sim->add_option("--json", sim_json, "Write the JSON report here ('-' for stdout)");
  sim->add_flag("-q,--quiet", sim_quiet, "Suppress the text tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  set_worker_count(threads);

  InputData* loaded = nullptr;
  std::optional<InputData> input;
  try {
    if (analyze_cmd->parsed()) {
      resolve_seed(analyze_seed, acfg.seed, acfg.seed_source);
      acfg.family = kFamilies.at(family_text);
      if (tau_text != "auto") {
        try {
          std::size_t used = 0;
          acfg.tau = std::stod(tau_text, &used);
          if (used != tau_text.size()) throw std::invalid_argument(tau_text);
        } catch (const std::exception&) {
          throw UsageError("--tau must be a number or 'auto', got '" + tau_text + "'");
        }
      }
      acfg.method = method_text == "sim"        ? CalibrationMethod::Simulation
                    : method_text == "analytic" ? CalibrationMethod::Analytic
                                                : CalibrationMethod::Both;
      acfg.ci_scale = ci_text == "logit" ? CiScale::Logit : CiScale::Plain;
      input.emplace(read_csv(acfg.input));
      loaded = &*input;
      const Json report = analyze(acfg, *loaded);
      if (!analyze_quiet) render_analysis(report, analyze_json == "-" ? err : out);
      if (!analyze_json.empty()) write_json(report, analyze_json, out);
    } else if (curves->parsed()) {
      const CopulaFamily curves_family = kFamilies.at(curves_family_text);
      for (double theta : curves_thetas) {
        try {
          make_copula(curves_family, theta);
        } catch (const DomainError& e) {
          throw UsageError(e.what());
        }
      }
      input.emplace(read_csv(curves_input));
      loaded = &*input;
      write_to(curves_out, out, [&](std::ostream& s) { write_curves(loaded->data, curves_family, curves_thetas, s); });
    } else if (sim->parsed()) {
      resolve_seed(sim_seed, scfg.seed, scfg.seed_source);
      const Json report = simulate(scfg);
      if (!sim_quiet) render_simulation(report, sim_json == "-" ? err : out);
      if (!sim_json.empty()) write_json(report, sim_json, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IngestionError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitIngestion;
  } catch (const OutputError& e) {
    err << "output error: " << e.what() << "\n";
    return kExitOutput;
  } catch (const Error& e) {
    // Library validation failures while the file is still being turned into
    // a dataset are input problems; everything later is numerical.
    err << (loaded == nullptr ? "input error: " : "numerical error: ") << e.what() << "\n";
    return loaded == nullptr ? kExitIngestion : kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace cgfact::cli
