#include "cgfact/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace cgfact::cli {

namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

Json summary_json(const ReplicationSummary& s) {
  Json j;
  j["theta_fit"] = s.theta_fit;
  j["reps_requested"] = s.reps_requested;
  j["reps_completed"] = s.reps_completed;
  j["failures"] = s.failures;
  j["failure_messages"] = s.failure_messages;
  Json effects = Json::array();
  for (const auto& e : s.effects)
    effects.push_back({{"truth", e.truth},
                       {"mean", e.mean},
                       {"bias", e.bias},
                       {"sd", e.sd},
                       {"mean_se", e.mean_se},
                       {"coverage", e.coverage}});
  j["effects"] = effects;
  Json rejection = Json::array();
  for (std::size_t k = 0; k < s.alphas.size(); ++k)
    rejection.push_back({{"alpha", s.alphas[k]}, {"sim", s.rejection_sim[k]}, {"analytic", s.rejection_analytic[k]}});
  j["rejection"] = rejection;
  return j;
}

}  // namespace

void write_curves(const Dataset& data, CopulaFamily family, const std::vector<double>& thetas,
                  std::ostream& out) {
  std::vector<CopulaSpec> copulas;
  for (double theta : thetas) copulas.push_back(make_copula(family, theta));
  out << "group,theta,time,survival\n";
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    const std::string theta = format_double(thetas[k]);
    for (const auto& g : data.groups()) {
      const StepSurvival s = cg_survival(g, copulas[k]);
      out << g.label() << ',' << theta << ",0,1\n";
      const auto t = s.jump_times();
      const auto v = s.values();
      for (std::size_t j = 0; j < t.size(); ++j)
        out << g.label() << ',' << theta << ',' << format_double(t[j]) << ',' << format_double(v[j]) << '\n';
    }
  }
}

Json simulate(const SimulateConfig& cfg) {
  Scenario s;
  try {
    s = scenario(cfg.scenario);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  if (cfg.n < 3) throw UsageError("--n must be at least 3");
  if (cfg.reps < 100) throw UsageError("--reps must be at least 100");
  if (cfg.calibration_reps < 100) throw UsageError("--calibration-reps must be at least 100");
  if (cfg.theta_fits.empty()) throw UsageError("the theta-fit list is empty");
  for (double a : cfg.alphas)
    if (!(a > 0.0 && a < 1.0)) throw UsageError("alpha must lie in (0, 1)");
  for (double t : cfg.theta_fits)
    if (!(t >= 0.0) || !std::isfinite(t)) throw UsageError("Clayton theta-fit values must be >= 0");

  ReplicationOptions options;
  options.calibration_reps = cfg.calibration_reps;
  const auto results = misspecification_sweep(s, cfg.n, cfg.theta_fits, cfg.reps, cfg.seed, cfg.alphas, options);

  Json report;
  Json& echo = report["config_echo"];
  echo["scenario"] = s.id;
  echo["layout"] = s.layout.kind == Layout::Kind::OneWay ? "one-way" : "two-way";
  echo["groups"] = s.layout.groups();
  echo["lambda"] = s.lambda;
  echo["mu"] = s.mu;
  echo["theta_true"] = s.theta_true;
  echo["tau"] = s.tau;
  echo["contrast"] = std::string(to_string(designated_contrast(s).kind));
  echo["n_per_group"] = cfg.n;
  echo["reps"] = cfg.reps;
  echo["theta_fits"] = cfg.theta_fits;
  echo["alphas"] = cfg.alphas;
  echo["calibration_reps"] = cfg.calibration_reps;
  echo["seed"] = cfg.seed;
  echo["seed_source"] = to_string(cfg.seed_source);
  Json list = Json::array();
  Json warnings = Json::array();
  for (const auto& r : results) {
    list.push_back(summary_json(r));
    if (r.failures > 0)
      warnings.push_back("theta_fit " + format_double(r.theta_fit) + ": " + std::to_string(r.failures) +
                         " replication(s) failed and were excluded");
  }
  report["results"] = list;
  report["warnings"] = warnings;
  return report;
}

void render_simulation(const Json& report, std::ostream& out) {
  const Json& echo = report.at("config_echo");
  out << "Scenario " << echo.at("scenario").get<int>() << " (" << echo.at("layout").get<std::string>()
      << ", contrast " << echo.at("contrast").get<std::string>() << "), n = " << echo.at("n_per_group").get<std::size_t>()
      << " per group, " << echo.at("reps").get<std::size_t>() << " replications, theta_true = "
      << echo.at("theta_true").get<double>() << "\n\n";

  out << "Rejection rates\n" << pad("theta_fit", 9) << pad("method", 10);
  for (const auto& a : echo.at("alphas")) out << pad("a=" + fixed(a.get<double>(), 2), 9);
  out << "\n";
  for (const auto& r : report.at("results")) {
    for (const char* method : {"sim", "analytic"}) {
      out << pad(fixed(r.at("theta_fit").get<double>(), 2), 9) << pad(method, 10);
      for (const auto& rej : r.at("rejection")) out << pad(fixed(rej.at(method).get<double>(), 3), 9);
      out << "\n";
    }
  }

  out << "\nEffect estimates\n" << pad("theta_fit", 9) << pad("group", 7) << pad("truth", 8) << pad("mean", 8)
      << pad("bias", 8) << pad("SD", 8) << pad("mean SE", 9) << pad("cover", 8) << "\n";
  for (const auto& r : report.at("results")) {
    std::size_t i = 0;
    for (const auto& e : r.at("effects")) {
      out << pad(fixed(r.at("theta_fit").get<double>(), 2), 9) << pad(std::to_string(++i), 7)
          << pad(fixed(e.at("truth").get<double>(), 3), 8) << pad(fixed(e.at("mean").get<double>(), 3), 8)
          << pad(fixed(e.at("bias").get<double>(), 3), 8) << pad(fixed(e.at("sd").get<double>(), 3), 8)
          << pad(fixed(e.at("mean_se").get<double>(), 3), 9) << pad(fixed(e.at("coverage").get<double>(), 3), 8)
          << "\n";
    }
  }
  if (!report.at("warnings").empty()) {
    out << "\nWarnings:\n";
    for (const auto& w : report.at("warnings")) out << "  - " << w.get<std::string>() << "\n";
  }
}

}  // namespace cgfact::cli
