#include "cgfact/cli/analyze.hpp"

#include <cstdio>
#include <ostream>

#include "cgfact/effects.hpp"

namespace cgfact::cli {

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string fixed(const Json& v, int decimals) {
  if (v.is_null()) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v.get<double>());
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

Json layout_json(const Layout& layout) {
  Json j;
  if (layout.kind == Layout::Kind::OneWay) {
    j["kind"] = "one-way";
    j["groups"] = layout.groups();
  } else {
    j["kind"] = "two-way";
    j["a"] = layout.a;
    j["b"] = layout.b;
  }
  return j;
}

}  // namespace

std::string to_string(CalibrationMethod m) {
  switch (m) {
    case CalibrationMethod::Simulation: return "sim";
    case CalibrationMethod::Analytic: return "analytic";
    case CalibrationMethod::Both: return "both";
  }
  return "both";
}

std::string to_string(SeedSource s) {
  switch (s) {
    case SeedSource::Default: return "default";
    case SeedSource::Environment: return "env";
    case SeedSource::Flag: return "flag";
  }
  return "default";
}

Contrast select_contrast(const AnalysisConfig& cfg, const Layout& layout) {
  const std::size_t d = layout.groups();
  if (!cfg.contrast_file.empty()) {
    const Eigen::MatrixXd m = read_matrix_csv(cfg.contrast_file);
    try {
      return validate_contrast(m, d);
    } catch (const ValidationError& e) {
      throw UsageError(cfg.contrast_file + ": " + e.what());
    }
  }
  if (cfg.contrast == "global") return one_way_global(d);
  if (cfg.contrast == "main-a" || cfg.contrast == "main-b" || cfg.contrast == "interaction") {
    if (layout.kind != Layout::Kind::TwoWay)
      throw UsageError("contrast '" + cfg.contrast + "' needs a two-way input (time,status,factor_a,factor_b)");
    const auto c = two_way_contrasts(layout.a, layout.b);
    if (cfg.contrast == "main-a") return c.main_a;
    if (cfg.contrast == "main-b") return c.main_b;
    return c.interaction;
  }
  throw UsageError("unknown contrast '" + cfg.contrast + "'");
}

Json analyze(const AnalysisConfig& cfg, const InputData& input) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
  if (cfg.thetas.empty()) throw UsageError("the theta list is empty");
  if (uses_simulation(cfg.method) && cfg.reps < 100)
    throw UsageError("--reps must be at least 100 for the simulation calibration");
  if (cfg.family == CopulaFamily::FGM)
    throw UsageError("the FGM copula is not Archimedean and cannot drive the copula-graphic estimator");
  if (cfg.tau && !(*cfg.tau > 0.0)) throw UsageError("tau must be positive");

  // Validate every theta before any numerical work.
  std::vector<CopulaSpec> copulas;
  for (double theta : cfg.thetas) {
    try {
      copulas.push_back(make_copula(cfg.family, theta));
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
  }

  const Dataset& data = input.data;
  const Contrast contrast = select_contrast(cfg, data.layout());
  const double tau = cfg.tau ? *cfg.tau : resolve_tau(data, TauPolicy::LeaveOneOutSafe);

  Json report;
  Json& echo = report["config_echo"];
  echo["input"] = cfg.input;
  echo["layout"] = layout_json(data.layout());
  Json groups = Json::array();
  for (const auto& g : data.groups()) groups.push_back({{"label", g.label()}, {"n", g.size()}, {"events", g.event_count()}});
  echo["groups"] = groups;
  echo["family"] = std::string(cgfact::to_string(cfg.family));
  echo["thetas"] = cfg.thetas;
  echo["tau"] = cfg.tau ? Json(*cfg.tau) : Json("auto");
  echo["tau_resolved"] = tau;
  echo["contrast"] = cfg.contrast_file.empty() ? cfg.contrast : "file:" + cfg.contrast_file;
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < contrast.matrix.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < contrast.matrix.cols(); ++c) row.push_back(contrast.matrix(r, c));
    rows.push_back(row);
  }
  echo["contrast_matrix"] = rows;
  echo["alpha"] = cfg.alpha;
  echo["method"] = to_string(cfg.method);
  echo["reps"] = uses_simulation(cfg.method) ? cfg.reps : 0;
  echo["seed"] = cfg.seed;
  echo["seed_source"] = to_string(cfg.seed_source);
  echo["ci_scale"] = cfg.ci_scale == CiScale::Logit ? "logit" : "plain";

  Json warnings = Json::array();
  for (const auto& w : input.warnings) warnings.push_back(w);

  TestOptions options;
  options.alpha = cfg.alpha;
  options.method = cfg.method;
  options.reps = cfg.reps;
  options.seed = cfg.seed;

  Json per_theta = Json::array();
  for (std::size_t k = 0; k < copulas.size(); ++k) {
    const CopulaSpec& copula = copulas[k];
    const EffectsEstimate est = estimate_effects(data, copula, tau);
    const CovarianceEstimate cov = jackknife_covariance(data, copula, tau);
    const auto cis = confidence_intervals(est, cov, 0.05, cfg.ci_scale);
    const TestResult test = test_hypothesis(est.p_hat, cov, contrast, data.total_size(), options);

    Json block;
    block["theta"] = cfg.thetas[k];
    block["copula"] = copula.describe();
    block["kendall_tau"] = copula.kendalls_tau();
    block["tau_used"] = est.tau_used;
    Json effects = Json::array();
    for (std::size_t i = 0; i < data.group_count(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      effects.push_back({{"group", data.group(i).label()},
                         {"p_hat", est.p_hat(ii)},
                         {"se", cov.se(ii)},
                         {"ci_lo", cis[i].lo},
                         {"ci_hi", cis[i].hi}});
    }
    block["effects"] = effects;
    Json t;
    t["f"] = test.f_value;
    t["trace_tv"] = test.trace_tv;
    t["eigenvalues"] = test.eigenvalues;
    t["crit_sim"] = optional_number(test.crit_sim);
    t["crit_analytic"] = optional_number(test.crit_analytic);
    t["p_sim"] = optional_number(test.p_sim);
    t["p_analytic"] = optional_number(test.p_analytic);
    t["f_hat_dof"] = optional_number(test.f_hat_dof);
    t["reject_sim"] = uses_simulation(cfg.method) ? Json(test.reject_sim) : Json(nullptr);
    t["reject_analytic"] = uses_analytic(cfg.method) ? Json(test.reject_analytic) : Json(nullptr);
    t["vacuous"] = test.vacuous;
    block["test"] = t;
    per_theta.push_back(block);
    if (test.vacuous && k == 0) warnings.push_back("the contrast matrix is zero; the test is vacuous");
  }
  report["per_theta"] = per_theta;
  report["warnings"] = warnings;
  return report;
}

void render_analysis(const Json& report, std::ostream& out) {
  const Json& echo = report.at("config_echo");
  out << "Copula family: " << echo.at("family").get<std::string>()
      << "   tau: " << fixed(echo.at("tau_resolved"), 4)
      << (echo.at("tau").is_string() ? " (auto)" : "")
      << "   contrast: " << echo.at("contrast").get<std::string>()
      << "   alpha: " << echo.at("alpha").get<double>() << "\n\n";

  out << "Estimated treatment effects (95% CI)\n";
  std::size_t label_width = 5;
  for (const auto& g : echo.at("groups")) label_width = std::max(label_width, g.at("label").get<std::string>().size());
  out << pad("theta", 7) << "  " << pad("group", label_width) << pad("p_hat", 8) << pad("SE", 8)
      << "  95% CI\n";
  for (const auto& block : report.at("per_theta")) {
    for (const auto& e : block.at("effects")) {
      out << pad(fixed(block.at("theta"), 2), 7) << "  " << pad(e.at("group").get<std::string>(), label_width)
          << pad(fixed(e.at("p_hat"), 3), 8) << pad(fixed(e.at("se"), 3), 8) << "  (" << fixed(e.at("ci_lo"), 3)
          << ", " << fixed(e.at("ci_hi"), 3) << ")\n";
    }
  }

  out << "\nTest of H0: C p = 0\n";
  out << pad("theta", 7) << pad("F-value", 10) << pad("crit(sim)", 11) << pad("p(sim)", 9)
      << pad("crit(an)", 10) << pad("p(an)", 9) << pad("df", 8) << "\n";
  for (const auto& block : report.at("per_theta")) {
    const Json& t = block.at("test");
    out << pad(fixed(block.at("theta"), 2), 7) << pad(fixed(t.at("f"), 4), 10)
        << pad(fixed(t.at("crit_sim"), 4), 11) << pad(fixed(t.at("p_sim"), 4), 9)
        << pad(fixed(t.at("crit_analytic"), 4), 10) << pad(fixed(t.at("p_analytic"), 4), 9)
        << pad(fixed(t.at("f_hat_dof"), 2), 8) << "\n";
  }
  if (!report.at("warnings").empty()) {
    out << "\nWarnings:\n";
    for (const auto& w : report.at("warnings")) out << "  - " << w.get<std::string>() << "\n";
  }
}

}  // namespace cgfact::cli
