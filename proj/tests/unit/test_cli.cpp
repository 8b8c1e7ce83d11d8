#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cgfact/cli/commands.hpp"

using namespace cgfact;
using namespace cgfact::cli;
namespace fs = std::filesystem;

namespace {

const std::string kData = std::string(CGFACT_TEST_DATA_DIR) + "/three_groups.csv";

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cgfact");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "cgfact_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string write_temp(const std::string& name, const std::string& content) {
  const auto p = temp_file(name);
  std::ofstream(p, std::ios::binary) << content;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const char* kNineRows =
    "time,status,group\n"
    "2.0,1,B\n1.5,0,A\n3.0,1,C\n0.5,1,A\n1.0,1,B\n2.5,0,C\n0.7,1,A\n1.2,1,C\n2.2,0,B\n";

}  // namespace

TEST(ReadCsv, OneWayOrdering) {
  const auto in = parse_csv(kNineRows);
  ASSERT_EQ(in.data.group_count(), 3u);
  EXPECT_EQ(in.data.group(0).label(), "A");
  EXPECT_EQ(in.data.group(1).label(), "B");
  EXPECT_EQ(in.data.group(2).label(), "C");
  EXPECT_EQ(in.data.group(0).records()[0].time, 0.5);
  EXPECT_EQ(in.data.layout(), Layout::one_way(3));
}

TEST(ReadCsv, TwoWayRowMajor) {
  std::string text = "time,status,factor_a,factor_b\n";
  const std::vector<std::string> a{"a2", "a1"};
  const std::vector<std::string> b{"b3", "b1", "b2"};
  double t = 0.1;
  for (int rep = 0; rep < 3; ++rep)
    for (const auto& x : a)
      for (const auto& y : b) {
        text += std::to_string(t) + ",1," + x + "," + y + "\n";
        t += 0.1;
      }
  const auto in = parse_csv(text);
  ASSERT_EQ(in.data.group_count(), 6u);
  EXPECT_EQ(in.data.layout(), Layout::two_way(2, 3));
  const std::vector<std::string> expected{"a1:b1", "a1:b2", "a1:b3", "a2:b1", "a2:b2", "a2:b3"};
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(in.data.group(i).label(), expected[i]);
}

TEST(ReadCsv, ErrorsNameTheLine) {
  try {
    parse_csv("time,status,group\n1,1,A\nabc,1,A\n", "f.csv");
    FAIL();
  } catch (const IngestionError& e) {
    EXPECT_NE(std::string(e.what()).find("f.csv:3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_csv("t,s,g\n1,1,A\n"), IngestionError);
  EXPECT_THROW(parse_csv("time,status,group\n1,2,A\n"), IngestionError);
  EXPECT_THROW(parse_csv("time,status,group\n1,1\n"), IngestionError);
  EXPECT_THROW(parse_csv("time,status,group\n1,,A\n"), IngestionError);
  EXPECT_THROW(parse_csv("time,status,group\n-1,1,A\n"), IngestionError);
  EXPECT_THROW(parse_csv(""), IngestionError);
  // Group with fewer than three subjects.
  EXPECT_THROW(parse_csv("time,status,group\n1,1,A\n2,1,A\n3,1,A\n1,1,B\n2,1,B\n"), IngestionError);
  // Missing cell in a two-way layout.
  EXPECT_THROW(parse_csv("time,status,factor_a,factor_b\n1,1,x,u\n1,1,x,u\n1,1,x,u\n"
                         "1,1,x,v\n1,1,x,v\n1,1,x,v\n1,1,y,u\n1,1,y,u\n1,1,y,u\n"),
               IngestionError);
}

TEST(ReadCsv, WarningsForTiesAndSmallGroups) {
  const auto in = parse_csv("time,status,group\n1,1,A\n1,0,A\n2,1,A\n1,1,B\n2,1,B\n3,0,B\n");
  ASSERT_GE(in.warnings.size(), 3u);
  EXPECT_NE(in.warnings[0].find("tied"), std::string::npos);
}

TEST(Analyze, FourThetaBlocksAndIndependenceReduction) {
  AnalysisConfig cfg;
  cfg.input = kData;
  cfg.reps = 200;
  const auto input = read_csv(kData);
  const Json report = analyze(cfg, input);
  ASSERT_EQ(report.at("per_theta").size(), 4u);
  for (const auto& block : report.at("per_theta")) {
    const Json& t = block.at("test");
    EXPECT_GE(t.at("f").get<double>(), 0.0);
    EXPECT_GT(t.at("crit_sim").get<double>(), 0.0);
    EXPECT_GT(t.at("crit_analytic").get<double>(), 0.0);
    for (const char* k : {"p_sim", "p_analytic"}) {
      EXPECT_GE(t.at(k).get<double>(), 0.0);
      EXPECT_LE(t.at(k).get<double>(), 1.0);
    }
    EXPECT_EQ(block.at("effects").size(), 3u);
  }

  AnalysisConfig indep = cfg;
  indep.family = CopulaFamily::Independence;
  indep.thetas = {0.0};
  const Json km = analyze(indep, input);
  EXPECT_EQ(km.at("per_theta")[0].at("effects"), report.at("per_theta")[0].at("effects"));
  EXPECT_EQ(km.at("per_theta")[0].at("test"), report.at("per_theta")[0].at("test"));
}

TEST(Analyze, JsonRoundTrips) {
  AnalysisConfig cfg;
  cfg.input = kData;
  cfg.reps = 200;
  const Json report = analyze(cfg, read_csv(kData));
  const std::string text = report.dump(2);
  const Json back = Json::parse(text);
  EXPECT_EQ(back, report);
  EXPECT_EQ(back.dump(2), text);
}

TEST(Analyze, ContrastSelection) {
  AnalysisConfig cfg;
  cfg.contrast = "main-a";
  EXPECT_THROW(select_contrast(cfg, Layout::one_way(3)), UsageError);
  EXPECT_EQ(select_contrast(cfg, Layout::two_way(2, 3)).kind, ContrastKind::MainA);
  cfg.contrast_file = write_temp("contrast.csv", "1,-1,0\n0,1,-1\n");
  EXPECT_EQ(select_contrast(cfg, Layout::one_way(3)).matrix.rows(), 2);
  cfg.contrast_file = write_temp("bad_contrast.csv", "1,0,0\n");
  EXPECT_THROW(select_contrast(cfg, Layout::one_way(3)), UsageError);
}

TEST(Cli, AnalyzeIsByteIdenticalUnderFixedSeed) {
  const auto a = temp_file("a.json").string();
  const auto b = temp_file("b.json").string();
  const auto r1 = run_cli({"analyze", "-i", kData, "--seed", "7", "--reps", "300", "--json", a, "-q"});
  const auto r2 = run_cli({"analyze", "-i", kData, "--seed", "7", "--reps", "300", "--json", b, "-q", "--threads", "2"});
  ASSERT_EQ(r1.code, 0) << r1.err;
  ASSERT_EQ(r2.code, 0) << r2.err;
  EXPECT_EQ(slurp(a), slurp(b));
  const Json j = Json::parse(slurp(a));
  EXPECT_EQ(j.at("config_echo").at("seed").get<std::uint64_t>(), 7u);
  EXPECT_EQ(j.at("config_echo").at("seed_source"), "flag");
}

TEST(Cli, SeedFromEnvironmentIsEchoed) {
  ::setenv(kSeedEnvVar, "4242", 1);
  const auto r = run_cli({"analyze", "-i", kData, "--theta", "2", "--reps", "200", "--json", "-", "-q"});
  ::unsetenv(kSeedEnvVar);
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j.at("config_echo").at("seed").get<std::uint64_t>(), 4242u);
  EXPECT_EQ(j.at("config_echo").at("seed_source"), "env");
}

TEST(Cli, TextTablesPrinted) {
  const auto r = run_cli({"analyze", "-i", kData, "--theta", "0,2", "--method", "analytic"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("F-value"), std::string::npos);
  EXPECT_NE(r.out.find("95% CI"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli({}).code, kExitUsage);
  EXPECT_EQ(run_cli({"analyze"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"analyze", "-i", kData, "--alpha", "2"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"analyze", "-i", kData, "--contrast", "main-a"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"analyze", "-i", kData, "--family", "clayton", "--theta", "-3"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"analyze", "-i", "/nonexistent/file.csv"}).code, kExitIngestion);
  const auto bad = write_temp("bad.csv", "time,status,group\nabc,1,A\n");
  const auto r = run_cli({"analyze", "-i", bad});
  EXPECT_EQ(r.code, kExitIngestion);
  EXPECT_NE(r.err.find(":2:"), std::string::npos) << r.err;
  // tau beyond the data: leave-one-out curves are undefined there.
  EXPECT_EQ(run_cli({"analyze", "-i", kData, "--tau", "50", "-q"}).code, kExitNumeric);
  EXPECT_EQ(run_cli({"analyze", "-i", kData, "--tau", "soon"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"analyze", "-i", kData, "--json", "/nonexistent/dir/out.json", "-q",
                     "--method", "analytic"}).code,
            kExitOutput);
  EXPECT_EQ(run_cli({"simulate", "--scenario", "10"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"--help"}).code, kExitOk);
}

TEST(Cli, ExportCurves) {
  const auto path = temp_file("curves.csv");
  const auto r = run_cli({"export-curves", "-i", kData, "--theta", "0,2", "-o", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "group,theta,time,survival");
  std::vector<std::string> starts;
  std::map<std::string, std::size_t> knots;
  while (std::getline(in, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const std::string key = line.substr(0, c2);
    if (knots[key]++ == 0) starts.push_back(line.substr(c2 + 1));
  }
  EXPECT_EQ(knots.size(), 6u);
  for (const auto& s : starts) EXPECT_EQ(s, "0,1");
  const auto input = read_csv(kData);
  for (const auto& g : input.data.groups()) {
    std::vector<double> distinct_events;
    for (const auto& rec : g.records())
      if (rec.is_event() && (distinct_events.empty() || distinct_events.back() != rec.time))
        distinct_events.push_back(rec.time);
    EXPECT_EQ(knots[g.label() + ",0"], distinct_events.size() + 1);
    EXPECT_EQ(knots[g.label() + ",2"], distinct_events.size() + 1);
  }
}

TEST(Cli, SimulateSmallRun) {
  const auto r = run_cli({"simulate", "--scenario", "1", "--n", "20", "--reps", "100", "--calibration-reps",
                          "200", "--theta-fit", "1,2", "--json", "-", "-q", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  ASSERT_EQ(j.at("results").size(), 2u);
  const Json& first = j.at("results")[0];
  EXPECT_EQ(first.at("rejection").size(), 3u);
  EXPECT_EQ(first.at("effects").size(), 3u);
  for (const auto& rej : first.at("rejection")) {
    EXPECT_GE(rej.at("sim").get<double>(), 0.0);
    EXPECT_LE(rej.at("analytic").get<double>(), 1.0);
  }
}
