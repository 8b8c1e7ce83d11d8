#include "cgfact/cli/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace cgfact::cli {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos
                                                                                       : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw IngestionError(source + ":" + std::to_string(line) + ": " + what);
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Row {
  CensoredRecord record;
  std::string key_a;
  std::string key_b;
};

}  // namespace

InputData parse_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;

  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split(line);
      break;
    }
  }
  if (header.empty()) throw IngestionError(source + ": empty file, expected a header line");
  if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].erase(0, 3);

  bool two_way = false;
  if (header == std::vector<std::string>{"time", "status", "group"}) {
    two_way = false;
  } else if (header == std::vector<std::string>{"time", "status", "factor_a", "factor_b"}) {
    two_way = true;
  } else {
    fail(source, line_no, "header must be 'time,status,group' or 'time,status,factor_a,factor_b'");
  }
  const std::size_t width = header.size();

  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split(line);
    if (f.size() != width)
      fail(source, line_no, "expected " + std::to_string(width) + " fields, found " + std::to_string(f.size()));
    for (std::size_t k = 0; k < width; ++k)
      if (f[k].empty()) fail(source, line_no, "missing value for '" + header[k] + "'");

    double time = 0.0;
    if (!parse_number(f[0], time)) fail(source, line_no, "time '" + f[0] + "' is not a number");
    if (!std::isfinite(time) || time <= 0.0) fail(source, line_no, "time must be positive and finite");
    if (f[1] != "0" && f[1] != "1") fail(source, line_no, "status '" + f[1] + "' must be 0 or 1");
    rows.push_back({{time, f[1] == "1" ? 1 : 0}, f[2], two_way ? f[3] : std::string()});
  }
  if (rows.empty()) throw IngestionError(source + ": no data rows");

  std::vector<std::string> warnings;
  std::vector<std::string> labels;
  std::map<std::string, std::vector<CensoredRecord>> cells;
  Layout layout;
  if (!two_way) {
    for (const auto& r : rows) cells[r.key_a].push_back(r.record);
    for (const auto& [label, recs] : cells) labels.push_back(label);
    layout = Layout::one_way(labels.size());
  } else {
    std::vector<std::string> levels_a, levels_b;
    for (const auto& r : rows) {
      levels_a.push_back(r.key_a);
      levels_b.push_back(r.key_b);
      cells[r.key_a + ":" + r.key_b].push_back(r.record);
    }
    for (auto* v : {&levels_a, &levels_b}) {
      std::sort(v->begin(), v->end());
      v->erase(std::unique(v->begin(), v->end()), v->end());
    }
    if (levels_a.size() < 2 || levels_b.size() < 2)
      throw IngestionError(source + ": a two-way design needs at least two levels of each factor");
    for (const auto& a : levels_a) {
      for (const auto& b : levels_b) {
        const std::string label = a + ":" + b;
        if (!cells.contains(label))
          throw IngestionError(source + ": cell (" + a + ", " + b + ") has no subjects");
        labels.push_back(label);
      }
    }
    if (cells.size() != labels.size())
      throw IngestionError(source + ": factor levels containing ':' make cell labels ambiguous");
    layout = Layout::two_way(levels_a.size(), levels_b.size());
  }
  if (labels.size() < 2) throw IngestionError(source + ": need at least two groups");

  std::vector<GroupedSample> groups;
  for (const auto& label : labels) {
    auto& recs = cells.at(label);
    if (recs.size() < kMinGroupSize)
      throw IngestionError(source + ": group '" + label + "' has " + std::to_string(recs.size()) +
                           " subjects, at least " + std::to_string(kMinGroupSize) + " are required");
    GroupedSample g = group_sample(std::move(recs), label);
    if (g.tie_count() > 0)
      warnings.push_back("group '" + label + "' has " + std::to_string(g.tie_count()) +
                         " tied observation time(s); ties are processed in sorted order");
    if (g.size() < kSmallGroupWarning)
      warnings.push_back("group '" + label + "' is small (n = " + std::to_string(g.size()) + ")");
    if (g.event_count() == 0) warnings.push_back("group '" + label + "' has no events");
    groups.push_back(std::move(g));
  }
  return {Dataset(std::move(groups), layout), std::move(warnings)};
}

InputData read_csv(const std::filesystem::path& path) { return parse_csv(read_file(path), path.string()); }

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  const std::string source = path.string();
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    for (const auto& field : split(line)) {
      double v = 0.0;
      if (!parse_number(field, v) || !std::isfinite(v))
        fail(source, line_no, "'" + field + "' is not a finite number");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      fail(source, line_no, "row has " + std::to_string(row.size()) + " entries, expected " +
                                std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IngestionError(source + ": contrast file is empty");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

}  // namespace cgfact::cli
