#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "fol/cli.hpp"
#include "fol/error.hpp"

namespace fol::cli {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, int line) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end || !std::isfinite(v))
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": not a finite number: '" + s + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error(ErrorKind::InvalidArgument, "cannot format number");
  return std::string(buf, ptr);
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorKind::InvalidArgument, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorKind::InvalidArgument, "cannot rename onto " + path.string() + ": " + ec.message());
  }
}

DiscreteMeasure parse_measure_csv(const std::string& text, std::ostream* warn) {
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  int dim = 0;
  DiscreteMeasure mu;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(trim(line));
    if (dim == 0) {
      if (cells == std::vector<std::string>{"x", "weight"})
        dim = 1;
      else if (cells == std::vector<std::string>{"x", "y", "weight"})
        dim = 2;
      else
        throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": header must be x,weight or x,y,weight");
      continue;
    }
    if (static_cast<int>(cells.size()) != dim + 1)
      throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": expected " + std::to_string(dim + 1) +
                                             " fields, got " + std::to_string(cells.size()));
    const double x = parse_number(cells[0], lineno);
    const double y = dim == 2 ? parse_number(cells[1], lineno) : 0.0;
    const double w = parse_number(cells.back(), lineno);
    if (w < 0.0) throw Error(ErrorKind::NegativeWeight, "line " + std::to_string(lineno) + ": negative weight");
    mu.points.push_back({wrap01(x), dim == 2 ? wrap01(y) : 0.0});
    mu.weights.push_back(w);
  }
  if (dim == 0) throw Error(ErrorKind::ParseError, "line 1: missing header");
  if (mu.points.empty()) throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": no data rows");
  mu.dim = dim;
  const double total = mu.total();
  if (!(total > 0.0)) throw Error(ErrorKind::ParseError, "weights sum to zero");
  if (std::abs(total - 1.0) > 1e-6) {
    if (warn) *warn << "warning: weights sum to " << format_double(total) << "; renormalized to 1\n";
    for (auto& w : mu.weights) w /= total;
  }
  return mu;
}

DiscreteMeasure read_measure_csv(const std::filesystem::path& path, std::ostream* warn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_measure_csv(ss.str(), warn);
}

std::string measure_csv(const DiscreteMeasure& mu) {
  std::string out = mu.dim == 1 ? "x,weight\n" : "x,y,weight\n";
  for (std::size_t i = 0; i < mu.size(); ++i) {
    out += format_double(mu.points[i].x);
    if (mu.dim == 2) out += "," + format_double(mu.points[i].y);
    out += "," + format_double(mu.weights[i]) + "\n";
  }
  return out;
}

bool ExperimentResult::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

std::string results_csv(const ExperimentResult& result) {
  std::string out;
  for (std::size_t i = 0; i < result.header.size(); ++i) out += (i ? "," : "") + result.header[i];
  out += "\n";
  for (const auto& row : result.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
    out += "\n";
  }
  return out;
}

void write_outputs(const ExperimentResult& result, const std::filesystem::path& out_dir, double wall_seconds) {
  std::filesystem::create_directories(out_dir);
  write_atomic(out_dir / "results.csv", results_csv(result));
  json checks = json::array();
  for (const auto& c : result.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  const json report = {{"experiment", result.experiment},
                       {"config", result.config},
                       {"columns", result.header},
                       {"summary", result.summary},
                       {"checks", checks},
                       {"passed", result.passed()},
                       {"wall_clock_seconds", wall_seconds}};
  write_atomic(out_dir / "report.json", report.dump(2) + "\n");
  write_atomic(out_dir / "constants.json", result.constants.dump(2) + "\n");
}

}  // namespace fol::cli
