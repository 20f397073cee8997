#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"

#include "fol/cli.hpp"
#include "fol/error.hpp"

using namespace fol;
using namespace fol::cli;

namespace {

template <typename Fn>
std::pair<ErrorKind, std::string> failure_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return {e.kind(), e.what()};
  }
  FAIL("expected an error");
  return {ErrorKind::InvalidArgument, ""};
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("fol_cli_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("format_double round-trips") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("measure csv round trip") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec2> pts;
  std::vector<double> ws;
  for (int i = 0; i < 100; ++i) {
    pts.push_back({u(rng), u(rng)});
    ws.push_back(u(rng) + 0.01);
  }
  const auto mu = normalized(DiscreteMeasure::torus(pts, ws));
  const auto dir = scratch_dir("roundtrip");
  write_atomic(dir / "mu.csv", measure_csv(mu));
  std::ostringstream warn;
  const auto back = read_measure_csv(dir / "mu.csv", &warn);
  REQUIRE(back.size() == mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    CHECK(back.points[i].x == mu.points[i].x);
    CHECK(back.points[i].y == mu.points[i].y);
    CHECK(back.weights[i] == mu.weights[i]);
  }
  CHECK(warn.str().empty());

  const auto circle = parse_measure_csv("x,weight\n0.25,0.5\n0.75,0.5\n");
  CHECK(circle.dim == 1);
  CHECK(parse_measure_csv(measure_csv(circle)).weights == circle.weights);
}

TEST_CASE("measure csv errors") {
  auto [kind, msg] = failure_of([] { parse_measure_csv("x,weight\n0.1,0.5\n0.2,-0.5\n"); });
  CHECK(kind == ErrorKind::NegativeWeight);
  CHECK(msg.find("line 3") != std::string::npos);

  std::tie(kind, msg) = failure_of([] { parse_measure_csv("x,y,weight\n0.1,0.2,0.5\n0.3,abc,0.5\n"); });
  CHECK(kind == ErrorKind::ParseError);
  CHECK(msg.find("line 3") != std::string::npos);

  std::tie(kind, msg) = failure_of([] { parse_measure_csv("x,y,weight\n0.1,0.5\n"); });
  CHECK(kind == ErrorKind::ParseError);
  CHECK(msg.find("line 2") != std::string::npos);

  CHECK(failure_of([] { parse_measure_csv("a,b\n1,2\n"); }).first == ErrorKind::ParseError);
  CHECK(failure_of([] { parse_measure_csv("x,weight\n"); }).first == ErrorKind::ParseError);
}

TEST_CASE("weights summing to 2 are renormalized with a warning") {
  std::ostringstream warn;
  const auto mu = parse_measure_csv("x,weight\n0.1,1\n0.6,1\n", &warn);
  CHECK(mu.weights[0] == 0.5);
  CHECK(mu.weights[1] == 0.5);
  CHECK(warn.str().find("renormalized") != std::string::npos);
}

TEST_CASE("config validation") {
  for (const auto& id : experiment_ids()) {
    json raw = {{"no_such_key", 1}};
    if (id == "ot") raw.update({{"mu", "a.csv"}, {"nu", "b.csv"}});
    CHECK(failure_of([&] { normalize_config(id, raw); }).first == ErrorKind::ConfigError);
  }
  CHECK(failure_of([] { normalize_config("nope", json::object()); }).first == ErrorKind::ConfigError);
  CHECK(failure_of([] { normalize_config("stability", json::array()); }).first == ErrorKind::ConfigError);
  CHECK(failure_of([] { normalize_config("anosov-decay", {{"grid", 1.5}}); }).first == ErrorKind::ConfigError);
  CHECK(failure_of([] { normalize_config("anosov-decay", {{"beta", 0}}); }).first == ErrorKind::ConfigError);
  CHECK(failure_of([] { normalize_config("anosov-decay", {{"matrix", {{1, 1}, {0, 1}}}}); }).first ==
        ErrorKind::ConfigError);
  CHECK(failure_of([] { normalize_config("stability", {{"eps_list", {0.0, 0.02, 0.01}}}); }).first ==
        ErrorKind::ConfigError);
  CHECK(failure_of([] { normalize_config("expanding-decay", {{"experiment", "stability"}}); }).first ==
        ErrorKind::ConfigError);
  CHECK(failure_of([] { normalize_config("ot", json::object()); }).first == ErrorKind::ConfigError);

  const auto cfg = normalize_config("anosov-decay", {{"n_max", 8}, {"seed", 7}});
  CHECK(cfg.at("fit_window") == json({2, 8}));
  CHECK(cfg.at("seed") == 7);
  CHECK(cfg.at("beta") == 1.0);
}

TEST_CASE("experiment outputs are deterministic") {
  const json raw = {{"grid", 64}, {"n_max", 6}, {"fit_window", {1, 6}}};
  const auto cfg = normalize_config("anosov-decay", raw);
  const auto a = run_experiment("anosov-decay", cfg);
  const auto b = run_experiment("anosov-decay", cfg);
  CHECK(results_csv(a) == results_csv(b));
  CHECK(results_csv(a).rfind("series,n,C_n,C_n_fine,resolved\n", 0) == 0);

  const auto dir = scratch_dir("outputs");
  write_outputs(a, dir, 0.5);
  for (const char* f : {"results.csv", "report.json", "constants.json"}) CHECK(std::filesystem::exists(dir / f));
  std::ifstream in(dir / "report.json");
  const auto report = json::parse(in);
  CHECK(report.at("experiment") == "anosov-decay");
  CHECK(report.at("config") == cfg);
  CHECK(report.at("passed") == a.passed());
  int leftovers = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) leftovers += e.path().string().find(".tmp.") != std::string::npos;
  CHECK(leftovers == 0);
}

TEST_CASE("ot experiment") {
  const auto dir = scratch_dir("ot");
  write_atomic(dir / "mu.csv", "x,weight\n0.1,1\n0.4,1\n");
  write_atomic(dir / "nu.csv", "x,weight\n0.2,1\n0.5,1\n");
  const auto cfg = normalize_config("ot", {{"mu", (dir / "mu.csv").string()}, {"nu", (dir / "nu.csv").string()}});
  const auto r = run_experiment("ot", cfg);
  CHECK(r.passed());
  CHECK(r.summary.at("cost").get<double>() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(r.header == std::vector<std::string>{"source", "target", "mass"});

  auto stable = cfg;
  stable["cost"] = "stable";
  CHECK(failure_of([&] { run_experiment("ot", stable); }).first == ErrorKind::ConfigError);
}
