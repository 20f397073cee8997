#include <chrono>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "fol/cli.hpp"
#include "fol/error.hpp"

namespace {

using fol::cli::json;

// exit codes: 0 all checks passed, 1 a check failed, 2 bad input, 3 other errors
constexpr int kChecksFailed = 1;
constexpr int kBadInput = 2;
constexpr int kFailure = 3;

json read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw fol::Error(fol::ErrorKind::ConfigError, "cannot open config " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw fol::Error(fol::ErrorKind::ConfigError, path + ": " + e.what());
  }
}

int run(const std::string& id, const json& raw, const std::string& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  const json cfg = fol::cli::normalize_config(id, raw);
  const auto result = fol::cli::run_experiment(id, cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  fol::cli::write_outputs(result, out_dir, wall);
  if (result.summary.contains("warnings") && !result.summary["warnings"].get<std::string>().empty())
    std::cerr << result.summary["warnings"].get<std::string>();
  for (const auto& c : result.checks)
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  return result.passed() ? 0 : kChecksFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fol-lab: transfer operators and stable couplings for decay of correlations"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  for (const auto& id : fol::cli::experiment_ids()) {
    if (id == "ot") continue;
    auto* sub = app.add_subcommand(id, "run the " + id + " experiment");
    sub->add_option("--config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
    sub->add_option("--out-dir", out_dir, "output directory")->required();
  }

  json ot = json::object();
  std::string mu, nu, cost = "d", method = "exact";
  double beta = 1.0, tube = 0.05, reg = 1e-3, tol = 1e-4;
  std::string ot_out = ".";
  auto* ot_cmd = app.add_subcommand("ot", "optimal transport between two CSV measures");
  ot_cmd->add_option("--mu", mu, "source measure CSV")->required()->check(CLI::ExistingFile);
  ot_cmd->add_option("--nu", nu, "target measure CSV")->required()->check(CLI::ExistingFile);
  ot_cmd->add_option("--cost", cost, "ground cost")->check(CLI::IsMember({"d", "d-beta", "stable"}));
  ot_cmd->add_option("--beta", beta, "exponent for d-beta and stable");
  ot_cmd->add_option("--method", method, "solver")->check(CLI::IsMember({"exact", "sinkhorn"}));
  ot_cmd->add_option("--tube-width", tube, "stable cost tube width");
  ot_cmd->add_option("--regularization", reg, "Sinkhorn regularization");
  ot_cmd->add_option("--tol", tol, "Sinkhorn marginal tolerance");
  ot_cmd->add_option("--out-dir", ot_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto* sub : app.get_subcommands()) {
      const std::string id = sub->get_name();
      if (id == "ot") {
        const json raw = {{"mu", mu},   {"nu", nu},           {"cost", cost},          {"beta", beta},
                          {"method", method}, {"tube_width", tube}, {"regularization", reg}, {"tol", tol}};
        return run(id, raw, ot_out);
      }
      return run(id, read_config(config_path), out_dir);
    }
  } catch (const fol::Error& e) {
    std::cerr << "fol-lab: " << e.what() << "\n";
    switch (e.kind()) {
      case fol::ErrorKind::ConfigError:
      case fol::ErrorKind::ParseError:
      case fol::ErrorKind::NegativeWeight: return kBadInput;
      default: return kFailure;
    }
  } catch (const std::exception& e) {
    std::cerr << "fol-lab: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
