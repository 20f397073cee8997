#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "fol/cli.hpp"
#include "fol/correlate.hpp"
#include "fol/coupling.hpp"
#include "fol/densities.hpp"
#include "fol/error.hpp"
#include "fol/foliated.hpp"

namespace fol::cli {

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::ConfigError, msg); }

std::string fmt(double v) { return format_double(v); }

json defaults_for(const std::string& id) {
  const json toral = {{"matrix", {{2, 1}, {1, 1}}}, {"eps", 0.01}, {"shape", "sin2pi_y"}};
  json d;
  if (id == "expanding-decay") {
    d = {{"degree", 2},       {"amplitude", 0.1},          {"shape", "sin2pi"},
         {"alpha", 1.0},      {"grid", kDefaultDensityGrid}, {"tol", 1e-12},
         {"n_max", 20},       {"fit_window", {2, 20}},     {"series", {"holder", "smooth", "fourier"}}};
  } else if (id == "anosov-decay") {
    d = toral;
    d.update({{"beta", 1.0}, {"grid", 512}, {"n_max", 12}, {"fit_window", {2, 12}}});
  } else if (id == "stable-coupling") {
    d = toral;
    d.update({{"eps", 0.0},
              {"shape", "none"},
              {"beta", 1e-4},
              {"rounds", 2},
              {"n0", 1},
              {"chord_spacing", 0.02},
              {"reweight_amplitude", 0.5},
              {"K0", 1.0},
              {"delta_minus", 0.1},
              {"delta_plus", 0.45},
              {"blocks", 8},
              {"reconstruction_grid", 40},
              {"check_grid", 30}});
  } else if (id == "stability") {
    d = toral;
    d.erase("eps");
    d.update({{"eps_list", {0.0, 0.002, 0.005, 0.01, 0.02, 0.05}},
              {"steps", 20},
              {"grid", 512},
              {"coarse_grid", 32},
              {"c0_grid", 256},
              {"target_slope", 0.5}});
  } else if (id == "ot") {
    d = {{"mu", ""},          {"nu", ""},          {"cost", "d"},           {"beta", 1.0},
         {"method", "exact"}, {"tube_width", 0.05}, {"regularization", 1e-3}, {"tol", 1e-4},
         {"matrix", {{2, 1}, {1, 1}}}};
  } else {
    config_error("unknown experiment '" + id + "'");
  }
  d["seed"] = 0;
  return d;
}

bool same_kind(const json& def, const json& v) {
  if (def.is_number_integer()) return v.is_number_integer();
  if (def.is_number()) return v.is_number();
  if (def.is_string()) return v.is_string();
  if (def.is_array()) return v.is_array();
  if (def.is_boolean()) return v.is_boolean();
  return false;
}

const char* kind_name(const json& def) {
  if (def.is_number_integer()) return "an integer";
  if (def.is_number()) return "a number";
  if (def.is_string()) return "a string";
  if (def.is_array()) return "an array";
  return "a boolean";
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) config_error("'" + key + "' " + what);
}

void check_int(const json& c, const std::string& key, long lo, long hi) {
  const long v = c.at(key).get<long>();
  require(v >= lo && v <= hi, key, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

void check_num(const json& c, const std::string& key, double lo, double hi, bool open_lo = false) {
  const double v = c.at(key).get<double>();
  const bool ok = std::isfinite(v) && (open_lo ? v > lo : v >= lo) && v <= hi;
  require(ok, key, std::string("must be in ") + (open_lo ? "(" : "[") + fmt(lo) + ", " + fmt(hi) + "]");
}

void check_choice(const json& c, const std::string& key, const std::vector<std::string>& allowed) {
  const auto v = c.at(key).get<std::string>();
  if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    config_error("'" + key + "' must be one of: " + list);
  }
}

void check_window(const json& c, int n_max) {
  const auto& w = c.at("fit_window");
  require(w.size() == 2 && w[0].is_number_integer() && w[1].is_number_integer(), "fit_window",
          "must be two integers");
  const int lo = w[0].get<int>(), hi = w[1].get<int>();
  require(lo >= 0 && lo + 3 <= hi && hi <= n_max, "fit_window", "must satisfy 0 <= lo, lo + 3 <= hi <= n_max");
}

void check_matrix(const json& c) {
  const auto& m = c.at("matrix");
  bool ok = m.size() == 2;
  for (const auto& row : m) {
    ok = ok && row.is_array() && row.size() == 2;
    if (ok)
      for (const auto& e : row) ok = ok && e.is_number_integer();
  }
  require(ok, "matrix", "must be a 2 x 2 array of integers");
  const long a = m[0][0], b = m[0][1], cc = m[1][0], d = m[1][1];
  require(std::abs(a * d - b * cc) == 1, "matrix", "must have determinant +-1");
  require(std::abs(a + d) > 2, "matrix", "must be hyperbolic (|trace| > 2)");
}

void check_toral(const json& c) {
  check_matrix(c);
  check_choice(c, "shape", {"none", "sin2pi_y", "sin2pi_x", "sin2pi_xy"});
  if (c.contains("eps")) check_num(c, "eps", 0.0, 0.2);
}

Mat2 matrix_of(const json& c) {
  const auto& m = c.at("matrix");
  return {m[0][0].get<double>(), m[0][1].get<double>(), m[1][0].get<double>(), m[1][1].get<double>()};
}

void validate(const std::string& id, const json& c) {
  check_int(c, "seed", 0, std::numeric_limits<int>::max());
  if (id == "expanding-decay") {
    check_int(c, "degree", 2, 16);
    check_num(c, "amplitude", 0.0, 1.0);
    check_choice(c, "shape", {"none", "sin2pi", "sin4pi", "cos2pi"});
    check_num(c, "alpha", 0.0, 1.0, true);
    check_int(c, "grid", 64, 1 << 16);
    check_num(c, "tol", 1e-15, 1e-3);
    check_int(c, "n_max", 4, 200);
    check_window(c, c.at("n_max").get<int>());
    require(!c.at("series").empty(), "series", "must not be empty");
    for (const auto& s : c.at("series")) {
      const bool ok = s.is_string() && (s == "holder" || s == "smooth" || s == "fourier");
      require(ok, "series", "entries must be holder, smooth or fourier");
    }
  } else if (id == "anosov-decay") {
    check_toral(c);
    check_num(c, "beta", 0.0, 1.0, true);
    check_int(c, "grid", 16, 4096);
    check_int(c, "n_max", 4, 60);
    check_window(c, c.at("n_max").get<int>());
  } else if (id == "stable-coupling") {
    check_toral(c);
    check_num(c, "beta", 0.0, 1.0, true);
    check_int(c, "rounds", 0, 50);
    check_int(c, "n0", 1, 20);
    check_num(c, "chord_spacing", 0.001, 0.5);
    check_num(c, "reweight_amplitude", 0.0, 0.9);
    check_num(c, "K0", 0.0, 100.0, true);
    check_num(c, "delta_minus", 0.0, 0.5, true);
    check_num(c, "delta_plus", 0.0, kLeafCap);
    check_int(c, "blocks", 1, 64);
    check_int(c, "reconstruction_grid", 4, 44);
    check_int(c, "check_grid", 0, 44);
  } else if (id == "stability") {
    check_toral(c);
    const auto& eps = c.at("eps_list");
    require(eps.size() >= 3, "eps_list", "needs at least 3 values");
    double prev = -1.0;
    for (const auto& e : eps) {
      require(e.is_number() && e.get<double>() >= 0.0 && e.get<double>() <= 0.2, "eps_list",
              "entries must be numbers in [0, 0.2]");
      require(e.get<double>() > prev, "eps_list", "must be strictly increasing");
      prev = e.get<double>();
    }
    check_int(c, "steps", 1, 200);
    check_int(c, "grid", 8, 4096);
    check_int(c, "coarse_grid", 2, 44);
    require(c.at("grid").get<int>() % c.at("coarse_grid").get<int>() == 0, "grid", "must be a multiple of coarse_grid");
    check_int(c, "c0_grid", 8, 4096);
    check_num(c, "target_slope", 0.0, 10.0);
  } else if (id == "ot") {
    require(!c.at("mu").get<std::string>().empty(), "mu", "is required");
    require(!c.at("nu").get<std::string>().empty(), "nu", "is required");
    check_choice(c, "cost", {"d", "d-beta", "stable"});
    check_choice(c, "method", {"exact", "sinkhorn"});
    check_num(c, "beta", 0.0, 1.0, true);
    check_num(c, "tube_width", 0.0, 1.0, true);
    check_num(c, "regularization", 0.0, 10.0, true);
    check_num(c, "tol", 0.0, 1.0, true);
    check_matrix(c);
  }
}

Check make_check(std::string name, bool passed, std::string detail) {
  return {std::move(name), passed, std::move(detail)};
}

/// Passes when the fitted rate is at most `limit`. A series that is below the
/// noise floor too early to fit must instead stay under C_lo limit^(n - lo).
Check rate_check(const std::string& name, const std::vector<double>& values, int lo, int hi, double limit,
                 json& fit_out) {
  try {
    const auto fit = fit_decay(values, lo, hi);
    fit_out = {{"C", fit.C}, {"rate", fit.rate}, {"n_lo", fit.n_lo}, {"n_hi", fit.n_hi},
               {"residual", fit.residual}, {"used", fit.used}};
    return make_check(name, fit.rate <= limit, "fitted rate " + fmt(fit.rate) + " vs limit " + fmt(limit));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InsufficientData) throw;
  }
  fit_out = nullptr;
  const double c_lo = std::max(std::abs(values[static_cast<std::size_t>(lo)]), kDecayNoiseFloor);
  bool ok = true;
  for (int n = lo; n <= hi && n < static_cast<int>(values.size()); ++n)
    ok = ok && std::abs(values[static_cast<std::size_t>(n)]) <= std::max(kDecayNoiseFloor, c_lo * std::pow(limit, n - lo));
  return make_check(name, ok, "below the noise floor before a fit was possible; envelope check against limit " + fmt(limit));
}

ExperimentResult run_expanding_decay(const json& c) {
  ExperimentResult r;
  const auto map = make_expanding_map(c.at("degree"), c.at("amplitude"), c.at("shape").get<std::string>(),
                                      c.at("alpha"));
  const auto cc = cone_constants(map);
  const TransferOperator op(map, c.at("grid"));
  const auto inv = invariant_density(op, c.at("tol"));
  const int n_max = c.at("n_max"), lo = c.at("fit_window")[0], hi = c.at("fit_window")[1];
  r.constants = {{"lambda", map.lambda()},       {"alpha", map.alpha()},  {"lambda_alpha", cc.lambda_alpha},
                 {"H", cc.distortion},           {"K0", cc.K0},           {"n0", cc.n0},
                 {"tau", cc.tau},                {"theta", cc.theta},     {"theory_rate", cc.theta},
                 {"invariant_residual", inv.residual}, {"invariant_log_holder", inv.log_holder}};
  r.header = {"series", "n", "C_n"};
  const double limit = cc.theta + 0.05;
  const bool fourier_exact = c.at("amplitude").get<double>() == 0.0;
  json fits = json::object();
  for (const auto& s : c.at("series")) {
    const std::string name = s;
    Observable1D f, g;
    if (name == "holder") {
      f = [](double x) { return std::sqrt(std::abs(std::sin(std::numbers::pi * x))); };
      g = [](double x) { return std::cos(kTwoPi * x); };
    } else if (name == "smooth") {
      f = g = [](double x) { return std::exp(std::cos(kTwoPi * x)); };
    } else {
      f = g = [](double x) { return std::cos(kTwoPi * x); };
    }
    const auto vals = expanding_decay(op, inv.density, f, g, n_max);
    for (int n = 0; n <= n_max; ++n) r.rows.push_back({name, std::to_string(n), fmt(vals[static_cast<std::size_t>(n)])});
    if (name == "fourier") {
      if (!fourier_exact) continue;
      double worst = 0.0;
      for (int n = 1; n <= n_max; ++n) worst = std::max(worst, std::abs(vals[static_cast<std::size_t>(n)]));
      r.checks.push_back(make_check("fourier_vanishes", worst <= 1e-6, "max |C_n|, n >= 1: " + fmt(worst)));
    } else {
      json fit;
      r.checks.push_back(rate_check(name + "_rate", vals, lo, hi, limit, fit));
      fits[name] = fit;
    }
  }
  r.summary = {{"fits", fits}, {"rate_limit", limit}, {"invariant_iterations", inv.iterations}};
  return r;
}

ExperimentResult run_anosov_decay(const json& c) {
  ExperimentResult r;
  const auto map = make_toral_map(matrix_of(c), c.at("eps"), c.at("shape").get<std::string>());
  const double beta = c.at("beta");
  const int grid = c.at("grid"), n_max = c.at("n_max"), lo = c.at("fit_window")[0], hi = c.at("fit_window")[1];
  const double limit = std::pow(map.lambda_s(), beta) * 1.25;
  r.constants = {{"lambda_u", map.lambda_u()}, {"lambda_s", map.lambda_s()}, {"lambda0", map.lambda0()},
                 {"beta", beta},               {"eta", map.eta()},          {"theory_rate", std::pow(map.lambda_s(), beta)}};
  r.header = {"series", "n", "C_n", "C_n_fine", "resolved"};
  const auto coarse = DiscreteMeasure::uniform_grid(grid), fine = DiscreteMeasure::uniform_grid(2 * grid);

  const Observable2D trig = [](Vec2 x) { return std::cos(kTwoPi * x.x); };
  const Observable2D smooth = [](Vec2 x) { return std::exp(std::cos(kTwoPi * x.x)) + std::sin(kTwoPi * x.y); };
  json fits = json::object(), prefixes = json::object();
  for (const auto& [name, f] : std::vector<std::pair<std::string, Observable2D>>{{"trig", trig}, {"smooth", smooth}}) {
    const auto a = correlation_sequence(map, f, f, coarse, n_max);
    const auto b = correlation_sequence(map, f, f, fine, n_max);
    const int prefix = agreeing_prefix(a, b);
    prefixes[name] = prefix;
    for (int n = 0; n <= n_max; ++n) {
      const auto k = static_cast<std::size_t>(n);
      r.rows.push_back({name, std::to_string(n), fmt(a[k]), fmt(b[k]), n <= prefix ? "1" : "0"});
    }
    if (name == "trig" && map.is_linear()) {
      const std::vector<Frequency> freqs = {{1, 0}, {-1, 0}};
      const int escape = frequency_escape_time(map.linear(), freqs, freqs, n_max);
      r.constants["escape_time"] = escape;
      double worst = 0.0;
      for (int n = escape; n <= n_max; ++n) worst = std::max(worst, std::abs(b[static_cast<std::size_t>(n)]));
      r.checks.push_back(make_check("trig_vanishes", worst <= 1e-6,
                                    "max |C_n| for n >= " + std::to_string(escape) + ": " + fmt(worst)));
    }
    if (name == "smooth" && !map.is_linear()) {
      const int top = std::min(hi, prefix);
      if (top < lo + 3) {
        r.checks.push_back(make_check("smooth_rate", false,
                                      "resolutions agree only up to n = " + std::to_string(prefix) + "; raise grid"));
        fits[name] = nullptr;
      } else {
        json fit;
        r.checks.push_back(rate_check("smooth_rate", b, lo, top, limit, fit));
        fits[name] = fit;
      }
    }
  }
  r.summary = {{"fits", fits}, {"agreeing_prefix", prefixes}, {"rate_limit", limit}};
  return r;
}

ExperimentResult run_stable_coupling(const json& c) {
  ExperimentResult r;
  const auto map = make_toral_map(matrix_of(c), c.at("eps"), c.at("shape").get<std::string>());
  const double beta = c.at("beta");
  const int rounds = c.at("rounds");
  CouplingParams params;
  params.delta_minus = c.at("delta_minus");
  params.delta_plus = c.at("delta_plus");
  params.blocks = c.at("blocks");
  params.K0 = c.at("K0");
  params.n0 = c.at("n0");
  const double amp = c.at("reweight_amplitude");
  const auto mu1 = lebesgue_foliated(map.e_u(), c.at("chord_spacing"), beta);
  const auto mu2 = reweight(mu1, [amp](Vec2 p) { return 1.0 + amp * std::sin(kTwoPi * p.x); });
  const auto rep = stable_coupling(map, mu1, mu2, beta, rounds, params, c.at("reconstruction_grid"));
  const auto& k = rep.constants;
  r.constants = {{"lambda0", k.lambda0}, {"beta", k.beta},     {"tau", k.tau},   {"n0", k.n0},
                 {"L0", k.L0},           {"beta0", k.beta0},   {"C", k.series_bound}, {"ratio", k.ratio},
                 {"kappa", rep.kappa},   {"K0", params.K0}};
  r.header = {"round",         "coupled_mass", "cost",     "cost_bound",        "residual_mass",
              "residual_K1",   "residual_K2",  "pairs",    "max_stable_length", "mismatch"};
  bool cost_ok = true, reg_ok = true;
  for (const auto& h : rep.history) {
    r.rows.push_back({std::to_string(h.round), fmt(h.coupled_mass), fmt(h.cost), fmt(h.cost_bound),
                      fmt(h.residual_mass), fmt(h.residual_K1), fmt(h.residual_K2), std::to_string(h.pairs),
                      fmt(h.max_stable_length), fmt(h.mismatch)});
    cost_ok = cost_ok && h.cost <= h.cost_bound;
    reg_ok = reg_ok && h.residual_K1 <= 2 * params.K0 * 1.1 && h.residual_K2 <= 2 * params.K0 * 1.1;
  }
  const double expected = std::pow(1 - k.tau, rounds + 1);
  const double mass_err = std::abs(rep.residual_mass - expected);
  r.checks.push_back(make_check("residual_mass", mass_err <= 1e-12, "|residual - (1-tau)^(k+1)| = " + fmt(mass_err)));
  double longest = 0.0;
  for (const auto& p : rep.pairs) longest = std::max(longest, p.stable_length);
  r.checks.push_back(make_check("pairs_within_L0", longest <= k.L0, "longest " + fmt(longest) + ", L0 " + fmt(k.L0)));
  r.checks.push_back(make_check("round_costs", cost_ok, "every round cost within its bound"));
  r.checks.push_back(make_check("residual_regularity", reg_ok, "residual K <= 2.2 K0 in every round"));
  r.checks.push_back(make_check("bound_vs_series", rep.bound <= k.series_bound,
                                "bound " + fmt(rep.bound) + ", series " + fmt(k.series_bound)));
  const double cell = 3 * kLeafSpacing;
  r.checks.push_back(make_check("reconstruction",
                                rep.reconstruction_w1_1 <= cell && rep.reconstruction_w1_2 <= cell,
                                "W1 " + fmt(rep.reconstruction_w1_1) + ", " + fmt(rep.reconstruction_w1_2) +
                                    " vs " + fmt(cell)));
  json summary = {{"bound", rep.bound},
                  {"tail", rep.tail},
                  {"residual_mass", rep.residual_mass},
                  {"residuals_identical", rep.residuals_identical},
                  {"pairs", rep.pairs.size()},
                  {"reconstruction_w1", {rep.reconstruction_w1_1, rep.reconstruction_w1_2}}};
  if (const int g = c.at("check_grid"); g > 0) {
    const auto d1 = discretize(mu1, g), d2 = discretize(mu2, g);
    const double exact = exact_plan(d1, d2, cost_matrix(d1, d2, CostSpec::distance_power(beta))).cost;
    summary["exact_d_beta"] = exact;
    r.checks.push_back(make_check("exact_below_bound", exact <= rep.bound,
                                  "exact D^beta " + fmt(exact) + " on a " + std::to_string(g) + "^2 grid"));
  }
  r.summary = summary;
  return r;
}

ExperimentResult run_stability(const json& c) {
  ExperimentResult r;
  const Mat2 a = matrix_of(c);
  const std::string shape = c.at("shape");
  const int steps = c.at("steps"), grid = c.at("grid"), coarse = c.at("coarse_grid"), c0_grid = c.at("c0_grid");
  const auto base = make_toral_map(a);
  const auto ref = aggregate(srb_estimate(base, steps, grid), coarse);
  // half a coarse cell: the W1 resolution of the aggregated grid
  const double floor = 0.5 / coarse;
  r.constants = {{"lambda_u", base.lambda_u()}, {"lambda_s", base.lambda_s()}, {"floor", floor}};
  r.header = {"eps", "c0_distance", "w1"};
  std::vector<double> xs, ys, ws;
  bool zero_ok = true;
  for (const auto& e : c.at("eps_list")) {
    const double eps = e;
    const auto t = make_toral_map(a, eps, shape);
    const double c0 = c0_distance(t, base, c0_grid);
    const auto mu = aggregate(srb_estimate(t, steps, grid), coarse);
    const double w1 = exact_plan(mu, ref, cost_matrix(mu, ref, CostSpec::distance())).cost;
    r.rows.push_back({fmt(eps), fmt(c0), fmt(w1)});
    if (eps == 0.0) {
      zero_ok = zero_ok && w1 <= floor;
    } else {
      ws.push_back(w1);
      xs.push_back(std::log(c0));
      ys.push_back(std::log(std::max(w1, 1e-300)));
    }
  }
  if (c.at("eps_list")[0].get<double>() == 0.0)
    r.checks.push_back(make_check("zero_at_floor", zero_ok, "eps = 0 row within " + fmt(floor)));
  // monotone up to a tenth of the grid resolution
  const double noise = 0.1 * floor;
  bool mono = true;
  for (std::size_t i = 1; i < ws.size(); ++i) mono = mono && ws[i] >= ws[i - 1] - noise;
  r.checks.push_back(make_check("monotone", mono, "W1 non-decreasing in eps within " + fmt(noise)));
  json fit = nullptr;
  if (xs.size() >= 2) {
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i] / n;
      my += ys[i] / n;
    }
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    fit = {{"slope", slope}, {"C_prime", std::exp(my - slope * mx)}};
    r.checks.push_back(make_check("slope_positive", slope > 0.0, "log-log slope " + fmt(slope)));
    const double target = c.at("target_slope");
    r.checks.push_back(make_check("slope_target", slope > target, "log-log slope " + fmt(slope) + " vs " + fmt(target)));
  } else {
    r.checks.push_back(make_check("slope_positive", false, "need two positive eps values"));
  }
  r.summary = {{"fit", fit}, {"support_points", coarse * coarse}};
  return r;
}

ExperimentResult run_ot(const json& c) {
  ExperimentResult r;
  std::ostringstream warn;
  const auto mu = read_measure_csv(c.at("mu").get<std::string>(), &warn);
  const auto nu = read_measure_csv(c.at("nu").get<std::string>(), &warn);
  if (mu.dim != nu.dim) config_error("mu and nu must both be circle or both torus measures");
  const std::string kind = c.at("cost");
  const double beta = c.at("beta");
  CostSpec spec;
  if (kind == "d-beta") {
    spec = CostSpec::distance_power(beta);
  } else if (kind == "stable") {
    if (mu.dim != 2) config_error("the stable cost needs torus measures");
    const auto map = make_toral_map(matrix_of(c));
    spec = CostSpec::stable(DirectionField::constant(map.e_s()), beta, c.at("tube_width"));
  }
  const auto cost = cost_matrix(mu, nu, spec);
  TransportPlan plan;
  if (c.at("method") == "exact") {
    plan = exact_plan(mu, nu, cost);
  } else {
    SinkhornOptions opt;
    opt.regularization = c.at("regularization");
    opt.tol = c.at("tol");
    plan = sinkhorn_plan(mu, nu, cost, opt);
  }
  const double viol = marginal_violation(plan, mu, nu);
  r.constants = {{"cost", kind}, {"beta", beta}, {"dim", mu.dim}};
  r.header = {"source", "target", "mass"};
  for (const auto& e : plan.entries) r.rows.push_back({std::to_string(e.source), std::to_string(e.target), fmt(e.mass)});
  r.checks.push_back(make_check("marginals", viol <= 1e-9, "max marginal violation " + fmt(viol)));
  if (plan.method == "exact")
    r.checks.push_back(make_check("duality_gap", plan.duality_gap <= 1e-9, "gap " + fmt(plan.duality_gap)));
  r.summary = {{"cost", plan.cost},
               {"dual_objective", plan.dual_objective},
               {"duality_gap", plan.duality_gap},
               {"method", plan.method},
               {"iterations", plan.iterations},
               {"sizes", {mu.size(), nu.size()}},
               {"warnings", warn.str()}};
  return r;
}

}  // namespace

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = {"expanding-decay", "anosov-decay", "stable-coupling", "stability", "ot"};
  return ids;
}

json normalize_config(const std::string& experiment, const json& raw) {
  if (!raw.is_object()) config_error("config must be a JSON object");
  json cfg = defaults_for(experiment);
  for (const auto& [key, value] : raw.items()) {
    if (key == "experiment") {
      if (value != experiment) config_error("config is for experiment '" + value.dump() + "'");
      continue;
    }
    if (!cfg.contains(key)) config_error("unknown key '" + key + "'");
    if (!same_kind(cfg[key], value)) config_error("'" + key + "' must be " + kind_name(cfg[key]));
    cfg[key] = value;
  }
  if (cfg.contains("fit_window") && !raw.contains("fit_window")) {
    auto& hi = cfg["fit_window"][1];
    hi = std::min(hi.get<int>(), cfg.at("n_max").get<int>());
  }
  validate(experiment, cfg);
  return cfg;
}

ExperimentResult run_experiment(const std::string& experiment, const json& config) {
  using Runner = ExperimentResult (*)(const json&);
  static const std::map<std::string, Runner> runners = {{"expanding-decay", run_expanding_decay},
                                                        {"anosov-decay", run_anosov_decay},
                                                        {"stable-coupling", run_stable_coupling},
                                                        {"stability", run_stability},
                                                        {"ot", run_ot}};
  const auto it = runners.find(experiment);
  if (it == runners.end()) config_error("unknown experiment '" + experiment + "'");
  ExperimentResult r = it->second(config);
  r.experiment = experiment;
  r.config = config;
  return r;
}

}  // namespace fol::cli
