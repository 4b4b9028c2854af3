#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include "spectral/errors.hpp"
#include "spectral/expr.hpp"
#include "spectral/gproc.hpp"
#include "spectral/measure_io.hpp"
#include "spectral/qform.hpp"
#include "spectral/rng.hpp"
#include "spectral/sigmaspace.hpp"

namespace spectral::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kPi = std::numbers::pi;

std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

json form_json(const FormValue& v) {
  return {{"value", complex_json(v.value)}, {"error_bound", v.error_bound}, {"method", to_string(v.method)}};
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

void emit(const RunConfig& cfg, const std::string& name, json report) {
  report["config"] = cfg.to_json();
  std::string text = report.dump(2) + "\n";
  std::cout << text;
  write_text(fs::path(cfg.out) / name, text);
}

SpectralMeasure measure_arg(const RunConfig& cfg, std::size_t i = 0) {
  if (cfg.measures.size() <= i) throw ConfigError("missing --measure FILE");
  return load_measure(cfg.measures[i]);
}

TestFunction testfn_arg(const RunConfig& cfg, std::size_t i = 0) {
  if (cfg.testfns.size() <= i) throw ConfigError("missing --testfn FILE");
  return load_testfn(cfg.testfns[i]);
}

std::vector<double> times_arg(const RunConfig& cfg) {
  if (cfg.times.empty()) throw ConfigError("missing --times START:END:COUNT");
  return parse_times(cfg.times);
}

NormalFieldGrid grid_arg(const RunConfig& cfg, const SpectralMeasure& sigma) {
  return build_grid(sigma, cfg.umax, cfg.bins, bin_rule_from_string(cfg.rule), 1);
}

/// Replaces a string "measure" entry by the JSON of the file it names,
/// relative to the sigma-function file.
SigmaFunction load_sigma_function(const std::string& file) {
  json j = load_json_file(file);
  if (j.is_object() && j.contains("measure") && j.at("measure").is_string())
    j["measure"] = load_json_file(fs::path(file).parent_path() / j.at("measure").get<std::string>());
  try {
    return sigma_function_from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(file + ": " + e.what());
  }
}

int cmd_simulate(const RunConfig& cfg) {
  SpectralMeasure sigma = measure_arg(cfg);
  std::vector<double> times = times_arg(cfg);
  NormalFieldGrid grid = grid_arg(cfg, sigma);
  PathEnsemble ens = sample_paths(sigma, grid, times, cfg.paths, cfg.seed, cfg.workers);

  std::string csv;
  csv.reserve(static_cast<std::size_t>(ens.values.size()) * 24 + 64);
  for (std::size_t i = 0; i < times.size(); ++i) csv += (i ? "," : "") + fmt17(times[i]);
  csv += "\n";
  for (Eigen::Index r = 0; r < ens.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < ens.values.cols(); ++c) {
      if (c) csv += ',';
      csv += fmt17(ens.values(r, c));
    }
    csv += '\n';
  }
  write_text(fs::path(cfg.out) / "paths.csv", csv);

  json side = {{"seed", cfg.seed},
               {"method", ens.method},
               {"grid", grid_to_json(grid)},
               {"truncation_mass", grid.truncation_mass},
               {"times", times},
               {"config", cfg.to_json()}};
  write_text(fs::path(cfg.out) / "paths.json", side.dump(2) + "\n");
  std::cout << "wrote " << ens.values.rows() << " paths x " << ens.values.cols() << " times to "
            << (fs::path(cfg.out) / "paths.csv").string() << "\n";
  return kSuccess;
}

int cmd_covariance(const RunConfig& cfg) {
  SpectralMeasure sigma = measure_arg(cfg);
  std::vector<double> times = times_arg(cfg);
  std::string csv = "t,s,value,error_bound\n";
  json rows = json::array();
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (std::size_t j = i; j < times.size(); ++j) {
      CovarianceValue v = pointwise_covariance(sigma, times[i], times[j]);
      csv += fmt17(times[i]) + "," + fmt17(times[j]) + "," + fmt17(v.value) + "," + fmt17(v.error_bound) + "\n";
    }
  }
  write_text(fs::path(cfg.out) / "covariance.csv", csv);
  write_text(fs::path(cfg.out) / "covariance.json",
             json{{"measure", sigma.describe()}, {"times", times}, {"config", cfg.to_json()}}.dump(2) + "\n");
  std::cout << csv;
  return kSuccess;
}

int cmd_qform_eval(const RunConfig& cfg) {
  SpectralMeasure sigma = measure_arg(cfg);
  TestFunction psi = testfn_arg(cfg);
  json report;
  if (cfg.testfns.size() >= 2) {
    report["l_sigma"] = form_json(l_sigma(psi, testfn_arg(cfg, 1), sigma));
  } else {
    report["q_sigma"] = form_json(q_sigma(psi, sigma));
    FrechetBound fb = frechet_bound(psi, sigma);
    report["frechet"] = {{"bound", fb.bound}, {"holds", fb.holds}, {"constant", fb.constant}, {"p", fb.p}};
  }
  report["measure"] = sigma.describe();
  emit(cfg, "qform.json", report);
  return kSuccess;
}

int cmd_witness(const RunConfig& cfg) {
  SpectralMeasure sigma = measure_arg(cfg);
  std::vector<double> ks = cfg.k_values.empty() ? std::vector<double>{1, 10, 100, 1000, 10000} : cfg.k_values;
  json points = json::array();
  for (const auto& w : closability_witness(sigma, ks, cfg.center)) {
    json p = {{"k", w.k}, {"l2_norm_sq", w.l2_norm_sq}, {"q", form_json(w.q)}};
    if (w.cauchy_gap) p["cauchy_gap"] = form_json(*w.cauchy_gap);
    points.push_back(p);
  }
  emit(cfg, "witness.json", {{"measure", sigma.describe()}, {"center", cfg.center}, {"points", points}});
  return kSuccess;
}

int cmd_charcheck(const RunConfig& cfg) {
  SpectralMeasure sigma = measure_arg(cfg);
  TestFunction psi = testfn_arg(cfg);
  NormalFieldGrid grid = grid_arg(cfg, sigma);
  CharFunctionalResult r = char_functional_check(sigma, psi, grid, cfg.paths, cfg.seed, cfg.workers);
  double var = 0.5 * (1.0 + std::exp(-2.0 * r.q)) - std::exp(-r.q);
  emit(cfg, "charcheck.json",
       {{"estimate", complex_json(r.estimate)},
        {"target", r.target},
        {"z_score", r.z_score},
        {"standard_error", std::sqrt(var / static_cast<double>(r.samples))},
        {"q", r.q},
        {"q_grid", r.q_grid},
        {"samples", r.samples},
        {"seed", cfg.seed},
        {"grid", grid_to_json(grid)}});
  return kSuccess;
}

int cmd_stationarity(const RunConfig& cfg) {
  SpectralMeasure sigma = measure_arg(cfg);
  std::vector<double> times = times_arg(cfg);
  NormalFieldGrid grid = grid_arg(cfg, sigma);
  PathEnsemble ens = sample_paths(sigma, grid, times, cfg.paths, cfg.seed, cfg.workers);
  double lag = cfg.lag != 0.0 ? cfg.lag : (times.size() > 1 ? times[1] - times[0] : 0.0);
  StationarityReport rep = stationarity_check(ens, lag);
  json groups = json::array();
  for (const auto& g : rep.groups)
    groups.push_back({{"start", g.start}, {"variance", g.variance}, {"standard_error", g.standard_error}});
  emit(cfg, "stationarity.json",
       {{"lag", rep.lag},
        {"pooled_variance", rep.pooled_variance},
        {"spread", rep.spread},
        {"max_abs_z", rep.max_abs_z},
        {"consistent", rep.consistent},
        {"groups", groups},
        {"seed", cfg.seed},
        {"grid", grid_to_json(grid)}});
  return kSuccess;
}

int cmd_sigmaspace_pair(const RunConfig& cfg) {
  if (cfg.a_file.empty() || cfg.b_file.empty()) throw ConfigError("sigmaspace pair needs --a FILE and --b FILE");
  SigmaFunction a = load_sigma_function(cfg.a_file);
  SigmaFunction b = load_sigma_function(cfg.b_file);
  emit(cfg, "sigmaspace.json",
       {{"inner_product", complex_json(inner_product(a, b))},
        {"mutually_singular", mutually_singular(a.sigma(), b.sigma())},
        {"equiv", equiv_check(a, b)},
        {"norm_sq_a", a.norm_sq()},
        {"norm_sq_b", b.norm_sq()}});
  return kSuccess;
}

TestFunction random_packet(std::uint64_t seed, std::uint64_t index) {
  UniformPair u = uniform_pair(seed, index, 0, StreamTag::Parameters);
  UniformPair v = uniform_pair(seed, index, 1, StreamTag::Parameters);
  return TestFunction::gaussian(-2.0 + 4.0 * u.a, 0.5 + u.b, 0.0, 0.5 + v.a);
}

int cmd_comb_verify(const RunConfig& cfg) {
  json checks = json::array();
  bool ok = true;
  auto check = [&](const std::string& name, double value, double reference, double gap) {
    bool pass = gap <= cfg.tol;
    ok = ok && pass;
    checks.push_back({{"name", name}, {"value", value}, {"reference", reference}, {"relative_gap", gap}, {"pass", pass}});
  };

  TestFunction g = TestFunction::gaussian();
  double ref = 0.0;
  for (int n = -3; n <= 3; ++n) ref += std::exp(-0.5 * (2.0 * kPi * n) * (2.0 * kPi * n));
  PeriodizedValue pv = periodize(g, 0.0, 3);
  check("periodize_gaussian_at_0", pv.value.real(), ref, std::abs(pv.value.real() - ref) / ref);

  Complex constant{};
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    PoissonPairing p = poisson_pairing(random_packet(cfg.seed, 2 * i), random_packet(cfg.seed, 2 * i + 1));
    worst = std::max(worst, p.relative_gap);
    constant += p.fitted_constant / 20.0;
  }
  check("poisson_pairing_20_pairs", constant.real(), 1.0 / (2.0 * kPi), worst);

  SpectralMeasure comb = SpectralMeasure::comb();
  double theta = 0.0;
  for (int n = -40; n <= 40; ++n) theta += std::exp(-static_cast<double>(n * n));
  double q = q_sigma(g, comb).real();
  check("q_gaussian_comb", q, 2.0 * kPi * theta, std::abs(q - 2.0 * kPi * theta) / (2.0 * kPi * theta));
  for (double t : {kPi / 4, kPi / 2, kPi, 1.5 * kPi}) {
    double r = pointwise_covariance(comb, t, t).value;
    check("comb_variance_t=" + fmt17(t), r, 2.0 * kPi * t, std::abs(r - 2.0 * kPi * t) / (2.0 * kPi * t));
  }
  emit(cfg, "comb_verify.json", {{"checks", checks}, {"pass", ok}, {"fitted_constant", complex_json(constant)}});
  return ok ? kSuccess : kTolerance;
}

int cmd_convolve(const RunConfig& cfg) {
  if (cfg.measures.size() != 2) throw ConfigError("convolve needs exactly two --measure files");
  SpectralMeasure c = convolve(measure_arg(cfg, 0), measure_arg(cfg, 1));
  GrowthOrder g = certify_class_C(c);
  emit(cfg, "convolution.json",
       {{"measure", measure_to_json(c)},
        {"describe", c.describe()},
        {"class_C", {{"in_class", g.in_class}, {"p", g.p}, {"reason", g.reason}}}});
  return kSuccess;
}

}  // namespace

json RunConfig::to_json() const {
  return {{"command", command}, {"measures", measures}, {"testfns", testfns}, {"times", times},
          {"paths", paths},     {"bins", bins},         {"umax", umax},       {"rule", rule},
          {"seed", seed},       {"tol", tol},           {"lag", lag},
          {"center", center},   {"k", k_values},        {"a", a_file},        {"b", b_file}};
}

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("run configuration must be an object");
  RunConfig c;
  try {
    c.command = j.value("command", c.command);
    c.measures = j.value("measures", c.measures);
    c.testfns = j.value("testfns", c.testfns);
    c.times = j.value("times", c.times);
    c.paths = j.value("paths", c.paths);
    c.bins = j.value("bins", c.bins);
    c.umax = j.value("umax", c.umax);
    c.rule = j.value("rule", c.rule);
    c.seed = j.value("seed", c.seed);
    c.out = j.value("out", c.out);
    c.tol = j.value("tol", c.tol);
    c.lag = j.value("lag", c.lag);
    c.center = j.value("center", c.center);
    c.k_values = j.value("k", c.k_values);
    c.a_file = j.value("a", c.a_file);
    c.b_file = j.value("b", c.b_file);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("run configuration: ") + e.what());
  }
  return c;
}

std::vector<double> parse_times(const std::string& text) {
  auto first = text.find(':');
  auto second = first == std::string::npos ? std::string::npos : text.find(':', first + 1);
  if (second == std::string::npos || text.find(':', second + 1) != std::string::npos)
    throw ConfigError("times must be START:END:COUNT, got '" + text + "'");
  double start, end;
  try {
    start = evaluate_constant(text.substr(0, first));
    end = evaluate_constant(text.substr(first + 1, second - first - 1));
  } catch (const SpectralError& e) {
    throw ConfigError("times '" + text + "': " + e.what());
  }
  std::string count_text = text.substr(second + 1);
  std::size_t used = 0;
  long long count = 0;
  try {
    count = std::stoll(count_text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != count_text.size() || count < 1) throw ConfigError("times COUNT must be a positive integer");
  if (count == 1) return {start};
  std::vector<double> t(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i)
    t[static_cast<std::size_t>(i)] = start + (end - start) * static_cast<double>(i) / static_cast<double>(count - 1);
  t.back() = end;
  return t;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Stationary-increment Gaussian processes from spectral measures"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_measure = [&](CLI::App* s) { s->add_option("--measure", cfg.measures, "measure JSON file")->check(CLI::ExistingFile); };
  auto add_testfn = [&](CLI::App* s) { s->add_option("--testfn", cfg.testfns, "test-function JSON file")->check(CLI::ExistingFile); };
  auto add_out = [&](CLI::App* s) { s->add_option("--out", cfg.out, "output directory")->capture_default_str(); };
  auto add_sampling = [&](CLI::App* s) {
    s->add_option("--paths", cfg.paths, "number of paths or samples")->capture_default_str();
    s->add_option("--bins", cfg.bins, "frequency bins")->capture_default_str();
    s->add_option("--umax", cfg.umax, "grid half-width U_max")->capture_default_str();
    s->add_option("--rule", cfg.rule, "equal_width or equal_mass")->capture_default_str();
    s->add_option("--seed", cfg.seed, "64-bit seed")->capture_default_str();
    s->add_option("--workers", cfg.workers, "threads; outputs do not depend on it")->capture_default_str();
  };
  auto add_times = [&](CLI::App* s) { s->add_option("--times", cfg.times, "START:END:COUNT, e.g. 0:2pi:64"); };
  auto add_tol = [&](CLI::App* s) { s->add_option("--tol", cfg.tol, "tolerance")->capture_default_str(); };

  auto* simulate = app.add_subcommand("simulate", "sample paths by spectral synthesis");
  add_measure(simulate), add_times(simulate), add_sampling(simulate), add_out(simulate);
  auto* covariance = app.add_subcommand("covariance", "pointwise covariance r(t, s) by quadrature");
  add_measure(covariance), add_times(covariance), add_out(covariance);
  auto* qform = app.add_subcommand("qform", "quadratic and sesquilinear forms");
  qform->require_subcommand(1);
  auto* qeval = qform->add_subcommand("eval", "q_sigma(psi), or L_sigma with two --testfn");
  add_measure(qeval), add_testfn(qeval), add_out(qeval);
  auto* qwit = qform->add_subcommand("witness", "closability witness sequence");
  auto* witness = app.add_subcommand("witness", "closability witness sequence");
  for (auto* s : {qwit, witness}) {
    add_measure(s), add_out(s);
    s->add_option("--k", cfg.k_values, "witness parameters k");
    s->add_option("--center", cfg.center, "witness center u0")->capture_default_str();
  }
  auto* charcheck = app.add_subcommand("charcheck", "Monte Carlo check of the characteristic functional");
  add_measure(charcheck), add_testfn(charcheck), add_sampling(charcheck), add_out(charcheck);
  auto* stationarity = app.add_subcommand("stationarity", "increment variance across positions at a lag");
  add_measure(stationarity), add_times(stationarity), add_sampling(stationarity), add_out(stationarity);
  stationarity->add_option("--lag", cfg.lag, "lag (default: grid step)");
  auto* sigmaspace = app.add_subcommand("sigmaspace", "sigma-function space operations");
  sigmaspace->require_subcommand(1);
  auto* pair = sigmaspace->add_subcommand("pair", "inner product, singularity and equivalence of two sigma-functions");
  pair->add_option("--a", cfg.a_file, "sigma-function JSON")->required()->check(CLI::ExistingFile);
  pair->add_option("--b", cfg.b_file, "sigma-function JSON")->required()->check(CLI::ExistingFile);
  add_out(pair);
  auto* comb_verify = app.add_subcommand("comb-verify", "Dirac comb periodization and Poisson identities");
  add_tol(comb_verify), add_out(comb_verify);
  comb_verify->add_option("--seed", cfg.seed, "seed for the random packet pairs")->capture_default_str();
  auto* convolve_cmd = app.add_subcommand("convolve", "convolve two measures and certify the result");
  add_measure(convolve_cmd), add_out(convolve_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kSuccess : kValidation;
  }

  try {
    if (*simulate) return cfg.command = "simulate", cmd_simulate(cfg);
    if (*covariance) return cfg.command = "covariance", cmd_covariance(cfg);
    if (*qeval) return cfg.command = "qform eval", cmd_qform_eval(cfg);
    if (*qwit || *witness) return cfg.command = "witness", cmd_witness(cfg);
    if (*charcheck) return cfg.command = "charcheck", cmd_charcheck(cfg);
    if (*stationarity) return cfg.command = "stationarity", cmd_stationarity(cfg);
    if (*pair) return cfg.command = "sigmaspace pair", cmd_sigmaspace_pair(cfg);
    if (*comb_verify) return cfg.command = "comb-verify", cmd_comb_verify(cfg);
    if (*convolve_cmd) return cfg.command = "convolve", cmd_convolve(cfg);
  } catch (const UnreachableTolerance& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kTolerance;
  } catch (const SpectralError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kValidation;
}

}  // namespace spectral::cli
