// Runs the twelve acceptance criteria and prints one PASS/FAIL line each.
#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cli.hpp"
#include "spectral/errors.hpp"
#include "spectral/gproc.hpp"
#include "spectral/measure.hpp"
#include "spectral/qform.hpp"
#include "spectral/rng.hpp"
#include "spectral/sigmaspace.hpp"
#include "spectral/stats.hpp"
#include "spectral/testfn.hpp"

using namespace spectral;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
const fs::path kData = SPECTRAL_DATA_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double uniform(std::uint64_t seed, std::uint64_t index, std::uint32_t slot, bool second = false) {
  UniformPair u = uniform_pair(seed, index, slot, StreamTag::Parameters);
  return second ? u.b : u.a;
}

TestFunction random_packet(std::uint64_t seed, std::uint64_t index, bool real) {
  double c = -2.0 + 4.0 * uniform(seed, index, 0);
  double w = 0.4 + 1.2 * uniform(seed, index, 0, true);
  double a = 0.3 + uniform(seed, index, 1);
  double nu = real ? 0.0 : -2.0 + 4.0 * uniform(seed, index, 1, true);
  return TestFunction::gaussian(c, w, nu, a);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome parseval_lebesgue() {
  auto t0 = std::chrono::steady_clock::now();
  double q = q_sigma(TestFunction::gaussian(), SpectralMeasure::lebesgue()).real();
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double r = rel(q, 2 * kPi * std::sqrt(kPi));
  return {r <= 1e-8 && secs < 1.0, fmt("q=%.15g rel=%.2e time=%.3fs", q, r, secs)};
}

Outcome comb_form() {
  double theta = 1.0;
  for (int n = 1; n < 40; ++n) theta += 2.0 * std::exp(-double(n) * n);
  FormValue q = q_sigma(TestFunction::gaussian(), SpectralMeasure::comb());
  double r = rel(q.real(), 2 * kPi * theta);
  return {r <= 1e-10 && q.error_bound <= 1e-10 * q.real(),
          fmt("q=%.15g rel=%.2e bound=%.2e", q.real(), r, q.error_bound)};
}

Outcome comb_variance() {
  auto t0 = std::chrono::steady_clock::now();
  SpectralMeasure comb = SpectralMeasure::comb();
  std::vector<double> times{kPi / 4, kPi / 2, kPi, 1.5 * kPi};
  double worst_rel = 0.0;
  for (double t : times) worst_rel = std::max(worst_rel, rel(pointwise_covariance(comb, t, t).value, 2 * kPi * t));
  const std::size_t n = 100000;
  NormalFieldGrid grid = build_grid(comb, 500.5, 1001, BinRule::EqualWidth);
  PathEnsemble e = sample_paths(comb, grid, times, n, 20240601, workers());
  double worst_z = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    double truth = 2 * kPi * times[i];
    double v = e.values.col(static_cast<Eigen::Index>(i)).squaredNorm() / static_cast<double>(n);
    worst_z = std::max(worst_z, std::abs(v - truth) / (truth * std::sqrt(2.0 / static_cast<double>(n))));
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst_rel <= 1e-8 && worst_z <= 4.0 && secs < 30.0,
          fmt("max_rel=%.2e max|z|=%.2f time=%.1fs", worst_rel, worst_z, secs)};
}

Outcome fbm_slope() {
  std::string detail;
  bool ok = true;
  for (double H : {0.3, 0.7}) {
    SpectralMeasure f = SpectralMeasure::fbm(H);
    std::vector<double> x, y;
    for (double t = 0.125; t <= 8.0 + 1e-12; t *= 2) {
      x.push_back(std::log(t));
      y.push_back(std::log(pointwise_covariance(f, t, t).value));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / x.size(), my += y[i] / x.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
    double slope = sxy / sxx;
    ok = ok && std::abs(slope - 2 * H) <= 0.01;
    detail += fmt("H=%.1f slope=%.6f ", H, slope);
  }
  return {ok, detail};
}

Outcome closability() {
  std::vector<double> ks{1, 3, 10, 30, 100, 300, 1000, 3000, 10000};
  auto comb = closability_witness(SpectralMeasure::comb(), ks);
  bool ok = true;
  double prev_norm = kInfinity, qmin = kInfinity, qmax = 0.0;
  for (const auto& w : comb) {
    ok = ok && w.l2_norm_sq < prev_norm;
    prev_norm = w.l2_norm_sq;
    qmin = std::min(qmin, w.q.real());
    qmax = std::max(qmax, w.q.real());
  }
  ok = ok && qmin >= 0.99 && qmax <= 1.28 && std::abs(comb.back().q.real() - 1.0) < 1e-6;
  double leb_rel = 0.0;
  for (const auto& w : closability_witness(SpectralMeasure::lebesgue(), ks))
    leb_rel = std::max(leb_rel, rel(w.q.real(), std::sqrt(kPi / (2 * w.k))));
  ok = ok && leb_rel <= 1e-8;
  double gap = 0.0;
  std::vector<double> big{1e3, 3e3, 1e4, 1e5};
  for (double k : big)
    for (double l : big)
      if (k < l) gap = std::max(gap, q_sigma(witness_function(k) - witness_function(l), SpectralMeasure::comb()).real());
  ok = ok && gap < 1e-6;
  return {ok, fmt("comb q in [%.6f, %.6f] final=%.10f lebesgue max_rel=%.2e max_gap=%.2e", qmin, qmax,
                  comb.back().q.real(), leb_rel, gap)};
}

Outcome char_functional() {
  auto t0 = std::chrono::steady_clock::now();
  SpectralMeasure leb = SpectralMeasure::lebesgue();
  NormalFieldGrid grid = build_grid(leb, 6.0, 48, BinRule::EqualWidth);
  std::vector<double> z;
  for (std::uint64_t seed = 1; seed <= 100; ++seed)
    z.push_back(char_functional_check(leb, TestFunction::gaussian(), grid, 100000, seed, workers()).z_score);
  KsResult ks = ks_test_normal(z);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {ks.p_value > 0.01 && secs < 60.0, fmt("D=%.4f p=%.4f time=%.1fs", ks.statistic, ks.p_value, secs)};
}

Outcome singular_orthogonal() {
  SpectralMeasure comb = SpectralMeasure::comb(), leb = SpectralMeasure::lebesgue();
  bool ok = mutually_singular(comb, leb);
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 5; ++i) {
    CommonGridCorrelation r = common_grid_correlation(comb, random_packet(7, 2 * i, false), leb,
                                                      random_packet(7, 2 * i + 1, false), 8.0, 64, 100000, 100 + i,
                                                      workers());
    ok = ok && r.consistent && r.target == Complex(0.0, 0.0);
    worst = std::max({worst, std::abs(r.z_re), std::abs(r.z_im)});
  }
  SpectralMeasure d1 = SpectralMeasure::lebesgue({0.0, 1.0}, 1.0), d4 = SpectralMeasure::lebesgue({0.0, 1.0}, 4.0);
  CommonGridCorrelation r = common_grid_correlation(d1, TestFunction::fourier_expression("1", 0, 1), d4,
                                                    TestFunction::fourier_expression("1", 0, 1), 2.0, 400, 100000, 99,
                                                    workers());
  ok = ok && !mutually_singular(d1, d4) && std::abs(r.target - Complex(2.0, 0.0)) < 1e-9 && r.consistent;
  return {ok, fmt("singular max|z|=%.2f density estimate=%.4f%+.4fi z=(%.2f, %.2f)", worst, r.estimate.real(),
                  r.estimate.imag(), r.z_re, r.z_im)};
}

Outcome poisson() {
  double worst = 0.0;
  Complex constant{};
  for (std::uint64_t i = 0; i < 20; ++i) {
    PoissonPairing p = poisson_pairing(random_packet(11, 2 * i, false), random_packet(11, 2 * i + 1, false));
    worst = std::max(worst, p.relative_gap);
    constant = p.fitted_constant;
  }
  return {worst <= 1e-8, fmt("max_gap=%.2e fitted_constant=%.12f%+.2ei (1/2pi=%.12f)", worst, constant.real(),
                             constant.imag(), 1 / (2 * kPi))};
}

std::vector<std::pair<std::string, SpectralMeasure>> bundled() {
  return {{"lebesgue", SpectralMeasure::lebesgue()},
          {"comb", SpectralMeasure::comb()},
          {"fbm0.7", SpectralMeasure::fbm(0.7)},
          {"cantor", SpectralMeasure::cantor()},
          {"mixture", SpectralMeasure::mixture({{0.5, SpectralMeasure::lebesgue()},
                                                {1.0, SpectralMeasure::atoms({{-2, 1}, {2, 1}})},
                                                {2.0, SpectralMeasure::cantor()}})},
          {"comb+fbm", SpectralMeasure::mixture({{1.0, SpectralMeasure::comb()}, {1.0, SpectralMeasure::fbm(0.7)}})}};
}

Outcome psd() {
  bool ok = true;
  double worst = kInfinity;
  for (const auto& [name, s] : bundled()) {
    std::vector<GramInput> xs;
    std::vector<TestFunction> fs;
    for (std::uint64_t i = 0; i < 10; ++i) {
      if (i < 7) {
        xs.emplace_back(random_packet(13, i, i % 2 == 0));
      } else {
        xs.emplace_back(IncrementKernel(0.5 + 2.0 * uniform(13, i, 2)));
      }
      fs.push_back(Complex{0.4, 0.0} * random_packet(17, i, true));
    }
    Eigen::MatrixXcd G = gram_matrix(s, xs);
    Eigen::MatrixXd K(10, 10);
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j) K(i, j) = rkhs_kernel(s, fs[i], fs[j]);
    double g_min = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(G).eigenvalues().minCoeff();
    double k_min = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(K).eigenvalues().minCoeff();
    ok = ok && g_min >= -1e-9 * G.trace().real() && k_min >= -1e-9 * K.trace();
    worst = std::min({worst, g_min / G.trace().real(), k_min / K.trace()});
  }
  return {ok, fmt("min eigenvalue/trace=%.2e", worst)};
}

Outcome translation() {
  auto ms = bundled();
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const SpectralMeasure& s = ms[i % ms.size()].second;
    double t = -10.0 + 20.0 * uniform(19, i, 2);
    worst = std::max(worst, translation_invariance_check(random_packet(19, i, i % 3 != 0), s, t).relative_gap);
  }
  return {worst <= 1e-8, fmt("max_gap=%.2e", worst)};
}

Outcome convolution() {
  SpectralMeasure atoms = SpectralMeasure::atoms({{0.0, 1.0}, {1.0, 0.5}, {-2.5, 2.0}});
  bool ok = true;
  std::string detail;
  for (const auto& [name, s] :
       std::vector<std::pair<std::string, SpectralMeasure>>{{"lebesgue", SpectralMeasure::lebesgue()},
                                                             {"comb", SpectralMeasure::comb()},
                                                             {"fbm0.7", SpectralMeasure::fbm(0.7)}}) {
    GrowthOrder g = certify_class_C(convolve(s, atoms));
    ok = ok && g.in_class;
    detail += fmt("%s:p=%d ", name.c_str(), g.p);
  }
  bool raised = false;
  try {
    convolve(SpectralMeasure::lebesgue(), SpectralMeasure::lebesgue());
  } catch (const NotAMeasure&) {
    raised = true;
  }
  return {ok && raised, detail + (raised ? "lebesgue*lebesgue: NotAMeasure" : "lebesgue*lebesgue: no error")};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  fs::path root = fs::temp_directory_path() / "spectral_acceptance_determinism";
  fs::remove_all(root);
  auto simulate = [&](const std::string& dir, const std::string& w) {
    std::vector<std::string> args{"spectral", "simulate", "--measure", (kData / "measures/fbm_h07.json").string(),
                                  "--times", "0:8:33", "--paths", "2000", "--bins", "512", "--umax", "200",
                                  "--seed", "123456789", "--workers", w, "--out", (root / dir).string()};
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::streambuf* saved = std::cout.rdbuf();
    std::ostringstream sink;
    std::cout.rdbuf(sink.rdbuf());
    int code = cli::run(static_cast<int>(argv.size()), argv.data());
    std::cout.rdbuf(saved);
    return code;
  };
  bool ok = simulate("a", "1") == 0 && simulate("b", "1") == 0 && simulate("c", "4") == 0;
  for (const char* f : {"paths.csv", "paths.json"}) {
    std::string a = slurp(root / "a" / f);
    ok = ok && !a.empty() && a == slurp(root / "b" / f) && a == slurp(root / "c" / f);
  }
  std::size_t bytes = fs::exists(root / "a/paths.csv") ? fs::file_size(root / "a/paths.csv") : 0;
  fs::remove_all(root);
  return {ok, fmt("paths.csv %zu bytes identical across reruns and 1/4 workers", bytes)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"parseval-lebesgue", parseval_lebesgue}, {"comb-form", comb_form},
      {"comb-variance", comb_variance},         {"fbm-self-similarity", fbm_slope},
      {"closability", closability},             {"char-functional", char_functional},
      {"singular-orthogonal", singular_orthogonal}, {"poisson-periodization", poisson},
      {"psd", psd},                             {"translation-invariance", translation},
      {"convolution-class", convolution},       {"determinism", determinism}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %2zu %-24s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
