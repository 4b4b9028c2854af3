#include "spectral/measure_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "spectral/errors.hpp"
#include "spectral/expr.hpp"

namespace spectral {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

void expect_object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!ok.count(key)) fail(path, "unknown key '" + key + "'");
}

const json& member(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) fail(path, std::string("missing key '") + key + "'");
  return j.at(key);
}

double number_or(const json& j, const std::string& path, const char* key, double fallback) {
  return j.contains(key) ? number_from_json(j.at(key), path + "." + key) : fallback;
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number_from_json(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

Complex complex_from_json(const json& j, const std::string& path) {
  if (j.is_array()) {
    if (j.size() != 2) fail(path, "complex numbers are written [re, im]");
    return {number_from_json(j[0], path + "[0]"), number_from_json(j[1], path + "[1]")};
  }
  return {number_from_json(j, path), 0.0};
}

json complex_to_json(Complex c) {
  if (c.imag() == 0.0) return c.real();
  return json::array({c.real(), c.imag()});
}

Interval interval_from_json(const json& j, const std::string& path) {
  std::vector<double> v = numbers(j, path);
  if (v.size() != 2) fail(path, "an interval is written [lo, hi]");
  if (!(v[0] < v[1])) fail(path, "interval needs lo < hi");
  return {v[0], v[1]};
}

json bound_to_json(double x) {
  if (x == kInfinity) return "inf";
  if (x == -kInfinity) return "-inf";
  return x;
}

json interval_to_json(const Interval& I) { return json::array({bound_to_json(I.lo), bound_to_json(I.hi)}); }

template <typename Fn>
auto guarded(const std::string& path, Fn fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    fail(path, e.what());
  }
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1, column = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

double number_from_json(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
    try {
      return evaluate_constant(s);
    } catch (const SpectralError& e) {
      fail(path, "bad constant '" + s + "': " + e.what());
    }
  }
  fail(path, "expected a number");
}

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, column] = line_column(text, e.byte);
    std::string what = e.what();
    if (auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
    throw ConfigError(what, line, column);
  }
}

json load_json_file(const std::filesystem::path& path) {
  try {
    return parse_json_text(read_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

SpectralMeasure measure_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected a measure object");
  std::string kind = member(j, path, "kind").is_string() ? j.at("kind").get<std::string>() : "";
  return guarded(path, [&]() -> SpectralMeasure {
    if (kind == "density") {
      expect_object(j, path, {"kind", "expression", "support", "tail_exponent", "singularities"});
      const json& e = member(j, path, "expression");
      if (!e.is_string()) fail(path + ".expression", "expected a string");
      Interval support = j.contains("support") ? interval_from_json(j.at("support"), path + ".support") : Interval{};
      std::optional<double> tail;
      if (j.contains("tail_exponent")) tail = number_from_json(j.at("tail_exponent"), path + ".tail_exponent");
      std::vector<Singularity> sing;
      if (j.contains("singularities")) {
        const json& s = j.at("singularities");
        if (!s.is_array()) fail(path + ".singularities", "expected an array");
        for (std::size_t i = 0; i < s.size(); ++i) {
          std::string p = path + ".singularities[" + std::to_string(i) + "]";
          expect_object(s[i], p, {"location", "exponent"});
          sing.push_back({number_from_json(member(s[i], p, "location"), p + ".location"),
                          number_from_json(member(s[i], p, "exponent"), p + ".exponent")});
        }
      }
      try {
        return SpectralMeasure::density(e.get<std::string>(), support, tail, std::move(sing));
      } catch (const ConfigError& err) {
        fail(path + ".expression", err.what());
      }
    }
    if (kind == "lebesgue") {
      expect_object(j, path, {"kind", "support", "value"});
      Interval support = j.contains("support") ? interval_from_json(j.at("support"), path + ".support") : Interval{};
      return SpectralMeasure::lebesgue(support, number_or(j, path, "value", 1.0));
    }
    if (kind == "fbm") {
      expect_object(j, path, {"kind", "hurst"});
      return SpectralMeasure::fbm(number_from_json(member(j, path, "hurst"), path + ".hurst"));
    }
    if (kind == "atomic") {
      expect_object(j, path, {"kind", "atoms"});
      const json& a = member(j, path, "atoms");
      if (!a.is_array()) fail(path + ".atoms", "expected an array");
      std::vector<Atom> atoms;
      for (std::size_t i = 0; i < a.size(); ++i) {
        std::string p = path + ".atoms[" + std::to_string(i) + "]";
        expect_object(a[i], p, {"location", "weight"});
        atoms.push_back({number_from_json(member(a[i], p, "location"), p + ".location"), number_or(a[i], p, "weight", 1.0)});
      }
      return SpectralMeasure::atoms(std::move(atoms));
    }
    if (kind == "comb") {
      expect_object(j, path, {"kind"});
      return SpectralMeasure::comb();
    }
    if (kind == "lattice") {
      expect_object(j, path, {"kind", "spacing", "offset", "weight", "weight_growth", "weight_center"});
      Lattice l;
      l.spacing = number_or(j, path, "spacing", 1.0);
      l.offset = number_or(j, path, "offset", 0.0);
      l.weight = number_or(j, path, "weight", 1.0);
      l.weight_growth = number_or(j, path, "weight_growth", 0.0);
      l.weight_center = number_or(j, path, "weight_center", 0.0);
      return SpectralMeasure::lattice(l);
    }
    if (kind == "ifs") {
      expect_object(j, path, {"kind", "ratios", "offsets", "probabilities", "mass", "depth"});
      SelfSimilar s;
      s.ratios = numbers(member(j, path, "ratios"), path + ".ratios");
      s.offsets = numbers(member(j, path, "offsets"), path + ".offsets");
      s.probabilities = numbers(member(j, path, "probabilities"), path + ".probabilities");
      if (s.offsets.size() != s.ratios.size() || s.probabilities.size() != s.ratios.size())
        fail(path, "ratios, offsets and probabilities must have equal length");
      s.mass = number_or(j, path, "mass", 1.0);
      if (j.contains("depth")) {
        if (!j.at("depth").is_number_integer()) fail(path + ".depth", "expected an integer");
        s.depth = j.at("depth").get<int>();
      }
      return SpectralMeasure::self_similar(std::move(s));
    }
    if (kind == "cantor") {
      expect_object(j, path, {"kind", "mass"});
      return SpectralMeasure::cantor(number_or(j, path, "mass", 1.0));
    }
    if (kind == "mixture") {
      expect_object(j, path, {"kind", "components"});
      const json& c = member(j, path, "components");
      if (!c.is_array()) fail(path + ".components", "expected an array");
      std::vector<std::pair<double, SpectralMeasure>> comps;
      for (std::size_t i = 0; i < c.size(); ++i) {
        std::string p = path + ".components[" + std::to_string(i) + "]";
        expect_object(c[i], p, {"coefficient", "measure"});
        comps.emplace_back(number_or(c[i], p, "coefficient", 1.0), measure_from_json(member(c[i], p, "measure"), p + ".measure"));
      }
      return SpectralMeasure::mixture(std::move(comps));
    }
    if (kind == "shifted") {
      expect_object(j, path, {"kind", "base", "offset"});
      return SpectralMeasure::shifted(measure_from_json(member(j, path, "base"), path + ".base"),
                                      number_from_json(member(j, path, "offset"), path + ".offset"));
    }
    if (kind == "convolution") {
      expect_object(j, path, {"kind", "a", "b"});
      return convolve(measure_from_json(member(j, path, "a"), path + ".a"),
                      measure_from_json(member(j, path, "b"), path + ".b"));
    }
    fail(path + ".kind", "unknown measure kind '" + kind + "'");
  });
}

json measure_to_json(const SpectralMeasure& m) {
  switch (m.kind()) {
    case MeasureKind::Density: {
      const Density& d = m.as_density();
      if (d.factors) return {{"kind", "convolution"}, {"a", measure_to_json(d.factors->a)}, {"b", measure_to_json(d.factors->b)}};
      if (d.expression.empty()) throw Unsupported("derived density has no serializable expression");
      json j = {{"kind", "density"}, {"expression", d.expression}};
      if (d.support.lo > -kInfinity || d.support.hi < kInfinity) j["support"] = interval_to_json(d.support);
      j["tail_exponent"] = bound_to_json(d.tail_exponent);
      if (!d.singularities.empty()) {
        json s = json::array();
        for (const auto& x : d.singularities) s.push_back({{"location", x.location}, {"exponent", x.exponent}});
        j["singularities"] = s;
      }
      return j;
    }
    case MeasureKind::Atomic: {
      const Atomic& a = m.as_atomic();
      if (a.lattice) {
        const Lattice& l = *a.lattice;
        return {{"kind", "lattice"}, {"spacing", l.spacing}, {"offset", l.offset}, {"weight", l.weight},
                {"weight_growth", l.weight_growth}, {"weight_center", l.weight_center}};
      }
      json atoms = json::array();
      for (const auto& x : a.atoms) atoms.push_back({{"location", x.location}, {"weight", x.weight}});
      return {{"kind", "atomic"}, {"atoms", atoms}};
    }
    case MeasureKind::SelfSimilarIFS: {
      const SelfSimilar& s = m.as_self_similar();
      return {{"kind", "ifs"}, {"ratios", s.ratios}, {"offsets", s.offsets}, {"probabilities", s.probabilities},
              {"mass", s.mass}, {"depth", s.depth}};
    }
    case MeasureKind::Mixture: {
      json c = json::array();
      for (const auto& comp : m.components())
        c.push_back({{"coefficient", comp.coefficient}, {"measure", measure_to_json(*comp.measure)}});
      return {{"kind", "mixture"}, {"components", c}};
    }
    case MeasureKind::Shifted:
      return {{"kind", "shifted"}, {"base", measure_to_json(*m.as_shift().base)}, {"offset", m.as_shift().offset}};
  }
  throw Unsupported("unknown measure kind");
}

SpectralMeasure load_measure(const std::filesystem::path& path) {
  json j = load_json_file(path);
  try {
    return measure_from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

TestFunction testfn_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected a test-function object");
  std::string form = member(j, path, "form").is_string() ? j.at("form").get<std::string>() : "";
  return guarded(path, [&]() -> TestFunction {
    if (form == "gaussian") {
      expect_object(j, path, {"form", "center", "width", "modulation", "amplitude"});
      double width = number_or(j, path, "width", 1.0);
      if (!(width > 0.0)) fail(path + ".width", "width must be positive");
      Complex amp = j.contains("amplitude") ? complex_from_json(j.at("amplitude"), path + ".amplitude") : Complex{1.0};
      return TestFunction::gaussian(number_or(j, path, "center", 0.0), width, number_or(j, path, "modulation", 0.0), amp);
    }
    if (form == "hermite") {
      expect_object(j, path, {"form", "coefficients", "center"});
      const json& c = member(j, path, "coefficients");
      if (!c.is_array()) fail(path + ".coefficients", "expected an array");
      std::vector<Complex> coef;
      for (std::size_t i = 0; i < c.size(); ++i)
        coef.push_back(complex_from_json(c[i], path + ".coefficients[" + std::to_string(i) + "]"));
      return TestFunction::hermite(std::move(coef), number_or(j, path, "center", 0.0));
    }
    if (form == "fourier") {
      expect_object(j, path, {"form", "expression", "support"});
      const json& e = member(j, path, "expression");
      if (!e.is_string()) fail(path + ".expression", "expected a string");
      Interval s = interval_from_json(member(j, path, "support"), path + ".support");
      try {
        return TestFunction::fourier_expression(e.get<std::string>(), s.lo, s.hi);
      } catch (const ConfigError& err) {
        fail(path + ".expression", err.what());
      }
    }
    if (form == "sum") {
      expect_object(j, path, {"form", "terms"});
      const json& t = member(j, path, "terms");
      if (!t.is_array()) fail(path + ".terms", "expected an array");
      TestFunction out;
      for (std::size_t i = 0; i < t.size(); ++i) out = out + testfn_from_json(t[i], path + ".terms[" + std::to_string(i) + "]");
      return out;
    }
    if (form == "increment") fail(path + ".form", "an increment kernel is not a test function here");
    fail(path + ".form", "unknown test-function form '" + form + "'");
  });
}

GramInput gram_input_from_json(const json& j, const std::string& path) {
  if (j.is_object() && j.contains("form") && j.at("form") == "increment") {
    expect_object(j, path, {"form", "t"});
    return IncrementKernel(number_from_json(member(j, path, "t"), path + ".t"));
  }
  return testfn_from_json(j, path);
}

json testfn_to_json(const TestFunction& psi) {
  json terms = json::array();
  for (const auto& t : psi.terms()) {
    if (const auto* g = std::get_if<GaussianPacket>(&t)) {
      terms.push_back({{"form", "gaussian"}, {"center", g->center}, {"width", g->width}, {"modulation", g->modulation},
                       {"amplitude", complex_to_json(g->amplitude)}});
    } else if (const auto* h = std::get_if<HermiteExpansion>(&t)) {
      json c = json::array();
      for (const auto& a : h->coefficients) c.push_back(complex_to_json(a));
      terms.push_back({{"form", "hermite"}, {"coefficients", c}, {"center", h->center}});
    } else {
      throw Unsupported("Fourier-side test functions are not serializable");
    }
  }
  if (terms.size() == 1) return terms.front();
  return {{"form", "sum"}, {"terms", terms}};
}

TestFunction load_testfn(const std::filesystem::path& path) {
  json j = load_json_file(path);
  try {
    return testfn_from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

SigmaFunction sigma_function_from_json(const json& j, const std::string& path) {
  expect_object(j, path, {"measure", "function"});
  SpectralMeasure sigma = measure_from_json(member(j, path, "measure"), path + ".measure");
  if (!j.contains("function")) return SigmaFunction::from_expression("1", sigma);
  const json& f = j.at("function");
  std::string p = path + ".function";
  expect_object(f, p, {"expression", "testfn", "atoms"});
  if (f.size() != 1) fail(p, "give exactly one of expression, testfn, atoms");
  return guarded(p, [&]() -> SigmaFunction {
    if (f.contains("expression")) {
      if (!f.at("expression").is_string()) fail(p + ".expression", "expected a string");
      try {
        return SigmaFunction::from_expression(f.at("expression").get<std::string>(), sigma);
      } catch (const ConfigError& err) {
        fail(p + ".expression", err.what());
      }
    }
    if (f.contains("testfn")) return SigmaFunction::from_test_function(testfn_from_json(f.at("testfn"), p + ".testfn"), sigma);
    const json& a = f.at("atoms");
    if (!a.is_array()) fail(p + ".atoms", "expected an array");
    std::vector<std::pair<double, Complex>> values;
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::string q = p + ".atoms[" + std::to_string(i) + "]";
      expect_object(a[i], q, {"location", "value"});
      values.emplace_back(number_from_json(member(a[i], q, "location"), q + ".location"),
                          complex_from_json(member(a[i], q, "value"), q + ".value"));
    }
    return SigmaFunction::from_atom_weights(std::move(values), sigma);
  });
}

json grid_to_json(const NormalFieldGrid& g) {
  return {{"measure", g.measure},
          {"p", g.p},
          {"u_max", g.u_max},
          {"bins", g.bins()},
          {"rule", to_string(g.rule)},
          {"truncation_mass", g.truncation_mass},
          {"total_moment", g.total_moment},
          {"symmetrized", g.symmetrized}};
}

}  // namespace spectral
