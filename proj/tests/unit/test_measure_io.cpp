#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "oracles.hpp"
#include "spectral/errors.hpp"
#include "spectral/measure_io.hpp"
#include "spectral/qform.hpp"

using namespace spectral;
using nlohmann::json;

namespace {

const std::filesystem::path kData = SPECTRAL_DATA_DIR;

double moment(const SpectralMeasure& m) { return moment_integral(m, 1).value; }

template <typename F>
std::string error_text(F&& f) {
  try {
    f();
  } catch (const SpectralError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(MeasureIo, ShippedMeasuresLoad) {
  EXPECT_NEAR(moment(load_measure(kData / "measures/comb.json")), oracle::kPi / std::tanh(oracle::kPi), 1e-12);
  EXPECT_NEAR(moment(load_measure(kData / "measures/lebesgue.json")), oracle::kPi, 1e-12);
  EXPECT_NEAR(moment(load_measure(kData / "measures/two_atoms.json")), 1.5, 1e-15);
  EXPECT_NEAR(moment(load_measure(kData / "measures/unit_interval_x4.json")), 4 * std::atan(1.0), 1e-9);
  for (const auto& entry : std::filesystem::directory_iterator(kData / "measures"))
    EXPECT_NO_THROW(load_measure(entry.path())) << entry.path();
}

TEST(MeasureIo, RoundTripPreservesMoments) {
  for (const auto& entry : std::filesystem::directory_iterator(kData / "measures")) {
    SpectralMeasure m = load_measure(entry.path());
    json j = measure_to_json(m);
    SpectralMeasure back = measure_from_json(j);
    EXPECT_EQ(back.describe(), m.describe()) << entry.path();
    EXPECT_NEAR(moment(back), moment(m), 1e-12 * std::max(1.0, moment(m))) << entry.path();
    EXPECT_EQ(measure_to_json(back), j);
  }
}

TEST(MeasureIo, SyntaxErrorsCarryLineAndColumn) {
  try {
    parse_json_text("{\n  \"kind\": \"comb\",\n  oops\n}");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_GT(e.column(), 0);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(MeasureIo, SemanticErrorsNameThePath) {
  json bad = json::parse(R"({"kind": "mixture", "components": [{"coefficient": 1, "measure": {"kind": "fbm", "hurst": 1.5}}]})");
  EXPECT_NE(error_text([&] { measure_from_json(bad); }).find("$.components[0].measure"), std::string::npos);
  EXPECT_THROW(measure_from_json(json::parse(R"({"kind": "nope"})")), ConfigError);
  EXPECT_THROW(measure_from_json(json::parse(R"({"kind": "comb", "extra": 1})")), ConfigError);
  EXPECT_THROW(measure_from_json(json::parse(R"({"kind": "atomic", "atoms": [{"location": 0, "weight": -1}]})")),
               SpectralError);
  EXPECT_THROW(load_measure(kData / "measures/does_not_exist.json"), ConfigError);
}

TEST(MeasureIo, NumbersAcceptConstantExpressions) {
  EXPECT_NEAR(number_from_json("2pi", "$"), 2 * oracle::kPi, 1e-15);
  EXPECT_EQ(number_from_json("inf", "$"), kInfinity);
  EXPECT_EQ(number_from_json("-inf", "$"), -kInfinity);
  EXPECT_EQ(number_from_json(0.25, "$"), 0.25);
  EXPECT_THROW(number_from_json("u + 1", "$"), ConfigError);
  SpectralMeasure l = measure_from_json(json::parse(R"({"kind": "lattice", "spacing": "2pi"})"));
  EXPECT_NEAR(moment(l), moment(measure_from_json(json::parse(R"({"kind": "lattice", "spacing": 6.283185307179586})"))),
              1e-15);
}

TEST(TestfnIo, ShippedFunctionsLoad) {
  TestFunction g = load_testfn(kData / "testfns/gaussian.json");
  EXPECT_NEAR(g.transform_at(0.0).real(), std::sqrt(2 * oracle::kPi), 1e-14);
  TestFunction box = load_testfn(kData / "testfns/fourier_box.json");
  EXPECT_EQ(box.transform_at(0.5), Complex(1.0, 0.0));
  EXPECT_EQ(box.transform_at(1.5), Complex(0.0, 0.0));
  TestFunction h = load_testfn(kData / "testfns/hermite_h1.json");
  EXPECT_NEAR(std::abs(h(0.7)), hermite_function(1, 0.7), 1e-15);
}

TEST(TestfnIo, RoundTrip) {
  TestFunction psi = TestFunction::gaussian(0.5, 0.8, 1.2, Complex(1.5, -0.5)) +
                     TestFunction::hermite({Complex(0.0), Complex(1.0, 2.0), Complex(0.5)}, 0.3);
  TestFunction back = testfn_from_json(testfn_to_json(psi));
  for (double u : {-2.0, 0.0, 0.7, 3.0}) EXPECT_EQ(back.transform_at(u), psi.transform_at(u));
  EXPECT_THROW(testfn_to_json(TestFunction::fourier_expression("1", 0, 1)), Unsupported);
}

TEST(TestfnIo, GramInputs) {
  GramInput inc = gram_input_from_json(json::parse(R"({"form": "increment", "t": "pi"})"));
  ASSERT_TRUE(std::holds_alternative<IncrementKernel>(inc));
  EXPECT_NEAR(std::get<IncrementKernel>(inc).t(), oracle::kPi, 1e-15);
  EXPECT_THROW(testfn_from_json(json::parse(R"({"form": "increment", "t": 1})")), ConfigError);
  EXPECT_NE(error_text([] { testfn_from_json(json::parse(R"({"form": "sum", "terms": [{"form": "gaussian", "width": -1}]})")); })
                .find("$.terms[0]"),
            std::string::npos);
}

TEST(SigmaIo, FunctionForms) {
  SigmaFunction d = sigma_function_from_json(json::parse(R"({"measure": {"kind": "lebesgue", "support": [0, 1]}})"));
  EXPECT_NEAR(d.norm_sq(), 1.0, 1e-12);
  SigmaFunction e = sigma_function_from_json(
      json::parse(R"({"measure": {"kind": "lebesgue", "support": [0, 1]}, "function": {"expression": "2"}})"));
  EXPECT_NEAR(e.norm_sq(), 4.0, 1e-12);
  SigmaFunction a = sigma_function_from_json(json::parse(
      R"({"measure": {"kind": "atomic", "atoms": [{"location": 1, "weight": 2}]}, "function": {"atoms": [{"location": 1, "value": 3}]}})"));
  EXPECT_NEAR(a.norm_sq(), 18.0, 1e-12);
  SigmaFunction t = sigma_function_from_json(
      json::parse(R"({"measure": {"kind": "lebesgue"}, "function": {"testfn": {"form": "gaussian"}}})"));
  EXPECT_NEAR(t.norm_sq(), 2 * std::pow(oracle::kPi, 1.5), 1e-9);
  EXPECT_THROW(sigma_function_from_json(json::parse(R"({"measure": {"kind": "comb"}, "function": {}})")), ConfigError);
}

TEST(GridIo, FieldsAreSerialized) {
  NormalFieldGrid g = build_grid(SpectralMeasure::comb(), 2.5, 5, BinRule::EqualMass);
  json j = grid_to_json(g);
  EXPECT_EQ(j.at("rule"), "equal_mass");
  EXPECT_EQ(j.at("bins"), 5);
  EXPECT_EQ(j.at("p"), 1);
  EXPECT_EQ(j.at("truncation_mass").get<double>(), g.truncation_mass);
}
