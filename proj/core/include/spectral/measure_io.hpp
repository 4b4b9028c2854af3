#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "spectral/gproc.hpp"
#include "spectral/measure.hpp"
#include "spectral/sigmaspace.hpp"
#include "spectral/testfn.hpp"

namespace spectral {

/// Parses JSON text; syntax errors become ConfigError with line and column.
nlohmann::json parse_json_text(const std::string& text);
nlohmann::json load_json_file(const std::filesystem::path& path);

/// Measure configuration {"kind": ...}. Semantic errors name the JSON path.
SpectralMeasure measure_from_json(const nlohmann::json& j, const std::string& path = "$");
/// Inverse of measure_from_json. Throws Unsupported for densities that have
/// no expression (derived by restriction or sigma-space rules).
nlohmann::json measure_to_json(const SpectralMeasure& m);
SpectralMeasure load_measure(const std::filesystem::path& path);

/// Test-function configuration {"form": ...}.
TestFunction testfn_from_json(const nlohmann::json& j, const std::string& path = "$");
/// Also accepts {"form": "increment", "t": ...}.
GramInput gram_input_from_json(const nlohmann::json& j, const std::string& path = "$");
nlohmann::json testfn_to_json(const TestFunction& psi);
TestFunction load_testfn(const std::filesystem::path& path);

/// {"measure": {...}, "function": F} with F one of {"expression": "..."},
/// {"testfn": {...}} or {"atoms": [{"location": x, "value": v}, ...]};
/// a missing function means f ≡ 1.
SigmaFunction sigma_function_from_json(const nlohmann::json& j, const std::string& path = "$");

nlohmann::json grid_to_json(const NormalFieldGrid& grid);

/// Accepts a JSON number, or a string holding a constant expression such as
/// "2pi", "inf" or "-inf".
double number_from_json(const nlohmann::json& j, const std::string& path);

}  // namespace spectral
