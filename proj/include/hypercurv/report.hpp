#pragma once

#include "hypercurv/curvature.hpp"
#include "hypercurv/grid_function.hpp"
#include "hypercurv/height_field.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hypercurv {

inline constexpr const char* kToolVersion = "0.1.0";

/// Everything needed to reproduce a report; embedded in every report.
struct RunManifest {
  std::string command;
  nlohmann::json input = nlohmann::json::object();
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
  std::string version = kToolVersion;
};

nlohmann::json to_json(const RunManifest& manifest);

nlohmann::json to_json(const Vec& v);
nlohmann::json to_json(const Mat& m);

/// Point report: x, f, g, II, kappas, H, ricci_eigs, residuals {codazzi,
/// gauss}, plus regime data. Residuals are null when the stencil does not fit.
nlohmann::json point_report(const HeightField& field, const Vec& x, double step);

/// One CSV row per evaluable node: x1..xn, f, H, kappa1..kappan, min_ric_eig,
/// A, B, AB_minus_(n-1), density, regime. Returns the number of rows.
std::size_t write_scan_csv(const HeightField& field, const GridSpec& grid, const std::filesystem::path& path);

}  // namespace hypercurv
