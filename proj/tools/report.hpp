#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "nsp/field.hpp"

namespace nsp::cli {

/// Writes through a temporary sibling and renames it into place.
/// Throws Error(IoError) on failure.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Shortest decimal form that reads back to the same double; "nan" for NaN.
std::string format_double(double x);

struct SeriesRow {
  double t = 0.0;
  double E = 0.0;
  double D = 0.0;
  double mass_defect = 0.0;
  double imp1_ratio = 0.0;
  double identity_residual = 0.0;
};

std::string series_csv(const std::vector<SeriesRow>& rows);

/// Raw dump: 16-byte header ("NSPF", u32 version 1, u32 node count, u32 zero
/// padding) followed by little-endian f64 values in node order.
std::string fields_blob(const ScalarField& values);
std::filesystem::path fields_path(const std::filesystem::path& dir, std::size_t index);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace nsp::cli
