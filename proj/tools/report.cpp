#include "report.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>

#include "nsp/error.hpp"

namespace nsp::cli {

namespace fs = std::filesystem;

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string series_csv(const std::vector<SeriesRow>& rows) {
  std::string out = "t,E,D,mass_defect,imp1_ratio,identity_residual\n";
  for (const auto& r : rows) {
    out += format_double(r.t) + ',' + format_double(r.E) + ',' + format_double(r.D) + ',' +
           format_double(r.mass_defect) + ',' + format_double(r.imp1_ratio) + ',' +
           format_double(r.identity_residual) + '\n';
  }
  return out;
}

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

}  // namespace

std::string fields_blob(const ScalarField& values) {
  std::string out = "NSPF";
  put_u32(out, 1);
  put_u32(out, static_cast<std::uint32_t>(values.size()));
  put_u32(out, 0);
  out.reserve(16 + 8 * values.size());
  for (double v : values) put_u64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

fs::path fields_path(const fs::path& dir, std::size_t index) {
  char name[32];
  std::snprintf(name, sizeof name, "fields_%04zu.bin", index);
  return dir / name;
}

void write_json(const fs::path& path, const nlohmann::json& doc) {
  write_atomic(path, doc.dump(2) + "\n");
}

}  // namespace nsp::cli
