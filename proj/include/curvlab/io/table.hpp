#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "curvlab/error.hpp"
#include "curvlab/radial.hpp"

namespace curvlab::io {

/// 12 significant digits; nan / inf / -inf spelled out.
inline std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

/// JSON number, or a string for values JSON cannot hold.
inline nlohmann::json jnum(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(num(x)); }

/// Header plus rows of cells; cells are preformatted strings.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  CsvTable& row() {
    rows_.emplace_back();
    return *this;
  }
  CsvTable& add(double x) { return add(num(x)); }
  CsvTable& add(const std::string& s) {
    rows_.back().push_back(s);
    return *this;
  }
  CsvTable& add(const char* s) { return add(std::string(s)); }
  CsvTable& add(bool b) { return add(std::string(b ? "1" : "0")); }
  CsvTable& add(int k) { return add(std::to_string(k)); }
  CsvTable& add(std::size_t k) { return add(std::to_string(k)); }

  std::string str() const {
    std::ostringstream os;
    line(os, header_);
    for (const auto& r : rows_) line(os, r);
    return os.str();
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary);
    require(static_cast<bool>(os), ErrorCode::InvalidArgument, "cannot write " + path.string());
    os << str();
  }

 private:
  static void line(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << "\n";
  }
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

inline void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), ErrorCode::InvalidArgument, "cannot write " + path.string());
  os << j.dump(2) << "\n";
}

/// Radial profile as CSV "rho,v" with a sidecar <stem>.json {"n", "R"}.
inline void write_profile(const RadialProfile& p, const std::filesystem::path& csv) {
  CsvTable t({"rho", "v"});
  const auto rho = p.rho();
  const auto v = p.v();
  for (std::size_t i = 0; i < rho.size(); ++i) t.row().add(rho[i]).add(v[i]);
  t.write(csv);
  auto side = csv;
  side.replace_extension(".json");
  write_json({{"n", p.n()}, {"R", rho.back()}}, side);
}

inline RadialProfile read_profile(const std::filesystem::path& csv) {
  auto side = csv;
  side.replace_extension(".json");
  std::ifstream js(side);
  require(static_cast<bool>(js), ErrorCode::MalformedInput, "missing sidecar " + side.string());
  int n = 0;
  double R = 0.0;
  try {
    const auto j = nlohmann::json::parse(js);
    n = j.at("n").get<int>();
    R = j.at("R").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedInput, side.string() + ": " + e.what());
  }
  std::ifstream is(csv);
  require(static_cast<bool>(is), ErrorCode::MalformedInput, "cannot open " + csv.string());
  std::string line;
  std::getline(is, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "rho,v", ErrorCode::MalformedInput, csv.string() + ": header must be rho,v");
  std::vector<double> rho, v;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    require(comma != std::string::npos, ErrorCode::MalformedInput, csv.string() + ": bad row '" + line + "'");
    try {
      rho.push_back(std::stod(line.substr(0, comma)));
      v.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw Error(ErrorCode::MalformedInput, csv.string() + ": bad number in '" + line + "'");
    }
  }
  require(!rho.empty() && std::fabs(rho.back() - R) <= 1e-12 * std::max(1.0, R), ErrorCode::MalformedInput,
          csv.string() + ": last rho does not match R");
  try {
    return RadialProfile(n, std::move(rho), std::move(v));
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedInput, csv.string() + ": " + e.what());
  }
}

}  // namespace curvlab::io
