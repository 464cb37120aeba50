// File formats: IFS specifications (JSON), atomic measures (CSV or JSON rows
// [coords..., mass]), and spectrum curves (CSV or JSON).
#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "selfsim/core.hpp"
#include "selfsim/ifs.hpp"
#include "selfsim/measure.hpp"
#include "selfsim/spectrum.hpp"

namespace selfsim {

using Json = nlohmann::ordered_json;

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write file '" + path + "'");
  out << text;
  if (!out) throw InputError("write failed for '" + path + "'");
}

inline Json parse_json(std::string_view text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(what + ": malformed JSON (" + e.what() + ")");
  }
}

/// Shortest decimal that reads back to the same double ("%.17g" fallback).
inline std::string format_double(double v) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline void reject_unknown_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                                const std::string& where) {
  if (!obj.is_object()) throw InputError(where + ": expected a JSON object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw InputError(where + ": unknown key '" + key + "'");
  }
}

namespace detail {

inline double json_number(const Json& v, const std::string& where) {
  if (!v.is_number()) throw InputError(where + " must be a number");
  return v.get<double>();
}

inline std::vector<double> json_vector(const Json& v, const std::string& where) {
  if (!v.is_array()) throw InputError(where + " must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(json_number(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace detail

// ---- IFS ----

inline IfsSystem ifs_from_json(const Json& j) {
  reject_unknown_keys(j, {"name", "dimension", "maps", "osc"}, "ifs");
  if (!j.contains("dimension") || !j["dimension"].is_number_integer() || j["dimension"].get<long long>() < 1) {
    throw InputError("ifs: 'dimension' must be a positive integer");
  }
  const auto d = static_cast<std::size_t>(j["dimension"].get<long long>());
  if (!j.contains("maps") || !j["maps"].is_array() || j["maps"].empty()) {
    throw InputError("ifs: 'maps' must be a non-empty array");
  }
  std::vector<Similitude> maps;
  for (std::size_t k = 0; k < j["maps"].size(); ++k) {
    const Json& m = j["maps"][k];
    const std::string where = "ifs.maps[" + std::to_string(k) + "]";
    reject_unknown_keys(m, {"ratio", "matrix", "translation"}, where);
    if (!m.contains("ratio")) throw InputError(where + ": missing 'ratio'");
    if (!m.contains("translation")) throw InputError(where + ": missing 'translation'");
    const double ratio = detail::json_number(m["ratio"], where + ".ratio");
    const auto t = detail::json_vector(m["translation"], where + ".translation");
    if (t.size() != d) throw InputError(where + ".translation: expected " + std::to_string(d) + " entries");
    std::vector<double> matrix;
    if (m.contains("matrix")) {
      const Json& rows = m["matrix"];
      if (!rows.is_array() || rows.size() != d) throw InputError(where + ".matrix: expected " + std::to_string(d) + " rows");
      for (std::size_t r = 0; r < d; ++r) {
        const auto row = detail::json_vector(rows[r], where + ".matrix[" + std::to_string(r) + "]");
        if (row.size() != d) throw InputError(where + ".matrix: rows must have " + std::to_string(d) + " entries");
        matrix.insert(matrix.end(), row.begin(), row.end());
      }
    } else {
      matrix.assign(d * d, 0.0);
      for (std::size_t i = 0; i < d; ++i) matrix[i * d + i] = 1.0;
    }
    try {
      maps.emplace_back(ratio, std::move(matrix), t);
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  const std::string name = j.contains("name") ? j["name"].get<std::string>() : "ifs";
  bool osc = false;
  if (j.contains("osc")) {
    if (!j["osc"].is_boolean()) throw InputError("ifs: 'osc' must be a boolean");
    osc = j["osc"].get<bool>();
  }
  return IfsSystem(name, d, std::move(maps), osc);
}

inline IfsSystem load_ifs(const std::string& path) {
  return ifs_from_json(parse_json(read_text_file(path), path));
}

inline Json ifs_to_json(const IfsSystem& ifs) {
  Json j;
  j["name"] = ifs.name();
  j["dimension"] = ifs.dimension();
  Json maps = Json::array();
  const std::size_t d = ifs.dimension();
  for (const auto& m : ifs.maps()) {
    Json mj;
    mj["ratio"] = m.ratio();
    Json rows = Json::array();
    for (std::size_t r = 0; r < d; ++r) {
      Json row = Json::array();
      for (std::size_t c = 0; c < d; ++c) row.push_back(m.orthogonal()[r * d + c]);
      rows.push_back(row);
    }
    mj["matrix"] = rows;
    mj["translation"] = m.translation();
    maps.push_back(mj);
  }
  j["maps"] = maps;
  j["osc"] = ifs.declared_osc();
  return j;
}

// ---- measures ----

inline Json measure_to_json(const AtomicMeasure& mu) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < mu.size(); ++i) {
    Json row = Json::array();
    for (double c : mu.point(i)) row.push_back(c);
    row.push_back(mu.mass(i));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline AtomicMeasure measure_from_json(const Json& rows, const std::string& where = "measure") {
  if (!rows.is_array() || rows.empty()) throw InputError(where + ": expected a non-empty array of [coords..., mass] rows");
  std::size_t width = 0;
  std::vector<double> coords;
  std::vector<double> masses;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto row = detail::json_vector(rows[i], where + "[" + std::to_string(i) + "]");
    if (i == 0) width = row.size();
    if (row.size() < 2 || row.size() != width) throw InputError(where + ": rows must share a width >= 2");
    coords.insert(coords.end(), row.begin(), row.end() - 1);
    masses.push_back(row.back());
  }
  return AtomicMeasure::from_atoms(width - 1, std::move(coords), std::move(masses));
}

inline std::string measure_to_csv(const AtomicMeasure& mu) {
  std::string out;
  for (std::size_t c = 0; c < mu.dimension(); ++c) out += "x" + std::to_string(c + 1) + ",";
  out += "mass\n";
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (double c : mu.point(i)) out += format_double(c) + ",";
    out += format_double(mu.mass(i)) + "\n";
  }
  return out;
}

inline AtomicMeasure measure_from_csv(std::string_view text, const std::string& where = "measure csv") {
  std::vector<double> coords;
  std::vector<double> masses;
  std::size_t width = 0;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line_no == 1 && line.find_first_of("xm") == 0) continue;  // header
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw InputError(where + ":" + std::to_string(line_no) + ": not a number '" + cell + "'");
      row.push_back(v);
    }
    if (width == 0) width = row.size();
    if (row.size() < 2 || row.size() != width) {
      throw InputError(where + ":" + std::to_string(line_no) + ": rows must share a width >= 2");
    }
    coords.insert(coords.end(), row.begin(), row.end() - 1);
    masses.push_back(row.back());
  }
  if (masses.empty()) throw InputError(where + ": no atoms");
  return AtomicMeasure::from_atoms(width - 1, std::move(coords), std::move(masses));
}

// ---- curves ----

inline Json curve_to_json(const SpectrumCurve& c) {
  Json j;
  j["x_label"] = c.x_label;
  j["y_label"] = c.y_label;
  j["x"] = c.x;
  j["y"] = c.y;
  if (!c.window.empty()) j["window"] = c.window;
  if (!c.aux.empty()) {
    j["aux_label"] = c.aux_label;
    j["aux"] = c.aux;
  }
  if (!c.levels.empty()) {
    j["levels"] = c.levels;
    j["per_level"] = c.per_level;  // NaN serializes as null
  }
  if (!c.fits.empty()) {
    Json fits = Json::array();
    for (const auto& f : c.fits) fits.push_back({{"slope", f.slope}, {"intercept", f.intercept}, {"residual", f.residual}});
    j["fits"] = fits;
  }
  if (!c.notes.empty()) j["notes"] = c.notes;
  return j;
}

/// Columns: x, y, [window], [aux], [level_j ...]; empty cells for missing values.
inline std::string curve_to_csv(const SpectrumCurve& c) {
  std::string out = c.x_label + "," + c.y_label;
  if (!c.window.empty()) out += ",window";
  if (!c.aux.empty()) out += "," + c.aux_label;
  for (int j : c.levels) out += ",level_" + std::to_string(j);
  out += "\n";
  for (std::size_t k = 0; k < c.size(); ++k) {
    out += format_double(c.x[k]) + "," + format_double(c.y[k]);
    if (!c.window.empty()) out += "," + format_double(c.window[k]);
    if (!c.aux.empty()) out += "," + format_double(c.aux[k]);
    if (!c.levels.empty()) {
      for (double v : c.per_level[k]) out += "," + (std::isfinite(v) ? format_double(v) : std::string());
    }
    out += "\n";
  }
  return out;
}

}  // namespace selfsim
