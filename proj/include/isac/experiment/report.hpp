// Result serialization. CSV uses a fixed column order with per-user rates
// semicolon-joined in one cell; JSON is an array of objects mirroring the
// row field names. Floating-point values are written with 12 significant
// digits, which round-trips byte-stably: the decimal grid at 12 digits is
// thousands of times coarser than the binary one, so re-reading and
// re-writing a value reproduces the same text.
#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "isac/experiment/scenario.hpp"
#include "isac/types.hpp"

namespace isac::experiment {

inline const char* csv_header() {
  return "scenario,scheme,method,set,sweep_value,sum_rate,per_user_rates,"
         "crlb_theta_db,crlb_phi_db,comm_power,sensing_power,iterations,"
         "wall_time_s,status";
}

namespace detail {

inline std::string format_value(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

// NaN has no JSON literal; infeasible-row numerics are emitted as null.
inline std::string json_number(double x) {
  return std::isnan(x) ? std::string("null") : format_value(x);
}

}  // namespace detail

inline std::string render_csv(const std::vector<ResultRow>& rows) {
  std::string out = csv_header();
  out += '\n';
  for (const auto& r : rows) {
    out += detail::csv_escape(r.scenario);
    out += ',';
    out += detail::csv_escape(r.scheme);
    out += ',';
    out += detail::csv_escape(r.method);
    out += ',';
    out += (r.set < 0) ? std::string("mean") : std::to_string(r.set);
    out += ',';
    out += detail::format_value(r.sweep_value);
    out += ',';
    out += detail::format_value(r.sum_rate);
    out += ',';
    std::string joined;
    for (std::size_t k = 0; k < r.per_user_rates.size(); ++k) {
      if (k) joined += ';';
      joined += detail::format_value(r.per_user_rates[k]);
    }
    out += detail::csv_escape(joined);
    out += ',';
    out += detail::format_value(r.crlb_theta_db);
    out += ',';
    out += detail::format_value(r.crlb_phi_db);
    out += ',';
    out += detail::format_value(r.comm_power);
    out += ',';
    out += detail::format_value(r.sensing_power);
    out += ',';
    out += detail::format_value(r.iterations);
    out += ',';
    out += detail::format_value(r.wall_time_s);
    out += ',';
    out += detail::csv_escape(r.status);
    out += '\n';
  }
  return out;
}

inline std::string render_json(const std::vector<ResultRow>& rows) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out += "  {";
    out += "\"scenario\":\"" + detail::json_escape(r.scenario) + "\",";
    out += "\"scheme\":\"" + detail::json_escape(r.scheme) + "\",";
    out += "\"method\":\"" + detail::json_escape(r.method) + "\",";
    out += "\"set\":" + std::to_string(r.set) + ",";
    out += "\"sweep_value\":" + detail::json_number(r.sweep_value) + ",";
    out += "\"sum_rate\":" + detail::json_number(r.sum_rate) + ",";
    out += "\"per_user_rates\":[";
    for (std::size_t k = 0; k < r.per_user_rates.size(); ++k) {
      if (k) out += ',';
      out += detail::json_number(r.per_user_rates[k]);
    }
    out += "],";
    out += "\"crlb_theta_db\":" + detail::json_number(r.crlb_theta_db) + ",";
    out += "\"crlb_phi_db\":" + detail::json_number(r.crlb_phi_db) + ",";
    out += "\"comm_power\":" + detail::json_number(r.comm_power) + ",";
    out += "\"sensing_power\":" + detail::json_number(r.sensing_power) + ",";
    out += "\"iterations\":" + detail::json_number(r.iterations) + ",";
    out += "\"wall_time_s\":" + detail::json_number(r.wall_time_s) + ",";
    out += "\"status\":\"" + detail::json_escape(r.status) + "\"";
    out += (i + 1 < rows.size()) ? "},\n" : "}\n";
  }
  out += "]\n";
  return out;
}

// Reads rows back from render_json output (or any JSON array with the same
// field names). null numerics map back to quiet NaN.
inline std::vector<ResultRow> parse_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("result JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ConfigError("result JSON: expected an array");
  auto num = [](const nlohmann::json& v, const char* field) -> double {
    if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (!v.is_number())
      throw ConfigError(std::string("result JSON: field '") + field +
                        "' is not a number");
    return v.get<double>();
  };
  std::vector<ResultRow> rows;
  rows.reserve(doc.size());
  for (const auto& o : doc) {
    if (!o.is_object()) throw ConfigError("result JSON: expected row objects");
    ResultRow r;
    r.scenario = o.at("scenario").get<std::string>();
    r.scheme = o.at("scheme").get<std::string>();
    r.method = o.at("method").get<std::string>();
    r.set = o.at("set").get<int>();
    r.sweep_value = num(o.at("sweep_value"), "sweep_value");
    r.sum_rate = num(o.at("sum_rate"), "sum_rate");
    for (const auto& v : o.at("per_user_rates"))
      r.per_user_rates.push_back(num(v, "per_user_rates"));
    r.crlb_theta_db = num(o.at("crlb_theta_db"), "crlb_theta_db");
    r.crlb_phi_db = num(o.at("crlb_phi_db"), "crlb_phi_db");
    r.comm_power = num(o.at("comm_power"), "comm_power");
    r.sensing_power = num(o.at("sensing_power"), "sensing_power");
    r.iterations = num(o.at("iterations"), "iterations");
    r.wall_time_s = num(o.at("wall_time_s"), "wall_time_s");
    r.status = o.at("status").get<std::string>();
    rows.push_back(std::move(r));
  }
  return rows;
}

// Writes `content` to dir/filename, creating the directory if needed.
inline std::filesystem::path write_text_file(
    const std::filesystem::path& dir, const std::string& filename,
    const std::string& content) {
  std::error_code ec;
  if (!dir.empty()) std::filesystem::create_directories(dir, ec);
  const std::filesystem::path path =
      dir.empty() ? std::filesystem::path(filename) : dir / filename;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path.string());
  out << content;
  out.flush();
  if (!out) throw ConfigError("write failed: " + path.string());
  return path;
}

}  // namespace isac::experiment
