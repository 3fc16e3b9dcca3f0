// Scenario description for batch runs: a base system configuration, one
// sweep axis with its values, and the set of precoding schemes and power
// allocation methods to evaluate at every point. Scenarios are written as
// plain key=value files; the parser reports errors with line numbers.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "isac/channel.hpp"
#include "isac/precoding.hpp"
#include "isac/types.hpp"

namespace isac::experiment {

// Quantity varied across the sweep; everything else stays at the scenario's
// base values.
//   snr            transmit SNR in dB (sets the power budget, sigma_c^2 = 1)
//   crlb_threshold angle-accuracy limit in dB of rad^2, applied to both axes
//   n_t            transmit array size (square panels, value must be a square)
//   pointing_error offset in radians added to both sensing beam angles
enum class SweepAxis { snr, crlb_threshold, n_t, pointing_error };

inline const char* sweep_axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::snr: return "snr";
    case SweepAxis::crlb_threshold: return "crlb_threshold";
    case SweepAxis::n_t: return "n_t";
    default: return "pointing_error";
  }
}

// Power allocation methods a scenario can evaluate.
//   proposed   per-user optimization of (gamma, rho)
//   equal_cs   half the budget to sensing, half spread over the users
//   equal_com  optimized split with all user powers tied to one value
enum class Method { proposed, equal_cs, equal_com };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::proposed: return "Proposed";
    case Method::equal_cs: return "EqualC&S";
    default: return "EqualCom";
  }
}

struct ScenarioConfig {
  std::string id = "scenario";
  SystemConfig system;

  // Base operating point. snr_db fixes the power budget via
  // P_t = sigma_c^2 * 10^(snr_db/10); the accuracy limits are in dB of rad^2.
  double snr_db = 10.0;
  double crlb_theta_db = -35.0;
  double crlb_phi_db = -35.0;

  SweepAxis axis = SweepAxis::snr;
  std::vector<double> sweep{10.0};

  std::vector<Scheme> schemes{Scheme::mrt, Scheme::zf};
  std::vector<Method> methods{Method::proposed, Method::equal_cs,
                              Method::equal_com};

  int large_scale_sets = 10;
  int small_scale_draws = 100;
  // When set, reported rates are Monte-Carlo averages over small_scale_draws
  // channel realizations instead of the closed forms.
  bool monte_carlo = false;

  InitPolicy init_policy = InitPolicy::smallest_p0;
  int sca_max_iters = 30;
  double sca_rel_tol = 1e-4;

  void validate() const {
    system.validate();
    if (id.empty()) throw ConfigError("scenario: id must not be empty");
    if (sweep.empty()) throw ConfigError("scenario: sweep_values is empty");
    for (std::size_t i = 1; i < sweep.size(); ++i)
      if (!(sweep[i] > sweep[i - 1]))
        throw ConfigError("scenario: sweep_values must be strictly increasing");
    if (axis == SweepAxis::n_t) {
      for (double v : sweep) {
        const double r = std::sqrt(v);
        const double ri = std::round(r);
        if (!(v > 0.0) || std::abs(r - ri) > 1e-9 ||
            std::abs(v - ri * ri) > 1e-9)
          throw ConfigError(
              "scenario: n_t sweep values must be perfect squares (square "
              "panels)");
      }
    }
    if (schemes.empty()) throw ConfigError("scenario: schemes is empty");
    if (methods.empty()) throw ConfigError("scenario: methods is empty");
    if (large_scale_sets < 1)
      throw ConfigError("scenario: large_scale_sets must be >= 1");
    if (small_scale_draws < 1)
      throw ConfigError("scenario: small_scale_draws must be >= 1");
    if (sca_max_iters < 1)
      throw ConfigError("scenario: sca_max_iters must be >= 1");
    if (!(sca_rel_tol > 0.0))
      throw ConfigError("scenario: sca_rel_tol must be > 0");
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] inline void parse_fail(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

inline double parse_double(const std::string& v, int line) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    parse_fail(line, "expected a number, got '" + v + "'");
  }
  if (pos != v.size()) parse_fail(line, "trailing characters in number '" + v + "'");
  return x;
}

inline long long parse_int(const std::string& v, int line) {
  std::size_t pos = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &pos);
  } catch (const std::exception&) {
    parse_fail(line, "expected an integer, got '" + v + "'");
  }
  if (pos != v.size())
    parse_fail(line, "trailing characters in integer '" + v + "'");
  return x;
}

inline std::uint64_t parse_u64(const std::string& v, int line) {
  std::size_t pos = 0;
  unsigned long long x = 0;
  try {
    x = std::stoull(v, &pos);
  } catch (const std::exception&) {
    parse_fail(line, "expected an unsigned integer, got '" + v + "'");
  }
  if (pos != v.size())
    parse_fail(line, "trailing characters in integer '" + v + "'");
  return static_cast<std::uint64_t>(x);
}

inline bool parse_bool(const std::string& v, int line) {
  if (v == "1" || v == "true" || v == "on") return true;
  if (v == "0" || v == "false" || v == "off") return false;
  parse_fail(line, "expected a boolean (0/1/true/false), got '" + v + "'");
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(v);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace detail

// Parses one key=value scenario file. '#' starts a comment; blank lines are
// ignored. Unknown or duplicated keys and malformed values raise ConfigError
// with the offending line number. Defaults (no keys at all) describe the
// reference urban macro setup: 8x8/5x5 panels, four users, 1000 m cell with
// a 100 m exclusion radius, path-loss exponent 3.2, 7 dB shadowing, 10 of
// 100 symbols spent on pilots at 30 dB training SNR, and a unit-strength
// normalized echo from a target at 400 m along (pi/8, pi/4).
inline ScenarioConfig parse_scenario(std::istream& in) {
  using detail::parse_fail;
  ScenarioConfig sc;
  // Echo gain of the 400 m reference target: two-way amplitude 1/beta_s with
  // beta_s = (400/100)^3.2 and equal real and imaginary parts.
  const double beta_s = std::pow(4.0, 3.2);
  sc.system.alpha = cplx(1.0 / (beta_s * std::sqrt(2.0)),
                         1.0 / (beta_s * std::sqrt(2.0)));

  std::vector<std::string> seen;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const auto hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = detail::trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) parse_fail(line, "expected key=value");
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string val = detail::trim(s.substr(eq + 1));
    if (key.empty()) parse_fail(line, "empty key");
    if (val.empty()) parse_fail(line, "empty value for key '" + key + "'");
    if (std::find(seen.begin(), seen.end(), key) != seen.end())
      parse_fail(line, "duplicate key '" + key + "'");
    seen.push_back(key);

    if (key == "id") {
      sc.id = val;
    } else if (key == "tx_rows") {
      sc.system.tx.n_h = static_cast<int>(detail::parse_int(val, line));
    } else if (key == "tx_cols") {
      sc.system.tx.n_v = static_cast<int>(detail::parse_int(val, line));
    } else if (key == "rx_rows") {
      sc.system.rx.n_h = static_cast<int>(detail::parse_int(val, line));
    } else if (key == "rx_cols") {
      sc.system.rx.n_v = static_cast<int>(detail::parse_int(val, line));
    } else if (key == "users") {
      sc.system.K = static_cast<int>(detail::parse_int(val, line));
    } else if (key == "frame_length") {
      sc.system.L = static_cast<int>(detail::parse_int(val, line));
    } else if (key == "coherence_symbols") {
      sc.system.tau_c = static_cast<int>(detail::parse_int(val, line));
    } else if (key == "pilot_symbols") {
      sc.system.tau_p = static_cast<int>(detail::parse_int(val, line));
    } else if (key == "pilot_power") {
      sc.system.p_p = detail::parse_double(val, line);
    } else if (key == "sigma_c2") {
      sc.system.sigma_c2 = detail::parse_double(val, line);
    } else if (key == "sigma_s2") {
      sc.system.sigma_s2 = detail::parse_double(val, line);
    } else if (key == "snr_db") {
      sc.snr_db = detail::parse_double(val, line);
    } else if (key == "alpha_re") {
      sc.system.alpha = cplx(detail::parse_double(val, line),
                             sc.system.alpha.imag());
    } else if (key == "alpha_im") {
      sc.system.alpha = cplx(sc.system.alpha.real(),
                             detail::parse_double(val, line));
    } else if (key == "target_theta_rad") {
      sc.system.target.theta = detail::parse_double(val, line);
    } else if (key == "target_phi_rad") {
      sc.system.target.phi = detail::parse_double(val, line);
    } else if (key == "cell_radius_m") {
      sc.system.cell_radius_m = detail::parse_double(val, line);
    } else if (key == "min_distance_m") {
      sc.system.r_h_m = detail::parse_double(val, line);
    } else if (key == "path_loss_exponent") {
      sc.system.nu = detail::parse_double(val, line);
    } else if (key == "shadow_sigma_db") {
      sc.system.sigma_shadow_db = detail::parse_double(val, line);
    } else if (key == "crlb_theta_db") {
      sc.crlb_theta_db = detail::parse_double(val, line);
    } else if (key == "crlb_phi_db") {
      sc.crlb_phi_db = detail::parse_double(val, line);
    } else if (key == "sweep_axis") {
      if (val == "snr") sc.axis = SweepAxis::snr;
      else if (val == "crlb_threshold") sc.axis = SweepAxis::crlb_threshold;
      else if (val == "n_t") sc.axis = SweepAxis::n_t;
      else if (val == "pointing_error") sc.axis = SweepAxis::pointing_error;
      else parse_fail(line, "unknown sweep_axis '" + val + "'");
    } else if (key == "sweep_values") {
      sc.sweep.clear();
      for (const auto& item : detail::split_list(val))
        sc.sweep.push_back(detail::parse_double(item, line));
      if (sc.sweep.empty()) parse_fail(line, "sweep_values is empty");
    } else if (key == "schemes") {
      sc.schemes.clear();
      for (const auto& item : detail::split_list(val)) {
        if (item == "mrt") sc.schemes.push_back(Scheme::mrt);
        else if (item == "zf") sc.schemes.push_back(Scheme::zf);
        else parse_fail(line, "unknown scheme '" + item + "'");
      }
      if (sc.schemes.empty()) parse_fail(line, "schemes is empty");
    } else if (key == "methods") {
      sc.methods.clear();
      for (const auto& item : detail::split_list(val)) {
        if (item == "proposed") sc.methods.push_back(Method::proposed);
        else if (item == "equal_cs") sc.methods.push_back(Method::equal_cs);
        else if (item == "equal_com") sc.methods.push_back(Method::equal_com);
        else parse_fail(line, "unknown method '" + item + "'");
      }
      if (sc.methods.empty()) parse_fail(line, "methods is empty");
    } else if (key == "large_scale_sets") {
      sc.large_scale_sets = static_cast<int>(detail::parse_int(val, line));
    } else if (key == "small_scale_draws") {
      sc.small_scale_draws = static_cast<int>(detail::parse_int(val, line));
    } else if (key == "monte_carlo") {
      sc.monte_carlo = detail::parse_bool(val, line);
    } else if (key == "init_policy") {
      if (val == "half_power") sc.init_policy = InitPolicy::half_power;
      else if (val == "smallest_p0") sc.init_policy = InitPolicy::smallest_p0;
      else parse_fail(line, "unknown init_policy '" + val + "'");
    } else if (key == "sca_max_iters") {
      sc.sca_max_iters = static_cast<int>(detail::parse_int(val, line));
    } else if (key == "sca_rel_tol") {
      sc.sca_rel_tol = detail::parse_double(val, line);
    } else if (key == "seed") {
      sc.system.seed = detail::parse_u64(val, line);
    } else {
      parse_fail(line, "unknown key '" + key + "'");
    }
  }

  // The budget follows the base SNR; sweep points on the snr axis override
  // it per point at run time.
  sc.system.P_t = sc.system.sigma_c2 * db_to_linear(sc.snr_db);
  sc.validate();
  return sc;
}

inline ScenarioConfig parse_scenario_text(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

}  // namespace isac::experiment
