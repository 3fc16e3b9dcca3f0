// Batch evaluation of a scenario: one result row per (large-scale set x
// sweep point x scheme x method), plus aggregate rows averaged over the
// sets. Jobs run on a small worker pool and write into pre-assigned slots,
// so the output order never depends on scheduling.
#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "isac/channel.hpp"
#include "isac/comm_rate.hpp"
#include "isac/experiment/config.hpp"
#include "isac/power_alloc.hpp"
#include "isac/precoding.hpp"
#include "isac/sensing.hpp"
#include "isac/types.hpp"

namespace isac::experiment {

// One evaluated operating point. `set` is the zero-based large-scale draw
// index, or -1 for the aggregate over sets (written as "mean" in reports).
// Angle accuracies are in dB of rad^2; powers are the totals spent on the
// user streams and on the sensing beam; `iterations` counts optimization
// rounds (0 for closed-form methods) and is a double so aggregate means stay
// exact. Rows whose accuracy limits admit no allocation (or whose
// information matrix is singular at the requested beam offset) carry
// status="infeasible" and quiet NaNs in every derived field.
struct ResultRow {
  std::string scenario;
  std::string scheme;
  std::string method;
  int set = 0;
  double sweep_value = 0.0;
  double sum_rate = 0.0;
  std::vector<double> per_user_rates;
  double crlb_theta_db = 0.0;
  double crlb_phi_db = 0.0;
  double comm_power = 0.0;
  double sensing_power = 0.0;
  double iterations = 0.0;
  double wall_time_s = 0.0;
  std::string status = "ok";
};

struct ScenarioResult {
  std::vector<ResultRow> rows;
  int feasible = 0;
  int infeasible = 0;
};

namespace detail {

// System configuration and accuracy limits at one sweep point.
struct OperatingPoint {
  SystemConfig cfg;
  CrlbLimits limits;      // rad^2
  Angles beam;            // sensing beam steering angles
  bool beam_offset = false;  // true when the beam leaves the target
};

inline OperatingPoint apply_sweep(const ScenarioConfig& sc, double value) {
  OperatingPoint op;
  op.cfg = sc.system;
  op.limits.theta = db_to_linear(sc.crlb_theta_db);
  op.limits.phi = db_to_linear(sc.crlb_phi_db);
  op.beam = op.cfg.target;
  switch (sc.axis) {
    case SweepAxis::snr:
      op.cfg.P_t = op.cfg.sigma_c2 * db_to_linear(value);
      break;
    case SweepAxis::crlb_threshold:
      op.limits.theta = db_to_linear(value);
      op.limits.phi = db_to_linear(value);
      break;
    case SweepAxis::n_t: {
      const int side = static_cast<int>(std::llround(std::sqrt(value)));
      op.cfg.tx.n_h = side;
      op.cfg.tx.n_v = side;
      break;
    }
    case SweepAxis::pointing_error:
      op.beam.theta += value;
      op.beam.phi += value;
      op.beam_offset = (value != 0.0);
      break;
  }
  return op;
}

inline double nan_value() {
  return std::numeric_limits<double>::quiet_NaN();
}

inline void mark_infeasible(ResultRow& row, int K) {
  row.status = "infeasible";
  row.sum_rate = nan_value();
  row.per_user_rates.assign(static_cast<std::size_t>(K), nan_value());
  row.crlb_theta_db = nan_value();
  row.crlb_phi_db = nan_value();
  row.comm_power = nan_value();
  row.sensing_power = nan_value();
  row.iterations = 0.0;
}

// Evaluates one (set, sweep, scheme, method) cell. Infeasibility is reported
// in the row; genuine numerical failures propagate to the caller.
inline ResultRow evaluate_cell(const ScenarioConfig& sc,
                               const OperatingPoint& op,
                               const LargeScaleSet& ls, int set_index,
                               std::size_t sweep_index, double sweep_value,
                               Scheme scheme, Method method) {
  const auto t0 = std::chrono::steady_clock::now();
  ResultRow row;
  row.scenario = sc.id;
  row.scheme = scheme_name(scheme);
  row.method = method_name(method);
  row.set = set_index;
  row.sweep_value = sweep_value;

  ScaConfig sca;
  sca.max_iters = sc.sca_max_iters;
  sca.rel_obj_tol = sc.sca_rel_tol;
  sca.crlb_theta_max = op.limits.theta;
  sca.crlb_phi_max = op.limits.phi;
  sca.init_policy = sc.init_policy;

  try {
    PowerAllocation alloc;
    switch (method) {
      case Method::proposed: {
        const ScaTrace trace = run_sca(ls, scheme, op.cfg, sca);
        alloc = trace.final_alloc;
        row.iterations = static_cast<double>(trace.iterations.size());
        break;
      }
      case Method::equal_cs:
        alloc = equal_power_allocation(ls, scheme, op.cfg);
        row.iterations = 0.0;
        break;
      case Method::equal_com: {
        const ScaTrace trace = run_sca_tied(ls, scheme, op.cfg, sca);
        alloc = trace.final_alloc;
        row.iterations = static_cast<double>(trace.iterations.size());
        break;
      }
    }

    const RateReport rate =
        sc.monte_carlo
            ? monte_carlo_rate(ls, scheme, alloc, op.cfg, sc.small_scale_draws,
                               static_cast<std::uint64_t>(set_index) *
                                       1000003ull +
                                   static_cast<std::uint64_t>(sweep_index))
                  .report
            : closed_form_rate(ls, scheme, alloc, op.cfg);
    row.sum_rate = rate.sum_rate;
    row.per_user_rates.assign(rate.per_user_rate.data(),
                              rate.per_user_rate.data() +
                                  rate.per_user_rate.size());

    const CrlbPair crlb =
        op.beam_offset
            ? crlb_general(
                  fisher_blocks_general(ls, scheme, alloc, op.cfg, op.beam))
            : crlb_simplified(ls, scheme, alloc, op.cfg);
    row.crlb_theta_db = linear_to_db(crlb.theta);
    row.crlb_phi_db = linear_to_db(crlb.phi);

    const Vec xi = xi_bf(ls, scheme, op.cfg.n_t());
    row.comm_power = op.cfg.n_t() * xi.dot(alloc.gamma);
    row.sensing_power = op.cfg.n_t() * alloc.rho;
  } catch (const InfeasibleError&) {
    mark_infeasible(row, op.cfg.K);
  } catch (const SingularFimError&) {
    mark_infeasible(row, op.cfg.K);
  }

  row.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return row;
}

}  // namespace detail

// Runs every cell of the scenario. Large-scale parameters are drawn once per
// set from a counter-based stream keyed by (master seed, set index) and held
// fixed across the sweep. Rows are ordered by sweep point, then scheme, then
// method (both in config order), then set, with the aggregate-over-sets row
// (set = -1, mean of the feasible rows) closing each group. `threads` <= 1
// runs inline.
inline ScenarioResult run_scenario(const ScenarioConfig& sc, int threads = 1) {
  sc.validate();
  const int n_sets = sc.large_scale_sets;
  const std::size_t n_sweep = sc.sweep.size();
  const std::size_t n_schemes = sc.schemes.size();
  const std::size_t n_methods = sc.methods.size();
  const std::size_t group = n_schemes * n_methods;
  const std::size_t per_set_rows = n_sweep * group;

  // Large-scale draws are independent of the sweep axis (user positions and
  // shadowing only), so one draw per set serves every sweep point.
  std::vector<LargeScaleSet> sets;
  sets.reserve(static_cast<std::size_t>(n_sets));
  for (int s = 0; s < n_sets; ++s) {
    StreamRng rng = make_stream(sc.system.seed, RngPurpose::large_scale,
                                static_cast<std::uint64_t>(s));
    sets.push_back(draw_large_scale(sc.system, rng));
  }

  std::vector<detail::OperatingPoint> points;
  points.reserve(n_sweep);
  for (double v : sc.sweep) points.push_back(detail::apply_sweep(sc, v));
  for (const auto& op : points) op.cfg.validate();

  // Worker cells: one per (set, sweep, scheme, method), written to a
  // pre-assigned slot so assembly is deterministic.
  std::vector<ResultRow> cells(static_cast<std::size_t>(n_sets) *
                               per_set_rows);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= cells.size() || failed.load()) return;
      const std::size_t s = job / per_set_rows;
      const std::size_t r = job % per_set_rows;
      const std::size_t i = r / group;
      const std::size_t c = r % group;
      const std::size_t sch = c / n_methods;
      const std::size_t m = c % n_methods;
      try {
        cells[job] = detail::evaluate_cell(
            sc, points[i], sets[s], static_cast<int>(s), i, sc.sweep[i],
            sc.schemes[sch], sc.methods[m]);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failed.exchange(true)) failure = e.what();
        return;
      }
    }
  };

  const int hw = std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  int n_threads = std::max(1, std::min(threads, hw));
  n_threads = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(n_threads), cells.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) throw NumericalError("run_scenario: " + failure);

  // Assemble: per (sweep, scheme, method) group, the per-set rows followed
  // by their mean over the feasible sets.
  ScenarioResult out;
  out.rows.reserve(cells.size() + n_sweep * group);
  for (std::size_t i = 0; i < n_sweep; ++i) {
    for (std::size_t c = 0; c < group; ++c) {
      ResultRow agg;
      agg.scenario = sc.id;
      agg.set = -1;
      agg.sweep_value = sc.sweep[i];
      int feasible = 0;
      for (int s = 0; s < n_sets; ++s) {
        const std::size_t job = static_cast<std::size_t>(s) * per_set_rows +
                                i * group + c;
        const ResultRow& row = cells[job];
        out.rows.push_back(row);
        if (row.status == "ok") {
          ++out.feasible;
          ++feasible;
          if (feasible == 1) {
            agg = row;
            agg.set = -1;
          } else {
            agg.sum_rate += row.sum_rate;
            for (std::size_t k = 0; k < agg.per_user_rates.size(); ++k)
              agg.per_user_rates[k] += row.per_user_rates[k];
            agg.crlb_theta_db += row.crlb_theta_db;
            agg.crlb_phi_db += row.crlb_phi_db;
            agg.comm_power += row.comm_power;
            agg.sensing_power += row.sensing_power;
            agg.iterations += row.iterations;
            agg.wall_time_s += row.wall_time_s;
          }
        } else {
          ++out.infeasible;
          if (feasible == 0) {
            agg.scheme = row.scheme;
            agg.method = row.method;
          }
        }
      }
      if (feasible > 0) {
        const double n = static_cast<double>(feasible);
        agg.sum_rate /= n;
        for (double& r : agg.per_user_rates) r /= n;
        agg.crlb_theta_db /= n;
        agg.crlb_phi_db /= n;
        agg.comm_power /= n;
        agg.sensing_power /= n;
        agg.iterations /= n;
        agg.wall_time_s /= n;
        agg.status = "ok";
      } else {
        detail::mark_infeasible(agg, sc.system.K);
      }
      out.rows.push_back(agg);
    }
  }
  return out;
}

}  // namespace isac::experiment
