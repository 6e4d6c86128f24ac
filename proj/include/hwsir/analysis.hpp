#ifndef HWSIR_ANALYSIS_HPP
#define HWSIR_ANALYSIS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "hwsir/stats.hpp"
#include "hwsir/stochastic_engine.hpp"

namespace hwsir {

struct EmptySelection : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InsufficientSamples : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Piecewise-linear time series; the interpolation convention everywhere in
// the comparison machinery.
struct TimeSeries {
  std::vector<double> t, v;

  double begin_time() const { return t.front(); }
  double end_time() const { return t.back(); }

  double interp(double tq) const {
    if (t.empty()) throw std::invalid_argument("TimeSeries: empty");
    if (tq <= t.front()) return v.front();
    if (tq >= t.back()) return v.back();
    auto it = std::upper_bound(t.begin(), t.end(), tq);
    std::size_t j = static_cast<std::size_t>(it - t.begin());
    double w = (tq - t[j - 1]) / (t[j] - t[j - 1]);
    return v[j - 1] + w * (v[j] - v[j - 1]);
  }

  void shift(double dt) {
    for (auto& x : t) x += dt;
  }
};

inline TimeSeries infected_series(const Trajectory& traj) {
  TimeSeries s;
  for (std::size_t j = 0; j < traj.points.size(); ++j) {
    s.t.push_back(traj.points[j].t);
    s.v.push_back(traj.infected_fraction(j));
  }
  return s;
}

inline TimeSeries susceptible_series(const Trajectory& traj) {
  TimeSeries s;
  for (std::size_t j = 0; j < traj.points.size(); ++j) {
    s.t.push_back(traj.points[j].t);
    s.v.push_back(traj.susceptible_fraction(j));
  }
  return s;
}

// First up-crossing time of `level`, linearly interpolated; nullopt if the
// series never reaches it.
inline std::optional<double> first_upcrossing(const TimeSeries& s, double level) {
  if (s.v.front() >= level) return s.t.front();
  for (std::size_t j = 1; j < s.v.size(); ++j) {
    if (s.v[j] >= level) {
      double w = (level - s.v[j - 1]) / (s.v[j] - s.v[j - 1]);
      return s.t[j - 1] + w * (s.t[j] - s.t[j - 1]);
    }
  }
  return std::nullopt;
}

// Discards series never reaching `level`; shifts retained ones so the first
// up-crossing sits at t = 0.
inline std::vector<TimeSeries> align_by_threshold(const std::vector<TimeSeries>& series,
                                                  double level) {
  std::vector<TimeSeries> out;
  for (const auto& s : series) {
    auto tc = first_upcrossing(s, level);
    if (!tc) continue;
    TimeSeries shifted = s;
    shifted.shift(-*tc);
    out.push_back(std::move(shifted));
  }
  if (out.empty())
    throw EmptySelection("align_by_threshold: no trajectory reaches the level");
  return out;
}

struct EnsembleMean {
  TimeSeries mean;
  std::vector<double> stderr_;
};

inline EnsembleMean ensemble_mean(const std::vector<TimeSeries>& series,
                                  const std::vector<double>& grid) {
  if (series.size() < 2)
    throw std::invalid_argument("ensemble_mean: need >= 2 trajectories");
  EnsembleMean out;
  out.mean.t = grid;
  out.mean.v.resize(grid.size());
  out.stderr_.resize(grid.size());
  double n = static_cast<double>(series.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double sum = 0.0, sum2 = 0.0;
    for (const auto& s : series) {
      double v = s.interp(grid[g]);
      sum += v;
      sum2 += v * v;
    }
    double mean = sum / n;
    double var = std::max(0.0, sum2 / n - mean * mean);
    out.mean.v[g] = mean;
    out.stderr_[g] = std::sqrt(var / n);
  }
  return out;
}

// Final cumulative per-layer infection counts normalized to sum one:
// (p_G, p_H, p_W), or all zeros when no infection occurred.
inline std::array<double, 3> layer_proportions(const Trajectory& traj) {
  const auto& last = traj.points.back();
  double total = static_cast<double>(last.cum_global + last.cum_household +
                                     last.cum_workplace);
  if (total == 0.0) return {0.0, 0.0, 0.0};
  return {last.cum_global / total, last.cum_household / total,
          last.cum_workplace / total};
}

// Sup of |a - b| over the overlap of the two time ranges, evaluated on both
// series' sample points plus a uniform refinement.
inline double sup_distance(const TimeSeries& a, const TimeSeries& b) {
  double lo = std::max(a.begin_time(), b.begin_time());
  double hi = std::min(a.end_time(), b.end_time());
  if (hi < lo) throw std::invalid_argument("sup_distance: no overlapping time range");
  std::vector<double> grid;
  for (double t : a.t)
    if (t >= lo && t <= hi) grid.push_back(t);
  for (double t : b.t)
    if (t >= lo && t <= hi) grid.push_back(t);
  const int uniform = 512;
  for (int j = 0; j <= uniform; ++j) grid.push_back(lo + (hi - lo) * j / uniform);
  double d = 0.0;
  for (double t : grid) d = std::max(d, std::abs(a.interp(t) - b.interp(t)));
  return d;
}

inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  std::size_t workers = std::min<std::size_t>(hw, n);
  if (workers <= 1) {
    for (std::size_t j = 0; j < n; ++j) fn(j);
    return;
  }
  std::vector<std::thread> threads;
  std::exception_ptr err;
  std::mutex err_mu;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t j = w; j < n; j += workers) fn(j);
      } catch (...) {
        std::scoped_lock lk(err_mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  if (err) std::rethrow_exception(err);
}

struct InferredInitialCondition {
  StructureTypeCounts average;  // entrywise replicate average
  std::size_t retained = 0;
  std::size_t replicates = 0;
};

// Ensemble-based initial condition: single-seed epidemics run until the
// infected fraction first reaches stop_level; extinct replicates (I hits 0
// first) are discarded and the structure-type snapshots averaged.
inline InferredInitialCondition infer_initial_condition(
    const PopulationGraph& graph, const EpidemicParams& params, double stop_level,
    std::size_t replicates, std::uint64_t seed) {
  std::vector<std::optional<StructureTypeCounts>> snaps(replicates);
  parallel_for(replicates, [&](std::size_t rep) {
    RandomStream rng = derive_stream(seed, rep);
    SimulationState state = init_single_seed(graph, params, rng);
    SimulateOptions opts;
    opts.stop_infected_fraction = stop_level;
    simulate(state, params, std::numeric_limits<double>::infinity(), rng, opts);
    if (static_cast<double>(state.I_total()) >=
        stop_level * static_cast<double>(graph.K()))
      snaps[rep] = state.structure_type_counts();
  });
  InferredInitialCondition out;
  out.replicates = replicates;
  for (auto& s : snaps) {
    if (!s) continue;
    ++out.retained;
    out.average.K = s->K;
    out.average.K_H = s->K_H;
    out.average.K_W = s->K_W;
    out.average.S_total += s->S_total;
    out.average.I_total += s->I_total;
    for (const auto& [pair, count] : s->households)
      out.average.households[pair] += count;
    for (const auto& [pair, count] : s->workplaces)
      out.average.workplaces[pair] += count;
  }
  if (out.retained == 0)
    throw EmptySelection("infer_initial_condition: all replicates extinct");
  double n = static_cast<double>(out.retained);
  out.average.S_total /= n;
  out.average.I_total /= n;
  for (auto& [pair, count] : out.average.households) count /= n;
  for (auto& [pair, count] : out.average.workplaces) count /= n;
  return out;
}

// One-sample KS test of pooled remaining infectious periods against
// Exponential(gamma).
inline KsResult memorylessness_test(const std::vector<double>& remaining_periods,
                                    double gamma) {
  if (remaining_periods.size() < 500)
    throw InsufficientSamples("memorylessness_test: need >= 500 pooled samples");
  return ks_test_exponential(remaining_periods, gamma);
}

// Remaining infectious periods of the currently infected at the state clock.
inline std::vector<double> remaining_periods(const SimulationState& state) {
  std::vector<double> out;
  out.reserve(state.infected().size());
  for (int ind : state.infected())
    out.push_back(state.recovery_time(ind) - state.time());
  return out;
}

}  // namespace hwsir

#endif
