#ifndef HWSIR_IO_HPP
#define HWSIR_IO_HPP

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "hwsir/analysis.hpp"
#include "hwsir/integrator.hpp"
#include "hwsir/reduced_model.hpp"
#include "hwsir/stochastic_engine.hpp"

namespace hwsir {

// Shortest round-trippable decimal representation.
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,S,I,R,cumG,cumH,cumW\n";
  for (const auto& p : traj.points)
    os << format_double(p.t) << ',' << p.S << ',' << p.I << ',' << p.R << ','
       << p.cum_global << ',' << p.cum_household << ',' << p.cum_workplace << '\n';
}

inline Trajectory read_trajectory_csv(std::istream& is, std::int64_t K) {
  Trajectory traj;
  traj.K = K;
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    TrajectoryPoint p{};
    if (std::sscanf(line.c_str(),
                    "%lf,%lld,%lld,%lld,%lld,%lld,%lld", &p.t,
                    reinterpret_cast<long long*>(&p.S),
                    reinterpret_cast<long long*>(&p.I),
                    reinterpret_cast<long long*>(&p.R),
                    reinterpret_cast<long long*>(&p.cum_global),
                    reinterpret_cast<long long*>(&p.cum_household),
                    reinterpret_cast<long long*>(&p.cum_workplace)) == 7)
      traj.points.push_back(p);
  }
  return traj;
}

// Event log as JSON lines.
inline void write_event_log(std::ostream& os, const std::vector<Event>& events) {
  for (const auto& e : events) {
    const char* kind = e.kind == EventKind::Infection ? "infection" : "recovery";
    const char* layer = "none";
    switch (e.layer) {
      case Channel::Global: layer = "G"; break;
      case Channel::Household: layer = "H"; break;
      case Channel::Workplace: layer = "W"; break;
      case Channel::None: layer = "none"; break;
    }
    os << "{\"t\": " << format_double(e.t) << ", \"kind\": \"" << kind
       << "\", \"layer\": \"" << layer << "\", \"individual\": " << e.individual
       << ", \"household\": " << e.household << ", \"workplace\": " << e.workplace
       << "}\n";
  }
}

// Reduced/EBCM solution sampled on a grid: t,s,i,r columns, optionally the
// full state with nH_S_I / nW_S_I headers.
inline void write_reduced_solution_csv(std::ostream& os, const ReducedModel& model,
                                       const DenseSolution& sol,
                                       const std::vector<double>& grid,
                                       bool full_state = false) {
  os << "t,s,i,r";
  if (full_state) {
    for (Layer l : {Layer::Household, Layer::Workplace}) {
      const StateIndexer& idx = model.indexer(l);
      const char* tag = l == Layer::Household ? "nH" : "nW";
      for (std::size_t j = 0; j < idx.size(); ++j) {
        auto [S, I] = idx.pair(j);
        os << ',' << tag << '_' << S << '_' << I;
      }
    }
  }
  os << '\n';
  for (double t : grid) {
    std::vector<double> y = sol.eval(t);
    os << format_double(t) << ',' << format_double(model.s(y)) << ','
       << format_double(model.i(y)) << ',' << format_double(model.r(y));
    if (full_state) {
      for (Layer l : {Layer::Household, Layer::Workplace}) {
        std::size_t off = model.block_offset(l);
        for (std::size_t j = 0; j < model.indexer(l).size(); ++j)
          os << ',' << format_double(y[off + j]);
      }
    }
    os << '\n';
  }
}

inline void write_series_csv(std::ostream& os, const std::string& value_name,
                             const TimeSeries& s) {
  os << "t," << value_name << '\n';
  for (std::size_t j = 0; j < s.t.size(); ++j)
    os << format_double(s.t[j]) << ',' << format_double(s.v[j]) << '\n';
}

// Structure-type histogram rows: t,layer,S,I,count.
inline void write_histogram_csv(std::ostream& os, double t,
                                const StructureTypeCounts& c) {
  os << "t,layer,S,I,count\n";
  for (const auto& [pair, count] : c.households)
    os << format_double(t) << ",H," << pair.first << ',' << pair.second << ','
       << format_double(count) << '\n';
  for (const auto& [pair, count] : c.workplaces)
    os << format_double(t) << ",W," << pair.first << ',' << pair.second << ','
       << format_double(count) << '\n';
}

}  // namespace hwsir

#endif
