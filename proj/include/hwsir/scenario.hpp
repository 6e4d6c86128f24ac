#ifndef HWSIR_SCENARIO_HPP
#define HWSIR_SCENARIO_HPP

#include <cctype>
#include <cmath>
#include <cstdint>
#include <vector>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "hwsir/infectious_period.hpp"
#include "hwsir/reduced_model.hpp"
#include "hwsir/size_dist.hpp"

namespace hwsir {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One experiment description: population, rates, seeding, horizon.
struct Scenario {
  std::string name;
  int K = 10000;
  SizeDistribution pi_h;
  SizeDistribution pi_w;
  double beta_G = 0.0;
  double lambda_H = 0.0;
  double lambda_W = 0.0;
  double gamma = 0.125;
  InfectiousPeriodLaw nu = InfectiousPeriodLaw::exponential(0.125);
  double epsilon = 0.01;
  bool single_seed = false;
  std::optional<double> horizon;  // nullopt = auto (post-peak threshold time)
  int replicates = 50;
  std::uint64_t seed = 1;

  EpidemicParams epidemic_params() const {
    return EpidemicParams{beta_G, lambda_H, lambda_W, nu};
  }
  ReducedParams reduced_params() const {
    return ReducedParams{beta_G, lambda_H, lambda_W, gamma, pi_h, pi_w};
  }
};

// Documented synthetic stand-ins for the (untabulated) census-based size
// distributions: small households, geometric-like workplaces on 1..50.
inline SizeDistribution default_household_dist() {
  return SizeDistribution({{1, 0.3}, {2, 0.3}, {3, 0.2}, {4, 0.15}, {5, 0.05}});
}

inline SizeDistribution default_workplace_dist(int n_max = 50, double decay = 0.88) {
  std::map<int, double> probs;
  double norm = 0.0;
  for (int n = 1; n <= n_max; ++n) norm += std::pow(decay, n - 1);
  for (int n = 1; n <= n_max; ++n) probs[n] = std::pow(decay, n - 1) / norm;
  return SizeDistribution(probs);
}

namespace detail {
inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}
}  // namespace detail

// Flat key = value format with [piH] / [piW] tables of `size: probability`
// lines. '#' starts a comment.
inline Scenario parse_scenario(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::map<int, double> pi_h, pi_w;
  std::map<int, double>* table = nullptr;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line == "[piH]") table = &pi_h;
      else if (line == "[piW]") table = &pi_w;
      else
        throw ConfigError("line " + std::to_string(lineno) + ": unknown table " + line);
      continue;
    }
    if (table) {
      auto colon = line.find(':');
      if (colon != std::string::npos) {
        try {
          int size = std::stoi(detail::trim(line.substr(0, colon)));
          double p = std::stod(detail::trim(line.substr(colon + 1)));
          (*table)[size] = p;
          continue;
        } catch (const std::exception&) {
          throw ConfigError("line " + std::to_string(lineno) +
                            ": malformed size: probability entry");
        }
      }
      table = nullptr;  // fall through to key = value
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    kv[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
  }

  auto get = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  auto get_double = [&](const std::string& key, double fallback) {
    auto v = get(key);
    if (!v) return fallback;
    try {
      return std::stod(*v);
    } catch (const std::exception&) {
      throw ConfigError("key " + key + ": not a number: " + *v);
    }
  };

  Scenario sc{.pi_h = pi_h.empty() ? default_household_dist() : SizeDistribution(pi_h),
              .pi_w = pi_w.empty() ? default_workplace_dist() : SizeDistribution(pi_w)};
  if (auto v = get("name")) sc.name = *v;
  sc.K = static_cast<int>(get_double("K", sc.K));
  if (sc.K < 1) throw ConfigError("K must be >= 1");
  sc.beta_G = get_double("beta_G", sc.beta_G);
  sc.lambda_H = get_double("lambda_H", sc.lambda_H);
  sc.lambda_W = get_double("lambda_W", sc.lambda_W);
  sc.gamma = get_double("gamma", sc.gamma);
  sc.epsilon = get_double("epsilon", sc.epsilon);
  if (auto v = get("single_seed")) sc.single_seed = (*v == "true" || *v == "1");
  sc.replicates = static_cast<int>(get_double("replicates", sc.replicates));
  sc.seed = static_cast<std::uint64_t>(get_double("seed", static_cast<double>(sc.seed)));
  if (auto v = get("T")) {
    if (*v == "auto")
      sc.horizon = std::nullopt;
    else
      sc.horizon = get_double("T", 0.0);
  } else {
    sc.horizon = std::nullopt;
  }

  std::string nu_kind = get("nu").value_or("exponential");
  if (nu_kind == "exponential") {
    sc.nu = InfectiousPeriodLaw::exponential(sc.gamma);
  } else if (nu_kind.rfind("fixed:", 0) == 0) {
    sc.nu = InfectiousPeriodLaw::fixed(std::stod(nu_kind.substr(6)));
  } else if (nu_kind.rfind("gamma:", 0) == 0) {
    auto rest = nu_kind.substr(6);
    auto comma = rest.find(',');
    if (comma == std::string::npos)
      throw ConfigError("nu = gamma:<shape>,<scale> expected");
    sc.nu = InfectiousPeriodLaw::gamma(std::stod(rest.substr(0, comma)),
                                       std::stod(rest.substr(comma + 1)));
  } else {
    throw ConfigError("unknown nu kind: " + nu_kind);
  }
  return sc;
}

inline Scenario parse_scenario_string(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

struct Table1Entry {
  std::string label;       // R0 value, scenario name only
  double p_G, p_H, p_W;    // layer proportions the ladder is grouped by
  double beta_G, lambda_H, lambda_W;
  double T;
};

// The ten benchmark parameter sets (gamma = 0.125, eps = 0.005 throughout).
inline const std::vector<Table1Entry>& benchmark_scenarios() {
  static const std::vector<Table1Entry> table = {
      {"R0=1.2", 0.2, 0.4, 0.4, 0.03, 0.05, 0.0015, 130},
      {"R0=1.4", 0.2, 0.4, 0.4, 0.035, 0.07, 0.0016, 130},
      {"R0=1.7", 0.2, 0.4, 0.4, 0.045, 0.09, 0.0018, 105},
      {"R0=2.0", 0.2, 0.4, 0.4, 0.05, 0.15, 0.002, 85},
      {"R0=2.5", 0.2, 0.4, 0.4, 0.06, 0.2, 0.0022, 75},
      {"R0=1.2", 0.4, 0.4, 0.2, 0.06, 0.06, 0.00075, 145},
      {"R0=1.4", 0.4, 0.4, 0.2, 0.07, 0.07, 0.0008, 130},
      {"R0=1.7", 0.4, 0.4, 0.2, 0.085, 0.1, 0.001, 95},
      {"R0=2.0", 0.4, 0.4, 0.2, 0.1, 0.15, 0.0011, 80},
      {"R0=2.5", 0.4, 0.4, 0.2, 0.125, 1.5, 0.00115, 55},
  };
  return table;
}

inline Scenario benchmark_scenario(const Table1Entry& e, int K = 10000,
                                   std::uint64_t seed = 1) {
  Scenario sc{.pi_h = default_household_dist(), .pi_w = default_workplace_dist()};
  std::ostringstream name;
  name << e.label << "_(" << e.p_G << "," << e.p_H << "," << e.p_W << ")";
  sc.name = name.str();
  sc.K = K;
  sc.beta_G = e.beta_G;
  sc.lambda_H = e.lambda_H;
  sc.lambda_W = e.lambda_W;
  sc.gamma = 0.125;
  sc.nu = InfectiousPeriodLaw::exponential(sc.gamma);
  sc.epsilon = 0.005;
  sc.horizon = e.T;
  sc.seed = seed;
  return sc;
}

}  // namespace hwsir

#endif
