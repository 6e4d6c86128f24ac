#ifndef HWSIR_POPULATION_GRAPH_HPP
#define HWSIR_POPULATION_GRAPH_HPP

#include <algorithm>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "hwsir/rng.hpp"
#include "hwsir/size_dist.hpp"

namespace hwsir {

enum class Layer { Household, Workplace };

struct LayerPartition {
  std::vector<int> structure_of;           // individual -> structure id
  std::vector<std::vector<int>> members;   // structure id -> sorted member list
};

// Sequential layer assembly: while k individuals remain unassigned, draw a
// target size from d, truncate to min(target, k), and fill the structure with
// uniformly chosen unassigned individuals (partial Fisher-Yates on the pool).
inline LayerPartition assemble_layer(int K, const SizeDistribution& d, RandomStream& rng) {
  if (K < 1) throw std::invalid_argument("assemble_layer: K must be >= 1");
  LayerPartition part;
  part.structure_of.assign(static_cast<std::size_t>(K), -1);
  std::vector<int> pool(static_cast<std::size_t>(K));
  std::iota(pool.begin(), pool.end(), 0);
  std::size_t remaining = pool.size();
  while (remaining > 0) {
    int n = std::min<int>(d.sample(rng), static_cast<int>(remaining));
    std::vector<int> group;
    group.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      std::size_t pick =
          std::uniform_int_distribution<std::size_t>(0, remaining - 1)(rng);
      group.push_back(pool[pick]);
      std::swap(pool[pick], pool[remaining - 1]);
      --remaining;
    }
    std::sort(group.begin(), group.end());
    int id = static_cast<int>(part.members.size());
    for (int ind : group) part.structure_of[static_cast<std::size_t>(ind)] = id;
    part.members.push_back(std::move(group));
  }
  return part;
}

// Two independent partitions of the same K individuals: every individual is in
// exactly one household and one workplace.
class PopulationGraph {
 public:
  static PopulationGraph build(int K, const SizeDistribution& pi_h,
                               const SizeDistribution& pi_w, RandomStream& rng) {
    PopulationGraph g;
    g.K_ = K;
    g.households_ = assemble_layer(K, pi_h, rng);
    g.workplaces_ = assemble_layer(K, pi_w, rng);
    return g;
  }

  int K() const { return K_; }
  int num_households() const { return static_cast<int>(households_.members.size()); }
  int num_workplaces() const { return static_cast<int>(workplaces_.members.size()); }

  const LayerPartition& layer(Layer l) const {
    return l == Layer::Household ? households_ : workplaces_;
  }
  int household_of(int individual) const {
    return households_.structure_of[static_cast<std::size_t>(individual)];
  }
  int workplace_of(int individual) const {
    return workplaces_.structure_of[static_cast<std::size_t>(individual)];
  }
  const std::vector<int>& household_members(int id) const {
    return households_.members[static_cast<std::size_t>(id)];
  }
  const std::vector<int>& workplace_members(int id) const {
    return workplaces_.members[static_cast<std::size_t>(id)];
  }

  SizeDistribution empirical_size_dist(Layer l) const {
    const auto& part = layer(l);
    std::map<int, double> freq;
    for (const auto& m : part.members) freq[static_cast<int>(m.size())] += 1.0;
    for (auto& [size, count] : freq) count /= static_cast<double>(part.members.size());
    return SizeDistribution(freq);
  }

  int max_structure_size(Layer l) const {
    int n = 1;
    for (const auto& m : layer(l).members) n = std::max<int>(n, static_cast<int>(m.size()));
    return n;
  }

  // CSV export: individual, household_id, workplace_id.
  void export_csv(std::ostream& os) const {
    os << "individual,household_id,workplace_id\n";
    for (int i = 0; i < K_; ++i)
      os << i << ',' << household_of(i) << ',' << workplace_of(i) << '\n';
  }

 private:
  int K_ = 0;
  LayerPartition households_;
  LayerPartition workplaces_;
};

}  // namespace hwsir

#endif
