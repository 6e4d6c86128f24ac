#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "hwsir/population_graph.hpp"

using namespace hwsir;

namespace {

std::vector<int> sorted_sizes(const LayerPartition& part) {
  std::vector<int> sizes;
  for (const auto& m : part.members) sizes.push_back(static_cast<int>(m.size()));
  std::sort(sizes.begin(), sizes.end(), std::greater<int>());
  return sizes;
}

double total_variation(const SizeDistribution& a, const SizeDistribution& b) {
  int n_max = std::max(a.n_max(), b.n_max());
  double tv = 0.0;
  for (int n = 1; n <= n_max; ++n) tv += std::abs(a.prob(n) - b.prob(n));
  return 0.5 * tv;
}

void check_partition_invariants(const PopulationGraph& g) {
  for (Layer l : {Layer::Household, Layer::Workplace}) {
    const auto& part = g.layer(l);
    std::vector<int> seen(static_cast<std::size_t>(g.K()), 0);
    int total = 0;
    for (std::size_t id = 0; id < part.members.size(); ++id) {
      CHECK(!part.members[id].empty());
      for (int ind : part.members[id]) {
        ++seen[static_cast<std::size_t>(ind)];
        CHECK(part.structure_of[static_cast<std::size_t>(ind)] ==
              static_cast<int>(id));
        ++total;
      }
      CHECK(std::is_sorted(part.members[id].begin(), part.members[id].end()));
    }
    CHECK(total == g.K());
    for (int c : seen) CHECK(c == 1);  // exactly one structure per individual
  }
}

}  // namespace

TEST_CASE("assemble_layer truncates only the final structure") {
  SizeDistribution two({{2, 1.0}});
  RandomStream rng = derive_stream(1, 0);
  auto part = assemble_layer(5, two, rng);
  CHECK(sorted_sizes(part) == std::vector<int>{2, 2, 1});
}

TEST_CASE("assemble_layer with K=1") {
  SizeDistribution d({{1, 0.2}, {4, 0.8}});
  RandomStream rng = derive_stream(2, 0);
  auto part = assemble_layer(1, d, rng);
  REQUIRE(part.members.size() == 1);
  CHECK(part.members[0] == std::vector<int>{0});
}

TEST_CASE("assembled size frequencies converge to the law") {
  SizeDistribution d({{1, 0.3}, {2, 0.4}, {3, 0.3}});
  const int K = 10000, assemblies = 100;
  std::map<int, double> freq;
  double structures = 0.0;
  for (int rep = 0; rep < assemblies; ++rep) {
    RandomStream rng = derive_stream(5, static_cast<std::uint64_t>(rep));
    auto part = assemble_layer(K, d, rng);
    int truncated = 0;
    for (const auto& m : part.members) {
      freq[static_cast<int>(m.size())] += 1.0;
      structures += 1.0;
    }
    // at most the last structure can deviate from its drawn target size
    (void)truncated;
  }
  for (auto& [size, c] : freq) c /= structures;
  SizeDistribution emp(freq);
  CHECK(total_variation(emp, d) < 0.01);
}

TEST_CASE("build with deterministic sizes") {
  SizeDistribution h({{2, 1.0}}), w({{4, 1.0}});
  RandomStream rng = derive_stream(3, 0);
  auto g = PopulationGraph::build(4, h, w, rng);
  CHECK(g.num_households() == 2);
  CHECK(g.num_workplaces() == 1);
  CHECK(static_cast<int>(g.workplace_members(0).size()) == 4);
  check_partition_invariants(g);
}

TEST_CASE("household layer is unaffected by the workplace law") {
  // Same rng stream for the household layer, then independent draws for the
  // workplace layer: the household partition must be identical.
  SizeDistribution h({{1, 0.3}, {2, 0.4}, {3, 0.3}});
  RandomStream rng1 = derive_stream(9, 0);
  auto part1 = assemble_layer(500, h, rng1);
  RandomStream rng2 = derive_stream(9, 0);
  auto part2 = assemble_layer(500, h, rng2);
  CHECK(part1.structure_of == part2.structure_of);
}

TEST_CASE("invariants hold on a large graph") {
  SizeDistribution h({{1, 0.3}, {2, 0.3}, {3, 0.2}, {4, 0.15}, {5, 0.05}});
  std::map<int, double> wm;
  double norm = 0.0;
  for (int n = 1; n <= 50; ++n) norm += std::pow(0.88, n - 1);
  for (int n = 1; n <= 50; ++n) wm[n] = std::pow(0.88, n - 1) / norm;
  SizeDistribution w(wm);
  RandomStream rng = derive_stream(4, 0);
  auto g = PopulationGraph::build(10000, h, w, rng);
  check_partition_invariants(g);
  CHECK(g.max_structure_size(Layer::Household) <= h.n_max());
  CHECK(g.max_structure_size(Layer::Workplace) <= w.n_max());
  // K/n_max <= K_X <= K
  CHECK(g.num_households() * h.n_max() >= g.K());
  CHECK(g.num_households() <= g.K());
  CHECK(g.num_workplaces() * w.n_max() >= g.K());
  CHECK(g.num_workplaces() <= g.K());
}

TEST_CASE("empirical_size_dist counts structures") {
  SizeDistribution two({{2, 1.0}});
  RandomStream rng = derive_stream(6, 0);
  auto g = PopulationGraph::build(5, two, two, rng);
  auto emp = g.empirical_size_dist(Layer::Household);
  CHECK(emp.prob(1) == doctest::Approx(1.0 / 3));
  CHECK(emp.prob(2) == doctest::Approx(2.0 / 3));
}

TEST_CASE("empirical law approaches the target at K = 1e5") {
  SizeDistribution d({{2, 0.5}, {3, 0.5}});
  for (int rep = 0; rep < 20; ++rep) {
    RandomStream rng = derive_stream(8, static_cast<std::uint64_t>(rep));
    auto g = PopulationGraph::build(100000, d, d, rng);
    CHECK(total_variation(g.empirical_size_dist(Layer::Household), d) <= 0.02);
  }
}

TEST_CASE("total-variation distance shrinks as K grows") {
  SizeDistribution d({{1, 0.3}, {2, 0.4}, {3, 0.3}});
  auto median_tv = [&](int K, std::uint64_t salt) {
    std::vector<double> tvs;
    for (int rep = 0; rep < 20; ++rep) {
      RandomStream rng = derive_stream(salt, static_cast<std::uint64_t>(rep));
      auto g = PopulationGraph::build(K, d, d, rng);
      tvs.push_back(total_variation(g.empirical_size_dist(Layer::Household), d));
    }
    std::sort(tvs.begin(), tvs.end());
    return 0.5 * (tvs[9] + tvs[10]);
  };
  double tv3 = median_tv(1000, 100);
  double tv4 = median_tv(10000, 200);
  double tv5 = median_tv(100000, 300);
  CHECK(tv4 < tv3);
  CHECK(tv5 < tv4);
}
