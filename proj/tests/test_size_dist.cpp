#include <cmath>
#include <map>

#include "doctest.h"
#include "hwsir/size_dist.hpp"

using namespace hwsir;

TEST_CASE("mean of simple distributions") {
  CHECK(SizeDistribution({{1, 0.5}, {2, 0.5}}).mean() == doctest::Approx(1.5));
  CHECK(SizeDistribution({{3, 1.0}}).mean() == doctest::Approx(3.0));
  // hand evaluation of the weighted sum
  CHECK(SizeDistribution({{1, 0.25}, {2, 0.25}, {4, 0.5}}).mean() ==
        doctest::Approx(2.75));
}

TEST_CASE("size-biased transform") {
  auto b = SizeDistribution({{1, 0.5}, {2, 0.5}}).size_biased();
  CHECK(b.prob(1) == doctest::Approx(1.0 / 3));
  CHECK(b.prob(2) == doctest::Approx(2.0 / 3));

  auto point = SizeDistribution({{3, 1.0}}).size_biased();
  CHECK(point.prob(3) == doctest::Approx(1.0));

  auto c = SizeDistribution({{2, 0.5}, {4, 0.5}}).size_biased();
  CHECK(c.prob(2) == doctest::Approx(1.0 / 3));
  CHECK(c.prob(4) == doctest::Approx(2.0 / 3));

  SUBCASE("sums to one") {
    double sum = 0.0;
    for (int n = 1; n <= c.n_max(); ++n) sum += c.prob(n);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("size-biasing does not decrease the mean") {
  std::vector<SizeDistribution> dists = {
      SizeDistribution({{1, 0.5}, {2, 0.5}}),
      SizeDistribution({{1, 0.3}, {2, 0.3}, {3, 0.2}, {4, 0.15}, {5, 0.05}}),
      SizeDistribution({{3, 1.0}}),
      SizeDistribution({{2, 0.9}, {50, 0.1}}),
  };
  for (const auto& d : dists)
    CHECK(d.size_biased().mean() >= d.mean() - 1e-12);
}

TEST_CASE("mean stays within the support bounds") {
  SizeDistribution d({{1, 0.3}, {2, 0.3}, {3, 0.2}, {4, 0.15}, {5, 0.05}});
  CHECK(d.mean() >= 1.0);
  CHECK(d.mean() <= d.n_max());
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(SizeDistribution({{1, 0.5}, {2, 0.6}}), std::invalid_argument);
  CHECK_THROWS_AS(SizeDistribution({{1, -0.1}, {2, 1.1}}), std::invalid_argument);
  CHECK_THROWS_AS(SizeDistribution({{0, 0.5}, {2, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(SizeDistribution(std::map<int, double>{}), std::invalid_argument);
  // near-one sums are renormalized rather than rejected
  SizeDistribution d({{1, 0.5 + 2e-10}, {2, 0.5}});
  CHECK(d.prob(1) + d.prob(2) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("sampling a point mass") {
  SizeDistribution d({{3, 1.0}});
  RandomStream rng = derive_stream(7, 0);
  for (int j = 0; j < 100; ++j) CHECK(d.sample(rng) == 3);
}

TEST_CASE("sampling is deterministic under a fixed seed") {
  SizeDistribution d({{1, 0.5}, {2, 0.5}});
  RandomStream a = derive_stream(42, 3);
  RandomStream b = derive_stream(42, 3);
  for (int j = 0; j < 1000; ++j) CHECK(d.sample(a) == d.sample(b));
}

TEST_CASE("empirical sampling frequencies match the law") {
  SizeDistribution d({{1, 0.3}, {2, 0.4}, {5, 0.3}});
  RandomStream rng = derive_stream(11, 0);
  const int N = 1000000;
  std::map<int, int> counts;
  for (int j = 0; j < N; ++j) ++counts[d.sample(rng)];
  CHECK(counts.size() == 3);
  for (auto [size, c] : counts) {
    double p = d.prob(size);
    double sigma = std::sqrt(p * (1 - p) * N);
    CHECK(std::abs(c - p * N) <= 3.0 * sigma);
  }
}

TEST_CASE("as_map round-trips") {
  std::map<int, double> probs = {{1, 0.25}, {2, 0.25}, {4, 0.5}};
  SizeDistribution d(probs);
  auto back = d.as_map();
  REQUIRE(back.size() == probs.size());
  for (auto [size, p] : probs) CHECK(back.at(size) == doctest::Approx(p));
}
