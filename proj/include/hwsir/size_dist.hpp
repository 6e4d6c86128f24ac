#ifndef HWSIR_SIZE_DIST_HPP
#define HWSIR_SIZE_DIST_HPP

#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <vector>

#include "hwsir/rng.hpp"

namespace hwsir {

// Probability law of structure (household/workplace) sizes on 1..n_max,
// stored densely. Immutable after construction.
class SizeDistribution {
 public:
  // Accepts probabilities whose sum deviates from 1 by at most 1e-9 and
  // renormalizes; larger deviations are rejected.
  explicit SizeDistribution(const std::map<int, double>& probs) {
    if (probs.empty()) throw std::invalid_argument("size distribution: empty support");
    int n_max = probs.rbegin()->first;
    if (probs.begin()->first < 1)
      throw std::invalid_argument("size distribution: sizes must be >= 1");
    probs_.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    double sum = 0.0;
    for (auto [size, p] : probs) {
      if (p < 0.0) throw std::invalid_argument("size distribution: negative probability");
      probs_[static_cast<std::size_t>(size)] = p;
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("size distribution: probabilities sum to " +
                                  std::to_string(sum));
    for (auto& p : probs_) p /= sum;
    cdf_.resize(probs_.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < probs_.size(); ++j) {
      acc += probs_[j];
      cdf_[j] = acc;
    }
    cdf_.back() = 1.0;
  }

  int n_max() const { return static_cast<int>(probs_.size()) - 1; }

  double prob(int size) const {
    if (size < 1 || size > n_max()) return 0.0;
    return probs_[static_cast<std::size_t>(size)];
  }

  double mean() const {
    double m = 0.0;
    for (int j = 1; j <= n_max(); ++j) m += j * prob(j);
    return m;
  }

  // Size-biased transform: probability that a uniformly chosen individual
  // belongs to a structure of size n is n*pi_n/m.
  SizeDistribution size_biased() const {
    double m = mean();
    std::map<int, double> b;
    for (int j = 1; j <= n_max(); ++j)
      if (prob(j) > 0.0) b[j] = j * prob(j) / m;
    return SizeDistribution(b);
  }

  int sample(RandomStream& rng) const {
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    auto it = std::lower_bound(cdf_.begin() + 1, cdf_.end(), u);
    return static_cast<int>(it - cdf_.begin());
  }

  std::map<int, double> as_map() const {
    std::map<int, double> out;
    for (int j = 1; j <= n_max(); ++j)
      if (prob(j) > 0.0) out[j] = prob(j);
    return out;
  }

 private:
  std::vector<double> probs_;  // probs_[j] = P(size == j), index 0 unused
  std::vector<double> cdf_;
};

}  // namespace hwsir

#endif
