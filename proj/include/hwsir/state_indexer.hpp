#ifndef HWSIR_STATE_INDEXER_HPP
#define HWSIR_STATE_INDEXER_HPP

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hwsir {

// Enumeration of the structure compositions {(n-i, i): 2 <= n <= n_max,
// 0 <= i <= n-1} for one layer, ordered by increasing n then increasing i.
// The pair (n-i, i) sits at 0-based offset (n-1)n/2 + i - 1.
class StateIndexer {
 public:
  explicit StateIndexer(int n_max) : n_max_(n_max) {
    if (n_max < 1) throw std::invalid_argument("StateIndexer: n_max must be >= 1");
    for (int n = 2; n <= n_max; ++n)
      for (int i = 0; i < n; ++i) pairs_.emplace_back(n - i, i);
  }

  int n_max() const { return n_max_; }
  std::size_t size() const { return pairs_.size(); }  // n_max(n_max+1)/2 - 1

  bool contains(int S, int I) const {
    int n = S + I;
    return n >= 2 && n <= n_max_ && S >= 1 && I >= 0;
  }

  std::size_t index(int S, int I) const {
    int n = S + I;
    return static_cast<std::size_t>((n - 1) * n / 2 + I - 1);
  }

  std::pair<int, int> pair(std::size_t idx) const { return pairs_[idx]; }

 private:
  int n_max_;
  std::vector<std::pair<int, int>> pairs_;  // (S, I) in enumeration order
};

}  // namespace hwsir

#endif
