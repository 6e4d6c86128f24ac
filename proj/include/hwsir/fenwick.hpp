#ifndef HWSIR_FENWICK_HPP
#define HWSIR_FENWICK_HPP

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace hwsir {

// Fenwick (binary indexed) tree over non-negative integer weights, supporting
// O(log n) point update and O(log n) sampling proportional to weight.
class FenwickSampler {
 public:
  explicit FenwickSampler(std::size_t n) : n_(n), tree_(n + 1, 0), weight_(n, 0) {}

  std::size_t size() const { return n_; }
  std::int64_t total() const { return total_; }
  std::int64_t weight(std::size_t i) const { return weight_[i]; }

  void set(std::size_t i, std::int64_t w) {
    assert(w >= 0);
    std::int64_t delta = w - weight_[i];
    if (delta == 0) return;
    weight_[i] = w;
    total_ += delta;
    for (std::size_t j = i + 1; j <= n_; j += j & (~j + 1)) tree_[j] += delta;
  }

  // Largest index i such that prefix_sum(i) <= target < prefix_sum(i+1).
  // Requires 0 <= target < total().
  std::size_t find(std::int64_t target) const {
    assert(target >= 0 && target < total_);
    std::size_t pos = 0;
    std::size_t mask = top_bit(n_);
    while (mask > 0) {
      std::size_t next = pos + mask;
      if (next <= n_ && tree_[next] <= target) {
        target -= tree_[next];
        pos = next;
      }
      mask >>= 1;
    }
    return pos;  // 0-based index
  }

 private:
  static std::size_t top_bit(std::size_t n) {
    std::size_t b = 1;
    while ((b << 1) <= n) b <<= 1;
    return b;
  }

  std::size_t n_;
  std::vector<std::int64_t> tree_;
  std::vector<std::int64_t> weight_;
  std::int64_t total_ = 0;
};

}  // namespace hwsir

#endif
