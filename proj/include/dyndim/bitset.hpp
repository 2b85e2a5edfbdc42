#pragma once

#include <cstdint>
#include <vector>

#include "dyndim/error.hpp"

namespace dyndim {

// Fixed-size bitset over sample points. Word layout is part of the
// determinism contract: comparisons and iteration follow index order.
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(int n) : n_(n), w_((n + 63) / 64, 0) {}

  int size() const { return n_; }

  void set(int i, bool v = true) {
    check(i);
    if (v)
      w_[i >> 6] |= (std::uint64_t{1} << (i & 63));
    else
      w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
  }
  bool test(int i) const {
    check(i);
    return (w_[i >> 6] >> (i & 63)) & 1;
  }

  int count() const;
  bool any() const;
  bool none() const { return !any(); }

  Bitset operator&(const Bitset& o) const;
  Bitset operator|(const Bitset& o) const;
  // this & ~o
  Bitset and_not(const Bitset& o) const;
  Bitset complement() const;

  bool subset_of(const Bitset& o) const;
  bool intersects(const Bitset& o) const;

  bool operator==(const Bitset& o) const { return n_ == o.n_ && w_ == o.w_; }
  bool operator<(const Bitset& o) const;  // lexicographic on (n, words)

  std::vector<int> members() const;

 private:
  void check(int i) const {
    if (i < 0 || i >= n_) throw InternalError("bitset index out of range");
  }
  int n_ = 0;
  std::vector<std::uint64_t> w_;
};

}  // namespace dyndim
