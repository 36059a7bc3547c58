#pragma once

#include <cstdint>
#include <vector>

namespace relset {

// Fixed-universe bitset used both for value sets (per-feature domains) and
// feature sets (subsets of 1..m, stored 0-based).
class Bitset {
public:
  Bitset() = default;
  explicit Bitset(int universe, bool all = false) : n_(universe), words_((universe + 63) / 64, 0) {
    if (all) {
      for (auto& w : words_) w = ~0ull;
      trim();
    }
  }

  static Bitset of(int universe, std::initializer_list<int> bits) {
    Bitset b(universe);
    for (int i : bits) b.set(i);
    return b;
  }

  int universe() const { return n_; }
  bool test(int i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
  void set(int i) { words_[i >> 6] |= 1ull << (i & 63); }
  void reset(int i) { words_[i >> 6] &= ~(1ull << (i & 63)); }

  int count() const {
    int c = 0;
    for (auto w : words_) c += __builtin_popcountll(w);
    return c;
  }
  bool none() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }
  bool any() const { return !none(); }

  bool is_subset_of(const Bitset& o) const {
    for (size_t k = 0; k < words_.size(); ++k)
      if (words_[k] & ~o.words_[k]) return false;
    return true;
  }
  bool intersects(const Bitset& o) const {
    for (size_t k = 0; k < words_.size(); ++k)
      if (words_[k] & o.words_[k]) return true;
    return false;
  }

  Bitset& operator&=(const Bitset& o) {
    for (size_t k = 0; k < words_.size(); ++k) words_[k] &= o.words_[k];
    return *this;
  }
  Bitset& operator|=(const Bitset& o) {
    for (size_t k = 0; k < words_.size(); ++k) words_[k] |= o.words_[k];
    return *this;
  }
  friend Bitset operator&(Bitset a, const Bitset& b) { return a &= b; }
  friend Bitset operator|(Bitset a, const Bitset& b) { return a |= b; }

  Bitset complement() const {
    Bitset r(n_, true);
    for (size_t k = 0; k < words_.size(); ++k) r.words_[k] &= ~words_[k];
    return r;
  }
  Bitset without(int i) const {
    Bitset r = *this;
    r.reset(i);
    return r;
  }

  template <typename Fn>
  void for_each(Fn fn) const {
    for (size_t k = 0; k < words_.size(); ++k) {
      uint64_t w = words_[k];
      while (w) {
        int b = __builtin_ctzll(w);
        fn(static_cast<int>(k * 64 + b));
        w &= w - 1;
      }
    }
  }

  // 1-based external ids <-> 0-based internal bits.
  std::vector<int> to_ids() const {
    std::vector<int> ids;
    for_each([&](int i) { ids.push_back(i + 1); });
    return ids;
  }
  static Bitset from_ids(int universe, const std::vector<int>& ids) {
    Bitset b(universe);
    for (int id : ids) b.set(id - 1);
    return b;
  }

  friend bool operator==(const Bitset&, const Bitset&) = default;

  // Canonical family order: cardinality, then lowest differing element.
  static bool canonical_less(const Bitset& a, const Bitset& b) {
    if (a.count() != b.count()) return a.count() < b.count();
    for (size_t k = 0; k < a.words_.size(); ++k) {
      if (a.words_[k] != b.words_[k]) {
        uint64_t diff = a.words_[k] ^ b.words_[k];
        uint64_t low = diff & -diff;
        return a.words_[k] & low;  // a has the smaller element
      }
    }
    return false;
  }

private:
  void trim() {
    if (n_ % 64) words_.back() &= (1ull << (n_ % 64)) - 1;
  }
  int n_ = 0;
  std::vector<uint64_t> words_;
};

}  // namespace relset
