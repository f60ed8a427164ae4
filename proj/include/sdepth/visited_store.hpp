#pragma once

#include <algorithm>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "sdepth/core.hpp"

namespace sdepth {

// A point index into the outside set together with a circle choice:
// sign +1 selects the circle {u : u.y = 1}, -1 the anti-circle {u : u.y = -1}.
struct SignedIndex {
  int index = 0;
  int sign = 1;
};

// Flattened code for a SignedIndex over m outside points: index for the
// circle, index + m for the anti-circle.
inline int signed_code(const SignedIndex& si, int m) {
  return si.sign >= 0 ? si.index : si.index + m;
}

// ===== VisitedStore =====
//
// Subset-closure flag store over circle/anti-circle code multisets of size up
// to d-2. mark(S) flags every non-empty subset of S within that size limit;
// is_visited answers under a canonical encoding so that a set and its global
// sign flip (the same pair of antipodal tangent planes) share one entry.
//
// Keys are exact: codes pack bijectively into 64 bits when the width allows,
// otherwise the canonical code vector itself is the key. A false positive
// would silently drop an unexplored candidate, so hashing alone is never
// trusted for equality.
class VisitedStore {
 public:
  VisitedStore(int outside_count, int dim) : m_(outside_count), limit_(dim - 2) {
    int bits = 1;
    while ((1LL << bits) < 2LL * m_ + 1) {
      ++bits;
    }
    bits_ = bits;
    packable_ = limit_ > 0 && limit_ * bits_ <= 64;
  }

  int subset_limit() const { return limit_; }

  // Flags every non-empty subset of codes with size <= d-2.
  void mark(const std::vector<int>& codes) {
    if (limit_ <= 0) {
      return;
    }
    const int k = static_cast<int>(codes.size());
    std::vector<int> subset;
    subset.reserve(k);
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
      if (popcount(mask) > limit_) {
        continue;
      }
      subset.clear();
      for (int j = 0; j < k; ++j) {
        if (mask & (1u << j)) {
          subset.push_back(codes[j]);
        }
      }
      insert_canonical(subset);
    }
  }

  bool is_visited(const std::vector<int>& codes) const {
    if (codes.empty() || limit_ <= 0 || static_cast<int>(codes.size()) > limit_) {
      return false;
    }
    std::vector<int> canon = canonicalize(codes);
    if (packable_) {
      return packed_.count(pack(canon)) != 0;
    }
    return general_.count(canon) != 0;
  }

  std::size_t size() const { return packable_ ? packed_.size() : general_.size(); }

  // Canonical form: decode to (index, sign), sort, flip all signs when the
  // first is negative, re-encode. Both global sign choices of a tangent pair
  // land on the same key.
  std::vector<int> canonicalize(const std::vector<int>& codes) const {
    std::vector<std::pair<int, int>> decoded;
    decoded.reserve(codes.size());
    for (const int c : codes) {
      decoded.emplace_back(c < m_ ? c : c - m_, c < m_ ? 0 : 1);
    }
    std::sort(decoded.begin(), decoded.end());
    if (decoded.front().second == 1) {
      for (auto& [idx, neg] : decoded) {
        neg ^= 1;
      }
      std::sort(decoded.begin(), decoded.end());
    }
    std::vector<int> canon;
    canon.reserve(decoded.size());
    for (const auto& [idx, neg] : decoded) {
      canon.push_back(idx + neg * m_);
    }
    return canon;
  }

 private:
  static int popcount(unsigned v) {
    int c = 0;
    for (; v; v &= v - 1) {
      ++c;
    }
    return c;
  }

  void insert_canonical(const std::vector<int>& subset) {
    std::vector<int> canon = canonicalize(subset);
    if (packable_) {
      packed_.insert(pack(canon));
    } else {
      general_.insert(std::move(canon));
    }
  }

  // Bijective pack: (code + 1) per slot, zero-padded; lengths stay
  // distinguishable because valid slots are never zero.
  std::uint64_t pack(const std::vector<int>& canon) const {
    std::uint64_t key = 0;
    int shift = 0;
    for (const int c : canon) {
      key |= static_cast<std::uint64_t>(c + 1) << shift;
      shift += bits_;
    }
    return key;
  }

  struct VecHash {
    std::size_t operator()(const std::vector<int>& v) const {
      std::size_t h = 1469598103934665603ULL;
      for (const int x : v) {
        h ^= static_cast<std::size_t>(x) + 0x9E3779B9u;
        h *= 1099511628211ULL;
      }
      return h;
    }
  };

  int m_;
  int limit_;
  int bits_ = 1;
  bool packable_ = false;
  std::unordered_set<std::uint64_t> packed_;
  std::unordered_set<std::vector<int>, VecHash> general_;
};

}  // namespace sdepth
