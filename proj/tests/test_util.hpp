#pragma once

// Shared helpers for the unit suites: brute-force reference engines that are
// deliberately independent of the library's DP/BFS implementations, plus
// small random generators.

#include <map>
#include <vector>

#include "cubeforms/cubeforms.hpp"

namespace testutil {

using namespace cubeforms;

// Reference satisfying count by direct enumeration of S^coords.
struct BruteForce {
  BigInt satisfying = 0;
  BigInt total = 0;
  std::map<std::vector<int>, BigInt> joint;  // value tuple -> count
};

inline BruteForce brute_force(const ConditionSystem& system) {
  BruteForce out;
  const auto coords = system.union_support();
  const auto& letters = system.alphabet().elements();
  std::vector<std::size_t> pick(coords.size(), 0);
  std::map<Coord, int> x;
  for (;;) {
    for (std::size_t i = 0; i < coords.size(); ++i) x[coords[i]] = letters[pick[i]];
    std::vector<int> values;
    bool ok = true;
    for (const auto& cond : system.conditions()) {
      const int v = cond.form.evaluate([&](Coord z) { return x.count(z) ? x[z] : 0; });
      values.push_back(v);
      ok = ok && cond.target.contains(v);
    }
    out.joint[values] += 1;
    out.total += 1;
    if (ok) out.satisfying += 1;

    std::size_t pos = 0;
    while (pos < pick.size()) {
      if (++pick[pos] < letters.size()) break;
      pick[pos] = 0;
      ++pos;
    }
    if (pos == pick.size()) break;
  }
  return out;
}

// Reference L(S, E): literal scan over tuple lengths, enumerating every
// coefficient tuple directly (no sumset-level deduplication).
inline int brute_force_L(const Alphabet& S, const TargetSet& E) {
  const Modulus& p = S.modulus();
  for (int len = 0;; ++len) {
    bool some_tuple_inside = false;
    std::vector<int> tuple(len, 1);
    for (;;) {
      Mask acc = 1;  // {0}
      for (int a : tuple) acc = sumset_mask(acc, dilate_mask(S.mask(), a, p), p);
      if ((acc & ~E.mask()) == 0) some_tuple_inside = true;
      if (len == 0) break;
      std::size_t pos = 0;
      while (pos < tuple.size()) {
        if (++tuple[pos] < p.value()) break;
        tuple[pos] = 1;
        ++pos;
      }
      if (pos == tuple.size()) break;
    }
    if (!some_tuple_inside) return len;
  }
}

inline LinearForm random_form(Xoshiro256StarStar& rng, const Modulus& p, int max_support,
                              int coord_pool) {
  LinearForm f(p);
  const int sup = static_cast<int>(rng.below(max_support + 1));
  for (int j = 0; j < sup; ++j)
    f.set(static_cast<Coord>(rng.below(coord_pool)),
          1 + static_cast<int>(rng.below(p.value() - 1)));
  return f;
}

inline std::vector<int> random_strict_subset(Xoshiro256StarStar& rng, int p) {
  std::vector<int> out;
  for (int e = 0; e < p; ++e)
    if (rng.below(2) == 0) out.push_back(e);
  if (static_cast<int>(out.size()) == p) out.pop_back();
  if (out.empty()) out.push_back(static_cast<int>(rng.below(p)));
  return out;
}

}  // namespace testutil
