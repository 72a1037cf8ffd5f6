#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "cubeforms/error.hpp"
#include "cubeforms/numeric.hpp"

namespace cubeforms {

// Subsets of F_p as bitmasks: bit i set <=> residue i present. This caps the
// supported modulus at 61 (largest prime below the word size), which is far
// beyond anything the exhaustive engines can reach anyway.
using Mask = std::uint64_t;

class Modulus {
 public:
  explicit Modulus(int p) : p_(p) {
    if (p < 2 || !is_prime(p))
      fail(ErrorKind::InvalidInput, "modulus must be a prime >= 2");
    if (p > 61)
      fail(ErrorKind::InvalidInput,
           "modulus too large: residue sets are stored as 64-bit masks (p <= 61)");
  }

  int value() const { return p_; }

  int reduce(std::int64_t v) const {
    int r = static_cast<int>(v % p_);
    return r < 0 ? r + p_ : r;
  }

  Mask full_mask() const { return (p_ == 64) ? ~Mask{0} : ((Mask{1} << p_) - 1); }

  friend bool operator==(const Modulus& a, const Modulus& b) { return a.p_ == b.p_; }
  friend bool operator!=(const Modulus& a, const Modulus& b) { return a.p_ != b.p_; }

  static bool is_prime(int p) {
    if (p < 2) return false;
    for (int d = 2; static_cast<std::int64_t>(d) * d <= p; ++d)
      if (p % d == 0) return false;
    return true;
  }

 private:
  int p_;
};

inline Mask set_to_mask(const std::vector<int>& elements, const Modulus& p) {
  Mask m = 0;
  for (int e : elements) {
    if (e < 0 || e >= p.value())
      fail(ErrorKind::InvalidInput, "residue out of range [0, p)");
    m |= Mask{1} << e;
  }
  return m;
}

inline std::vector<int> mask_to_set(Mask m, const Modulus& p) {
  std::vector<int> out;
  for (int e = 0; e < p.value(); ++e)
    if (m >> e & 1) out.push_back(e);
  return out;
}

// Cyclic sumset on masks: A + B = {a + b mod p}.
inline Mask sumset_mask(Mask a, Mask b, const Modulus& p) {
  const int pv = p.value();
  const Mask full = p.full_mask();
  Mask out = 0;
  for (int shift = 0; shift < pv; ++shift) {
    if (!(a >> shift & 1)) continue;
    out |= shift == 0 ? b : (((b << shift) | (b >> (pv - shift))) & full);
  }
  return out;
}

// {c * s mod p : s in A}
inline Mask dilate_mask(Mask a, int c, const Modulus& p) {
  Mask out = 0;
  for (int e = 0; e < p.value(); ++e)
    if (a >> e & 1) out |= Mask{1} << p.reduce(static_cast<std::int64_t>(c) * e);
  return out;
}

class Alphabet {
 public:
  Alphabet(Modulus p, std::vector<int> elements) : p_(p), elements_(std::move(elements)) {
    std::sort(elements_.begin(), elements_.end());
    elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
    mask_ = set_to_mask(elements_, p_);
    if (elements_.size() < 2)
      fail(ErrorKind::InvalidInput, "alphabet must have at least 2 elements");
  }

  const Modulus& modulus() const { return p_; }
  const std::vector<int>& elements() const { return elements_; }
  int size() const { return static_cast<int>(elements_.size()); }
  Mask mask() const { return mask_; }
  bool contains(int r) const { return (mask_ >> r) & 1; }

  friend bool operator==(const Alphabet& a, const Alphabet& b) {
    return a.p_ == b.p_ && a.mask_ == b.mask_;
  }

 private:
  Modulus p_;
  std::vector<int> elements_;
  Mask mask_;
};

class TargetSet {
 public:
  TargetSet(Modulus p, std::vector<int> elements) : p_(p), elements_(std::move(elements)) {
    std::sort(elements_.begin(), elements_.end());
    elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
    mask_ = set_to_mask(elements_, p_);
    if (static_cast<int>(elements_.size()) >= p_.value())
      fail(ErrorKind::InvalidInput, "target set must be strict");
  }

  const Modulus& modulus() const { return p_; }
  const std::vector<int>& elements() const { return elements_; }
  int size() const { return static_cast<int>(elements_.size()); }
  Mask mask() const { return mask_; }
  bool contains(int r) const { return (mask_ >> r) & 1; }

  TargetSet translated(int shift) const {
    std::vector<int> out;
    out.reserve(elements_.size());
    for (int e : elements_) out.push_back(p_.reduce(e + shift));
    return TargetSet(p_, std::move(out));
  }

  friend bool operator==(const TargetSet& a, const TargetSet& b) {
    return a.p_ == b.p_ && a.mask_ == b.mask_;
  }

 private:
  Modulus p_;
  std::vector<int> elements_;
  Mask mask_;
};

// {a + b mod p : a in A, b in B}; inputs must be nonempty.
inline std::vector<int> sumset(const std::vector<int>& a, const std::vector<int>& b,
                               const Modulus& p) {
  if (a.empty() || b.empty())
    fail(ErrorKind::InvalidInput, "sumset of an empty set is undefined");
  return mask_to_set(sumset_mask(set_to_mask(a, p), set_to_mask(b, p), p), p);
}

// Result of the L(S, E) search: L is the smallest length at which every
// iterated sumset a_1 S + ... + a_L S (nonzero a_i) escapes E; the witness is
// a tuple of length L - 1 whose sumset stays inside E (empty when L <= 1).
// `bound` is the Cauchy-Davenport cap floor((|E|-1)/(|S|-1)) + 1.
struct LWitness {
  int L = 0;
  std::vector<int> tuple;
  int bound = 0;
};

// Level-by-level search over reachable sumsets, represented as subsets of
// F_p. The empty sum (level 0) is {0}. Witnesses are recovered via parent
// pointers, taking the smallest mask / smallest coefficient at each step so
// the output is deterministic. No monotonicity in L is assumed: levels are
// scanned in increasing order and the first level on which every reachable
// set escapes E is returned.
inline LWitness compute_L(const Alphabet& S, const TargetSet& E) {
  if (S.modulus() != E.modulus())
    fail(ErrorKind::InvalidInput, "alphabet and target set moduli differ");
  const Modulus& p = S.modulus();
  const Mask emask = E.mask();
  const int bound =
      E.size() == 0
          ? 0
          : static_cast<int>(floor_div(E.size() - 1, S.size() - 1)) + 1;

  // Dilates a*S for every nonzero a, deduplicated but order-preserving so the
  // recovered witness uses the smallest coefficient available.
  std::vector<std::pair<int, Mask>> dilates;
  for (int a = 1; a < p.value(); ++a) {
    Mask d = dilate_mask(S.mask(), a, p);
    bool seen = false;
    for (const auto& [c, m] : dilates) seen = seen || m == d;
    if (!seen) dilates.emplace_back(a, d);
  }

  std::vector<std::vector<Mask>> levels = {{Mask{1}}};  // level 0: {0}
  std::vector<std::map<Mask, std::pair<Mask, int>>> parents = {{}};

  for (int level = 0; level <= bound; ++level) {
    bool any_inside = false;
    for (Mask m : levels[level]) any_inside = any_inside || (m & ~emask) == 0;
    if (!any_inside) {
      LWitness result;
      result.L = level;
      result.bound = bound;
      if (level >= 1) {
        Mask cursor = 0;
        for (Mask m : levels[level - 1])
          if ((m & ~emask) == 0) {
            cursor = m;
            break;
          }
        for (int back = level - 1; back >= 1; --back) {
          const auto& [prev, coeff] = parents[back].at(cursor);
          result.tuple.push_back(coeff);
          cursor = prev;
        }
        std::reverse(result.tuple.begin(), result.tuple.end());
      }
      if (result.L > bound)
        fail(ErrorKind::InvalidInput, "internal: L exceeded its Cauchy-Davenport bound");
      return result;
    }

    std::map<Mask, std::pair<Mask, int>> next_parents;
    for (Mask m : levels[level])
      for (const auto& [coeff, d] : dilates) {
        Mask grown = sumset_mask(m, d, p);
        next_parents.try_emplace(grown, m, coeff);
      }
    std::vector<Mask> next_level;
    next_level.reserve(next_parents.size());
    for (const auto& [m, _] : next_parents) next_level.push_back(m);
    levels.push_back(std::move(next_level));
    parents.push_back(std::move(next_parents));
  }
  fail(ErrorKind::InvalidInput, "internal: L search exceeded its Cauchy-Davenport bound");
}

// beta(p, S) = |S|^(-ceil((p-1)/(|S|-1))), the universal lower bound on
// nonzero single-form probabilities over S^n.
inline Rational beta(const Modulus& p, const Alphabet& S) {
  if (S.size() < 2) fail(ErrorKind::InvalidInput, "beta requires |S| >= 2");
  const auto exponent =
      static_cast<std::uint64_t>(ceil_div(p.value() - 1, S.size() - 1));
  return Rational(1, pow_big(S.size(), exponent));
}

// |E_{u in S} w_p^{t u}|; equals 1 at t = 0 and is at most 1 - p^{-2} for
// every nonzero t.
inline double char_mean_magnitude(const Alphabet& S, int t) {
  constexpr double kTau = 6.283185307179586476925286766559;
  const int p = S.modulus().value();
  if (t < 0 || t >= p) fail(ErrorKind::InvalidInput, "character index out of range");
  std::complex<double> sum = 0.0;
  for (int u : S.elements()) {
    const double angle = kTau * static_cast<double>(t) * u / p;
    sum += std::complex<double>(std::cos(angle), std::sin(angle));
  }
  return std::abs(sum) / S.size();
}

}  // namespace cubeforms
