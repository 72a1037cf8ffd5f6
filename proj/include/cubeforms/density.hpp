#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "cubeforms/error.hpp"
#include "cubeforms/forms.hpp"
#include "cubeforms/numeric.hpp"
#include "cubeforms/rng.hpp"

namespace cubeforms {

// Default cap on DP work, measured in state updates p^k * N * |S|. Override
// per call, via the CLI flag, or the CUBEFORMS_BUDGET environment variable.
inline constexpr std::uint64_t kDefaultBudget = 100'000'000;

// Exact joint distribution of (phi_1(x), ..., phi_k(x)) for x uniform on
// S^N, N = |union of supports|. Counts are exact integers; total = |S|^N.
struct JointDistribution {
  int p = 0;
  int k = 0;
  std::size_t n_coords = 0;
  BigInt total = 1;
  std::map<std::vector<int>, BigInt> counts;  // nonzero entries only

  Rational probability(const std::vector<int>& value) const {
    auto it = counts.find(value);
    if (it == counts.end()) return Rational(0);
    return Rational(it->second, total);
  }
};

namespace detail {

// One DP pass: returns the p^k state counts of partial form values after
// consuming every coordinate, iterating coordinates in increasing order.
// State indices use mixed-radix encoding: digit i (radix p) holds the current
// value of forms[i].
template <class CountT>
std::vector<CountT> dp_state_counts(const Modulus& p,
                                    const std::vector<int>& alphabet,
                                    const std::vector<const LinearForm*>& forms,
                                    const std::vector<Coord>& coords) {
  const int pv = p.value();
  const std::size_t k = forms.size();
  std::size_t states = 1;
  for (std::size_t i = 0; i < k; ++i) states *= static_cast<std::size_t>(pv);

  std::vector<std::size_t> radix(k, 1);
  for (std::size_t i = 1; i < k; ++i) radix[i] = radix[i - 1] * pv;

  std::vector<CountT> cur(states, CountT(0)), nxt(states);
  cur[0] = CountT(1);

  std::vector<int> digits(k, 0);
  // shift[i][s_index] = radix-weighted digit delta of form i for letter s
  std::vector<std::vector<int>> delta(k, std::vector<int>(alphabet.size(), 0));

  for (Coord z : coords) {
    bool touches = false;
    for (std::size_t i = 0; i < k; ++i) {
      const int c = forms[i]->coeff(z);
      for (std::size_t si = 0; si < alphabet.size(); ++si)
        delta[i][si] = p.reduce(static_cast<std::int64_t>(c) * alphabet[si]);
      touches = touches || c != 0;
    }
    if (!touches) continue;  // coordinate contributes a global |S| factor only

    std::fill(nxt.begin(), nxt.end(), CountT(0));
    std::fill(digits.begin(), digits.end(), 0);
    for (std::size_t idx = 0; idx < states; ++idx) {
      if (!(cur[idx] == CountT(0))) {
        for (std::size_t si = 0; si < alphabet.size(); ++si) {
          std::size_t to = 0;
          for (std::size_t i = 0; i < k; ++i) {
            int d = digits[i] + delta[i][si];
            if (d >= pv) d -= pv;
            to += radix[i] * static_cast<std::size_t>(d);
          }
          nxt[to] += cur[idx];
        }
      }
      // advance mixed-radix odometer alongside idx
      for (std::size_t i = 0; i < k; ++i) {
        if (++digits[i] < pv) break;
        digits[i] = 0;
      }
    }
    cur.swap(nxt);
  }

  // Coordinates whose column is all-zero never entered the DP; scale so the
  // totals still refer to the full coordinate set.
  std::size_t skipped = 0;
  for (Coord z : coords) {
    bool touches = false;
    for (std::size_t i = 0; i < k; ++i) touches = touches || forms[i]->coeff(z) != 0;
    if (!touches) ++skipped;
  }
  if (skipped > 0) {
    const CountT factor = [&] {
      CountT f(1);
      for (std::size_t i = 0; i < skipped; ++i) f *= CountT(alphabet.size());
      return f;
    }();
    for (auto& c : cur) c *= factor;
  }
  return cur;
}

inline void check_budget(const Modulus& p, std::size_t k, std::size_t n_coords,
                         std::size_t alphabet_size, std::uint64_t budget,
                         const char* what) {
  BigInt work = pow_big(p.value(), k);
  work *= std::max<std::size_t>(n_coords, 1);
  work *= alphabet_size;
  if (work > budget)
    fail(ErrorKind::ExactEngineTooLarge,
         std::string(what) + " needs " + work.str() + " state updates (budget " +
             std::to_string(budget) + "); use the Monte Carlo engine instead");
}

// Chooses a uint64 fast path when every count provably fits (counts are
// bounded by |S|^N).
inline bool fits_uint64(std::size_t alphabet_size, std::size_t n_coords) {
  BigInt total = pow_big(alphabet_size, n_coords);
  return total <= std::numeric_limits<std::uint64_t>::max();
}

template <class CountT>
BigInt to_bigint(const CountT& c) {
  return BigInt(c);
}

inline std::vector<BigInt> dp_counts_auto(const Modulus& p,
                                          const std::vector<int>& alphabet,
                                          const std::vector<const LinearForm*>& forms,
                                          const std::vector<Coord>& coords) {
  if (fits_uint64(alphabet.size(), coords.size())) {
    auto raw = dp_state_counts<std::uint64_t>(p, alphabet, forms, coords);
    std::vector<BigInt> out;
    out.reserve(raw.size());
    for (auto v : raw) out.emplace_back(v);
    return out;
  }
  return dp_state_counts<BigInt>(p, alphabet, forms, coords);
}

}  // namespace detail

inline JointDistribution joint_distribution(const ConditionSystem& system,
                                            std::uint64_t budget = kDefaultBudget) {
  const Modulus& p = system.modulus();
  const auto coords = system.union_support();
  const auto& alphabet = system.alphabet().elements();
  const std::size_t k = system.k();
  detail::check_budget(p, k, coords.size(), alphabet.size(), budget,
                       "joint distribution");

  std::vector<const LinearForm*> forms;
  forms.reserve(k);
  for (const auto& c : system.conditions()) forms.push_back(&c.form);

  const auto states = detail::dp_counts_auto(p, alphabet, forms, coords);

  JointDistribution dist;
  dist.p = p.value();
  dist.k = static_cast<int>(k);
  dist.n_coords = coords.size();
  dist.total = pow_big(alphabet.size(), coords.size());

  std::vector<int> digits(k, 0);
  for (std::size_t idx = 0; idx < states.size(); ++idx) {
    if (states[idx] != 0) dist.counts.emplace(digits, states[idx]);
    for (std::size_t i = 0; i < k; ++i) {
      if (++digits[i] < p.value()) break;
      digits[i] = 0;
    }
  }

  BigInt sum = 0;
  for (const auto& [_, c] : dist.counts) sum += c;
  if (sum != dist.total)
    fail(ErrorKind::InvalidInput, "internal: joint distribution counts do not sum to |S|^N");
  return dist;
}

// Single-form distribution via per-coordinate convolution over F_p. Much
// cheaper than the joint engine: O(|Z(phi)| * p * |S|).
inline JointDistribution marginal_distribution(const LinearForm& form, const Alphabet& S) {
  const Modulus& p = form.modulus();
  if (S.modulus() != p) fail(ErrorKind::InvalidInput, "alphabet modulus mismatch");
  const int pv = p.value();

  std::vector<BigInt> mass(pv, BigInt(0));
  mass[0] = 1;
  std::vector<BigInt> next(pv);
  for (const auto& [z, c] : form.coeffs()) {
    std::fill(next.begin(), next.end(), BigInt(0));
    for (int v = 0; v < pv; ++v) {
      if (mass[v] == 0) continue;
      for (int s : S.elements())
        next[p.reduce(v + static_cast<std::int64_t>(c) * s)] += mass[v];
    }
    mass.swap(next);
  }

  JointDistribution dist;
  dist.p = pv;
  dist.k = 1;
  dist.n_coords = form.coeffs().size();
  dist.total = pow_big(S.size(), form.coeffs().size());
  for (int v = 0; v < pv; ++v)
    if (mass[v] != 0) dist.counts.emplace(std::vector<int>{v}, mass[v]);
  return dist;
}

namespace detail {

struct ComponentSplit {
  // Groups of condition indices that share no coordinates across groups.
  std::vector<std::vector<std::size_t>> groups;
};

inline ComponentSplit split_components(const ConditionSystem& system) {
  const std::size_t k = system.k();
  std::vector<std::size_t> parent(k);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  auto unite = [&](std::size_t a, std::size_t b) { parent[find(a)] = find(b); };

  std::map<Coord, std::size_t> first_user;
  for (std::size_t i = 0; i < k; ++i)
    for (const auto& [z, _] : system.conditions()[i].form.coeffs()) {
      auto [it, inserted] = first_user.emplace(z, i);
      if (!inserted) unite(i, it->second);
    }

  std::map<std::size_t, std::vector<std::size_t>> by_root;
  for (std::size_t i = 0; i < k; ++i) by_root[find(i)].push_back(i);

  ComponentSplit split;
  for (auto& [_, group] : by_root) split.groups.push_back(std::move(group));
  return split;
}

// Exact density of one connected component of the condition/coordinate
// incidence graph.
inline Rational component_density(const ConditionSystem& system,
                                  const std::vector<std::size_t>& group,
                                  std::uint64_t budget) {
  const Modulus& p = system.modulus();
  const auto& alphabet = system.alphabet().elements();

  std::vector<const LinearForm*> forms;
  std::map<Coord, bool> coord_set;
  for (std::size_t i : group) {
    forms.push_back(&system.conditions()[i].form);
    for (const auto& [z, _] : system.conditions()[i].form.coeffs()) coord_set[z] = true;
  }
  std::vector<Coord> coords;
  for (const auto& [z, _] : coord_set) coords.push_back(z);

  if (coords.empty()) {
    // Zero forms only: each condition holds iff 0 lies in its target.
    for (std::size_t i : group)
      if (!system.conditions()[i].target.contains(0)) return Rational(0);
    return Rational(1);
  }

  detail::check_budget(p, forms.size(), coords.size(), alphabet.size(), budget,
                       "satisfying density");
  const auto states = detail::dp_counts_auto(p, alphabet, forms, coords);

  BigInt good = 0;
  std::vector<int> digits(forms.size(), 0);
  for (std::size_t idx = 0; idx < states.size(); ++idx) {
    if (states[idx] != 0) {
      bool ok = true;
      for (std::size_t i = 0; i < group.size() && ok; ++i)
        ok = system.conditions()[group[i]].target.contains(digits[i]);
      if (ok) good += states[idx];
    }
    for (std::size_t i = 0; i < digits.size(); ++i) {
      if (++digits[i] < p.value()) break;
      digits[i] = 0;
    }
  }
  return Rational(good, pow_big(alphabet.size(), coords.size()));
}

}  // namespace detail

// Exact density of {x in S^n : phi_i(x) in E_i for all i}. The incidence
// graph between conditions and coordinates is split into connected
// components; each component runs its own DP and the densities multiply.
inline Rational satisfying_density(const ConditionSystem& system,
                                   std::uint64_t budget = kDefaultBudget) {
  if (system.k() == 0) return Rational(1);
  const auto split = detail::split_components(system);
  Rational density = 1;
  for (const auto& group : split.groups) {
    density *= detail::component_density(system, group, budget);
    if (density == 0) return density;
  }
  return density;
}

// density(system AND extra) / density(system), exact.
inline Rational conditional_density(const ConditionSystem& system, const Condition& extra,
                                    std::uint64_t budget = kDefaultBudget) {
  const Rational base = satisfying_density(system, budget);
  if (base == 0)
    fail(ErrorKind::ConditioningOnNull, "conditioning on a null event");
  auto conditions = system.conditions();
  conditions.push_back(extra);
  const ConditionSystem joint(system.modulus(), system.alphabet(), std::move(conditions));
  return satisfying_density(joint, budget) / base;
}

struct DensityEstimate {
  double estimate = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double hoeffding_99 = 0.0;  // sqrt(ln(2/0.01) / (2 * samples))
};

// Seeded Monte Carlo estimate: x is drawn uniformly from S^(union coords)
// with one bounded draw per coordinate in increasing coordinate order, so the
// estimate is bit-reproducible for a fixed (seed, samples).
inline DensityEstimate mc_density(const ConditionSystem& system, std::uint64_t samples,
                                  std::uint64_t seed) {
  if (samples < 1) fail(ErrorKind::InvalidInput, "mc_density needs samples >= 1");
  const auto coords = system.union_support();
  const auto& letters = system.alphabet().elements();

  // slot index per coordinate for O(1) form evaluation
  std::map<Coord, std::size_t> slot;
  for (std::size_t i = 0; i < coords.size(); ++i) slot[coords[i]] = i;
  struct Term {
    std::size_t slot;
    int coeff;
  };
  std::vector<std::vector<Term>> terms(system.k());
  for (std::size_t i = 0; i < system.k(); ++i)
    for (const auto& [z, c] : system.conditions()[i].form.coeffs())
      terms[i].push_back({slot.at(z), c});

  Xoshiro256StarStar rng(seed);
  const Modulus& p = system.modulus();
  std::vector<int> x(coords.size(), 0);
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (auto& xi : x) xi = letters[rng.below(letters.size())];
    bool ok = true;
    for (std::size_t i = 0; i < system.k() && ok; ++i) {
      std::int64_t acc = 0;
      for (const auto& t : terms[i]) acc += static_cast<std::int64_t>(t.coeff) * x[t.slot];
      ok = system.conditions()[i].target.contains(p.reduce(acc));
    }
    if (ok) ++hits;
  }

  DensityEstimate est;
  est.estimate = static_cast<double>(hits) / static_cast<double>(samples);
  est.samples = samples;
  est.seed = seed;
  est.hoeffding_99 = std::sqrt(std::log(2.0 / 0.01) / (2.0 * static_cast<double>(samples)));
  return est;
}

}  // namespace cubeforms
