#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "cubeforms/error.hpp"
#include "cubeforms/fp_core.hpp"

namespace cubeforms {

using Coord = std::uint32_t;

// Sparse mod-p linear form. Only nonzero coefficients are stored; coordinate
// indices are arbitrary (the ambient dimension n is never fixed).
class LinearForm {
 public:
  explicit LinearForm(Modulus p) : p_(p) {}

  LinearForm(Modulus p, const std::map<Coord, int>& raw) : p_(p) {
    for (const auto& [z, c] : raw) set(z, c);
  }

  static LinearForm monomial(Modulus p, Coord z, int coeff) {
    LinearForm f(p);
    f.set(z, coeff);
    return f;
  }

  const Modulus& modulus() const { return p_; }
  int p() const { return p_.value(); }
  const std::map<Coord, int>& coeffs() const { return coeffs_; }

  int coeff(Coord z) const {
    auto it = coeffs_.find(z);
    return it == coeffs_.end() ? 0 : it->second;
  }

  void set(Coord z, std::int64_t coeff) {
    const int c = p_.reduce(coeff);
    if (c == 0)
      coeffs_.erase(z);
    else
      coeffs_[z] = c;
  }

  void add_scaled(const LinearForm& other, int scale) {
    for (const auto& [z, c] : other.coeffs_)
      set(z, coeff(z) + static_cast<std::int64_t>(scale) * c);
  }

  LinearForm plus(const LinearForm& other) const {
    LinearForm out = *this;
    out.add_scaled(other, 1);
    return out;
  }

  LinearForm minus(const LinearForm& other) const {
    LinearForm out = *this;
    out.add_scaled(other, p_.value() - 1);
    return out;
  }

  LinearForm scaled(int c) const {
    LinearForm out(p_);
    for (const auto& [z, a] : coeffs_) out.set(z, static_cast<std::int64_t>(a) * c);
    return out;
  }

  std::vector<Coord> support() const {
    std::vector<Coord> out;
    out.reserve(coeffs_.size());
    for (const auto& [z, _] : coeffs_) out.push_back(z);
    return out;
  }

  int support_size() const { return static_cast<int>(coeffs_.size()); }
  bool is_zero() const { return coeffs_.empty(); }

  // Evaluate at a point given by coordinate -> value lookup.
  template <class ValueFn>
  int evaluate(ValueFn&& value_at) const {
    std::int64_t acc = 0;
    for (const auto& [z, c] : coeffs_)
      acc += static_cast<std::int64_t>(c) * value_at(z);
    return p_.reduce(acc);
  }

  friend bool operator==(const LinearForm& a, const LinearForm& b) {
    return a.p_ == b.p_ && a.coeffs_ == b.coeffs_;
  }
  friend bool operator!=(const LinearForm& a, const LinearForm& b) { return !(a == b); }
  friend bool operator<(const LinearForm& a, const LinearForm& b) {
    return a.coeffs_ < b.coeffs_;
  }

 private:
  Modulus p_;
  std::map<Coord, int> coeffs_;
};

struct Condition {
  Condition(LinearForm f, TargetSet e) : form(std::move(f)), target(std::move(e)) {
    if (form.modulus() != target.modulus())
      fail(ErrorKind::InvalidInput, "condition form and target moduli differ");
  }

  LinearForm form;
  TargetSet target;

  friend bool operator==(const Condition& a, const Condition& b) {
    return a.form == b.form && a.target == b.target;
  }
};

// An ordered conjunction of conditions phi_i(x) in E_i over the cube S^n.
// Duplicates are allowed; rejecting them would silently change densities.
class ConditionSystem {
 public:
  ConditionSystem(Modulus p, Alphabet s, std::vector<Condition> conditions)
      : p_(p), alphabet_(std::move(s)), conditions_(std::move(conditions)) {
    if (alphabet_.modulus() != p_)
      fail(ErrorKind::InvalidInput, "alphabet modulus mismatch");
    for (const auto& c : conditions_)
      if (c.form.modulus() != p_)
        fail(ErrorKind::InvalidInput, "condition modulus mismatch");
  }

  const Modulus& modulus() const { return p_; }
  const Alphabet& alphabet() const { return alphabet_; }
  const std::vector<Condition>& conditions() const { return conditions_; }
  std::size_t k() const { return conditions_.size(); }

  std::vector<LinearForm> forms() const {
    std::vector<LinearForm> out;
    out.reserve(conditions_.size());
    for (const auto& c : conditions_) out.push_back(c.form);
    return out;
  }

  // Sorted union of the supports of all forms.
  std::vector<Coord> union_support() const {
    std::map<Coord, bool> seen;
    for (const auto& c : conditions_)
      for (const auto& [z, _] : c.form.coeffs()) seen[z] = true;
    std::vector<Coord> out;
    out.reserve(seen.size());
    for (const auto& [z, _] : seen) out.push_back(z);
    return out;
  }

  friend bool operator==(const ConditionSystem& a, const ConditionSystem& b) {
    return a.p_ == b.p_ && a.alphabet_ == b.alphabet_ && a.conditions_ == b.conditions_;
  }

 private:
  Modulus p_;
  Alphabet alphabet_;
  std::vector<Condition> conditions_;
};

inline std::vector<Coord> support(const LinearForm& f) { return f.support(); }

// Coefficient-wise combination sum_i coeffs[i] * forms[i].
inline LinearForm combine(const std::vector<int>& coeffs,
                          const std::vector<LinearForm>& forms) {
  if (coeffs.size() != forms.size())
    fail(ErrorKind::InvalidInput, "combine: coefficient/form count mismatch");
  if (forms.empty()) fail(ErrorKind::InvalidInput, "combine: empty family");
  LinearForm out(forms.front().modulus());
  for (std::size_t i = 0; i < forms.size(); ++i) {
    if (forms[i].modulus() != out.modulus())
      fail(ErrorKind::InvalidInput, "combine: modulus mismatch");
    out.add_scaled(forms[i], out.modulus().reduce(coeffs[i]));
  }
  return out;
}

// Support distance |Z(phi - psi)|.
inline int distance(const LinearForm& a, const LinearForm& b) {
  if (a.modulus() != b.modulus())
    fail(ErrorKind::InvalidInput, "distance: modulus mismatch");
  return a.minus(b).support_size();
}

inline int pairwise_min_distance(const ConditionSystem& system) {
  const auto& conds = system.conditions();
  if (conds.size() < 2)
    fail(ErrorKind::InvalidInput, "pairwise distance needs at least 2 conditions");
  int best = -1;
  for (std::size_t i = 0; i < conds.size(); ++i)
    for (std::size_t j = i + 1; j < conds.size(); ++j) {
      const int d = distance(conds[i].form, conds[j].form);
      if (best < 0 || d < best) best = d;
    }
  return best;
}

inline constexpr std::uint64_t kDefaultEnumerationCap = 2'000'000;

// Exact separation: min over nonzero coefficient vectors of the support size
// of the combination. Enumeration is projective (first nonzero coefficient
// normalized to 1), visiting (p^k - 1)/(p - 1) vectors in a fixed order.
inline int separation(const std::vector<LinearForm>& forms,
                      std::uint64_t enumeration_cap = kDefaultEnumerationCap) {
  if (forms.empty()) fail(ErrorKind::InvalidInput, "separation: empty family");
  const Modulus p = forms.front().modulus();
  const std::size_t k = forms.size();

  BigInt combos = (pow_big(p.value(), k) - 1) / (p.value() - 1);
  if (combos > enumeration_cap)
    fail(ErrorKind::EnumerationTooLarge,
         "separation needs " + combos.str() + " projective combinations (cap " +
             std::to_string(enumeration_cap) + ")");

  int best = -1;
  std::vector<int> a(k, 0);
  for (std::size_t lead = 0; lead < k; ++lead) {
    std::fill(a.begin(), a.end(), 0);
    a[lead] = 1;
    // Odometer over the digits after `lead`, rightmost fastest.
    for (;;) {
      const int sup = combine(a, forms).support_size();
      if (best < 0 || sup < best) best = sup;
      std::size_t pos = k;
      bool carried_out = true;
      while (pos > lead + 1) {
        --pos;
        if (++a[pos] < p.value()) {
          carried_out = false;
          break;
        }
        a[pos] = 0;
      }
      if (carried_out) break;
    }
  }
  return best;
}

struct AssumptionReport {
  bool holds = false;
  int threshold = 0;     // 2 * Lmax - 1
  int Lmax = 0;          // max_t L(S, E_t)
  int min_distance = -1; // -1 when fewer than 2 conditions
};

// Checks the separated-differences hypothesis: every pair of distinct forms
// must differ in at least 2*Lmax - 1 coordinates.
inline AssumptionReport meets_main_assumption(const ConditionSystem& system) {
  if (system.k() < 1)
    fail(ErrorKind::InvalidInput, "assumption check needs at least 1 condition");
  AssumptionReport report;
  for (const auto& cond : system.conditions()) {
    const int l = compute_L(system.alphabet(), cond.target).L;
    report.Lmax = std::max(report.Lmax, l);
  }
  report.threshold = 2 * report.Lmax - 1;
  if (system.k() < 2) {
    report.holds = true;
  } else {
    report.min_distance = pairwise_min_distance(system);
    report.holds = report.min_distance >= report.threshold;
  }
  return report;
}

}  // namespace cubeforms
