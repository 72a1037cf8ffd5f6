#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cubeforms/density.hpp"
#include "cubeforms/error.hpp"
#include "cubeforms/forms.hpp"
#include "cubeforms/fp_core.hpp"
#include "cubeforms/numeric.hpp"

namespace cubeforms {

// Sunflower witness: forms phi_i = center + petal_i for i in member_indices,
// where the petals have pairwise disjoint supports.
struct SunflowerCertificate {
  explicit SunflowerCertificate(Modulus p) : center(p) {}

  LinearForm center;
  std::vector<std::size_t> member_indices;  // into the system's condition list
  std::vector<LinearForm> petals;           // aligned with member_indices
  int min_petal_support = 0;
};

// Separated-subfamily witness: {phi_i : i in member_indices} is r-separated,
// so the subfamily is approximately equidistributed.
struct EquidistributionCertificate {
  std::vector<std::size_t> member_indices;
  int r = 0;                      // separation level the bound uses
  Rational per_tuple_bound;       // p^-|I| + (1 - p^-2)^r
  Rational density_bound;         // (prod |E_i|) * per_tuple_bound
};

// p * (1 - beta(p, S))^|members|: upper bound on the density of the member
// conditions' satisfying set. Requires every petal to carry at least
// max_{i in members} L(S, E_i) coordinates.
inline Rational sunflower_density_bound(const SunflowerCertificate& cert,
                                        const ConditionSystem& system) {
  int l_needed = 0;
  for (std::size_t i : cert.member_indices) {
    if (i >= system.k())
      fail(ErrorKind::InvalidInput, "sunflower member index out of range");
    l_needed = std::max(
        l_needed, compute_L(system.alphabet(), system.conditions()[i].target).L);
  }
  if (cert.min_petal_support < l_needed)
    fail(ErrorKind::PetalTooSmall,
         "petal support " + std::to_string(cert.min_petal_support) +
             " below required L = " + std::to_string(l_needed));
  const Rational decay = 1 - beta(system.modulus(), system.alphabet());
  return system.modulus().value() *
         pow_rational(decay, cert.member_indices.size());
}

struct SunflowerExtraction {
  explicit SunflowerExtraction(Modulus p) : center_offset(p) {}

  LinearForm center_offset;
  std::vector<std::size_t> indices;  // into the input petal list, ascending
  bool meets_target = false;         // found at least t petals
};

namespace detail {

// Greedy maximal subfamily with pairwise disjoint supports, scanning in index
// order. Forms with empty support are disjoint from everything.
inline std::vector<std::size_t> greedy_disjoint(const std::vector<LinearForm>& petals,
                                                const std::vector<std::size_t>& live) {
  std::vector<std::size_t> chosen;
  std::map<Coord, bool> used;
  for (std::size_t idx : live) {
    bool clash = false;
    for (const auto& [z, _] : petals[idx].coeffs()) clash = clash || used.count(z);
    if (clash) continue;
    chosen.push_back(idx);
    for (const auto& [z, _] : petals[idx].coeffs()) used[z] = true;
  }
  return chosen;
}

inline SunflowerExtraction extract_sunflower_impl(const std::vector<LinearForm>& petals,
                                                  const std::vector<std::size_t>& live,
                                                  const Modulus& p, int radius, int t) {
  SunflowerExtraction best(p);
  best.indices = greedy_disjoint(petals, live);
  best.meets_target = static_cast<int>(best.indices.size()) >= t;
  if (best.meets_target) return best;
  if (radius <= 0 || best.indices.size() == live.size()) return best;

  // Pigeonhole step: the most frequent (coordinate, coefficient) pair over
  // the union of the chosen supports identifies a large bucket whose forms
  // agree there; stripping that entry lowers the radius by one.
  std::map<Coord, bool> hub;
  for (std::size_t idx : best.indices)
    for (const auto& [z, _] : petals[idx].coeffs()) hub[z] = true;

  std::map<std::pair<Coord, int>, std::size_t> freq;
  for (std::size_t idx : live)
    for (const auto& [z, c] : petals[idx].coeffs())
      if (hub.count(z)) ++freq[{z, c}];
  if (freq.empty()) return best;

  std::pair<Coord, int> pick = freq.begin()->first;
  std::size_t pick_count = freq.begin()->second;
  for (const auto& [key, count] : freq)
    if (count > pick_count) {  // ties keep the smallest (z, c)
      pick = key;
      pick_count = count;
    }

  const LinearForm strip = LinearForm::monomial(p, pick.first, pick.second);
  std::vector<std::size_t> bucket;
  std::vector<LinearForm> stripped = petals;
  for (std::size_t idx : live)
    if (petals[idx].coeff(pick.first) == pick.second) {
      bucket.push_back(idx);
      stripped[idx] = petals[idx].minus(strip);
    }

  SunflowerExtraction rec = extract_sunflower_impl(stripped, bucket, p, radius - 1, t);
  rec.center_offset = rec.center_offset.plus(strip);
  rec.meets_target = static_cast<int>(rec.indices.size()) >= t;
  if (rec.meets_target || rec.indices.size() > best.indices.size()) return rec;
  return best;
}

}  // namespace detail

// Erdos-Rado style extraction: finds indices I and an offset c such that the
// petals minus c have pairwise disjoint supports. Guaranteed to reach size t
// when every petal has support at most r and there are at least p^r * r! *
// t^r of them; below that threshold the largest sunflower found is returned
// with meets_target = false.
inline SunflowerExtraction extract_sunflower(const std::vector<LinearForm>& petals,
                                             int r, int t) {
  if (petals.empty()) fail(ErrorKind::InvalidInput, "extract_sunflower: no petals");
  const Modulus& p = petals.front().modulus();
  for (const auto& f : petals)
    if (f.support_size() > r)
      fail(ErrorKind::InvalidInput, "extract_sunflower: petal support exceeds radius");
  std::vector<std::size_t> live(petals.size());
  for (std::size_t i = 0; i < live.size(); ++i) live[i] = i;
  auto result = detail::extract_sunflower_impl(petals, live, p, r, t);
  std::sort(result.indices.begin(), result.indices.end());
  return result;
}

struct GreedySubfamily {
  std::vector<std::size_t> members;  // ascending scan order
  bool reached_target = false;       // |members| == u
  // For each unadded index: lexicographically smallest a over `members` with
  // |Z(phi_j - sum a_i phi_i)| <= r - 1. Empty when reached_target.
  std::map<std::size_t, std::vector<int>> witnesses;
};

namespace detail {

// Lexicographically smallest witness of non-addability, or nullopt if form j
// is r-separated from the span basis `members`.
inline std::optional<std::vector<int>> separation_witness(
    const std::vector<LinearForm>& forms, const std::vector<std::size_t>& members,
    std::size_t j, int r) {
  const Modulus& p = forms[j].modulus();
  const int pv = p.value();
  std::vector<int> a(members.size(), 0);
  for (;;) {
    LinearForm comb = forms[j];
    for (std::size_t i = 0; i < members.size(); ++i)
      if (a[i] != 0) comb.add_scaled(forms[members[i]], pv - a[i]);
    if (comb.support_size() <= r - 1) return a;
    // count up in lexicographic order: a[0] is the most significant digit
    std::size_t pos = a.size();
    bool done = true;
    while (pos > 0) {
      --pos;
      if (++a[pos] < pv) {
        done = false;
        break;
      }
      a[pos] = 0;
    }
    if (done) return std::nullopt;
  }
}

}  // namespace detail

// Greedy construction of an r-separated subfamily: scan forms in index order
// and add form j when |Z(phi_j - sum_{i in I} a_i phi_i)| >= r for every a in
// F_p^I (enumerated exhaustively). Stops as soon as |I| = u. On failure the
// maximal family is returned together with, for every unadded form, its
// lexicographically smallest witness vector over the final I.
inline GreedySubfamily greedy_separated_subfamily(const std::vector<LinearForm>& forms,
                                                  int r, int u,
                                                  std::uint64_t enumeration_cap =
                                                      kDefaultEnumerationCap) {
  if (u < 1) fail(ErrorKind::InvalidInput, "greedy_separated_subfamily: u >= 1");
  if (forms.empty()) return {};
  const Modulus& p = forms.front().modulus();
  if (pow_big(p.value(), static_cast<std::uint64_t>(u)) > enumeration_cap)
    fail(ErrorKind::EnumerationTooLarge,
         "greedy subfamily enumeration p^u exceeds cap");

  GreedySubfamily out;
  for (std::size_t j = 0; j < forms.size(); ++j) {
    if (!detail::separation_witness(forms, out.members, j, r).has_value()) {
      out.members.push_back(j);
      if (static_cast<int>(out.members.size()) == u) {
        out.reached_target = true;
        return out;
      }
    }
  }
  // Re-derive witnesses against the final member set.
  for (std::size_t j = 0; j < forms.size(); ++j) {
    if (std::find(out.members.begin(), out.members.end(), j) != out.members.end())
      continue;
    auto w = detail::separation_witness(forms, out.members, j, r);
    if (!w)
      fail(ErrorKind::InvalidInput,
           "internal: rejected form became separated from the final family");
    out.witnesses.emplace(j, std::move(*w));
  }
  return out;
}

// Groups every form by its witness coefficient vector over the maximal
// family; members key to their own unit vector. Each bucket lies inside a
// ball of radius r - 1 around the combination the key describes.
inline std::map<std::vector<int>, std::vector<std::size_t>> ball_cover(
    const std::vector<LinearForm>& forms, const GreedySubfamily& greedy) {
  std::map<std::vector<int>, std::vector<std::size_t>> buckets;
  for (std::size_t pos = 0; pos < greedy.members.size(); ++pos) {
    std::vector<int> key(greedy.members.size(), 0);
    key[pos] = 1;
    buckets[key].push_back(greedy.members[pos]);
  }
  for (const auto& [j, witness] : greedy.witnesses) buckets[witness].push_back(j);
  for (auto& [_, bucket] : buckets) std::sort(bucket.begin(), bucket.end());
  return buckets;
}

// Closed-form density bound for k forms in a radius-r ball:
// p * (1 - beta)^{(k / (p^r r!))^{1/r}}.
inline double balls_density_bound(std::uint64_t k, int r, const Modulus& p,
                                  const Alphabet& S) {
  if (r < 1 || k < 1) fail(ErrorKind::InvalidInput, "balls_density_bound: r, k >= 1");
  double log_denom = r * std::log(static_cast<double>(p.value()));
  for (int i = 2; i <= r; ++i) log_denom += std::log(static_cast<double>(i));
  const double exponent =
      std::exp((std::log(static_cast<double>(k)) - log_denom) / r);
  const double decay = 1.0 - to_double(beta(p, S));
  return p.value() * std::pow(decay, exponent);
}

inline std::optional<Rational> try_exact_density(const ConditionSystem& system,
                                                 std::uint64_t budget) {
  try {
    return satisfying_density(system, budget);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ExactEngineTooLarge) return std::nullopt;
    throw;
  }
}

enum class CertificateKind { Equidistribution, Sunflower };

inline const char* to_string(CertificateKind kind) {
  return kind == CertificateKind::Equidistribution ? "equidistribution" : "sunflower";
}

struct DensityBoundReport {
  explicit DensityBoundReport(Modulus p) : sunflower(p) {}

  CertificateKind kind = CertificateKind::Equidistribution;
  EquidistributionCertificate equidistribution;  // valid when kind matches
  SunflowerCertificate sunflower;                // valid when kind matches
  Rational bound_exact;
  double bound = 1.0;
  int u = 0;
  int r = 0;
  bool trivial = false;      // no usable petals survived; bound forced to 1
  bool best_effort = false;  // extraction ran below its guarantee threshold
  std::vector<std::size_t> dropped;  // indices discarded near a ball center
  std::optional<Rational> exact_density;  // attached when the DP is feasible
};

inline DensityBoundReport certify_density_bound(const ConditionSystem& system, int u,
                                                int r,
                                                std::uint64_t budget = kDefaultBudget);

// Re-validation pass, independent of the pipeline internals: re-checks the
// structural claims of a certificate against the system and recomputes its
// bound. Returns every failed check by name.
struct VerifyResult {
  bool ok = true;
  std::vector<std::string> reasons;
};

struct CertificatePayload {
  CertificateKind kind = CertificateKind::Equidistribution;
  // equidistribution fields
  std::vector<std::size_t> members;
  int r = 0;
  // sunflower fields
  std::optional<LinearForm> center;
  std::vector<LinearForm> petals;
  int min_petal_support = 0;
  // common
  Rational bound;
};

inline VerifyResult verify_certificate(const CertificatePayload& cert,
                                       const ConditionSystem& system) {
  VerifyResult result;
  auto reject = [&result](const std::string& why) {
    result.ok = false;
    result.reasons.push_back(why);
  };

  for (std::size_t i : cert.members)
    if (i >= system.k()) {
      reject("member index out of range");
      return result;
    }

  if (cert.kind == CertificateKind::Equidistribution) {
    if (cert.members.empty()) {
      reject("empty member set");
      return result;
    }
    std::vector<LinearForm> family;
    for (std::size_t i : cert.members) family.push_back(system.conditions()[i].form);
    try {
      if (separation(family) < cert.r) reject("separation below certificate r");
    } catch (const Error& e) {
      reject(std::string("separation re-check failed: ") + e.what());
    }
    const std::int64_t p = system.modulus().value();
    Rational per_tuple = Rational(1, pow_big(p, cert.members.size())) +
                         pow_rational(Rational(p * p - 1, p * p),
                                      static_cast<std::uint64_t>(cert.r));
    Rational expected = per_tuple;
    for (std::size_t i : cert.members)
      expected *= system.conditions()[i].target.size();
    if (expected != cert.bound) reject("bound mismatch");
    return result;
  }

  // Sunflower certificate.
  if (!cert.center.has_value()) {
    reject("missing sunflower center");
    return result;
  }
  if (cert.petals.size() != cert.members.size()) {
    reject("petal/member count mismatch");
    return result;
  }
  std::map<Coord, bool> used;
  int min_support = -1;
  for (std::size_t idx = 0; idx < cert.members.size(); ++idx) {
    const LinearForm& form = system.conditions()[cert.members[idx]].form;
    if (form.minus(*cert.center) != cert.petals[idx]) reject("petal identity");
    for (const auto& [z, _] : cert.petals[idx].coeffs()) {
      if (used.count(z)) reject("petal supports not disjoint");
      used[z] = true;
    }
    const int sup = cert.petals[idx].support_size();
    if (min_support < 0 || sup < min_support) min_support = sup;
    const int need =
        compute_L(system.alphabet(), system.conditions()[cert.members[idx]].target).L;
    if (sup < need) reject("petal support below L(S, E)");
  }
  if (min_support >= 0 && min_support != cert.min_petal_support)
    reject("min petal support mismatch");

  const Rational decay = 1 - beta(system.modulus(), system.alphabet());
  const Rational expected =
      system.modulus().value() * pow_rational(decay, cert.members.size());
  if (expected != cert.bound) reject("bound mismatch");
  return result;
}

inline CertificatePayload to_payload(const DensityBoundReport& report) {
  CertificatePayload payload;
  payload.kind = report.kind;
  payload.bound = report.bound_exact;
  if (report.kind == CertificateKind::Equidistribution) {
    payload.members = report.equidistribution.member_indices;
    payload.r = report.equidistribution.r;
  } else {
    payload.members = report.sunflower.member_indices;
    payload.center = report.sunflower.center;
    payload.petals = report.sunflower.petals;
    payload.min_petal_support = report.sunflower.min_petal_support;
    payload.r = report.r;
  }
  return payload;
}

// End-to-end pipeline. Case A: a greedy r-separated subfamily of size u
// exists, and the equidistribution bound applies to it. Case B: the greedy
// family is maximal below u, so every form lies in one of at most p^|I|
// balls of radius r - 1; the largest bucket is recentered, forms too close
// to the center are dropped (at most one under the main assumption), a
// sunflower is extracted from the petals, small petals are dropped once
// more, and the sunflower product bound applies to the survivors.
inline DensityBoundReport certify_density_bound(const ConditionSystem& system, int u,
                                                int r, std::uint64_t budget) {
  if (u < 1 || r < 1)
    fail(ErrorKind::InvalidInput, "certify_density_bound needs u >= 1 and r >= 1");
  const auto assumption = meets_main_assumption(system);
  if (!assumption.holds)
    fail(ErrorKind::InvalidInput,
         "system does not satisfy the pairwise-distance assumption (min distance " +
             std::to_string(assumption.min_distance) + " < threshold " +
             std::to_string(assumption.threshold) + ")");

  const Modulus& p = system.modulus();
  DensityBoundReport report(p);
  report.u = u;
  report.r = r;

  const auto forms = system.forms();
  const std::int64_t pv = p.value();
  const auto greedy = greedy_separated_subfamily(forms, r, u);

  if (greedy.reached_target) {
    report.kind = CertificateKind::Equidistribution;
    auto& cert = report.equidistribution;
    cert.member_indices = greedy.members;
    cert.r = r;
    cert.per_tuple_bound =
        Rational(1, pow_big(pv, static_cast<std::uint64_t>(u))) +
        pow_rational(Rational(pv * pv - 1, pv * pv), static_cast<std::uint64_t>(r));
    cert.density_bound = cert.per_tuple_bound;
    for (std::size_t i : cert.member_indices)
      cert.density_bound *= system.conditions()[i].target.size();
    report.bound_exact = cert.density_bound;
  } else {
    report.kind = CertificateKind::Sunflower;
    const auto buckets = ball_cover(forms, greedy);
    // Largest bucket; ties resolved by the map's lexicographic key order.
    const std::vector<int>* best_key = nullptr;
    std::size_t best_size = 0;
    for (const auto& [key, bucket] : buckets)
      if (bucket.size() > best_size) {
        best_key = &key;
        best_size = bucket.size();
      }
    std::vector<std::size_t> bucket = buckets.at(*best_key);

    std::vector<LinearForm> member_forms;
    for (std::size_t i : greedy.members) member_forms.push_back(forms[i]);
    const LinearForm bucket_center =
        greedy.members.empty() ? LinearForm(p) : combine(*best_key, member_forms);

    // First drop: forms within distance Lmax - 1 of the bucket center cannot
    // serve as petals; the pairwise-distance assumption leaves at most one.
    const int l_max = assumption.Lmax;
    std::vector<std::size_t> survivors;
    for (std::size_t i : bucket) {
      if (distance(forms[i], bucket_center) < l_max)
        report.dropped.push_back(i);
      else
        survivors.push_back(i);
    }

    if (survivors.empty()) {
      report.trivial = true;
      report.bound_exact = 1;
      report.bound = 1.0;
      report.sunflower.center = bucket_center;
      report.sunflower.min_petal_support = 0;
      if (auto d = try_exact_density(system, budget)) report.exact_density = d;
      return report;
    }

    std::vector<LinearForm> petals;
    petals.reserve(survivors.size());
    int radius = 0;
    for (std::size_t i : survivors) {
      petals.push_back(forms[i].minus(bucket_center));
      radius = std::max(radius, petals.back().support_size());
    }
    // Extraction target from the counting guarantee k >= p^rho * rho! * t^rho.
    int target = 1;
    if (radius > 0) {
      double log_thresh = radius * std::log(static_cast<double>(pv));
      for (int i = 2; i <= radius; ++i) log_thresh += std::log(static_cast<double>(i));
      while (log_thresh + radius * std::log(static_cast<double>(target + 1)) <=
             std::log(static_cast<double>(survivors.size())) + 1e-12)
        ++target;
    } else {
      target = static_cast<int>(survivors.size());
    }

    const auto extraction = extract_sunflower(petals, radius, target);
    report.best_effort = !extraction.meets_target;
    const LinearForm center = bucket_center.plus(extraction.center_offset);

    // Second drop: petals relative to the final center that fall below Lmax.
    auto& cert = report.sunflower;
    cert.center = center;
    cert.min_petal_support = -1;
    for (std::size_t pos : extraction.indices) {
      const std::size_t sys_index = survivors[pos];
      const LinearForm petal = forms[sys_index].minus(center);
      if (petal.support_size() < l_max) {
        report.dropped.push_back(sys_index);
        continue;
      }
      cert.member_indices.push_back(sys_index);
      cert.petals.push_back(petal);
      if (cert.min_petal_support < 0 || petal.support_size() < cert.min_petal_support)
        cert.min_petal_support = petal.support_size();
    }
    if (cert.min_petal_support < 0) cert.min_petal_support = 0;

    if (cert.member_indices.empty()) {
      report.trivial = true;
      report.bound_exact = 1;
    } else {
      report.bound_exact = sunflower_density_bound(cert, system);
    }
  }

  report.bound = to_double(report.bound_exact);
  if (auto d = try_exact_density(system, budget)) report.exact_density = d;
  return report;
}

}  // namespace cubeforms
