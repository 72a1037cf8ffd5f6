#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "cubeforms/constructions.hpp"
#include "cubeforms/density.hpp"
#include "cubeforms/forms.hpp"
#include "cubeforms/fourier.hpp"
#include "cubeforms/fp_core.hpp"
#include "cubeforms/io.hpp"
#include "cubeforms/numeric.hpp"
#include "cubeforms/rng.hpp"
#include "cubeforms/structure.hpp"

namespace cubeforms::suite {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  double time_budget = 0.0;
  std::string detail;
};

namespace detail {

using cubeforms::detail::int_str;

inline std::vector<int> random_subset(Xoshiro256StarStar& rng, int p, int min_size,
                                      int max_size) {
  const int size = min_size + static_cast<int>(rng.below(max_size - min_size + 1));
  std::vector<int> pool(p);
  for (int i = 0; i < p; ++i) pool[i] = i;
  for (int i = p - 1; i > 0; --i)
    std::swap(pool[i], pool[rng.below(static_cast<std::uint64_t>(i) + 1)]);
  pool.resize(size);
  std::sort(pool.begin(), pool.end());
  return pool;
}

// Family that is r-separated by construction: every form owns a private
// block of r coordinates with nonzero coefficients, plus a few shared
// coordinates with arbitrary coefficients.
inline std::vector<LinearForm> random_separated_family(Xoshiro256StarStar& rng,
                                                       const Modulus& p, int k, int r,
                                                       int shared) {
  std::vector<LinearForm> forms;
  const Coord shared_base = 0;
  const Coord private_base = static_cast<Coord>(shared);
  for (int i = 0; i < k; ++i) {
    LinearForm f(p);
    for (int j = 0; j < shared; ++j)
      f.set(shared_base + static_cast<Coord>(j),
            static_cast<int>(rng.below(p.value())));
    for (int j = 0; j < r; ++j)
      f.set(private_base + static_cast<Coord>(i * r + j),
            1 + static_cast<int>(rng.below(p.value() - 1)));
    forms.push_back(f);
  }
  return forms;
}

}  // namespace detail

// Criterion 1: L(S, E) satisfies its Cauchy-Davenport inequality for every
// alphabet/target pair over p in {3, 5, 7}, matches the closed form on
// interval pairs, and returns a valid witness tuple.
inline CriterionResult criterion_l_exactness() {
  CriterionResult result{1, "L-constant exactness (exhaustive p in {3,5,7})", true, 0, 10.0, ""};
  std::uint64_t pairs = 0;
  for (int p_value : {3, 5, 7}) {
    const Modulus p(p_value);
    const Mask full = p.full_mask();
    for (Mask smask = 0; smask <= full && result.pass; ++smask) {
      const auto s_elems = mask_to_set(smask, p);
      if (s_elems.size() < 2) continue;
      const Alphabet S(p, s_elems);
      for (Mask emask = 0; emask <= full && result.pass; ++emask) {
        if (emask == full) continue;
        const TargetSet E(p, mask_to_set(emask, p));
        const LWitness lw = compute_L(S, E);
        ++pairs;

        // inequality chain: L <= floor((|E|-1)/(|S|-1)) + 1 <= |E| (for |E| >= 1)
        const int esize = E.size();
        const int expected_bound =
            esize == 0 ? 0
                       : static_cast<int>(floor_div(esize - 1, S.size() - 1)) + 1;
        if (lw.bound != expected_bound || lw.L > lw.bound) {
          result.pass = false;
          result.detail = "L exceeded its bound";
          break;
        }
        if (esize >= 1 && lw.bound > esize) {
          result.pass = false;
          result.detail = "bound exceeded |E|";
          break;
        }

        // witness validity: tuple has length max(L-1, 0) and its iterated
        // sumset stays inside E
        if (static_cast<int>(lw.tuple.size()) != std::max(lw.L - 1, 0)) {
          result.pass = false;
          result.detail = "witness length mismatch";
          break;
        }
        Mask acc = 1;
        bool valid_tuple = true;
        for (int a : lw.tuple) {
          valid_tuple = valid_tuple && a >= 1 && a < p_value;
          acc = sumset_mask(acc, dilate_mask(S.mask(), a, p), p);
        }
        if (!valid_tuple || (lw.L >= 1 && (acc & ~E.mask()) != 0)) {
          result.pass = false;
          result.detail = "witness sumset escapes E";
          break;
        }
      }
    }
    // interval pairs: S = {0..s-1}, E = {0..e-1}
    for (int s = 2; s <= p_value && result.pass; ++s) {
      std::vector<int> s_elems(s);
      for (int i = 0; i < s; ++i) s_elems[i] = i;
      const Alphabet S(p, s_elems);
      for (int e = 1; e <= p_value - 1; ++e) {
        std::vector<int> e_elems(e);
        for (int i = 0; i < e; ++i) e_elems[i] = i;
        const int expected = static_cast<int>(floor_div(e - 1, s - 1)) + 1;
        const LWitness lw = compute_L(S, TargetSet(p, e_elems));
        if (lw.L != expected) {
          result.pass = false;
          result.detail = "interval pair (p=" + std::to_string(p_value) +
                          ", s=" + std::to_string(s) + ", e=" + std::to_string(e) +
                          ") gave L=" + std::to_string(lw.L) + ", expected " +
                          std::to_string(expected);
          break;
        }
      }
    }
  }
  if (result.pass) result.detail = std::to_string(pairs) + " (S, E) pairs checked";
  return result;
}

// Criterion 2: 500 random separated systems; exact deviation from uniform
// stays below (1 - p^-2)^r, with the exact rational on the left.
inline CriterionResult criterion_equidistribution() {
  CriterionResult result{2, "equidistribution bound on 500 random separated systems",
                         true, 0, 60.0, ""};
  Xoshiro256StarStar rng(20240211);
  int violations = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int p_value = trial % 2 == 0 ? 3 : 5;
    const Modulus p(p_value);
    const int k = 1 + static_cast<int>(rng.below(4));
    const int r = 1 + static_cast<int>(rng.below(3));
    const int shared = static_cast<int>(rng.below(3));
    const Alphabet S(p, detail::random_subset(rng, p_value, 2, p_value));
    const auto forms = detail::random_separated_family(rng, p, k, r, shared);
    std::vector<int> y(k);
    for (auto& yi : y) yi = static_cast<int>(rng.below(p_value));

    const auto report = equidistribution_check(forms, y, S);
    const std::int64_t pv = p_value;
    const Rational stated_bound = pow_rational(Rational(pv * pv - 1, pv * pv),
                                               static_cast<std::uint64_t>(r));
    if (!report.holds || report.separation < r || report.deviation > stated_bound)
      ++violations;
  }
  result.pass = violations == 0;
  result.detail = std::to_string(violations) + " violations in 500 trials";
  return result;
}

// Criterion 3: exhaustive single-form dichotomy: every nonzero point
// probability is at least beta(p, S).
inline CriterionResult criterion_dichotomy() {
  CriterionResult result{3, "nonzero-probability floor beta(p,S), exhaustive support <= 6",
                         true, 0, 30.0, ""};
  std::uint64_t forms_checked = 0;
  for (int p_value : {3, 5}) {
    const Modulus p(p_value);
    for (const auto& s_elems : {std::vector<int>{0, 1}, std::vector<int>{0, 1, 2}}) {
      const Alphabet S(p, s_elems);
      const Rational floor_value = beta(p, S);
      for (int sup = 0; sup <= 6 && result.pass; ++sup) {
        // all coefficient vectors over the fixed support {0..sup-1}
        std::vector<int> coeff(sup, 1);
        for (;;) {
          LinearForm f(p);
          for (int i = 0; i < sup; ++i) f.set(static_cast<Coord>(i), coeff[i]);
          const auto dist = marginal_distribution(f, S);
          ++forms_checked;
          for (int y = 0; y < p_value; ++y) {
            const Rational prob = dist.probability({y});
            if (prob != 0 && prob < floor_value) {
              result.pass = false;
              result.detail = "probability below beta at p=" + std::to_string(p_value);
              break;
            }
          }
          if (!result.pass || sup == 0) break;
          std::size_t pos = 0;
          while (pos < coeff.size()) {
            if (++coeff[pos] < p_value) break;
            coeff[pos] = 1;
            ++pos;
          }
          if (pos == coeff.size()) break;
        }
      }
    }
  }
  if (result.pass)
    result.detail = std::to_string(forms_checked) + " forms, all values checked";
  return result;
}

// Criterion 4: the exact probability equals the averaged Fourier expansion
// within 1e-9 on 200 random small systems.
inline CriterionResult criterion_fourier_inversion() {
  CriterionResult result{4, "Fourier inversion on 200 random systems", true, 0, 30.0, ""};
  Xoshiro256StarStar rng(777001);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int p_value = trial % 2 == 0 ? 3 : 5;
    const Modulus p(p_value);
    const int k = 1 + static_cast<int>(rng.below(3));
    const Alphabet S(p, detail::random_subset(rng, p_value, 2, p_value));
    std::vector<LinearForm> forms;
    for (int i = 0; i < k; ++i) {
      LinearForm f(p);
      const int sup = static_cast<int>(rng.below(5));
      for (int j = 0; j < sup; ++j)
        f.set(static_cast<Coord>(rng.below(8)),
              1 + static_cast<int>(rng.below(p_value - 1)));
      forms.push_back(f);
    }
    std::vector<int> y(k);
    for (auto& yi : y) yi = static_cast<int>(rng.below(p_value));

    std::vector<Condition> conditions;
    for (int i = 0; i < k; ++i)
      conditions.emplace_back(forms[i], TargetSet(p, {y[i]}));
    const Rational exact =
        satisfying_density(ConditionSystem(p, S, std::move(conditions)));
    const auto averaged = fourier_average(forms, y, S);
    const double err = std::max(std::abs(averaged.real() - to_double(exact)),
                                std::abs(averaged.imag()));
    worst = std::max(worst, err);
  }
  result.pass = worst <= 1e-9;
  result.detail = "max |P - E_a F(a)| = " + decimal_string(worst);
  return result;
}

// Criterion 5: sunflower product bound dominates the exact density on 100
// random sunflower fixtures.
inline CriterionResult criterion_sunflower_dominance() {
  CriterionResult result{5, "sunflower bound dominance on 100 fixtures", true, 0, 60.0, ""};
  Xoshiro256StarStar rng(555111);
  for (int trial = 0; trial < 100 && result.pass; ++trial) {
    const int p_value = trial % 2 == 0 ? 3 : 5;
    const Modulus p(p_value);
    const Alphabet S(p, trial % 4 < 2 ? std::vector<int>{0, 1}
                                      : detail::random_subset(rng, p_value, 2, 3));
    const int k = 1 + static_cast<int>(rng.below(p_value == 3 ? 7 : 4));

    std::vector<TargetSet> targets;
    int l_max = 0;
    for (int i = 0; i < k; ++i) {
      targets.emplace_back(p, detail::random_subset(rng, p_value, 1, p_value - 1));
      l_max = std::max(l_max, compute_L(S, targets.back()).L);
    }

    // center on low coordinates, petals on disjoint blocks above it
    LinearForm center(p);
    const int center_sup = static_cast<int>(rng.below(4));
    for (int j = 0; j < center_sup; ++j)
      center.set(static_cast<Coord>(rng.below(6)),
                 1 + static_cast<int>(rng.below(p_value - 1)));

    SunflowerCertificate cert(p);
    cert.center = center;
    std::vector<Condition> conditions;
    const int width = std::max(l_max, 1) + static_cast<int>(rng.below(2));
    Coord next = 100;
    cert.min_petal_support = -1;
    for (int i = 0; i < k; ++i) {
      LinearForm petal(p);
      for (int j = 0; j < width; ++j)
        petal.set(next++, 1 + static_cast<int>(rng.below(p_value - 1)));
      cert.member_indices.push_back(i);
      cert.petals.push_back(petal);
      if (cert.min_petal_support < 0 || petal.support_size() < cert.min_petal_support)
        cert.min_petal_support = petal.support_size();
      conditions.emplace_back(center.plus(petal), targets[i]);
    }
    const ConditionSystem system(p, S, std::move(conditions));

    const Rational bound = sunflower_density_bound(cert, system);
    const Rational exact = satisfying_density(system);
    if (exact > bound) {
      result.pass = false;
      result.detail = "exact density exceeded the sunflower bound at trial " +
                      std::to_string(trial);
    }
  }
  if (result.pass) result.detail = "100 fixtures dominated";
  return result;
}

// Criterion 6: at the counting threshold k = p^r r! t^r the extractor always
// reaches t petals and the resulting certificate re-verifies.
inline CriterionResult criterion_extraction_guarantee() {
  CriterionResult result{6, "sunflower extraction guarantee at threshold", true, 0,
                         120.0, ""};
  Xoshiro256StarStar rng(909090);
  const Modulus p(3);
  const Alphabet S(p, {0, 1});
  for (int r : {1, 2}) {
    for (int t : {2, 3}) {
      std::uint64_t k = 1;
      for (int i = 0; i < r; ++i) k *= 3;
      for (int i = 2; i <= r; ++i) k *= static_cast<std::uint64_t>(i);
      for (int i = 0; i < r; ++i) k *= static_cast<std::uint64_t>(t);

      for (int trial = 0; trial < 50 && result.pass; ++trial) {
        const int pool = 3 * r * t + 2;
        std::vector<LinearForm> petals;
        for (std::uint64_t i = 0; i < k; ++i) {
          LinearForm f(p);
          const int sup = 1 + static_cast<int>(rng.below(r));
          while (f.support_size() < sup)
            f.set(static_cast<Coord>(rng.below(pool)), 1 + static_cast<int>(rng.below(2)));
          petals.push_back(f);
        }
        const auto extraction = extract_sunflower(petals, r, t);
        if (!extraction.meets_target ||
            static_cast<int>(extraction.indices.size()) < t) {
          result.pass = false;
          result.detail = "extraction fell short at r=" + std::to_string(r) +
                          ", t=" + std::to_string(t);
          break;
        }

        // package as a certificate over the petal system and re-verify
        std::vector<Condition> conditions;
        const TargetSet E(p, {1});  // L(S, {1}) = 0: no petal-size obligation
        for (const auto& f : petals) conditions.emplace_back(f, E);
        const ConditionSystem system(p, S, std::move(conditions));

        CertificatePayload payload;
        payload.kind = CertificateKind::Sunflower;
        payload.center = extraction.center_offset;
        payload.r = r;
        int min_sup = -1;
        for (std::size_t idx : extraction.indices) {
          payload.members.push_back(idx);
          payload.petals.push_back(petals[idx].minus(extraction.center_offset));
          const int sup = payload.petals.back().support_size();
          if (min_sup < 0 || sup < min_sup) min_sup = sup;
        }
        payload.min_petal_support = std::max(min_sup, 0);
        payload.bound =
            p.value() * pow_rational(1 - beta(p, S), payload.members.size());
        const auto verify = verify_certificate(payload, system);
        if (!verify.ok) {
          result.pass = false;
          result.detail = "extracted certificate failed verification: " +
                          (verify.reasons.empty() ? "?" : verify.reasons.front());
        }
      }
    }
  }
  if (result.pass) result.detail = "200 extractions at threshold, all verified";
  return result;
}

// Criterion 7: on 300 random systems satisfying the pairwise-distance
// assumption, the certified bound dominates the exact density and every
// emitted certificate re-verifies.
inline CriterionResult criterion_pipeline_soundness() {
  CriterionResult result{7, "certificate pipeline soundness on 300 systems", true, 0,
                         600.0, ""};
  Xoshiro256StarStar rng(424242);
  for (int trial = 0; trial < 300 && result.pass; ++trial) {
    const int p_value = trial % 3 == 2 ? 5 : 3;
    const Modulus p(p_value);
    const Alphabet S(p, detail::random_subset(rng, p_value, 2, 3));
    const int k = 2 + static_cast<int>(rng.below(p_value == 3 ? 9 : 5));

    std::vector<TargetSet> targets;
    int l_max = 0;
    for (int i = 0; i < k; ++i) {
      targets.emplace_back(p, detail::random_subset(rng, p_value, 1, p_value - 1));
      l_max = std::max(l_max, compute_L(S, targets.back()).L);
    }

    // private blocks of width Lmax guarantee pairwise distance >= 2 Lmax
    const int width = std::max(l_max, 1);
    const int shared = static_cast<int>(rng.below(3));
    std::vector<Condition> conditions;
    for (int i = 0; i < k; ++i) {
      LinearForm f(p);
      for (int j = 0; j < shared; ++j)
        f.set(static_cast<Coord>(j), static_cast<int>(rng.below(p_value)));
      for (int j = 0; j < width; ++j)
        f.set(static_cast<Coord>(10 + i * width + j),
              1 + static_cast<int>(rng.below(p_value - 1)));
      conditions.emplace_back(f, targets[i]);
    }
    const ConditionSystem system(p, S, std::move(conditions));
    if (!meets_main_assumption(system).holds) {
      result.pass = false;
      result.detail = "generator produced a system violating the assumption";
      break;
    }

    const int u = 2 + static_cast<int>(rng.below(2));
    const int r = 1 + static_cast<int>(rng.below(l_max + 2));
    const auto report = certify_density_bound(system, u, r);
    const Rational exact =
        report.exact_density ? *report.exact_density : satisfying_density(system);
    if (exact > report.bound_exact) {
      result.pass = false;
      result.detail = "bound fell below the exact density at trial " +
                      std::to_string(trial);
      break;
    }
    const auto verify =
        verify_certificate_document(to_document(report, p_value), system);
    if (!verify.ok) {
      result.pass = false;
      result.detail = "pipeline certificate failed verification at trial " +
                      std::to_string(trial) + ": " +
                      (verify.reasons.empty() ? "?" : verify.reasons.front());
    }
  }
  if (result.pass) result.detail = "300 systems: bound >= exact and certificates verify";
  return result;
}

// Criterion 8: the generated example constructions verify all their claims,
// including the frozen 16/19 conditional ratio and the tightness distances.
inline CriterionResult criterion_construction_battery() {
  CriterionResult result{8, "construction battery", true, 0, 120.0, ""};
  std::ostringstream why;

  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) {
      result.pass = false;
      why << (why.tellp() > 0 ? "; " : "") << what;
    }
  };

  for (int p_value : {3, 5})
    for (int r = 1; r <= 4; ++r) {
      const auto report = gen_example2(p_value, r);
      expect(report.all_checked(),
             "example2(p=" + std::to_string(p_value) + ",r=" + std::to_string(r) +
                 ") left claims unchecked");
    }

  {
    const auto report = gen_example3(3, 2, 4, 0);
    expect(report.all_checked(), "example3 claims unchecked");
    expect(report.parameters.at("ratio") == "16/19",
           "example3 ratio was " + report.parameters.at("ratio") + ", expected 16/19");
  }

  {
    const auto report = gen_example4(3, 2, 64, 7);
    expect(report.all_checked(), "example4 claims unchecked");
  }

  {
    const auto report = gen_tightness(5, {0, 1}, {0, 1, 2}, 4);
    expect(report.all_checked(), "tightness claims unchecked");
    expect(report.parameters.at("L") == "3", "tightness L != 3");
  }

  {
    const auto report = gen_span_family(3, 2, 2);
    expect(report.all_checked(), "span family claims unchecked");
  }

  {
    const auto report = gen_example1(3, 2);
    expect(report.all_checked(), "example1 claims unchecked");
  }

  result.detail = result.pass ? "all construction claims verified" : why.str();
  return result;
}

// Criterion 9: the Monte Carlo engine lands inside its 99% Hoeffding
// interval on at least 48 of 50 seeded runs against known exact densities.
inline CriterionResult criterion_mc_calibration() {
  CriterionResult result{9, "Monte Carlo calibration, 50 seeded runs", true, 0,
                         120.0, ""};
  Xoshiro256StarStar rng(31337);
  int within = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int p_value = trial % 2 == 0 ? 3 : 5;
    const Modulus p(p_value);
    const Alphabet S(p, detail::random_subset(rng, p_value, 2, 3));
    const int k = 1 + static_cast<int>(rng.below(4));
    std::vector<Condition> conditions;
    for (int i = 0; i < k; ++i) {
      LinearForm f(p);
      const int sup = 1 + static_cast<int>(rng.below(4));
      for (int j = 0; j < sup; ++j)
        f.set(static_cast<Coord>(rng.below(10)),
              1 + static_cast<int>(rng.below(p_value - 1)));
      conditions.emplace_back(
          f, TargetSet(p, detail::random_subset(rng, p_value, 1, p_value - 1)));
    }
    const ConditionSystem system(p, S, std::move(conditions));
    const double exact = to_double(satisfying_density(system));
    const auto estimate = mc_density(system, 10'000, 1000 + trial);
    if (std::abs(estimate.estimate - exact) <= estimate.hoeffding_99) ++within;
  }
  result.pass = within >= 48;
  result.detail = std::to_string(within) + "/50 runs within the Hoeffding interval";
  return result;
}

// Fixture battery: parse every fixture named in the manifest, check the
// canonical serialization byte-for-byte, and recompute the expected values.
inline std::vector<CriterionResult> run_fixture_checks(const std::string& fixtures_dir) {
  std::vector<CriterionResult> results;
  const std::string manifest_path = fixtures_dir + "/manifest.json";
  CriterionResult manifest_result{0, "fixtures: manifest", true, 0, 30.0, ""};
  Json manifest;
  try {
    manifest = parse_json_text(read_file(manifest_path));
  } catch (const Error& e) {
    manifest_result.pass = false;
    manifest_result.detail = e.what();
    results.push_back(manifest_result);
    return results;
  }
  manifest_result.detail = manifest_path;
  results.push_back(manifest_result);

  for (const auto& entry : manifest.at("fixtures")) {
    const std::string file = entry.at("file").get<std::string>();
    CriterionResult r{0, "fixture: " + file, true, 0, 30.0, ""};
    try {
      const std::string text = read_file(fixtures_dir + "/" + file);
      const auto doc = parse_json_text(text);
      const auto system = system_from_json(doc);

      std::string trimmed = text;
      while (!trimmed.empty() && (trimmed.back() == '\n' || trimmed.back() == '\r'))
        trimmed.pop_back();
      if (dump_canonical(system_to_json(system)) != trimmed)
        fail(ErrorKind::InvalidInput, "fixture is not in canonical form");

      if (entry.contains("density")) {
        const Rational expected = parse_fraction(entry.at("density").get<std::string>());
        const Rational actual = satisfying_density(system);
        if (actual != expected)
          fail(ErrorKind::InvalidInput, "density " + to_fraction_string(actual) +
                                            " != expected " + to_fraction_string(expected));
      }
      if (entry.contains("assumption_holds")) {
        if (meets_main_assumption(system).holds != entry.at("assumption_holds").get<bool>())
          fail(ErrorKind::InvalidInput, "assumption flag mismatch");
      }
      r.detail = "ok";
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = e.what();
    }
    results.push_back(r);
  }
  return results;
}

inline CriterionResult run_criterion(int id) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  CriterionResult result;
  switch (id) {
    case 1: result = criterion_l_exactness(); break;
    case 2: result = criterion_equidistribution(); break;
    case 3: result = criterion_dichotomy(); break;
    case 4: result = criterion_fourier_inversion(); break;
    case 5: result = criterion_sunflower_dominance(); break;
    case 6: result = criterion_extraction_guarantee(); break;
    case 7: result = criterion_pipeline_soundness(); break;
    case 8: result = criterion_construction_battery(); break;
    case 9: result = criterion_mc_calibration(); break;
    default: fail(ErrorKind::InvalidInput, "unknown criterion id");
  }
  result.seconds =
      std::chrono::duration<double>(Clock::now() - start).count();
  if (result.seconds > result.time_budget) {
    result.pass = false;
    result.detail += " [exceeded time budget]";
  }
  return result;
}

inline std::vector<CriterionResult> run_all(const std::string& fixtures_dir) {
  std::vector<CriterionResult> results;
  for (int id = 1; id <= 9; ++id) results.push_back(run_criterion(id));
  if (!fixtures_dir.empty()) {
    const auto fixture_results = run_fixture_checks(fixtures_dir);
    results.insert(results.end(), fixture_results.begin(), fixture_results.end());
  }
  return results;
}

}  // namespace cubeforms::suite
