#include <catch2/catch_amalgamated.hpp>

#include "cubeforms/cubeforms.hpp"
#include "test_util.hpp"

using namespace cubeforms;

namespace {

LinearForm make(const Modulus& p, std::initializer_list<std::pair<Coord, int>> entries) {
  LinearForm f(p);
  for (const auto& [z, c] : entries) f.set(z, c);
  return f;
}

// singleton-petal sunflower system: conditions x_i in {0} for i < k
ConditionSystem singleton_system(const Modulus& p, const Alphabet& S, int k) {
  std::vector<Condition> conditions;
  for (int i = 0; i < k; ++i)
    conditions.emplace_back(LinearForm::monomial(p, static_cast<Coord>(i), 1),
                            TargetSet(p, {0}));
  return ConditionSystem(p, S, std::move(conditions));
}

}  // namespace

TEST_CASE("sunflower bound dominates singleton fixtures", "[structure]") {
  const Modulus p(3);
  const Alphabet S(p, {0, 1});
  for (int k = 1; k <= 8; ++k) {
    const auto sys = singleton_system(p, S, k);
    SunflowerCertificate cert(p);
    cert.min_petal_support = 1;
    for (int i = 0; i < k; ++i) {
      cert.member_indices.push_back(i);
      cert.petals.push_back(LinearForm::monomial(p, static_cast<Coord>(i), 1));
    }
    const Rational bound = sunflower_density_bound(cert, sys);
    CHECK(bound == 3 * pow_rational(Rational(3, 4), static_cast<std::uint64_t>(k)));
    const Rational exact = satisfying_density(sys);
    CHECK(exact == Rational(1, pow_big(2, static_cast<std::uint64_t>(k))));
    CHECK(exact <= bound);
  }
}

TEST_CASE("sunflower bound edge cases", "[structure]") {
  const Modulus p(3);
  const Alphabet S(p, {0, 1});
  const auto sys = singleton_system(p, S, 2);

  SunflowerCertificate empty(p);
  CHECK(sunflower_density_bound(empty, sys) == 3);  // empty product, bound p

  // a petal smaller than L(S, E) is rejected
  SunflowerCertificate bad(p);
  bad.member_indices = {0};
  bad.petals = {LinearForm(p)};
  bad.min_petal_support = 0;
  CHECK_THROWS_AS(sunflower_density_bound(bad, sys), Error);
}

TEST_CASE("extraction on already-disjoint petals", "[structure]") {
  const Modulus p(3);
  std::vector<LinearForm> petals;
  for (int i = 0; i < 6; ++i)
    petals.push_back(LinearForm::monomial(p, static_cast<Coord>(i), 1));
  const auto got = extract_sunflower(petals, 1, 2);
  CHECK(got.meets_target);
  CHECK(got.indices.size() == 6);
  CHECK(got.center_offset.is_zero());
}

TEST_CASE("extraction strips identical petals to a degenerate sunflower",
          "[structure]") {
  const Modulus p(3);
  const LinearForm shared = make(p, {{0, 1}, {1, 2}});
  std::vector<LinearForm> petals(5, shared);
  const auto got = extract_sunflower(petals, 2, 4);
  CHECK(got.meets_target);
  CHECK(got.indices.size() == 5);
  CHECK(got.center_offset == shared);
  for (std::size_t idx : got.indices)
    CHECK(petals[idx].minus(got.center_offset).is_zero());
}

TEST_CASE("extraction radius-zero base case and input validation", "[structure]") {
  const Modulus p(3);
  std::vector<LinearForm> zeros(4, LinearForm(p));
  const auto got = extract_sunflower(zeros, 0, 3);
  CHECK(got.meets_target);
  CHECK(got.indices.size() == 4);
  CHECK(got.center_offset.is_zero());

  std::vector<LinearForm> too_wide{make(p, {{0, 1}, {1, 1}})};
  CHECK_THROWS_AS(extract_sunflower(too_wide, 1, 1), Error);
}

TEST_CASE("extraction guarantee at a small threshold", "[structure]") {
  // r = 1, t = 2: the guarantee kicks in at k = 3 * 1 * 2 = 6
  Xoshiro256StarStar rng(60601);
  const Modulus p(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<LinearForm> petals;
    for (int i = 0; i < 6; ++i)
      petals.push_back(LinearForm::monomial(
          p, static_cast<Coord>(rng.below(5)), 1 + static_cast<int>(rng.below(2))));
    const auto got = extract_sunflower(petals, 1, 2);
    CHECK(got.meets_target);
    CHECK(got.indices.size() >= 2);

    // petals minus the offset must have pairwise disjoint supports
    std::map<Coord, int> seen;
    for (std::size_t idx : got.indices) {
      const LinearForm recentered = petals[idx].minus(got.center_offset);
      for (const auto& [z, _] : recentered.coeffs()) CHECK(++seen[z] == 1);
    }
  }
}

TEST_CASE("greedy separated subfamily", "[structure]") {
  const Modulus p(3);

  {  // disjoint wide forms: the first u are taken
    std::vector<LinearForm> forms;
    for (int i = 0; i < 5; ++i)
      forms.push_back(make(p, {{static_cast<Coord>(2 * i), 1},
                               {static_cast<Coord>(2 * i + 1), 2}}));
    const auto got = greedy_separated_subfamily(forms, 2, 3);
    CHECK(got.reached_target);
    CHECK(got.members == std::vector<std::size_t>{0, 1, 2});
  }

  {  // the x_0 + x_i family: r = 2 admits several forms, r = 3 none
    std::vector<LinearForm> forms;
    for (int i = 1; i <= 3; ++i)
      forms.push_back(make(p, {{0, 1}, {static_cast<Coord>(i), 1}}));
    const auto wide = greedy_separated_subfamily(forms, 2, 3);
    CHECK(wide.reached_target);

    const auto narrow = greedy_separated_subfamily(forms, 3, 3);
    CHECK_FALSE(narrow.reached_target);
    CHECK(narrow.members.empty());
    // every form carries the all-zero witness (its own support is < 3)
    for (const auto& [j, witness] : narrow.witnesses) {
      CHECK(witness.empty());
      CHECK(forms[j].support_size() <= 2);
    }
  }

  {  // k = 0: maximal failure with empty members
    const auto got = greedy_separated_subfamily({}, 2, 3);
    CHECK_FALSE(got.reached_target);
    CHECK(got.members.empty());
  }
}

TEST_CASE("witness vectors certify non-addability", "[structure]") {
  Xoshiro256StarStar rng(60602);
  const Modulus p(3);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<LinearForm> forms;
    const int k = 3 + static_cast<int>(rng.below(4));
    for (int i = 0; i < k; ++i) forms.push_back(testutil::random_form(rng, p, 3, 6));
    const int r = 1 + static_cast<int>(rng.below(3));
    const auto got = greedy_separated_subfamily(forms, r, 4);
    if (got.reached_target) continue;
    for (const auto& [j, witness] : got.witnesses) {
      LinearForm comb = forms[j];
      for (std::size_t i = 0; i < got.members.size(); ++i)
        if (witness[i] != 0)
          comb.add_scaled(forms[got.members[i]], p.value() - witness[i]);
      CHECK(comb.support_size() <= r - 1);
    }
  }
}

TEST_CASE("ball cover groups forms around combination centers", "[structure]") {
  const Modulus p(3);
  // f0 is wide; the others sit within distance 1 of it
  std::vector<LinearForm> forms{
      make(p, {{0, 1}, {1, 1}, {2, 1}}),
      make(p, {{0, 1}, {1, 1}, {2, 1}, {3, 2}}),
      make(p, {{0, 1}, {1, 1}}),
  };
  const auto greedy = greedy_separated_subfamily(forms, 2, 3);
  REQUIRE_FALSE(greedy.reached_target);
  const auto buckets = ball_cover(forms, greedy);
  std::size_t covered = 0;
  for (const auto& [key, bucket] : buckets) {
    covered += bucket.size();
    std::vector<LinearForm> member_forms;
    for (std::size_t i : greedy.members) member_forms.push_back(forms[i]);
    const LinearForm center =
        greedy.members.empty() ? LinearForm(p) : combine(key, member_forms);
    for (std::size_t i : bucket) CHECK(distance(forms[i], center) <= 1);
  }
  CHECK(covered == forms.size());
}

TEST_CASE("balls density bound closed form", "[structure]") {
  const Modulus p(3);
  const Alphabet S(p, {0, 1});
  CHECK(balls_density_bound(12, 1, p, S) ==
        Catch::Approx(3.0 * std::pow(0.75, 4.0)));
  // monotone decreasing in k
  double prev = balls_density_bound(4, 2, p, S);
  for (std::uint64_t k : {8, 16, 32, 64}) {
    const double next = balls_density_bound(k, 2, p, S);
    CHECK(next < prev);
    prev = next;
  }
  // below the factorial threshold the exponent drops under 1 but stays valid
  CHECK(balls_density_bound(2, 2, p, S) > 0);
  CHECK_THROWS_AS(balls_density_bound(0, 1, p, S), Error);
}

TEST_CASE("pipeline case A on disjoint singletons", "[structure]") {
  const Modulus p(3);
  const Alphabet S(p, {0, 1});
  const auto sys = singleton_system(p, S, 5);

  const auto report = certify_density_bound(sys, 3, 1);
  CHECK(report.kind == CertificateKind::Equidistribution);
  CHECK(report.equidistribution.member_indices == std::vector<std::size_t>{0, 1, 2});
  CHECK(report.bound_exact == Rational(1, 27) + Rational(8, 9));
  REQUIRE(report.exact_density.has_value());
  CHECK(*report.exact_density == Rational(1, 32));
  CHECK(*report.exact_density <= report.bound_exact);

  const auto verify = verify_certificate_document(to_document(report, 3), sys);
  CHECK(verify.ok);
}

TEST_CASE("pipeline case B on a sunflower-shaped system", "[structure]") {
  const Modulus p(3);
  const Alphabet S(p, {0, 1});
  // center x_100 + x_101 with nine petals of width 2 on disjoint blocks;
  // r = 3 exceeds every form's reach so the greedy family stays small
  const LinearForm center = make(p, {{100, 1}, {101, 1}});
  std::vector<Condition> conditions;
  const TargetSet E(p, {0});  // L(S, {0}) = 1
  for (int i = 0; i < 9; ++i) {
    LinearForm petal(p);
    petal.set(static_cast<Coord>(2 * i), 1);
    petal.set(static_cast<Coord>(2 * i + 1), 2);
    conditions.emplace_back(center.plus(petal), E);
  }
  const ConditionSystem sys(p, S, std::move(conditions));
  REQUIRE(meets_main_assumption(sys).holds);

  const auto report = certify_density_bound(sys, 4, 5);
  CHECK(report.kind == CertificateKind::Sunflower);
  CHECK_FALSE(report.trivial);
  CHECK(report.sunflower.member_indices.size() >= 1);
  REQUIRE(report.exact_density.has_value());
  CHECK(*report.exact_density <= report.bound_exact);

  const auto verify = verify_certificate_document(to_document(report, 3), sys);
  CHECK(verify.ok);
}

TEST_CASE("pipeline on k = 1 stays sound", "[structure]") {
  const Modulus p(3);
  const Alphabet S(p, {0, 1});
  const auto sys = singleton_system(p, S, 1);

  const auto a = certify_density_bound(sys, 1, 1);
  REQUIRE(a.exact_density.has_value());
  CHECK(*a.exact_density <= a.bound_exact);

  const auto b = certify_density_bound(sys, 2, 1);
  REQUIRE(b.exact_density.has_value());
  CHECK(*b.exact_density <= b.bound_exact);
}

TEST_CASE("pipeline requires the distance assumption", "[structure]") {
  const Modulus p(5);
  const Alphabet S(p, {0, 1});
  const TargetSet E(p, {0, 1, 2});  // L = 3, threshold 5
  const ConditionSystem sys(
      p, S, {{make(p, {{0, 1}, {1, 1}}), E}, {make(p, {{2, 1}, {3, 1}}), E}});
  CHECK_THROWS_AS(certify_density_bound(sys, 2, 1), Error);
}

TEST_CASE("certificate mutations are rejected", "[structure]") {
  const Modulus p(3);
  const Alphabet S(p, {0, 1});
  const LinearForm center = make(p, {{100, 1}, {101, 1}});
  std::vector<Condition> conditions;
  for (int i = 0; i < 9; ++i) {
    LinearForm petal(p);
    petal.set(static_cast<Coord>(2 * i), 1);
    petal.set(static_cast<Coord>(2 * i + 1), 2);
    conditions.emplace_back(center.plus(petal), TargetSet(p, {0}));
  }
  const ConditionSystem sys(p, S, std::move(conditions));
  const auto report = certify_density_bound(sys, 4, 5);
  REQUIRE(report.kind == CertificateKind::Sunflower);

  {  // perturb one petal by an extra coordinate
    auto payload = to_payload(report);
    REQUIRE_FALSE(payload.petals.empty());
    payload.petals.front().set(999'999, 1);
    const auto verdict = verify_certificate(payload, sys);
    CHECK_FALSE(verdict.ok);
    bool petal_reason = false;
    for (const auto& why : verdict.reasons)
      petal_reason = petal_reason || why == "petal identity";
    CHECK(petal_reason);
  }
  {  // inflate the claimed bound's member count by duplicating an index
    auto payload = to_payload(report);
    payload.members.push_back(payload.members.front());
    payload.petals.push_back(payload.petals.front());
    const auto verdict = verify_certificate(payload, sys);
    CHECK_FALSE(verdict.ok);  // disjointness or bound mismatch
  }
  {  // understate the bound
    auto payload = to_payload(report);
    payload.bound /= 2;
    const auto verdict = verify_certificate(payload, sys);
    CHECK_FALSE(verdict.ok);
    bool bound_reason = false;
    for (const auto& why : verdict.reasons)
      bound_reason = bound_reason || why == "bound mismatch";
    CHECK(bound_reason);
  }
}

TEST_CASE("equidistribution certificates also re-verify", "[structure]") {
  const Modulus p(3);
  const Alphabet S(p, {0, 1});
  const auto sys = singleton_system(p, S, 4);
  const auto report = certify_density_bound(sys, 3, 1);
  REQUIRE(report.kind == CertificateKind::Equidistribution);

  auto payload = to_payload(report);
  CHECK(verify_certificate(payload, sys).ok);

  payload.r += 5;  // claims more separation than the family has
  CHECK_FALSE(verify_certificate(payload, sys).ok);
}

TEST_CASE("reports are deterministic", "[structure]") {
  const Modulus p(3);
  const Alphabet S(p, {0, 1});
  const auto sys = singleton_system(p, S, 6);
  const auto a = certify_density_bound(sys, 3, 1);
  const auto b = certify_density_bound(sys, 3, 1);
  CHECK(dump_canonical(certificate_to_json(to_document(a, 3))) ==
        dump_canonical(certificate_to_json(to_document(b, 3))));
}
