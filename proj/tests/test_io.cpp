#include <catch2/catch_amalgamated.hpp>

#include "cubeforms/cubeforms.hpp"
#include "test_util.hpp"

using namespace cubeforms;

namespace {

ConditionSystem random_system(Xoshiro256StarStar& rng) {
  const int pv = rng.below(2) == 0 ? 3 : 5;
  const Modulus p(pv);
  std::vector<int> s_elems = testutil::random_strict_subset(rng, pv);
  if (s_elems.size() < 2) s_elems = {0, 1};
  const Alphabet S(p, s_elems);
  const int k = static_cast<int>(rng.below(4));
  std::vector<Condition> conditions;
  for (int i = 0; i < k; ++i)
    conditions.emplace_back(testutil::random_form(rng, p, 4, 12),
                            TargetSet(p, testutil::random_strict_subset(rng, pv)));
  return ConditionSystem(p, S, std::move(conditions));
}

}  // namespace

TEST_CASE("system documents round-trip", "[io]") {
  Xoshiro256StarStar rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    const auto sys = random_system(rng);
    const auto doc = system_to_json(sys);
    CHECK(system_from_json(doc) == sys);

    // canonical serialization is a fixed point of parse + dump
    const std::string canonical = dump_canonical(doc);
    CHECK(dump_canonical(system_to_json(system_from_json(parse_json_text(canonical)))) ==
          canonical);
  }
}

TEST_CASE("system document validation", "[io]") {
  CHECK_THROWS_AS(parse_json_text("{not json"), Error);

  const auto parse = [](const std::string& text) {
    return system_from_json(parse_json_text(text));
  };

  // zero coefficient mod p
  CHECK_THROWS_AS(
      parse(R"({"S":[0,1],"conditions":[{"E":[0],"form":[[0,3]]}],"format_version":1,"p":3})"),
      Error);
  // duplicate coordinate
  CHECK_THROWS_AS(
      parse(R"({"S":[0,1],"conditions":[{"E":[0],"form":[[0,1],[0,2]]}],"format_version":1,"p":3})"),
      Error);
  // target set covering all of F_p
  CHECK_THROWS_WITH(
      parse(R"({"S":[0,1],"conditions":[{"E":[0,1,2],"form":[[0,1]]}],"format_version":1,"p":3})"),
      "target set must be strict");
  // composite modulus
  CHECK_THROWS_AS(
      parse(R"({"S":[0,1],"conditions":[],"format_version":1,"p":4})"), Error);
  // wrong version
  CHECK_THROWS_AS(
      parse(R"({"S":[0,1],"conditions":[],"format_version":2,"p":3})"), Error);
}

TEST_CASE("fraction strings", "[io]") {
  CHECK(to_fraction_string(Rational(1, 8)) == "1/8");
  CHECK(to_fraction_string(Rational(5, 1)) == "5");
  CHECK(parse_fraction("16/19") == Rational(16, 19));
  CHECK(parse_fraction("7") == Rational(7));
  CHECK_THROWS_AS(parse_fraction("x/y"), Error);
}

TEST_CASE("certificate documents round-trip and verify", "[io]") {
  const Modulus p(3);
  const Alphabet S(p, {0, 1});
  std::vector<Condition> conditions;
  for (int i = 0; i < 5; ++i)
    conditions.emplace_back(LinearForm::monomial(p, static_cast<Coord>(i), 1),
                            TargetSet(p, {0}));
  const ConditionSystem sys(p, S, std::move(conditions));

  const auto report = certify_density_bound(sys, 3, 1);
  const auto doc = to_document(report, 3);
  const std::string text = dump_canonical(certificate_to_json(doc));
  const auto parsed = certificate_from_json(parse_json_text(text));

  CHECK(parsed.payload.kind == doc.payload.kind);
  CHECK(parsed.payload.members == doc.payload.members);
  CHECK(parsed.payload.bound == doc.payload.bound);
  CHECK(verify_certificate_document(parsed, sys).ok);

  // serialization is stable
  CHECK(dump_canonical(certificate_to_json(parsed)) == text);
}

TEST_CASE("tampered certificate documents fail verification", "[io]") {
  const Modulus p(3);
  const Alphabet S(p, {0, 1});
  std::vector<Condition> conditions;
  for (int i = 0; i < 5; ++i)
    conditions.emplace_back(LinearForm::monomial(p, static_cast<Coord>(i), 1),
                            TargetSet(p, {0}));
  const ConditionSystem sys(p, S, std::move(conditions));
  const auto report = certify_density_bound(sys, 3, 1);
  auto json = certificate_to_json(to_document(report, 3));

  {  // tamper with the rational bound
    auto broken = json;
    broken["bound"]["rational"] = "1/100";
    const auto parsed = certificate_from_json(broken);
    const auto verdict = verify_certificate_document(parsed, sys);
    CHECK_FALSE(verdict.ok);
  }
  {  // mismatched system: wider targets change the certified bound
    std::vector<Condition> other;
    for (int i = 0; i < 5; ++i)
      other.emplace_back(LinearForm::monomial(p, static_cast<Coord>(i), 1),
                         TargetSet(p, {0, 1}));
    const ConditionSystem other_sys(p, S, std::move(other));
    const auto parsed = certificate_from_json(json);
    const auto verdict = verify_certificate_document(parsed, other_sys);
    CHECK_FALSE(verdict.ok);
  }
}

TEST_CASE("construction reports serialize with claims", "[io]") {
  const auto report = gen_tightness(5, {0, 1}, {0, 1, 2}, 2);
  const auto doc = construction_report_to_json(report);
  CHECK(doc["name"] == "tightness");
  CHECK(doc["claims"].size() == report.claims.size());
  CHECK(doc["system"]["p"] == 5);
  for (const auto& claim : doc["claims"]) CHECK(claim["checked"].get<bool>());
}

TEST_CASE("exit code mapping", "[io]") {
  CHECK(exit_code_for(ErrorKind::InvalidInput) == 2);
  CHECK(exit_code_for(ErrorKind::ExactEngineTooLarge) == 3);
  CHECK(exit_code_for(ErrorKind::EnumerationTooLarge) == 3);
  CHECK(exit_code_for(ErrorKind::ConditioningOnNull) == 2);
}
