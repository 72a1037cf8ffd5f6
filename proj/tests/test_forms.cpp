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

}  // namespace

TEST_CASE("support and cancellation", "[forms]") {
  const Modulus p(3);
  const LinearForm f = make(p, {{0, 1}, {3, 2}});
  CHECK(support(f) == std::vector<Coord>{0, 3});
  CHECK(LinearForm(p).support().empty());
  CHECK(f.minus(f).support().empty());
  CHECK(make(p, {{1, 3}}).is_zero());  // coefficient reduces to 0 mod 3
}

TEST_CASE("combine", "[forms]") {
  const Modulus p(3);
  const LinearForm f1 = make(p, {{0, 1}, {1, 1}});
  const LinearForm f2 = make(p, {{0, 1}, {2, 1}});
  CHECK(combine({1, 2}, {f1, f2}) == make(p, {{1, 1}, {2, 2}}));
  CHECK(combine({0, 0}, {f1, f2}).is_zero());
  CHECK(combine({1}, {f1}) == f1);
  CHECK_THROWS_AS(combine({1}, {f1, f2}), Error);
}

TEST_CASE("distance basics", "[forms]") {
  const Modulus p(3);
  const LinearForm f1 = make(p, {{0, 1}, {1, 1}});
  const LinearForm f2 = make(p, {{0, 1}, {2, 1}});
  CHECK(distance(f1, f2) == 2);
  CHECK(distance(f1, f1) == 0);
  const LinearForm g1 = make(p, {{0, 1}, {1, 2}, {2, 1}});
  const LinearForm g2 = make(p, {{5, 1}, {6, 1}});
  CHECK(distance(g1, g2) == 5);  // disjoint supports add
}

TEST_CASE("distance is a metric on random sparse forms", "[forms]") {
  Xoshiro256StarStar rng(42);
  for (int trial = 0; trial < 300; ++trial) {
    const Modulus p(trial % 2 == 0 ? 3 : 5);
    const auto a = testutil::random_form(rng, p, 5, 10);
    const auto b = testutil::random_form(rng, p, 5, 10);
    const auto c = testutil::random_form(rng, p, 5, 10);
    CHECK(distance(a, b) == distance(b, a));
    CHECK((distance(a, b) == 0) == (a == b));
    CHECK(distance(a, b) <= distance(a, c) + distance(c, b));
  }
}

TEST_CASE("support is invariant under nonzero scaling", "[forms]") {
  Xoshiro256StarStar rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    const Modulus p(trial % 2 == 0 ? 3 : 7);
    const auto f = testutil::random_form(rng, p, 6, 12);
    for (int c = 1; c < p.value(); ++c) CHECK(f.scaled(c).support() == f.support());
  }
}

TEST_CASE("pairwise minimum distance", "[forms]") {
  const Modulus p(3);
  const Alphabet S(p, {0, 1});
  const TargetSet E(p, {0});
  const LinearForm x0 = make(p, {{0, 1}});
  const LinearForm x1 = make(p, {{1, 1}});
  const LinearForm x0px1 = make(p, {{0, 1}, {1, 1}});
  const LinearForm x0px2 = make(p, {{0, 1}, {2, 1}});
  const LinearForm x1px2 = make(p, {{1, 1}, {2, 1}});

  // all three pairwise differences of {x0+x1, x0+x2, x1+x2} have support 2
  CHECK(pairwise_min_distance(ConditionSystem(
            p, S, {{x0px1, E}, {x0px2, E}, {x1px2, E}})) == 2);
  // {x0, x1, x0+x1}: the difference x0 - (x0+x1) = -x1 has support 1
  CHECK(pairwise_min_distance(ConditionSystem(p, S, {{x0, E}, {x1, E}, {x0px1, E}})) ==
        1);
  CHECK(pairwise_min_distance(ConditionSystem(p, S, {{x0, E}, {x0, E}})) == 0);
  CHECK_THROWS_AS(pairwise_min_distance(ConditionSystem(p, S, {{x0, E}})), Error);
}

TEST_CASE("separation on small families", "[forms]") {
  const Modulus p(3);
  const LinearForm f1 = make(p, {{0, 1}, {1, 1}});
  const LinearForm f2 = make(p, {{0, 1}, {2, 1}});
  CHECK(separation({f1, f2}) == 2);
  CHECK(separation({LinearForm(p)}) == 0);
  CHECK(separation({make(p, {{0, 1}}), make(p, {{1, 1}}), make(p, {{2, 1}})}) == 1);
  CHECK_THROWS_AS(separation({f1, f2}, 2), Error);  // cap smaller than (9-1)/2
}

TEST_CASE("separation is invariant under invertible change of family", "[forms]") {
  Xoshiro256StarStar rng(44);
  for (int trial = 0; trial < 60; ++trial) {
    const int pv = trial % 2 == 0 ? 3 : 5;
    const Modulus p(pv);
    const int k = 2 + static_cast<int>(rng.below(2));  // 2 or 3
    std::vector<LinearForm> forms;
    for (int i = 0; i < k; ++i) forms.push_back(testutil::random_form(rng, p, 4, 8));

    // random invertible matrix over F_p by rejection on the determinant-free
    // criterion: row reduce a copy and check full rank
    std::vector<std::vector<int>> m;
    for (;;) {
      m.assign(k, std::vector<int>(k, 0));
      for (auto& row : m)
        for (auto& e : row) e = static_cast<int>(rng.below(pv));
      auto reduced = m;
      int rank = 0;
      for (int col = 0; col < k; ++col) {
        int pivot = -1;
        for (int row = rank; row < k; ++row)
          if (reduced[row][col] != 0) {
            pivot = row;
            break;
          }
        if (pivot < 0) continue;
        std::swap(reduced[pivot], reduced[rank]);
        for (int row = 0; row < k; ++row)
          if (row != rank && reduced[row][col] != 0) {
            // eliminate using multiples of the pivot row
            int inv = 1;
            while ((inv * reduced[rank][col]) % pv != 1) ++inv;
            const int factor = (reduced[row][col] * inv) % pv;
            for (int c2 = 0; c2 < k; ++c2)
              reduced[row][c2] =
                  ((reduced[row][c2] - factor * reduced[rank][c2]) % pv + pv) % pv;
          }
        ++rank;
      }
      if (rank == k) break;
    }

    std::vector<LinearForm> changed;
    for (int i = 0; i < k; ++i) changed.push_back(combine(m[i], forms));
    CHECK(separation(changed) == separation(forms));
  }
}

TEST_CASE("separation never exceeds the pairwise minimum distance", "[forms]") {
  Xoshiro256StarStar rng(45);
  const Modulus p(3);
  const Alphabet S(p, {0, 1});
  const TargetSet E(p, {0});
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(3));
    std::vector<Condition> conditions;
    std::vector<LinearForm> forms;
    for (int i = 0; i < k; ++i) {
      forms.push_back(testutil::random_form(rng, p, 4, 8));
      conditions.emplace_back(forms.back(), E);
    }
    CHECK(separation(forms) <=
          pairwise_min_distance(ConditionSystem(p, S, conditions)));
  }
}

TEST_CASE("main assumption report", "[forms]") {
  const Modulus p(5);
  const Alphabet S(p, {0, 1});
  const TargetSet E(p, {0, 1, 2});  // L(S, E) = 3, threshold 5

  // disjoint blocks built from the witness tuple (1, 1): distance is 4
  const LinearForm f1 = make(p, {{0, 1}, {1, 1}});
  const LinearForm f2 = make(p, {{2, 1}, {3, 1}});

  const auto single = meets_main_assumption(ConditionSystem(p, S, {{f1, E}}));
  CHECK(single.holds);
  CHECK(single.Lmax == 3);
  CHECK(single.threshold == 5);
  CHECK(single.min_distance == -1);

  const auto pair = meets_main_assumption(ConditionSystem(p, S, {{f1, E}, {f2, E}}));
  CHECK_FALSE(pair.holds);
  CHECK(pair.min_distance == 4);
  CHECK(pair.threshold == 5);
}
