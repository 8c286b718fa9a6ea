#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <thread>
#include <unordered_set>

#include "support/generators.hpp"
#include "vset/hfs.hpp"

using namespace vset;

namespace {
HFSet zero() { return HFSet(); }
HFSet one() { return singleton(zero()); }
bool in_stage(HFSet h, unsigned n) { return h.rank() < n; }
}  // namespace

TEST_CASE("construct canonicalizes its input") {
  CHECK(HFSet::of({}) == zero());
  CHECK(HFSet::of({zero(), zero()}) == one());
  CHECK(HFSet::of({one(), zero()}) == HFSet::of({zero(), one()}));
}

TEST_CASE("extensionality: order and duplicates do not matter") {
  gen::Rng rng(101);
  for (int i = 0; i < 200; ++i) {
    std::vector<HFSet> ms;
    unsigned n = gen::pick(rng, 0, 6);
    for (unsigned j = 0; j < n; ++j) ms.push_back(gen::random_hfset(rng, 3, 3));
    HFSet a = HFSet::of(ms);
    std::shuffle(ms.begin(), ms.end(), rng);
    if (!ms.empty()) ms.push_back(ms[gen::pick(rng, 0, n - 1)]);
    HFSet b = HFSet::of(ms);
    REQUIRE(a == b);
    REQUIRE(a.text() == b.text());
  }
}

TEST_CASE("kpair unfolds to {{a},{a,b}}") {
  CHECK(kpair(zero(), zero()) == singleton(one()));
  CHECK(kpair(zero(), one()) == HFSet::of({one(), HFSet::of({zero(), one()})}));
  CHECK(kpair(zero(), one()).rank() == 3);
}

TEST_CASE("kpair sits two levels above its components") {
  gen::Rng rng(102);
  for (int i = 0; i < 50; ++i) {
    HFSet a = gen::random_hfset(rng, 4, 3);
    HFSet b = gen::random_hfset(rng, 4, 3);
    REQUIRE(kpair(a, b).rank() == std::max(a.rank(), b.rank()) + 2);
  }
}

TEST_CASE("kpair injectivity, exhaustive over V_3 x V_3") {
  auto v3 = stage_members(3);
  for (HFSet a : v3)
    for (HFSet b : v3)
      for (HFSet c : v3)
        for (HFSet d : v3) {
          bool same = kpair(a, b) == kpair(c, d);
          REQUIRE(same == (a == c && b == d));
        }
}

TEST_CASE("kpair_split inverts kpair") {
  auto collapsed = kpair_split(singleton(one()));
  REQUIRE(collapsed.has_value());
  CHECK(collapsed->first == zero());
  CHECK(collapsed->second == zero());

  auto split = kpair_split(kpair(zero(), one()));
  REQUIRE(split.has_value());
  CHECK(split->first == zero());
  CHECK(split->second == one());

  CHECK(!kpair_split(one()).has_value());

  gen::Rng rng(103);
  for (int i = 0; i < 50; ++i) {
    HFSet a = gen::random_hfset(rng, 3, 3);
    HFSet b = gen::random_hfset(rng, 3, 3);
    auto p = kpair_split(kpair(a, b));
    REQUIRE(p.has_value());
    REQUIRE(p->first == a);
    REQUIRE(p->second == b);
  }
}

TEST_CASE("image evaluates the relational image") {
  HFSet r = singleton(kpair(zero(), zero()));
  CHECK(image(r, one()) == one());
  CHECK(image(zero(), HFSet::of({zero(), one()})) == zero());

  // The two-point relation {0}x{0}: applying at 0 gives {0}, at 1 gives 0.
  CHECK(image(r, singleton(zero())) == one());
  CHECK(image(r, singleton(one())) == zero());
}

TEST_CASE("std_product enumerates Kuratowski pairs") {
  CHECK(std_product(one(), one()) == singleton(kpair(zero(), zero())));
  CHECK(std_product(zero(), HFSet::of({zero(), one()})) == zero());
  HFSet two = HFSet::of({zero(), one()});
  CHECK(std_product(two, one()) ==
        HFSet::of({kpair(zero(), zero()), kpair(one(), zero())}));
  gen::Rng rng(104);
  for (int i = 0; i < 30; ++i) {
    HFSet a = gen::random_hfset(rng, 3, 3);
    HFSet b = gen::random_hfset(rng, 3, 3);
    REQUIRE(std_product(a, b).card() == a.card() * b.card());
  }
}

TEST_CASE("rank") {
  CHECK(zero().rank() == 0);
  CHECK(one().rank() == 1);
  CHECK(ordinal(3).rank() == 3);
}

TEST_CASE("stage_members sizes and small literals") {
  CHECK(stage_members(0).empty());
  CHECK(stage_members(1) == std::vector<HFSet>{zero()});
  CHECK(stage_members(2).size() == 2);
  auto v3 = stage_members(3);
  REQUIRE(v3.size() == 4);
  std::vector<HFSet> expected{zero(), one(), singleton(one()),
                              HFSet::of({zero(), one()})};
  std::sort(expected.begin(), expected.end());
  CHECK(v3 == expected);
  CHECK(stage_members(4).size() == 16);
  CHECK(stage_members(5).size() == 65536);
  CHECK_THROWS_AS(stage_members(6), size_limit_error);
}

TEST_CASE("membership in a stage is a rank bound") {
  auto v4 = stage_members(4);
  for (unsigned n = 0; n <= 5; ++n) {
    std::unordered_set<HFSet> vn;
    for (HFSet h : stage_members(n)) vn.insert(h);
    for (HFSet h : v4) REQUIRE(vn.count(h) == (h.rank() < n ? 1u : 0u));
  }
}

TEST_CASE("finite ordinals sit inside their stage") {
  for (unsigned n = 0; n <= 3; ++n) {
    std::unordered_set<HFSet> vn;
    for (HFSet h : stage_members(n)) vn.insert(h);
    for (HFSet m : ordinal(n).members()) REQUIRE(vn.count(m) == 1);
  }
}

TEST_CASE("products of a stage land two stages up") {
  for (unsigned n = 0; n <= 3; ++n) {
    HFSet vn = HFSet::of(stage_members(n));
    for (HFSet p : std_product(vn, vn).members()) REQUIRE(in_stage(p, n + 2));
  }
}

TEST_CASE("stages are transitive") {
  for (unsigned n = 0; n <= 5; ++n) {
    auto stage = stage_members(n);
    std::unordered_set<HFSet> vn(stage.begin(), stage.end());
    for (HFSet h : stage)
      for (HFSet m : h.members()) REQUIRE(vn.count(m) == 1);
  }
}

TEST_CASE("pairs inside a stage have components one stage down") {
  auto v4 = stage_members(4);
  std::unordered_set<HFSet> v3;
  for (HFSet h : stage_members(3)) v3.insert(h);
  for (HFSet p : v4) {
    auto split = kpair_split(p);
    if (!split) continue;
    REQUIRE(v3.count(split->first) == 1);
    REQUIRE(v3.count(split->second) == 1);
  }
}

TEST_CASE("a bounded product bounds both nonempty factors") {
  gen::Rng rng(105);
  for (int i = 0; i < 100; ++i) {
    HFSet a = gen::random_hfset(rng, 3, 3);
    HFSet b = gen::random_hfset(rng, 3, 3);
    if (a.is_empty() || b.is_empty()) continue;
    HFSet prod = std_product(a, b);
    for (unsigned n = 1; n <= 6; ++n) {
      bool prod_in = true;
      for (HFSet p : prod.members()) prod_in = prod_in && in_stage(p, n);
      if (!prod_in) continue;
      for (HFSet x : a.members()) REQUIRE(in_stage(x, n));
      for (HFSet y : b.members()) REQUIRE(in_stage(y, n));
    }
  }
}

TEST_CASE("canonical text and json forms") {
  CHECK(zero().text() == "0");
  CHECK(one().text() == "{0}");
  CHECK(kpair(zero(), one()).text() == "{{0},{0,{0}}}");
  CHECK(zero().json() == "[]");
  CHECK(kpair(zero(), one()).json() == "[[[]],[[],[[]]]]");
  // Children render in canonical order regardless of construction order.
  CHECK(HFSet::of({singleton(one()), zero(), one()}).text() ==
        "{0,{0},{{0}}}");
}

TEST_CASE("construction from several threads interns consistently") {
  std::vector<HFSet> results(4);
  {
    std::vector<std::jthread> workers;
    for (int t = 0; t < 4; ++t)
      workers.emplace_back([&results, t] {
        gen::Rng rng(42);  // same seed: all threads build the same sets
        HFSet acc;
        for (int i = 0; i < 200; ++i)
          acc = HFSet::of({acc, gen::random_hfset(rng, 4, 3)});
        results[t] = acc;
      });
  }
  for (int t = 1; t < 4; ++t) REQUIRE(results[0] == results[t]);
}

TEST_CASE("canonical order is length-lexicographic") {
  CHECK(HFSet::compare(zero(), one()) < 0);
  CHECK(HFSet::compare(one(), singleton(one())) < 0);
  // Equal length: "{0,{0}}" vs "{{0}}" decided lexicographically.
  HFSet two = HFSet::of({zero(), one()});
  CHECK(two.text().size() > singleton(one()).text().size());
  CHECK(HFSet::compare(singleton(one()), two) < 0);
}
