#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "support/generators.hpp"
#include "vset/eqsolve.hpp"

using namespace vset;

namespace {

HFSet zero() { return HFSet(); }
HFSet one() { return singleton(zero()); }

TermX rename_vars(const TermX& t, const std::map<std::string, std::string>& m);

Leaf rename_vars(const Leaf& l, const std::map<std::string, std::string>& m) {
  if (const auto* v = std::get_if<VarLeaf>(&l)) return var_leaf(m.at(v->name));
  if (const auto* s = std::get_if<SubTerm>(&l))
    return sub_term(rename_vars(*s->term, m));
  return l;
}

TermX rename_vars(const TermX& t, const std::map<std::string, std::string>& m) {
  if (t.is_atom()) return TermX::atom();
  std::vector<Leaf> slots;
  for (const Leaf& l : t.slots()) slots.push_back(rename_vars(l, m));
  return TermX::tuple(std::move(slots));
}

FiniteMap map_into(gen::Rng& rng, const std::vector<RegularElement>& dom,
                   const std::vector<RegularElement>& codomain) {
  FiniteMap m;
  for (const auto& k : dom)
    m.insert(k, codomain[gen::pick(
                    rng, 0, static_cast<unsigned>(codomain.size() - 1))]);
  return m;
}

FiniteMap inl_map(const std::vector<RegularElement>& dom) {
  FiniteMap m;
  for (const auto& k : dom) m.insert(k, inl(k));
  return m;
}

FiniteMap inr_map(const std::vector<RegularElement>& dom) {
  FiniteMap m;
  for (const auto& k : dom) m.insert(k, inr(k));
  return m;
}

}  // namespace

TEST_CASE("solving single constant equations") {
  IndexSet index(2);
  EquationSystem sys(index, {{"x", TermX::atom()}});
  auto f = solve(sys);
  CHECK(bisim(f.at("x"), atom_element(index)).bisimilar);
}

TEST_CASE("solving the stream equation x = <1; x>") {
  IndexSet index(2);
  TermX rhs = TermX::tuple(
      {const_leaf(atom_element(index)), var_leaf("x")});
  auto f = solve(EquationSystem(index, {{"x", rhs}}));
  CHECK(expand(f.at("x"), 3) ==
        HFSet::of({kpair(zero(), zero()),
                   kpair(one(), kpair(zero(), zero()))}));
}

TEST_CASE("solving through another variable") {
  IndexSet index(2);
  TermX xr = TermX::tuple({var_leaf("y"), var_leaf("y")});
  auto f = solve(EquationSystem(index, {{"x", xr}, {"y", TermX::atom()}}));
  CHECK(expand(f.at("x"), 2) ==
        HFSet::of({kpair(zero(), zero()), kpair(one(), zero())}));
}

TEST_CASE("solve rejects malformed systems") {
  IndexSet index(2);
  CHECK_THROWS_AS(
      solve(EquationSystem(index,
                           {{"x", TermX::tuple({var_leaf("y"),
                                                var_leaf("x")})}})),
      validation_error);
  CHECK_THROWS_AS(
      solve(EquationSystem(index, {{"x", TermX::tuple({var_leaf("x")})}})),
      validation_error);
}

TEST_CASE("solutions satisfy their equations") {
  gen::Rng rng(401);
  for (int i = 0; i < 100; ++i) {
    EquationSystem sys = gen::random_system(rng, 5, 3, gen::pick(rng, 2, 3));
    auto f = solve(sys);
    for (const auto& [x, rhs] : sys.equations())
      REQUIRE(bisim(f.at(x), subst(f, rhs, sys.index())).bisimilar);
  }
}

TEST_CASE("solutions are stable under permutation and renaming") {
  gen::Rng rng(402);
  for (int i = 0; i < 50; ++i) {
    EquationSystem sys = gen::random_system(rng, 4, 2, 2);
    auto f = solve(sys);

    std::map<std::string, std::string> renaming;
    for (const auto& [name, _] : sys.equations())
      renaming[name] = "renamed_" + name;
    std::vector<std::pair<std::string, TermX>> eqs;
    for (const auto& [name, rhs] : sys.equations())
      eqs.emplace_back(renaming.at(name), rename_vars(rhs, renaming));
    std::shuffle(eqs.begin(), eqs.end(), rng);
    auto g = solve(EquationSystem(sys.index(), std::move(eqs)));

    for (const auto& [name, _] : sys.equations())
      REQUIRE(bisim(f.at(name), g.at(renaming.at(name))).bisimilar);
  }
}

TEST_CASE("solving is deterministic") {
  gen::Rng rng1(403), rng2(403);
  EquationSystem a = gen::random_system(rng1, 4, 3, 2);
  EquationSystem b = gen::random_system(rng2, 4, 3, 2);
  auto fa = solve(a);
  auto fb = solve(b);
  for (const auto& [name, va] : fa) REQUIRE(va == fb.at(name));
}

TEST_CASE("substitution basics") {
  IndexSet index(2);
  std::map<std::string, RegularElement> env{{"x", atom_element(index)}};
  CHECK(bisim(subst(env, TermX::atom(), index), atom_element(index))
            .bisimilar);
  RegularElement r =
      subst(env, TermX::tuple({var_leaf("x"), var_leaf("x")}), index);
  CHECK(bisim(r, pair_element(atom_element(index), atom_element(index)))
            .bisimilar);
  CHECK_THROWS_AS(subst({}, TermX::tuple({var_leaf("q"), var_leaf("q")}),
                        index),
                  validation_error);
}

TEST_CASE("substitution acts leafwise on tuples") {
  gen::Rng rng(404);
  IndexSet index(2);
  std::vector<std::string> vars{"x", "y"};
  for (int i = 0; i < 50; ++i) {
    std::map<std::string, RegularElement> env{
        {"x", gen::random_element(rng, 3, 2)},
        {"y", gen::random_element(rng, 3, 2)}};
    std::vector<Leaf> slots;
    for (unsigned j = 0; j < 2; ++j)
      slots.push_back(gen::random_leaf(rng, vars, 2, index));
    TermX t = TermX::tuple(slots);
    std::vector<RegularElement> comps;
    for (const Leaf& l : slots) {
      if (const auto* v = std::get_if<VarLeaf>(&l))
        comps.push_back(env.at(v->name));
      else if (const auto* s = std::get_if<SubTerm>(&l))
        comps.push_back(subst(env, *s->term, index));
      else
        comps.push_back(std::get<ConstLeaf>(l).value);
    }
    REQUIRE(bisim(subst(env, t, index), tuple_element(index, comps))
                .bisimilar);
  }
}

TEST_CASE("sigma_embed produces variable-free terms") {
  IndexSet index(2);
  CHECK(sigma_embed(atom_element(index)).is_atom());

  RegularElement pair = pair_element(atom_element(index),
                                     zero_element(index));
  TermX t = sigma_embed(pair);
  REQUIRE(!t.is_atom());
  for (const Leaf& l : t.slots())
    REQUIRE(!std::holds_alternative<VarLeaf>(l));

  TermX zt = sigma_embed(zero_element(index));
  REQUIRE(!zt.is_atom());
  const auto* c = std::get_if<ConstLeaf>(&zt.slots()[0]);
  REQUIRE(c != nullptr);
  CHECK(bisim(c->value, zero_element(index)).bisimilar);
}

TEST_CASE("substitution undoes the embedding") {
  gen::Rng rng(405);
  IndexSet index(2);
  for (int i = 0; i < 50; ++i) {
    RegularElement u = gen::random_element(rng, 4, 2);
    std::map<std::string, RegularElement> env{
        {"x", gen::random_element(rng, 3, 2)}};
    REQUIRE(bisim(subst(env, sigma_embed(u), index), u).bisimilar);
  }
}

TEST_CASE("injection values at the concrete level") {
  IndexSet index(2);
  RegularElement a = inl(atom_element(index));
  CHECK(expand(a, 2) == singleton(kpair(one(), zero())));
  CHECK(expand(a, 4) == singleton(kpair(one(), zero())));
  RegularElement b = inr(zero_element(index));
  CHECK(expand(b, 3) == singleton(kpair(zero(), zero())));
}

TEST_CASE("coproduct identities") {
  gen::Rng rng(406);
  for (int i = 0; i < 50; ++i) {
    unsigned k = 2;
    auto A = gen::random_carrier(rng, 2, k);
    auto A2 = gen::random_carrier(rng, 2, k);
    auto B = gen::random_carrier(rng, 2, k);
    auto B2 = gen::random_carrier(rng, 2, k);
    auto C = gen::random_carrier(rng, 2, k);
    auto D = gen::random_carrier(rng, 2, k);

    FiniteMap j = map_into(rng, A, A2);
    FiniteMap kk = map_into(rng, B, B2);
    FiniteMap f = map_into(rng, A2, C);
    FiniteMap g = map_into(rng, B2, C);
    FiniteMap h = map_into(rng, C, D);

    // [f,g] ∘ inl = f and [f,g] ∘ inr = g.
    REQUIRE(map_equal(compose(case_map(f, g), inl_map(A2)), f));
    REQUIRE(map_equal(compose(case_map(f, g), inr_map(B2)), g));

    // h ∘ [f,g] = [h∘f, h∘g].
    REQUIRE(map_equal(compose(h, case_map(f, g)),
                      case_map(compose(h, f), compose(h, g))));

    // [inl, inr] = id.
    std::vector<RegularElement> sum_dom;
    for (const auto& x : A2) sum_dom.push_back(inl(x));
    for (const auto& y : B2) sum_dom.push_back(inr(y));
    REQUIRE(map_equal(case_map(inl_map(A2), inr_map(B2)),
                      FiniteMap::identity_on(sum_dom)));

    // [f,g] ∘ (j +̃ k) = [f∘j, g∘k].
    REQUIRE(map_equal(compose(case_map(f, g), sum_map(j, kk)),
                      case_map(compose(f, j), compose(g, kk))));

    // (j +̃ k) ∘ inl = inl ∘ j, and the same for inr.
    REQUIRE(map_equal(compose(sum_map(j, kk), inl_map(A)),
                      compose(inl_map(A2), j)));
    REQUIRE(map_equal(compose(sum_map(j, kk), inr_map(B)),
                      compose(inr_map(B2), kk)));
  }
}

TEST_CASE("finite map lookup respects bisimilarity") {
  IndexSet index(2);
  // Two-state presentation of the zero element.
  RegularElement z2 = build(
      index, {NodeShape::tuple({1, 1}), NodeShape::tuple({0, 0})}, 0);
  FiniteMap m;
  m.insert(z2, atom_element(index));
  auto v = m.find(zero_element(index));
  REQUIRE(v.has_value());
  CHECK(bisim(*v, atom_element(index)).bisimilar);
  CHECK_THROWS_AS(m.insert(zero_element(index), zero_element(index)),
                  validation_error);
  CHECK_THROWS_AS(m.at(atom_element(index)), validation_error);
}

TEST_CASE("ground systems match direct construction") {
  gen::Rng rng(407);
  for (int i = 0; i < 50; ++i) {
    IndexSet index(2);
    TermX t = gen::random_term(rng, {}, 3, index);
    auto f = solve(EquationSystem(index, {{"x", t}}));
    RegularElement direct = subst({}, t, index);
    REQUIRE(bisim(f.at("x"), direct).bisimilar);
    for (unsigned n = 0; n <= 6; ++n)
      REQUIRE(expand(f.at("x"), n) == expand(direct, n));
  }
}
