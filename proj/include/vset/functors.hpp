#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "vset/eqsolve.hpp"

namespace vset {

class FunctorExpr;

namespace detail {
struct FunctorNode;
}

/// Compositional functor syntax over subsets of the value universe:
/// constants, the argument slot, variant products and sums, and sums and
/// products of families. The slot is the identity functor; it is only
/// translatable when it sits beneath a constructor.
class FunctorExpr {
 public:
  static FunctorExpr constant(std::vector<RegularElement> cs);
  static FunctorExpr slot();
  static FunctorExpr vprod(FunctorExpr f, FunctorExpr g);
  static FunctorExpr vsum(FunctorExpr f, FunctorExpr g);
  static FunctorExpr famsum(
      std::vector<std::pair<RegularElement, FunctorExpr>> arms);
  static FunctorExpr famprod(
      std::vector<std::pair<unsigned, FunctorExpr>> arms);

  const detail::FunctorNode& node() const { return *node_; }
  bool is_slot() const;

 private:
  explicit FunctorExpr(std::shared_ptr<const detail::FunctorNode> n)
      : node_(std::move(n)) {}
  std::shared_ptr<const detail::FunctorNode> node_;
};

namespace detail {

struct KConstF {
  std::vector<RegularElement> constants;
};
struct SlotF {};
struct VProdF {
  FunctorExpr lhs;
  FunctorExpr rhs;
};
struct VSumF {
  FunctorExpr lhs;
  FunctorExpr rhs;
};
/// Indexed by a finite subset of the universe.
struct FamSumF {
  std::vector<std::pair<RegularElement, FunctorExpr>> arms;
};
/// Indexed by a subset of the index set I (positions), not of U.
struct FamProdF {
  std::vector<std::pair<unsigned, FunctorExpr>> arms;
};

struct FunctorNode {
  std::variant<KConstF, SlotF, VProdF, VSumF, FamSumF, FamProdF> v;
};

}  // namespace detail

inline FunctorExpr FunctorExpr::constant(std::vector<RegularElement> cs) {
  return FunctorExpr(std::make_shared<const detail::FunctorNode>(
      detail::FunctorNode{detail::KConstF{std::move(cs)}}));
}
inline FunctorExpr FunctorExpr::slot() {
  return FunctorExpr(std::make_shared<const detail::FunctorNode>(
      detail::FunctorNode{detail::SlotF{}}));
}
inline FunctorExpr FunctorExpr::vprod(FunctorExpr f, FunctorExpr g) {
  return FunctorExpr(std::make_shared<const detail::FunctorNode>(
      detail::FunctorNode{detail::VProdF{std::move(f), std::move(g)}}));
}
inline FunctorExpr FunctorExpr::vsum(FunctorExpr f, FunctorExpr g) {
  return FunctorExpr(std::make_shared<const detail::FunctorNode>(
      detail::FunctorNode{detail::VSumF{std::move(f), std::move(g)}}));
}
inline FunctorExpr FunctorExpr::famsum(
    std::vector<std::pair<RegularElement, FunctorExpr>> arms) {
  return FunctorExpr(std::make_shared<const detail::FunctorNode>(
      detail::FunctorNode{detail::FamSumF{std::move(arms)}}));
}
inline FunctorExpr FunctorExpr::famprod(
    std::vector<std::pair<unsigned, FunctorExpr>> arms) {
  return FunctorExpr(std::make_shared<const detail::FunctorNode>(
      detail::FunctorNode{detail::FamProdF{std::move(arms)}}));
}
inline bool FunctorExpr::is_slot() const {
  return std::holds_alternative<detail::SlotF>(node_->v);
}

/// Minimize, sort, and deduplicate a collection of elements so it can be
/// treated as a finite set.
inline std::vector<RegularElement> canonical_set(
    std::vector<RegularElement> xs) {
  for (auto& x : xs) x = minimize(x);
  std::sort(xs.begin(), xs.end(), [](const auto& a, const auto& b) {
    return structural_compare(a, b) < 0;
  });
  xs.erase(std::unique(xs.begin(), xs.end(),
                       [](const auto& a, const auto& b) {
                         return structural_compare(a, b) == 0;
                       }),
           xs.end());
  return xs;
}

inline constexpr std::size_t kApplyObjLimit = 4096;

namespace detail {

inline RegularElement tuple_from_assignment(
    const IndexSet& index,
    const std::vector<std::pair<unsigned, RegularElement>>& assign) {
  std::vector<RegularElement> comps(index.size(), zero_element(index));
  for (const auto& [pos, v] : assign) {
    if (pos >= index.size())
      throw validation_error("family-product index outside the index set");
    comps[pos] = v;
  }
  return tuple_element(index, comps);
}

template <typename T>
void guard_result_size(const std::vector<T>& xs) {
  if (xs.size() > kApplyObjLimit)
    throw size_limit_error("functor application result too large (" +
                           std::to_string(xs.size()) + " elements)");
}

/// Parallel enumeration of F(A) and F(B) along a map h : A → B. With h the
/// identity this enumerates the object action.
inline std::vector<std::pair<RegularElement, RegularElement>> map_pairs(
    const FunctorExpr& F, const FiniteMap& h, const IndexSet& index) {
  std::vector<std::pair<RegularElement, RegularElement>> out;
  const auto& n = F.node().v;
  if (const auto* k = std::get_if<KConstF>(&n)) {
    for (const RegularElement& c : k->constants) out.emplace_back(c, c);
  } else if (std::holds_alternative<SlotF>(n)) {
    for (const auto& [key, val] : h.entries()) out.emplace_back(key, val);
  } else if (const auto* p = std::get_if<VProdF>(&n)) {
    auto ls = map_pairs(p->lhs, h, index);
    auto rs = map_pairs(p->rhs, h, index);
    for (const auto& [x, fx] : ls)
      for (const auto& [y, gy] : rs)
        out.emplace_back(pair_element(x, y), pair_element(fx, gy));
  } else if (const auto* s = std::get_if<VSumF>(&n)) {
    for (const auto& [x, fx] : map_pairs(s->lhs, h, index))
      out.emplace_back(inl(x), inl(fx));
    for (const auto& [y, gy] : map_pairs(s->rhs, h, index))
      out.emplace_back(inr(y), inr(gy));
  } else if (const auto* fs = std::get_if<FamSumF>(&n)) {
    for (const auto& [cx, Fx] : fs->arms)
      for (const auto& [y, fy] : map_pairs(Fx, h, index))
        out.emplace_back(pair_element(cx, y), pair_element(cx, fy));
  } else {
    const auto& fp = std::get<FamProdF>(n);
    std::vector<std::vector<std::pair<RegularElement, RegularElement>>> per;
    per.reserve(fp.arms.size());
    std::size_t total = 1;
    for (const auto& [pos, Fx] : fp.arms) {
      per.push_back(map_pairs(Fx, h, index));
      total *= per.back().size();
      if (total > kApplyObjLimit)
        throw size_limit_error("family product too large to enumerate");
    }
    std::vector<std::size_t> choice(fp.arms.size(), 0);
    for (std::size_t count = 0; count < total; ++count) {
      std::vector<std::pair<unsigned, RegularElement>> src, dst;
      for (std::size_t i = 0; i < fp.arms.size(); ++i) {
        src.emplace_back(fp.arms[i].first, per[i][choice[i]].first);
        dst.emplace_back(fp.arms[i].first, per[i][choice[i]].second);
      }
      out.emplace_back(tuple_from_assignment(index, src),
                       tuple_from_assignment(index, dst));
      for (std::size_t i = 0; i < choice.size(); ++i) {
        if (++choice[i] < per[i].size()) break;
        choice[i] = 0;
      }
      if (fp.arms.empty()) break;
    }
  }
  guard_result_size(out);
  return out;
}

}  // namespace detail

/// Object action: the value set F(A).
inline std::vector<RegularElement> apply_obj(const FunctorExpr& F,
                                             const std::vector<RegularElement>& A,
                                             const IndexSet& index) {
  FiniteMap id = FiniteMap::identity_on(canonical_set(A));
  std::vector<RegularElement> out;
  for (auto& [src, _] : detail::map_pairs(F, id, index))
    out.push_back(std::move(src));
  return canonical_set(std::move(out));
}

/// Map action F(h); functorial in h. The domain of h is taken as the
/// argument object.
inline FiniteMap apply_map(const FunctorExpr& F, const FiniteMap& h,
                           const IndexSet& index) {
  FiniteMap out;
  for (const auto& [src, dst] : detail::map_pairs(F, h, index)) {
    // Distinct sources can coincide after canonicalization (e.g. repeated
    // constants); functoriality makes their images bisimilar.
    if (!out.find(src)) out.insert(src, dst);
  }
  return out;
}

/// The translation φ_A of a functor expression at carrier A: a term with
/// variables for A's elements such that F(h)(b) = subst(h, φ_A(b)) for
/// every h : A → U. Slot positions become variables and constants embed;
/// a bare slot admits no such term.
struct Translation {
  std::vector<RegularElement> carrier;  // canonical order; carrier[i] ↔ vars[i]
  std::vector<std::string> vars;
  std::vector<std::pair<RegularElement, TermX>> entries;  // key minimized

  const TermX& at(const RegularElement& b) const {
    RegularElement k = minimize(b);
    for (const auto& [key, term] : entries)
      if (structural_compare(key, k) == 0) return term;
    throw validation_error("element outside the translated object");
  }

  /// Variable environment matching a concrete map h : carrier → U.
  std::map<std::string, RegularElement> env(const FiniteMap& h) const {
    std::map<std::string, RegularElement> out;
    for (std::size_t i = 0; i < carrier.size(); ++i)
      out.emplace(vars[i], h.at(carrier[i]));
    return out;
  }
};

namespace detail {

inline std::vector<Leaf> padded_slots(const IndexSet& index, Leaf l0, Leaf l1) {
  std::vector<Leaf> slots;
  slots.reserve(index.size());
  slots.push_back(std::move(l0));
  slots.push_back(std::move(l1));
  for (unsigned i = 2; i < index.size(); ++i)
    slots.push_back(const_leaf(zero_element(index)));
  return slots;
}

/// Enumerates F(A) together with the leaf each element translates to.
inline std::vector<std::pair<RegularElement, Leaf>> translate_leaves(
    const FunctorExpr& F, const Translation& tr, const IndexSet& index) {
  std::vector<std::pair<RegularElement, Leaf>> out;
  const auto& n = F.node().v;
  if (const auto* k = std::get_if<KConstF>(&n)) {
    for (const RegularElement& c : k->constants)
      out.emplace_back(c, const_leaf(c));
  } else if (std::holds_alternative<SlotF>(n)) {
    for (std::size_t i = 0; i < tr.carrier.size(); ++i)
      out.emplace_back(tr.carrier[i], var_leaf(tr.vars[i]));
  } else if (const auto* p = std::get_if<VProdF>(&n)) {
    auto ls = translate_leaves(p->lhs, tr, index);
    auto rs = translate_leaves(p->rhs, tr, index);
    for (const auto& [x, lx] : ls)
      for (const auto& [y, ly] : rs)
        out.emplace_back(pair_element(x, y),
                         sub_term(TermX::tuple(padded_slots(index, lx, ly))));
  } else if (const auto* s = std::get_if<VSumF>(&n)) {
    for (const auto& [x, lx] : translate_leaves(s->lhs, tr, index))
      out.emplace_back(
          inl(x), sub_term(TermX::tuple(padded_slots(
                      index, const_leaf(zero_element(index)), lx))));
    for (const auto& [y, ly] : translate_leaves(s->rhs, tr, index))
      out.emplace_back(
          inr(y), sub_term(TermX::tuple(padded_slots(
                      index, const_leaf(atom_element(index)), ly))));
  } else if (const auto* fs = std::get_if<FamSumF>(&n)) {
    for (const auto& [cx, Fx] : fs->arms)
      for (const auto& [y, ly] : translate_leaves(Fx, tr, index))
        out.emplace_back(pair_element(cx, y),
                         sub_term(TermX::tuple(
                             padded_slots(index, const_leaf(cx), ly))));
  } else {
    const auto& fp = std::get<FamProdF>(n);
    std::vector<std::vector<std::pair<RegularElement, Leaf>>> per;
    std::size_t total = 1;
    for (const auto& [pos, Fx] : fp.arms) {
      per.push_back(translate_leaves(Fx, tr, index));
      total *= per.back().size();
      if (total > kApplyObjLimit)
        throw size_limit_error("family product too large to enumerate");
    }
    std::vector<std::size_t> choice(fp.arms.size(), 0);
    for (std::size_t count = 0; count < total; ++count) {
      std::vector<std::pair<unsigned, RegularElement>> assign;
      std::vector<Leaf> slots(index.size(), const_leaf(zero_element(index)));
      for (std::size_t i = 0; i < fp.arms.size(); ++i) {
        unsigned pos = fp.arms[i].first;
        if (pos >= index.size())
          throw validation_error("family-product index outside the index set");
        assign.emplace_back(pos, per[i][choice[i]].first);
        slots[pos] = per[i][choice[i]].second;
      }
      out.emplace_back(tuple_from_assignment(index, assign),
                       sub_term(TermX::tuple(std::move(slots))));
      for (std::size_t i = 0; i < choice.size(); ++i) {
        if (++choice[i] < per[i].size()) break;
        choice[i] = 0;
      }
      if (fp.arms.empty()) break;
    }
  }
  guard_result_size(out);
  return out;
}

}  // namespace detail

inline Translation translate(const FunctorExpr& F,
                             const std::vector<RegularElement>& A,
                             const IndexSet& index) {
  if (F.is_slot())
    throw validation_error(
        "bare slot: the identity functor is not uniform on maps");
  Translation tr;
  tr.carrier = canonical_set(A);
  for (std::size_t i = 0; i < tr.carrier.size(); ++i)
    tr.vars.push_back("a" + std::to_string(i));
  for (auto& [b, leaf] : detail::translate_leaves(F, tr, index)) {
    RegularElement key = minimize(b);
    bool present = false;
    for (const auto& [k, _] : tr.entries)
      if (structural_compare(k, key) == 0) {
        present = true;
        break;
      }
    if (present) continue;
    if (const auto* s = std::get_if<SubTerm>(&leaf)) {
      tr.entries.emplace_back(std::move(key), *s->term);
    } else if (const auto* c = std::get_if<ConstLeaf>(&leaf)) {
      tr.entries.emplace_back(std::move(key), sigma_embed(c->value));
    } else {
      // Unreachable: a variable leaf only arises from a bare slot.
      throw validation_error(
          "bare slot: the identity functor is not uniform on maps");
    }
  }
  return tr;
}

struct UniformOutcome {
  bool uniform;
  std::optional<RegularElement> counterexample;
};

namespace detail {

struct ElemVecLess {
  bool operator()(const std::vector<RegularElement>& a,
                  const std::vector<RegularElement>& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    for (std::size_t i = 0; i < a.size(); ++i) {
      int c = structural_compare(a[i], b[i]);
      if (c != 0) return c < 0;
    }
    return false;
  }
};

/// Decides whether some term leaf can send each supplied map h_j to the
/// required value v_j: a variable whose images match, a constant when all
/// values agree, or a tuple solved componentwise. A minimal witness term
/// never repeats a value vector along a path (a repeat could be spliced
/// out), so revisiting an open vector fails that branch. Only positive
/// results are memoized; a failure under an open ancestor is not a fact
/// about the vector itself.
class LeafRealizer {
 public:
  LeafRealizer(const std::vector<RegularElement>& carrier,
               const std::vector<FiniteMap>& hs)
      : carrier_(carrier), hs_(hs) {}

  bool realizable(std::vector<RegularElement> values) {
    for (auto& v : values) v = minimize(v);
    if (memo_true_.count(values)) return true;
    if (open_.count(values)) return false;
    for (const RegularElement& a : carrier_) {
      bool all = true;
      for (std::size_t j = 0; j < hs_.size(); ++j)
        if (!bisim(hs_[j].at(a), values[j]).bisimilar) {
          all = false;
          break;
        }
      if (all) return true;
    }
    if (all_equal(values)) return true;
    bool atoms = values[0].coalgebra().shape(values[0].root()).is_atom();
    for (const RegularElement& v : values)
      if (v.coalgebra().shape(v.root()).is_atom() != atoms) return false;
    if (atoms) return true;
    open_.insert(values);
    bool ok = true;
    const unsigned k = values[0].index().size();
    for (unsigned i = 0; i < k && ok; ++i) {
      std::vector<RegularElement> comps;
      for (const RegularElement& v : values)
        comps.emplace_back(v.coalgebra(),
                           v.coalgebra().shape(v.root()).children()[i]);
      ok = realizable(std::move(comps));
    }
    open_.erase(values);
    if (ok) memo_true_.insert(values);
    return ok;
  }

  /// Top-level terms are atoms or tuples, never bare variables.
  bool realizable_top(std::vector<RegularElement> values) {
    for (auto& v : values) v = minimize(v);
    if (all_equal(values)) return true;
    bool atoms = values[0].coalgebra().shape(values[0].root()).is_atom();
    for (const RegularElement& v : values)
      if (v.coalgebra().shape(v.root()).is_atom() != atoms) return false;
    if (atoms) return true;
    const unsigned k = values[0].index().size();
    for (unsigned i = 0; i < k; ++i) {
      std::vector<RegularElement> comps;
      for (const RegularElement& v : values)
        comps.emplace_back(v.coalgebra(),
                           v.coalgebra().shape(v.root()).children()[i]);
      if (!realizable(std::move(comps))) return false;
    }
    return true;
  }

 private:
  static bool all_equal(const std::vector<RegularElement>& values) {
    for (std::size_t j = 1; j < values.size(); ++j)
      if (structural_compare(values[0], values[j]) != 0) return false;
    return true;
  }

  const std::vector<RegularElement>& carrier_;
  const std::vector<FiniteMap>& hs_;
  std::set<std::vector<RegularElement>, ElemVecLess> memo_true_;
  std::set<std::vector<RegularElement>, ElemVecLess> open_;
};

}  // namespace detail

/// Checks the uniformity equation F(h) = ĥ ∘ φ_A pointwise against the
/// supplied maps. Translatable functors are verified through their
/// translation; a bare slot falls back to searching for any consistent
/// translation value, which fails exactly when the required values
/// disagree in shape.
inline UniformOutcome uniform_check(const FunctorExpr& F,
                                    const std::vector<RegularElement>& A,
                                    const std::vector<FiniteMap>& hs,
                                    const IndexSet& index) {
  std::vector<RegularElement> carrier = canonical_set(A);
  if (!F.is_slot()) {
    Translation tr = translate(F, carrier, index);
    for (const FiniteMap& h : hs) {
      auto env = tr.env(h);
      FiniteMap fh = apply_map(F, h, index);
      for (const auto& [b, term] : tr.entries) {
        RegularElement lhs = fh.at(b);
        RegularElement rhs = subst(env, term, index);
        if (!bisim(lhs, rhs).bisimilar) return {false, b};
      }
    }
    return {true, std::nullopt};
  }
  detail::LeafRealizer realizer(carrier, hs);
  for (const RegularElement& b : carrier) {
    std::vector<RegularElement> values;
    values.reserve(hs.size());
    for (const FiniteMap& h : hs) values.push_back(h.at(b));
    if (!realizer.realizable_top(std::move(values))) return {false, b};
  }
  return {true, std::nullopt};
}

/// A coalgebra for a functor expression: named carrier points and a step
/// value of shape F(carrier) per point.
class FValue;
namespace detail {
struct FValueNode;
}  // namespace detail

class FValue {
 public:
  static FValue constant(RegularElement v);
  static FValue point(std::string name);
  static FValue pair(FValue l, FValue r);
  static FValue tag(bool right, FValue v);
  static FValue fam_sum(RegularElement idx, FValue v);
  static FValue fam_prod(std::vector<std::pair<unsigned, FValue>> comps);
  const detail::FValueNode& node() const { return *node_; }

 private:
  explicit FValue(std::shared_ptr<const detail::FValueNode> n)
      : node_(std::move(n)) {}
  std::shared_ptr<const detail::FValueNode> node_;
};

namespace detail {
struct FConst {
  RegularElement value;
};
struct FPoint {
  std::string name;
};
struct FPairV {
  FValue lhs;
  FValue rhs;
};
struct FTagV {
  bool right;
  FValue value;
};
struct FFamSumV {
  RegularElement idx;
  FValue value;
};
struct FFamProdV {
  std::vector<std::pair<unsigned, FValue>> comps;
};
struct FValueNode {
  std::variant<FConst, FPoint, FPairV, FTagV, FFamSumV, FFamProdV> v;
};
}  // namespace detail

inline FValue FValue::constant(RegularElement v) {
  return FValue(std::make_shared<const detail::FValueNode>(
      detail::FValueNode{detail::FConst{std::move(v)}}));
}
inline FValue FValue::point(std::string name) {
  return FValue(std::make_shared<const detail::FValueNode>(
      detail::FValueNode{detail::FPoint{std::move(name)}}));
}
inline FValue FValue::pair(FValue l, FValue r) {
  return FValue(std::make_shared<const detail::FValueNode>(
      detail::FValueNode{detail::FPairV{std::move(l), std::move(r)}}));
}
inline FValue FValue::tag(bool right, FValue v) {
  return FValue(std::make_shared<const detail::FValueNode>(
      detail::FValueNode{detail::FTagV{right, std::move(v)}}));
}
inline FValue FValue::fam_sum(RegularElement idx, FValue v) {
  return FValue(std::make_shared<const detail::FValueNode>(
      detail::FValueNode{detail::FFamSumV{std::move(idx), std::move(v)}}));
}
inline FValue FValue::fam_prod(
    std::vector<std::pair<unsigned, FValue>> comps) {
  return FValue(std::make_shared<const detail::FValueNode>(
      detail::FValueNode{detail::FFamProdV{std::move(comps)}}));
}

struct FCoalgebra {
  IndexSet index;
  std::vector<std::pair<std::string, FValue>> points;  // step per point
};

namespace detail {

inline Leaf value_leaf(const FunctorExpr& F, const FValue& v,
                       const IndexSet& index);

inline TermX value_term(const FunctorExpr& F, const FValue& v,
                        const IndexSet& index) {
  Leaf leaf = value_leaf(F, v, index);
  if (const auto* s = std::get_if<SubTerm>(&leaf)) return *s->term;
  if (const auto* c = std::get_if<ConstLeaf>(&leaf))
    return sigma_embed(c->value);
  throw validation_error(
      "bare slot: the identity functor is not uniform on maps");
}

inline Leaf value_leaf(const FunctorExpr& F, const FValue& v,
                       const IndexSet& index) {
  const auto& fn = F.node().v;
  const auto& vn = v.node().v;
  if (const auto* k = std::get_if<KConstF>(&fn)) {
    const auto* c = std::get_if<FConst>(&vn);
    if (!c) throw validation_error("step value does not match the functor");
    for (const RegularElement& e : k->constants)
      if (bisim(e, c->value).bisimilar) return const_leaf(c->value);
    throw validation_error("constant outside the constant functor's set");
  }
  if (std::holds_alternative<SlotF>(fn)) {
    const auto* p = std::get_if<FPoint>(&vn);
    if (!p) throw validation_error("step value does not match the functor");
    return var_leaf(p->name);
  }
  if (const auto* prod = std::get_if<VProdF>(&fn)) {
    const auto* pv = std::get_if<FPairV>(&vn);
    if (!pv) throw validation_error("step value does not match the functor");
    return sub_term(TermX::tuple(
        padded_slots(index, value_leaf(prod->lhs, pv->lhs, index),
                     value_leaf(prod->rhs, pv->rhs, index))));
  }
  if (const auto* sum = std::get_if<VSumF>(&fn)) {
    const auto* tv = std::get_if<FTagV>(&vn);
    if (!tv) throw validation_error("step value does not match the functor");
    Leaf tag = tv->right ? const_leaf(atom_element(index))
                         : const_leaf(zero_element(index));
    Leaf payload = value_leaf(tv->right ? sum->rhs : sum->lhs, tv->value, index);
    return sub_term(TermX::tuple(padded_slots(index, tag, payload)));
  }
  if (const auto* fs = std::get_if<FamSumF>(&fn)) {
    const auto* sv = std::get_if<FFamSumV>(&vn);
    if (!sv) throw validation_error("step value does not match the functor");
    for (const auto& [cx, Fx] : fs->arms)
      if (bisim(cx, sv->idx).bisimilar)
        return sub_term(TermX::tuple(
            padded_slots(index, const_leaf(sv->idx),
                         value_leaf(Fx, sv->value, index))));
    throw validation_error("family-sum tag outside the family's index set");
  }
  const auto& fp = std::get<FamProdF>(fn);
  const auto* pv = std::get_if<FFamProdV>(&vn);
  if (!pv) throw validation_error("step value does not match the functor");
  if (pv->comps.size() != fp.arms.size())
    throw validation_error("family-product components do not match the family");
  std::vector<Leaf> slots(index.size(), const_leaf(zero_element(index)));
  for (const auto& [pos, Fx] : fp.arms) {
    bool found = false;
    for (const auto& [vpos, vv] : pv->comps)
      if (vpos == pos) {
        if (pos >= index.size())
          throw validation_error("family-product index outside the index set");
        slots[pos] = value_leaf(Fx, vv, index);
        found = true;
        break;
      }
    if (!found)
      throw validation_error("family-product component missing at an index");
  }
  return sub_term(TermX::tuple(std::move(slots)));
}

}  // namespace detail

/// Concrete evaluation of F(h) at a step value: points go through h,
/// constructors evaluate into the universe.
inline RegularElement eval_value(
    const FunctorExpr& F, const FValue& v,
    const std::map<std::string, RegularElement>& h, const IndexSet& index) {
  const auto& fn = F.node().v;
  const auto& vn = v.node().v;
  if (std::holds_alternative<detail::KConstF>(fn))
    return std::get<detail::FConst>(vn).value;
  if (std::holds_alternative<detail::SlotF>(fn)) {
    const auto& p = std::get<detail::FPoint>(vn);
    auto it = h.find(p.name);
    if (it == h.end())
      throw validation_error("unbound carrier point '" + p.name + "'");
    return it->second;
  }
  if (const auto* prod = std::get_if<detail::VProdF>(&fn)) {
    const auto& pv = std::get<detail::FPairV>(vn);
    return pair_element(eval_value(prod->lhs, pv.lhs, h, index),
                        eval_value(prod->rhs, pv.rhs, h, index));
  }
  if (const auto* sum = std::get_if<detail::VSumF>(&fn)) {
    const auto& tv = std::get<detail::FTagV>(vn);
    RegularElement payload =
        eval_value(tv.right ? sum->rhs : sum->lhs, tv.value, h, index);
    return tv.right ? inr(payload) : inl(payload);
  }
  if (const auto* fs = std::get_if<detail::FamSumF>(&fn)) {
    const auto& sv = std::get<detail::FFamSumV>(vn);
    for (const auto& [cx, Fx] : fs->arms)
      if (bisim(cx, sv.idx).bisimilar)
        return pair_element(sv.idx, eval_value(Fx, sv.value, h, index));
    throw validation_error("family-sum tag outside the family's index set");
  }
  const auto& fp = std::get<detail::FamProdF>(fn);
  const auto& pv = std::get<detail::FFamProdV>(vn);
  std::vector<std::pair<unsigned, RegularElement>> assign;
  for (const auto& [pos, Fx] : fp.arms) {
    bool found = false;
    for (const auto& [vpos, vv] : pv.comps)
      if (vpos == pos) {
        assign.emplace_back(pos, eval_value(Fx, vv, h, index));
        found = true;
        break;
      }
    if (!found)
      throw validation_error("family-product component missing at an index");
  }
  return detail::tuple_from_assignment(index, assign);
}

/// The finalization map of the special final coalgebra construction:
/// turns the coalgebra's step into a system of equations through the
/// translation and solves it. The result is the unique (up to
/// bisimilarity) h with h = F(h) ∘ f.
inline std::map<std::string, RegularElement> finalize(const FunctorExpr& F,
                                                      const FCoalgebra& c) {
  if (F.is_slot())
    throw validation_error(
        "bare slot: the identity functor is not uniform on maps");
  std::vector<std::pair<std::string, TermX>> equations;
  equations.reserve(c.points.size());
  for (const auto& [name, step] : c.points)
    equations.emplace_back(name, detail::value_term(F, step, c.index));
  return solve(EquationSystem(c.index, std::move(equations)));
}

/// Post-fixedpoint certificate: Z ⊆ F(Z) up to bisimilarity. This is the
/// membership test for the greatest fixedpoint.
inline bool post_fixpoint_check(const FunctorExpr& F,
                                const std::vector<RegularElement>& Z,
                                const IndexSet& index) {
  std::vector<RegularElement> zc = canonical_set(Z);
  std::vector<RegularElement> fz = apply_obj(F, zc, index);
  for (const RegularElement& z : zc) {
    bool found = false;
    for (const RegularElement& w : fz)
      if (structural_compare(z, w) == 0) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

/// Members of {1} ∪ (I →̃ Z) at the symbolic level: the atom plus every
/// I-tuple over Z. Exponential in |I|, so guarded.
inline std::vector<RegularElement> q_members(
    const std::vector<RegularElement>& Z, const IndexSet& index) {
  std::vector<RegularElement> zc = canonical_set(Z);
  std::size_t total = 1;
  for (unsigned i = 0; i < index.size(); ++i) {
    total *= zc.size();
    if (total > kApplyObjLimit)
      throw size_limit_error("tuple space too large to enumerate");
  }
  std::vector<RegularElement> out{atom_element(index)};
  if (zc.empty() && index.size() > 0) return canonical_set(std::move(out));
  std::vector<std::size_t> choice(index.size(), 0);
  for (std::size_t count = 0; count < total; ++count) {
    std::vector<RegularElement> comps;
    comps.reserve(index.size());
    for (unsigned i = 0; i < index.size(); ++i) comps.push_back(zc[choice[i]]);
    out.push_back(tuple_element(index, comps));
    for (std::size_t i = 0; i < choice.size(); ++i) {
      if (++choice[i] < zc.size()) break;
      choice[i] = 0;
    }
    if (index.size() == 0) break;
  }
  return canonical_set(std::move(out));
}

/// Z ⊆ {1} ∪ (I →̃ Z) up to bisimilarity.
inline bool q_post_fixpoint(const std::vector<RegularElement>& Z,
                            const IndexSet& index) {
  std::vector<RegularElement> zc = canonical_set(Z);
  std::vector<RegularElement> qz = q_members(zc, index);
  for (const RegularElement& z : zc) {
    bool found = false;
    for (const RegularElement& w : qz)
      if (structural_compare(z, w) == 0) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

}  // namespace vset
