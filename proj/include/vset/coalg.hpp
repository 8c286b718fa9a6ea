#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vset/variant.hpp"

namespace vset {

/// The fixed index set I: the finite ordinals 0..k-1 as sets.
class IndexSet {
 public:
  explicit IndexSet(unsigned size) : size_(size) {
    indices_.reserve(size);
    HFSet o;
    for (unsigned i = 0; i < size; ++i) {
      indices_.push_back(o);
      o = set_union(o, singleton(o));
    }
  }

  unsigned size() const { return size_; }
  HFSet index(unsigned i) const { return indices_[i]; }
  const std::vector<HFSet>& indices() const { return indices_; }

  /// Position of x within I, or absent when x ∉ I.
  std::optional<unsigned> position(HFSet x) const {
    for (unsigned i = 0; i < size_; ++i)
      if (indices_[i] == x) return i;
    return std::nullopt;
  }

  friend bool operator==(const IndexSet& a, const IndexSet& b) {
    return a.size_ == b.size_;
  }
  friend bool operator!=(const IndexSet& a, const IndexSet& b) {
    return a.size_ != b.size_;
  }

 private:
  unsigned size_;
  std::vector<HFSet> indices_;
};

using StateId = std::uint32_t;

/// One transition: a state is either the atom 1 or an I-indexed tuple of
/// successor states.
class NodeShape {
 public:
  static NodeShape atom() { return NodeShape(true, {}); }
  static NodeShape tuple(std::vector<StateId> children) {
    return NodeShape(false, std::move(children));
  }

  bool is_atom() const { return atom_; }
  const std::vector<StateId>& children() const { return children_; }

  friend bool operator==(const NodeShape& a, const NodeShape& b) {
    return a.atom_ == b.atom_ && a.children_ == b.children_;
  }

 private:
  NodeShape(bool atom, std::vector<StateId> children)
      : atom_(atom), children_(std::move(children)) {}
  bool atom_;
  std::vector<StateId> children_;
};

/// A finite coalgebra for the functor A ↦ {1} ∪ (I →̃ A): a total
/// transition map on states 0..n-1.
class QCoalgebra {
 public:
  QCoalgebra(IndexSet index, std::vector<NodeShape> trans)
      : index_(std::move(index)), trans_(std::move(trans)) {}

  const IndexSet& index() const { return index_; }
  std::size_t state_count() const { return trans_.size(); }
  const NodeShape& shape(StateId s) const { return trans_[s]; }
  const std::vector<NodeShape>& transitions() const { return trans_; }

  friend bool operator==(const QCoalgebra& a, const QCoalgebra& b) {
    return a.index_ == b.index_ && a.trans_ == b.trans_;
  }

 private:
  IndexSet index_;
  std::vector<NodeShape> trans_;
};

/// A pointed finite coalgebra: the symbolic form of one (possibly
/// non-well-founded) nested tuple. Total transitions are exactly the
/// certificate that every reachable state denotes a value.
class RegularElement {
 public:
  RegularElement(QCoalgebra coalg, StateId root)
      : coalg_(std::move(coalg)), root_(root) {}

  const QCoalgebra& coalgebra() const { return coalg_; }
  const IndexSet& index() const { return coalg_.index(); }
  StateId root() const { return root_; }

  friend bool operator==(const RegularElement& a, const RegularElement& b) {
    return a.root_ == b.root_ && a.coalg_ == b.coalg_;
  }

 private:
  QCoalgebra coalg_;
  StateId root_;
};

/// Validating constructor: every tuple must have arity |I| and every
/// child reference must resolve.
inline RegularElement build(IndexSet index, std::vector<NodeShape> trans,
                            StateId root) {
  const std::size_t n = trans.size();
  if (root >= n) throw validation_error("root names an unknown state");
  for (const NodeShape& s : trans) {
    if (s.is_atom()) continue;
    if (s.children().size() != index.size())
      throw validation_error("tuple arity does not match the index set");
    for (StateId c : s.children())
      if (c >= n) throw validation_error("transition names an unknown state");
  }
  return RegularElement(QCoalgebra(std::move(index), std::move(trans)), root);
}

/// The atom 1.
inline RegularElement atom_element(const IndexSet& index) {
  return build(index, {NodeShape::atom()}, 0);
}

/// The zero element: 0 = λ̃_{i∈I} 0, a tuple all of whose components are
/// itself. This cyclic state is the only representation 0 has.
inline RegularElement zero_element(const IndexSet& index) {
  return build(index, {NodeShape::tuple(std::vector<StateId>(index.size(), 0))},
               0);
}

/// Tuple former λ̃_{i∈I} comps[i]: grafts the component coalgebras under a
/// fresh root state.
inline RegularElement tuple_element(const IndexSet& index,
                                    const std::vector<RegularElement>& comps) {
  if (comps.size() != index.size())
    throw validation_error("tuple arity does not match the index set");
  std::vector<NodeShape> trans;
  trans.push_back(NodeShape::atom());  // placeholder root, patched below
  std::vector<StateId> roots;
  for (const RegularElement& c : comps) {
    if (c.index() != index)
      throw validation_error("component index set mismatch");
    StateId offset = static_cast<StateId>(trans.size());
    for (const NodeShape& s : c.coalgebra().transitions()) {
      if (s.is_atom()) {
        trans.push_back(NodeShape::atom());
      } else {
        std::vector<StateId> kids;
        kids.reserve(s.children().size());
        for (StateId k : s.children()) kids.push_back(k + offset);
        trans.push_back(NodeShape::tuple(std::move(kids)));
      }
    }
    roots.push_back(c.root() + offset);
  }
  trans[0] = NodeShape::tuple(std::move(roots));
  return RegularElement(QCoalgebra(index, std::move(trans)), 0);
}

/// Variant pair ⟨a;b⟩ inside U: components at indices 0 and 1, the zero
/// element at every other index. Requires |I| ≥ 2.
inline RegularElement pair_element(const RegularElement& a,
                                   const RegularElement& b) {
  const IndexSet& index = a.index();
  if (index.size() < 2)
    throw validation_error("pairs need an index set of size at least 2");
  std::vector<RegularElement> comps{a, b};
  for (unsigned i = 2; i < index.size(); ++i)
    comps.push_back(zero_element(index));
  return tuple_element(index, comps);
}

inline constexpr unsigned kMaxExpandDepth = 12;

/// Finite approximation π_n of the denoted set: π_0 = 0,
/// π_{n+1} = 1 for atoms and λ̃_{i∈I} π_n(child_i) for tuples.
inline HFSet expand(const RegularElement& e, unsigned depth) {
  if (depth > kMaxExpandDepth)
    throw depth_limit_error("expansion depth " + std::to_string(depth) +
                            " exceeds the guard of " +
                            std::to_string(kMaxExpandDepth));
  const QCoalgebra& c = e.coalgebra();
  const std::size_t n = c.state_count();
  std::vector<HFSet> cur(n);  // π_0 = 0 everywhere
  HFSet one = singleton(HFSet());
  for (unsigned d = 1; d <= depth; ++d) {
    std::vector<HFSet> next(n);
    for (std::size_t s = 0; s < n; ++s) {
      const NodeShape& shape = c.shape(static_cast<StateId>(s));
      if (shape.is_atom()) {
        next[s] = one;
      } else {
        Family fam;
        for (unsigned i = 0; i < c.index().size(); ++i)
          fam.set(c.index().index(i), cur[shape.children()[i]]);
        next[s] = vlambda(fam);
      }
    }
    cur = std::move(next);
  }
  return cur[e.root()];
}

struct BisimOutcome {
  bool bisimilar;
  /// Least n with π_n differing; meaningful only when !bisimilar.
  unsigned depth;
};

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0u);
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::uint32_t> parent_;
};

/// Least depth at which the expansions of the two pointed states differ
/// (UINT_MAX when they never do). Value iteration over the reachable
/// product states: a kind mismatch shows up at depth 1, tuples differ one
/// step after their earliest differing component.
inline unsigned expansion_distance(const QCoalgebra& c1, StateId r1,
                                   const QCoalgebra& c2, StateId r2) {
  constexpr unsigned kInf = std::numeric_limits<unsigned>::max();
  const unsigned k = c1.index().size();
  std::map<std::pair<StateId, StateId>, unsigned> dist;
  std::deque<std::pair<StateId, StateId>> todo{{r1, r2}};
  std::vector<std::pair<StateId, StateId>> pairs;
  while (!todo.empty()) {
    auto p = todo.front();
    todo.pop_front();
    if (dist.count(p)) continue;
    dist[p] = kInf;
    pairs.push_back(p);
    const NodeShape& s1 = c1.shape(p.first);
    const NodeShape& s2 = c2.shape(p.second);
    if (!s1.is_atom() && !s2.is_atom())
      for (unsigned i = 0; i < k; ++i)
        todo.push_back({s1.children()[i], s2.children()[i]});
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : pairs) {
      const NodeShape& s1 = c1.shape(p.first);
      const NodeShape& s2 = c2.shape(p.second);
      unsigned d;
      if (s1.is_atom() != s2.is_atom()) {
        d = 1;
      } else if (s1.is_atom()) {
        d = kInf;
      } else {
        unsigned best = kInf;
        for (unsigned i = 0; i < k; ++i) {
          unsigned cd = dist.at({s1.children()[i], s2.children()[i]});
          best = std::min(best, cd);
        }
        d = best == kInf ? kInf : best + 1;
      }
      if (d < dist.at(p)) {
        dist[p] = d;
        changed = true;
      }
    }
  }
  return dist[{r1, r2}];
}

}  // namespace detail

/// Decides equality of denotations. Union-find closure over the product
/// of the state sets: branching is deterministic per index, so merging
/// reachable pairs classwise suffices. On failure the least depth at
/// which the expansions differ is reported.
inline BisimOutcome bisim(const RegularElement& e1, const RegularElement& e2) {
  if (e1.index() != e2.index())
    throw validation_error("bisimulation across different index sets");
  const QCoalgebra& c1 = e1.coalgebra();
  const QCoalgebra& c2 = e2.coalgebra();
  const std::uint32_t n1 = static_cast<std::uint32_t>(c1.state_count());
  const unsigned k = c1.index().size();
  detail::UnionFind uf(n1 + c2.state_count());
  auto shape_of = [&](std::uint32_t g) -> const NodeShape& {
    return g < n1 ? c1.shape(g) : c2.shape(g - n1);
  };
  std::deque<std::pair<std::uint32_t, std::uint32_t>> todo{
      {e1.root(), n1 + e2.root()}};
  bool equal = true;
  while (!todo.empty() && equal) {
    auto [x, y] = todo.front();
    todo.pop_front();
    if (uf.find(x) == uf.find(y)) continue;
    const NodeShape& sx = shape_of(x);
    const NodeShape& sy = shape_of(y);
    if (sx.is_atom() != sy.is_atom()) {
      equal = false;
      break;
    }
    uf.unite(x, y);
    if (!sx.is_atom())
      for (unsigned i = 0; i < k; ++i)
        todo.push_back({x < n1 ? sx.children()[i] : sx.children()[i] + n1,
                        y < n1 ? sy.children()[i] : sy.children()[i] + n1});
  }
  if (equal) return {true, 0};
  return {false,
          detail::expansion_distance(c1, e1.root(), c2, e2.root())};
}

/// Canonical quotient by bisimilarity: partition refinement on the
/// reachable part, then breadth-first renumbering from the root. Two
/// bisimilar elements minimize to structurally identical values.
inline RegularElement minimize(const RegularElement& e) {
  const QCoalgebra& c = e.coalgebra();
  const unsigned k = c.index().size();

  // Reachable states only.
  std::vector<StateId> reach;
  std::vector<std::int64_t> seen(c.state_count(), -1);
  std::deque<StateId> todo{e.root()};
  while (!todo.empty()) {
    StateId s = todo.front();
    todo.pop_front();
    if (seen[s] >= 0) continue;
    seen[s] = static_cast<std::int64_t>(reach.size());
    reach.push_back(s);
    if (!c.shape(s).is_atom())
      for (StateId child : c.shape(s).children()) todo.push_back(child);
  }

  // Moore refinement, starting from the atom/tuple split.
  std::vector<std::uint32_t> cls(reach.size());
  for (std::size_t i = 0; i < reach.size(); ++i)
    cls[i] = c.shape(reach[i]).is_atom() ? 0 : 1;
  for (;;) {
    std::map<std::vector<std::uint32_t>, std::uint32_t> sig_ids;
    std::vector<std::uint32_t> next(reach.size());
    for (std::size_t i = 0; i < reach.size(); ++i) {
      std::vector<std::uint32_t> sig{cls[i]};
      const NodeShape& s = c.shape(reach[i]);
      if (!s.is_atom())
        for (unsigned j = 0; j < k; ++j)
          sig.push_back(cls[seen[s.children()[j]]]);
      auto [it, _] = sig_ids.emplace(std::move(sig),
                                     static_cast<std::uint32_t>(sig_ids.size()));
      next[i] = it->second;
    }
    if (next == cls) break;
    cls = std::move(next);
  }

  // Breadth-first renumbering of classes from the root class.
  auto class_of = [&](StateId orig) { return cls[seen[orig]]; };
  std::map<std::uint32_t, StateId> renum;
  std::vector<StateId> rep;  // representative original state per new id
  std::deque<StateId> order{e.root()};
  while (!order.empty()) {
    StateId s = order.front();
    order.pop_front();
    auto [it, inserted] =
        renum.emplace(class_of(s), static_cast<StateId>(renum.size()));
    if (!inserted) continue;
    rep.push_back(s);
    if (!c.shape(s).is_atom())
      for (StateId child : c.shape(s).children()) order.push_back(child);
  }
  std::vector<NodeShape> trans;
  trans.reserve(rep.size());
  for (StateId s : rep) {
    const NodeShape& sh = c.shape(s);
    if (sh.is_atom()) {
      trans.push_back(NodeShape::atom());
    } else {
      std::vector<StateId> kids;
      kids.reserve(k);
      for (StateId child : sh.children()) kids.push_back(renum.at(class_of(child)));
      trans.push_back(NodeShape::tuple(std::move(kids)));
    }
  }
  return RegularElement(QCoalgebra(c.index(), std::move(trans)),
                        renum.at(class_of(e.root())));
}

/// Total order on elements via their canonical (minimized) form; used to
/// key finite maps so that lookup respects bisimilarity.
inline int structural_compare(const RegularElement& a,
                              const RegularElement& b) {
  if (a.index().size() != b.index().size())
    return a.index().size() < b.index().size() ? -1 : 1;
  if (a.root() != b.root()) return a.root() < b.root() ? -1 : 1;
  const auto& ta = a.coalgebra().transitions();
  const auto& tb = b.coalgebra().transitions();
  if (ta.size() != tb.size()) return ta.size() < tb.size() ? -1 : 1;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (ta[i].is_atom() != tb[i].is_atom()) return ta[i].is_atom() ? -1 : 1;
    if (ta[i].children() != tb[i].children())
      return ta[i].children() < tb[i].children() ? -1 : 1;
  }
  return 0;
}

/// Parses a concrete well-founded set back into symbolic form: h must be
/// 1, 0, or a set of standard pairs ⟨i,y⟩ with i ∈ I whose componentwise
/// images decompose in turn. Absent result means h is not such a value.
inline std::optional<RegularElement> from_hf(HFSet h, const IndexSet& index) {
  std::vector<NodeShape> trans;
  std::unordered_map<HFSet, StateId> states;
  HFSet one = singleton(HFSet());

  auto parse = [&](auto&& self, HFSet v) -> std::optional<StateId> {
    if (auto it = states.find(v); it != states.end()) return it->second;
    if (v == one) {
      StateId s = static_cast<StateId>(trans.size());
      trans.push_back(NodeShape::atom());
      states.emplace(v, s);
      return s;
    }
    if (v.is_empty()) {
      StateId s = static_cast<StateId>(trans.size());
      trans.push_back(NodeShape::tuple(std::vector<StateId>(index.size(), s)));
      states.emplace(v, s);
      return s;
    }
    // Candidate tuple: every member must be ⟨i,y⟩ with i ∈ I.
    for (HFSet m : v.members()) {
      auto p = kpair_split(m);
      if (!p || !index.position(p->first)) return std::nullopt;
    }
    StateId s = static_cast<StateId>(trans.size());
    trans.push_back(NodeShape::atom());  // placeholder, patched below
    states.emplace(v, s);
    std::vector<StateId> kids;
    kids.reserve(index.size());
    for (unsigned i = 0; i < index.size(); ++i) {
      auto child = self(self, image(v, singleton(index.index(i))));
      if (!child) return std::nullopt;
      kids.push_back(*child);
    }
    trans[s] = NodeShape::tuple(std::move(kids));
    return s;
  };

  auto root = parse(parse, h);
  if (!root) return std::nullopt;
  return RegularElement(QCoalgebra(index, std::move(trans)), *root);
}

}  // namespace vset
