#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "vset/coalg.hpp"

namespace vset {

class TermX;

/// A tuple slot: a variable, a nested term, or an embedded constant.
/// Constants carry whole elements so that cyclic values (which have no
/// finite variable-free term tree) can appear on right-hand sides.
struct VarLeaf {
  std::string name;
};
struct SubTerm {
  std::shared_ptr<const TermX> term;
};
struct ConstLeaf {
  RegularElement value;
};
using Leaf = std::variant<VarLeaf, SubTerm, ConstLeaf>;

/// Right-hand-side syntax for set equations: the atom 1 or an I-indexed
/// tuple of leaves.
class TermX {
 public:
  static TermX atom() { return TermX(std::vector<Leaf>{}, true); }
  static TermX tuple(std::vector<Leaf> slots) {
    return TermX(std::move(slots), false);
  }

  bool is_atom() const { return atom_; }
  const std::vector<Leaf>& slots() const { return slots_; }

 private:
  TermX(std::vector<Leaf> slots, bool atom)
      : slots_(std::move(slots)), atom_(atom) {}
  std::vector<Leaf> slots_;
  bool atom_;
};

inline Leaf var_leaf(std::string name) { return VarLeaf{std::move(name)}; }
inline Leaf sub_term(TermX t) {
  return SubTerm{std::make_shared<const TermX>(std::move(t))};
}
inline Leaf const_leaf(RegularElement e) { return ConstLeaf{std::move(e)}; }

/// A system of equations x = ν_x: an index set, variables, and one
/// right-hand side per variable (in declaration order).
class EquationSystem {
 public:
  EquationSystem(IndexSet index,
                 std::vector<std::pair<std::string, TermX>> equations)
      : index_(std::move(index)), equations_(std::move(equations)) {}

  const IndexSet& index() const { return index_; }
  const std::vector<std::pair<std::string, TermX>>& equations() const {
    return equations_;
  }

  bool defines(const std::string& name) const {
    for (const auto& [n, _] : equations_)
      if (n == name) return true;
    return false;
  }

 private:
  IndexSet index_;
  std::vector<std::pair<std::string, TermX>> equations_;
};

namespace detail {

/// Flattens terms into coalgebra states: one fresh state per tuple node,
/// grafted copies for constants, and a caller-supplied resolution for
/// variables. State numbers are allocated deterministically in input
/// order.
class Flattener {
 public:
  explicit Flattener(const IndexSet& index) : index_(index) {}

  StateId fresh() {
    trans_.push_back(NodeShape::atom());
    return static_cast<StateId>(trans_.size() - 1);
  }

  template <typename VarResolve>
  void flatten_into(StateId target, const TermX& t, VarResolve&& var) {
    if (t.is_atom()) {
      trans_[target] = NodeShape::atom();
      return;
    }
    if (t.slots().size() != index_.size())
      throw validation_error("tuple arity does not match the index set");
    std::vector<StateId> kids;
    kids.reserve(t.slots().size());
    for (const Leaf& leaf : t.slots()) kids.push_back(resolve(leaf, var));
    trans_[target] = NodeShape::tuple(std::move(kids));
  }

  StateId graft(const RegularElement& e) {
    if (e.index() != index_)
      throw validation_error("constant index set mismatch");
    StateId offset = static_cast<StateId>(trans_.size());
    for (const NodeShape& s : e.coalgebra().transitions()) {
      if (s.is_atom()) {
        trans_.push_back(NodeShape::atom());
      } else {
        std::vector<StateId> kids;
        kids.reserve(s.children().size());
        for (StateId k : s.children()) kids.push_back(k + offset);
        trans_.push_back(NodeShape::tuple(std::move(kids)));
      }
    }
    return e.root() + offset;
  }

  RegularElement element(StateId root) const {
    return build(index_, trans_, root);
  }

 private:
  template <typename VarResolve>
  StateId resolve(const Leaf& leaf, VarResolve&& var) {
    if (const auto* v = std::get_if<VarLeaf>(&leaf)) return var(v->name);
    if (const auto* s = std::get_if<SubTerm>(&leaf)) {
      StateId st = fresh();
      flatten_into(st, *s->term, var);
      return st;
    }
    return graft(std::get<ConstLeaf>(leaf).value);
  }

  const IndexSet& index_;
  std::vector<NodeShape> trans_;
};

}  // namespace detail

/// Solves the system: every variable becomes a state, right-hand sides
/// flatten around those states, and each variable's value is the pointed
/// element at its state. The result satisfies f(x) ~ subst(f, ν_x) and is
/// unique up to bisimilarity.
inline std::map<std::string, RegularElement> solve(const EquationSystem& sys) {
  detail::Flattener fl(sys.index());
  std::map<std::string, StateId> var_state;
  for (const auto& [name, _] : sys.equations()) {
    if (var_state.count(name))
      throw validation_error("duplicate equation for variable '" + name + "'");
    var_state[name] = fl.fresh();
  }
  auto lookup = [&](const std::string& name) -> StateId {
    auto it = var_state.find(name);
    if (it == var_state.end())
      throw validation_error("unbound variable '" + name + "'");
    return it->second;
  };
  for (const auto& [name, rhs] : sys.equations())
    fl.flatten_into(var_state.at(name), rhs, lookup);
  std::map<std::string, RegularElement> out;
  for (const auto& [name, state] : var_state)
    out.emplace(name, fl.element(state));
  return out;
}

/// Substitution: grafts f(x) at every variable leaf and copies structure
/// elsewhere. subst(f, 1) = 1.
inline RegularElement subst(const std::map<std::string, RegularElement>& f,
                            const TermX& t, const IndexSet& index) {
  detail::Flattener fl(index);
  StateId root = fl.fresh();
  fl.flatten_into(root, t, [&](const std::string& name) -> StateId {
    auto it = f.find(name);
    if (it == f.end())
      throw validation_error("unbound variable '" + name + "'");
    return fl.graft(it->second);
  });
  return fl.element(root);
}

/// The embedding of a plain element as a variable-free term: the atom
/// maps to the atom term, a tuple to the tuple of its components as
/// constants. Never introduces a variable.
inline TermX sigma_embed(const RegularElement& u) {
  const NodeShape& root = u.coalgebra().shape(u.root());
  if (root.is_atom()) return TermX::atom();
  std::vector<Leaf> slots;
  slots.reserve(root.children().size());
  for (StateId child : root.children())
    slots.push_back(const_leaf(RegularElement(u.coalgebra(), child)));
  return TermX::tuple(std::move(slots));
}

/// A finite map between subsets of the value universe. Keys are canonical
/// minimized representatives, so lookup respects bisimilarity.
class FiniteMap {
 public:
  FiniteMap() = default;

  void insert(const RegularElement& key, RegularElement value) {
    RegularElement k = minimize(key);
    auto it = lower_bound(k);
    if (it != entries_.end() && structural_compare(it->first, k) == 0)
      throw validation_error("duplicate key in finite map");
    entries_.insert(it, {std::move(k), std::move(value)});
  }

  std::optional<RegularElement> find(const RegularElement& key) const {
    RegularElement k = minimize(key);
    auto it = lower_bound(k);
    if (it != entries_.end() && structural_compare(it->first, k) == 0)
      return it->second;
    return std::nullopt;
  }

  RegularElement at(const RegularElement& key) const {
    auto v = find(key);
    if (!v) throw validation_error("element outside the map's domain");
    return *v;
  }

  /// Entries in canonical key order.
  const std::vector<std::pair<RegularElement, RegularElement>>& entries()
      const {
    return entries_;
  }

  std::size_t size() const { return entries_.size(); }

  std::vector<RegularElement> domain() const {
    std::vector<RegularElement> d;
    d.reserve(entries_.size());
    for (const auto& e : entries_) d.push_back(e.first);
    return d;
  }

  static FiniteMap identity_on(const std::vector<RegularElement>& dom) {
    FiniteMap m;
    for (const RegularElement& e : dom) m.insert(e, e);
    return m;
  }

 private:
  std::vector<std::pair<RegularElement, RegularElement>>::const_iterator
  lower_bound(const RegularElement& k) const {
    return std::lower_bound(entries_.begin(), entries_.end(), k,
                            [](const auto& e, const RegularElement& key) {
                              return structural_compare(e.first, key) < 0;
                            });
  }
  std::vector<std::pair<RegularElement, RegularElement>>::iterator lower_bound(
      const RegularElement& k) {
    return std::lower_bound(entries_.begin(), entries_.end(), k,
                            [](const auto& e, const RegularElement& key) {
                              return structural_compare(e.first, key) < 0;
                            });
  }

  std::vector<std::pair<RegularElement, RegularElement>> entries_;
};

/// g ∘ f; throws when f's values fall outside g's domain.
inline FiniteMap compose(const FiniteMap& g, const FiniteMap& f) {
  FiniteMap out;
  for (const auto& [k, v] : f.entries()) out.insert(k, g.at(v));
  return out;
}

/// Pointwise equality: same canonical domain, bisimilar values.
inline bool map_equal(const FiniteMap& a, const FiniteMap& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& [ka, va] = a.entries()[i];
    const auto& [kb, vb] = b.entries()[i];
    if (structural_compare(ka, kb) != 0) return false;
    if (!bisim(va, vb).bisimilar) return false;
  }
  return true;
}

/// Left injection into the variant sum: inl(a) = ⟨0;a⟩.
inline RegularElement inl(const RegularElement& a) {
  return pair_element(zero_element(a.index()), a);
}

/// Right injection: inr(b) = ⟨1;b⟩.
inline RegularElement inr(const RegularElement& b) {
  return pair_element(atom_element(b.index()), b);
}

/// Case analysis [f,g] on tagged elements.
inline FiniteMap case_map(const FiniteMap& f, const FiniteMap& g) {
  FiniteMap out;
  for (const auto& [k, v] : f.entries()) out.insert(inl(k), v);
  for (const auto& [k, v] : g.entries()) out.insert(inr(k), v);
  return out;
}

/// Functorial action of the sum: j +̃ k = [inl ∘ j, inr ∘ k].
inline FiniteMap sum_map(const FiniteMap& j, const FiniteMap& k) {
  FiniteMap out;
  for (const auto& [key, v] : j.entries()) out.insert(inl(key), inl(v));
  for (const auto& [key, v] : k.entries()) out.insert(inr(key), inr(v));
  return out;
}

}  // namespace vset
