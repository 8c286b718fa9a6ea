#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vset/errors.hpp"

namespace vset {

class HFSet;

namespace detail {

/// One interned set node. Children are kept in canonical order
/// (length-lexicographic on the canonical text form) with no duplicates,
/// so pointer equality coincides with extensional set equality.
struct Node {
  std::vector<const Node*> kids;
  std::uint64_t text_len = 1;
  std::uint32_t rank = 0;
  std::size_t hash = 0;
};

inline std::size_t hash_combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

struct KidsHash {
  std::size_t operator()(const std::vector<const Node*>& kids) const {
    std::size_t h = kids.size();
    for (const Node* k : kids)
      h = hash_combine(h, std::hash<const void*>{}(k));
    return h;
  }
};

/// Append-only hash-consing pool. Nodes are immutable once published;
/// the lock protects only the intern table itself.
class Pool {
 public:
  static Pool& get() {
    static Pool pool;
    return pool;
  }

  const Node* empty() const { return empty_; }

  /// `kids` must already be canonically sorted and deduplicated.
  const Node* intern(std::vector<const Node*> kids) {
    if (kids.empty()) return empty_;
    {
      std::shared_lock lk(mu_);
      auto it = table_.find(kids);
      if (it != table_.end()) return it->second;
    }
    std::unique_lock lk(mu_);
    auto it = table_.find(kids);
    if (it != table_.end()) return it->second;
    auto node = std::make_unique<Node>();
    // Text length is exponential in rank; saturate instead of wrapping.
    // Ties at the cap fall through to the lexicographic comparison, which
    // stays a total order.
    constexpr std::uint64_t kLenCap = std::uint64_t{1} << 62;
    std::uint64_t len = 1 + kids.size();  // braces + separators
    std::uint32_t rank = 0;
    for (const Node* k : kids) {
      len = len + k->text_len < len ? kLenCap : len + k->text_len;
      if (len > kLenCap) len = kLenCap;
      rank = std::max(rank, k->rank + 1);
    }
    node->text_len = len;
    node->rank = rank;
    node->hash = KidsHash{}(kids);
    node->kids = kids;
    const Node* ptr = node.get();
    nodes_.push_back(std::move(node));
    table_.emplace(std::move(kids), ptr);
    return ptr;
  }

 private:
  Pool() {
    auto node = std::make_unique<Node>();
    empty_ = node.get();
    nodes_.push_back(std::move(node));
  }

  mutable std::shared_mutex mu_;
  std::vector<std::unique_ptr<Node>> nodes_;
  std::unordered_map<std::vector<const Node*>, const Node*, KidsHash> table_;
  const Node* empty_ = nullptr;
};

/// Pure lexicographic comparison of canonical texts, without
/// materializing them. Relies on the text grammar being prefix-free.
inline int lex_cmp(const Node* a, const Node* b) {
  if (a == b) return 0;
  if (a->kids.empty()) return -1;  // '0' sorts below '{'
  if (b->kids.empty()) return 1;
  const std::size_t n = std::min(a->kids.size(), b->kids.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a->kids[i] != b->kids[i]) return lex_cmp(a->kids[i], b->kids[i]);
  }
  if (a->kids.size() == b->kids.size()) return 0;
  // Shared prefix, one child list exhausted: '}' sorts above ','.
  return a->kids.size() < b->kids.size() ? 1 : -1;
}

inline int canonical_cmp(const Node* a, const Node* b) {
  if (a == b) return 0;
  if (a->text_len != b->text_len) return a->text_len < b->text_len ? -1 : 1;
  return lex_cmp(a, b);
}

}  // namespace detail

/// A canonical hereditarily finite set. Values are immutable, interned,
/// and cheap to copy; structural equality coincides with extensional
/// set equality.
class HFSet {
 public:
  /// The empty set 0.
  HFSet() : node_(detail::Pool::get().empty()) {}

  /// Canonicalizing constructor: duplicates collapse, order is ignored.
  static HFSet of(std::vector<HFSet> members) {
    std::sort(members.begin(), members.end(),
              [](HFSet x, HFSet y) { return compare(x, y) < 0; });
    members.erase(std::unique(members.begin(), members.end()), members.end());
    std::vector<const detail::Node*> kids;
    kids.reserve(members.size());
    for (HFSet m : members) kids.push_back(m.node_);
    return HFSet(detail::Pool::get().intern(std::move(kids)));
  }

  static HFSet of(std::initializer_list<HFSet> members) {
    return of(std::vector<HFSet>(members));
  }

  bool is_empty() const { return node_->kids.empty(); }
  std::size_t card() const { return node_->kids.size(); }
  std::uint32_t rank() const { return node_->rank; }
  std::size_t hash() const { return node_->hash; }

  class Members {
   public:
    class iterator {
     public:
      using value_type = HFSet;
      using difference_type = std::ptrdiff_t;
      explicit iterator(const detail::Node* const* p) : p_(p) {}
      HFSet operator*() const { return HFSet(*p_); }
      iterator& operator++() {
        ++p_;
        return *this;
      }
      iterator operator++(int) {
        iterator old = *this;
        ++p_;
        return old;
      }
      bool operator==(const iterator&) const = default;

     private:
      const detail::Node* const* p_;
    };
    explicit Members(const detail::Node* n) : n_(n) {}
    iterator begin() const { return iterator(n_->kids.data()); }
    iterator end() const { return iterator(n_->kids.data() + n_->kids.size()); }
    std::size_t size() const { return n_->kids.size(); }

   private:
    const detail::Node* n_;
  };

  /// Members in canonical order.
  Members members() const { return Members(node_); }

  HFSet member(std::size_t i) const { return HFSet(node_->kids[i]); }

  bool has_member(HFSet m) const {
    const auto& kids = node_->kids;
    auto it = std::lower_bound(kids.begin(), kids.end(), m.node_,
                               [](const detail::Node* a, const detail::Node* b) {
                                 return detail::canonical_cmp(a, b) < 0;
                               });
    return it != kids.end() && *it == m.node_;
  }

  /// Canonical text form: `0` for the empty set, `{e1,...,ek}` otherwise.
  std::string text() const {
    std::string out;
    render(node_, out, '{', '}', "0");
    return out;
  }

  /// JSON form: nested arrays, children in canonical order.
  std::string json() const {
    std::string out;
    render(node_, out, '[', ']', "[]");
    return out;
  }

  /// Total canonical order: length-lexicographic on the text form.
  static int compare(HFSet a, HFSet b) {
    return detail::canonical_cmp(a.node_, b.node_);
  }

  friend bool operator==(HFSet a, HFSet b) { return a.node_ == b.node_; }
  friend bool operator!=(HFSet a, HFSet b) { return a.node_ != b.node_; }
  friend bool operator<(HFSet a, HFSet b) { return compare(a, b) < 0; }

 private:
  explicit HFSet(const detail::Node* n) : node_(n) {}

  static void render(const detail::Node* n, std::string& out, char open,
                     char close, const char* empty) {
    if (n->kids.empty()) {
      out += empty;
      return;
    }
    out += open;
    for (std::size_t i = 0; i < n->kids.size(); ++i) {
      if (i) out += ',';
      render(n->kids[i], out, open, close, empty);
    }
    out += close;
  }

  const detail::Node* node_;
};

inline HFSet singleton(HFSet a) { return HFSet::of({a}); }

inline HFSet set_union(HFSet a, HFSet b) {
  std::vector<HFSet> ms(a.members().begin(), a.members().end());
  ms.insert(ms.end(), b.members().begin(), b.members().end());
  return HFSet::of(std::move(ms));
}

inline HFSet set_intersection(HFSet a, HFSet b) {
  std::vector<HFSet> ms;
  for (HFSet m : a.members())
    if (b.has_member(m)) ms.push_back(m);
  return HFSet::of(std::move(ms));
}

inline bool subset_of(HFSet a, HFSet b) {
  for (HFSet m : a.members())
    if (!b.has_member(m)) return false;
  return true;
}

/// The von Neumann ordinal n: 0 = 0, n+1 = n ∪ {n}.
inline HFSet ordinal(unsigned n) {
  HFSet o;
  for (unsigned i = 0; i < n; ++i) o = set_union(o, singleton(o));
  return o;
}

/// Standard Kuratowski pair {{a},{a,b}}.
inline HFSet kpair(HFSet a, HFSet b) {
  return HFSet::of({singleton(a), HFSet::of({a, b})});
}

/// Inverse of kpair: (a,b) iff h = {{a},{a,b}}, absent otherwise.
inline std::optional<std::pair<HFSet, HFSet>> kpair_split(HFSet h) {
  if (h.card() == 1) {
    HFSet inner = h.member(0);
    if (inner.card() != 1) return std::nullopt;
    HFSet a = inner.member(0);
    return std::make_pair(a, a);
  }
  if (h.card() == 2) {
    HFSet c0 = h.member(0);
    HFSet c1 = h.member(1);
    // One child must be the singleton {a}, the other the doubleton {a,b}.
    HFSet single, pairset;
    if (c0.card() == 1 && c1.card() == 2) {
      single = c0;
      pairset = c1;
    } else if (c1.card() == 1 && c0.card() == 2) {
      single = c1;
      pairset = c0;
    } else {
      return std::nullopt;
    }
    HFSet a = single.member(0);
    if (!pairset.has_member(a)) return std::nullopt;
    HFSet b = pairset.member(0) == a ? pairset.member(1) : pairset.member(0);
    return std::make_pair(a, b);
  }
  return std::nullopt;
}

/// Right-nested standard tuple ⟨v0,...,vn-1⟩; requires at least one entry.
inline HFSet std_tuple(std::span<const HFSet> vs) {
  if (vs.empty()) throw validation_error("standard tuple needs at least one entry");
  HFSet t = vs.back();
  for (std::size_t i = vs.size() - 1; i-- > 0;) t = kpair(vs[i], t);
  return t;
}

/// Image operator: { y | ∃x∈S. ⟨x,y⟩ ∈ R }. Non-pair members of R are ignored.
inline HFSet image(HFSet R, HFSet S) {
  std::vector<HFSet> ys;
  for (HFSet r : R.members()) {
    if (auto p = kpair_split(r); p && S.has_member(p->first))
      ys.push_back(p->second);
  }
  return HFSet::of(std::move(ys));
}

/// Standard Cartesian product {⟨a,b⟩ | a ∈ A, b ∈ B}.
inline HFSet std_product(HFSet A, HFSet B) {
  std::vector<HFSet> ps;
  ps.reserve(A.card() * B.card());
  for (HFSet a : A.members())
    for (HFSet b : B.members()) ps.push_back(kpair(a, b));
  return HFSet::of(std::move(ps));
}

inline constexpr unsigned kMaxStage = 5;

/// Members of the cumulative-hierarchy stage V_n, for n ≤ 5.
/// |V_5| = 65536; V_6 has 2^65536 members and is refused.
inline std::vector<HFSet> stage_members(unsigned n) {
  if (n > kMaxStage)
    throw size_limit_error("cumulative stage beyond V_5 is not enumerable");
  std::vector<HFSet> stage;  // V_0 = 0
  for (unsigned k = 1; k <= n; ++k) {
    // V_k = P(V_{k-1}) at finite levels.
    std::vector<HFSet> next;
    next.reserve(std::size_t{1} << stage.size());
    for (std::uint32_t mask = 0; mask < (1u << stage.size()); ++mask) {
      std::vector<HFSet> subset;
      for (std::size_t i = 0; i < stage.size(); ++i)
        if (mask & (1u << i)) subset.push_back(stage[i]);
      next.push_back(HFSet::of(std::move(subset)));
    }
    stage = std::move(next);
  }
  std::sort(stage.begin(), stage.end());
  return stage;
}

}  // namespace vset

template <>
struct std::hash<vset::HFSet> {
  std::size_t operator()(const vset::HFSet& s) const { return s.hash(); }
};
