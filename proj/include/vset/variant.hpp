#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "vset/hfs.hpp"

namespace vset {

/// A finite indexed family of sets {b_x}_{x∈A}; keys are distinct as sets
/// and kept in canonical order.
class Family {
 public:
  Family() = default;

  Family(std::initializer_list<std::pair<HFSet, HFSet>> entries) {
    for (const auto& [k, v] : entries) set(k, v);
  }

  void set(HFSet key, HFSet value) {
    auto it = std::lower_bound(
        entries_.begin(), entries_.end(), key,
        [](const auto& e, HFSet k) { return HFSet::compare(e.first, k) < 0; });
    if (it != entries_.end() && it->first == key)
      it->second = value;
    else
      entries_.insert(it, {key, value});
  }

  std::optional<HFSet> get(HFSet key) const {
    auto it = std::lower_bound(
        entries_.begin(), entries_.end(), key,
        [](const auto& e, HFSet k) { return HFSet::compare(e.first, k) < 0; });
    if (it != entries_.end() && it->first == key) return it->second;
    return std::nullopt;
  }

  const std::vector<std::pair<HFSet, HFSet>>& entries() const {
    return entries_;
  }

  std::size_t size() const { return entries_.size(); }

  HFSet key_set() const {
    std::vector<HFSet> keys;
    keys.reserve(entries_.size());
    for (const auto& e : entries_) keys.push_back(e.first);
    return HFSet::of(std::move(keys));
  }

 private:
  std::vector<std::pair<HFSet, HFSet>> entries_;
};

/// Variant ordered pair ⟨a;b⟩ = ({0}×a) ∪ ({1}×b). Injective, continuous
/// in both arguments, and rank-neutral enough to admit cyclic solutions.
inline HFSet vpair(HFSet a, HFSet b) {
  return set_union(std_product(singleton(ordinal(0)), a),
                   std_product(singleton(ordinal(1)), b));
}

/// Variant function λ̃_{x∈A} b_x = ⋃_{x∈A} {x}×b_x.
inline HFSet vlambda(const Family& fam) {
  std::vector<HFSet> ms;
  for (const auto& [x, bx] : fam.entries())
    for (HFSet y : bx.members()) ms.push_back(kpair(x, y));
  return HFSet::of(std::move(ms));
}

/// Application of a variant function: f'{x}. Yields b_x when f is
/// λ̃ over a family containing x, and 0 outside the domain.
inline HFSet vapply(HFSet f, HFSet x) { return image(f, singleton(x)); }

/// Enumeration bound for the space-enumerating operators below: they
/// walk the powerset of A × ⋃B.
inline constexpr std::size_t kFunSpaceLimit = 16;

namespace detail {

template <typename MemberCheck>
HFSet enumerate_funspace(HFSet A, HFSet carrier, MemberCheck in_value_set) {
  std::vector<HFSet> pairs;
  for (HFSet x : A.members())
    for (HFSet y : carrier.members()) pairs.push_back(kpair(x, y));
  if (pairs.size() > kFunSpaceLimit)
    throw size_limit_error("variant function space too large to enumerate (" +
                           std::to_string(pairs.size()) + " candidate pairs)");
  std::vector<HFSet> fs;
  for (std::uint32_t mask = 0; mask < (1u << pairs.size()); ++mask) {
    std::vector<HFSet> chosen;
    for (std::size_t i = 0; i < pairs.size(); ++i)
      if (mask & (1u << i)) chosen.push_back(pairs[i]);
    HFSet f = HFSet::of(std::move(chosen));
    bool ok = true;
    for (HFSet x : A.members()) {
      if (!in_value_set(x, vapply(f, x))) {
        ok = false;
        break;
      }
    }
    if (ok) fs.push_back(f);
  }
  return HFSet::of(std::move(fs));
}

}  // namespace detail

/// Variant function space A →̃ B = {f ⊆ A × ⋃B | ∀x∈A. f'{x} ∈ B}.
inline HFSet vfunspace(HFSet A, HFSet B) {
  std::vector<HFSet> carrier;
  for (HFSet b : B.members())
    carrier.insert(carrier.end(), b.members().begin(), b.members().end());
  HFSet ub = HFSet::of(std::move(carrier));
  return detail::enumerate_funspace(
      A, ub, [&](HFSet, HFSet val) { return B.has_member(val); });
}

/// Variant Cartesian product A ×̃ B = {⟨x;y⟩ | x ∈ A, y ∈ B}.
inline HFSet vproduct(HFSet A, HFSet B) {
  std::vector<HFSet> ps;
  for (HFSet x : A.members())
    for (HFSet y : B.members()) ps.push_back(vpair(x, y));
  return HFSet::of(std::move(ps));
}

/// Variant disjoint sum A +̃ B = ({0} ×̃ A) ∪ ({1} ×̃ B).
inline HFSet vsum(HFSet A, HFSet B) {
  return set_union(vproduct(singleton(ordinal(0)), A),
                   vproduct(singleton(ordinal(1)), B));
}

/// Variant sum of a family: Σ̃_{x∈A} B_x = {⟨x;y⟩ | x ∈ A, y ∈ B_x}.
inline HFSet famsum(const Family& fam) {
  std::vector<HFSet> ps;
  for (const auto& [x, bx] : fam.entries())
    for (HFSet y : bx.members()) ps.push_back(vpair(x, y));
  return HFSet::of(std::move(ps));
}

/// Variant product of a family:
/// Π̃_{x∈A} B_x = {f ⊆ A × ⋃_x B_x | ∀x∈A. f'{x} ∈ B_x}.
inline HFSet famprod(const Family& fam) {
  std::vector<HFSet> carrier;
  for (const auto& [x, bx] : fam.entries())
    carrier.insert(carrier.end(), bx.members().begin(), bx.members().end());
  HFSet ub = HFSet::of(std::move(carrier));
  return detail::enumerate_funspace(fam.key_set(), ub,
                                    [&](HFSet x, HFSet val) {
                                      auto bx = fam.get(x);
                                      return bx && bx->has_member(val);
                                    });
}

}  // namespace vset
