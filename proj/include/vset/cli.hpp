#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "vset/dsl.hpp"
#include "vset/functors.hpp"

namespace vset {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitDistinct = 1,
  kExitUsage = 2,
  kExitResource = 3,
};

enum class OutputFormat { kSet, kJson };

namespace cli_detail {

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const parse_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const size_limit_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitResource;
  } catch (const depth_limit_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitResource;
  } catch (const error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace cli_detail

/// `solve FILE --var NAME --depth N --format set|json`: solve the system
/// and print the depth-N expansion of one variable.
inline int run_solve(const std::string& text, const std::string& var,
                     unsigned depth, OutputFormat format, std::ostream& out,
                     std::ostream& err) {
  return cli_detail::guarded(err, [&]() {
    EquationSystem sys = parse_system(text);
    if (!sys.defines(var)) {
      err << "error: variable '" << var << "' is not defined\n";
      return static_cast<int>(kExitUsage);
    }
    auto solution = solve(sys);
    HFSet value = expand(solution.at(var), depth);
    out << (format == OutputFormat::kSet ? value.text() : value.json())
        << "\n";
    return static_cast<int>(kExitOk);
  });
}

/// `eq FILE V1 V2`: decide equality of two solved variables.
inline int run_eq(const std::string& text, const std::string& v1,
                  const std::string& v2, std::ostream& out,
                  std::ostream& err) {
  return cli_detail::guarded(err, [&]() {
    EquationSystem sys = parse_system(text);
    for (const std::string& v : {v1, v2})
      if (!sys.defines(v)) {
        err << "error: variable '" << v << "' is not defined\n";
        return static_cast<int>(kExitUsage);
      }
    auto solution = solve(sys);
    BisimOutcome r = bisim(solution.at(v1), solution.at(v2));
    if (r.bisimilar) {
      out << "bisimilar\n";
      return static_cast<int>(kExitOk);
    }
    out << "distinct at depth " << r.depth << "\n";
    return static_cast<int>(kExitDistinct);
  });
}

namespace cli_detail {

/// Exhaustive search for solutions of U = I →̃ U with I = 1 over all
/// subsets of V_4.
inline int check_funspace_fixedpoints(std::ostream& out) {
  std::vector<HFSet> pool = stage_members(4);
  HFSet I = ordinal(1);
  std::vector<HFSet> solutions;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pool.size());
       ++mask) {
    std::vector<HFSet> subset;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (mask & (std::uint64_t{1} << i)) subset.push_back(pool[i]);
    HFSet u = HFSet::of(std::move(subset));
    if (vfunspace(I, u) == u) solutions.push_back(u);
  }
  std::sort(solutions.begin(), solutions.end());
  out << solutions.size() << " solutions:";
  for (std::size_t i = 0; i < solutions.size(); ++i)
    out << (i ? ", " : " ") << solutions[i].text();
  out << "\n";
  bool expected = solutions.size() == 2 && solutions[0] == HFSet() &&
                  solutions[1] == singleton(HFSet());
  return expected ? kExitOk : kExitDistinct;
}

/// 0 and 1 are members of the universe: both decompose symbolically, and
/// {0,1} is a post-fixedpoint of the tuple functor.
inline int check_zero_one_closure(std::ostream& out) {
  IndexSet index(2);
  auto zero = from_hf(HFSet(), index);
  auto one = from_hf(singleton(HFSet()), index);
  bool ok = zero.has_value() && one.has_value();
  if (ok) {
    ok = bisim(*zero, zero_element(index)).bisimilar &&
         bisim(*one, atom_element(index)).bisimilar;
  }
  if (ok) ok = q_post_fixpoint({*zero, *one}, index);
  out << (ok ? "pass" : "fail") << "\n";
  return ok ? kExitOk : kExitDistinct;
}

}  // namespace cli_detail

/// `check prop3|lemma31`: brute-force reproductions of the two concrete
/// fixedpoint facts.
inline int run_check(const std::string& name, std::ostream& out,
                     std::ostream& err) {
  return cli_detail::guarded(err, [&]() -> int {
    if (name == "prop3") return cli_detail::check_funspace_fixedpoints(out);
    if (name == "lemma31") return cli_detail::check_zero_one_closure(out);
    err << "error: unknown check '" << name
        << "' (available: prop3, lemma31)\n";
    return kExitUsage;
  });
}

/// The stream over the atom: the solution of x = ⟨1; x⟩, whose depth-n
/// expansion is exactly the set of standard tuples ⟨1,...,1,0,x⟩ with
/// j ≤ n-2 leading 1s and x ∈ 1.
inline HFSet stream_tuples_oracle(unsigned depth) {
  std::vector<HFSet> tuples;
  HFSet one = singleton(HFSet());
  if (depth >= 2) {
    for (unsigned j = 0; j + 2 <= depth; ++j) {
      for (HFSet x : one.members()) {
        std::vector<HFSet> parts(j, one);
        parts.push_back(ordinal(0));
        parts.push_back(x);
        tuples.push_back(std_tuple(parts));
      }
    }
  }
  return HFSet::of(std::move(tuples));
}

/// `demo stream --depth N`: prints the expansions of the stream solution
/// next to the tuple characterization, asserting equality per depth.
inline int run_demo_stream(unsigned depth, std::ostream& out,
                           std::ostream& err) {
  return cli_detail::guarded(err, [&]() {
    IndexSet index(2);
    // x = ⟨1; x⟩: state 0 is the stream, state 1 the atom.
    RegularElement stream =
        build(index, {NodeShape::tuple({1, 0}), NodeShape::atom()}, 0);
    bool all_equal = true;
    for (unsigned d = 0; d <= depth; ++d) {
      HFSet pi = expand(stream, d);
      HFSet oracle = stream_tuples_oracle(d);
      bool same = pi == oracle;
      all_equal = all_equal && same;
      out << "depth " << d << ": " << pi.text() << " == " << oracle.text()
          << (same ? " ok" : " MISMATCH") << "\n";
    }
    return static_cast<int>(all_equal ? kExitOk : kExitDistinct);
  });
}

}  // namespace vset
