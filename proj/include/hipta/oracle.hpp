#pragma once

// Reference top-down analyses for differential testing: a context-insensitive
// whole-program pass (one shared copy per procedure) and bounded/unbounded
// full inlining over call strings (the strict-context-sensitivity standard).
// Both reuse the same solver and evaluation rules as the compositional
// engine, so differences can only come from the inlining strategy.

#include <map>
#include <optional>
#include <set>
#include <string>

#include "hipta/heapstate.hpp"
#include "hipta/summary.hpp"

namespace hipta {

// One global state over all statements reachable from the roots; virtual
// calls dispatch on the current points-to set of the receiver each round.
AbstractState topDownCI(const Program& prog, SymbolTable& syms, const Config& config,
                        std::set<std::string>* reachedOut = nullptr);

// Full statement inlining per call string: k >= 0 keeps the last k callsites
// as the context (classic k-callsite sensitivity), k < 0 keeps the whole
// string and cuts recursion at the configured unroll factor. Fuel exhaustion
// rejects the input (nullopt) rather than approximating.
std::optional<std::map<std::string, AbstractState>> inlineExact(
    const Program& prog, SymbolTable& syms, int kBound, const Config& config,
    std::vector<Diagnostic>* diags = nullptr);

// Root-visible points-to facts in a rename-invariant form: per query path the
// allocation labels, constants, and symbolic paths, plus the pairwise alias
// relation among query paths.
struct RootFacts {
  struct Entry {
    std::set<std::string> labels;
    std::set<std::string> consts;
    std::set<std::string> frees;

    bool operator==(const Entry&) const = default;
    bool supersetOf(const Entry& o) const;
    bool trivial() const { return labels.empty() && consts.empty() && frees.empty(); }
  };
  std::map<std::string, Entry> paths;
  std::set<std::pair<std::string, std::string>> aliases;

  bool operator==(const RootFacts&) const = default;
  bool supersetOf(const RootFacts& o) const;
};

// Query paths of a root state: materialized cells rooted in the root
// procedure's scope or at globals.
std::set<PathId> rootQueryPaths(const AbstractState& state, InstId rootInst);

// Facts over an explicit query-path set (use the union of both sides' query
// paths when comparing two states).
RootFacts extractRootFacts(const AbstractState& state, const std::set<PathId>& queryPaths,
                           InstId rootInst);

struct FactsComparison {
  bool ok = true;
  std::string diff;  // human-readable; empty when ok
};

// requireEqual: facts must match exactly; otherwise `a` must cover `b`.
FactsComparison compareRootStates(const AbstractState& a, const AbstractState& b,
                                  InstId rootInst, bool requireEqual);

} // namespace hipta
