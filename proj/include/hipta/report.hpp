#pragma once

// Assertion evaluation and the line-oriented report writers. All output is
// sorted so reports are byte-stable across runs.

#include <string>
#include <vector>

#include "hipta/driver.hpp"

namespace hipta {

enum class AssertResult { Pass, Fail, Indeterminate };

const char* assertResultName(AssertResult r);

// Indeterminate counts as a failure for expect-pass assertions.
bool assertionMatches(AssertResult r, bool expectPass);

// not-alias: empty intersection over allocation sites, constants, and
// symbolic paths. must-alias: both sides resolve to one identical allocation
// site whose label has exactly one instance in the state; anything else is
// indeterminate.
AssertResult evalAssertion(const AbstractState& rootState, const AliasAssertion& a,
                           InstId rootInst);

std::string dumpSummary(const HybridSummary& s, const SymbolTable& syms);
std::string pointsToReport(const AbstractState& st, const SymbolTable& syms,
                           const std::string& scope);
std::string callGraphReport(const std::vector<CallEdge>& edges);
std::string metricsLine(const Metrics& m, const std::string& mode, const std::string& input);

} // namespace hipta
