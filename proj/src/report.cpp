#include "hipta/report.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace hipta {

const char* assertResultName(AssertResult r) {
  switch (r) {
    case AssertResult::Pass: return "pass";
    case AssertResult::Fail: return "fail";
    case AssertResult::Indeterminate: return "indeterminate";
  }
  return "?";
}

bool assertionMatches(AssertResult r, bool expectPass) {
  return expectPass ? r == AssertResult::Pass : r != AssertResult::Pass;
}

namespace {

PathId varPath(SymbolTable& syms, const std::string& var, InstId scope) {
  VarBinding b{&syms, scope, nullptr, kNoId, 6, nullptr};
  return b.lookup(var)[0];
}

// label -> distinct allocation-site instances present anywhere in the state
std::map<NameId, std::set<AllocId>> labelInstances(const AbstractState& st) {
  std::map<NameId, std::set<AllocId>> out;
  const SymbolTable& syms = st.syms();
  auto note = [&](AllocId a) { out[syms.allocKey(a).label].insert(a); };
  for (const auto& c : st.constraints())
    if (c.rhs.kind == Target::Kind::Alloc) note(c.rhs.id);
  for (PathId cell : st.cellList())
    for (AllocId a : st.pointsToRaw(cell).allocs) note(a);
  return out;
}

}  // namespace

AssertResult evalAssertion(const AbstractState& rootState, const AliasAssertion& a,
                           InstId rootInst) {
  SymbolTable& syms = rootState.syms();
  PointsToSet lhs = rootState.pointsTo(varPath(syms, a.lhsVar, rootInst));
  PointsToSet rhs = rootState.pointsTo(varPath(syms, a.rhsVar, rootInst));
  if (!a.mustAlias) return lhs.intersects(rhs) ? AssertResult::Fail : AssertResult::Pass;

  if (lhs.allocs.size() == 1 && lhs.consts.empty() && lhs.frees.empty() && lhs == rhs) {
    AllocId site = *lhs.allocs.begin();
    auto instances = labelInstances(rootState);
    if (instances[syms.allocKey(site).label].size() == 1) return AssertResult::Pass;
  }
  return AssertResult::Indeterminate;
}

std::string dumpSummary(const HybridSummary& s, const SymbolTable& syms) {
  std::ostringstream os;
  os << "summary " << s.owner << "\n";
  std::vector<std::string> lines;
  for (const auto& c : s.delta) lines.push_back("  " + printConstraint(c, syms));
  std::sort(lines.begin(), lines.end());
  for (const auto& l : lines) os << l << "\n";
  lines.clear();
  for (const auto& p : s.pending) lines.push_back("  " + printCritical(p, syms));
  std::sort(lines.begin(), lines.end());
  for (const auto& l : lines) os << l << "\n";
  return os.str();
}

std::string pointsToReport(const AbstractState& st, const SymbolTable& syms,
                           const std::string& scope) {
  std::vector<std::string> lines;
  for (PathId cell : st.cellList()) {
    PointsToSet pt = st.pointsTo(cell);
    std::string base = "fact " + scope + " " + syms.printPath(cell) + " -> ";
    for (AllocId a : pt.allocs) lines.push_back(base + syms.printAlloc(a));
    for (ConstId c : pt.consts) lines.push_back(base + syms.constVal(c).toString());
    for (PathId f : pt.frees)
      if (f != cell) lines.push_back(base + syms.printPath(f));
  }
  std::sort(lines.begin(), lines.end());
  lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
  std::ostringstream os;
  for (const auto& l : lines) os << l << "\n";
  return os.str();
}

std::string callGraphReport(const std::vector<CallEdge>& edges) {
  std::vector<std::string> lines;
  for (const auto& e : edges) {
    std::ostringstream os;
    os << "edge s" << e.site << " " << e.caller << " -> " << e.target << " scope " << e.scope
       << " dispatch " << e.dispatchSize;
    lines.push_back(os.str());
  }
  std::sort(lines.begin(), lines.end());
  lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
  std::ostringstream os;
  for (const auto& l : lines) os << l << "\n";
  return os.str();
}

std::string metricsLine(const Metrics& m, const std::string& mode, const std::string& input) {
  std::ostringstream os;
  os << "metrics " << input << " mode=" << mode << " reach=" << m.reachedProcs
     << " poly=" << m.polyCallsites << " time_ms=" << m.runtimeMs << " c_total=" << m.criticalTotal
     << " c_prop=" << m.criticalPropagated << " prop_ratio=" << m.propRatio
     << " k_max=" << m.kMax << " k_avg=" << m.kAvg << " widenings=" << m.widenings
     << " truncations=" << m.dispatchTruncations << " cap_hits=" << m.pendingCapHits;
  return os.str();
}

} // namespace hipta
