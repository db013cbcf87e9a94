#include "hipta/driver.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

namespace hipta {

AnalysisRun::AnalysisRun(const Program& prog, const Config& config, SymbolTable& syms)
    : prog_(prog), config_(config), syms_(syms) {
  summarizer_ = std::make_unique<ProcSummarizer>(prog_, syms_, config_, *this, log_);
}

int AnalysisRun::occurrences(const std::string& procId) const {
  int n = 0;
  for (const auto& f : stack_)
    if (f.proc == procId) ++n;
  return n;
}

SummaryProvider::Resolved AnalysisRun::require(const std::string& procId) {
  const Procedure* proc = prog_.findProc(procId);
  if (!proc) {
    log_.diags.push_back({Severity::Error, DiagCode::InternalError,
                          "summary requested for unknown procedure '" + procId + "'"});
    return {nullptr, true};
  }
  if (++frames_ > config_.fuel) throw FuelExhausted{};

  int depth = occurrences(procId);
  if (depth >= config_.unroll) return {nullptr, true};  // recursion cut

  if (depth == 0) {
    auto it = published_.find(procId);
    if (it != published_.end()) return {&it->second, false};
    stack_.push_back(Frame{procId, {}});
    auto build = summarizer_->build(*proc, syms_.instance(procId));
    stack_.pop_back();
    auto [bit, inserted] = builds_.emplace(procId, std::move(build));
    (void)inserted;
    auto [sit, sinserted] = published_.emplace(procId, bit->second.summary);
    (void)sinserted;
    return {&sit->second, false};
  }

  // Unrolled copy: summarized against the current path, never published.
  stack_.push_back(Frame{procId, {}});
  InstId inst = syms_.instance(procId + "#u" + std::to_string(depth));
  copies_.push_back(summarizer_->build(*proc, inst));
  stack_.pop_back();
  return {&copies_.back().summary, false};
}

bool AnalysisRun::allowDispatch(const std::string& method, const std::set<std::string>& targets) {
  // Counts of (method, impl) along the current path, as if this dispatch had
  // already been recorded. More than `m` implementations seen twice means a
  // permutation blow-up; the call is over-approximated instead.
  std::map<std::string, int> counts;
  for (const auto& f : stack_)
    for (const auto& [m, impl] : f.witnesses)
      if (m == method) ++counts[impl];
  int repeated = 0;
  for (const auto& t : targets)
    if (counts[t] + 1 >= 2) ++repeated;
  return repeated <= config_.dispatchBound;
}

void AnalysisRun::noteDispatch(const std::string& method, const std::set<std::string>& targets) {
  if (stack_.empty()) stack_.push_back(Frame{"<root>", {}});
  for (const auto& t : targets) stack_.back().witnesses.emplace_back(method, t);
}

void AnalysisRun::run() {
  auto t0 = std::chrono::steady_clock::now();
  try {
    std::vector<std::string> rootOrder;
    for (const auto& r : prog_.roots)
      if (std::find(rootOrder.begin(), rootOrder.end(), r) == rootOrder.end())
        rootOrder.push_back(r);

    for (const auto& r : rootOrder) require(r);
    if (config_.allProcs)
      for (const auto& p : prog_.procs) require(p.id);

    for (const auto& r : rootOrder) {
      const Procedure* proc = prog_.findProc(r);
      stack_.push_back(Frame{r, {}});
      rootStates_.emplace(r, summarizer_->applyAtRoot(*proc, builds_.at(r)));
      stack_.pop_back();
    }
  } catch (const FuelExhausted&) {
    log_.diags.push_back({Severity::Error, DiagCode::OracleFuelExhausted,
                          "summarization fuel exhausted; analysis aborted"});
  }

  metrics_.reachedProcs = static_cast<int>(published_.size());
  metrics_.polyCallsites = static_cast<int>(log_.polySites.size());
  metrics_.criticalTotal = static_cast<long long>(log_.criticalOrigins.size());
  metrics_.criticalPropagated = static_cast<long long>(log_.propagatedOrigins.size());
  for (const auto& [pid, summary] : published_) {
    const Procedure* p = prog_.findProc(pid);
    if (p) metrics_.totalStatements += static_cast<long long>(p->body.size());
  }
  metrics_.propRatio = metrics_.totalStatements
                           ? static_cast<double>(metrics_.criticalPropagated) /
                                 static_cast<double>(metrics_.totalStatements)
                           : 0.0;
  long long sum = 0;
  for (int s : log_.resolutionSteps) {
    metrics_.kMax = std::max(metrics_.kMax, s);
    sum += s;
  }
  metrics_.kAvg = log_.resolutionSteps.empty()
                      ? 0.0
                      : static_cast<double>(sum) / static_cast<double>(log_.resolutionSteps.size());
  metrics_.createdInstances = log_.createdInstances;
  metrics_.resolvedInstances = log_.resolvedInstances;
  metrics_.deferredInstances = log_.deferredInstances;
  metrics_.widenings = log_.widenings;
  metrics_.pendingCapHits = log_.pendingCapHits;
  metrics_.dispatchTruncations = log_.dispatchTruncations;
  metrics_.unreachableCalls = log_.unreachableCalls;
  metrics_.runtimeMs = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
}

} // namespace hipta
