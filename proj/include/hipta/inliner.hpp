#pragma once

// Callsite instantiation of hybrid summaries and the ready sweep: renaming,
// critical-statement propagation, forced and adequate summarization, and
// root application.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "hipta/summary.hpp"

namespace hipta {

struct CallEdge {
  int site = -1;
  std::string caller;  // procedure owning the callsite
  std::string target;
  std::string scope;  // procedure whose build resolved the call
  int dispatchSize = 1;

  auto operator<=>(const CallEdge&) const = default;
};

// Shared event log for one analysis run: call edges, diagnostics, and the
// critical-statement accounting behind the metrics.
struct AnalysisLog {
  std::vector<CallEdge> edges;
  std::vector<Diagnostic> diags;

  std::set<int> criticalOrigins;    // statements that ever entered a pending set
  std::set<int> propagatedOrigins;  // origins that crossed at least one callsite
  std::vector<int> resolutionSteps; // steps at resolution, propagated instances only
  long long createdInstances = 0;
  long long resolvedInstances = 0;
  long long deferredInstances = 0;
  int pendingCapHits = 0;
  int dispatchTruncations = 0;
  int unreachableCalls = 0;
  int widenings = 0;
  std::set<int> polySites;  // callsites with a dispatch event of size > 1
};

// Summary resolution callback, implemented by the driver. require() may
// trigger summarization of the callee; a stub result stands for a recursion
// cut or a truncated dispatch and is applied as an opaque over-approximation.
class SummaryProvider {
 public:
  struct Resolved {
    const HybridSummary* summary = nullptr;
    bool stub = false;
  };
  virtual ~SummaryProvider() = default;
  virtual Resolved require(const std::string& procId) = 0;
  // Permutation guard: false tells the caller to over-approximate the call
  // instead of descending into the targets.
  virtual bool allowDispatch(const std::string& method, const std::set<std::string>& targets) = 0;
  virtual void noteDispatch(const std::string& method, const std::set<std::string>& targets) = 0;
};

class ProcSummarizer {
 public:
  ProcSummarizer(const Program& prog, SymbolTable& syms, const Config& config,
                 SummaryProvider& provider, AnalysisLog& log);

  struct BuildResult {
    HybridSummary summary;
    AbstractState rawState;  // solved pre-cleanup state, kept for roots
    std::vector<CriticalStatement> rawPending;
  };

  BuildResult build(const Procedure& proc, InstId instance);

  // Continues from a root's raw state: every pending statement is summarized
  // with the root context (unresolved receivers dispatch to all
  // implementations). Returns the solved root state.
  AbstractState applyAtRoot(const Procedure& root, const BuildResult& raw);

  const Program& program() const { return prog_; }

 private:
  friend class Engine;
  const Program& prog_;
  SymbolTable& syms_;
  const Config& config_;
  SummaryProvider& provider_;
  AnalysisLog& log_;
  std::map<int, std::string> siteOwner_;
};

} // namespace hipta
