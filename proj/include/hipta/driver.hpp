#pragma once

// Whole-program orchestration: demand-driven summarization from the roots,
// recursion unrolling, the permutation guard, root application, and metrics.

#include <deque>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hipta/inliner.hpp"

namespace hipta {

struct Metrics {
  int reachedProcs = 0;
  int polyCallsites = 0;
  long long criticalTotal = 0;
  long long criticalPropagated = 0;
  long long totalStatements = 0;
  double propRatio = 0.0;  // criticalPropagated / totalStatements
  int kMax = 0;
  double kAvg = 0.0;
  long long runtimeMs = 0;
  long long createdInstances = 0;
  long long resolvedInstances = 0;
  long long deferredInstances = 0;
  int widenings = 0;
  int pendingCapHits = 0;
  int dispatchTruncations = 0;
  int unreachableCalls = 0;
};

class AnalysisRun : public SummaryProvider {
 public:
  // All states of this run intern through `syms`; share one table across
  // runs to make their states directly comparable.
  AnalysisRun(const Program& prog, const Config& config, SymbolTable& syms);

  // Summarizes everything reachable from the roots (all procedures with
  // allProcs), applies each root, and fills metrics. Fatal conditions (fuel
  // exhaustion) surface as error diagnostics.
  void run();

  SymbolTable& syms() { return syms_; }
  const SymbolTable& syms() const { return syms_; }
  const Program& program() const { return prog_; }
  const Config& config() const { return config_; }

  const std::map<std::string, HybridSummary>& summaries() const { return published_; }
  const std::map<std::string, AbstractState>& rootStates() const { return rootStates_; }
  const AnalysisLog& log() const { return log_; }
  const Metrics& metrics() const { return metrics_; }
  InstId rootInstance(const std::string& root) { return syms_.instance(root); }

  // SummaryProvider
  Resolved require(const std::string& procId) override;
  bool allowDispatch(const std::string& method, const std::set<std::string>& targets) override;
  void noteDispatch(const std::string& method, const std::set<std::string>& targets) override;

 private:
  struct Frame {
    std::string proc;
    std::vector<std::pair<std::string, std::string>> witnesses;  // (method, impl)
  };

  struct FuelExhausted {};

  int occurrences(const std::string& procId) const;

  const Program& prog_;
  Config config_;
  SymbolTable& syms_;
  AnalysisLog log_;
  std::unique_ptr<ProcSummarizer> summarizer_;
  std::map<std::string, ProcSummarizer::BuildResult> builds_;  // published
  std::map<std::string, HybridSummary> published_;
  std::deque<ProcSummarizer::BuildResult> copies_;  // recursion-unroll copies
  std::map<std::string, AbstractState> rootStates_;
  std::vector<Frame> stack_;
  Metrics metrics_;
  std::uint64_t frames_ = 0;
};

} // namespace hipta
