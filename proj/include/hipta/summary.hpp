#pragma once

// Per-procedure summarization pieces: hybrid summaries (constraint delta plus
// pending critical statements), the lvalue evaluation and constraint
// generation rules, and critical-statement identification.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hipta/heapstate.hpp"
#include "hipta/ir.hpp"

namespace hipta {

struct Config {
  enum class Mode { ComCI, HIk, HIA } mode = Mode::HIA;
  int k = 3;               // max propagation steps in HIk mode
  int depthBound = 6;      // access-path depth bound D
  int unroll = 2;          // recursion unroll factor n
  int dispatchBound = 5;   // permutation guard m
  bool opt1 = true;        // per-class critical-call threshold forces a k-limit
  int opt1Threshold = 8;
  int opt1K = 4;
  bool opt2 = true;        // container-iteration receivers summarize immediately
  int pendingCap = 64;     // forced summarization beyond this many pending
  std::uint64_t fuel = 1000000;
  bool allProcs = false;
  int jobs = 1;

  static Config comci() { return Config{Mode::ComCI, 0, 6, 2, 5, true, 8, 4, true, 64, 1000000, false, 1}; }
  static Config hik(int k) { Config c; c.mode = Mode::HIk; c.k = k; return c; }
  static Config hia() { return Config{}; }
};

// An unresolved critical statement carried inside a hybrid summary: the
// statement, a renaming environment from its variables to current paths, and
// its propagation bookkeeping.
struct CriticalStatement {
  Statement stmt;  // Assign with a variable index, or a polymorphic virtual call
  std::map<std::string, std::vector<PathId>> env;
  PathId resultPlaceholder = kNoId;  // virtual calls: symbolic result root
  InstId allocCtx = kNoId;           // context tag for allocations summarized later
  int steps = 0;
  std::vector<int> trail;  // callsite ids crossed so far
  int originId = -1;       // stmtId of the origin statement
  int opt1Limit = -1;      // per-statement k-limit forced by Opt1

  auto operator<=>(const CriticalStatement& o) const {
    if (auto c = originId <=> o.originId; c != 0) return c;
    if (auto c = steps <=> o.steps; c != 0) return c;
    if (auto c = env <=> o.env; c != 0) return c;
    if (auto c = resultPlaceholder <=> o.resultPlaceholder; c != 0) return c;
    return trail <=> o.trail;
  }
};

struct SummaryStats {
  int widenings = 0;
  int resolvedHere = 0;  // critical statements summarized during this build
};

struct HybridSummary {
  std::string owner;
  InstId instance = kNoId;
  std::vector<Constraint> delta;  // sorted, deduplicated
  std::vector<CriticalStatement> pending;
  SummaryStats stats;
};

// Componentwise join: constraint-set union plus pending union.
HybridSummary joinSummaries(const HybridSummary& a, const HybridSummary& b);

// Maps statement variables to heap paths. Without an environment, variables
// are locals of `scope` ("ret" is the return slot, $-names are globals).
struct VarBinding {
  SymbolTable* syms = nullptr;
  InstId scope = kNoId;
  const std::map<std::string, std::vector<PathId>>* env = nullptr;
  InstId allocCtx = kNoId;
  int depthBound = 6;
  int* widenings = nullptr;

  std::vector<PathId> lookup(const std::string& var) const;
};

// Evaluation of an lvalue to access paths. A variable index expands to one
// path per constant when its points-to set holds only constants, and to a
// wildcard [*] offset otherwise.
std::vector<PathId> evalLV(const LValue& lv, const AbstractState& state, const VarBinding& binding);

// Constraints for an assignment under the current context.
std::vector<Constraint> consStmt(const AbstractState& state, const Statement& stmt,
                                 const VarBinding& binding);

// A statement is critical when it carries a variable index or is a virtual
// call with more than one implementation program-wide.
bool isCritical(const Statement& stmt, const Program& prog);

// Adequacy of the current context for a pending statement: a variable index
// whose points-to set holds no symbolic path, or a virtual call whose
// receiver resolves without symbolic paths (or is monomorphic anyway).
bool contextAdequate(const CriticalStatement& crit, const AbstractState& state,
                     const Program& prog, const Config& config);

// contextAdequate extended with the mode-dependent forcing rules (ComCI
// summarizes immediately, HIk forces at k steps, Opt1/Opt2 overrides).
bool contextReady(const CriticalStatement& crit, const AbstractState& state, const Program& prog,
                  const Config& config);

std::string printCritical(const CriticalStatement& crit, const SymbolTable& syms);
std::string printConstraint(const Constraint& c, const SymbolTable& syms);

} // namespace hipta
