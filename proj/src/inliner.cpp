#include "hipta/inliner.hpp"

#include <algorithm>
#include <cassert>

namespace hipta {

ProcSummarizer::ProcSummarizer(const Program& prog, SymbolTable& syms, const Config& config,
                               SummaryProvider& provider, AnalysisLog& log)
    : prog_(prog), syms_(syms), config_(config), provider_(provider), log_(log) {
  for (const auto& p : prog.procs)
    for (const auto& st : p.body)
      if (st.kind == Statement::Kind::Call) siteOwner_[st.site] = p.id;
}

namespace {

std::set<std::string> declaringClasses(const Program& prog, const std::string& method) {
  std::set<std::string> out;
  for (const auto& c : prog.classes)
    if (c.methods.count(method) || c.abstracts.count(method)) out.insert(c.name);
  return out;
}

}  // namespace

// One in-progress summarization (or root application). Owns the abstract
// state and the pending set; everything shared lives in the ProcSummarizer.
class Engine {
 public:
  Engine(ProcSummarizer& s, const Program& prog, SymbolTable& syms, const Config& config,
         SummaryProvider& provider, AnalysisLog& log, const std::map<int, std::string>& siteOwner)
      : s_(s), prog_(prog), syms_(syms), config_(config), provider_(provider), log_(log),
        siteOwner_(siteOwner), state_(&syms) {}

  AbstractState state_;
  std::vector<CriticalStatement> pending_;
  InstId scope_ = kNoId;
  std::string owner_;
  int widenings_ = 0;
  int resolvedHere_ = 0;

  VarBinding scopeBinding() {
    return VarBinding{&syms_, scope_, nullptr, kNoId, config_.depthBound, &widenings_};
  }
  VarBinding envBinding(const CriticalStatement& crit) {
    return VarBinding{&syms_, scope_, &crit.env, crit.allocCtx, config_.depthBound, &widenings_};
  }

  PathId localPath(const std::string& var) {
    return syms_.path(syms_.root(Root{RootKind::Local, syms_.name(var), -1, scope_, kNoId}));
  }

  void prologue(const Procedure& proc) {
    for (size_t i = 0; i < proc.params.size(); ++i) {
      PathId param = syms_.path(
          syms_.root(Root{RootKind::Param, kNoId, static_cast<int>(i), scope_, kNoId}));
      state_.add(localPath(proc.params[i]), Target::free(param));
    }
  }

  void addStatement(const Statement& st) {
    if (st.kind == Statement::Kind::Assign) {
      if (isCritical(st, prog_))
        makePendingAssign(st);
      else
        state_.addAll(consStmt(state_, st, scopeBinding()));
      return;
    }
    std::set<std::string> targets;
    if (!st.virtualCall) {
      targets.insert(st.callee);
    } else {
      targets = dispatchTargets(prog_, st.callee, std::nullopt);
      if (targets.size() > 1) {
        makePendingCall(st);
        return;
      }
    }
    auto argPaths = evalArgs(st, scopeBinding());
    std::vector<PathId> resultPaths;
    if (st.hasResult) resultPaths = evalLV(st.lhs, state_, scopeBinding());
    for (const auto& t : targets)
      instantiateCall(t, st.site, argPaths, resultPaths, static_cast<int>(targets.size()));
    if (targets.empty()) {
      log_.diags.push_back({Severity::Warning, DiagCode::UnreachableCall,
                            "call to '" + st.callee + "' has no target"});
      ++log_.unreachableCalls;
    }
  }

  std::vector<std::vector<PathId>> evalArgs(const Statement& st, const VarBinding& binding) {
    std::vector<std::vector<PathId>> out;
    for (const auto& a : st.args) out.push_back(evalLV(a, state_, binding));
    return out;
  }

  void collectEnvVar(std::map<std::string, std::vector<PathId>>& env, const std::string& var) {
    if (!env.count(var)) env.emplace(var, scopeBinding().lookup(var));
  }

  void collectEnvLV(std::map<std::string, std::vector<PathId>>& env, const LValue& lv) {
    collectEnvVar(env, lv.base);
    for (const auto& o : lv.offsets)
      if (o.kind == Offset::Kind::VarIndex) collectEnvVar(env, o.name);
  }

  void makePendingAssign(const Statement& st) {
    CriticalStatement crit;
    crit.stmt = st;
    crit.originId = st.stmtId;
    collectEnvLV(crit.env, st.lhs);
    if (st.rhs.kind == RValue::Kind::Path) collectEnvLV(crit.env, st.rhs.path);
    pending_.push_back(std::move(crit));
    log_.criticalOrigins.insert(st.stmtId);
    ++log_.createdInstances;
  }

  void makePendingCall(const Statement& st) {
    CriticalStatement crit;
    crit.stmt = st;
    crit.originId = st.stmtId;
    for (const auto& a : st.args) collectEnvLV(crit.env, a);
    InstId phInst = syms_.extendInstance(scope_, "!s" + std::to_string(st.site) + ">" + st.callee);
    crit.resultPlaceholder = syms_.path(syms_.root(Root{RootKind::Ret, kNoId, -1, phInst, kNoId}));
    if (st.hasResult) {
      collectEnvLV(crit.env, st.lhs);
      for (PathId r : evalLV(st.lhs, state_, scopeBinding()))
        state_.add(r, Target::free(crit.resultPlaceholder));
    }
    pending_.push_back(std::move(crit));
    log_.criticalOrigins.insert(st.stmtId);
    ++log_.createdInstances;
  }

  // --- instantiation -------------------------------------------------------

  struct RenameCtx {
    InstId calleeInst = kNoId;
    const std::vector<std::vector<PathId>>* argPaths = nullptr;
    std::vector<PathId> resultPaths;
    std::string suffix;
    InstId freshCtx = kNoId;  // context tag for allocation copies
  };

  InstId extendAllocCtx(InstId old, const RenameCtx& ctx) {
    return old == kNoId ? ctx.freshCtx : syms_.extendInstance(old, ctx.suffix);
  }

  std::vector<PathId> renamePath(PathId p, const RenameCtx& ctx) {
    const PathKey key = syms_.pathKey(p);
    const Root root = syms_.rootOf(key.root);
    std::vector<PathId> bases;
    switch (root.kind) {
      case RootKind::Param:
        if (root.inst == ctx.calleeInst && ctx.argPaths &&
            root.paramIndex < static_cast<int>(ctx.argPaths->size())) {
          bases = (*ctx.argPaths)[root.paramIndex];
        } else {
          Root r = root;
          r.inst = syms_.extendInstance(root.inst, ctx.suffix);
          bases = {syms_.path(syms_.root(r))};
        }
        break;
      case RootKind::Ret:
        if (root.inst == ctx.calleeInst) {
          bases = ctx.resultPaths;
        } else {
          Root r = root;
          r.inst = syms_.extendInstance(root.inst, ctx.suffix);
          bases = {syms_.path(syms_.root(r))};
        }
        break;
      case RootKind::Local: {
        Root r = root;
        r.inst = syms_.extendInstance(root.inst, ctx.suffix);
        bases = {syms_.path(syms_.root(r))};
        break;
      }
      case RootKind::Opaque: {
        Root r = root;
        r.name = syms_.name(syms_.nameText(root.name) + ctx.suffix);
        bases = {syms_.path(syms_.root(r))};
        break;
      }
      case RootKind::Alloc: {
        AllocSiteKey k = syms_.allocKey(root.alloc);
        k.contextTag = extendAllocCtx(k.contextTag, ctx);
        bases = {syms_.path(syms_.root(Root{RootKind::Alloc, kNoId, -1, kNoId, syms_.allocSite(k)}))};
        break;
      }
      case RootKind::Global:
        bases = {syms_.path(key.root)};
        break;
    }
    std::vector<PathId> out;
    for (PathId b : bases) {
      PathId cur = b;
      for (const auto& off : key.offsets) {
        auto [next, truncated] = syms_.extend(cur, off, config_.depthBound);
        if (truncated) ++widenings_;
        cur = next;
      }
      out.push_back(cur);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  void doInstantiate(const HybridSummary& cs, const std::vector<std::vector<PathId>>& argPaths,
                     std::vector<PathId> resultPaths, int site) {
    std::uint32_t tag = syms_.freshTag();
    RenameCtx ctx;
    ctx.calleeInst = cs.instance;
    ctx.argPaths = &argPaths;
    ctx.suffix = "!i" + std::to_string(tag);
    ctx.freshCtx = syms_.name("i" + std::to_string(tag));
    if (resultPaths.empty())
      resultPaths = {localPath("__dis" + std::to_string(tag))};
    ctx.resultPaths = std::move(resultPaths);

    for (const auto& c : cs.delta) {
      std::vector<PathId> lhs = renamePath(c.lhs, ctx);
      if (c.rhs.kind == Target::Kind::Free) {
        for (PathId r : renamePath(c.rhs.id, ctx))
          for (PathId l : lhs) state_.add(l, Target::free(r));
      } else if (c.rhs.kind == Target::Kind::Alloc) {
        AllocSiteKey k = syms_.allocKey(c.rhs.id);
        k.contextTag = extendAllocCtx(k.contextTag, ctx);
        Target t = Target::alloc(syms_.allocSite(k));
        for (PathId l : lhs) state_.add(l, t);
      } else {
        for (PathId l : lhs) state_.add(l, c.rhs);
      }
    }
    for (const auto& p : cs.pending) {
      CriticalStatement crit = p;
      crit.env.clear();
      for (const auto& [var, paths] : p.env) {
        std::vector<PathId> renamed;
        for (PathId q : paths) {
          auto r = renamePath(q, ctx);
          renamed.insert(renamed.end(), r.begin(), r.end());
        }
        std::sort(renamed.begin(), renamed.end());
        renamed.erase(std::unique(renamed.begin(), renamed.end()), renamed.end());
        crit.env.emplace(var, std::move(renamed));
      }
      if (p.resultPlaceholder != kNoId) {
        auto r = renamePath(p.resultPlaceholder, ctx);
        assert(r.size() == 1);
        crit.resultPlaceholder = r[0];
      }
      crit.allocCtx = extendAllocCtx(p.allocCtx, ctx);
      crit.steps += 1;
      crit.trail.push_back(site);
      log_.propagatedOrigins.insert(crit.originId);
      ++log_.createdInstances;
      pending_.push_back(std::move(crit));
    }
  }

  void stubCall(const std::vector<std::vector<PathId>>& argPaths,
                const std::vector<PathId>& resultPaths) {
    PathId opaque = syms_.path(
        syms_.root(Root{RootKind::Opaque, syms_.name("o" + std::to_string(syms_.freshTag())), -1,
                        kNoId, kNoId}));
    for (PathId r : resultPaths) state_.add(r, Target::free(opaque));
    for (const auto& arg : argPaths)
      for (PathId a : arg) state_.add(opaque, Target::free(a));
  }

  void instantiateCall(const std::string& callee, int site,
                       const std::vector<std::vector<PathId>>& argPaths,
                       const std::vector<PathId>& resultPaths, int dispatchSize) {
    auto ownerIt = siteOwner_.find(site);
    log_.edges.push_back(CallEdge{site, ownerIt == siteOwner_.end() ? owner_ : ownerIt->second,
                                  callee, owner_, dispatchSize});
    if (dispatchSize > 1) log_.polySites.insert(site);
    SummaryProvider::Resolved res = provider_.require(callee);
    if (res.stub) {
      stubCall(argPaths, resultPaths);
      return;
    }
    doInstantiate(*res.summary, argPaths, resultPaths, site);
  }

  // --- ready sweep ----------------------------------------------------------

  void rewritePendingRoot(RootId from, RootId to) {
    auto rewrite = [&](PathId p) {
      const PathKey& k = syms_.pathKey(p);
      if (k.root != from) return p;
      PathKey next = k;
      next.root = to;
      return syms_.path(next);
    };
    for (auto& crit : pending_) {
      for (auto& [var, paths] : crit.env)
        for (auto& p : paths) p = rewrite(p);
      if (crit.resultPlaceholder != kNoId) crit.resultPlaceholder = rewrite(crit.resultPlaceholder);
    }
  }

  void applyOpt1Limits() {
    if (!config_.opt1) return;
    std::map<std::string, int> perClass;
    for (const auto& p : pending_)
      if (p.stmt.kind == Statement::Kind::Call)
        for (const auto& cls : declaringClasses(prog_, p.stmt.callee)) ++perClass[cls];
    for (auto& p : pending_) {
      if (p.stmt.kind != Statement::Kind::Call) continue;
      for (const auto& cls : declaringClasses(prog_, p.stmt.callee))
        if (perClass[cls] > config_.opt1Threshold) {
          p.opt1Limit = config_.opt1K;
          break;
        }
    }
  }

  void resolveCritical(CriticalStatement crit) {
    ++resolvedHere_;
    ++log_.resolvedInstances;
    if (crit.steps >= 1) log_.resolutionSteps.push_back(crit.steps);

    if (crit.stmt.kind == Statement::Kind::Assign) {
      state_.addAll(consStmt(state_, crit.stmt, envBinding(crit)));
      return;
    }

    // Virtual call: dispatch on the receiver, fall back to all
    // implementations for the symbolic part.
    std::vector<PathId> recvPaths = evalLV(crit.stmt.args[0], state_, envBinding(crit));
    PointsToSet recvPt = state_.pointsToAllRaw(recvPaths);
    std::set<std::string> classes;
    for (AllocId a : recvPt.allocs)
      classes.insert(syms_.nameText(syms_.allocKey(a).cls));
    std::set<std::string> targets = dispatchTargets(prog_, crit.stmt.callee, classes);
    if (!recvPt.frees.empty()) {
      auto top = dispatchTargets(prog_, crit.stmt.callee, std::nullopt);
      targets.insert(top.begin(), top.end());
    }

    // Swap the symbolic result for a plain local before the targets land.
    std::vector<PathId> resultPaths;
    if (crit.resultPlaceholder != kNoId) {
      RootId from = syms_.pathKey(crit.resultPlaceholder).root;
      PathId subst = localPath("__r" + std::to_string(syms_.freshTag()));
      RootId to = syms_.pathKey(subst).root;
      state_.substituteRoot(from, to);
      rewritePendingRoot(from, to);
      resultPaths = {subst};
    }

    auto argPaths = evalArgs(crit.stmt, envBinding(crit));

    if (targets.empty()) {
      log_.diags.push_back({Severity::Warning, DiagCode::UnreachableCall,
                            "virtual call to '" + crit.stmt.callee + "' has no reachable target"});
      ++log_.unreachableCalls;
      return;
    }
    if (!provider_.allowDispatch(crit.stmt.callee, targets)) {
      log_.diags.push_back({Severity::Warning, DiagCode::DispatchTruncated,
                            "dispatch of '" + crit.stmt.callee + "' over-approximated (permutation guard)"});
      ++log_.dispatchTruncations;
      stubCall(argPaths, resultPaths);
      return;
    }
    provider_.noteDispatch(crit.stmt.callee, targets);
    for (const auto& t : targets)
      instantiateCall(t, crit.stmt.site, argPaths, resultPaths, static_cast<int>(targets.size()));
  }

  void sweep(bool forceAll) {
    for (;;) {
      state_.solve(SolveOptions{config_.depthBound});
      applyOpt1Limits();
      int pick = -1;
      for (size_t i = 0; i < pending_.size(); ++i) {
        if (forceAll || contextReady(pending_[i], state_, prog_, config_)) {
          pick = static_cast<int>(i);
          break;
        }
      }
      if (pick < 0 && static_cast<int>(pending_.size()) > config_.pendingCap) {
        // Over the cap: force the statement that has propagated farthest.
        int best = 0;
        for (size_t i = 1; i < pending_.size(); ++i)
          if (pending_[i].steps > pending_[best].steps) best = static_cast<int>(i);
        pick = best;
        ++log_.pendingCapHits;
        log_.diags.push_back({Severity::Warning, DiagCode::PendingCapHit,
                              "pending set over cap in '" + owner_ + "', forcing summarization"});
      }
      if (pick < 0) break;
      CriticalStatement crit = std::move(pending_[pick]);
      pending_.erase(pending_.begin() + pick);
      resolveCritical(std::move(crit));
    }
    log_.widenings += state_.wideningCount();
  }

 private:
  ProcSummarizer& s_;
  const Program& prog_;
  SymbolTable& syms_;
  const Config& config_;
  SummaryProvider& provider_;
  AnalysisLog& log_;
  const std::map<int, std::string>& siteOwner_;
};

ProcSummarizer::BuildResult ProcSummarizer::build(const Procedure& proc, InstId instance) {
  Engine e(*this, prog_, syms_, config_, provider_, log_, siteOwner_);
  e.scope_ = instance;
  e.owner_ = proc.id;
  e.prologue(proc);
  for (const auto& st : proc.body) e.addStatement(st);
  e.sweep(/*forceAll=*/false);

  std::set<PathId> extraSeeds;
  for (const auto& p : e.pending_)
    for (const auto& [var, paths] : p.env) extraSeeds.insert(paths.begin(), paths.end());

  BuildResult out{HybridSummary{}, e.state_, e.pending_};
  out.summary.owner = proc.id;
  out.summary.instance = instance;
  out.summary.delta = cleanup(e.state_, extraSeeds);
  out.summary.pending = e.pending_;
  out.summary.stats.widenings = e.widenings_ + e.state_.wideningCount();
  out.summary.stats.resolvedHere = e.resolvedHere_;
  log_.deferredInstances += static_cast<long long>(e.pending_.size());
  return out;
}

AbstractState ProcSummarizer::applyAtRoot(const Procedure& root, const BuildResult& raw) {
  Engine e(*this, prog_, syms_, config_, provider_, log_, siteOwner_);
  e.scope_ = raw.summary.instance;
  e.owner_ = root.id;
  e.state_ = raw.rawState;
  e.pending_ = raw.rawPending;
  log_.createdInstances += static_cast<long long>(e.pending_.size());
  e.sweep(/*forceAll=*/true);
  return e.state_;
}

} // namespace hipta
