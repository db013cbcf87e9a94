#include "hipta/oracle.hpp"

#include <algorithm>
#include <sstream>

namespace hipta {
namespace {

// Shared statement processing for both oracle flavors. A "frame" is one
// analyzed copy of a procedure: top-down context-insensitive analysis has
// exactly one frame per procedure, full inlining one per call string.
struct Frame {
  std::string proc;
  InstId inst = kNoId;
  bool isRoot = false;
  std::vector<int> sites;               // context: callsite chain (possibly truncated)
  std::vector<std::string> procChain;   // full chain, recursion detection (unbounded mode)
  std::map<std::string, std::vector<PathId>> env;  // "ret" remapping for callees
};

class OracleEngine {
 public:
  OracleEngine(const Program& prog, SymbolTable& syms, const Config& config, bool inlining,
               int kBound)
      : prog_(prog), syms_(syms), config_(config), inlining_(inlining), kBound_(kBound),
        state_(&syms) {}

  bool run(const std::vector<std::string>& roots) {
    for (const auto& r : roots) {
      const Procedure* p = prog_.findProc(r);
      if (!p) continue;
      makeFrame(r, {}, {r}, true);
    }
    bool grew = true;
    std::uint64_t rounds = 0;
    while (grew) {
      if (++rounds > 10000 || frames_.size() > 50000) return false;
      state_.solve(SolveOptions{config_.depthBound});
      grew = false;
      size_t constraintsBefore = state_.constraints().size();
      size_t framesBefore = frames_.size();
      for (size_t i = 0; i < frames_.size(); ++i) processFrame(i);
      if (state_.constraints().size() != constraintsBefore || frames_.size() != framesBefore)
        grew = true;
    }
    state_.solve(SolveOptions{config_.depthBound});
    return true;
  }

  AbstractState& state() { return state_; }
  std::set<std::string> reached() const {
    std::set<std::string> out;
    for (const auto& f : frames_) out.insert(f.proc);
    return out;
  }

 private:
  InstId frameInstance(const std::string& proc, const std::vector<int>& sites, bool isRoot) {
    if (!inlining_) return syms_.instance(proc);
    if (isRoot) return syms_.instance(proc);
    std::string key = proc + "|";
    for (int s : sites) key += "s" + std::to_string(s) + ".";
    return syms_.instance(key);
  }

  int makeFrame(const std::string& proc, const std::vector<int>& sites,
                const std::vector<std::string>& procChain, bool isRoot) {
    InstId inst = frameInstance(proc, sites, isRoot);
    auto it = frameIndex_.find(inst);
    if (it != frameIndex_.end()) return it->second;
    Frame f;
    f.proc = proc;
    f.inst = inst;
    f.isRoot = isRoot;
    f.sites = sites;
    f.procChain = procChain;
    if (!isRoot)
      f.env.emplace("ret", std::vector<PathId>{syms_.path(syms_.root(
                               Root{RootKind::Local, syms_.name("__ret"), -1, inst, kNoId}))});
    frames_.push_back(f);
    int idx = static_cast<int>(frames_.size()) - 1;
    frameIndex_.emplace(inst, idx);
    const Procedure* p = prog_.findProc(proc);
    if (p && isRoot) {
      // Root parameters stay symbolic, exactly as in the compositional runs.
      for (size_t i = 0; i < p->params.size(); ++i) {
        PathId param = syms_.path(
            syms_.root(Root{RootKind::Param, kNoId, static_cast<int>(i), inst, kNoId}));
        PathId local = syms_.path(
            syms_.root(Root{RootKind::Local, syms_.name(p->params[i]), -1, inst, kNoId}));
        state_.add(local, Target::free(param));
      }
    }
    return idx;
  }

  VarBinding binding(const Frame& f) {
    return VarBinding{&syms_, f.inst, f.env.empty() ? nullptr : &f.env,
                      inlining_ && !f.isRoot ? f.inst : kNoId, config_.depthBound, nullptr};
  }

  void processFrame(size_t idx) {
    Frame f = frames_[idx];  // copy: frames_ may grow below
    const Procedure* p = prog_.findProc(f.proc);
    if (!p) return;
    VarBinding b = binding(f);
    for (const auto& st : p->body) {
      if (st.kind == Statement::Kind::Assign) {
        state_.addAll(consStmt(state_, st, b));
        continue;
      }
      std::set<std::string> targets;
      if (!st.virtualCall) {
        targets.insert(st.callee);
      } else {
        std::vector<PathId> recv = evalLV(st.args[0], state_, b);
        PointsToSet pt = state_.pointsToAllRaw(recv);
        std::set<std::string> classes;
        for (AllocId a : pt.allocs) classes.insert(syms_.nameText(syms_.allocKey(a).cls));
        targets = dispatchTargets(prog_, st.callee, classes);
        if (!pt.frees.empty()) {
          auto top = dispatchTargets(prog_, st.callee, std::nullopt);
          targets.insert(top.begin(), top.end());
        }
      }
      for (const auto& t : targets) bindCall(f, st, t, b);
    }
  }

  void bindCall(const Frame& f, const Statement& st, const std::string& callee, VarBinding& b) {
    const Procedure* cp = prog_.findProc(callee);
    if (!cp) return;

    std::vector<PathId> resultPaths;
    if (st.hasResult) resultPaths = evalLV(st.lhs, state_, b);

    if (inlining_) {
      int occurs = static_cast<int>(std::count(f.procChain.begin(), f.procChain.end(), callee));
      if (kBound_ < 0 && occurs >= config_.unroll) {
        // Recursion cut: the same opaque over-approximation the driver uses.
        PathId opaque = opaqueFor(f, st.site, callee);
        for (PathId r : resultPaths) state_.add(r, Target::free(opaque));
        for (const auto& a : st.args)
          for (PathId ap : evalLV(a, state_, b)) state_.add(opaque, Target::free(ap));
        return;
      }
    }

    std::vector<int> sites = f.sites;
    sites.push_back(st.site);
    if (inlining_ && kBound_ >= 0 && static_cast<int>(sites.size()) > kBound_)
      sites.erase(sites.begin(), sites.end() - kBound_);
    std::vector<std::string> chain = f.procChain;
    chain.push_back(callee);
    int child = inlining_ ? makeFrame(callee, sites, chain, false)
                          : makeFrame(callee, {}, {callee}, false);
    const Frame& cf = frames_[child];

    for (size_t i = 0; i < cp->params.size() && i < st.args.size(); ++i) {
      PathId param = syms_.path(
          syms_.root(Root{RootKind::Local, syms_.name(cp->params[i]), -1, cf.inst, kNoId}));
      for (PathId ap : evalLV(st.args[i], state_, b)) state_.add(param, Target::free(ap));
    }
    if (!resultPaths.empty()) {
      PathId ret = syms_.path(
          syms_.root(Root{RootKind::Local, syms_.name("__ret"), -1, cf.inst, kNoId}));
      for (PathId r : resultPaths) state_.add(r, Target::free(ret));
    }
  }

  PathId opaqueFor(const Frame& f, int site, const std::string& callee) {
    std::string key = "cut:" + syms_.nameText(f.inst) + ":s" + std::to_string(site) + ":" + callee;
    return syms_.path(syms_.root(Root{RootKind::Opaque, syms_.name(key), -1, kNoId, kNoId}));
  }

  const Program& prog_;
  SymbolTable& syms_;
  const Config& config_;
  bool inlining_;
  int kBound_;
  AbstractState state_;
  std::vector<Frame> frames_;
  std::map<InstId, int> frameIndex_;
};

}  // namespace

AbstractState topDownCI(const Program& prog, SymbolTable& syms, const Config& config,
                        std::set<std::string>* reachedOut) {
  OracleEngine engine(prog, syms, config, /*inlining=*/false, /*kBound=*/-1);
  engine.run(prog.roots);
  if (reachedOut) *reachedOut = engine.reached();
  return engine.state();
}

std::optional<std::map<std::string, AbstractState>> inlineExact(
    const Program& prog, SymbolTable& syms, int kBound, const Config& config,
    std::vector<Diagnostic>* diags) {
  std::map<std::string, AbstractState> out;
  for (const auto& r : prog.roots) {
    if (out.count(r)) continue;
    OracleEngine engine(prog, syms, config, /*inlining=*/true, kBound);
    if (!engine.run({r})) {
      if (diags)
        diags->push_back({Severity::Error, DiagCode::OracleFuelExhausted,
                          "oracle fuel exhausted on root '" + r + "'"});
      return std::nullopt;
    }
    out.emplace(r, engine.state());
  }
  return out;
}

bool RootFacts::Entry::supersetOf(const Entry& o) const {
  return std::includes(labels.begin(), labels.end(), o.labels.begin(), o.labels.end()) &&
         std::includes(consts.begin(), consts.end(), o.consts.begin(), o.consts.end()) &&
         std::includes(frees.begin(), frees.end(), o.frees.begin(), o.frees.end());
}

bool RootFacts::supersetOf(const RootFacts& o) const {
  for (const auto& [path, entry] : o.paths) {
    auto it = paths.find(path);
    if (it == paths.end()) {
      if (!entry.trivial()) return false;
      continue;
    }
    if (!it->second.supersetOf(entry)) return false;
  }
  return std::includes(aliases.begin(), aliases.end(), o.aliases.begin(), o.aliases.end());
}

std::set<PathId> rootQueryPaths(const AbstractState& state, InstId rootInst) {
  std::set<PathId> out;
  const SymbolTable& syms = state.syms();
  for (PathId cell : state.cellList()) {
    const Root& r = syms.rootOf(syms.pathKey(cell).root);
    bool scoped = (r.kind == RootKind::Local || r.kind == RootKind::Param ||
                   r.kind == RootKind::Ret) &&
                  r.inst == rootInst;
    if (scoped || r.kind == RootKind::Global) out.insert(cell);
  }
  return out;
}

namespace {

std::string normalizeFree(const SymbolTable& syms, PathId p) {
  const PathKey& k = syms.pathKey(p);
  const Root& r = syms.rootOf(k.root);
  std::string out;
  if (r.kind == RootKind::Opaque) {
    out = "top";
  } else {
    out = syms.printRoot(k.root);
  }
  for (const auto& off : k.offsets) out += syms.printOffset(off);
  return out;
}

}  // namespace

RootFacts extractRootFacts(const AbstractState& state, const std::set<PathId>& queryPaths,
                           InstId rootInst) {
  (void)rootInst;
  const SymbolTable& syms = state.syms();
  RootFacts out;
  std::vector<std::pair<std::string, PathId>> printed;
  for (PathId p : queryPaths) printed.emplace_back(syms.printPath(p), p);
  std::sort(printed.begin(), printed.end());

  std::map<PathId, PointsToSet> raw;
  for (const auto& [text, p] : printed) raw.emplace(p, state.pointsToRaw(p));

  for (const auto& [text, p] : printed) {
    RootFacts::Entry e;
    const PointsToSet& pt = raw.at(p);
    for (AllocId a : pt.allocs) e.labels.insert(syms.nameText(syms.allocKey(a).label));
    for (ConstId c : pt.consts) e.consts.insert(syms.constVal(c).toString());
    for (PathId f : pt.frees)
      if (f != p) e.frees.insert(normalizeFree(syms, f));
    if (!e.trivial()) out.paths.emplace(text, std::move(e));
  }
  for (size_t i = 0; i < printed.size(); ++i)
    for (size_t j = i + 1; j < printed.size(); ++j)
      if (raw.at(printed[i].second).intersects(raw.at(printed[j].second)))
        out.aliases.emplace(printed[i].first, printed[j].first);
  return out;
}

FactsComparison compareRootStates(const AbstractState& a, const AbstractState& b,
                                  InstId rootInst, bool requireEqual) {
  std::set<PathId> query = rootQueryPaths(a, rootInst);
  for (PathId p : rootQueryPaths(b, rootInst)) query.insert(p);
  RootFacts fa = extractRootFacts(a, query, rootInst);
  RootFacts fb = extractRootFacts(b, query, rootInst);

  FactsComparison out;
  if (requireEqual ? (fa == fb) : fa.supersetOf(fb)) return out;
  out.ok = false;
  std::ostringstream os;
  auto dumpSide = [&](const char* name, const RootFacts& f) {
    os << name << ":\n";
    for (const auto& [path, e] : f.paths) {
      os << "  " << path << " ->";
      for (const auto& l : e.labels) os << " l" << l;
      for (const auto& c : e.consts) os << " " << c;
      for (const auto& fr : e.frees) os << " " << fr;
      os << "\n";
    }
    for (const auto& [x, y] : f.aliases) os << "  alias " << x << " ~ " << y << "\n";
  };
  dumpSide("left", fa);
  dumpSide("right", fb);
  out.diff = os.str();
  return out;
}

} // namespace hipta
