#include "hipta/summary.hpp"

#include <algorithm>

namespace hipta {

HybridSummary joinSummaries(const HybridSummary& a, const HybridSummary& b) {
  HybridSummary out = a;
  std::set<Constraint> cs(a.delta.begin(), a.delta.end());
  cs.insert(b.delta.begin(), b.delta.end());
  out.delta.assign(cs.begin(), cs.end());
  std::set<CriticalStatement> pend(a.pending.begin(), a.pending.end());
  pend.insert(b.pending.begin(), b.pending.end());
  out.pending.assign(pend.begin(), pend.end());
  return out;
}

std::vector<PathId> VarBinding::lookup(const std::string& var) const {
  if (env) {
    auto it = env->find(var);
    if (it != env->end()) return it->second;
  }
  if (isGlobalName(var)) {
    RootId g = syms->root(Root{RootKind::Global, kNoId, -1, kNoId, kNoId});
    PathKey k{g, {HOffset{HOffset::Kind::Field, syms->name(var)}}};
    return {syms->path(k)};
  }
  if (var == "ret")
    return {syms->path(syms->root(Root{RootKind::Ret, kNoId, -1, scope, kNoId}))};
  return {syms->path(syms->root(Root{RootKind::Local, syms->name(var), -1, scope, kNoId}))};
}

namespace {

std::vector<PathId> extendAll(const std::vector<PathId>& bases, HOffset off,
                              const VarBinding& binding) {
  std::vector<PathId> out;
  for (PathId b : bases) {
    auto [p, truncated] = binding.syms->extend(b, off, binding.depthBound);
    if (truncated && binding.widenings) ++*binding.widenings;
    out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<PathId> evalLV(const LValue& lv, const AbstractState& state, const VarBinding& binding) {
  std::vector<PathId> paths = binding.lookup(lv.base);
  for (const auto& off : lv.offsets) {
    switch (off.kind) {
      case Offset::Kind::Field:
        paths = extendAll(paths, HOffset{HOffset::Kind::Field, binding.syms->name(off.name)}, binding);
        break;
      case Offset::Kind::ConstIndex:
        paths = extendAll(paths, HOffset{HOffset::Kind::Index, binding.syms->constant(off.c)}, binding);
        break;
      case Offset::Kind::VarIndex: {
        PointsToSet pt = state.pointsToAllRaw(binding.lookup(off.name));
        if (pt.onlyConsts()) {
          std::vector<PathId> expanded;
          for (ConstId c : pt.consts) {
            auto step = extendAll(paths, HOffset{HOffset::Kind::Index, c}, binding);
            expanded.insert(expanded.end(), step.begin(), step.end());
          }
          std::sort(expanded.begin(), expanded.end());
          expanded.erase(std::unique(expanded.begin(), expanded.end()), expanded.end());
          paths = std::move(expanded);
        } else {
          paths = extendAll(paths, HOffset{HOffset::Kind::Pi, 0}, binding);
        }
        break;
      }
    }
  }
  return paths;
}

std::vector<Constraint> consStmt(const AbstractState& state, const Statement& stmt,
                                 const VarBinding& binding) {
  std::vector<Constraint> out;
  if (stmt.kind != Statement::Kind::Assign) return out;
  std::vector<PathId> lhs = evalLV(stmt.lhs, state, binding);
  switch (stmt.rhs.kind) {
    case RValue::Kind::Path: {
      std::vector<PathId> rhs = evalLV(stmt.rhs.path, state, binding);
      for (PathId l : lhs)
        for (PathId r : rhs)
          if (l != r) out.push_back(Constraint{l, Target::free(r)});
      break;
    }
    case RValue::Kind::Const: {
      ConstId c = binding.syms->constant(stmt.rhs.c);
      for (PathId l : lhs) out.push_back(Constraint{l, Target::constant(c)});
      break;
    }
    case RValue::Kind::New: {
      AllocId a = binding.syms->allocSite(AllocSiteKey{
          binding.syms->name(stmt.rhs.label), binding.syms->name(stmt.rhs.cls), binding.allocCtx});
      for (PathId l : lhs) out.push_back(Constraint{l, Target::alloc(a)});
      break;
    }
  }
  return out;
}

bool isCritical(const Statement& stmt, const Program& prog) {
  if (stmt.kind == Statement::Kind::Assign) {
    if (stmt.lhs.hasVarIndex()) return true;
    return stmt.rhs.kind == RValue::Kind::Path && stmt.rhs.path.hasVarIndex();
  }
  if (!stmt.virtualCall) return false;
  return prog.allImplementations(stmt.callee).size() > 1;
}

namespace {

bool pathHasPi(const SymbolTable& syms, PathId p) {
  for (const auto& off : syms.pathKey(p).offsets)
    if (off.kind == HOffset::Kind::Pi) return true;
  return false;
}

PointsToSet receiverPt(const CriticalStatement& crit, const AbstractState& state,
                       const Config& config) {
  VarBinding binding{&state.syms(), kNoId, &crit.env, crit.allocCtx, config.depthBound, nullptr};
  std::vector<PathId> recv = evalLV(crit.stmt.args[0], state, binding);
  return state.pointsToAllRaw(recv);
}

}  // namespace

bool contextAdequate(const CriticalStatement& crit, const AbstractState& state,
                     const Program& prog, const Config& config) {
  VarBinding binding{&state.syms(), kNoId, &crit.env, crit.allocCtx, config.depthBound, nullptr};
  if (crit.stmt.kind == Statement::Kind::Assign) {
    auto indexFreeOf = [&](const LValue& lv) {
      for (const auto& off : lv.offsets) {
        if (off.kind != Offset::Kind::VarIndex) continue;
        PointsToSet pt = state.pointsToAllRaw(binding.lookup(off.name));
        if (!pt.frees.empty()) return false;
      }
      return true;
    };
    if (!indexFreeOf(crit.stmt.lhs)) return false;
    if (crit.stmt.rhs.kind == RValue::Kind::Path && !indexFreeOf(crit.stmt.rhs.path)) return false;
    return true;
  }
  // Virtual call: receiver resolved, or monomorphic under the class table.
  if (dispatchTargets(prog, crit.stmt.callee, std::nullopt).size() == 1) return true;
  return receiverPt(crit, state, config).frees.empty();
}

bool contextReady(const CriticalStatement& crit, const AbstractState& state, const Program& prog,
                  const Config& config) {
  if (config.mode == Config::Mode::ComCI) return true;
  if (config.mode == Config::Mode::HIk && crit.steps >= config.k) return true;
  if (crit.opt1Limit >= 0 && crit.steps >= crit.opt1Limit) return true;
  if (config.opt2 && crit.stmt.kind == Statement::Kind::Call) {
    // A receiver derived from an unresolved container access does not gain
    // from further propagation.
    PointsToSet pt = receiverPt(crit, state, config);
    for (PathId f : pt.frees)
      if (pathHasPi(state.syms(), f)) return true;
  }
  return contextAdequate(crit, state, prog, config);
}

std::string printConstraint(const Constraint& c, const SymbolTable& syms) {
  std::string out = syms.printPath(c.lhs) + " >= ";
  switch (c.rhs.kind) {
    case Target::Kind::Alloc: out += "{" + syms.printAlloc(c.rhs.id) + "}"; break;
    case Target::Kind::Const: out += "{" + syms.constVal(c.rhs.id).toString() + "}"; break;
    case Target::Kind::Free: out += syms.printPath(c.rhs.id); break;
  }
  return out;
}

std::string printCritical(const CriticalStatement& crit, const SymbolTable& syms) {
  std::string out = "pending \"" + printStatement(crit.stmt) + "\" steps=" + std::to_string(crit.steps);
  for (const auto& [var, paths] : crit.env) {
    out += " " + var + "->{";
    for (size_t i = 0; i < paths.size(); ++i) out += (i ? "," : "") + syms.printPath(paths[i]);
    out += "}";
  }
  return out;
}

} // namespace hipta
