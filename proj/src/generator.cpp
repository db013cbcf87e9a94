#include "hipta/generator.hpp"

#include <cassert>
#include <random>

namespace hipta {

namespace {

class Gen {
 public:
  Gen(std::uint64_t seed, const GenParams& params) : rng_(seed), params_(params) {}

  Program run() {
    int layers = 2 + pick(std::max(1, params_.maxCallDepth - 1));
    int nprocs = std::min(params_.maxProcs, layers + 1 + pick(params_.maxProcs));
    layers = std::min(layers, nprocs);
    nclasses_ = 1 + pick(params_.hierarchyWidth);

    // Layered call structure keeps the program acyclic with bounded depth.
    std::vector<int> layerOf(nprocs);
    for (int i = 0; i < nprocs; ++i)
      layerOf[i] = i < layers ? i : pick(layers);

    bool withDispatch = nclasses_ >= 2 && nprocs >= layers + 1;
    std::vector<int> implProcs;
    if (withDispatch) {
      // Implementations live in the last layer: their bodies stay call-free.
      for (int i = 0; i < nprocs && static_cast<int>(implProcs.size()) < nclasses_; ++i)
        if (layerOf[i] == layers - 1) implProcs.push_back(i);
      if (static_cast<int>(implProcs.size()) < 2) withDispatch = false;
    }

    Program prog;
    for (int c = 0; c < nclasses_; ++c) {
      ClassDecl decl;
      decl.name = "C" + std::to_string(c);
      if (withDispatch && c < static_cast<int>(implProcs.size())) {
        decl.supers.push_back("I");
        decl.methods["work"] = procName(implProcs[c]);
      }
      prog.classes.push_back(std::move(decl));
    }
    if (withDispatch) {
      ClassDecl iface;
      iface.name = "I";
      iface.abstracts.insert("work");
      prog.classes.push_back(std::move(iface));
    }

    for (int i = 0; i < nprocs; ++i) {
      bool isImpl = false;
      for (int p : implProcs) isImpl |= p == i;
      prog.procs.push_back(genProc(i, layerOf, layers, nprocs, isImpl, withDispatch));
    }
    prog.roots.push_back(procName(0));
    return prog;
  }

 private:
  int pick(int n) { return n <= 0 ? 0 : static_cast<int>(rng_() % static_cast<std::uint64_t>(n)); }
  bool chance(int percent) { return pick(100) < percent; }
  std::string procName(int i) { return "p" + std::to_string(i); }

  std::string anyVar(const std::vector<std::string>& defined) {
    if (chance(10)) return pick(2) ? "$g0" : "$g1";
    return defined[pick(static_cast<int>(defined.size()))];
  }

  LValue anyLV(const std::vector<std::string>& defined, bool allowOffsets) {
    LValue lv{anyVar(defined), {}};
    if (!allowOffsets) return lv;
    int r = pick(10);
    if (r < 3) {
      lv.offsets.push_back({Offset::Kind::Field, pick(2) ? "f" : "g", {}});
    } else if (r < 5) {
      lv.offsets.push_back({Offset::Kind::ConstIndex, "",
                            pick(2) ? ConstVal::ofStr("k" + std::to_string(pick(3)))
                                    : ConstVal::ofInt(pick(3))});
    } else if (r == 5) {
      lv.offsets.push_back({Offset::Kind::VarIndex, anyVar(defined), {}});
    }
    return lv;
  }

  Procedure genProc(int index, const std::vector<int>& layerOf, int layers, int nprocs,
                    bool isImpl, bool withDispatch) {
    (void)layers;
    Procedure p;
    p.id = procName(index);
    int nparams = 1 + pick(3);
    for (int i = 0; i < nparams; ++i) p.params.push_back("a" + std::to_string(i));

    std::vector<std::string> defined(p.params.begin(), p.params.end());
    std::vector<int> callees;
    for (int j = 0; j < nprocs; ++j)
      if (layerOf[j] > layerOf[index]) callees.push_back(j);

    int nstmts = 2 + pick(params_.maxStmtsPerProc - 1);
    int nextVar = 0;
    auto freshVar = [&] {
      std::string v = "v" + std::to_string(nextVar++);
      defined.push_back(v);
      return v;
    };

    for (int s = 0; s < nstmts; ++s) {
      Statement st;
      int r = pick(100);
      if (r < 18) {
        st.lhs = LValue{freshVar(), {}};
        st.rhs = RValue{RValue::Kind::New, {}, {}, "C" + std::to_string(pick(nclasses_)), freshLabel()};
      } else if (r < 30) {
        st.lhs = LValue{freshVar(), {}};
        st.rhs = RValue{RValue::Kind::Path, anyLV(defined, true), {}, {}, {}};
      } else if (r < 40) {
        st.lhs = anyLV(defined, true);
        st.rhs = RValue{RValue::Kind::Path, anyLV(defined, false), {}, {}, {}};
      } else if (r < 52) {
        st.lhs = LValue{freshVar(), {}};
        st.rhs = RValue{RValue::Kind::Const, {},
                        pick(2) ? ConstVal::ofStr("k" + std::to_string(pick(3)))
                                : ConstVal::ofInt(pick(3)),
                        {}, {}};
      } else if (r < 72 && !callees.empty() && !isImpl) {
        int j = callees[pick(static_cast<int>(callees.size()))];
        st.kind = Statement::Kind::Call;
        st.callee = procName(j);
        st.virtualCall = false;
        st.hasResult = chance(70);
        if (st.hasResult) st.lhs = LValue{freshVar(), {}};
        // arity is fixed below once the callee's params are known
        for (int i = 0; i < 3; ++i) st.args.push_back(anyLV(defined, false));
      } else if (r < 80 && withDispatch && !isImpl) {
        st.kind = Statement::Kind::Call;
        st.callee = "work";
        st.virtualCall = true;
        st.hasResult = chance(70);
        if (st.hasResult) st.lhs = LValue{freshVar(), {}};
        st.args.push_back(anyLV(defined, false));
        st.args.push_back(anyLV(defined, false));
      } else {
        st.lhs = anyLV(defined, true);
        st.rhs = RValue{RValue::Kind::Path, anyLV(defined, false), {}, {}, {}};
      }
      p.body.push_back(std::move(st));
    }
    if (chance(80)) {
      Statement ret;
      ret.lhs = LValue{"ret", {}};
      ret.rhs = RValue{RValue::Kind::Path, LValue{anyVar(defined), {}}, {}, {}, {}};
      p.body.push_back(std::move(ret));
    }
    return p;
  }

  std::string freshLabel() { return std::to_string(100 + labels_++); }

  std::mt19937_64 rng_;
  GenParams params_;
  int nclasses_ = 1;
  int labels_ = 0;
};

}  // namespace

Program generateProgram(std::uint64_t seed, const GenParams& params) {
  Gen gen(seed, params);
  Program prog = gen.run();
  // Trim static-call argument lists to the callee arity.
  for (auto& p : prog.procs)
    for (auto& st : p.body) {
      if (st.kind != Statement::Kind::Call || st.virtualCall) continue;
      const Procedure* callee = prog.findProc(st.callee);
      if (callee && st.args.size() > callee->params.size())
        st.args.resize(callee->params.size());
      if (st.args.empty()) st.args.push_back(LValue{p.params[0], {}});
    }
  // Virtual implementations need two parameters (receiver + payload).
  for (auto& c : prog.classes)
    for (auto& [m, pid] : c.methods) {
      (void)m;
      for (auto& p : prog.procs)
        if (p.id == pid && p.params.size() < 2) {
          while (p.params.size() < 2) p.params.push_back("a" + std::to_string(p.params.size()));
        }
    }
  std::vector<Diagnostic> diags;
  normalizeProgram(prog, diags);
  assert(!hasErrors(diags));
  return prog;
}

} // namespace hipta
