#include "hipta/ir.hpp"

#include <algorithm>
#include <sstream>

namespace hipta {

const char* diagCodeName(DiagCode code) {
  switch (code) {
    case DiagCode::SyntaxError: return "syntax-error";
    case DiagCode::DuplicateSiteLabel: return "duplicate-site-label";
    case DiagCode::DuplicateProc: return "duplicate-proc";
    case DiagCode::DuplicateClass: return "duplicate-class";
    case DiagCode::DuplicateMethodBinding: return "duplicate-method-binding";
    case DiagCode::UnresolvableMethod: return "unresolvable-method";
    case DiagCode::SupersCycle: return "supers-cycle";
    case DiagCode::UnknownVariable: return "unknown-variable";
    case DiagCode::ReservedIdentifier: return "reserved-identifier";
    case DiagCode::BadAssertion: return "bad-assertion";
    case DiagCode::PathWidened: return "path-widened";
    case DiagCode::PendingCapHit: return "pending-cap-hit";
    case DiagCode::DispatchTruncated: return "dispatch-truncated";
    case DiagCode::UnreachableCall: return "unreachable-call";
    case DiagCode::OracleFuelExhausted: return "oracle-fuel-exhausted";
    case DiagCode::InternalError: return "internal-error";
  }
  return "unknown";
}

std::string formatDiagnostic(const Diagnostic& d) {
  std::ostringstream os;
  switch (d.severity) {
    case Severity::Note: os << "note"; break;
    case Severity::Warning: os << "warning"; break;
    case Severity::Error: os << "error"; break;
  }
  os << "[" << diagCodeName(d.code) << "]";
  if (d.line > 0) os << " at " << d.line << ":" << d.col;
  os << ": " << d.message;
  return os.str();
}

std::string ConstVal::toString() const {
  if (kind == Kind::Int) return std::to_string(intval);
  std::string out = "\"";
  for (char ch : strval) {
    if (ch == '"' || ch == '\\') out.push_back('\\');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

bool LValue::hasVarIndex() const {
  for (const auto& o : offsets)
    if (o.kind == Offset::Kind::VarIndex) return true;
  return false;
}

bool isGlobalName(const std::string& name) { return !name.empty() && name[0] == '$'; }

const Procedure* Program::findProc(const std::string& id) const {
  for (const auto& p : procs)
    if (p.id == id) return &p;
  return nullptr;
}

const ClassDecl* Program::findClass(const std::string& name) const {
  for (const auto& c : classes)
    if (c.name == name) return &c;
  return nullptr;
}

std::set<std::string> Program::allImplementations(const std::string& method) const {
  std::set<std::string> out;
  for (const auto& c : classes) {
    auto it = c.methods.find(method);
    if (it != c.methods.end()) out.insert(it->second);
  }
  return out;
}

namespace {

// Nearest binding of `method` for receiver class `cls`, walking supers. A
// class that binds the method shadows its supers; diamonds contribute the
// union of their chains.
void nearestBindings(const Program& prog, const std::string& cls, const std::string& method,
                     std::set<std::string>& visited, std::set<std::string>& out) {
  if (!visited.insert(cls).second) return;
  const ClassDecl* decl = prog.findClass(cls);
  if (!decl) return;
  auto it = decl->methods.find(method);
  if (it != decl->methods.end()) {
    out.insert(it->second);
    return;
  }
  for (const auto& super : decl->supers)
    nearestBindings(prog, super, method, visited, out);
}

}  // namespace

std::set<std::string> dispatchTargets(const Program& prog, const std::string& method,
                                      const std::optional<std::set<std::string>>& receiverClasses) {
  std::set<std::string> out;
  if (!receiverClasses) {
    for (const auto& c : prog.classes) {
      std::set<std::string> visited;
      nearestBindings(prog, c.name, method, visited, out);
    }
    return out;
  }
  for (const auto& cls : *receiverClasses) {
    std::set<std::string> visited;
    nearestBindings(prog, cls, method, visited, out);
  }
  return out;
}

std::string printLValue(const LValue& lv) {
  std::string out = lv.base;
  for (const auto& o : lv.offsets) {
    switch (o.kind) {
      case Offset::Kind::Field: out += "." + o.name; break;
      case Offset::Kind::ConstIndex: out += "[" + o.c.toString() + "]"; break;
      case Offset::Kind::VarIndex: out += "[" + o.name + "]"; break;
    }
  }
  return out;
}

std::string printRValue(const RValue& rv) {
  switch (rv.kind) {
    case RValue::Kind::Path: return printLValue(rv.path);
    case RValue::Kind::Const: return rv.c.toString();
    case RValue::Kind::New: return "new " + rv.cls + "@" + rv.label;
  }
  return {};
}

std::string printStatement(const Statement& st) {
  std::string out;
  if (st.kind == Statement::Kind::Assign) {
    out = printLValue(st.lhs) + " = " + printRValue(st.rhs) + ";";
  } else {
    if (st.hasResult) out = printLValue(st.lhs) + " = ";
    out += st.virtualCall ? "vcall " : "scall ";
    out += st.callee + "(";
    for (size_t i = 0; i < st.args.size(); ++i) {
      if (i) out += ", ";
      out += printLValue(st.args[i]);
    }
    out += ");";
  }
  return out;
}

namespace {

bool isTempName(const std::string& name) { return name.rfind("__", 0) == 0; }

}  // namespace

void normalizeProgram(Program& prog, std::vector<Diagnostic>& diags) {
  int nextSite = 0;
  int nextStmt = 0;
  for (auto& proc : prog.procs) {
    // Set semantics: dedupe by printed form, then sort for a canonical order
    // so that downstream naming never depends on authored statement order.
    std::map<std::string, Statement> uniq;
    for (auto& st : proc.body) uniq.emplace(printStatement(st), st);

    std::vector<Statement> canon;
    int rank = 0;
    for (auto& [text, st] : uniq) {
      (void)text;
      if (st.kind == Statement::Kind::Call) {
        // Calls must not carry variable-indexed lvalues; split them off into
        // temp assignments so critical statements keep one of two shapes.
        int slot = 0;
        auto splitLV = [&](LValue& lv) {
          if (!lv.hasVarIndex()) return;
          std::string tmp = "__t" + std::to_string(rank) + "_" + std::to_string(slot++);
          Statement assign;
          assign.kind = Statement::Kind::Assign;
          assign.lhs = LValue{tmp, {}};
          assign.rhs = RValue{RValue::Kind::Path, lv, {}, {}, {}};
          canon.push_back(assign);
          lv = LValue{tmp, {}};
        };
        for (auto& arg : st.args) splitLV(arg);
        if (st.hasResult && st.lhs.hasVarIndex()) {
          std::string tmp = "__t" + std::to_string(rank) + "_" + std::to_string(slot++);
          Statement assign;
          assign.kind = Statement::Kind::Assign;
          assign.lhs = st.lhs;
          assign.rhs = RValue{RValue::Kind::Path, LValue{tmp, {}}, {}, {}, {}};
          canon.push_back(assign);
          st.lhs = LValue{tmp, {}};
        }
      }
      canon.push_back(st);
      ++rank;
    }
    std::map<std::string, Statement> resorted;
    for (auto& st : canon) resorted.emplace(printStatement(st), st);
    proc.body.clear();
    for (auto& [text, st] : resorted) {
      (void)text;
      proc.body.push_back(st);
    }
    for (auto& st : proc.body) {
      st.stmtId = nextStmt++;
      if (st.kind == Statement::Kind::Call) st.site = nextSite++;
    }
  }

  // Validation that depends on the canonical form.
  std::set<std::string> procIds;
  for (const auto& p : prog.procs)
    if (!procIds.insert(p.id).second)
      diags.push_back({Severity::Error, DiagCode::DuplicateProc, "duplicate procedure '" + p.id + "'"});

  std::set<std::string> classNames;
  for (const auto& c : prog.classes)
    if (!classNames.insert(c.name).second)
      diags.push_back({Severity::Error, DiagCode::DuplicateClass, "duplicate class '" + c.name + "'"});

  std::set<std::string> labels;
  for (const auto& p : prog.procs)
    for (const auto& st : p.body)
      if (st.kind == Statement::Kind::Assign && st.rhs.kind == RValue::Kind::New)
        if (!labels.insert(st.rhs.label).second)
          diags.push_back({Severity::Error, DiagCode::DuplicateSiteLabel,
                           "allocation label '@" + st.rhs.label + "' used more than once"});

  // Supers cycles.
  for (const auto& c : prog.classes) {
    std::set<std::string> seen;
    std::vector<std::string> stack{c.name};
    while (!stack.empty()) {
      std::string cur = stack.back();
      stack.pop_back();
      const ClassDecl* d = prog.findClass(cur);
      if (!d) continue;
      for (const auto& s : d->supers) {
        if (s == c.name) {
          diags.push_back({Severity::Error, DiagCode::SupersCycle,
                           "class hierarchy cycle through '" + c.name + "'"});
          stack.clear();
          break;
        }
        if (seen.insert(s).second) stack.push_back(s);
      }
    }
  }

  for (const auto& c : prog.classes) {
    for (const auto& [m, pid] : c.methods)
      if (!prog.findProc(pid))
        diags.push_back({Severity::Error, DiagCode::UnresolvableMethod,
                         "method '" + c.name + "." + m + "' bound to unknown procedure '" + pid + "'"});
    for (const auto& m : c.abstracts)
      if (c.methods.count(m))
        diags.push_back({Severity::Error, DiagCode::DuplicateMethodBinding,
                         "method '" + m + "' both abstract and bound on '" + c.name + "'"});
  }

  // Scope rules: every variable is a parameter, assigned in the body, or a
  // global. "ret" names the symbolic return slot.
  for (const auto& p : prog.procs) {
    std::set<std::string> known(p.params.begin(), p.params.end());
    known.insert("ret");
    for (const auto& st : p.body) {
      if (st.kind == Statement::Kind::Assign && st.lhs.offsets.empty()) known.insert(st.lhs.base);
      if (st.kind == Statement::Kind::Call && st.hasResult && st.lhs.offsets.empty())
        known.insert(st.lhs.base);
    }
    auto checkVar = [&](const std::string& v) {
      if (isGlobalName(v) || known.count(v)) return;
      diags.push_back({Severity::Error, DiagCode::UnknownVariable,
                       "variable '" + v + "' in '" + p.id + "' is neither a parameter, assigned, nor a global"});
      known.insert(v);  // report once
    };
    auto checkLV = [&](const LValue& lv) {
      checkVar(lv.base);
      for (const auto& o : lv.offsets)
        if (o.kind == Offset::Kind::VarIndex) checkVar(o.name);
    };
    for (const auto& param : p.params)
      if (isTempName(param) || isGlobalName(param) || param == "ret")
        diags.push_back({Severity::Error, DiagCode::ReservedIdentifier,
                         "parameter '" + param + "' of '" + p.id + "' uses a reserved name"});
    for (const auto& st : p.body) {
      if (st.kind == Statement::Kind::Assign) {
        checkLV(st.lhs);
        if (st.rhs.kind == RValue::Kind::Path) checkLV(st.rhs.path);
        if (st.rhs.kind == RValue::Kind::New && !prog.findClass(st.rhs.cls))
          diags.push_back({Severity::Error, DiagCode::UnresolvableMethod,
                           "allocation of undeclared class '" + st.rhs.cls + "' in '" + p.id + "'"});
      } else {
        if (st.hasResult) checkLV(st.lhs);
        for (const auto& a : st.args) checkLV(a);
        if (st.virtualCall) {
          if (st.args.empty())
            diags.push_back({Severity::Error, DiagCode::BadAssertion,
                             "virtual call to '" + st.callee + "' in '" + p.id + "' has no receiver"});
          if (prog.allImplementations(st.callee).empty())
            diags.push_back({Severity::Error, DiagCode::UnresolvableMethod,
                             "virtual call to '" + st.callee + "' has no implementation"});
        } else if (!prog.findProc(st.callee)) {
          diags.push_back({Severity::Error, DiagCode::UnresolvableMethod,
                           "call to unknown procedure '" + st.callee + "'"});
        }
      }
    }
  }

  for (const auto& r : prog.roots)
    if (!prog.findProc(r))
      diags.push_back({Severity::Error, DiagCode::UnresolvableMethod, "root '" + r + "' is not a procedure"});

  for (const auto& a : prog.assertions) {
    const Procedure* p = prog.findProc(a.proc);
    if (!p) {
      diags.push_back({Severity::Error, DiagCode::BadAssertion,
                       "assertion references unknown procedure '" + a.proc + "'"});
      continue;
    }
    std::set<std::string> known(p->params.begin(), p->params.end());
    known.insert("ret");
    for (const auto& st : p->body) {
      if (st.kind == Statement::Kind::Assign && st.lhs.offsets.empty()) known.insert(st.lhs.base);
      if (st.kind == Statement::Kind::Call && st.hasResult && st.lhs.offsets.empty())
        known.insert(st.lhs.base);
    }
    for (const std::string& v : {a.lhsVar, a.rhsVar})
      if (!known.count(v) && !isGlobalName(v))
        diags.push_back({Severity::Error, DiagCode::BadAssertion,
                         "assertion variable '" + v + "' not in scope in '" + a.proc + "'"});
  }
}

std::string prettyPrint(const Program& prog) {
  std::ostringstream os;
  for (const auto& c : prog.classes) {
    os << "class " << c.name;
    for (size_t i = 0; i < c.supers.size(); ++i) os << (i ? ", " : " : ") << c.supers[i];
    os << " {\n";
    for (const auto& m : c.abstracts) os << "  abstract " << m << ";\n";
    for (const auto& [m, pid] : c.methods) os << "  method " << m << " = " << pid << ";\n";
    os << "}\n";
  }
  for (const auto& p : prog.procs) {
    os << "proc " << p.id << "(";
    for (size_t i = 0; i < p.params.size(); ++i) os << (i ? ", " : "") << p.params[i];
    os << ") {\n";
    for (const auto& st : p.body) os << "  " << printStatement(st) << "\n";
    os << "}\n";
  }
  for (const auto& r : prog.roots) os << "root " << r << ";\n";
  for (const auto& a : prog.assertions) {
    os << "assert " << (a.mustAlias ? "alias " : "noalias ") << a.proc << "." << a.lhsVar << ", "
       << a.proc << "." << a.rhsVar << " expect " << (a.expectPass ? "pass" : "fail") << ";\n";
  }
  return os.str();
}

} // namespace hipta
