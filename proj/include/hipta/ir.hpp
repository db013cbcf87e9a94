#pragma once

// Program model: classes, procedures, flow-insensitive statement sets, and
// alias assertions, plus the textual format parser/printer declared in
// parser.hpp. A Program is immutable once built and validated; analyses only
// read it.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "hipta/diag.hpp"

namespace hipta {

struct ConstVal {
  enum class Kind { Int, Str } kind = Kind::Int;
  std::int64_t intval = 0;
  std::string strval;

  static ConstVal ofInt(std::int64_t v) { return {Kind::Int, v, {}}; }
  static ConstVal ofStr(std::string s) { return {Kind::Str, 0, std::move(s)}; }
  bool operator==(const ConstVal& o) const {
    return kind == o.kind && intval == o.intval && strval == o.strval;
  }
  auto operator<=>(const ConstVal& o) const {
    if (auto c = kind <=> o.kind; c != 0) return c;
    if (auto c = intval <=> o.intval; c != 0) return c;
    return strval <=> o.strval;
  }
  std::string toString() const;
};

// lv offset: .f | [c] | [v]
struct Offset {
  enum class Kind { Field, ConstIndex, VarIndex } kind = Kind::Field;
  std::string name;  // field or index variable
  ConstVal c;

  bool operator==(const Offset&) const = default;
};

struct LValue {
  std::string base;
  std::vector<Offset> offsets;

  bool hasVarIndex() const;
  bool operator==(const LValue&) const = default;
};

struct RValue {
  enum class Kind { Path, Const, New } kind = Kind::Path;
  LValue path;
  ConstVal c;
  std::string cls;    // New: class name
  std::string label;  // New: site label

  bool operator==(const RValue&) const = default;
};

struct Statement {
  enum class Kind { Assign, Call } kind = Kind::Assign;
  // Assign
  LValue lhs;
  RValue rhs;
  // Call
  bool hasResult = false;  // lhs is the result lv when true
  std::string callee;      // proc name (static) or method name (virtual)
  std::vector<LValue> args;
  bool virtualCall = false;
  int site = -1;    // stable callsite index, assigned by normalize()
  int stmtId = -1;  // stable program-wide statement index, assigned by normalize()

  bool operator==(const Statement& o) const {
    return kind == o.kind && lhs == o.lhs && rhs == o.rhs &&
           hasResult == o.hasResult && callee == o.callee && args == o.args &&
           virtualCall == o.virtualCall;
  }
};

struct Procedure {
  std::string id;
  std::vector<std::string> params;  // param 0 is the receiver for methods
  std::vector<Statement> body;      // set semantics; normalize() sorts it

  bool operator==(const Procedure&) const = default;
};

struct ClassDecl {
  std::string name;
  std::vector<std::string> supers;
  std::map<std::string, std::string> methods;  // method name -> proc id
  std::set<std::string> abstracts;

  bool operator==(const ClassDecl&) const = default;
};

struct AliasAssertion {
  std::string proc;
  bool mustAlias = true;  // alias | noalias
  std::string lhsVar;
  std::string rhsVar;
  bool expectPass = true;  // annotated ground truth

  bool operator==(const AliasAssertion&) const = default;
};

struct Program {
  std::vector<ClassDecl> classes;
  std::vector<Procedure> procs;
  std::vector<std::string> roots;
  std::vector<AliasAssertion> assertions;

  const Procedure* findProc(const std::string& id) const;
  const ClassDecl* findClass(const std::string& name) const;

  // All proc ids bound to `method` anywhere in the class table.
  std::set<std::string> allImplementations(const std::string& method) const;

  bool operator==(const Program& o) const {
    return classes == o.classes && procs == o.procs && roots == o.roots &&
           assertions == o.assertions;
  }
};

// Implementations of `method` for the given receiver classes, walking each
// receiver class up its supers chain (nearest binding per chain). With
// nullopt receivers the result is the union over all declared classes.
std::set<std::string> dispatchTargets(const Program& prog, const std::string& method,
                                      const std::optional<std::set<std::string>>& receiverClasses);

// Structural validation + canonicalization: statement dedup (set semantics),
// variable-indexed call arguments/results split into temp assignments, and
// stable callsite ids. Idempotent; appends diagnostics on invalid input.
void normalizeProgram(Program& prog, std::vector<Diagnostic>& diags);

// Grammar text for a normalized Program; parse(prettyPrint(p)) == p.
std::string prettyPrint(const Program& prog);

std::string printStatement(const Statement& st);
std::string printLValue(const LValue& lv);

bool isGlobalName(const std::string& name);

} // namespace hipta
