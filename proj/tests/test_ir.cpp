#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hipta/generator.hpp"
#include "hipta/parser.hpp"

#include "fixtures.hpp"

using namespace hipta;
using hipta::testing::kFacadeProgram;
using hipta::testing::parseFixture;

TEST_CASE("facade program parses to nine procedures") {
  Program p = parseFixture(kFacadeProgram);
  CHECK(p.procs.size() == 9);
  CHECK(p.findProc("polyY") != nullptr);
  CHECK(p.findProc("polyZ") != nullptr);
  CHECK(p.findProc("service") != nullptr);
  CHECK(p.roots.size() == 1);
  CHECK(p.assertions.size() == 2);
}

TEST_CASE("empty procedure parses") {
  ParseResult r = parseProgram("proc main() {}");
  REQUIRE(r.ok());
  CHECK(r.program->procs.size() == 1);
  CHECK(r.program->procs[0].body.empty());
}

TEST_CASE("unknown callee is an unresolvable-method error") {
  ParseResult r = parseProgram("proc main() { x = scall frob(x); }");
  CHECK(!r.ok());
  bool found = false;
  for (const auto& d : r.diags) found |= d.code == DiagCode::UnresolvableMethod;
  CHECK(found);
}

TEST_CASE("duplicate site labels are rejected") {
  ParseResult r = parseProgram(
      "class A {}\n"
      "proc main() { x = new A@1; y = new A@1; }");
  CHECK(!r.ok());
  bool found = false;
  for (const auto& d : r.diags) found |= d.code == DiagCode::DuplicateSiteLabel;
  CHECK(found);
}

TEST_CASE("supers cycles are rejected") {
  ParseResult r = parseProgram("class A : B {}\nclass B : A {}\nproc main() {}");
  CHECK(!r.ok());
  bool found = false;
  for (const auto& d : r.diags) found |= d.code == DiagCode::SupersCycle;
  CHECK(found);
}

TEST_CASE("syntax errors carry a position") {
  ParseResult r = parseProgram("proc main( { }");
  REQUIRE(!r.ok());
  CHECK(r.diags[0].code == DiagCode::SyntaxError);
  CHECK(r.diags[0].line >= 1);
}

TEST_CASE("dispatch follows the receiver class") {
  Program p = parseFixture(kFacadeProgram);
  auto y = dispatchTargets(p, "poly", std::set<std::string>{"Y"});
  CHECK(y == std::set<std::string>{"polyY"});
  auto top = dispatchTargets(p, "poly", std::nullopt);
  CHECK(top == std::set<std::string>{"polyY", "polyZ"});
}

TEST_CASE("dispatch is monotone and top equals the union over classes") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    Program p = generateProgram(rng());
    std::set<std::string> all;
    for (const auto& c : p.classes) all.insert(c.name);
    // grow a receiver set one class at a time
    std::set<std::string> cur;
    std::set<std::string> prev;
    for (const auto& c : all) {
      cur.insert(c);
      auto targets = dispatchTargets(p, "work", cur);
      auto before = dispatchTargets(p, "work", prev);
      for (const auto& t : before) CHECK(targets.count(t));
      prev = cur;
    }
    std::set<std::string> unionAll;
    for (const auto& c : all) {
      auto t = dispatchTargets(p, "work", std::set<std::string>{c});
      unionAll.insert(t.begin(), t.end());
    }
    CHECK(dispatchTargets(p, "work", std::nullopt) == unionAll);
  }
}

TEST_CASE("overriding shadows the superclass binding") {
  ParseResult r = parseProgram(
      "class Base { method m = mBase; }\n"
      "class Derived : Base { method m = mDerived; }\n"
      "proc mBase(this) {}\n"
      "proc mDerived(this) {}\n"
      "proc main() {}\n");
  REQUIRE(r.ok());
  CHECK(dispatchTargets(*r.program, "m", std::set<std::string>{"Derived"}) ==
        std::set<std::string>{"mDerived"});
  CHECK(dispatchTargets(*r.program, "m", std::set<std::string>{"Base"}) ==
        std::set<std::string>{"mBase"});
}

TEST_CASE("pretty-print round trip") {
  Program p = parseFixture(kFacadeProgram);
  ParseResult again = parseProgram(prettyPrint(p));
  REQUIRE(again.ok());
  CHECK(p == *again.program);

  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    Program g = generateProgram(rng());
    ParseResult back = parseProgram(prettyPrint(g));
    REQUIRE(back.ok());
    CHECK(g == *back.program);
  }
}

TEST_CASE("variable-indexed call arguments are split into temps") {
  ParseResult r = parseProgram(
      "class A {}\n"
      "proc f(x) { return x; }\n"
      "proc main(m, k) { y = scall f(m[k]); }\n");
  REQUIRE(r.ok());
  const Procedure* mainP = r.program->findProc("main");
  bool sawTempAssign = false;
  for (const auto& st : mainP->body) {
    if (st.kind == Statement::Kind::Call)
      for (const auto& a : st.args) CHECK(!a.hasVarIndex());
    if (st.kind == Statement::Kind::Assign && st.rhs.kind == RValue::Kind::Path &&
        st.rhs.path.hasVarIndex())
      sawTempAssign = true;
  }
  CHECK(sawTempAssign);
}

TEST_CASE("return desugars to the ret slot") {
  ParseResult r = parseProgram("proc f(x) { return x; }");
  REQUIRE(r.ok());
  const Procedure* f = r.program->findProc("f");
  REQUIRE(f->body.size() == 1);
  CHECK(f->body[0].lhs.base == "ret");
}
