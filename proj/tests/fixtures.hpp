#pragma once

// Shared test programs. The facade example wires a virtual call three
// callsites away from the receiver allocation; the cleanup and container
// examples exercise field- and index-sensitive summarization.

#include <cstdlib>
#include <string>

#include "hipta/parser.hpp"

namespace hipta::testing {

// Interface X with two implementations; bar1/bar2 reach poly() through
// mid() and foo(); service() allocates and asserts. Ground-truth
// annotations: both assertions hold semantically.
inline const char* kFacadeProgram = R"(
class Obj { method init = objInit; }
class X { abstract poly; }
class Y : X { method poly = polyY; }
class Z : X { method poly = polyZ; }

proc objInit(this) {}
proc polyY(this, obj) { return obj; }
proc polyZ(this, obj) { o = new Obj@14; return o; }
proc id(this, x) { tv = x; return tv; }
proc foo(this, x, obj) { tx = scall id(this, x); r = vcall poly(tx, obj); return r; }
proc mid(this, x, obj) { r = scall foo(this, x, obj); return r; }
proc bar1(this, obj) { y = new Y@31; r = scall mid(this, y, obj); return r; }
proc bar2(this, obj) { z = new Z@34; r = scall mid(this, z, obj); return r; }
proc service(this) {
  first = new Obj@37;
  second = scall bar1(this, first);
  third = scall bar2(this, first);
}

root service;
assert alias service.first, service.second expect pass;
assert noalias service.first, service.third expect pass;
)";

// foo writes one parameter's field and reads another's; bar1 aliases the two
// receivers, bar2 keeps them distinct.
inline const char* kCleanupProgram = R"(
class Obj {}
proc foo(u, v, x) { v.f = x; return u.f; }
proc getNew() { o = new Obj@6; return o; }
proc bar1(x) { u = scall getNew(); v = u; r = scall foo(u, v, x); return r; }
proc bar2(x) { u = scall getNew(); v = scall getNew(); r = scall foo(u, v, x); return r; }
proc main(p) {
  a = scall bar1(p);
  b = scall bar2(p);
}
root main;
)";

// Map accesses behind helper procedures; the keys become known two callsites
// up.
inline const char* kContainerProgram = R"(
class Obj {}
proc getP(map, key) { return map[key]; }
proc setP(map, key, v) { map[key] = v; }
proc build(u) {
  v = new Obj@8;
  k1 = "cur";
  k2 = "old";
  t = scall getP(u, k1);
  scall setP(v, k2, t);
  return v;
}
proc main(p) { w = scall build(p); }
root main;
)";

inline Program parseFixture(const char* text) {
  ParseResult r = parseProgram(text);
  if (!r.ok()) {
    std::string msg = "fixture parse failed:";
    for (const auto& d : r.diags) msg += "\n  " + formatDiagnostic(d);
    throw std::runtime_error(msg);
  }
  return *r.program;
}

inline std::string corpusDir() {
  if (const char* env = std::getenv("HIPTA_CORPUS")) return env;
  return "corpus";
}

} // namespace hipta::testing
