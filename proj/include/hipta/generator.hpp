#pragma once

// Random-program generator for property tests: layered acyclic call
// structure, every statement form, deterministic per seed.

#include <cstdint>

#include "hipta/ir.hpp"

namespace hipta {

struct GenParams {
  int maxProcs = 12;
  int maxCallDepth = 5;
  int hierarchyWidth = 4;
  int maxStmtsPerProc = 10;
};

Program generateProgram(std::uint64_t seed, const GenParams& params = {});

} // namespace hipta
