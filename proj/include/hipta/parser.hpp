#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hipta/diag.hpp"
#include "hipta/ir.hpp"

namespace hipta {

struct ParseResult {
  std::optional<Program> program;  // set when no error diagnostics
  std::vector<Diagnostic> diags;

  bool ok() const { return program.has_value(); }
};

// Parses and validates one program text. The returned Program is normalized
// (see normalizeProgram) and ready for analysis.
ParseResult parseProgram(const std::string& text);

ParseResult parseProgramFile(const std::string& path);

} // namespace hipta
