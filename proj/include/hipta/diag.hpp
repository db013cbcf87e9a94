#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hipta {

enum class Severity { Note, Warning, Error };

enum class DiagCode {
  SyntaxError,
  DuplicateSiteLabel,
  DuplicateProc,
  DuplicateClass,
  DuplicateMethodBinding,
  UnresolvableMethod,
  SupersCycle,
  UnknownVariable,
  ReservedIdentifier,
  BadAssertion,
  PathWidened,
  PendingCapHit,
  DispatchTruncated,
  UnreachableCall,
  OracleFuelExhausted,
  InternalError,
};

struct Diagnostic {
  Severity severity = Severity::Error;
  DiagCode code = DiagCode::InternalError;
  std::string message;
  int line = 0;
  int col = 0;
};

const char* diagCodeName(DiagCode code);
std::string formatDiagnostic(const Diagnostic& d);

inline bool hasErrors(const std::vector<Diagnostic>& ds) {
  for (const auto& d : ds)
    if (d.severity == Severity::Error) return true;
  return false;
}

} // namespace hipta
