#pragma once

// Batch front end behind the command-line tool: runs the selected analyses
// over one or more IR files, evaluates assertions, writes reports, and maps
// outcomes to exit codes.

#include <iosfwd>
#include <string>
#include <vector>

#include "hipta/summary.hpp"

namespace hipta {

// Exit codes. Assertion mismatches dominate oracle divergences only when both
// occur; any internal error wins.
constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitAssert = 3;
constexpr int kExitOracle = 4;
constexpr int kExitInternal = 5;

struct CliOptions {
  std::vector<std::string> inputs;  // files or directories of .hir files
  std::string mode = "hia";         // comci | hi:<k> | hia | topci | inline:<k|inf> | all
  bool checkAssertions = false;
  std::string checkOracle;  // "", "inf" or a step bound
  std::string metricsPath;
  std::string callgraphPath;
  std::string reportPath;
  std::string summariesPath;
  int depthBound = 6;
  int unroll = 2;
  int dispatchBound = 5;
  int pendingCap = 64;
  int jobs = 1;
  bool allProcs = false;
};

int runCli(const CliOptions& opts, std::ostream& out, std::ostream& err);

} // namespace hipta
