#include "hipta/cli_run.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "hipta/driver.hpp"
#include "hipta/oracle.hpp"
#include "hipta/parser.hpp"
#include "hipta/report.hpp"

namespace hipta {
namespace {

struct ModeSpec {
  enum class Kind { Driver, TopCI, Inline } kind = Kind::Driver;
  Config::Mode driverMode = Config::Mode::HIA;
  int k = 0;          // HIk / inline bound; -1 = unbounded inline
  std::string label;  // printable mode name
};

bool parseMode(const std::string& text, std::vector<ModeSpec>& out, std::string& err) {
  auto driver = [](Config::Mode m, int k, std::string label) {
    return ModeSpec{ModeSpec::Kind::Driver, m, k, std::move(label)};
  };
  if (text == "all") {
    out.push_back(driver(Config::Mode::ComCI, 0, "comci"));
    out.push_back(driver(Config::Mode::HIk, 3, "hi:3"));
    out.push_back(driver(Config::Mode::HIA, 0, "hia"));
    out.push_back(ModeSpec{ModeSpec::Kind::TopCI, Config::Mode::HIA, 0, "topci"});
    out.push_back(ModeSpec{ModeSpec::Kind::Inline, Config::Mode::HIA, -1, "inline:inf"});
    return true;
  }
  if (text == "comci") {
    out.push_back(driver(Config::Mode::ComCI, 0, "comci"));
  } else if (text == "hia") {
    out.push_back(driver(Config::Mode::HIA, 0, "hia"));
  } else if (text.rfind("hi:", 0) == 0) {
    int k = std::atoi(text.c_str() + 3);
    if (k < 0) {
      err = "bad k in mode '" + text + "'";
      return false;
    }
    out.push_back(driver(Config::Mode::HIk, k, text));
  } else if (text == "topci") {
    out.push_back(ModeSpec{ModeSpec::Kind::TopCI, Config::Mode::HIA, 0, "topci"});
  } else if (text.rfind("inline:", 0) == 0) {
    std::string arg = text.substr(7);
    int k = arg == "inf" ? -1 : std::atoi(arg.c_str());
    out.push_back(ModeSpec{ModeSpec::Kind::Inline, Config::Mode::HIA, k, text});
  } else {
    err = "unknown mode '" + text + "'";
    return false;
  }
  return true;
}

Config configFor(const CliOptions& opts, const ModeSpec& spec) {
  Config c;
  c.mode = spec.driverMode;
  c.k = spec.k;
  c.depthBound = opts.depthBound;
  c.unroll = opts.unroll;
  c.dispatchBound = opts.dispatchBound;
  c.pendingCap = opts.pendingCap;
  c.allProcs = opts.allProcs;
  c.jobs = opts.jobs;
  return c;
}

void appendFile(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  std::ofstream f(path, std::ios::app);
  f << text;
}

struct FileOutcome {
  int exitCode = kExitOk;
  std::string output;
};

FileOutcome runOneFile(const std::string& path, const CliOptions& opts,
                       const std::vector<ModeSpec>& modes) {
  FileOutcome outcome;
  std::ostringstream out;
  auto finish = [&](int code) {
    outcome.exitCode = std::max(outcome.exitCode, code);
    outcome.output = out.str();
    return outcome;
  };

  ParseResult parsed = parseProgramFile(path);
  for (const auto& d : parsed.diags) out << path << ": " << formatDiagnostic(d) << "\n";
  if (!parsed.ok()) return finish(kExitParse);
  const Program& prog = *parsed.program;

  SymbolTable syms;
  bool assertMismatch = false;
  bool oracleDivergence = false;
  bool internalError = false;

  // The unbounded-inlining oracle, computed once per file when requested.
  std::optional<std::map<std::string, AbstractState>> oracleStates;
  int oracleK = 0;
  if (!opts.checkOracle.empty()) {
    oracleK = opts.checkOracle == "inf" ? -1 : std::atoi(opts.checkOracle.c_str());
    Config oc = configFor(opts, ModeSpec{});
    std::vector<Diagnostic> odiags;
    oracleStates = inlineExact(prog, syms, oracleK, oc, &odiags);
    for (const auto& d : odiags) out << path << ": " << formatDiagnostic(d) << "\n";
    if (!oracleStates) internalError = true;
  }

  auto evalAssertions = [&](const std::string& modeLabel,
                            const std::map<std::string, AbstractState>& states,
                            auto instanceOf) {
    if (!opts.checkAssertions) return;
    for (const auto& a : prog.assertions) {
      auto it = states.find(a.proc);
      if (it == states.end()) {
        out << path << " [" << modeLabel << "] assert " << a.proc
            << ": procedure is not a root, assertion skipped\n";
        assertMismatch = true;
        continue;
      }
      AssertResult r = evalAssertion(it->second, a, instanceOf(a.proc));
      bool ok = assertionMatches(r, a.expectPass);
      out << path << " [" << modeLabel << "] assert " << (a.mustAlias ? "alias " : "noalias ")
          << a.proc << "." << a.lhsVar << "," << a.rhsVar << " -> " << assertResultName(r)
          << " (expect " << (a.expectPass ? "pass" : "fail") << ") "
          << (ok ? "OK" : "MISMATCH") << "\n";
      if (!ok) assertMismatch = true;
    }
  };

  for (const auto& spec : modes) {
    Config cfg = configFor(opts, spec);
    if (spec.kind == ModeSpec::Kind::Driver) {
      AnalysisRun run(prog, cfg, syms);
      run.run();
      for (const auto& d : run.log().diags)
        if (d.severity == Severity::Error) {
          out << path << ": " << formatDiagnostic(d) << "\n";
          internalError = true;
        }
      evalAssertions(spec.label, run.rootStates(),
                     [&](const std::string& p) { return run.rootInstance(p); });
      appendFile(opts.metricsPath, metricsLine(run.metrics(), spec.label, path) + "\n");
      if (!opts.metricsPath.empty() || opts.checkAssertions)
        out << metricsLine(run.metrics(), spec.label, path) << "\n";
      if (!opts.callgraphPath.empty()) appendFile(opts.callgraphPath, callGraphReport(run.log().edges));
      if (!opts.reportPath.empty()) {
        std::string rep;
        for (const auto& [root, st] : run.rootStates())
          rep += pointsToReport(st, syms, spec.label + ":" + root);
        appendFile(opts.reportPath, rep);
      }
      if (!opts.summariesPath.empty()) {
        std::string rep;
        for (const auto& [pid, s] : run.summaries()) rep += dumpSummary(s, syms);
        appendFile(opts.summariesPath, rep);
      }
      if (oracleStates) {
        bool requireEqual = cfg.mode == Config::Mode::HIA && oracleK < 0;
        for (const auto& [root, oracleState] : *oracleStates) {
          auto it = run.rootStates().find(root);
          if (it == run.rootStates().end()) continue;
          FactsComparison cmp = compareRootStates(it->second, oracleState,
                                                  run.rootInstance(root), requireEqual);
          if (!cmp.ok) {
            oracleDivergence = true;
            out << path << " [" << spec.label << "] oracle divergence at root '" << root
                << "'\n" << cmp.diff;
          }
        }
        if (!oracleDivergence)
          out << path << " [" << spec.label << "] oracle check: zero divergences\n";
      }
    } else if (spec.kind == ModeSpec::Kind::TopCI) {
      std::set<std::string> reached;
      AbstractState st = topDownCI(prog, syms, cfg, &reached);
      std::map<std::string, AbstractState> states;
      for (const auto& r : prog.roots) states.emplace(r, st);
      evalAssertions(spec.label, states,
                     [&](const std::string& p) { return syms.instance(p); });
      if (!opts.reportPath.empty()) appendFile(opts.reportPath, pointsToReport(st, syms, "topci"));
    } else {
      std::vector<Diagnostic> odiags;
      auto states = inlineExact(prog, syms, spec.k, cfg, &odiags);
      for (const auto& d : odiags) out << path << ": " << formatDiagnostic(d) << "\n";
      if (!states) {
        internalError = true;
        continue;
      }
      evalAssertions(spec.label, *states,
                     [&](const std::string& p) { return syms.instance(p); });
      if (!opts.reportPath.empty())
        for (const auto& [root, st] : *states)
          appendFile(opts.reportPath, pointsToReport(st, syms, spec.label + ":" + root));
    }
  }

  if (internalError) return finish(kExitInternal);
  if (assertMismatch) return finish(kExitAssert);
  if (oracleDivergence) return finish(kExitOracle);
  return finish(kExitOk);
}

std::vector<std::string> collectInputs(const CliOptions& opts, std::string& err) {
  std::vector<std::string> files;
  for (const auto& in : opts.inputs) {
    std::filesystem::path p(in);
    if (std::filesystem::is_directory(p)) {
      for (const auto& e : std::filesystem::recursive_directory_iterator(p))
        if (e.is_regular_file() && e.path().extension() == ".hir")
          files.push_back(e.path().string());
    } else if (std::filesystem::exists(p)) {
      files.push_back(in);
    } else {
      err = "input not found: " + in;
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

int runCli(const CliOptions& opts, std::ostream& out, std::ostream& err) {
  std::vector<ModeSpec> modes;
  std::string msg;
  if (!parseMode(opts.mode, modes, msg)) {
    err << msg << "\n";
    return kExitInternal;
  }
  std::vector<std::string> files = collectInputs(opts, msg);
  if (!msg.empty()) {
    err << msg << "\n";
    return kExitParse;
  }
  if (files.empty()) {
    err << "no input files\n";
    return kExitParse;
  }

  std::vector<FileOutcome> outcomes(files.size());
  int jobs = std::max(1, opts.jobs);
  if (jobs == 1 || files.size() == 1) {
    for (size_t i = 0; i < files.size(); ++i) outcomes[i] = runOneFile(files[i], opts, modes);
  } else {
    std::vector<std::thread> workers;
    std::atomic<size_t> next{0};
    for (int w = 0; w < jobs; ++w)
      workers.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < files.size(); i = next.fetch_add(1))
          outcomes[i] = runOneFile(files[i], opts, modes);
      });
    for (auto& t : workers) t.join();
  }

  int rc = kExitOk;
  for (const auto& o : outcomes) {
    out << o.output;
    rc = std::max(rc, o.exitCode);
  }
  return rc;
}

} // namespace hipta
