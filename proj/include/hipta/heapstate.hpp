#pragma once

// Access paths, set constraints, abstract states, and the constraint solver.
//
// The solver propagates allocation sites, constants, and symbolic non-local
// paths (parameters, returns, globals) to a least fixpoint. Symbolic paths
// self-seed: a cell rooted at a parameter, return slot, global, or opaque
// marker contains itself, standing for whatever the calling context supplies.
// pointsTo() presents a solved cell with the queried path stripped unless the
// path is purely symbolic.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hipta/diag.hpp"
#include "hipta/ir.hpp"

namespace hipta {

using NameId = std::uint32_t;
using InstId = std::uint32_t;
using ConstId = std::uint32_t;
using AllocId = std::uint32_t;
using RootId = std::uint32_t;
using PathId = std::uint32_t;

constexpr std::uint32_t kNoId = 0xffffffffu;

enum class RootKind : std::uint8_t { Local, Param, Ret, Global, Alloc, Opaque };

struct Root {
  RootKind kind = RootKind::Local;
  NameId name = kNoId;    // Local: variable name; Opaque: marker name
  int paramIndex = -1;    // Param
  InstId inst = kNoId;    // Local/Param/Ret: owning procedure instance
  AllocId alloc = kNoId;  // Alloc

  auto operator<=>(const Root&) const = default;
};

struct HOffset {
  enum class Kind : std::uint8_t { Field, Index, Pi } kind = Kind::Field;
  std::uint32_t id = 0;  // NameId for Field, ConstId for Index

  auto operator<=>(const HOffset&) const = default;
};

struct PathKey {
  RootId root = kNoId;
  std::vector<HOffset> offsets;

  auto operator<=>(const PathKey&) const = default;
};

// Allocation-site instance: the IR label plus a context tag distinguishing
// per-callsite copies.
struct AllocSiteKey {
  NameId label = kNoId;
  NameId cls = kNoId;
  InstId contextTag = kNoId;  // kNoId in the defining procedure

  auto operator<=>(const AllocSiteKey&) const = default;
};

// Shared interning tables. One per analysis run; all states in the run share
// one table so ids stay comparable.
class SymbolTable {
 public:
  NameId name(const std::string& s);
  const std::string& nameText(NameId id) const { return names_[id]; }

  InstId instance(const std::string& s) { return name(s); }
  InstId extendInstance(InstId base, const std::string& suffix);

  ConstId constant(const ConstVal& c);
  const ConstVal& constVal(ConstId id) const { return consts_[id]; }

  AllocId allocSite(const AllocSiteKey& k);
  const AllocSiteKey& allocKey(AllocId id) const { return allocKeys_[id]; }

  RootId root(const Root& r);
  const Root& rootOf(RootId id) const { return roots_[id]; }

  PathId path(const PathKey& k);
  PathId path(RootId root) { return path(PathKey{root, {}}); }
  const PathKey& pathKey(PathId id) const { return pathKeys_[id]; }

  // Appends one offset, truncating at depthBound. Second member reports
  // truncation.
  std::pair<PathId, bool> extend(PathId base, HOffset off, int depthBound);

  std::string printRoot(RootId id) const;
  std::string printPath(PathId id) const;
  std::string printAlloc(AllocId id) const;
  std::string printOffset(const HOffset& off) const;

  std::uint32_t freshTag() { return tagCounter_++; }

 private:
  std::vector<std::string> names_;
  std::map<std::string, NameId> nameIds_;
  std::vector<ConstVal> consts_;
  std::map<ConstVal, ConstId> constIds_;
  std::vector<AllocSiteKey> allocKeys_;
  std::map<AllocSiteKey, AllocId> allocIds_;
  std::vector<Root> roots_;
  std::map<Root, RootId> rootIds_;
  std::vector<PathKey> pathKeys_;
  std::map<PathKey, PathId> pathIds_;
  std::uint32_t tagCounter_ = 0;
};

struct Target {
  enum class Kind : std::uint8_t { Alloc, Const, Free } kind = Kind::Alloc;
  std::uint32_t id = 0;  // AllocId | ConstId | PathId

  auto operator<=>(const Target&) const = default;
  static Target alloc(AllocId a) { return {Kind::Alloc, a}; }
  static Target constant(ConstId c) { return {Kind::Const, c}; }
  static Target free(PathId p) { return {Kind::Free, p}; }
};

struct PointsToSet {
  std::set<AllocId> allocs;
  std::set<ConstId> consts;
  std::set<PathId> frees;

  bool empty() const { return allocs.empty() && consts.empty() && frees.empty(); }
  bool onlyConsts() const { return allocs.empty() && frees.empty(); }
  bool contains(const Target& t) const;
  bool insert(const Target& t);
  bool merge(const PointsToSet& o);
  bool subsetOf(const PointsToSet& o) const;
  bool intersects(const PointsToSet& o) const;
  bool operator==(const PointsToSet&) const = default;
};

struct Constraint {
  PathId lhs = kNoId;
  Target rhs;

  auto operator<=>(const Constraint&) const = default;
};

struct SolveOptions {
  int depthBound = 6;
};

// A set of constraints plus a memoized solved points-to view. Mutation
// invalidates the view; solve() rebuilds it.
class AbstractState {
 public:
  explicit AbstractState(SymbolTable* syms) : syms_(syms) {}

  SymbolTable& syms() const { return *syms_; }

  // Self-loops are dropped on construction.
  bool add(PathId lhs, Target rhs);
  void addAll(const std::vector<Constraint>& cs);
  void merge(const AbstractState& other);

  const std::set<Constraint>& constraints() const { return constraints_; }
  bool solved() const { return solvedValid_; }

  void solve(const SolveOptions& opts);
  void solve() { solve(SolveOptions{}); }

  // Full solved content of the cell(s) reached by `path`, including symbolic
  // self-residues.
  PointsToSet pointsToRaw(PathId path) const;

  // pointsToRaw with the queried path stripped, unless it is the only entry.
  PointsToSet pointsTo(PathId path) const;

  // Union of pointsToRaw over several paths.
  PointsToSet pointsToAllRaw(const std::vector<PathId>& paths) const;

  // Materialized cells in id order.
  std::vector<PathId> cellList() const;

  int wideningCount() const { return widenings_; }

  // Rewrites every occurrence of `fromRoot` — as a path root and inside
  // targets — to `toRoot`. Invalidates the solved view.
  void substituteRoot(RootId fromRoot, RootId toRoot);

 private:
  struct Cell {
    PointsToSet pt;
    bool widened = false;
  };

  Cell& materialize(PathId cell);
  const Cell* lookup(PathId cell) const;
  void storageCells(PathId basePath, HOffset off, bool forWrite, std::set<PathId>& out);
  std::set<PathId> resolveCellsMut(PathId path, bool forWrite);
  std::set<PathId> resolveCellsConst(PathId path) const;
  PointsToSet valueOf(PathId path);
  PathId rewritePath(PathId p, RootId fromRoot, RootId toRoot);

  SymbolTable* syms_;
  std::set<Constraint> constraints_;
  std::map<PathId, Cell> cellMap_;
  std::map<PathId, std::set<HOffset>> children_;  // parent -> materialized Index/Pi extensions
  bool solvedValid_ = false;
  bool passChanged_ = false;
  int depthBound_ = 6;
  int widenings_ = 0;
};

// True for roots whose paths are observable outside a procedure.
bool isFreeRoot(const Root& r);

// Free paths of a solved state: materialized cells rooted at parameters,
// return slots, globals, or opaque markers, plus `extra` (paths referenced by
// pending critical statements).
std::set<PathId> freeVars(const AbstractState& state, const std::set<PathId>& extra);

// Projects a solved state onto its free-observable part: direct constraints
// from free paths (and `extra` seeds) to their targets, plus the cells of
// allocation sites reachable from them. Locals and unexposed allocation-site
// paths vanish.
std::vector<Constraint> cleanup(const AbstractState& state, const std::set<PathId>& extraSeeds);

} // namespace hipta
