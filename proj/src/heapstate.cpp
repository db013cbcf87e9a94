#include "hipta/heapstate.hpp"

#include <algorithm>
#include <sstream>

namespace hipta {

NameId SymbolTable::name(const std::string& s) {
  auto it = nameIds_.find(s);
  if (it != nameIds_.end()) return it->second;
  NameId id = static_cast<NameId>(names_.size());
  names_.push_back(s);
  nameIds_.emplace(s, id);
  return id;
}

InstId SymbolTable::extendInstance(InstId base, const std::string& suffix) {
  return name(nameText(base) + suffix);
}

ConstId SymbolTable::constant(const ConstVal& c) {
  auto it = constIds_.find(c);
  if (it != constIds_.end()) return it->second;
  ConstId id = static_cast<ConstId>(consts_.size());
  consts_.push_back(c);
  constIds_.emplace(c, id);
  return id;
}

AllocId SymbolTable::allocSite(const AllocSiteKey& k) {
  auto it = allocIds_.find(k);
  if (it != allocIds_.end()) return it->second;
  AllocId id = static_cast<AllocId>(allocKeys_.size());
  allocKeys_.push_back(k);
  allocIds_.emplace(k, id);
  return id;
}

RootId SymbolTable::root(const Root& r) {
  auto it = rootIds_.find(r);
  if (it != rootIds_.end()) return it->second;
  RootId id = static_cast<RootId>(roots_.size());
  roots_.push_back(r);
  rootIds_.emplace(r, id);
  return id;
}

PathId SymbolTable::path(const PathKey& k) {
  auto it = pathIds_.find(k);
  if (it != pathIds_.end()) return it->second;
  PathId id = static_cast<PathId>(pathKeys_.size());
  pathKeys_.push_back(k);
  pathIds_.emplace(k, id);
  return id;
}

std::pair<PathId, bool> SymbolTable::extend(PathId base, HOffset off, int depthBound) {
  const PathKey& k = pathKey(base);
  if (static_cast<int>(k.offsets.size()) >= depthBound) return {base, true};
  PathKey next = k;
  next.offsets.push_back(off);
  return {path(next), false};
}

std::string SymbolTable::printRoot(RootId id) const {
  const Root& r = rootOf(id);
  switch (r.kind) {
    case RootKind::Local: return nameText(r.name) + "@" + nameText(r.inst);
    case RootKind::Param: return "par" + std::to_string(r.paramIndex) + "@" + nameText(r.inst);
    case RootKind::Ret: return "ret@" + nameText(r.inst);
    case RootKind::Global: return "$G";
    case RootKind::Opaque: return "top@" + nameText(r.name);
    case RootKind::Alloc: return printAlloc(r.alloc);
  }
  return "?";
}

std::string SymbolTable::printOffset(const HOffset& off) const {
  switch (off.kind) {
    case HOffset::Kind::Field: return "." + nameText(off.id);
    case HOffset::Kind::Index: return "[" + constVal(off.id).toString() + "]";
    case HOffset::Kind::Pi: return "[*]";
  }
  return "?";
}

std::string SymbolTable::printPath(PathId id) const {
  const PathKey& k = pathKey(id);
  std::string out = printRoot(k.root);
  for (const auto& o : k.offsets) out += printOffset(o);
  return out;
}

std::string SymbolTable::printAlloc(AllocId id) const {
  const AllocSiteKey& k = allocKey(id);
  std::string out = "l" + nameText(k.label);
  if (k.contextTag != kNoId) out += "#" + nameText(k.contextTag);
  return out;
}

bool PointsToSet::contains(const Target& t) const {
  switch (t.kind) {
    case Target::Kind::Alloc: return allocs.count(t.id) != 0;
    case Target::Kind::Const: return consts.count(t.id) != 0;
    case Target::Kind::Free: return frees.count(t.id) != 0;
  }
  return false;
}

bool PointsToSet::insert(const Target& t) {
  switch (t.kind) {
    case Target::Kind::Alloc: return allocs.insert(t.id).second;
    case Target::Kind::Const: return consts.insert(t.id).second;
    case Target::Kind::Free: return frees.insert(t.id).second;
  }
  return false;
}

bool PointsToSet::merge(const PointsToSet& o) {
  bool changed = false;
  for (auto a : o.allocs) changed |= allocs.insert(a).second;
  for (auto c : o.consts) changed |= consts.insert(c).second;
  for (auto f : o.frees) changed |= frees.insert(f).second;
  return changed;
}

bool PointsToSet::subsetOf(const PointsToSet& o) const {
  return std::includes(o.allocs.begin(), o.allocs.end(), allocs.begin(), allocs.end()) &&
         std::includes(o.consts.begin(), o.consts.end(), consts.begin(), consts.end()) &&
         std::includes(o.frees.begin(), o.frees.end(), frees.begin(), frees.end());
}

bool PointsToSet::intersects(const PointsToSet& o) const {
  auto anyCommon = [](const auto& a, const auto& b) {
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
      if (*i == *j) return true;
      if (*i < *j)
        ++i;
      else
        ++j;
    }
    return false;
  };
  return anyCommon(allocs, o.allocs) || anyCommon(consts, o.consts) || anyCommon(frees, o.frees);
}

bool isFreeRoot(const Root& r) {
  return r.kind == RootKind::Param || r.kind == RootKind::Ret || r.kind == RootKind::Global ||
         r.kind == RootKind::Opaque;
}

bool AbstractState::add(PathId lhs, Target rhs) {
  if (rhs.kind == Target::Kind::Free && rhs.id == lhs) return false;
  bool added = constraints_.insert(Constraint{lhs, rhs}).second;
  if (added) solvedValid_ = false;
  return added;
}

void AbstractState::addAll(const std::vector<Constraint>& cs) {
  for (const auto& c : cs) add(c.lhs, c.rhs);
}

void AbstractState::merge(const AbstractState& other) {
  for (const auto& c : other.constraints_) add(c.lhs, c.rhs);
}

AbstractState::Cell& AbstractState::materialize(PathId cell) {
  auto it = cellMap_.find(cell);
  if (it != cellMap_.end()) return it->second;
  passChanged_ = true;
  Cell& slot = cellMap_[cell];
  const PathKey& k = syms_->pathKey(cell);
  if (isFreeRoot(syms_->rootOf(k.root))) slot.pt.frees.insert(cell);
  if (!k.offsets.empty()) {
    const HOffset& last = k.offsets.back();
    if (last.kind != HOffset::Kind::Field) {
      PathKey parent = k;
      parent.offsets.pop_back();
      children_[syms_->path(parent)].insert(last);
    }
  }
  return cellMap_[cell];
}

const AbstractState::Cell* AbstractState::lookup(PathId cell) const {
  auto it = cellMap_.find(cell);
  return it == cellMap_.end() ? nullptr : &it->second;
}

// Storage cells addressed by extending target `basePath` with `off`.
// A [*] offset stands for any index: reads and writes through it touch every
// materialized constant sibling; a constant-index read also sees the [*]
// cell, while a constant-index write stays on its own cell.
void AbstractState::storageCells(PathId basePath, HOffset off, bool forWrite,
                                 std::set<PathId>& out) {
  auto [primary, truncated] = syms_->extend(basePath, off, depthBound_);
  Cell& cell = materialize(primary);
  if (truncated && !cell.widened) {
    cell.widened = true;
    ++widenings_;
  }
  out.insert(primary);
  if (truncated) return;

  auto it = children_.find(basePath);
  if (it == children_.end()) return;
  if (off.kind == HOffset::Kind::Index) {
    HOffset pi{HOffset::Kind::Pi, 0};
    if (!forWrite && it->second.count(pi)) out.insert(syms_->extend(basePath, pi, depthBound_).first);
  } else if (off.kind == HOffset::Kind::Pi) {
    for (const auto& sib : it->second)
      out.insert(syms_->extend(basePath, sib, depthBound_).first);
  }
}

std::set<PathId> AbstractState::resolveCellsMut(PathId path, bool forWrite) {
  const PathKey key = syms_->pathKey(path);
  std::set<PathId> cur;
  cur.insert(syms_->path(key.root));
  materialize(*cur.begin());
  for (const auto& off : key.offsets) {
    std::set<PathId> next;
    for (PathId c : cur) {
      PointsToSet contents = cellMap_[c].pt;  // copy: materialization below may rehash
      for (AllocId a : contents.allocs) {
        PathId base = syms_->path(syms_->root(Root{RootKind::Alloc, kNoId, -1, kNoId, a}));
        storageCells(base, off, forWrite, next);
      }
      for (PathId f : contents.frees) storageCells(f, off, forWrite, next);
    }
    cur = std::move(next);
  }
  return cur;
}

PointsToSet AbstractState::valueOf(PathId path) {
  PointsToSet out;
  for (PathId c : resolveCellsMut(path, false)) out.merge(cellMap_[c].pt);
  return out;
}

void AbstractState::solve(const SolveOptions& opts) {
  depthBound_ = opts.depthBound;
  cellMap_.clear();
  children_.clear();
  widenings_ = 0;
  bool changed = true;
  while (changed) {
    passChanged_ = false;
    for (const auto& con : constraints_) {
      PointsToSet value;
      if (con.rhs.kind == Target::Kind::Free)
        value = valueOf(con.rhs.id);
      else
        value.insert(con.rhs);
      std::set<PathId> cells = resolveCellsMut(con.lhs, true);
      for (PathId c : cells)
        if (cellMap_[c].pt.merge(value)) passChanged_ = true;
    }
    changed = passChanged_;
  }
  solvedValid_ = true;
}

std::set<PathId> AbstractState::resolveCellsConst(PathId path) const {
  const PathKey key = syms_->pathKey(path);
  std::set<PathId> cur;
  cur.insert(syms_->path(key.root));
  for (const auto& off : key.offsets) {
    std::set<PathId> next;
    for (PathId c : cur) {
      PointsToSet contents;
      if (const Cell* cell = lookup(c))
        contents = cell->pt;
      else if (isFreeRoot(syms_->rootOf(syms_->pathKey(c).root)))
        contents.frees.insert(c);  // virtual self-seeded cell
      auto extendFrom = [&](PathId base) {
        auto [primary, truncated] = syms_->extend(base, off, depthBound_);
        next.insert(primary);
        if (truncated) return;
        auto it = children_.find(base);
        if (it == children_.end()) return;
        if (off.kind == HOffset::Kind::Index) {
          HOffset pi{HOffset::Kind::Pi, 0};
          if (it->second.count(pi)) next.insert(syms_->extend(base, pi, depthBound_).first);
        } else if (off.kind == HOffset::Kind::Pi) {
          for (const auto& sib : it->second) next.insert(syms_->extend(base, sib, depthBound_).first);
        }
      };
      for (AllocId a : contents.allocs)
        extendFrom(syms_->path(syms_->root(Root{RootKind::Alloc, kNoId, -1, kNoId, a})));
      for (PathId f : contents.frees) extendFrom(f);
    }
    cur = std::move(next);
  }
  return cur;
}

PointsToSet AbstractState::pointsToRaw(PathId path) const {
  PointsToSet out;
  for (PathId c : resolveCellsConst(path)) {
    if (const Cell* cell = lookup(c))
      out.merge(cell->pt);
    else if (isFreeRoot(syms_->rootOf(syms_->pathKey(c).root)))
      out.frees.insert(c);
  }
  return out;
}

PointsToSet AbstractState::pointsTo(PathId path) const {
  PointsToSet out = pointsToRaw(path);
  if (out.frees.count(path) &&
      (out.frees.size() > 1 || !out.allocs.empty() || !out.consts.empty()))
    out.frees.erase(path);
  return out;
}

PointsToSet AbstractState::pointsToAllRaw(const std::vector<PathId>& paths) const {
  PointsToSet out;
  for (PathId p : paths) out.merge(pointsToRaw(p));
  return out;
}

std::vector<PathId> AbstractState::cellList() const {
  std::vector<PathId> out;
  out.reserve(cellMap_.size());
  for (const auto& [p, c] : cellMap_) out.push_back(p);
  return out;
}

PathId AbstractState::rewritePath(PathId p, RootId fromRoot, RootId toRoot) {
  const PathKey& k = syms_->pathKey(p);
  if (k.root != fromRoot) return p;
  PathKey next = k;
  next.root = toRoot;
  return syms_->path(next);
}

void AbstractState::substituteRoot(RootId fromRoot, RootId toRoot) {
  std::set<Constraint> next;
  for (const auto& c : constraints_) {
    Constraint n = c;
    n.lhs = rewritePath(c.lhs, fromRoot, toRoot);
    if (n.rhs.kind == Target::Kind::Free) n.rhs.id = rewritePath(c.rhs.id, fromRoot, toRoot);
    if (!(n.rhs.kind == Target::Kind::Free && n.rhs.id == n.lhs)) next.insert(n);
  }
  constraints_ = std::move(next);
  solvedValid_ = false;
}

std::set<PathId> freeVars(const AbstractState& state, const std::set<PathId>& extra) {
  std::set<PathId> out = extra;
  for (PathId cell : state.cellList()) {
    const PathKey& k = state.syms().pathKey(cell);
    if (isFreeRoot(state.syms().rootOf(k.root))) out.insert(cell);
  }
  return out;
}

std::vector<Constraint> cleanup(const AbstractState& state, const std::set<PathId>& extraSeeds) {
  SymbolTable& syms = state.syms();
  std::set<Constraint> emitted;
  std::set<AllocId> exposed;
  std::vector<AllocId> worklist;

  auto emitFor = [&](PathId seed) {
    PointsToSet pt = state.pointsToRaw(seed);
    for (AllocId a : pt.allocs) {
      emitted.insert(Constraint{seed, Target::alloc(a)});
      if (exposed.insert(a).second) worklist.push_back(a);
    }
    for (ConstId c : pt.consts) emitted.insert(Constraint{seed, Target::constant(c)});
    for (PathId f : pt.frees)
      if (f != seed) emitted.insert(Constraint{seed, Target::free(f)});
  };

  for (PathId seed : freeVars(state, extraSeeds)) emitFor(seed);

  // Allocation sites reachable from the free surface keep their cells; the
  // rest are dropped together with all locals.
  std::vector<PathId> allCells = state.cellList();
  std::set<AllocId> processed;
  while (!worklist.empty()) {
    AllocId a = worklist.back();
    worklist.pop_back();
    if (!processed.insert(a).second) continue;
    for (PathId cell : allCells) {
      const PathKey& k = syms.pathKey(cell);
      const Root& r = syms.rootOf(k.root);
      if (r.kind != RootKind::Alloc || r.alloc != a || k.offsets.empty()) continue;
      PointsToSet pt = state.pointsToRaw(cell);
      for (AllocId a2 : pt.allocs) {
        emitted.insert(Constraint{cell, Target::alloc(a2)});
        if (exposed.insert(a2).second) worklist.push_back(a2);
      }
      for (ConstId c : pt.consts) emitted.insert(Constraint{cell, Target::constant(c)});
      for (PathId f : pt.frees)
        if (f != cell) emitted.insert(Constraint{cell, Target::free(f)});
    }
  }

  return std::vector<Constraint>(emitted.begin(), emitted.end());
}

} // namespace hipta
