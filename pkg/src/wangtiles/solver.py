"""Tileability decision procedures for boxes and torus quotients.

Two independent routes are provided:

* :func:`solve` encodes a request as propositional satisfiability (one
  boolean per (cell, tile), exactly-one per cell, adjacency implications,
  wrap adjacencies from lattice reduction) and runs either a small built-in
  CDCL engine (find-one / unsat) or an ordered DFS over the same encoding
  (counting / enumeration in lexicographic cell order, ascending tile index).
* :func:`brute_solve` is the reference oracle: plain depth-first assignment
  in fixed cell order with forward checking only.

The satisfiability backend is pluggable behind the narrow
add-clause/solve/model interface of :class:`MiniCdcl`; the built-in engine
ships as the default so there are no mandatory external dependencies.
"""

from __future__ import annotations

import heapq
import os
import time
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .core import (
    Box,
    Domain,
    Patch,
    PeriodLattice,
    Point,
    Tileset,
    TorusDomain,
    domain_neighbor,
    lattice_from_vectors,
    patch_valid,
)


class BudgetExceeded(Exception):
    pass


# ---------------------------------------------------------------------------
# CDCL engine
# ---------------------------------------------------------------------------


def _luby(x: int) -> int:
    """Luby restart sequence 1,1,2,1,1,2,4,... (0-indexed)."""
    size, seq = 1, 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) // 2
        seq -= 1
        x %= size
    return 1 << seq


class MiniCdcl:
    """Minimal CDCL solver: two watched literals, 1UIP learning, Luby restarts.

    Literals are nonzero ints (+v / -v), variables are 1-based.  Clauses may
    only be added at decision level zero (before solving).
    """

    def __init__(self, budget_ms: Optional[float] = None,
                 budget_conflicts: Optional[int] = None) -> None:
        self.nvars = 0
        self.clauses: list[list[int]] = []
        self.watches: dict[int, list[int]] = {}
        self.assign: list[int] = [0]  # 0 unset, +1 true, -1 false
        self.level: list[int] = [0]
        self.reason: list[int] = [-1]
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.activity: list[float] = [0.0]
        self.var_inc = 1.0
        self.saved_phase: list[int] = [0]
        self.heap: list[tuple[float, int]] = []
        self.ok = True
        self.budget_ms = budget_ms
        self.budget_conflicts = budget_conflicts
        self.decisions = 0
        self.propagations = 0
        self.conflicts = 0
        self._start = 0.0

    # -- variables and clauses

    def new_var(self) -> int:
        self.nvars += 1
        self.assign.append(0)
        self.level.append(0)
        self.reason.append(-1)
        self.activity.append(0.0)
        self.saved_phase.append(-1)
        heapq.heappush(self.heap, (0.0, self.nvars))
        return self.nvars

    def ensure_vars(self, n: int) -> None:
        while self.nvars < n:
            self.new_var()

    def value(self, lit: int) -> int:
        v = self.assign[abs(lit)]
        return v if lit > 0 else -v

    def add_clause(self, lits: Sequence[int]) -> None:
        if not self.ok:
            return
        seen = set()
        out = []
        for lit in lits:
            if -lit in seen:
                return  # tautology
            if lit in seen:
                continue
            seen.add(lit)
            self.ensure_vars(abs(lit))
            val = self.value(lit)
            if val == 1 and self.level[abs(lit)] == 0:
                return  # satisfied at top level
            if val == -1 and self.level[abs(lit)] == 0:
                continue  # drop false-at-top literal
            out.append(lit)
        if not out:
            self.ok = False
            return
        if len(out) == 1:
            if not self._enqueue(out[0], -1):
                self.ok = False
            return
        idx = len(self.clauses)
        self.clauses.append(out)
        self.watches.setdefault(out[0], []).append(idx)
        self.watches.setdefault(out[1], []).append(idx)

    # -- trail

    def _enqueue(self, lit: int, reason: int) -> bool:
        v = abs(lit)
        val = self.value(lit)
        if val == 1:
            return True
        if val == -1:
            return False
        self.assign[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.saved_phase[v] = self.assign[v]
        self.trail.append(lit)
        return True

    def _propagate(self) -> int:
        """Unit propagation; returns conflicting clause index or -1."""
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            false_lit = -lit
            watchlist = self.watches.get(false_lit)
            if not watchlist:
                continue
            i = 0
            while i < len(watchlist):
                ci = watchlist[i]
                clause = self.clauses[ci]
                if clause[0] == false_lit:
                    clause[0], clause[1] = clause[1], clause[0]
                # clause[1] == false_lit now
                first = clause[0]
                if self.value(first) == 1:
                    i += 1
                    continue
                moved = False
                for k in range(2, len(clause)):
                    if self.value(clause[k]) != -1:
                        clause[1], clause[k] = clause[k], clause[1]
                        self.watches.setdefault(clause[1], []).append(ci)
                        watchlist[i] = watchlist[-1]
                        watchlist.pop()
                        moved = True
                        break
                if moved:
                    continue
                # unit or conflict
                if self.value(first) == -1:
                    return ci
                self._enqueue(first, ci)
                i += 1
        return -1

    def _decision_level(self) -> int:
        return len(self.trail_lim)

    def _cancel_until(self, lvl: int) -> None:
        if self._decision_level() <= lvl:
            return
        limit = self.trail_lim[lvl]
        for lit in reversed(self.trail[limit:]):
            v = abs(lit)
            self.assign[v] = 0
            self.reason[v] = -1
            heapq.heappush(self.heap, (-self.activity[v], v))
        del self.trail[limit:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    # -- conflict analysis

    def _bump(self, v: int) -> None:
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for u in range(1, self.nvars + 1):
                self.activity[u] *= 1e-100
            self.var_inc *= 1e-100
        heapq.heappush(self.heap, (-self.activity[v], v))

    def _analyze(self, conflict: int) -> tuple[list[int], int]:
        learned: list[int] = [0]
        seen = [False] * (self.nvars + 1)
        counter = 0
        lit = 0
        idx = len(self.trail) - 1
        ci = conflict
        cur_level = self._decision_level()
        while True:
            clause = self.clauses[ci]
            start = 1 if lit else 0
            for q in clause[start:]:
                v = abs(q)
                if not seen[v] and self.level[v] > 0:
                    seen[v] = True
                    self._bump(v)
                    if self.level[v] >= cur_level:
                        counter += 1
                    else:
                        learned.append(q)
            while not seen[abs(self.trail[idx])]:
                idx -= 1
            lit = self.trail[idx]
            v = abs(lit)
            seen[v] = False
            idx -= 1
            counter -= 1
            if counter == 0:
                learned[0] = -lit
                break
            ci = self.reason[v]
        if len(learned) == 1:
            return learned, 0
        back = max(self.level[abs(q)] for q in learned[1:])
        # move a literal of the backjump level into watch position 1
        for k in range(1, len(learned)):
            if self.level[abs(learned[k])] == back:
                learned[1], learned[k] = learned[k], learned[1]
                break
        return learned, back

    def _pick_var(self) -> int:
        while self.heap:
            _, v = heapq.heappop(self.heap)
            if self.assign[v] == 0:
                return v
        for v in range(1, self.nvars + 1):
            if self.assign[v] == 0:
                return v
        return 0

    def _check_budget(self) -> None:
        if self.budget_conflicts is not None and self.conflicts > self.budget_conflicts:
            raise BudgetExceeded()
        if self.budget_ms is not None:
            if (time.monotonic() - self._start) * 1000.0 > self.budget_ms:
                raise BudgetExceeded()

    def solve(self) -> bool:
        """True if satisfiable; raises BudgetExceeded past the budget."""
        self._start = time.monotonic()
        if not self.ok:
            return False
        restart_count = 0
        conflicts_since_restart = 0
        limit = 64 * _luby(restart_count)
        while True:
            conflict = self._propagate()
            if conflict >= 0:
                self.conflicts += 1
                conflicts_since_restart += 1
                if self.conflicts % 128 == 0:
                    self._check_budget()
                if self._decision_level() == 0:
                    self.ok = False
                    return False
                learned, back = self._analyze(conflict)
                self._cancel_until(back)
                if len(learned) == 1:
                    if not self._enqueue(learned[0], -1):
                        self.ok = False
                        return False
                else:
                    idx = len(self.clauses)
                    self.clauses.append(learned)
                    self.watches.setdefault(learned[0], []).append(idx)
                    self.watches.setdefault(learned[1], []).append(idx)
                    self._enqueue(learned[0], idx)
                self.var_inc *= 1.052
            else:
                if conflicts_since_restart >= limit:
                    conflicts_since_restart = 0
                    restart_count += 1
                    limit = 64 * _luby(restart_count)
                    self._cancel_until(0)
                    continue
                v = self._pick_var()
                if v == 0:
                    return True
                self.decisions += 1
                self.trail_lim.append(len(self.trail))
                phase = self.saved_phase[v]
                self._enqueue(v if phase == 1 else -v, -1)

    def model(self) -> list[bool]:
        """Truth values of variables 1..nvars after a satisfiable solve."""
        return [self.assign[v] == 1 for v in range(1, self.nvars + 1)]


# ---------------------------------------------------------------------------
# Ordered DFS over a CNF (deterministic enumeration)
# ---------------------------------------------------------------------------


class _DfsCnf:
    """Chronological DFS with unit propagation over a CNF.

    Branches on variables in a fixed order, trying True before False, which
    enumerates models in lexicographic order of the assignment vector.
    """

    def __init__(self, nvars: int, clauses: list[list[int]], order: list[int]):
        self.nvars = nvars
        self.clauses = [list(c) for c in clauses]
        self.order = order
        self.pos_occ: list[list[int]] = [[] for _ in range(nvars + 1)]
        self.neg_occ: list[list[int]] = [[] for _ in range(nvars + 1)]
        for ci, c in enumerate(self.clauses):
            for lit in c:
                (self.pos_occ if lit > 0 else self.neg_occ)[abs(lit)].append(ci)
        self.assign = [0] * (nvars + 1)
        self.propagations = 0
        self.decisions = 0

    def _value(self, lit: int) -> int:
        v = self.assign[abs(lit)]
        return v if lit > 0 else -v

    def _propagate(self, trail: list[int]) -> bool:
        qhead = 0
        while qhead < len(trail):
            lit = trail[qhead]
            qhead += 1
            self.propagations += 1
            occ = self.neg_occ[abs(lit)] if lit > 0 else self.pos_occ[abs(lit)]
            for ci in occ:
                clause = self.clauses[ci]
                unassigned = 0
                last = 0
                sat = False
                for q in clause:
                    val = self._value(q)
                    if val == 1:
                        sat = True
                        break
                    if val == 0:
                        unassigned += 1
                        last = q
                        if unassigned > 1:
                            break
                if sat or unassigned > 1:
                    continue
                if unassigned == 0:
                    return False
                self.assign[abs(last)] = 1 if last > 0 else -1
                trail.append(last)
        return True

    def models(self, budget: Optional["_Budget"] = None) -> Iterator[list[int]]:
        """Yield models as assignment vectors (index 1..nvars of +/-1)."""
        # initial unit propagation
        trail: list[int] = []
        for c in self.clauses:
            if len(c) == 1 and self._value(c[0]) == 0:
                self.assign[abs(c[0])] = 1 if c[0] > 0 else -1
                trail.append(c[0])
            elif len(c) == 1 and self._value(c[0]) == -1:
                return
        if not self._propagate(trail):
            return
        yield from self._search(0, budget)

    def _next_var(self, start: int) -> int:
        for k in range(start, len(self.order)):
            if self.assign[self.order[k]] == 0:
                return k
        return -1

    def _search(self, start: int, budget) -> Iterator[list[int]]:
        k = self._next_var(start)
        if k == -1:
            yield list(self.assign)
            return
        v = self.order[k]
        for phase in (1, -1):
            if budget is not None:
                budget.tick()
            self.decisions += 1
            trail = [v if phase == 1 else -v]
            self.assign[v] = phase
            if self._propagate(trail):
                yield from self._search(k + 1, budget)
            for lit in trail:
                self.assign[abs(lit)] = 0


class _Budget:
    def __init__(self, ms: Optional[float]):
        self.deadline = None if ms is None else time.monotonic() + ms / 1000.0
        self.count = 0

    def tick(self) -> None:
        self.count += 1
        if self.deadline is not None and self.count % 512 == 0:
            if time.monotonic() > self.deadline:
                raise BudgetExceeded()


# ---------------------------------------------------------------------------
# Requests and encoding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SolveRequest:
    """A tileability question on a box or torus domain.

    ``pins`` force full tiles at points; ``allowed`` optionally restricts the
    admissible tile set per point (a generalization of pins used by the layer
    test drivers); ``boundary`` maps (point, axis, positive) to a required
    face color.  ``identify`` lists point pairs whose cells must carry equal
    tiles (used for periodicity-window searches).  ``mode`` is one of
    ``find-one``, ``count``, ``enumerate`` (the latter two honour ``limit``).
    """

    tileset: Tileset
    domain: Domain
    pins: tuple[tuple[Point, int], ...] = ()
    allowed: tuple[tuple[Point, tuple[int, ...]], ...] = ()
    boundary: tuple[tuple[Point, int, bool, int], ...] = ()
    identify: tuple[tuple[Point, Point], ...] = ()
    mode: str = "find-one"
    limit: int = 1
    budget_ms: Optional[float] = None

    def effective_budget_ms(self) -> Optional[float]:
        if self.budget_ms is not None:
            return self.budget_ms
        env = os.environ.get("WTS_SOLVE_BUDGET_MS")
        return float(env) if env else None


@dataclass
class SolveResult:
    status: str  # sat | unsat | limit
    witness: Optional[Patch] = None
    count: Optional[int] = None
    solutions: Optional[list[Patch]] = None
    stats: dict = field(default_factory=dict)


class _Groups:
    """Union-find over domain points for identification constraints."""

    def __init__(self, points: list[Point]):
        self.parent = {p: p for p in points}

    def find(self, p: Point) -> Point:
        root = p
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[p] != root:
            self.parent[p], p = root, self.parent[p]
        return root

    def union(self, a: Point, b: Point) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _domain_points(domain: Domain) -> list[Point]:
    return sorted(domain.points())


def _validate_request(req: SolveRequest) -> None:
    ts = req.tileset
    for p, t in req.pins:
        if tuple(p) not in req.domain:
            raise ValueError(f"pin at {p} outside domain")
        if not (0 <= t < len(ts.tiles)):
            raise ValueError(f"pin tile {t} out of range")
    for p, cands in req.allowed:
        if tuple(p) not in req.domain:
            raise ValueError(f"allowed-set at {p} outside domain")
        for t in cands:
            if not (0 <= t < len(ts.tiles)):
                raise ValueError(f"allowed tile {t} out of range")
    for p, axis, _pos, color in req.boundary:
        if tuple(p) not in req.domain:
            raise ValueError(f"boundary pin at {p} outside domain")
        if not (0 <= axis < ts.dimension):
            raise ValueError("boundary axis out of range")
        if not (0 <= color < len(ts.colors)):
            raise ValueError("boundary color out of range")


def _candidates_by_point(req: SolveRequest, groups: _Groups,
                         points: list[Point]) -> dict[Point, list[int]]:
    """Initial per-group candidate tile lists from pins/allowed/boundary."""
    ts = req.tileset
    ntiles = len(ts.tiles)
    cand: dict[Point, set[int]] = {groups.find(p): set(range(ntiles))
                                   for p in points}
    for p, t in req.pins:
        cand[groups.find(tuple(p))] &= {t}
    for p, cs in req.allowed:
        cand[groups.find(tuple(p))] &= set(cs)
    for p, axis, pos, color in req.boundary:
        ok = {t for t in range(ntiles) if ts.face(t, axis, pos) == color}
        cand[groups.find(tuple(p))] &= ok
    return {p: sorted(s) for p, s in cand.items()}


def _adjacent_group_pairs(req: SolveRequest, groups: _Groups,
                          points: list[Point]):
    """Ordered adjacency constraints between group representatives.

    Yields (rep_a, rep_b, axis) meaning: the tile of rep_b sits on the +axis
    side of the tile of rep_a.  Self pairs (rep_a == rep_b) encode wrap
    self-adjacency.
    """
    seen = set()
    for p in points:
        for axis in range(req.tileset.dimension):
            q = domain_neighbor(req.domain, p, axis, True)
            if q is None:
                continue
            key = (groups.find(p), groups.find(q), axis)
            if key not in seen:
                seen.add(key)
                yield key


def _encode(req: SolveRequest):
    """Build CNF: returns (nvars, clauses, var map, group info)."""
    ts = req.tileset
    points = _domain_points(req.domain)
    groups = _Groups(points)
    for a, b in req.identify:
        pa, pb = tuple(a), tuple(b)
        if pa not in req.domain or pb not in req.domain:
            raise ValueError("identify point outside domain")
        groups.union(pa, pb)
    cand = _candidates_by_point(req, groups, points)
    reps = sorted(cand)
    var_of: dict[tuple[Point, int], int] = {}
    nvars = 0
    for rep in reps:
        for t in cand[rep]:
            nvars += 1
            var_of[(rep, t)] = nvars
    clauses: list[list[int]] = []
    aux = nvars

    def exactly_one(lits: list[int]):
        nonlocal aux
        clauses.append(list(lits))
        if len(lits) <= 6:
            for i in range(len(lits)):
                for j in range(i + 1, len(lits)):
                    clauses.append([-lits[i], -lits[j]])
        else:
            # sequential at-most-one ladder
            prev = None
            for i, lit in enumerate(lits):
                if i + 1 < len(lits):
                    aux += 1
                    s = aux
                    clauses.append([-lit, s])
                    if prev is not None:
                        clauses.append([-prev, s])
                if prev is not None:
                    clauses.append([-prev, -lit])
                prev = s if i + 1 < len(lits) else prev

    for rep in reps:
        if not cand[rep]:
            return 0, [[]], var_of, (groups, cand, reps)
        exactly_one([var_of[(rep, t)] for t in cand[rep]])

    compat_cache: dict[tuple[int, int], list[int]] = {}

    def compat(axis: int, t: int) -> list[int]:
        got = compat_cache.get((axis, t))
        if got is None:
            face = ts.face(t, axis, True)
            got = [u for u in range(len(ts.tiles)) if ts.face(u, axis, False) == face]
            compat_cache[(axis, t)] = got
        return got

    for (ra, rb, axis) in _adjacent_group_pairs(req, groups, points):
        ca, cb = cand[ra], cand[rb]
        if ra == rb:
            for t in ca:
                if ts.face(t, axis, True) != ts.face(t, axis, False):
                    clauses.append([-var_of[(ra, t)]])
            continue
        cb_set = set(cb)
        for t in ca:
            ok = [var_of[(rb, u)] for u in compat(axis, t) if u in cb_set]
            clauses.append([-var_of[(ra, t)]] + ok)
        ca_set = set(ca)
        face_of = {u: ts.face(u, axis, False) for u in cb}
        for u in cb:
            ok = [var_of[(ra, t)] for t in ca
                  if ts.face(t, axis, True) == face_of[u]]
            clauses.append([-var_of[(rb, u)]] + ok)
    return max(nvars, aux), clauses, var_of, (groups, cand, reps)


def _decode(req: SolveRequest, var_of, groups: _Groups, truth) -> Patch:
    chosen: dict[Point, int] = {}
    for (rep, t), v in var_of.items():
        if truth[v - 1]:
            chosen[rep] = t
    cells = {p: chosen[groups.find(p)] for p in _domain_points(req.domain)}
    return Patch(req.tileset, req.domain, cells)


def solve(req: SolveRequest) -> SolveResult:
    """Decide/count/enumerate tilings per the request.

    The witness of a satisfiable result always passes patch_valid (asserted
    in test builds).  Unsatisfiable is reported only when the constraint
    system is unsatisfiable; budget exhaustion yields status "limit".
    """
    _validate_request(req)
    t0 = time.monotonic()
    nvars, clauses, var_of, (groups, cand, reps) = _encode(req)
    if any(len(c) == 0 for c in clauses):
        ms = (time.monotonic() - t0) * 1000
        return SolveResult("unsat", count=0 if req.mode != "find-one" else None,
                           stats={"ms": ms, "decisions": 0, "propagations": 0})
    budget_ms = req.effective_budget_ms()
    if req.mode == "find-one":
        eng = MiniCdcl(budget_ms=budget_ms)
        eng.ensure_vars(nvars)
        for c in clauses:
            eng.add_clause(c)
        try:
            sat = eng.solve()
        except BudgetExceeded:
            return SolveResult("limit", stats={"ms": (time.monotonic() - t0) * 1000})
        stats = {"decisions": eng.decisions, "propagations": eng.propagations,
                 "conflicts": eng.conflicts, "ms": (time.monotonic() - t0) * 1000}
        if not sat:
            return SolveResult("unsat", stats=stats)
        witness = _decode(req, var_of, groups, eng.model())
        assert patch_valid(witness) == [], "solver produced an invalid witness"
        return SolveResult("sat", witness=witness, stats=stats)
    if req.mode not in ("count", "enumerate"):
        raise ValueError(f"unknown mode {req.mode!r}")
    order = [var_of[(rep, t)] for rep in reps for t in cand[rep]]
    dfs = _DfsCnf(nvars, clauses, order)
    budget = _Budget(budget_ms)
    count = 0
    sols: list[Patch] = []
    try:
        for model in dfs.models(budget):
            count += 1
            if req.mode == "enumerate":
                truth = [model[v] == 1 for v in range(1, nvars + 1)]
                patch = _decode(req, var_of, groups, truth)
                assert patch_valid(patch) == []
                sols.append(patch)
            if count >= req.limit:
                break
    except BudgetExceeded:
        return SolveResult("limit", stats={"ms": (time.monotonic() - t0) * 1000})
    stats = {"decisions": dfs.decisions, "propagations": dfs.propagations,
             "ms": (time.monotonic() - t0) * 1000}
    status = "sat" if count else "unsat"
    if req.mode == "enumerate":
        return SolveResult(status, witness=sols[0] if sols else None,
                           count=count, solutions=sols, stats=stats)
    return SolveResult(status, count=count, stats=stats)


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------

BRUTE_CELL_CAP = 64


def brute_solve(req: SolveRequest, cell_cap: int = BRUTE_CELL_CAP) -> SolveResult:
    """Reference oracle: DFS in fixed cell order with forward checking only.

    Independent of the SAT route; agrees with :func:`solve` bit-for-bit on
    status and counts.  Domains above ``cell_cap`` cells are an error.
    """
    _validate_request(req)
    t0 = time.monotonic()
    points = _domain_points(req.domain)
    if len(points) > cell_cap:
        raise ValueError(f"domain has {len(points)} cells; brute cap is {cell_cap}")
    ts = req.tileset
    groups = _Groups(points)
    for a, b in req.identify:
        groups.union(tuple(a), tuple(b))
    cand = _candidates_by_point(req, groups, points)
    reps = sorted(cand)
    rep_index = {rep: i for i, rep in enumerate(reps)}
    # neighbor structure between groups
    constraints: list[list[tuple[int, int, bool]]] = [[] for _ in reps]
    self_rules: list[list[int]] = [[] for _ in reps]
    for (ra, rb, axis) in _adjacent_group_pairs(req, groups, points):
        ia, ib = rep_index[ra], rep_index[rb]
        if ia == ib:
            self_rules[ia].append(axis)
            continue
        constraints[ia].append((ib, axis, True))
        constraints[ib].append((ia, axis, False))
    domains = []
    for i, rep in enumerate(reps):
        ok = cand[rep]
        for axis in self_rules[i]:
            ok = [t for t in ok if ts.face(t, axis, True) == ts.face(t, axis, False)]
        domains.append(ok)
    assignment: list[Optional[int]] = [None] * len(reps)
    count = 0
    sols: list[Patch] = []
    limit = req.limit if req.mode in ("count", "enumerate") else 1
    nodes = 0

    def record() -> None:
        nonlocal count
        count += 1
        if req.mode == "enumerate" or (req.mode == "find-one" and not sols):
            cells = {p: assignment[rep_index[groups.find(p)]] for p in points}
            patch = Patch(ts, req.domain, cells)
            sols.append(patch)

    def compatible(i: int, t: int) -> bool:
        for (j, axis, forward) in constraints[i]:
            u = assignment[j]
            if u is None:
                continue
            if forward:
                if ts.face(t, axis, True) != ts.face(u, axis, False):
                    return False
            else:
                if ts.face(u, axis, True) != ts.face(t, axis, False):
                    return False
        return True

    def dfs(i: int) -> bool:
        nonlocal nodes
        if i == len(reps):
            record()
            return count >= limit
        nodes += 1
        for t in domains[i]:
            if compatible(i, t):
                assignment[i] = t
                if dfs(i + 1):
                    assignment[i] = None
                    return True
                assignment[i] = None
        return False

    dfs(0)
    ms = (time.monotonic() - t0) * 1000
    stats = {"nodes": nodes, "ms": ms}
    if count == 0:
        return SolveResult("unsat", count=0 if req.mode != "find-one" else None,
                           stats=stats)
    if req.mode == "find-one":
        assert patch_valid(sols[0]) == []
        return SolveResult("sat", witness=sols[0], stats=stats)
    if req.mode == "enumerate":
        return SolveResult("sat", witness=sols[0], count=count, solutions=sols,
                           stats=stats)
    return SolveResult("sat", count=count, stats=stats)


# ---------------------------------------------------------------------------
# Periods of a torus configuration
# ---------------------------------------------------------------------------


def periods_of_torus_config(patch: Patch) -> PeriodLattice:
    """Lattice of all translations fixing a fully assigned torus patch.

    Computed by brute force over coset representatives; the result always
    contains the domain lattice.
    """
    if not isinstance(patch.domain, TorusDomain):
        raise ValueError("periods_of_torus_config needs a torus patch")
    if not patch.fully_assigned:
        raise ValueError("patch must be fully assigned")
    lat = patch.domain.lattice
    dim = lat.dimension
    fixers: list[Point] = list(lat.basis)
    cells = patch.cells
    for v in lat.representatives():
        if all(x == 0 for x in v):
            continue
        if all(
            cells[lat.reduce(tuple(z[i] + v[i] for i in range(dim)))] == t
            for z, t in cells.items()
        ):
            fixers.append(v)
    return lattice_from_vectors(fixers, dim)
