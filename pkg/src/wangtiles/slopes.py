"""Slope arithmetic and bounded searches for 1-periodic structure.

Slopes are pairs of exact rationals, possibly infinite; no floating point
enters any comparison.  The searches here are semi-decision procedures at
desk scale: a witness is evidence, never proof, of an infinite 1-periodic
configuration.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence, Union

from .core import (
    Box,
    Patch,
    PeriodLattice,
    Tileset,
    TorusDomain,
    lattice_canonicalize,
    patch_valid,
)
from .solver import SolveRequest, SolveResult, brute_solve, periods_of_torus_config, solve

#: marker for an infinite slope component (nonzero numerator over zero)
INF = "inf"

Rational = Union[Fraction, str]


def _ratio(num: int, den: int) -> Rational:
    if den == 0:
        return INF
    return Fraction(num, den)


@dataclass(frozen=True)
class Slope:
    """Pair of exact extended rationals (theta1, theta2)."""

    theta1: Rational
    theta2: Rational

    def __str__(self) -> str:
        def show(v: Rational) -> str:
            return "inf" if v == INF else str(v)

        return f"({show(self.theta1)}, {show(self.theta2)})"


def slope_of_vector(v: Sequence[int], convention: str = "definition") -> Slope:
    """Slope of a periodicity vector v = (p, q, r).

    The default "definition" convention is (theta1, theta2) = (p/r, p/q);
    the "proof" convention (p/r, q/r) is the variant used in the source
    material's final argument and is available behind this explicit flag.
    Zero denominators with nonzero numerators give the infinite slope.
    """
    if len(v) != 3:
        raise ValueError("slope_of_vector expects a 3-vector")
    p, q, r = (int(x) for x in v)
    if p == 0 and q == 0 and r == 0:
        raise ValueError("the zero vector has no slope")
    if convention == "definition":
        return Slope(_ratio(p, r), _ratio(p, q))
    if convention == "proof":
        return Slope(_ratio(p, r), _ratio(q, r))
    raise ValueError(f"unknown slope convention {convention!r}")


def find_periodic_window(
    ts: Tileset,
    v: Sequence[int],
    window: Box,
    pins: tuple = (),
    allowed: tuple = (),
    budget_ms: Optional[float] = None,
) -> Optional[Patch]:
    """Search for a valid fully assigned window with cell(x) = cell(x+v).

    The translation constraint is imposed wherever both x and x+v lie in
    the window.  A witness is necessary evidence of a 1-periodic
    configuration, never proof.  Returns None when no witness exists.
    """
    dim = ts.dimension
    vv = tuple(int(x) for x in v)
    if len(vv) != dim:
        raise ValueError("vector dimension mismatch")
    if all(x == 0 for x in vv):
        raise ValueError("translation vector must be nonzero")
    pairs = []
    for p in window.points():
        q = tuple(p[i] + vv[i] for i in range(dim))
        if q in window:
            pairs.append((p, q))
    if not pairs:
        raise ValueError("window too small to contain any (x, x+v) pair")
    req = SolveRequest(ts, window, pins=pins, allowed=allowed,
                       identify=tuple(pairs), budget_ms=budget_ms)
    res = solve(req)
    if res.status != "sat":
        return None
    witness = res.witness
    # independent revalidation: adjacency and the translation constraint
    assert patch_valid(witness) == []
    for p, q in pairs:
        assert witness.cells[p] == witness.cells[q]
    return witness


def canonical_lattices(dim: int, max_index: int) -> Iterator[PeriodLattice]:
    """All canonical (lower-triangular Hermite) lattices of index <= N,
    in deterministic order."""
    if dim == 2:
        for n in range(1, max_index + 1):
            for d0 in range(1, n + 1):
                if n % d0:
                    continue
                d1 = n // d0
                for b in range(d0):
                    yield lattice_canonicalize([(d0, b), (0, d1)])
    elif dim == 3:
        for n in range(1, max_index + 1):
            for d0 in [d for d in range(1, n + 1) if n % d == 0]:
                m = n // d0
                for d1 in [d for d in range(1, m + 1) if m % d == 0]:
                    d2 = m // d1
                    for b10 in range(d0):
                        for b20 in range(d0):
                            for b21 in range(d1):
                                yield lattice_canonicalize(
                                    [(d0, b10, b20), (0, d1, b21), (0, 0, d2)]
                                )
    else:
        raise ValueError("dimension must be 2 or 3")


@dataclass(frozen=True)
class LatticeReport:
    lattice: PeriodLattice
    status: str
    periods: Optional[PeriodLattice]

    def line(self) -> str:
        out = f"lattice {self.lattice} status={self.status}"
        if self.periods is not None:
            out += f" periods={self.periods}"
        return out


@dataclass(frozen=True)
class SlopeClassification:
    reports: tuple[LatticeReport, ...]

    def satisfiable(self) -> list[LatticeReport]:
        return [r for r in self.reports if r.status == "sat"]

    def text(self) -> str:
        return "\n".join(r.line() for r in self.reports) + "\n"


def classify_torus_slopes(
    ts: Tileset,
    max_index: int,
    budget_ms: Optional[float] = None,
    workers: int = 1,
) -> SlopeClassification:
    """Sweep all torus quotients of index <= N and report period lattices.

    Deterministic: identical inputs give byte-identical reports.  Each
    satisfiable lattice's witness is analyzed with periods_of_torus_config.
    """
    if max_index < 1:
        raise ValueError("max_index must be >= 1")
    lattices = list(canonical_lattices(ts.dimension, max_index))
    if workers > 1:
        import multiprocessing as mp

        with mp.Pool(workers) as pool:
            rows = pool.map(_solve_one_lattice,
                            [(ts, lat, budget_ms) for lat in lattices])
    else:
        rows = [_solve_one_lattice((ts, lat, budget_ms)) for lat in lattices]
    return SlopeClassification(tuple(rows))


def _solve_one_lattice(args) -> LatticeReport:
    ts, lat, budget_ms = args
    res = solve(SolveRequest(ts, TorusDomain(lat), budget_ms=budget_ms))
    periods = None
    if res.status == "sat":
        periods = periods_of_torus_config(res.witness)
    return LatticeReport(lat, res.status, periods)
