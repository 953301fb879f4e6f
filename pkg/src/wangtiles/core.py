"""Core data model for Wang tiles, Wang cubes, tilesets, patches and lattices.

Tiles abut only on equal face colors; there is no rotation or reflection.
Colors are interned per tileset as dense integer ids with optional display
names.  A 2D tile has faces (north, east, south, west); a 3D cube has faces
(x+, x-, y+, y-, z+, z-).  Internally every tile is a flat tuple of color ids
indexed by ``2*axis + (0 if positive side else 1)``.

Everything here is immutable after construction and safe to share across
threads; operations build new objects.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Union

Point = tuple[int, ...]
Tile = tuple[int, ...]

# Face layout helpers ------------------------------------------------------

#: 2D face names in storage order (+x, -x, +y, -y).
FACES_2D = ("e", "w", "n", "s")
#: 3D face names in storage order.
FACES_3D = ("xp", "xm", "yp", "ym", "zp", "zm")


def face_index(axis: int, positive: bool) -> int:
    """Index of the face on side ``axis`` (positive or negative) of a tile."""
    return 2 * axis + (0 if positive else 1)


def tile2d(n: int, e: int, s: int, w: int) -> Tile:
    """Build a 2D tile from named face colors."""
    return (e, w, n, s)


def cube3d(xp: int, xm: int, yp: int, ym: int, zp: int, zm: int) -> Tile:
    """Build a 3D tile (Wang cube) from named face colors."""
    return (xp, xm, yp, ym, zp, zm)


def tile_face(tile: Tile, axis: int, positive: bool) -> int:
    return tile[face_index(axis, positive)]


# Tilesets ------------------------------------------------------------------


@dataclass(frozen=True)
class Tileset:
    """A finite set of Wang tiles (dimension 2) or Wang cubes (dimension 3).

    ``colors`` maps color id -> display name (ids are dense).  ``tiles`` is an
    ordered tuple of face tuples; tile indices are positions in this tuple.
    An empty tile list is legal but must be asked for explicitly via
    :func:`Tileset.empty`.
    """

    dimension: int
    colors: tuple[str, ...]
    tiles: tuple[Tile, ...]
    tile_names: Optional[tuple[str, ...]] = None

    def __post_init__(self) -> None:
        if self.dimension not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {self.dimension}")
        width = 2 * self.dimension
        for t in self.tiles:
            if len(t) != width:
                raise ValueError(f"tile {t} has {len(t)} faces, expected {width}")
            for c in t:
                if not (0 <= c < len(self.colors)):
                    raise ValueError(f"tile {t} uses unknown color id {c}")
        if len(set(self.tiles)) != len(self.tiles):
            seen: dict[Tile, int] = {}
            for i, t in enumerate(self.tiles):
                if t in seen:
                    raise ValueError(f"duplicate tiles at indices {seen[t]} and {i}")
                seen[t] = i
        if len(set(self.colors)) != len(self.colors):
            raise ValueError("color names must be distinct")
        if self.tile_names is not None and len(self.tile_names) != len(self.tiles):
            raise ValueError("tile_names length mismatch")

    @staticmethod
    def empty(dimension: int) -> "Tileset":
        """An explicitly empty tileset (legal result of an empty product)."""
        return Tileset(dimension, (), (), ())

    @property
    def is_empty(self) -> bool:
        return not self.tiles

    def __len__(self) -> int:
        return len(self.tiles)

    def name_of(self, tile_index: int) -> str:
        if self.tile_names:
            return self.tile_names[tile_index]
        return f"t{tile_index}"

    def face(self, tile_index: int, axis: int, positive: bool) -> int:
        return self.tiles[tile_index][face_index(axis, positive)]

    def color_id(self, name: str) -> int:
        try:
            return self.colors.index(name)
        except ValueError:
            raise KeyError(f"unknown color name {name!r}") from None


class ColorTable:
    """Mutable helper for interning colors while building a tileset."""

    def __init__(self) -> None:
        self._names: list[str] = []
        self._ids: dict[str, int] = {}

    def intern(self, name: str) -> int:
        got = self._ids.get(name)
        if got is None:
            got = len(self._names)
            self._names.append(name)
            self._ids[name] = got
        return got

    def freeze(self) -> tuple[str, ...]:
        return tuple(self._names)


def adjacency_ok(ts: Tileset, t1: int, t2: int, axis: int) -> bool:
    """True iff tile ``t2`` may sit on the +axis side of tile ``t1``.

    Matching means the +axis face of t1 equals the -axis face of t2.
    """
    if not (0 <= t1 < len(ts.tiles)) or not (0 <= t2 < len(ts.tiles)):
        raise ValueError(f"tile index out of range: {t1}, {t2}")
    if not (0 <= axis < ts.dimension):
        raise ValueError(f"axis {axis} out of range for dimension {ts.dimension}")
    return ts.face(t1, axis, True) == ts.face(t2, axis, False)


# Lattices ------------------------------------------------------------------


def _column_hnf(vectors: Sequence[Sequence[int]], dim: int) -> list[list[int]]:
    """Lower-triangular column Hermite form of the lattice spanned by vectors.

    Returns ``dim`` columns with positive diagonal and off-diagonal row
    entries reduced into [0, diagonal).  Raises ValueError if the vectors do
    not span a full-rank lattice.
    """
    cols = [list(v) for v in vectors]
    if any(len(c) != dim for c in cols):
        raise ValueError("generator length does not match dimension")
    basis: list[list[int]] = []
    for i in range(dim):
        while True:
            cand = [c for c in cols if c[i] != 0]
            if len(cand) <= 1:
                break
            cand.sort(key=lambda c: abs(c[i]))
            a, b = cand[0], cand[1]
            k = b[i] // a[i]
            for r in range(dim):
                b[r] -= k * a[r]
        pivot = next((c for c in cols if c[i] != 0), None)
        if pivot is None:
            raise ValueError("generators are singular (not full rank)")
        cols.remove(pivot)
        if pivot[i] < 0:
            pivot = [-x for x in pivot]
        basis.append(pivot)
        # clear row i of the not-yet-pivoted columns is already done above;
        # remaining cols have zeros in rows <= i by construction
    # reduce off-diagonal entries: row i of earlier columns mod the pivot
    for i in range(dim):
        di = basis[i][i]
        for j in range(i):
            k = basis[j][i] // di
            if k:
                for r in range(dim):
                    basis[j][r] -= k * basis[i][r]
    return basis


@dataclass(frozen=True)
class PeriodLattice:
    """Full-rank integer lattice in Z^d, canonical lower-triangular basis.

    ``basis`` holds the canonical generator vectors (columns).  ``index`` is
    |det| = the number of cosets, i.e. the number of cells of the torus
    quotient Z^d / lattice.
    """

    dimension: int
    basis: tuple[Point, ...]

    @property
    def index(self) -> int:
        out = 1
        for i in range(self.dimension):
            out *= self.basis[i][i]
        return out

    def reduce(self, point: Sequence[int]) -> Point:
        """Canonical coset representative of ``point`` (idempotent)."""
        x = list(point)
        for i in range(self.dimension):
            di = self.basis[i][i]
            k = x[i] // di
            if k:
                for r in range(self.dimension):
                    x[r] -= k * self.basis[i][r]
        return tuple(x)

    def contains(self, vector: Sequence[int]) -> bool:
        return self.reduce(vector) == (0,) * self.dimension

    def representatives(self) -> Iterator[Point]:
        """All coset representatives, in lexicographic order.

        With a lower-triangular basis processed in ascending axis order,
        reduce() is the identity on the diagonal box, so the box enumerates
        each coset exactly once.
        """
        ranges = [range(self.basis[i][i]) for i in range(self.dimension)]
        return itertools.product(*ranges)

    def __str__(self) -> str:
        return "; ".join(" ".join(str(v) for v in col) for col in self.basis)


def lattice_canonicalize(generators: Sequence[Sequence[int]]) -> PeriodLattice:
    """Canonicalize ``d`` integer generator vectors into a PeriodLattice.

    Raises ValueError when the generator matrix is singular.
    """
    gens = [tuple(int(x) for x in g) for g in generators]
    if not gens:
        raise ValueError("no generators")
    dim = len(gens[0])
    if len(gens) != dim:
        raise ValueError(f"need {dim} generators for dimension {dim}, got {len(gens)}")
    basis = _column_hnf(gens, dim)
    return PeriodLattice(dim, tuple(tuple(c) for c in basis))


def lattice_from_vectors(vectors: Sequence[Sequence[int]], dim: int) -> PeriodLattice:
    """Lattice spanned by arbitrarily many vectors (must be full rank)."""
    basis = _column_hnf([tuple(v) for v in vectors], dim)
    return PeriodLattice(dim, tuple(tuple(c) for c in basis))


# Patch domains -------------------------------------------------------------


@dataclass(frozen=True)
class Box:
    """Axis-aligned box domain: origin plus positive extents per axis."""

    origin: Point
    extents: Point

    def __post_init__(self) -> None:
        if len(self.origin) != len(self.extents):
            raise ValueError("origin/extents dimension mismatch")
        if any(e <= 0 for e in self.extents):
            raise ValueError("extents must be positive")

    @property
    def dimension(self) -> int:
        return len(self.origin)

    def __contains__(self, p: Sequence[int]) -> bool:
        return all(o <= x < o + e for x, o, e in zip(p, self.origin, self.extents))

    def points(self) -> Iterator[Point]:
        ranges = [range(o, o + e) for o, e in zip(self.origin, self.extents)]
        return itertools.product(*ranges)

    def size(self) -> int:
        out = 1
        for e in self.extents:
            out *= e
        return out


@dataclass(frozen=True)
class TorusDomain:
    """Torus quotient domain Z^d / lattice; cells are coset representatives."""

    lattice: PeriodLattice

    @property
    def dimension(self) -> int:
        return self.lattice.dimension

    def __contains__(self, p: Sequence[int]) -> bool:
        return self.lattice.reduce(p) == tuple(p)

    def points(self) -> Iterator[Point]:
        return self.lattice.representatives()

    def size(self) -> int:
        return self.lattice.index

    def wrap(self, p: Sequence[int]) -> Point:
        return self.lattice.reduce(p)


Domain = Union[Box, TorusDomain]


def domain_neighbor(domain: Domain, p: Point, axis: int, positive: bool) -> Optional[Point]:
    """The neighboring cell of ``p`` along an axis, or None outside a box."""
    step = 1 if positive else -1
    q = list(p)
    q[axis] += step
    if isinstance(domain, TorusDomain):
        return domain.wrap(q)
    q = tuple(q)
    return q if q in domain else None


@dataclass(frozen=True)
class Patch:
    """Partial assignment of tiles to a finite domain (box or torus).

    ``cells`` maps domain points to tile indices.  Construction validates
    membership and index ranges; adjacency is checked by
    :func:`patch_valid`, not here.
    """

    tileset: Tileset
    domain: Domain
    cells: dict[Point, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.domain.dimension != self.tileset.dimension:
            raise ValueError("domain/tileset dimension mismatch")
        for p, t in self.cells.items():
            if p not in self.domain:
                raise ValueError(f"cell {p} outside domain")
            if not (0 <= t < len(self.tileset.tiles)):
                raise ValueError(f"tile index {t} invalid at {p}")

    @property
    def fully_assigned(self) -> bool:
        return len(self.cells) == self.domain.size()

    def get(self, p: Sequence[int]) -> Optional[int]:
        return self.cells.get(tuple(p))


@dataclass(frozen=True)
class Violation:
    """One adjacency violation: two assigned neighbors with mismatched faces."""

    point: Point
    axis: int
    neighbor: Point
    tile: int
    neighbor_tile: int


def patch_valid(patch: Patch) -> list[Violation]:
    """All adjacency violations of a patch (empty list = valid).

    On a torus, adjacency wraps through the lattice quotient, including
    self-adjacency on quotients that are one cell wide along an axis.
    Unassigned neighbors never produce violations.
    """
    ts = patch.tileset
    out: list[Violation] = []
    for p in sorted(patch.cells):
        t = patch.cells[p]
        for axis in range(ts.dimension):
            q = domain_neighbor(patch.domain, p, axis, True)
            if q is None:
                continue
            tq = patch.cells.get(q)
            if tq is None:
                continue
            if ts.face(t, axis, True) != ts.face(tq, axis, False):
                out.append(Violation(p, axis, q, t, tq))
    return out


def pattern_occurs(needle: Patch, haystack: Patch) -> bool:
    """True iff some translate of ``needle`` matches assigned haystack cells.

    Both patches must live on Box domains over the same tileset.  A match at
    translation v means needle(x) = haystack(x+v) for every assigned x.
    """
    if needle.tileset != haystack.tileset:
        raise ValueError("pattern_occurs requires a common tileset")
    if not isinstance(needle.domain, Box) or not isinstance(haystack.domain, Box):
        raise ValueError("pattern_occurs requires Box domains")
    support = sorted(needle.cells)
    if not support:
        return True
    dim = needle.tileset.dimension
    lo = [min(p[a] for p in support) for a in range(dim)]
    hi = [max(p[a] for p in support) for a in range(dim)]
    h0 = haystack.domain.origin
    h1 = [o + e for o, e in zip(h0, haystack.domain.extents)]
    v_ranges = [range(h0[a] - lo[a], h1[a] - hi[a]) for a in range(dim)]
    for v in itertools.product(*v_ranges):
        if all(
            haystack.cells.get(tuple(x + d for x, d in zip(p, v))) == t
            for p, t in needle.cells.items()
        ):
            return True
    return False


# Structural operations -----------------------------------------------------

_LIFT_PLANES = {
    # plane -> (axis for tile east/west, axis for tile north/south, dup axis)
    "xy": (0, 1, 2),
    "xz": (0, 2, 1),
    "yz": (1, 2, 0),
}


def lift_2d_to_3d(ts: Tileset, plane: str = "xy") -> Tileset:
    """Lift a 2D tileset into 3D, duplicated along the orthogonal axis.

    Orientation convention (fixed, documented): the tile's east/west colors
    map to the +/- sides of the first axis of ``plane`` and north/south to
    the +/- sides of the second axis ("xy": east->x+, north->y+, dup along z;
    "xz": east->x+, north->z+, dup along y; "yz": east->y+, north->z+, dup
    along x).  Both faces along the duplication axis carry a fresh color
    unique to the tile, so any valid configuration is constant along that
    axis and each orthogonal slice is a valid 2D configuration.
    """
    if ts.dimension != 2:
        raise ValueError("lift_2d_to_3d needs a 2D tileset")
    try:
        ax_h, ax_v, ax_dup = _LIFT_PLANES[plane.lower()]
    except KeyError:
        raise ValueError(f"plane must be one of {sorted(_LIFT_PLANES)}") from None
    colors = ColorTable()
    ids = [colors.intern(c) for c in ts.colors]
    tiles = []
    names = []
    for i, t in enumerate(ts.tiles):
        dup = colors.intern(f"dup:{ts.name_of(i)}")
        faces = [0] * 6
        faces[face_index(ax_h, True)] = ids[tile_face(t, 0, True)]
        faces[face_index(ax_h, False)] = ids[tile_face(t, 0, False)]
        faces[face_index(ax_v, True)] = ids[tile_face(t, 1, True)]
        faces[face_index(ax_v, False)] = ids[tile_face(t, 1, False)]
        faces[face_index(ax_dup, True)] = dup
        faces[face_index(ax_dup, False)] = dup
        tiles.append(tuple(faces))
        names.append(ts.name_of(i))
    return Tileset(3, colors.freeze(), tuple(tiles), tuple(names))


@dataclass(frozen=True)
class SuperpositionRelation:
    """Pairs (tile index in A, tile index in B) allowed to share a cell."""

    pairs: frozenset[tuple[int, int]]

    @staticmethod
    def full(na: int, nb: int) -> "SuperpositionRelation":
        return SuperpositionRelation(
            frozenset((i, j) for i in range(na) for j in range(nb))
        )

    @staticmethod
    def of(pairs: Iterable[tuple[int, int]]) -> "SuperpositionRelation":
        return SuperpositionRelation(frozenset((int(a), int(b)) for a, b in pairs))


def product(a: Tileset, b: Tileset, rel: SuperpositionRelation) -> Tileset:
    """Superposition product: tiles are the allowed pairs.

    Each face color of a product tile is the interned pair of component face
    colors, so product adjacency holds iff it holds componentwise.  An empty
    relation yields the explicitly empty tileset rather than an error.
    """
    if a.dimension != b.dimension:
        raise ValueError("product requires equal dimensions")
    for (i, j) in rel.pairs:
        if not (0 <= i < len(a.tiles) and 0 <= j < len(b.tiles)):
            raise ValueError(f"relation pair {(i, j)} out of range")
    if not rel.pairs:
        return Tileset.empty(a.dimension)
    colors = ColorTable()
    tiles = []
    names = []
    width = 2 * a.dimension
    for (i, j) in sorted(rel.pairs):
        ta, tb = a.tiles[i], b.tiles[j]
        faces = tuple(
            colors.intern(f"{a.colors[ta[f]]}|{b.colors[tb[f]]}") for f in range(width)
        )
        tiles.append(faces)
        names.append(f"{a.name_of(i)}*{b.name_of(j)}")
    return Tileset(a.dimension, colors.freeze(), tuple(tiles), tuple(names))


def disjoint_union(tilesets: Sequence[Tileset]) -> Tileset:
    """Disjoint union: alphabets tagged per component so components never abut.

    Over any connected domain, solutions of the union are exactly the union
    of the per-component solution sets.
    """
    if not tilesets:
        raise ValueError("disjoint_union of nothing")
    dim = tilesets[0].dimension
    if any(ts.dimension != dim for ts in tilesets):
        raise ValueError("disjoint_union requires equal dimensions")
    colors = ColorTable()
    tiles = []
    names = []
    for k, ts in enumerate(tilesets):
        for i, t in enumerate(ts.tiles):
            faces = tuple(colors.intern(f"{k}:{ts.colors[c]}") for c in t)
            tiles.append(faces)
            names.append(f"{k}:{ts.name_of(i)}")
    return Tileset(dim, colors.freeze(), tuple(tiles), tuple(names))


# Determinism ---------------------------------------------------------------


@dataclass(frozen=True)
class DeterminismResult:
    deterministic: bool
    # (stencil tiles, first candidate, second candidate) witnessing failure
    counterexample: Optional[tuple[tuple[int, ...], int, int]] = None


def check_determinism(ts: Tileset, stencil: str) -> DeterminismResult:
    """Check a 2D tileset for stencil determinism.

    ``stencil`` is ``"NW"`` or ``"W"``:

    * NW (neighbors above and left): for every pair of tiles (above, left),
      at most one tile has north = above.south and west = left.east.
    * W (neighbors left and top-left): for every vertically compatible pair
      (left below top-left), at most one tile t has west = left.east while
      admitting an upward completion u with u.west = topleft.east and
      u.south = t.north.  This is exactly "a column determines the next
      column cell by cell": if the check passes, two valid configurations
      agreeing on the left and top-left cells agree at the center, because
      the actual configuration supplies the completion u.

    Boundary "no tile" is treated as unconstrained: the check quantifies
    over tiles actually placed on the stencil.
    """
    if ts.dimension != 2:
        raise ValueError("check_determinism works on 2D tilesets")
    if stencil.upper() == "NW":
        by_ns: dict[tuple[int, int], list[int]] = {}
        for t, tile in enumerate(ts.tiles):
            key = (tile[face_index(1, True)], tile[face_index(0, False)])  # (n, w)
            by_ns.setdefault(key, []).append(t)
        for above, left in itertools.product(range(len(ts.tiles)), repeat=2):
            key = (ts.face(above, 1, False), ts.face(left, 0, True))
            cand = by_ns.get(key, [])
            if len(cand) > 1:
                return DeterminismResult(False, ((above, left), cand[0], cand[1]))
        return DeterminismResult(True)
    if stencil.upper() == "W":
        by_west: dict[int, list[int]] = {}
        for t, tile in enumerate(ts.tiles):
            by_west.setdefault(tile[face_index(0, False)], []).append(t)
        for left, topleft in itertools.product(range(len(ts.tiles)), repeat=2):
            if ts.face(left, 1, True) != ts.face(topleft, 1, False):
                continue  # top-left must sit directly above left
            cand = []
            for t in by_west.get(ts.face(left, 0, True), []):
                north = ts.face(t, 1, True)
                for u in by_west.get(ts.face(topleft, 0, True), []):
                    if ts.face(u, 1, False) == north:
                        cand.append(t)
                        break
            if len(cand) > 1:
                return DeterminismResult(False, ((left, topleft), cand[0], cand[1]))
        return DeterminismResult(True)
    raise ValueError(f"unknown stencil {stencil!r} (use 'NW' or 'W')")
