"""Turing machines, transducers, and their compilation to tilesets.

The machine model is a deterministic single-tape Turing machine with an
optional second, read-only 0/1 tape (the oracle tape).  Transitions may be
guarded on the oracle digit under the oracle head and may move the oracle
head.  The space-time encoding puts time along the vertical axis (one row
per configuration, growing upward) and the work tape along x; the 3D variant
adds the oracle axis y.

Input reduction (strip common factors of two) and the scale witness
arithmetic for periodicity vectors live here as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .core import Box, ColorTable, Patch, Tileset, cube3d, tile2d

LEFT, RIGHT, STAY = "L", "R", "N"
_MOVES = {"L": -1, "R": 1, "N": 0}


@dataclass(frozen=True)
class Transition:
    state: str
    read: str
    new_state: str
    write: str
    move: str
    oracle_move: str = STAY
    oracle_read: Optional[int] = None  # 0/1 guard, None = don't care


@dataclass(frozen=True)
class TuringMachine:
    """Deterministic TM; the first alphabet symbol is the blank.

    A missing transition from a non-halting state is an implicit move to the
    rejecting state (write back, stay); the compilers emit tiles for it and
    the simulator performs it, so both sides agree on stuck machines.
    """

    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    transitions: tuple[Transition, ...]
    initial: str
    accepting: str
    rejecting: str

    def __post_init__(self) -> None:
        if not self.alphabet:
            raise ValueError("alphabet must contain at least the blank symbol")
        names = set(self.states)
        for s in (self.initial, self.accepting, self.rejecting):
            if s not in names:
                raise ValueError(f"state {s!r} not declared")
        seen: set[tuple[str, str, Optional[int]]] = set()
        for tr in self.transitions:
            if tr.state not in names or tr.new_state not in names:
                raise ValueError(f"transition uses undeclared state: {tr}")
            if tr.read not in self.alphabet or tr.write not in self.alphabet:
                raise ValueError(f"transition uses undeclared symbol: {tr}")
            if tr.move not in _MOVES or tr.oracle_move not in _MOVES:
                raise ValueError(f"bad move in {tr}")
            if self.halting(tr.state):
                raise ValueError(f"transition out of a halting state: {tr}")
            key = (tr.state, tr.read, tr.oracle_read)
            if key in seen:
                raise ValueError(f"nondeterministic transitions for {key}")
            seen.add(key)
        for (q, s, g) in seen:
            if g is not None and (q, s, None) in seen:
                raise ValueError(f"guarded and unguarded rules mix for ({q}, {s})")

    @property
    def blank(self) -> str:
        return self.alphabet[0]

    def halting(self, state: str) -> bool:
        return state in (self.accepting, self.rejecting)

    def find(self, state: str, symbol: str, oracle_digit: Optional[int]) -> Transition:
        for tr in self.transitions:
            if tr.state == state and tr.read == symbol:
                if tr.oracle_read is None or tr.oracle_read == oracle_digit:
                    return tr
        return Transition(state, symbol, self.rejecting, symbol, STAY)

    def effective_transitions(self) -> list[Transition]:
        """Declared transitions plus the implicit reject moves."""
        out = list(self.transitions)
        covered = {(tr.state, tr.read) for tr in self.transitions
                   if tr.oracle_read is None}
        guarded: dict[tuple[str, str], set[int]] = {}
        for tr in self.transitions:
            if tr.oracle_read is not None:
                guarded.setdefault((tr.state, tr.read), set()).add(tr.oracle_read)
        for (q, s), digits in guarded.items():
            for missing in {0, 1} - digits:
                out.append(Transition(q, s, self.rejecting, s, STAY,
                                      oracle_read=missing))
                covered.add((q, s))
        for q in self.states:
            if self.halting(q):
                continue
            for s in self.alphabet:
                if (q, s) not in covered and (q, s) not in guarded:
                    out.append(Transition(q, s, self.rejecting, s, STAY))
        return out

    def uses_oracle(self) -> bool:
        return any(
            tr.oracle_move != STAY or tr.oracle_read is not None
            for tr in self.transitions
        )


@dataclass(frozen=True)
class OracleTape:
    """Finite 0/1 word; position i is 1 iff the oracle accepts i."""

    word: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if any(b not in (0, 1) for b in self.word):
            raise ValueError("oracle word must be over {0,1}")


class OracleOverrun(Exception):
    """The machine read beyond the supplied finite oracle portion."""


@dataclass
class SimulationTrace:
    """Space-time record of a run.

    ``grid`` has steps+1 rows (configurations) and work_space+2 columns (the
    cells touched by the head plus one blank margin on each side).  Each
    entry is (symbol, head) with head = (state, oracle position) at the head
    cell and None elsewhere; exactly one head per row.  ``origin`` is the
    work-tape coordinate of grid column 0.
    """

    halted: bool
    accepted: bool
    steps: int
    work_space: int
    oracle_span: int
    origin: int
    grid: list[list[tuple[str, Optional[tuple[str, int]]]]] = field(default_factory=list)


def simulate(m: TuringMachine, word: str, oracle: OracleTape = OracleTape(),
             budget: int = 1000) -> SimulationTrace:
    """Run the machine, recording the full space-time grid.

    Stops on reaching the accepting/rejecting state or after ``budget``
    steps (halted=False, partial trace).  Reading the oracle outside the
    supplied word raises OracleOverrun.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    for ch in word:
        if ch not in m.alphabet:
            raise ValueError(f"input symbol {ch!r} not in alphabet")
    tape: dict[int, str] = {i: ch for i, ch in enumerate(word)}
    rows: list[tuple[dict[int, str], int, str, int]] = []
    pos, state, opos = 0, m.initial, 0
    lo, hi = 0, max(0, len(word) - 1)  # the input cells count as used space
    omax = 0
    consults = m.uses_oracle()
    steps = 0
    halted = False
    while True:
        rows.append((dict(tape), pos, state, opos))
        lo, hi = min(lo, pos), max(hi, pos)
        omax = max(omax, opos)
        if m.halting(state):
            halted = True
            break
        if steps >= budget:
            break
        digit: Optional[int] = None
        if consults:
            if opos >= len(oracle.word):
                raise OracleOverrun(f"oracle position {opos} beyond supplied word")
            digit = oracle.word[opos]
        tr = m.find(state, tape.get(pos, m.blank), digit)
        tape[pos] = tr.write
        pos += _MOVES[tr.move]
        opos += _MOVES[tr.oracle_move]
        if opos < 0:
            opos = 0
        state = tr.new_state
        steps += 1
    o0 = lo - 1
    grid = []
    for tape_k, pos_k, state_k, opos_k in rows:
        row = []
        for x in range(o0, hi + 2):
            sym = tape_k.get(x, m.blank)
            head = (state_k, opos_k) if x == pos_k else None
            row.append((sym, head))
        grid.append(row)
    return SimulationTrace(
        halted=halted,
        accepted=halted and state == m.accepting,
        steps=len(rows) - 1,
        work_space=hi - lo + 1,
        oracle_span=omax + 1,
        origin=o0,
        grid=grid,
    )


# ---------------------------------------------------------------------------
# WTM v1 text format
# ---------------------------------------------------------------------------


def parse_wtm(text: str) -> TuringMachine:
    """Parse the WTM v1 machine format.

    Lines: ``wtm 1``, ``states ...``, ``alphabet ...`` (first = blank),
    ``init q``, ``accept q``, ``reject q``, then transitions
    ``q a [0|1] -> q' a' L|R|N [Y:L|R|N]``; the optional digit guards on the
    oracle value under the oracle head.  ``#`` starts a comment.
    """
    states: tuple[str, ...] = ()
    alphabet: tuple[str, ...] = ()
    init = accept = reject = None
    transitions: list[Transition] = []
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0].split() != ["wtm", "1"]:
        raise ValueError("not a WTM v1 file (missing 'wtm 1' header)")
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] == "states":
            states = tuple(parts[1:])
        elif parts[0] == "alphabet":
            alphabet = tuple(parts[1:])
        elif parts[0] == "init":
            init = parts[1]
        elif parts[0] == "accept":
            accept = parts[1]
        elif parts[0] == "reject":
            reject = parts[1]
        elif "->" in parts:
            arrow = parts.index("->")
            lhs, rhs = parts[:arrow], parts[arrow + 1:]
            if len(lhs) == 2:
                (state, read), guard = lhs, None
            elif len(lhs) == 3 and lhs[2] in ("0", "1"):
                state, read, guard = lhs[0], lhs[1], int(lhs[2])
            else:
                raise ValueError(f"bad transition lhs: {ln!r}")
            if len(rhs) not in (3, 4):
                raise ValueError(f"bad transition rhs: {ln!r}")
            omove = STAY
            if len(rhs) == 4:
                if not rhs[3].startswith("Y:"):
                    raise ValueError(f"bad oracle move in {ln!r}")
                omove = rhs[3][2:]
            transitions.append(
                Transition(state, read, rhs[0], rhs[1], rhs[2], omove, guard)
            )
        else:
            raise ValueError(f"unrecognized WTM line: {ln!r}")
    if init is None or accept is None or reject is None:
        raise ValueError("WTM file must declare init, accept, reject")
    return TuringMachine(states, alphabet, tuple(transitions), init, accept, reject)


def emit_wtm(m: TuringMachine) -> str:
    out = ["wtm 1"]
    out.append("states " + " ".join(m.states))
    out.append("alphabet " + " ".join(m.alphabet))
    out.append(f"init {m.initial}")
    out.append(f"accept {m.accepting}")
    out.append(f"reject {m.rejecting}")
    for tr in m.transitions:
        guard = f" {tr.oracle_read}" if tr.oracle_read is not None else ""
        omove = f" Y:{tr.oracle_move}" if tr.oracle_move != STAY else ""
        out.append(
            f"{tr.state} {tr.read}{guard} -> {tr.new_state} {tr.write} {tr.move}{omove}"
        )
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# 2D space-time compiler
# ---------------------------------------------------------------------------

CAP = "#cap"
QUIET = "-"


@dataclass(frozen=True)
class TmTiling:
    """Compiled machine tileset plus its boundary conventions.

    Bottom-row south colors spell the initial configuration (head on patch
    column 1, i.e. tape cell 0), side borders are QUIET, the top row carries
    the halting cap on its north faces.  A fully valid capped width x height
    patch exists iff the machine halts within height-1 steps without leaving
    the width (one margin column each side), and it is unique: its rows are
    the configurations of the run.
    """

    machine: TuringMachine
    tileset: Tileset
    sym_color: dict[str, int]
    head_color: dict[tuple[str, str], int]
    cap_color: int
    quiet_color: int

    def initial_south_colors(self, word: str, width: int, head_at: int = 1) -> list[int]:
        blank = self.machine.blank
        if len(word) + head_at >= width:
            raise ValueError("word does not fit in the requested width")
        cols = []
        for x in range(width):
            sym = word[x - head_at] if head_at <= x < head_at + len(word) else blank
            if x == head_at:
                sym0 = word[0] if word else blank
                cols.append(self.head_color[(self.machine.initial, sym0)])
            else:
                cols.append(self.sym_color[sym])
        return cols

    def decode_south(self, tile_index: int) -> tuple[str, Optional[str]]:
        """(symbol, state or None) encoded on a tile's south face."""
        color = self.tileset.colors[self.tileset.tiles[tile_index][3]]
        kind, _, payload = color.partition(":")
        if kind == "s":
            return payload, None
        state, _, sym = payload.partition(",")
        return sym, state

    def capped_boundary(self, word: str, width: int, height: int):
        """Boundary color pins for a capped computation box."""
        south = self.initial_south_colors(word, width)
        pins = []
        for x in range(width):
            pins.append(((x, 0), 1, False, south[x]))
            pins.append(((x, height - 1), 1, True, self.cap_color))
        for y in range(height):
            pins.append(((0, y), 0, False, self.quiet_color))
            pins.append(((width - 1, y), 0, True, self.quiet_color))
        return pins

    def expected_south_grid(self, trace: SimulationTrace, word: str,
                            width: int, height: int) -> list[list[tuple[str, Optional[str]]]]:
        """The (symbol, state) grid the unique capped patch must decode to."""
        m = self.machine
        rows = []
        for y in range(height):
            k = min(y, trace.steps)
            grid_row = trace.grid[k]
            row = []
            for x in range(width):
                tape_x = x - 1  # head starts on patch column 1 = tape cell 0
                gx = tape_x - trace.origin
                if 0 <= gx < len(grid_row):
                    sym, head = grid_row[gx]
                else:
                    sym, head = m.blank, None
                row.append((sym, head[0] if head else None))
            rows.append(row)
        return rows


def compile_tm_to_tiles(m: TuringMachine) -> TmTiling:
    """Classic space-time encoding of a TM into Wang tiles (time upward).

    Vertical colors: tape symbols and (state, symbol) head pairs, plus the
    halting cap.  Horizontal colors: QUIET or a moving-head signal.  Rows of
    a valid patch are consecutive configurations; halted heads stall so any
    taller patch stays valid; cap tiles close the patch only over symbols or
    halted heads.
    """
    if m.uses_oracle():
        raise ValueError("machine consults the oracle; use compile_tm_to_cubes")
    colors = ColorTable()
    quiet = colors.intern(QUIET)
    sym_color = {s: colors.intern(f"s:{s}") for s in m.alphabet}
    head_color = {
        (q, s): colors.intern(f"h:{q},{s}") for q in m.states for s in m.alphabet
    }
    cap = colors.intern(CAP)
    tiles: list[tuple[int, ...]] = []
    names: list[str] = []
    seen: set[tuple[int, ...]] = set()

    def add(n, e, s, w, name):
        t = tile2d(n, e, s, w)
        if t not in seen:
            seen.add(t)
            tiles.append(t)
            names.append(name)

    for s in m.alphabet:
        add(sym_color[s], quiet, sym_color[s], quiet, f"sym:{s}")
    for tr in m.effective_transitions():
        q, s = tr.state, tr.read
        if tr.move == RIGHT:
            move = colors.intern(f"mR:{tr.new_state}")
            add(sym_color[tr.write], move, head_color[(q, s)], quiet, f"act:{q},{s}")
            for u in m.alphabet:
                add(head_color[(tr.new_state, u)], quiet, sym_color[u], move,
                    f"recv:{tr.new_state},{u}")
        elif tr.move == LEFT:
            move = colors.intern(f"mL:{tr.new_state}")
            add(sym_color[tr.write], quiet, head_color[(q, s)], move, f"act:{q},{s}")
            for u in m.alphabet:
                add(head_color[(tr.new_state, u)], move, sym_color[u], quiet,
                    f"recv:{tr.new_state},{u}")
        else:
            add(head_color[(tr.new_state, tr.write)], quiet, head_color[(q, s)],
                quiet, f"act:{q},{s}")
    for q in (m.accepting, m.rejecting):
        for s in m.alphabet:
            add(head_color[(q, s)], quiet, head_color[(q, s)], quiet,
                f"stall:{q},{s}")
            add(cap, quiet, head_color[(q, s)], quiet, f"caph:{q},{s}")
    for s in m.alphabet:
        add(cap, quiet, sym_color[s], quiet, f"cap:{s}")
    ts = Tileset(2, colors.freeze(), tuple(tiles), tuple(names))
    return TmTiling(m, ts, sym_color, head_color, cap, quiet)


# ---------------------------------------------------------------------------
# 3D compiler (oracle tape along y)
# ---------------------------------------------------------------------------


def _compile_base_with_moves(m: TuringMachine) -> tuple[TmTiling, dict[int, str]]:
    """2D space-time tiles whose horizontal colors carry the row's oracle
    move, so every cell of a time step knows how the oracle head shifts.

    Action tiles pin the move to their transition's; symbol and receive
    tiles come in one variant per move and inherit the row's value through
    face matching.  Returns the tiling and a map tile index -> oracle move.
    """
    colors = ColorTable()
    sym_color = {s: colors.intern(f"s:{s}") for s in m.alphabet}
    head_color = {
        (q, s): colors.intern(f"h:{q},{s}") for q in m.states for s in m.alphabet
    }
    cap = colors.intern(CAP)
    quiet = {om: colors.intern(f"{QUIET}|{om}") for om in (LEFT, STAY, RIGHT)}
    tiles: list[tuple[int, ...]] = []
    names: list[str] = []
    omoves: list[str] = []
    seen: set[tuple[int, ...]] = set()

    def add(n, e, s, w, name, om):
        t = tile2d(n, e, s, w)
        if t not in seen:
            seen.add(t)
            tiles.append(t)
            names.append(name)
            omoves.append(om)

    for s in m.alphabet:
        for om in (LEFT, STAY, RIGHT):
            add(sym_color[s], quiet[om], sym_color[s], quiet[om], f"sym:{s}|{om}", om)
    for tr in m.effective_transitions():
        q, s, om = tr.state, tr.read, tr.oracle_move
        guard = "" if tr.oracle_read is None else f"?{tr.oracle_read}"
        if tr.move == RIGHT:
            move = colors.intern(f"mR:{tr.new_state}|{om}")
            add(sym_color[tr.write], move, head_color[(q, s)], quiet[om],
                f"act:{q},{s}{guard}|{om}", om)
            for u in m.alphabet:
                add(head_color[(tr.new_state, u)], quiet[om], sym_color[u], move,
                    f"recv:{tr.new_state},{u}|{om}", om)
        elif tr.move == LEFT:
            move = colors.intern(f"mL:{tr.new_state}|{om}")
            add(sym_color[tr.write], quiet[om], head_color[(q, s)], move,
                f"act:{q},{s}{guard}|{om}", om)
            for u in m.alphabet:
                add(head_color[(tr.new_state, u)], move, sym_color[u], quiet[om],
                    f"recv:{tr.new_state},{u}|{om}", om)
        else:
            add(head_color[(tr.new_state, tr.write)], quiet[om],
                head_color[(q, s)], quiet[om], f"act:{q},{s}{guard}|{om}", om)
    for q in (m.accepting, m.rejecting):
        for s in m.alphabet:
            add(head_color[(q, s)], quiet[STAY], head_color[(q, s)], quiet[STAY],
                f"stall:{q},{s}|N", STAY)
            add(cap, quiet[STAY], head_color[(q, s)], quiet[STAY],
                f"caph:{q},{s}", STAY)
    for s in m.alphabet:
        add(cap, quiet[STAY], sym_color[s], quiet[STAY], f"cap:{s}", STAY)
    ts = Tileset(2, colors.freeze(), tuple(tiles), tuple(names))
    tiling = TmTiling(m, ts, sym_color, head_color, cap,
                      quiet[STAY])
    return tiling, {i: om for i, om in enumerate(omoves)}


#: marker z-transition: new marker values allowed over (old marker, move)
_MARKER_STEP = {
    ("b", LEFT): ("b", "at"),
    ("at", LEFT): ("a",),
    ("a", LEFT): ("a",),
    ("b", STAY): ("b",),
    ("at", STAY): ("at",),
    ("a", STAY): ("a",),
    ("b", RIGHT): ("b",),
    ("at", RIGHT): ("b",),
    ("a", RIGHT): ("a", "at"),
}


@dataclass(frozen=True)
class TmCubes:
    """3D space-time compilation: time along z, work tape along x, oracle
    tape along y.

    Each cube is a consistent tuple (base 2D tile, oracle-head marker,
    oracle digit, previous-step marker claim).  The base component is forced
    constant along y (its identity rides the y faces); the digit is forced
    constant along x and z and varies only along y, and no transition writes
    it; the marker singles out one y per time step and shifts by the row's
    oracle move, which the base's horizontal colors transport.  Guarded
    transitions require the digit under the marker to equal their guard.
    """

    machine: TuringMachine
    tileset: Tileset
    parts: tuple[tuple[int, str, int], ...]
    base: TmTiling
    base_omove: dict[int, str]

    def component_of(self, tile_index: int) -> tuple[int, str, int]:
        """(base tile, marker state, oracle digit) of a cube."""
        return self.parts[tile_index]

    def project_to_2d(self, patch: Patch, y: int) -> Patch:
        """Base-component slice at height y as a 2D patch of base.tileset."""
        dom = patch.domain
        if not isinstance(dom, Box):
            raise ValueError("projection expects a box patch")
        cells = {}
        for (x, yy, z), t in patch.cells.items():
            if yy == y:
                cells[(x, z)] = self.parts[t][0]
        box = Box((dom.origin[0], dom.origin[2]), (dom.extents[0], dom.extents[2]))
        return Patch(self.base.tileset, box, cells)

    def run_request(self, word: str, oracle: OracleTape, width: int,
                    oracle_width: int, height: int):
        """(boundary pins, allowed-set restrictions) for a capped 3D run.

        Bottom z-faces pin the initial configuration, the initial marker
        (oracle head at y=0) and the oracle digits; top z-faces pin the cap;
        side x-columns are restricted to quiet base tiles; the y borders
        keep the marker line inside the window.
        """
        if oracle_width < 1 or oracle_width > len(oracle.word):
            raise ValueError("oracle_width must fit the supplied word")
        south = self.base.initial_south_colors(word, width)
        bts = self.base.tileset
        boundary = []
        for x in range(width):
            for y in range(oracle_width):
                mk = "at" if y == 0 else "a"
                d = oracle.word[y]
                name = f"{bts.colors[south[x]]}@{mk}|N%{d}"
                boundary.append(((x, y, 0), 2, False, self.tileset.color_id(name)))
                boundary.append(((x, y, height - 1), 2, True,
                                 self.tileset.color_id(CAP)))
        allowed = []
        quiet_w = {t for t in range(len(self.tileset.tiles))
                   if bts.colors[bts.tiles[self.parts[t][0]][1]].startswith(QUIET)
                   or bts.colors[bts.tiles[self.parts[t][0]][1]] == CAP}
        quiet_e = {t for t in range(len(self.tileset.tiles))
                   if bts.colors[bts.tiles[self.parts[t][0]][0]].startswith(QUIET)
                   or bts.colors[bts.tiles[self.parts[t][0]][0]] == CAP}
        lowmk = {t for t in range(len(self.tileset.tiles))
                 if self.parts[t][1] in ("b", "at")}
        highmk = {t for t in range(len(self.tileset.tiles))
                  if self.parts[t][1] in ("at", "a")}
        for y in range(oracle_width):
            for z in range(height):
                allowed.append((((0, y, z)), tuple(sorted(quiet_w))))
                allowed.append((((width - 1, y, z)), tuple(sorted(quiet_e))))
        for x in range(width):
            for z in range(height):
                allowed.append((((x, 0, z)), tuple(sorted(lowmk))))
                allowed.append((((x, oracle_width - 1, z)), tuple(sorted(highmk))))
        return boundary, allowed


def compile_tm_to_cubes(m: TuringMachine) -> TmCubes:
    """Lift the space-time encoding to 3D with oracle access along y."""
    base, base_omove = _compile_base_with_moves(m)
    bts = base.tileset
    colors = ColorTable()
    cap_zp = colors.intern(CAP)
    tiles: list[tuple[int, ...]] = []
    names: list[str] = []
    parts: list[tuple[int, str, int]] = []
    marker_lohi = {"b": ("b", "b"), "at": ("b", "a"), "a": ("a", "a")}
    for bi, btile in enumerate(bts.tiles):
        bname = bts.name_of(bi)
        om = base_omove[bi]
        guard = None
        if bname.startswith("act:") and "?" in bname:
            guard = int(bname.split("?", 1)[1][0])
        for mk in ("b", "at", "a"):
            if guard is not None and mk == "at":
                valid_digits = (guard,)
            else:
                valid_digits = (0, 1)
            for d in valid_digits:
                for prev_mk in ("b", "at", "a"):
                    for prev_om in (LEFT, STAY, RIGHT):
                        if mk not in _MARKER_STEP[(prev_mk, prev_om)]:
                            continue
                        xp = colors.intern(f"{bts.colors[btile[0]]}@{mk}%{d}")
                        xm = colors.intern(f"{bts.colors[btile[1]]}@{mk}%{d}")
                        lo, hi = marker_lohi[mk]
                        yp = colors.intern(f"B{bi}~{hi}")
                        ym = colors.intern(f"B{bi}~{lo}")
                        if bts.colors[btile[2]] == CAP:
                            zp = cap_zp
                        else:
                            zp = colors.intern(
                                f"{bts.colors[btile[2]]}@{mk}|{om}%{d}")
                        zm = colors.intern(
                            f"{bts.colors[btile[3]]}@{prev_mk}|{prev_om}%{d}")
                        cube = cube3d(xp, xm, yp, ym, zp, zm)
                        if cube in set(tiles):
                            continue
                        tiles.append(cube)
                        names.append(f"{bname}@{mk}<{prev_mk}{prev_om}%{d}")
                        parts.append((bi, mk, d))
    ts = Tileset(3, colors.freeze(), tuple(tiles), tuple(names))
    return TmCubes(m, ts, tuple(parts), base, base_omove)
