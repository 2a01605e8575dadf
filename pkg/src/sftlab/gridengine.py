"""Desk-scale analysis of SFTs on Z^2: Wang tiles, torus search, rendering.

Coordinates are (x, y) with north = +y.  A torus assignment of periods
(p, q) is stored as q rows of length p (``cells[y][x]``) and rendered in
that order, row y = 0 on the first line.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .sft import (
    PeriodicConfig,
    SftSpec,
    SpecError,
    WindowConfig,
    Z,
    Z2,
    check_config,
)


@dataclass(frozen=True)
class WangTile:
    id: str
    north: str
    east: str
    south: str
    west: str


@dataclass(frozen=True)
class WangTileSet:
    tiles: tuple[WangTile, ...]

    def __post_init__(self):
        if not self.tiles:
            raise SpecError("a tile set needs at least one tile")
        ids = [t.id for t in self.tiles]
        if len(set(ids)) != len(ids):
            raise SpecError("tile ids are not distinct")


def parse_wang(text: str) -> WangTileSet:
    tiles = []
    for no, raw in enumerate(text.splitlines(), 1):
        ln = raw.strip()
        if not ln or ln.startswith("#"):
            continue
        toks = ln.split()
        if toks[0] != "tile" or len(toks) != 6:
            raise SpecError("expected 'tile <id> <north> <east> <south> <west>'", no)
        tiles.append(WangTile(*toks[1:]))
    return WangTileSet(tuple(tiles))


def render_wang(tiles: WangTileSet) -> str:
    return "".join(f"tile {t.id} {t.north} {t.east} {t.south} {t.west}\n" for t in tiles.tiles)


def wang_to_spec(tiles: WangTileSet) -> SftSpec:
    """Support (0,0), (1,0), (0,1); a triple (t, r, u) is allowed when r
    fits east of t and u fits north of t."""
    words = frozenset(
        (t.id, r.id, u.id)
        for t in tiles.tiles for r in tiles.tiles for u in tiles.tiles
        if t.east == r.west and t.north == u.south
    )
    return SftSpec(Z2, tuple(t.id for t in tiles.tiles), ((0, 0), (1, 0), (0, 1)), words)


def as_z2(spec: SftSpec) -> SftSpec:
    """View a spec on Z as a spec on Z^2 that ignores the second axis."""
    if spec.family == Z2:
        return spec
    if spec.family != Z:
        raise ValueError("only Z and Z2 specs live on a torus")
    return SftSpec(Z2, spec.alphabet, tuple((f, 0) for f in spec.support), spec.allowed)


# ---------------------------------------------------------------------------
# torus search


class _Torus:
    def __init__(self, spec: SftSpec, p: int, q: int):
        self.spec = spec
        self.p, self.q = p, q
        self.ncells = p * q
        self.alpha = len(spec.alphabet)
        rank = {s: i for i, s in enumerate(spec.alphabet)}
        self.words = [tuple(rank[s] for s in w) for w in spec.allowed]
        # one constraint per offset: the cells covered by the translated support
        self.scopes = []
        for y in range(q):
            for x in range(p):
                self.scopes.append(tuple(((x + fx) % p) + p * ((y + fy) % q)
                                         for fx, fy in spec.support))
        self.watch = [[] for _ in range(self.ncells)]
        for ci, scope in enumerate(self.scopes):
            for cell in set(scope):
                self.watch[cell].append(ci)

    def revise(self, ci: int, dom: list[int]) -> list[tuple[int, int]] | None:
        """Generalized arc consistency for one constraint.

        Returns the (cell, new_domain) updates, or None on a wipe-out.
        """
        scope = self.scopes[ci]
        support = {}
        for w in self.words:
            seen = {}
            ok = True
            for cell, s in zip(scope, w):
                if not dom[cell] >> s & 1 or seen.setdefault(cell, s) != s:
                    ok = False
                    break
            if ok:
                for cell, s in seen.items():
                    support[cell] = support.get(cell, 0) | (1 << s)
        changes = []
        for cell in set(scope):
            new = support.get(cell, 0)
            if not new:
                return None
            if new != dom[cell]:
                changes.append((cell, new))
        return changes

    def propagate(self, dom: list[int], queue: list[int]) -> bool:
        pending = set(queue)
        queue = list(queue)
        while queue:
            ci = queue.pop()
            pending.discard(ci)
            changes = self.revise(ci, dom)
            if changes is None:
                return False
            for cell, new in changes:
                dom[cell] = new
                for cj in self.watch[cell]:
                    if cj not in pending:
                        pending.add(cj)
                        queue.append(cj)
        return True

    def solve(self) -> list[int] | None:
        if not self.words:
            return None
        dom = [(1 << self.alpha) - 1] * self.ncells
        if not self.propagate(dom, list(range(len(self.scopes)))):
            return None
        return self._search(dom, 0)

    def _search(self, dom: list[int], cell: int) -> list[int] | None:
        while cell < self.ncells and dom[cell] & (dom[cell] - 1) == 0:
            cell += 1
        if cell == self.ncells:
            return [d.bit_length() - 1 for d in dom]
        for s in range(self.alpha):
            if not dom[cell] >> s & 1:
                continue
            trial = dom[:]
            trial[cell] = 1 << s
            if self.propagate(trial, self.watch[cell]):
                found = self._search(trial, cell + 1)
                if found is not None:
                    return found
        return None


def torus_solutions(spec: SftSpec, p: int, q: int) -> PeriodicConfig | None:
    """Least valid (p, q)-periodic assignment in row-major order, or None.

    Backtracking over cells row by row, symbols in alphabet order, with
    generalized arc consistency on every translated support.  Propagation
    only removes symbols that cannot appear in any solution, so the first
    solution reached is the lexicographically least.
    """
    if p < 1 or q < 1:
        raise ValueError("torus periods must be positive")
    spec = as_z2(spec)
    sol = _Torus(spec, p, q).solve()
    if sol is None:
        return None
    rows = tuple(tuple(spec.alphabet[sol[x + p * y]] for x in range(p)) for y in range(q))
    config = PeriodicConfig((p, q), rows)
    assert check_config(spec, config).valid
    return config


def scan_order(bound: int) -> list[tuple[int, int]]:
    pairs = [(p, q) for p in range(1, bound + 1) for q in range(1, bound + 1)]
    return sorted(pairs, key=lambda pq: (pq[0] * pq[1], pq))


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("SFTLAB_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class SearchReport:
    bound: int
    tried: list = field(default_factory=list)       # ((p, q), found?)
    found: tuple[int, int] | None = None
    assignment: PeriodicConfig | None = None

    def lines(self) -> list[str]:
        out = [f"bound: {self.bound}"]
        out += [f"torus {p}x{q}: {'found' if ok else 'refuted'}" for (p, q), ok in self.tried]
        if self.found:
            out.append(f"verdict: periodic point with periods ({self.found[0]},{self.found[1]})")
        else:
            out.append(f"verdict: no periodic point with periods <= {self.bound}")
        return out


def search_periodic(spec: SftSpec, bound: int, threads: int | None = None) -> SearchReport:
    """Scan tori by increasing area, then lexicographically; stop at the first hit.

    A negative report only says no periodic point exists with periods up
    to ``bound``; it never certifies aperiodicity.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    threads = threads or thread_count()
    report = SearchReport(bound)
    order = scan_order(bound)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for start in range(0, len(order), threads):
            batch = order[start:start + threads]
            results = list(pool.map(lambda pq: torus_solutions(spec, *pq), batch))
            for pq, sol in zip(batch, results):
                report.tried.append((pq, sol is not None))
                if sol is not None:
                    report.found, report.assignment = pq, sol
                    return report
    return report


# ---------------------------------------------------------------------------
# rendering

# fixed palette indexed by symbol position in the alphabet
PALETTE = [
    (230, 25, 75), (60, 180, 75), (255, 225, 25), (0, 130, 200),
    (245, 130, 48), (145, 30, 180), (70, 240, 240), (240, 50, 230),
    (210, 245, 60), (250, 190, 190), (0, 128, 128), (230, 190, 255),
    (170, 110, 40), (255, 250, 200), (128, 0, 0), (170, 255, 195),
]


def _rows(c) -> list[tuple]:
    """Rows in stored order: y = 0 first."""
    if isinstance(c, (PeriodicConfig, WindowConfig)):
        return [c.cells] if c.family == Z else list(c.cells)
    return [tuple(r) for r in c]


def render(c, fmt: str = "ascii", alphabet=None, cell: int = 8) -> bytes:
    rows = _rows(c)
    if fmt == "ascii":
        return "".join(" ".join(r) + "\n" for r in rows).encode()
    if fmt == "ppm":
        if alphabet is None:
            alphabet = sorted({s for r in rows for s in r})
        idx = {s: i for i, s in enumerate(alphabet)}
        h = len(rows) * cell
        w = (len(rows[0]) if rows else 0) * cell
        out = [f"P3\n{w} {h}\n255\n"]
        for r in rows:
            line = " ".join("%d %d %d" % PALETTE[idx[s] % len(PALETTE)]
                            for s in r for _ in range(cell))
            out.extend([line + "\n"] * cell)
        return "".join(out).encode()
    raise ValueError(f"unknown format {fmt!r}; use ascii or ppm")
