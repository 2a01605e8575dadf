"""Exact analysis of SFTs on Z through their transition graph.

Vertices are the allowed words of the normalized spec (support {0..n-1});
u -> v when the last n-1 symbols of u are the first n-1 symbols of v.
Bi-infinite walks are exactly the configurations, and closed walks of
length k are exactly the points fixed by the shift k.

Boolean matrices are lists of Python ints, one bitset per row.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import reduce

import networkx as nx

from .groups import (
    AllNonIdentity,
    ComplementOfSubgroup,
    ExplicitList,
    GroupRef,
    OddMultiples,
    SpectrumComplement,
    SubgroupRef,
    MULTIPLES,
    make_group,
)
from .sft import EmptySft, PeriodicConfig, SftSpec, Z, normalize_z_support

BoolMatrix = list  # list[int]


@dataclass
class TransitionGraph:
    spec: SftSpec
    vertices: tuple
    succ: tuple
    _pow2: list = field(default_factory=list, repr=False, compare=False)
    _core: list | None = field(default=None, repr=False, compare=False)

    def __len__(self):
        return len(self.vertices)

    @property
    def rows(self) -> BoolMatrix:
        return [sum(1 << v for v in s) for s in self.succ]

    def edges(self):
        return [(u, v) for u, s in enumerate(self.succ) for v in s]

    def core(self) -> BoolMatrix:
        """Adjacency restricted to the essential graph.

        Vertices without a successor or predecessor are stripped until none
        remain; no closed walk passes through them, so traces are unchanged.
        """
        if self._core is None:
            rows = self.rows
            alive = (1 << len(rows)) - 1
            changed = True
            while changed:
                changed = False
                has_pred = 0
                for u in range(len(rows)):
                    if alive >> u & 1:
                        has_pred |= rows[u] & alive
                for u in range(len(rows)):
                    if alive >> u & 1 and (not rows[u] & alive or not has_pred >> u & 1):
                        alive &= ~(1 << u)
                        changed = True
            self._core = [r & alive if alive >> u & 1 else 0 for u, r in enumerate(rows)]
        return self._core

    def power_of_two(self, i: int) -> BoolMatrix:
        if not self._pow2:
            self._pow2.append(self.core())
        while len(self._pow2) <= i:
            last = self._pow2[-1]
            self._pow2.append(bool_matmul(last, last))
        return self._pow2[i]


def bool_matmul(a: BoolMatrix, b: BoolMatrix) -> BoolMatrix:
    out = []
    for row in a:
        acc = 0
        while row:
            low = row & -row
            acc |= b[low.bit_length() - 1]
            row ^= low
        out.append(acc)
    return out


def bool_trace(a: BoolMatrix) -> bool:
    return any(r >> i & 1 for i, r in enumerate(a))


def _ranked(spec: SftSpec):
    rank = {s: i for i, s in enumerate(spec.alphabet)}
    return lambda w: tuple(rank[s] for s in w)


def build_graph(spec: SftSpec) -> TransitionGraph:
    if spec.family != Z:
        raise ValueError("transition graphs are built for specs on Z")
    spec = normalize_z_support(spec)
    verts = tuple(sorted(spec.allowed, key=_ranked(spec)))
    by_prefix: dict[tuple, list[int]] = {}
    for i, w in enumerate(verts):
        by_prefix.setdefault(w[:-1], []).append(i)
    succ = tuple(tuple(by_prefix.get(w[1:], ())) for w in verts)
    return TransitionGraph(spec, verts, succ)


def _graph(x) -> TransitionGraph:
    return x if isinstance(x, TransitionGraph) else build_graph(x)


def has_period(spec, k: int) -> bool:
    """True iff some configuration is fixed by the shift by k (k != 0)."""
    if k == 0:
        raise ValueError("k = 0 fixes every configuration; periods are nonzero")
    g = _graph(spec)
    if not g.vertices:
        return False
    k = abs(k)
    acc = None
    i = 0
    while k:
        if k & 1:
            p = g.power_of_two(i)
            acc = p if acc is None else bool_matmul(acc, p)
        k >>= 1
        i += 1
    return bool_trace(acc)


# ---------------------------------------------------------------------------
# witnesses


def least_periodic_word(spec, k: int) -> PeriodicConfig | None:
    """Lexicographically least valid word of period k, or None.

    Greedy over vertices in alphabet order, pruned by the set of vertices
    that can return to the start in exactly the remaining number of steps.
    """
    g = _graph(spec)
    n = len(g.vertices)
    if k < 1 or n == 0:
        return None
    pred = [0] * n
    for u, s in enumerate(g.succ):
        for v in s:
            pred[v] |= 1 << u
    for s in range(n):
        layers = [1 << s]
        for _ in range(k):
            cur, acc = layers[-1], 0
            while cur:
                low = cur & -cur
                acc |= pred[low.bit_length() - 1]
                cur ^= low
            layers.append(acc)
            if not acc:
                break
        if len(layers) <= k or not layers[k] >> s & 1:
            continue
        walk = [s]
        for t in range(1, k):
            need = layers[k - t]
            walk.append(next(v for v in g.succ[walk[-1]] if need >> v & 1))
        return PeriodicConfig.word(g.vertices[v][0] for v in walk)
    return None


def shortest_cycle_length(spec) -> int | None:
    g = _graph(spec)
    best = None
    for s in range(len(g.vertices)):
        dist = {s: 0}
        q = deque([s])
        found = None
        while q and found is None:
            u = q.popleft()
            if best is not None and dist[u] + 1 >= best:
                break
            for v in g.succ[u]:
                if v == s:
                    found = dist[u] + 1
                    break
                if v not in dist:
                    dist[v] = dist[u] + 1
                    q.append(v)
        if found is not None and (best is None or found < best):
            best = found
    return best


@dataclass(frozen=True)
class Emptiness:
    empty: bool
    witness: PeriodicConfig | None = None

    def __bool__(self):
        return not self.empty


def is_empty(spec) -> Emptiness:
    """Empty, or Nonempty with the least periodic point on a shortest cycle."""
    m = shortest_cycle_length(spec)
    if m is None:
        return Emptiness(True)
    return Emptiness(False, least_periodic_word(spec, m))


def no_sa_witness(spec) -> PeriodicConfig:
    """A periodic point of least period; shows the SFT is not strongly aperiodic."""
    e = is_empty(spec)
    if e.empty:
        raise EmptySft("the SFT is empty")
    return e.witness


# ---------------------------------------------------------------------------
# period spectra


@dataclass(frozen=True)
class PeriodSpectrum:
    """{k > 0 : some configuration has period k}.

    Below ``threshold`` the set ``members`` is authoritative; from the
    threshold on, k is a period iff ``k % modulus in residues``.
    """

    modulus: int = 1
    residues: frozenset = frozenset()
    threshold: int = 1
    members: frozenset = frozenset()

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        if self.threshold < 1:
            raise ValueError("threshold must be positive")
        object.__setattr__(self, "residues", frozenset(self.residues))
        object.__setattr__(self, "members", frozenset(self.members))
        if any(not 0 <= r < self.modulus for r in self.residues):
            raise ValueError("residues must lie in [0, modulus)")
        if any(not 0 < k < self.threshold for k in self.members):
            raise ValueError("members must lie in [1, threshold)")

    def contains(self, k: int) -> bool:
        if k <= 0:
            return False
        if k < self.threshold:
            return k in self.members
        return k % self.modulus in self.residues

    __contains__ = contains

    @property
    def is_empty(self) -> bool:
        return not self.members and not self.residues

    def least(self) -> int | None:
        if self.members:
            return min(self.members)
        for k in range(self.threshold, self.threshold + self.modulus):
            if self.contains(k):
                return k
        return None

    def check_closed(self) -> None:
        """Raise ValueError unless the set is closed under positive multiples."""
        for k in self.members:
            for m in range(2 * k, self.threshold, k):
                if m not in self.members:
                    raise ValueError(f"{m} is a multiple of period {k} but not a period")
            for m in range(1, self.modulus + 1):
                j = m * k
                while j < self.threshold:
                    j += k * self.modulus
                if not self.contains(j):
                    raise ValueError(f"{j} is a multiple of period {k} but not a period")
        for r in self.residues:
            for m in range(1, self.modulus + 1):
                if m * r % self.modulus not in self.residues:
                    raise ValueError(f"residue {r} is not closed under multiples")

    def is_multiples_of(self, m: int) -> bool:
        if any((k % m == 0) != (k in self.members) for k in range(1, self.threshold)):
            return False
        if self.modulus % m:
            return False
        return self.residues == frozenset(r for r in range(self.modulus) if r % m == 0)


def period_spectrum(spec) -> PeriodSpectrum:
    """Exact spectrum from the strongly connected components.

    A component C with a cycle has period d_C (gcd of its cycle lengths)
    and contains closed walks of every multiple of d_C from d_C * |C|^2 on.
    Everything below the largest such threshold is decided one k at a time.
    """
    g = _graph(spec)
    dg = nx.DiGraph()
    dg.add_nodes_from(range(len(g.vertices)))
    dg.add_edges_from(g.edges())
    periods, thresholds = [], []
    for comp in nx.strongly_connected_components(dg):
        comp = sorted(comp)
        root = comp[0]
        if len(comp) == 1 and root not in g.succ[root]:
            continue
        members = set(comp)
        level = {root: 0}
        q = deque([root])
        d = 0
        while q:
            u = q.popleft()
            for v in g.succ[u]:
                if v not in members:
                    continue
                if v not in level:
                    level[v] = level[u] + 1
                    q.append(v)
                else:
                    d = math.gcd(d, level[u] + 1 - level[v])
        periods.append(d)
        thresholds.append(d * len(comp) ** 2)
    if not periods:
        return PeriodSpectrum()
    D = reduce(lambda a, b: a * b // math.gcd(a, b), periods, 1)
    T = max(thresholds)
    S = frozenset(r for r in range(D) if any(r % d == 0 for d in periods))
    below = set()
    base = g.core()
    cur = base
    for k in range(1, T):
        if bool_trace(cur):
            below.add(k)
        cur = bool_matmul(cur, base)
    return PeriodSpectrum(D, S, T, frozenset(below))


def free_part_z(spec) -> SpectrumComplement:
    """Free(X) as the complement of the period spectrum (generator 1)."""
    g = _graph(spec)
    if is_empty(g).empty:
        raise EmptySft("free parts are defined here for nonempty SFTs only")
    return SpectrumComplement(period_spectrum(g), 1)


def simplify_free_part(desc: SpectrumComplement, G: GroupRef | None = None):
    """Replace a spectrum complement by a plainer descriptor when one fits."""
    G = G or make_group("Z")
    spec = desc.spectrum
    if spec.is_empty:
        return AllNonIdentity()
    m = spec.least()
    if not spec.is_multiples_of(m):
        return desc
    if m == 1:
        return ExplicitList(())
    if m == 2:
        return OddMultiples(desc.generator)
    return ComplementOfSubgroup(SubgroupRef(G, MULTIPLES, modulus=m * desc.generator))


# ---------------------------------------------------------------------------
# text form


def serialize_spectrum(s: PeriodSpectrum) -> str:
    out = [f"D {s.modulus}",
           " ".join(["S"] + [str(r) for r in sorted(s.residues)]),
           f"T {s.threshold}"]
    if s.members:
        out.append(" ".join(["exceptions"] + [str(k) for k in sorted(s.members)]))
    return "\n".join(out) + "\n"


class SpectrumParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


def parse_spectrum(text: str) -> PeriodSpectrum:
    fields: dict[str, tuple[int, list[int]]] = {}
    for no, raw in enumerate(text.splitlines(), 1):
        ln = raw.strip()
        if not ln or ln.startswith("#"):
            continue
        key, *toks = ln.split()
        if key not in ("D", "S", "T", "exceptions"):
            raise SpectrumParseError(f"unknown field {key!r}", no)
        if key in fields:
            raise SpectrumParseError(f"duplicate field {key!r}", no)
        try:
            vals = [int(t) for t in toks]
        except ValueError:
            raise SpectrumParseError(f"non-integer value in {key!r}", no) from None
        if key in ("D", "T") and len(vals) != 1:
            raise SpectrumParseError(f"{key} takes exactly one value", no)
        fields[key] = (no, vals)
    for key in ("D", "S", "T"):
        if key not in fields:
            raise SpectrumParseError(f"missing field {key!r}")
    no_d, (D,) = fields["D"]
    if D < 1:
        raise SpectrumParseError("D must be positive", no_d)
    no_t, (T,) = fields["T"]
    if T < 1:
        raise SpectrumParseError("T must be positive", no_t)
    no_s, S = fields["S"]
    if any(not 0 <= r < D for r in S):
        raise SpectrumParseError("residues must lie in [0, D)", no_s)
    no_e, E = fields.get("exceptions", (None, []))
    if any(not 0 < k < T for k in E):
        raise SpectrumParseError("exceptions must lie in [1, T)", no_e)
    s = PeriodSpectrum(D, frozenset(S), T, frozenset(E))
    try:
        s.check_closed()
    except ValueError as exc:
        raise SpectrumParseError(str(exc)) from None
    return s
