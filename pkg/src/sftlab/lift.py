"""Coset decomposition, free-part transfer and the fixed-point construction.

Given H <= G and an SFT Y on H, the SFT X on G defined by the same local
rule satisfies

    g in Free(X)  <=>  some conjugate t g t^-1 has a positive power in Free(Y).

This module decides the right-hand side (:func:`transfer_free`), and when it
fails builds an explicit x in X with g x = x (:func:`construct_fixed`) from
the permutation that g induces on the cosets of H.
"""

from __future__ import annotations

import enum
import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

from . import oracle, zengine
from .groups import (
    AllNonIdentity,
    Answer,
    CosetSystem,
    ExplicitList,
    FINITE,
    GroupError,
    GroupRef,
    INT_LINE,
    LATTICE,
    MULTIPLES,
    RAT_LATTICE,
    SubgroupRef,
    TRIVIAL,
    WHOLE,
    coset_system,
    iter_sample,
    root_membership,
)
from .sft import (
    EmptySft,
    PeriodicConfig,
    SftSpec,
    WindowConfig,
    Z,
    check_config,
)


class HypothesisViolated(ValueError):
    """g is free, so no configuration fixed by g exists."""


class NoFixedPointFound(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# coset decomposition


def coset_restrictions(G: GroupRef, H: SubgroupRef, cosets: CosetSystem | None, x) -> dict:
    """y_i(h) = x(rep(i) h) for every coset index i and h in H where x is known.

    ``x`` is a tuple indexed by elements (finite G) or a WindowConfig on Z.
    """
    cosets = cosets or coset_system(G, H)
    if G.is_finite:
        if len(x) != len(G.table):
            raise ValueError("configuration does not cover the group")
        return {i: {h: x[G.mul(cosets.rep(i), h)] for h in H.elements()}
                for i in cosets.indices()}
    if G.family != INT_LINE or not isinstance(x, WindowConfig) or x.family != Z:
        raise ValueError("coset restrictions need a finite group or a window on Z")
    out: dict = {}
    for a in x.positions():
        i, h = cosets.decompose(a)
        out.setdefault(i, {})[h] = x.value(a)
    return out


def _z_modulus(H: SubgroupRef) -> int:
    """m with H = mZ, for the subgroups of Z."""
    if H.kind == MULTIPLES:
        return H.modulus
    return 1 if H.kind == WHOLE else 0


def restriction_window(G: GroupRef, H: SubgroupRef, x: WindowConfig, i: int) -> WindowConfig:
    """Coset restriction on Z written in H's own coordinate (h = m * s)."""
    m = _z_modulus(H)
    cosets = coset_system(G, H)
    pos = [a for a in x.positions() if cosets.index(a) == i]
    if m == 0:
        return WindowConfig(0, (x.value(i),))
    return WindowConfig((pos[0] - i) // m, tuple(x.value(a) for a in pos))


@dataclass
class Prop1Result:
    ok: bool
    checked: int = 0
    x_count: int = 0
    y_count: int = 0
    counterexample: tuple | None = None


def check_prop1(G: GroupRef, H: SubgroupRef, spec: SftSpec,
                budget: int = oracle.DEFAULT_BUDGET) -> Prop1Result:
    """Exhaustively confirm: x in X iff every coset restriction of x lies in Y."""
    if not G.is_finite:
        raise ValueError("check_prop1 needs a finite group")
    HG, emb = H.as_group()
    spec_h = oracle.restrict_spec(spec, emb)
    X = oracle.enumerate_universe(G, spec, budget)
    Y = oracle.enumerate_universe(HG, spec_h, budget)
    cosets = coset_system(G, H)
    checked = 0
    for x in itertools.product(spec.alphabet, repeat=len(G.table)):
        checked += 1
        ys = coset_restrictions(G, H, cosets, x)
        all_in_y = all(tuple(y[h] for h in emb) in Y for y in ys.values())
        if (x in X) != all_in_y:
            return Prop1Result(False, checked, len(X), len(Y), x)
    return Prop1Result(True, checked, len(X), len(Y))


# ---------------------------------------------------------------------------
# free-part transfer


class Verdict(enum.Enum):
    FREE = "Free"
    NOT_FREE = "NotFree"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class TransferVerdict:
    element: object
    answer: Verdict
    conjugator: object = None
    exponent: int | None = None
    hit: object = None
    reason: str = ""

    @property
    def is_free(self) -> bool:
        return self.answer is Verdict.FREE

    def verify(self, G: GroupRef, H: SubgroupRef, freeY) -> bool:
        if self.answer is not Verdict.FREE:
            return True
        p = G.power(G.conj(self.conjugator, self.element), self.exponent)
        return p == self.hit and H.contains(p) and freeY.contains(G, p)


def transfer_free(G: GroupRef, H: SubgroupRef, freeY, g, n_bound: int = 10**6) -> TransferVerdict:
    """Decide whether Cl(g) meets the roots of Free(Y) (freeY read inside H)."""
    G.check(g)
    if H.parent != G:
        raise GroupError("subgroup belongs to another group")
    if G.is_identity(g):
        return TransferVerdict(g, Verdict.NOT_FREE, reason="the identity fixes every point")
    if G.is_finite:
        seen = set()
        for t in G.elements():
            c = G.conj(t, g)
            if c in seen:
                continue
            seen.add(c)
            r = root_membership(G, freeY, c, n_bound, within=H)
            if r.answer is Answer.YES:
                return TransferVerdict(g, Verdict.FREE, t, r.n, r.power, r.reason)
        return TransferVerdict(g, Verdict.NOT_FREE, reason=(
            f"none of the {len(seen)} conjugates has a power in Free(Y)"))
    r = root_membership(G, freeY, g, n_bound, within=H)
    if r.answer is Answer.YES:
        return TransferVerdict(g, Verdict.FREE, G.identity(), r.n, r.power, r.reason)
    if r.answer is Answer.NO:
        return TransferVerdict(g, Verdict.NOT_FREE, reason=r.reason)
    return TransferVerdict(g, Verdict.UNKNOWN, reason=r.reason)


def free_part_on_subgroup(G: GroupRef, H: SubgroupRef, spec: SftSpec):
    """Free(Y) for the SFT the spec defines on H, as a descriptor in G's coordinates.

    Finite H: exhaustive enumeration.  H = mZ inside Z: the spec is read in
    H's own coordinate (s <-> m s) and analysed by the transition graph.
    """
    if G.is_finite:
        HG, emb = H.as_group()
        Y = oracle.enumerate_universe(HG, oracle.restrict_spec(spec, emb))
        return ExplicitList(emb[h] for h in oracle.free_part_finite(Y))
    if G.family == INT_LINE and H.kind in (MULTIPLES, WHOLE, TRIVIAL):
        m = _z_modulus(H)
        if spec.family != Z:
            raise ValueError("a subgroup of Z needs a spec on Z")
        if m == 0:
            if spec.support != (0,):
                raise ValueError("the trivial subgroup only supports the support {0}")
            if not spec.allowed:
                raise EmptySft("the SFT is empty")
            return ExplicitList(())
        desc = zengine.free_part_z(spec)
        desc = type(desc)(desc.spectrum, m)
        return zengine.simplify_free_part(desc, G)
    raise GroupError(f"no free-part engine for {H} <= {G}")


# ---------------------------------------------------------------------------
# orbit decomposition


def _lcm(a, b):
    return a * b // math.gcd(a, b)


@dataclass
class OrbitDecomposition:
    group: GroupRef
    subgroup: SubgroupRef
    element: object
    cosets: CosetSystem
    indices: list | None                       # None: infinite index set
    phi: dict = field(default_factory=dict)
    reps: list = field(default_factory=list)   # least index of each orbit
    sizes: dict = field(default_factory=dict)  # j -> size, None for infinite orbits
    where: dict = field(default_factory=dict)  # i -> (j, m) with i = phi^m(j)
    h: dict = field(default_factory=dict)      # (m, j) -> h_{m,j}

    def phi_of(self, i):
        G = self.group
        return self.cosets.index(G.mul(self.element, self.cosets.rep(i)))

    def phi_power(self, j, m: int):
        if self.indices is None:
            return self._z_shift(j, m)
        i = j
        if m >= 0:
            for _ in range(m):
                i = self.phi[i]
        else:
            inverse = {v: k for k, v in self.phi.items()}
            for _ in range(-m):
                i = inverse[i]
        return i

    def _z_shift(self, i, m):
        # trivial subgroup of Z: cosets are single integers, phi(i) = i + g
        return i + m * self.element

    def locate(self, i) -> tuple:
        """(j, m, size) with i = phi^m(j); size is None for infinite orbits."""
        if self.indices is not None:
            j, m = self.where[i]
            return j, m, self.sizes[j]
        g = self.element
        if g == 0:
            return i, 0, 1
        j = i % abs(g)
        return j, (i - j) // g, None

    def h_of(self, m: int, j):
        """h_{m,j} = rep(phi^m(j))^-1 g^m rep(j)."""
        G, C = self.group, self.cosets
        return G.mul(G.inv(C.rep(self.phi_power(j, m))), G.mul(G.power(self.element, m), C.rep(j)))

    def verify(self) -> None:
        """Re-check the defining identities on everything materialized."""
        G, H, C, g = self.group, self.subgroup, self.cosets, self.element
        if self.indices is not None:
            if sorted(map(_key, self.phi.values())) != sorted(map(_key, self.indices)):
                raise AssertionError("phi is not a bijection on the index set")
            for i in self.indices:
                step = G.mul(G.inv(C.rep(self.phi[i])), G.mul(g, C.rep(i)))
                if not H.contains(step):
                    raise AssertionError(f"g rep({i}) is not in rep(phi({i})) H")
        for (m, j), hm in self.h.items():
            if not H.contains(hm):
                raise AssertionError(f"h_({m},{j}) is not in H")
            nxt = self.h.get((m + 1, j))
            if nxt is not None:
                a, b = self.phi_power(j, m + 1), self.phi_power(j, m)
                step = G.mul(G.inv(C.rep(a)), G.mul(g, C.rep(b)))
                if G.mul(step, hm) != nxt:
                    raise AssertionError(f"cocycle identity fails at ({m},{j})")


def _key(i):
    return (0, i) if isinstance(i, int) else (1, tuple(i))


def orbit_decomposition(G: GroupRef, H: SubgroupRef, g, cosets: CosetSystem | None = None,
                        range_: int | None = None, level: int | None = None) -> OrbitDecomposition:
    """The permutation phi of coset indices induced by g, its orbits and h_{m,j}.

    Q^d cosets of Z^d are materialized at a denominator level N (all
    representatives with denominators dividing N); g must live on that level.
    The trivial subgroup of Z keeps its infinite index set symbolic.
    """
    G.check(g)
    cosets = cosets or coset_system(G, H)
    if G.family == RAT_LATTICE and H.kind == LATTICE:
        need = reduce(_lcm, (Fraction(c).denominator for c in g), 1)
        level = level or need
        if level % need:
            raise GroupError(f"g has denominators not dividing the level {level}")
        indices = cosets.indices(level)
    elif cosets.is_finite:
        indices = cosets.indices()
    elif G.family == INT_LINE and H.is_trivial:
        indices = None
    else:
        raise GroupError(f"index set of {H} in {G} cannot be materialized")

    dec = OrbitDecomposition(G, H, g, cosets, indices)
    if indices is not None:
        indices = sorted(indices, key=_key)
        dec.indices = indices
        dec.phi = {i: dec.phi_of(i) for i in indices}
        for i in indices:
            if i in dec.where:
                continue
            dec.reps.append(i)
            k, cur = 0, i
            while True:
                dec.where[cur] = (i, k)
                cur = dec.phi[cur]
                k += 1
                if cur == i:
                    break
            dec.sizes[i] = k
        top = range_ if range_ is not None else max(dec.sizes.values()) + 1
        for j in dec.reps:
            for m in range(top):
                dec.h[(m, j)] = dec.h_of(m, j)
    else:
        n = abs(g) if g != 0 else 1
        dec.reps = list(range(n)) if g != 0 else []
        dec.sizes = {j: (None if g != 0 else 1) for j in dec.reps}
        top = range_ if range_ is not None else 2
        for j in dec.reps:
            for m in range(top):
                dec.h[(m, j)] = dec.h_of(m, j)
    dec.verify()
    return dec


# ---------------------------------------------------------------------------
# the fixed-point construction


@dataclass
class Construction:
    """An explicit configuration x with g x = x, plus the data that built it.

    ``x`` is a tuple indexed by elements (finite G) or a WindowConfig (Z).
    """

    group: GroupRef
    subgroup: SubgroupRef
    element: object
    decomposition: OrbitDecomposition
    chosen: dict                      # orbit rep j -> y_j
    x: object = None
    case: dict = field(default_factory=dict)   # j -> "infinite" | "finite"
    _pos: dict | None = field(default=None, repr=False)

    def value(self, a, turns: int = 0):
        """x(a), computed through h_{m + turns * n_j, j} instead of h_{m,j}."""
        G, dec = self.group, self.decomposition
        i, s = dec.cosets.decompose(a)
        j, m, size = dec.locate(i)
        if size is not None:
            m += turns * size
        hm = dec.h_of(m, j)
        inner = G.mul(G.inv(hm), s)            # h_{m,j}^-1 s, an element of H
        y = self.chosen[j]
        if G.is_finite:
            if self._pos is None:
                self._pos = {e: k for k, e in enumerate(self.subgroup.elements())}
            return y[self._pos[inner]]
        m_h = _z_modulus(self.subgroup)
        return y.value(inner // m_h if m_h else 0)


def _fixed_periodic_point(spec: SftSpec, shift: int, y_star: PeriodicConfig) -> PeriodicConfig | None:
    if shift == 0:
        return y_star
    return zengine.least_periodic_word(spec, abs(shift))


def construct_fixed(spec: SftSpec, G: GroupRef, H: SubgroupRef, g,
                    decomposition: OrbitDecomposition | None = None,
                    y_star: PeriodicConfig | None = None,
                    window: tuple[int, int] = (-20, 20),
                    freeY=None) -> Construction:
    """Build x in X with g x = x, orbit by orbit.

    Infinite orbits carry the fixed point y_star of Y; a finite orbit of
    size n carries some y_j in Y fixed by h_{n,j}, found by enumeration on
    finite H or among the periodic points of Y when H = mZ.  Both required
    properties (coset restrictions in Y, g x = x) are re-checked before
    returning.
    """
    if freeY is None:
        freeY = free_part_on_subgroup(G, H, spec)
    verdict = transfer_free(G, H, freeY, g)
    if verdict.answer is Verdict.FREE:
        raise HypothesisViolated(
            f"{G.format_element(g)} is free: (t g t^-1)^{verdict.exponent} = "
            f"{G.format_element(verdict.hit)} lies in Free(Y)")
    if verdict.answer is Verdict.UNKNOWN:
        raise HypothesisViolated(f"could not establish that g is not free: {verdict.reason}")
    dec = decomposition or orbit_decomposition(G, H, g)

    if G.is_finite:
        return _construct_finite(spec, G, H, g, dec)
    if G.family == INT_LINE and H.kind in (MULTIPLES, WHOLE, TRIVIAL):
        return _construct_z(spec, G, H, g, dec, y_star, window)
    raise GroupError("construct_fixed supports finite groups and subgroups of Z")


def _construct_finite(spec, G, H, g, dec) -> Construction:
    HG, emb = H.as_group()
    pos = {e: k for k, e in enumerate(emb)}
    Y = oracle.enumerate_universe(HG, oracle.restrict_spec(spec, emb))
    if not Y.configs:
        raise EmptySft("Y is empty")
    chosen = {}
    for j in dec.reps:
        hn = pos[dec.h_of(dec.sizes[j], j)]
        y = next((y for y in Y.configs if oracle.act(HG, hn, y) == y), None)
        if y is None:
            raise NoFixedPointFound(f"no point of Y is fixed by h_({dec.sizes[j]},{j})")
        chosen[j] = y
    con = Construction(G, H, g, dec, chosen, case={j: "finite" for j in dec.reps})
    x = tuple(con.value(a) for a in G.elements())
    con.x = x
    if oracle.act(G, g, x) != x:
        raise AssertionError("constructed x is not fixed by g")
    if not oracle.is_member(G, spec, x):
        raise AssertionError("constructed x violates the local rule")
    for y in coset_restrictions(G, H, dec.cosets, x).values():
        if tuple(y[h] for h in emb) not in Y:
            raise AssertionError("a coset restriction is not in Y")
    return con


def _construct_z(spec, G, H, g, dec, y_star, window) -> Construction:
    m = _z_modulus(H)
    if spec.family != Z:
        raise ValueError("a subgroup of Z needs a spec on Z")
    if m == 0 and spec.support != (0,):
        raise ValueError("the support must lie in the trivial subgroup")
    if y_star is None:
        y_star = zengine.no_sa_witness(spec)
    elif not check_config(spec, y_star).valid:
        raise ValueError("y_star is not a point of Y")
    lo, hi = window
    if hi < lo:
        raise ValueError("empty window")

    chosen, case = {}, {}
    for j in sorted({dec.locate(dec.cosets.index(a))[0] for a in range(lo, hi + 1)}):
        _, _, size = dec.locate(j)
        if size is None:
            chosen[j], case[j] = y_star, "infinite"
            continue
        hn = dec.h_of(size, j)
        y = _fixed_periodic_point(spec, hn // m if m else 0, y_star)
        if y is None:
            raise NoFixedPointFound(f"Y has no point of period {hn // m}")
        chosen[j], case[j] = y, "finite"
    con = Construction(G, H, g, dec, chosen, case=case)
    x = WindowConfig(lo, tuple(con.value(a) for a in range(lo, hi + 1)))
    con.x = x

    for a in range(lo, hi + 1):
        if lo <= a - g <= hi and x.value(a - g) != x.value(a):
            raise AssertionError(f"g x differs from x at {a}")
    for i in sorted(coset_restrictions(G, H, dec.cosets, x)):
        y = restriction_window(G, H, x, i)
        if not check_config(spec, y).valid:
            raise AssertionError(f"coset restriction {i} violates the local rule")
    return con


# ---------------------------------------------------------------------------
# certification


@dataclass
class CertifyReport:
    verdict: str                       # "SA-certified", "not-SA" or "unknown"
    method: str
    free_part: frozenset | None = None
    failures: list = field(default_factory=list)
    samples: list = field(default_factory=list)   # TransferVerdict per sampled g

    def lines(self, G: GroupRef) -> list[str]:
        out = [f"verdict: {self.verdict}", f"method: {self.method}"]
        if self.free_part is not None:
            out.append("free: " + " ".join(G.format_element(e)
                                            for e in sorted(self.free_part, key=_key)))
        if self.samples:
            tally = {a: sum(v.answer is a for v in self.samples) for a in Verdict}
            out.append("samples: " + " ".join(f"{a.value}={n}" for a, n in tally.items()))
        for v in self.failures:
            out.append(f"failure {G.format_element(v.element)}: {v.answer.value} ({v.reason})")
        return out


def default_samples(G: GroupRef, seed: int = 0, count: int = 64):
    rng = random.Random(seed)
    if G.family == INT_LINE:
        small = [k for n in range(1, count + 1) for k in (n, -n)]
        return small + list(iter_sample(G, rng, count, radius=10**6))
    return list(iter_sample(G, rng, count))


def certify_sa(G: GroupRef, H: SubgroupRef, freeY, samples=None, seed: int = 0) -> CertifyReport:
    """Decide, prove or sample the condition that every g != 1 is free.

    With ``freeY = AllNonIdentity()`` (H carries a strongly aperiodic SFT)
    the condition reads: every nontrivial conjugacy class has a root in H
    minus the identity.
    """
    if G.is_finite:
        verdicts = [transfer_free(G, H, freeY, g) for g in G.elements() if not G.is_identity(g)]
        free = frozenset(v.element for v in verdicts if v.is_free)
        failures = [v for v in verdicts if not v.is_free]
        return CertifyReport("SA-certified" if not failures else "not-SA", "exhaustive",
                             free, failures)

    if samples is None:
        samples = default_samples(G, seed)
    verdicts = [transfer_free(G, H, freeY, g) for g in samples]
    for v in verdicts:
        if not v.verify(G, H, freeY):
            raise AssertionError(f"evidence for {v.element} does not re-verify")

    if G.family == RAT_LATTICE and H.kind == LATTICE and isinstance(freeY, AllNonIdentity):
        bad = [v for v in verdicts if v.is_free == G.is_identity(v.element)]
        if bad:
            raise AssertionError("spot check contradicts the lattice argument")
        return CertifyReport("SA-certified",
                             "structural: each nonzero q has a nonzero multiple in Z^d",
                             samples=verdicts)

    nontrivial = [v for v in verdicts if not G.is_identity(v.element)]
    failures = [v for v in nontrivial if v.answer is Verdict.NOT_FREE]
    if failures:
        return CertifyReport("not-SA", "counterexample among samples",
                             samples=nontrivial, failures=failures[:1])
    unknown = [v for v in nontrivial if v.answer is Verdict.UNKNOWN]
    return CertifyReport("unknown", "sampled" + (" (some samples undecided)" if unknown else ""),
                         samples=nontrivial, failures=unknown)
