"""Exact arithmetic for the supported group families.

Families and their element representations:

    Z        (IntLine)       int
    Z^d      (IntLattice)    tuple of int
    Q^d      (RatLattice)    tuple of Fraction (always reduced, denominator > 0)
    finite   (FiniteTable)   int index into a Cayley table

Everything here is an immutable value; no floating point is used anywhere.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Iterator, Sequence

INT_LINE = "Z"
INT_LATTICE = "Zd"
RAT_LATTICE = "Qd"
FINITE = "finite"


class GroupError(ValueError):
    """Raised for malformed group descriptions."""


class NonAssociative(GroupError):
    def __init__(self, a: int, b: int, c: int):
        super().__init__(f"table is not associative at ({a}, {b}, {c})")
        self.indices = (a, b, c)


class NoIdentity(GroupError):
    pass


class NoInverse(GroupError):
    def __init__(self, index: int):
        super().__init__(f"element {index} has no inverse")
        self.indices = (index,)


class FamilyMismatch(ValueError):
    """An element, subgroup or descriptor does not belong to the group's family."""


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b) if a and b else 0


@dataclass(frozen=True)
class GroupRef:
    family: str
    dim: int = 1
    names: tuple[str, ...] = ()
    table: tuple[tuple[int, ...], ...] = ()
    identity_index: int = 0
    _inverses: tuple[int, ...] = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        if self.family not in (INT_LINE, INT_LATTICE, RAT_LATTICE, FINITE):
            raise GroupError(f"unknown family {self.family!r}")
        if self.dim < 1:
            raise GroupError("lattice dimension must be >= 1")
        if self.family == FINITE:
            _validate_table(self.table, self.identity_index)
            n = len(self.table)
            inv = [0] * n
            for a in range(n):
                inv[a] = self.table[a].index(self.identity_index)
            object.__setattr__(self, "_inverses", tuple(inv))
            if not self.names:
                object.__setattr__(self, "names", tuple(str(i) for i in range(n)))

    # -- basic structure ---------------------------------------------------

    @property
    def is_finite(self) -> bool:
        return self.family == FINITE

    @property
    def is_abelian(self) -> bool:
        if self.family != FINITE:
            return True
        n = len(self.table)
        return all(self.table[a][b] == self.table[b][a] for a in range(n) for b in range(a))

    @property
    def order(self) -> int | None:
        return len(self.table) if self.family == FINITE else None

    def __str__(self) -> str:
        if self.family == INT_LINE:
            return "Z"
        if self.family == INT_LATTICE:
            return f"Z{self.dim}"
        if self.family == RAT_LATTICE:
            return f"Q{self.dim}"
        return f"Finite({len(self.table)})"

    def elements(self) -> range:
        if self.family != FINITE:
            raise GroupError(f"{self} is infinite")
        return range(len(self.table))

    def identity(self):
        if self.family == INT_LINE:
            return 0
        if self.family == INT_LATTICE:
            return (0,) * self.dim
        if self.family == RAT_LATTICE:
            return (Fraction(0),) * self.dim
        return self.identity_index

    def is_identity(self, g) -> bool:
        return g == self.identity()

    def contains(self, g) -> bool:
        if self.family == INT_LINE:
            return isinstance(g, int) and not isinstance(g, bool)
        if self.family == INT_LATTICE:
            return (isinstance(g, tuple) and len(g) == self.dim
                    and all(isinstance(c, int) and not isinstance(c, bool) for c in g))
        if self.family == RAT_LATTICE:
            return (isinstance(g, tuple) and len(g) == self.dim
                    and all(isinstance(c, Fraction) for c in g))
        return isinstance(g, int) and 0 <= g < len(self.table)

    def check(self, g) -> None:
        if not self.contains(g):
            raise FamilyMismatch(f"{g!r} is not an element of {self}")

    # -- arithmetic ----------------------------------------------------------

    def mul(self, a, b):
        if self.family == INT_LINE:
            return a + b
        if self.family == FINITE:
            return self.table[a][b]
        return tuple(x + y for x, y in zip(a, b))

    def inv(self, a):
        if self.family == INT_LINE:
            return -a
        if self.family == FINITE:
            return self._inverses[a]
        return tuple(-x for x in a)

    def power(self, g, n: int):
        if self.family == INT_LINE:
            return n * g
        if self.family != FINITE:
            return tuple(n * x for x in g)
        if n < 0:
            g, n = self._inverses[g], -n
        result = self.identity_index
        base = g
        while n:
            if n & 1:
                result = self.table[result][base]
            base = self.table[base][base]
            n >>= 1
        return result

    def conj(self, t, g):
        """Return t g t^-1."""
        return self.mul(self.mul(t, g), self.inv(t))

    def element_order(self, g) -> int:
        """Order of g; 0 for elements of infinite order."""
        if self.family != FINITE:
            return 1 if self.is_identity(g) else 0
        k, x = 1, g
        while x != self.identity_index:
            x = self.table[x][g]
            k += 1
        return k

    # -- text ----------------------------------------------------------------

    def format_element(self, g) -> str:
        if self.family == INT_LINE:
            return str(g)
        if self.family == FINITE:
            return self.names[g]
        return ",".join(str(c) for c in g)

    def parse_element(self, text: str, max_denominator: int | None = None):
        text = text.strip()
        try:
            if self.family == INT_LINE:
                return int(text)
            if self.family == FINITE:
                if text in self.names:
                    return self.names.index(text)
                g = int(text)
                self.check(g)
                return g
            parts = [p for p in text.split(",")]
            if len(parts) != self.dim:
                raise GroupError(f"expected {self.dim} coordinates, got {text!r}")
            if self.family == INT_LATTICE:
                return tuple(int(p) for p in parts)
            coords = tuple(Fraction(p.strip()) for p in parts)
        except (ValueError, ZeroDivisionError, FamilyMismatch) as exc:
            if isinstance(exc, GroupError):
                raise
            raise GroupError(f"cannot parse element {text!r} of {self}") from exc
        if max_denominator is not None:
            for c in coords:
                if c.denominator > max_denominator:
                    raise GroupError(
                        f"denominator {c.denominator} exceeds cap {max_denominator}")
        return coords


def _validate_table(table: Sequence[Sequence[int]], identity: int) -> None:
    n = len(table)
    if n == 0:
        raise GroupError("empty Cayley table")
    for row in table:
        if len(row) != n:
            raise GroupError("Cayley table is not square")
        for v in row:
            if not 0 <= v < n:
                raise GroupError(f"table entry {v} out of range")
    if not (0 <= identity < n):
        raise NoIdentity("identity index out of range")
    if any(table[identity][a] != a or table[a][identity] != a for a in range(n)):
        raise NoIdentity(f"element {identity} is not a two-sided identity")
    for a in range(n):
        if identity not in table[a]:
            raise NoInverse(a)
        b = table[a].index(identity)
        if table[b][a] != identity:
            raise NoInverse(a)
    for a in range(n):
        ra = table[a]
        for b in range(n):
            ab = ra[b]
            rb = table[b]
            for c in range(n):
                if table[ab][c] != ra[rb[c]]:
                    raise NonAssociative(a, b, c)


def _find_identity(table: Sequence[Sequence[int]]) -> int:
    n = len(table)
    for e in range(n):
        if list(table[e]) == list(range(n)):
            return e
    raise NoIdentity("no row equals the header order 0..n-1")


def finite_group(table: Sequence[Sequence[int]], names: Sequence[str] | None = None) -> GroupRef:
    """Validated finite group from a Cayley table (row g, column h -> g*h)."""
    table = tuple(tuple(int(v) for v in row) for row in table)
    if not table:
        raise GroupError("empty Cayley table")
    for row in table:
        if len(row) != len(table):
            raise GroupError("Cayley table is not square")
    e = _find_identity(table)
    names = tuple(names) if names else ()
    if names and (len(names) != len(table) or len(set(names)) != len(names)):
        raise GroupError("names must be distinct and match the order")
    return GroupRef(FINITE, names=names, table=table, identity_index=e)


def cyclic_group(n: int) -> GroupRef:
    return finite_group([[(a + b) % n for b in range(n)] for a in range(n)])


_LATTICE_RE = re.compile(r"^\s*([ZQ])\s*(\d*)\s*$")


def make_group(description) -> GroupRef:
    """Build a group from ``"Z"``, ``"Z 2"``/``"Z2"``, ``"Q 2"``/``"Q2"``,
    a Cayley table (list of rows) or the text of a ``.grp`` file."""
    if isinstance(description, GroupRef):
        return description
    if isinstance(description, (list, tuple)):
        return finite_group(description)
    text = str(description)
    m = _LATTICE_RE.match(text)
    if m:
        letter, d = m.group(1), int(m.group(2) or 1)
        if d < 1:
            raise GroupError("lattice dimension must be >= 1")
        if letter == "Z":
            return GroupRef(INT_LINE) if d == 1 else GroupRef(INT_LATTICE, dim=d)
        return GroupRef(RAT_LATTICE, dim=d)
    return parse_grp(text)


def parse_grp(text: str) -> GroupRef:
    """Parse the line-oriented ``.grp`` Cayley table format.

    Blank lines and ``#`` comments are skipped.  An optional trailing
    ``subgroup`` line is ignored here; see :func:`parse_grp_subgroup`.
    """
    lines = [(no, ln.split()) for no, ln in enumerate(text.splitlines(), 1)
             if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or lines[0][1][0] != "order" or len(lines[0][1]) != 2:
        raise GroupError("line 1: expected 'order n'")
    try:
        n = int(lines[0][1][1])
    except ValueError:
        raise GroupError(f"line {lines[0][0]}: bad order") from None
    if n < 1:
        raise GroupError(f"line {lines[0][0]}: order must be positive")
    if len(lines) < 2 or lines[1][1][0] != "names" or len(lines[1][1]) != n + 1:
        raise GroupError("line 2: expected 'names' followed by n names")
    names = lines[1][1][1:]
    rows = []
    for no, toks in lines[2:2 + n]:
        if toks[0] == "subgroup":
            raise GroupError(f"line {no}: table has fewer than {n} rows")
        try:
            rows.append([int(t) for t in toks])
        except ValueError:
            raise GroupError(f"line {no}: non-integer table entry") from None
    if len(rows) != n:
        raise GroupError(f"expected {n} table rows, got {len(rows)}")
    return finite_group(rows, names)


def parse_grp_subgroup(text: str) -> tuple[int, ...] | None:
    for ln in text.splitlines():
        toks = ln.split()
        if toks and toks[0] == "subgroup":
            return tuple(int(t) for t in toks[1:])
    return None


def render_grp(G: GroupRef) -> str:
    if not G.is_finite:
        raise GroupError("only finite groups have a .grp form")
    out = [f"order {len(G.table)}", "names " + " ".join(G.names)]
    out += [" ".join(str(v) for v in row) for row in G.table]
    return "\n".join(out) + "\n"


def conjugacy_class(G: GroupRef, g) -> frozenset:
    """Cl(g) = {t g t^-1 : t in G}."""
    G.check(g)
    if G.family != FINITE:
        return frozenset([g])
    return frozenset(G.conj(t, g) for t in G.elements())


# ---------------------------------------------------------------------------
# subgroups and cosets


MULTIPLES = "multiples"      # mZ inside Z; m == 0 is the trivial subgroup
LATTICE = "lattice"          # Z^d inside Q^d (or Z^d itself)
ELEMENTS = "elements"        # explicit subset of a finite group
WHOLE = "whole"
TRIVIAL = "trivial"


@dataclass(frozen=True)
class SubgroupRef:
    parent: GroupRef
    kind: str
    modulus: int = 0
    members: tuple[int, ...] = ()

    def __post_init__(self):
        G = self.parent
        if self.kind == MULTIPLES:
            if G.family != INT_LINE:
                raise FamilyMismatch("multiples subgroup needs the group Z")
            object.__setattr__(self, "modulus", abs(self.modulus))
        elif self.kind == LATTICE:
            if G.family not in (INT_LATTICE, RAT_LATTICE):
                raise FamilyMismatch("integer lattice subgroup needs Z^d or Q^d")
        elif self.kind == ELEMENTS:
            if not G.is_finite:
                raise FamilyMismatch("explicit subgroups need a finite group")
            members = tuple(sorted(set(self.members)))
            object.__setattr__(self, "members", members)
            _check_closed(G, members)
        elif self.kind not in (WHOLE, TRIVIAL):
            raise GroupError(f"unknown subgroup kind {self.kind!r}")

    def __str__(self) -> str:
        if self.kind == MULTIPLES:
            return f"{self.modulus}Z"
        if self.kind == LATTICE:
            return f"Z{self.parent.dim}" if self.parent.dim > 1 else "Z"
        if self.kind == ELEMENTS:
            return "{" + " ".join(self.parent.format_element(h) for h in self.members) + "}"
        return self.kind

    def contains(self, g) -> bool:
        G = self.parent
        if not G.contains(g):
            return False
        if self.kind == WHOLE:
            return True
        if self.kind == TRIVIAL:
            return G.is_identity(g)
        if self.kind == MULTIPLES:
            return g == 0 if self.modulus == 0 else g % self.modulus == 0
        if self.kind == LATTICE:
            return all(Fraction(c).denominator == 1 for c in g)
        return g in self.members

    def elements(self) -> tuple:
        G = self.parent
        if self.kind == ELEMENTS:
            return self.members
        if self.kind == TRIVIAL or (self.kind == MULTIPLES and self.modulus == 0):
            return (G.identity(),)
        if self.kind == WHOLE and G.is_finite:
            return tuple(G.elements())
        raise GroupError(f"subgroup {self} is infinite")

    @property
    def is_trivial(self) -> bool:
        if self.kind == TRIVIAL:
            return True
        if self.kind == MULTIPLES:
            return self.modulus == 0
        return self.kind == ELEMENTS and len(self.members) == 1

    def multiplier(self, g) -> int:
        """The c >= 0 with {n in Z : g^n in H} = cZ."""
        G = self.parent
        if self.contains(g):
            return 1
        if G.is_finite:
            n, x = 1, g
            while not self.contains(x):
                x = G.mul(x, g)
                n += 1
            return n
        if self.kind in (TRIVIAL, MULTIPLES) and self.is_trivial:
            return 0  # torsion-free and g is not the identity
        if self.kind == MULTIPLES:
            return self.modulus // math.gcd(self.modulus, g)
        if self.kind == LATTICE:
            return reduce(_lcm, (Fraction(c).denominator for c in g), 1)
        raise GroupError(f"no multiplier rule for {self}")

    def as_group(self) -> tuple[GroupRef, tuple[int, ...]]:
        """For a finite subgroup: (H as its own Cayley table, embedding H -> G).

        H's element k corresponds to G's element ``embedding[k]``; the
        embedding is increasing so H inherits G's element order."""
        G = self.parent
        if not G.is_finite:
            raise GroupError("as_group needs a finite parent")
        emb = tuple(self.elements())
        pos = {g: k for k, g in enumerate(emb)}
        table = [[pos[G.mul(a, b)] for b in emb] for a in emb]
        return finite_group(table, [G.names[a] for a in emb]), emb


def _check_closed(G: GroupRef, members: tuple[int, ...]) -> None:
    s = set(members)
    for m in members:
        if not 0 <= m < len(G.table):
            raise GroupError(f"subgroup element {m} out of range")
    if G.identity_index not in s:
        raise GroupError("subset does not contain the identity; not a subgroup")
    for a in members:
        if G.inv(a) not in s:
            raise GroupError(f"subset not closed under inverse at {a}; not a subgroup")
        for b in members:
            if G.mul(a, b) not in s:
                raise GroupError(f"subset not closed under product at ({a}, {b}); not a subgroup")


def subgroup(G: GroupRef, description=None) -> SubgroupRef:
    """Subgroup from a short description.

    None means the default pairing: Z^d inside Q^d, the whole group otherwise.
    ``"mZ"`` or an int m gives mZ inside Z; ``"Z2"`` the integer lattice;
    an iterable of indices or a string of names/indices an explicit finite subgroup.
    """
    if isinstance(description, SubgroupRef):
        return description
    if description is None:
        if G.family == RAT_LATTICE:
            return SubgroupRef(G, LATTICE)
        return SubgroupRef(G, WHOLE)
    if isinstance(description, int):
        return SubgroupRef(G, MULTIPLES, modulus=description)
    if isinstance(description, str):
        text = description.strip()
        if G.family == INT_LINE:
            m = re.fullmatch(r"(-?\d*)\s*Z", text)
            if m:
                return SubgroupRef(G, MULTIPLES, modulus=int(m.group(1) or 1))
            if re.fullmatch(r"-?\d+", text):
                return SubgroupRef(G, MULTIPLES, modulus=int(text))
        elif re.fullmatch(r"-?\d+\s*Z", text):
            raise FamilyMismatch(f"{text} needs the group Z, not {G}")
        if G.family in (INT_LATTICE, RAT_LATTICE) and re.fullmatch(r"Z\s*\d*", text):
            d = int(text[1:] or 1)
            if d != G.dim:
                raise FamilyMismatch(f"Z{d} is not a subgroup of {G}")
            return SubgroupRef(G, LATTICE)
        if text in ("whole", "G"):
            return SubgroupRef(G, WHOLE)
        if text in ("trivial", "1"):
            return SubgroupRef(G, TRIVIAL)
        if G.is_finite:
            return SubgroupRef(G, ELEMENTS, members=tuple(
                G.parse_element(t) for t in text.replace(",", " ").split()))
        raise GroupError(f"cannot read subgroup {description!r} of {G}")
    return SubgroupRef(G, ELEMENTS, members=tuple(description))


@dataclass(frozen=True)
class CosetSystem:
    """Canonical left coset representatives of H in G.

    Coset indices are ints for finite groups and for mZ <= Z (the index is
    the representative); for Z^d <= Q^d the index is the fractional-part
    vector itself.
    """

    subgroup: SubgroupRef
    reps: tuple = ()

    @property
    def group(self) -> GroupRef:
        return self.subgroup.parent

    @property
    def is_finite(self) -> bool:
        H = self.subgroup
        if H.parent.is_finite:
            return True
        if H.kind == MULTIPLES:
            return H.modulus > 0
        return H.kind == WHOLE

    def indices(self, level: int | None = None) -> list:
        """The coset index set; infinite index sets need a denominator level."""
        H, G = self.subgroup, self.group
        if G.is_finite:
            return list(range(len(self.reps)))
        if H.kind == MULTIPLES and H.modulus > 0:
            return list(range(H.modulus))
        if H.kind == WHOLE:
            return [G.identity()]
        if H.kind == LATTICE and level is not None:
            if G.family == INT_LATTICE:
                return [G.identity()]
            ks = [Fraction(k, level) for k in range(level)]
            out = [()]
            for _ in range(G.dim):
                out = [v + (c,) for v in out for c in ks]
            return out
        raise GroupError(f"index set of {H} in {G} is infinite; give a level")

    def rep(self, i):
        G, H = self.group, self.subgroup
        if G.is_finite:
            return self.reps[i]
        if H.kind == WHOLE:
            return G.identity()
        return i

    def decompose(self, g) -> tuple:
        """(i, h) with g = rep(i) * h and h in H."""
        G, H = self.group, self.subgroup
        G.check(g)
        if G.is_finite:
            for i, r in enumerate(self.reps):
                h = G.mul(G.inv(r), g)
                if H.contains(h):
                    return i, h
            raise AssertionError("coset system does not cover the group")
        if H.kind == WHOLE:
            return G.identity(), g
        if H.kind == TRIVIAL or (H.kind == MULTIPLES and H.modulus == 0):
            return g, G.identity()
        if H.kind == MULTIPLES:
            i = g % H.modulus
            return i, g - i
        if H.kind == LATTICE:
            if G.family == INT_LATTICE:
                return G.identity(), g
            whole = tuple(Fraction(math.floor(c)) for c in g)
            return tuple(c - w for c, w in zip(g, whole)), whole
        raise GroupError(f"unsupported pairing {H} <= {G}")

    def index(self, g):
        return self.decompose(g)[0]


def coset_system(G: GroupRef, H: SubgroupRef) -> CosetSystem:
    if H.parent != G:
        raise FamilyMismatch("subgroup belongs to a different group")
    if not G.is_finite:
        if H.kind == ELEMENTS:
            raise GroupError("explicit subgroups need a finite group")
        return CosetSystem(H)
    reps, seen = [], set()
    for g in G.elements():
        if g in seen:
            continue
        reps.append(g)
        seen.update(G.mul(g, h) for h in H.elements())
    return CosetSystem(H, tuple(reps))


# ---------------------------------------------------------------------------
# element set descriptors and roots


def _vec(G: GroupRef, g) -> tuple[Fraction, ...]:
    if G.family == INT_LINE:
        return (Fraction(g),)
    return tuple(Fraction(c) for c in g)


def _unvec(G: GroupRef, v: Sequence[Fraction]):
    if G.family == INT_LINE:
        return int(v[0])
    if G.family == INT_LATTICE:
        return tuple(int(c) for c in v)
    return tuple(v)


def ratio(G: GroupRef, g, h) -> Fraction | None:
    """The c with g = c*h (h nonzero), or None if g is not a rational multiple of h."""
    gv, hv = _vec(G, g), _vec(G, h)
    k = next((i for i, c in enumerate(hv) if c != 0), None)
    if k is None:
        raise ValueError("ratio against the zero element")
    c = gv[k] / hv[k]
    return c if all(a == c * b for a, b in zip(gv, hv)) else None


class AllNonIdentity:
    """G minus the identity (restricted to H when used as a free part on H)."""

    token = "all-nonzero"

    def contains(self, G: GroupRef, g) -> bool:
        return not G.is_identity(g)

    def __eq__(self, other):
        return isinstance(other, AllNonIdentity)

    def __hash__(self):
        return hash(self.token)

    def __repr__(self):
        return "AllNonIdentity()"


@dataclass(frozen=True)
class ExplicitList:
    elements: frozenset

    def __init__(self, elements: Iterable = ()):
        object.__setattr__(self, "elements", frozenset(elements))

    def contains(self, G: GroupRef, g) -> bool:
        return g in self.elements


@dataclass(frozen=True)
class OddMultiples:
    """{(2n+1) * h0 : n in Z} in an abelian family."""

    h0: object

    def contains(self, G: GroupRef, g) -> bool:
        c = ratio(G, g, self.h0)
        return c is not None and c.denominator == 1 and c.numerator % 2 == 1


@dataclass(frozen=True)
class ComplementOfSubgroup:
    subgroup: SubgroupRef

    def contains(self, G: GroupRef, g) -> bool:
        return G.contains(g) and not self.subgroup.contains(g)


@dataclass(frozen=True)
class SpectrumComplement:
    """{k * generator : k != 0 and |k| not a period} for a Z-SFT free part.

    ``spectrum`` is any object with ``contains(k)`` that is closed under
    positive multiples (see :class:`sftlab.zengine.PeriodSpectrum`)."""

    spectrum: object
    generator: object = 1

    def contains(self, G: GroupRef, g) -> bool:
        c = ratio(G, g, self.generator)
        if c is None or c.denominator != 1 or c == 0:
            return False
        return not self.spectrum.contains(abs(c.numerator))


class Answer(enum.Enum):
    YES = "Yes"
    NO = "No"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class RootAnswer:
    answer: Answer
    n: int | None = None
    power: object = None
    reason: str = ""

    def __bool__(self):
        return self.answer is Answer.YES


def _member(G, M, within, g) -> bool:
    return M.contains(G, g) and (within is None or within.contains(g))


def _yes(G, M, within, g, n, reason) -> RootAnswer:
    p = G.power(g, n)
    # every structural Yes is re-checked by a plain membership query
    assert _member(G, M, within, p), (M, g, n)
    return RootAnswer(Answer.YES, n, p, reason)


def root_membership(G: GroupRef, M, g, n_bound: int = 10**6,
                    within: SubgroupRef | None = None) -> RootAnswer:
    """Decide whether some g^n (n > 0) lies in M (intersected with ``within``).

    Finite groups are decided exactly by cycling through the powers of g.
    On the abelian families each descriptor kind carries an exact rule, so
    the answer is Yes with the least witness or No with a reason; Unknown
    only comes out of the bounded fallback scan.
    """
    G.check(g)
    if within is not None and within.parent != G:
        raise FamilyMismatch("'within' subgroup belongs to another group")
    if isinstance(M, ExplicitList):
        for e in M.elements:
            G.check(e)
    elif isinstance(M, OddMultiples) or isinstance(M, SpectrumComplement):
        h0 = M.h0 if isinstance(M, OddMultiples) else M.generator
        if G.is_finite:
            raise FamilyMismatch("multiples descriptors need an abelian lattice family")
        G.check(h0)
        if G.is_identity(h0):
            raise ValueError("descriptor generator must be nonzero")
    elif isinstance(M, ComplementOfSubgroup) and M.subgroup.parent != G:
        raise FamilyMismatch("descriptor subgroup belongs to another group")

    if G.is_finite:
        x, n = g, 1
        while True:
            if _member(G, M, within, x):
                return _yes(G, M, within, g, n, "power found")
            if x == G.identity_index:
                return RootAnswer(Answer.NO, reason=f"all powers up to the order {n} checked")
            x = G.mul(x, g)
            n += 1

    W = within if within is not None else SubgroupRef(G, WHOLE)
    if G.is_identity(g):
        if _member(G, M, within, g):
            return RootAnswer(Answer.YES, 1, g, "identity is in the set")
        return RootAnswer(Answer.NO, reason="every power of the identity is the identity")

    try:
        return _abelian_roots(G, M, g, W, within)
    except GroupError:
        pass
    for n in range(1, n_bound + 1):
        if _member(G, M, within, G.power(g, n)):
            return _yes(G, M, within, g, n, "bounded scan")
    return RootAnswer(Answer.UNKNOWN, reason=f"no power up to {n_bound} found")


def _abelian_roots(G, M, g, W, within) -> RootAnswer:
    if isinstance(M, AllNonIdentity):
        M2 = ComplementOfSubgroup(SubgroupRef(G, TRIVIAL))
        r = _abelian_roots(G, M2, g, W, within)
        if r:
            return _yes(G, M, within, g, r.n, r.reason)
        return r

    if isinstance(M, ComplementOfSubgroup):
        a = W.multiplier(g)
        b = M.subgroup.multiplier(g)
        if a == 0:
            return RootAnswer(Answer.NO, reason=f"no nonzero multiple lies in {W}")
        if b == 0 or a % b:
            return _yes(G, M, within, g, a, "least multiple landing in the subgroup")
        return RootAnswer(Answer.NO, reason=f"every multiple in {W} also lies in {M.subgroup}")

    if isinstance(M, OddMultiples):
        c = ratio(G, g, M.h0)
        if c is None:
            return RootAnswer(Answer.NO, reason="not parallel to the generator")
        if c.numerator % 2 == 0:
            return RootAnswer(Answer.NO, reason=(
                "2-adic valuation: every multiple n*g is an even multiple of h0"))
        w = W.multiplier(G.power(M.h0, c.numerator))
        if w == 0 or w % 2 == 0:
            return RootAnswer(Answer.NO, reason="odd multiples of h0 never meet the subgroup")
        return _yes(G, M, within, g, c.denominator * w, "odd multiple of h0")

    if isinstance(M, SpectrumComplement):
        c = ratio(G, g, M.generator)
        if c is None:
            return RootAnswer(Answer.NO, reason="not parallel to the generator")
        w = W.multiplier(G.power(M.generator, c.numerator))
        if w == 0:
            return RootAnswer(Answer.NO, reason="no multiple meets the subgroup")
        k = abs(c.numerator) * w
        if M.spectrum.contains(k):
            return RootAnswer(Answer.NO, reason=(
                f"{k} is a period, so every multiple of it is a period too"))
        return _yes(G, M, within, g, c.denominator * w, "non-period multiple of the generator")

    if isinstance(M, ExplicitList):
        best = None
        for e in M.elements:
            if not W.contains(e):
                continue
            c = ratio(G, e, g)
            if c is not None and c.denominator == 1 and c > 0:
                best = c.numerator if best is None else min(best, c.numerator)
        if best is None:
            return RootAnswer(Answer.NO, reason="no listed element is a positive multiple of g")
        return _yes(G, M, within, g, best, "listed element")

    raise GroupError(f"no structural rule for {M!r}")


def descriptor_token(G: GroupRef, M) -> str:
    """Short command-line form of a descriptor."""
    if isinstance(M, AllNonIdentity):
        return "all-nonzero"
    if isinstance(M, OddMultiples):
        return f"odd-multiples:{G.format_element(M.h0)}"
    if isinstance(M, ExplicitList):
        sep = ";" if G.family in (INT_LATTICE, RAT_LATTICE) else ","
        items = sorted(M.elements, key=_sort_key)
        return "list:" + sep.join(G.format_element(e) for e in items)
    if isinstance(M, ComplementOfSubgroup):
        return f"complement:{M.subgroup}"
    if isinstance(M, SpectrumComplement):
        return f"spectrum-complement:{G.format_element(M.generator)}"
    raise TypeError(f"unknown descriptor {M!r}")


def _sort_key(e):
    return (0, e) if isinstance(e, int) else (1, tuple(e))


def iter_sample(G: GroupRef, rng, count: int, max_denominator: int = 20,
                radius: int = 20) -> Iterator:
    """Seeded random elements of an infinite family (plain ints / Fractions)."""
    for _ in range(count):
        if G.family == INT_LINE:
            yield rng.randint(-radius, radius)
        elif G.family == INT_LATTICE:
            yield tuple(rng.randint(-radius, radius) for _ in range(G.dim))
        elif G.family == RAT_LATTICE:
            yield tuple(Fraction(rng.randint(-radius, radius), rng.randint(1, max_denominator))
                        for _ in range(G.dim))
        else:
            yield rng.randrange(len(G.table))
