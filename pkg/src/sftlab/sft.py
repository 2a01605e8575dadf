"""SFT specifications, periodic/window configurations and local-rule checks.

A configuration x satisfies the spec when for every offset g the word
``(x(g + f))_{f in F}`` belongs to the allowed set L.  Offsets are written
additively because the families handled here (Z, Z^2) are abelian; finite
groups are handled literally in :mod:`sftlab.oracle`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

Z = "Z"
Z2 = "Z2"
FINITE = "finite"
FAMILIES = (Z, Z2, FINITE)


class SpecError(ValueError):
    """Malformed or inconsistent spec; ``line`` is set for parse errors."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class EmptySft(ValueError):
    """The operation needs a nonempty SFT."""


@dataclass(frozen=True)
class SftSpec:
    family: str
    alphabet: tuple[str, ...]
    support: tuple
    allowed: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise SpecError(f"unknown group family {self.family!r}")
        alphabet = tuple(self.alphabet)
        if not alphabet:
            raise SpecError("alphabet is empty")
        if len(set(alphabet)) != len(alphabet):
            raise SpecError("alphabet has duplicate symbols")
        support = tuple(tuple(f) if isinstance(f, list) else f for f in self.support)
        if not support:
            raise SpecError("support is empty")
        if len(set(support)) != len(support):
            raise SpecError("support elements are not distinct")
        for f in support:
            if self.family == Z2:
                ok = isinstance(f, tuple) and len(f) == 2 and all(isinstance(c, int) for c in f)
            else:
                ok = isinstance(f, int) and not isinstance(f, bool)
            if not ok:
                raise SpecError(f"support element {f!r} does not belong to {self.family}")
        symbols = set(alphabet)
        allowed = frozenset(tuple(w) for w in self.allowed)
        for w in allowed:
            if len(w) != len(support):
                raise SpecError(f"word {' '.join(w)} has length {len(w)}, support has {len(support)}")
            for s in w:
                if s not in symbols:
                    raise SpecError(f"unknown symbol {s!r}")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "allowed", allowed)

    @property
    def is_trivially_empty(self) -> bool:
        return not self.allowed

    def sorted_words(self) -> list[tuple[str, ...]]:
        """L in the alphabet's lexicographic order."""
        rank = {s: i for i, s in enumerate(self.alphabet)}
        return sorted(self.allowed, key=lambda w: [rank[s] for s in w])


def full_shift(family: str, alphabet: Sequence[str], support: Sequence) -> SftSpec:
    words = itertools.product(alphabet, repeat=len(support))
    return SftSpec(family, tuple(alphabet), tuple(support), frozenset(words))


# ---------------------------------------------------------------------------
# the .sft text format


def _parse_support_token(family: str, tok: str, line: int):
    try:
        if family == Z2:
            x, y = tok.split(",")
            return int(x), int(y)
        return int(tok)
    except ValueError:
        raise SpecError(f"bad support element {tok!r}", line) from None


def parse_spec(text: str) -> SftSpec:
    family = alphabet = support = None
    allow: list[tuple[str, ...]] = []
    forbid: list[tuple[str, ...]] = []
    for no, raw in enumerate(text.splitlines(), 1):
        ln = raw.strip()
        if not ln or ln.startswith("#"):
            continue
        key, *toks = ln.split()
        if key == "group":
            if len(toks) != 1 or toks[0] not in FAMILIES:
                raise SpecError("expected 'group Z', 'group Z2' or 'group finite'", no)
            family = toks[0]
        elif key == "alphabet":
            if not toks:
                raise SpecError("alphabet is empty", no)
            if len(set(toks)) != len(toks):
                raise SpecError("alphabet has duplicate symbols", no)
            alphabet = tuple(toks)
        elif key == "support":
            if family is None:
                raise SpecError("'support' before 'group'", no)
            if not toks:
                raise SpecError("support is empty", no)
            support = tuple(_parse_support_token(family, t, no) for t in toks)
        elif key in ("allow", "forbid"):
            if alphabet is None or support is None:
                raise SpecError(f"'{key}' before 'alphabet' and 'support'", no)
            if len(toks) != len(support):
                raise SpecError(
                    f"word has length {len(toks)}, support has {len(support)}", no)
            for s in toks:
                if s not in alphabet:
                    raise SpecError(f"unknown symbol {s!r}", no)
            (allow if key == "allow" else forbid).append(tuple(toks))
            if allow and forbid:
                raise SpecError("'allow' and 'forbid' lines cannot be mixed", no)
        else:
            raise SpecError(f"unknown keyword {key!r}", no)
    for name, val in (("group", family), ("alphabet", alphabet), ("support", support)):
        if val is None:
            raise SpecError(f"missing '{name}' line")
    if forbid:
        words = set(itertools.product(alphabet, repeat=len(support))) - set(forbid)
    else:
        words = set(allow)
    return SftSpec(family, alphabet, support, frozenset(words))


def render_spec(spec: SftSpec) -> str:
    def fmt(f):
        return f"{f[0]},{f[1]}" if spec.family == Z2 else str(f)

    out = [f"group {spec.family}",
           "alphabet " + " ".join(spec.alphabet),
           "support " + " ".join(fmt(f) for f in spec.support)]
    out += ["allow " + " ".join(w) for w in spec.sorted_words()]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# configurations


@dataclass(frozen=True)
class PeriodicConfig:
    """A point fixed by the period translations.

    On Z: ``period == (p,)`` and ``cells`` is the word x(0..p-1).
    On Z^2: ``period == (p, q)`` and ``cells`` is a tuple of q rows of
    length p, ``cells[y][x]`` being x at (x, y).
    """

    period: tuple[int, ...]
    cells: tuple

    def __post_init__(self):
        if any(k < 1 for k in self.period):
            raise ValueError("periods must be positive")
        if len(self.period) == 1:
            object.__setattr__(self, "cells", tuple(self.cells))
            if len(self.cells) != self.period[0]:
                raise ValueError("word length does not match the period")
        else:
            p, q = self.period
            cells = tuple(tuple(r) for r in self.cells)
            if len(cells) != q or any(len(r) != p for r in cells):
                raise ValueError("array shape does not match the periods")
            object.__setattr__(self, "cells", cells)

    @classmethod
    def word(cls, w: Iterable[str]) -> "PeriodicConfig":
        w = tuple(w)
        return cls((len(w),), w)

    @property
    def family(self) -> str:
        return Z if len(self.period) == 1 else Z2

    @property
    def p(self) -> int:
        return self.period[0]

    @property
    def q(self) -> int:
        return self.period[1] if len(self.period) > 1 else 1

    def value(self, g):
        if len(self.period) == 1:
            return self.cells[g % self.period[0]]
        x, y = g
        return self.cells[y % self.period[1]][x % self.period[0]]

    def symbols(self) -> set[str]:
        if len(self.period) == 1:
            return set(self.cells)
        return {s for row in self.cells for s in row}

    def text(self) -> str:
        if len(self.period) == 1:
            return "".join(self.cells) if all(len(s) == 1 for s in self.cells) \
                else " ".join(self.cells)
        return " / ".join(" ".join(r) for r in self.cells)


TorusAssignment = PeriodicConfig


@dataclass(frozen=True)
class WindowConfig:
    """Finite axis-aligned window with a full assignment.

    On Z the window is ``[origin, origin + len(cells) - 1]``.  On Z^2
    ``cells[y][x]`` is the symbol at ``(origin[0] + x, origin[1] + y)``.
    """

    origin: object
    cells: tuple

    def __post_init__(self):
        if isinstance(self.origin, int):
            object.__setattr__(self, "cells", tuple(self.cells))
        else:
            cells = tuple(tuple(r) for r in self.cells)
            if cells and len({len(r) for r in cells}) != 1:
                raise ValueError("window rows have different lengths")
            object.__setattr__(self, "cells", cells)
            object.__setattr__(self, "origin", tuple(self.origin))

    @property
    def family(self) -> str:
        return Z if isinstance(self.origin, int) else Z2

    def value(self, g):
        """Symbol at g, or None outside the window."""
        if isinstance(self.origin, int):
            k = g - self.origin
            return self.cells[k] if 0 <= k < len(self.cells) else None
        x, y = g[0] - self.origin[0], g[1] - self.origin[1]
        if 0 <= y < len(self.cells) and 0 <= x < len(self.cells[0]):
            return self.cells[y][x]
        return None

    def positions(self):
        if isinstance(self.origin, int):
            return range(self.origin, self.origin + len(self.cells))
        h = len(self.cells)
        w = len(self.cells[0]) if h else 0
        return [(self.origin[0] + x, self.origin[1] + y) for y in range(h) for x in range(w)]

    def text(self) -> str:
        if isinstance(self.origin, int):
            return "".join(self.cells) if all(len(s) == 1 for s in self.cells) \
                else " ".join(self.cells)
        return " / ".join(" ".join(r) for r in self.cells)


@dataclass
class CheckResult:
    valid: bool
    violations: list = field(default_factory=list)   # (offset, observed word)
    checked: list = field(default_factory=list)
    unchecked: int = 0

    def __bool__(self):
        return self.valid


def _add(family, g, f):
    if family == Z:
        return g + f
    return g[0] + f[0], g[1] + f[1]


def check_config(spec: SftSpec, c) -> CheckResult:
    """Check every translate of the support against L.

    Periodic configurations are checked over one fundamental domain, which
    is exact.  Windows only check the offsets whose translated support fits
    inside; the count of remaining offsets is reported as ``unchecked``.
    """
    if spec.family != c.family:
        raise ValueError(f"configuration on {c.family} does not match spec on {spec.family}")
    alphabet = set(spec.alphabet)
    bad = c.symbols() - alphabet if isinstance(c, PeriodicConfig) else \
        {c.value(g) for g in c.positions()} - alphabet
    if bad:
        raise ValueError(f"configuration uses symbols outside the alphabet: {sorted(bad)}")
    res = CheckResult(True)
    if isinstance(c, PeriodicConfig):
        if spec.family == Z:
            offsets = list(range(c.p))
        else:
            offsets = [(x, y) for y in range(c.q) for x in range(c.p)]
        for g in offsets:
            w = tuple(c.value(_add(spec.family, g, f)) for f in spec.support)
            res.checked.append(g)
            if w not in spec.allowed:
                res.violations.append((g, w))
    else:
        # offsets whose translated support meets the window at all
        positions = list(c.positions())
        candidates = []
        if positions and spec.family == Z:
            lo, hi = min(spec.support), max(spec.support)
            candidates = range(positions[0] - hi, positions[-1] - lo + 1)
        elif positions:
            xs = [f[0] for f in spec.support]
            ys = [f[1] for f in spec.support]
            (x0, y0), (x1, y1) = positions[0], positions[-1]
            candidates = [(x, y)
                          for y in range(y0 - max(ys), y1 - min(ys) + 1)
                          for x in range(x0 - max(xs), x1 - min(xs) + 1)]
        for g in candidates:
            w = tuple(c.value(_add(spec.family, g, f)) for f in spec.support)
            if None in w:
                if any(s is not None for s in w):
                    res.unchecked += 1
                continue
            res.checked.append(g)
            if w not in spec.allowed:
                res.violations.append((g, w))
    res.valid = not res.violations
    return res


# ---------------------------------------------------------------------------
# Z support normalization


def normalize_z_support(spec: SftSpec) -> SftSpec:
    """Equivalent spec whose support is {0, ..., n-1}.

    The new L holds every length-n word whose restriction to the shifted
    original support lies in the old L; gap positions are free.
    """
    if spec.family != Z:
        raise ValueError("normalize_z_support needs a spec on Z")
    lo, hi = min(spec.support), max(spec.support)
    n = hi - lo + 1
    if spec.support == tuple(range(n)):
        return spec
    slot = {f - lo: k for k, f in enumerate(spec.support)}
    gaps = [i for i in range(n) if i not in slot]
    words = set()
    for w in spec.allowed:
        for fill in itertools.product(spec.alphabet, repeat=len(gaps)):
            filler = dict(zip(gaps, fill))
            words.add(tuple(w[slot[i]] if i in slot else filler[i] for i in range(n)))
    return SftSpec(Z, spec.alphabet, tuple(range(n)), frozenset(words))


def window_from_periodic(c: PeriodicConfig, start, shape) -> WindowConfig:
    """Unroll a periodic configuration onto a window."""
    if c.family == Z:
        return WindowConfig(start, tuple(c.value(start + k) for k in range(shape)))
    w, h = shape
    return WindowConfig(start, tuple(tuple(c.value((start[0] + x, start[1] + y))
                                           for x in range(w)) for y in range(h)))
