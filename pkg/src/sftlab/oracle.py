"""Brute-force ground truth on finite groups.

Everything is computed literally from the definitions: a configuration is
a tuple indexed by group elements, (g x)(h) = x(g^-1 h), and x is in X iff
for every g the restriction of g x to F is an allowed word.  Nothing here
calls into the lift or root machinery; the oracle is the trusted slow path.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .groups import GroupRef, SubgroupRef
from .sft import EmptySft, SftSpec, FINITE

DEFAULT_BUDGET = 2 ** 20


class BudgetExceeded(RuntimeError):
    pass


def act(G: GroupRef, g: int, x: tuple) -> tuple:
    """The shifted configuration g x."""
    gi = G.inv(g)
    return tuple(x[G.mul(gi, h)] for h in G.elements())


@dataclass
class FiniteSftUniverse:
    group: GroupRef
    spec: SftSpec
    configs: list = field(default_factory=list)
    stabilizers: list = field(default_factory=list)

    def __len__(self):
        return len(self.configs)

    def __contains__(self, x):
        return x in self._index

    def __post_init__(self):
        self._index = set(self.configs)


def _check_spec(G: GroupRef, spec: SftSpec) -> None:
    if not G.is_finite:
        raise ValueError("the oracle works on finite groups only")
    if spec.family != FINITE:
        raise ValueError("the oracle needs a spec with 'group finite'")
    for f in spec.support:
        G.check(f)


def is_member(G: GroupRef, spec: SftSpec, x: tuple) -> bool:
    for g in G.elements():
        gx = act(G, g, x)
        if tuple(gx[f] for f in spec.support) not in spec.allowed:
            return False
    return True


def enumerate_universe(G: GroupRef, spec: SftSpec, budget: int = DEFAULT_BUDGET) -> FiniteSftUniverse:
    """All configurations of the SFT, in base-|A| order (element 0 most significant)."""
    _check_spec(G, spec)
    n = len(G.table)
    count = len(spec.alphabet) ** n
    if count > budget:
        raise BudgetExceeded(f"{count} candidates exceed the budget of {budget}")
    # index lists g^-1 f, so that (g x)|F = (x[g^-1 f])_f
    windows = [tuple(G.mul(G.inv(g), f) for f in spec.support) for g in G.elements()]
    allowed = spec.allowed
    configs = []
    if allowed:
        for x in itertools.product(spec.alphabet, repeat=n):
            if all(tuple(x[i] for i in w) in allowed for w in windows):
                configs.append(x)
    stabs = [frozenset(g for g in G.elements() if act(G, g, x) == x) for x in configs]
    return FiniteSftUniverse(G, spec, configs, stabs)


def free_part_finite(universe: FiniteSftUniverse) -> frozenset:
    """G minus the union of all stabilizers."""
    if not universe.configs:
        raise EmptySft("the SFT is empty")
    fixed = set().union(*universe.stabilizers)
    return frozenset(g for g in universe.group.elements() if g not in fixed)


def restrict_spec(spec: SftSpec, emb: tuple) -> SftSpec:
    """Re-express a spec whose support lies in a subgroup in the subgroup's own indices."""
    pos = {g: k for k, g in enumerate(emb)}
    missing = [f for f in spec.support if f not in pos]
    if missing:
        raise ValueError(f"support elements {missing} are not in the subgroup")
    return SftSpec(FINITE, spec.alphabet, tuple(pos[f] for f in spec.support), spec.allowed)


@dataclass
class Prop2Result:
    status: str                 # "agree", "disagree" or "skipped"
    lhs: frozenset = frozenset()
    rhs: frozenset = frozenset()
    reason: str = ""

    @property
    def agree(self) -> bool:
        return self.status == "agree"


def check_prop2(G: GroupRef, H: SubgroupRef, spec: SftSpec,
                budget: int = DEFAULT_BUDGET) -> Prop2Result:
    """Compare Free(X) with {g : some (t g t^-1)^n lies in Free(Y)}, both by brute force."""
    HG, emb = H.as_group()
    try:
        spec_h = restrict_spec(spec, emb)
    except ValueError as exc:
        return Prop2Result("skipped", reason=str(exc))
    X = enumerate_universe(G, spec, budget)
    Y = enumerate_universe(HG, spec_h, budget)
    if not X.configs or not Y.configs:
        return Prop2Result("skipped", reason="X or Y is empty")
    lhs = free_part_finite(X)
    free_y = {emb[h] for h in free_part_finite(Y)}
    n = len(G.table)
    rhs = set()
    for g in G.elements():
        for t in G.elements():
            c = G.mul(G.mul(t, g), G.inv(t))
            p = c
            for _ in range(n):
                if p in free_y:
                    rhs.add(g)
                    break
                p = G.mul(p, c)
            if g in rhs:
                break
    rhs = frozenset(rhs)
    if lhs == rhs:
        return Prop2Result("agree", lhs, rhs)
    return Prop2Result("disagree", lhs, rhs, reason=f"only lhs: {sorted(lhs - rhs)}, "
                                                      f"only rhs: {sorted(rhs - lhs)}")
