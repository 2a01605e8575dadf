"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

The lines are printed in the terminal summary under "acceptance criteria".
All checks are exact.
"""

import io
import itertools
import random
import time
from fractions import Fraction

from sftlab import cli, gridengine, lift, oracle, zengine
from sftlab.groups import AllNonIdentity, make_group, subgroup
from sftlab.sft import FINITE, Z, SftSpec, check_config, parse_spec

from conftest import SPECS, all_subgroups, shipped_groups

ALTERNATING = parse_spec((SPECS / "alternating.sft").read_text())


# -- 1 ------------------------------------------------------------------------

def _pattern_sets(words, seed):
    if len(words) <= 8:
        for mask in range(1 << len(words)):
            yield frozenset(w for i, w in enumerate(words) if mask >> i & 1)
    else:
        rng = random.Random(seed)
        while True:
            yield frozenset(w for w in words if rng.random() < 0.5)


def test_transfer_matches_oracle_on_small_groups(acceptance):
    start = time.perf_counter()
    cases, mismatches = 0, []
    for name, G in shipped_groups().items():
        if G.order > 6:
            continue
        for members in all_subgroups(G):
            H = subgroup(G, list(members))
            words = list(itertools.product("ab", repeat=len(members)))
            random_mode = len(words) > 8
            kept = 0
            for L in _pattern_sets(words, seed=len(members) * 1000 + G.order):
                if random_mode and kept == 1000:
                    break
                spec = SftSpec(FINITE, ("a", "b"), members, L)
                X = oracle.enumerate_universe(G, spec)
                HG, emb = H.as_group()
                Y = oracle.enumerate_universe(HG, oracle.restrict_spec(spec, emb))
                if not X.configs or not Y.configs:
                    continue
                kept += 1
                freeY = lift.free_part_on_subgroup(G, H, spec)
                got = frozenset(g for g in G.elements()
                                if lift.transfer_free(G, H, freeY, g).is_free)
                if got != oracle.free_part_finite(X):
                    mismatches.append((name, members, sorted(L)))
                cases += 1
    elapsed = time.perf_counter() - start
    ok = not mismatches and elapsed < 300
    acceptance(1, ok, f"{cases} (G, H, L) cases, {len(mismatches)} mismatches, {elapsed:.1f}s")
    assert not mismatches, mismatches[:3]
    assert elapsed < 300


# -- 2 ------------------------------------------------------------------------

def test_alternating_free_part_is_odd(acceptance):
    G = make_group("Z")
    H = subgroup(G, "whole")
    desc = zengine.free_part_z(ALTERNATING)
    bad = []
    for k in range(-1000, 1001):
        expected = k % 2 == 1
        by_spectrum = desc.contains(G, k)
        by_transfer = lift.transfer_free(G, H, desc, k).is_free
        if not (by_spectrum == by_transfer == expected):
            bad.append(k)
    token = zengine.simplify_free_part(desc, G)
    ok = not bad and type(token).__name__ == "OddMultiples" and token.h0 == 1
    acceptance(2, ok, f"|k| <= 1000, {len(bad)} disagreements, simplified to {token!r}")
    assert not bad
    assert ok


# -- 3 and 4 --------------------------------------------------------------------

def random_z_specs(count=200, seed=0):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        alphabet = "abc"[:rng.randint(1, 3)]
        n = rng.randint(1, 3)
        density = rng.uniform(0.2, 0.9)
        L = frozenset(w for w in itertools.product(alphabet, repeat=n) if rng.random() < density)
        spec = SftSpec(Z, tuple(alphabet), tuple(range(n)), L)
        if not zengine.is_empty(spec).empty:
            out.append(spec)
    return out


def test_no_sa_witness_on_random_specs(acceptance):
    bad = []
    for spec in random_z_specs():
        w = zengine.no_sa_witness(spec)
        result = check_config(spec, w)
        if not (result.valid and not result.violations and w.p <= len(spec.allowed)):
            bad.append((spec, w))
    acceptance(3, not bad, f"200 random specs, {len(bad)} failures")
    assert not bad


def test_spectrum_matches_matrix_powers(acceptance):
    bad, checked = [], 0
    for spec in random_z_specs():
        g = zengine.build_graph(spec)
        s = zengine.period_spectrum(g)
        for k in range(1, 4 * s.threshold + 1):
            checked += 1
            if zengine.has_period(g, k) != s.contains(k):
                bad.append((spec, k))
                break
    acceptance(4, not bad, f"{checked} (spec, k) pairs, {len(bad)} specs disagree")
    assert not bad


# -- 5 ------------------------------------------------------------------------

def small_rationals(max_den=20):
    """Reduced p/q with q <= max_den and |p/q| <= 1."""
    return sorted({Fraction(p, q) for q in range(1, max_den + 1) for p in range(-q, q + 1)})


def test_rational_plane(acceptance):
    G = make_group("Q2")
    H = subgroup(G, None)
    M = AllNonIdentity()
    values = small_rationals()
    # a second band with larger numerators
    values += [Fraction(p, q) for q in (7, 11, 19, 20) for p in (-41, 37, 101)]
    bad, count = [], 0
    for a in values:
        for b in values:
            g = (a, b)
            v = lift.transfer_free(G, H, M, g)
            count += 1
            if g == (0, 0):
                if v.answer is not lift.Verdict.NOT_FREE:
                    bad.append(g)
                continue
            if not (v.is_free and v.verify(G, H, M)
                    and 1 <= v.exponent <= a.denominator * b.denominator):
                bad.append(g)
    rep = lift.certify_sa(G, H, M, seed=0)
    ok = not bad and rep.verdict == "SA-certified"
    acceptance(5, ok, f"{count} pairs, {len(bad)} failures, certify: {rep.verdict}")
    assert not bad, bad[:5]
    assert rep.verdict == "SA-certified"


# -- 6 ------------------------------------------------------------------------

def test_construct_on_two_z(acceptance):
    G = make_group("Z")
    H = subgroup(G, "2Z")
    con = lift.construct_fixed(ALTERNATING, G, H, 4, window=(-400, 400))
    x = con.x
    shift_ok = all(x.value(a) == x.value(a + 4) for a in range(-400, 397))
    restrictions_ok = True
    for i in (0, 1):
        y = lift.restriction_window(G, H, x, i)
        r = check_config(ALTERNATING, y)
        restrictions_ok &= r.valid and not r.violations and len(r.checked) >= 199

    # X on Z itself: x(a) and x(a + 2) differ everywhere
    on_z = SftSpec(Z, ("a", "b"), (0, 2), frozenset({("a", "b"), ("b", "a")}))
    freeY = lift.free_part_on_subgroup(G, H, ALTERNATING)
    disagree = []
    for k in range(-100, 101):
        claimed = lift.transfer_free(G, H, freeY, k).is_free
        expected = k % 4 != 0
        # definitional: g is not free iff some point of X is |k|-periodic
        fixed = k == 0 or gridengine.torus_solutions(on_z, abs(k), 1) is not None
        if not (claimed == expected == (not fixed)):
            disagree.append(k)
    ok = shift_ok and restrictions_ok and not disagree
    acceptance(6, ok, f"g x = x: {shift_ok}, restrictions valid: {restrictions_ok}, "
                      f"{len(disagree)} disagreements for |k| <= 100")
    assert shift_ok and restrictions_ok
    assert not disagree, disagree


# -- 7 ------------------------------------------------------------------------

def test_wang_tori(acceptance):
    start = time.perf_counter()
    checker = gridengine.wang_to_spec(gridengine.parse_wang((SPECS / "checker.wang").read_text()))
    mismatch = gridengine.parse_wang((SPECS / "mismatch.wang").read_text())
    assert len(mismatch.tiles) == 1
    rep = gridengine.search_periodic(checker, 6)
    tried = dict(rep.tried)
    refuted_first = all(tried.get(pq) is False for pq in ((1, 1), (1, 2), (2, 1)))
    assignments_ok = rep.assignment is not None and check_config(checker, rep.assignment).valid
    mm = gridengine.wang_to_spec(mismatch)
    none_found = True
    for p in range(1, 7):
        for q in range(1, 7):
            sol = gridengine.torus_solutions(mm, p, q)
            if sol is not None:
                none_found = False
                assignments_ok &= check_config(mm, sol).valid
    elapsed = time.perf_counter() - start
    ok = rep.found == (2, 2) and refuted_first and none_found and assignments_ok and elapsed < 10
    acceptance(7, ok, f"checker least torus {rep.found}, mismatch refuted <= 6: {none_found}, "
                      f"{elapsed:.2f}s")
    assert rep.found == (2, 2)
    assert refuted_first and none_found and assignments_ok
    assert elapsed < 10


# -- 8 ------------------------------------------------------------------------

def cli_commands(tmp):
    S, G = str(SPECS), str(SPECS.parent / "groups")
    cells = tmp / "cells.txt"
    cells.write_text("A B A\nB A B\n")
    return [
        ["z-empty", "--spec", f"{S}/alternating.sft"],
        ["z-period", "--spec", f"{S}/alternating.sft", "6"],
        ["z-spectrum", "--spec", f"{S}/golden.sft", "--sweep", "30"],
        ["z-free", "--spec", f"{S}/alternating.sft"],
        ["z-witness", "--spec", f"{S}/golden.sft"],
        ["grid-torus", "--tiles", f"{S}/checker.wang", "2", "2"],
        ["grid-search", "--tiles", f"{S}/checker.wang", "--bound", "4"],
        ["grid-search", "--tiles", f"{S}/mismatch.wang", "--bound", "4"],
        ["grid-render", "--tiles", f"{S}/checker.wang", "--format", "ppm"],
        ["render", "--cells", str(cells)],
        ["lift-free", "--group", "Q2", "--element", "1/2,1/3"],
        ["lift-free", "--group", "Z", "--subgroup", "2Z", "--spec", f"{S}/alternating.sft",
         "--element", "6"],
        ["lift-construct", "--spec", f"{S}/alternating.sft", "--g", "4", "--m", "2"],
        ["lift-certify", "--group", "Q2"],
        ["lift-certify", "--group", "Z", "--subgroup", "2Z", "--freepart", "odd-multiples:2"],
        ["oracle-enumerate", "--group", f"{G}/z4.grp", "--spec",
         f"{S}/z4_alternating_pairs.sft"],
        ["oracle-prop2", "--group", f"{G}/z4.grp", "--subgroup", "0,2", "--spec",
         f"{S}/z4_alternating_pairs.sft"],
    ]


def _run(argv):
    out = io.StringIO()
    code = cli.dispatch(argv + ["--seed", "0", "--no-timing"], stdout=out)
    return code, out.getvalue()


def test_cli_determinism(acceptance, monkeypatch, tmp_path):
    differing = []
    commands = cli_commands(tmp_path)
    for argv in commands:
        outputs = set()
        for threads in ("1", "1", "2", "4", "8"):
            monkeypatch.setenv("SFTLAB_THREADS", threads)
            outputs.add(_run(argv))
        if len(outputs) != 1:
            differing.append(argv)
    acceptance(8, not differing, f"{len(commands)} commands x 5 runs, "
                                 f"{len(differing)} not byte-identical")
    assert not differing
