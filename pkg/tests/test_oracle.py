import itertools

import pytest

from sftlab import oracle
from sftlab.groups import cyclic_group, make_group, subgroup
from sftlab.sft import FINITE, EmptySft, SftSpec, full_shift, parse_spec

from conftest import SPECS, all_subgroups, shipped_groups

PAIRS = parse_spec((SPECS / "z4_alternating_pairs.sft").read_text())
S3 = shipped_groups()["s3"]


def test_enumerate_examples():
    Z2 = cyclic_group(2)
    U = oracle.enumerate_universe(Z2, full_shift(FINITE, "ab", (0,)))
    assert U.configs == [("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")]
    U = oracle.enumerate_universe(cyclic_group(4), PAIRS)
    assert len(U) == 4
    assert U.configs == sorted(U.configs)
    Z3 = cyclic_group(3)
    assert len(oracle.enumerate_universe(Z3, SftSpec(FINITE, ("a",), (0,), frozenset()))) == 0


def test_budget():
    with pytest.raises(oracle.BudgetExceeded):
        oracle.enumerate_universe(cyclic_group(6), full_shift(FINITE, "ab", (0,)), budget=63)
    assert len(oracle.enumerate_universe(cyclic_group(6), full_shift(FINITE, "ab", (0,)),
                                         budget=64)) == 64


def test_free_part_examples():
    assert oracle.free_part_finite(oracle.enumerate_universe(cyclic_group(4), PAIRS)) == {1, 2, 3}
    for G in shipped_groups().values():
        U = oracle.enumerate_universe(G, full_shift(FINITE, "ab", (G.identity(),)))
        assert oracle.free_part_finite(U) == frozenset()
    Z2 = cyclic_group(2)
    swap = SftSpec(FINITE, ("a", "b"), (0, 1), frozenset({("a", "b"), ("b", "a")}))
    assert oracle.free_part_finite(oracle.enumerate_universe(Z2, swap)) == {1}
    with pytest.raises(EmptySft):
        oracle.free_part_finite(oracle.enumerate_universe(Z2, SftSpec(FINITE, ("a",), (0,))))


def test_shift_is_a_left_action():
    x = tuple("abcdef")
    for a, b in itertools.product(S3.elements(), repeat=2):
        assert oracle.act(S3, a, oracle.act(S3, b, x)) == oracle.act(S3, S3.mul(a, b), x)


def test_stabilizers_are_subgroups():
    for G in shipped_groups().values():
        for members in all_subgroups(G):
            words = list(itertools.product("ab", repeat=len(members)))
            spec = SftSpec(FINITE, ("a", "b"), members, frozenset(words[1::2]))
            U = oracle.enumerate_universe(G, spec)
            for x, stab in zip(U.configs, U.stabilizers):
                assert oracle.is_member(G, spec, x)
                assert G.identity() in stab
                assert all(G.mul(a, b) in stab for a in stab for b in stab)
            if U.configs:
                assert G.identity() not in oracle.free_part_finite(U)


def test_transfer_check_examples():
    Z4, Z6 = cyclic_group(4), cyclic_group(6)
    r = oracle.check_prop2(Z4, subgroup(Z4, [0, 2]), PAIRS)
    assert r.status == "agree" and r.lhs == {1, 2, 3}
    spec = SftSpec(FINITE, ("a", "b"), tuple(range(6)),
                   frozenset(w for w in itertools.product("ab", repeat=6) if w.count("a") == 3))
    assert oracle.check_prop2(Z6, subgroup(Z6, "whole"), spec).agree
    rot = subgroup(S3, [0, 3, 4])
    r = oracle.check_prop2(S3, rot, full_shift(FINITE, "ab", (0, 3, 4)))
    assert r.agree and r.lhs == frozenset()


def test_transfer_check_skips():
    Z4 = cyclic_group(4)
    r = oracle.check_prop2(Z4, subgroup(Z4, [0, 2]), SftSpec(FINITE, ("a",), (1,), frozenset()))
    assert r.status == "skipped" and "not in the subgroup" in r.reason
    r = oracle.check_prop2(Z4, subgroup(Z4, [0, 2]), SftSpec(FINITE, ("a",), (0,), frozenset()))
    assert r.status == "skipped"


def test_transfer_check_over_corpus_full_enumeration():
    for G in shipped_groups().values():
        for members in all_subgroups(G):
            words = list(itertools.product("ab", repeat=len(members)))
            if len(words) > 4:
                continue
            for mask in range(1, 1 << len(words)):
                L = frozenset(w for i, w in enumerate(words) if mask >> i & 1)
                r = oracle.check_prop2(G, subgroup(G, list(members)),
                                       SftSpec(FINITE, ("a", "b"), members, L))
                assert r.status in ("agree", "skipped"), r.reason


def test_oracle_rejects_infinite_groups():
    with pytest.raises(ValueError):
        oracle.enumerate_universe(make_group("Z"), full_shift(FINITE, "a", (0,)))
