from math import gcd

import pytest

from hkcert.lattice import DELTA_INDEX
from hkcert.obstruction import mbm_bound_check, proportionality_bound, wall_certificate


def test_mbm_bound_examples(lam2):
    e1 = lam2.basis_vector(0)
    delta = lam2.basis_vector(DELTA_INDEX)
    assert mbm_bound_check(e1 + delta, 3)          # norm -2
    assert not mbm_bound_check(e1, 3)              # norm 0
    assert not mbm_bound_check(2 * delta, 100)     # not primitive
    assert not mbm_bound_check(e1 + delta, 2)      # bound not strict


def test_proportionality_examples():
    assert proportionality_bound(2) == [(1, 1)]
    assert proportionality_bound(5) == [(1, 1), (1, 2), (2, 1)]
    assert proportionality_bound(1) == []


def test_proportionality_oracle_up_to_100():
    for c0 in range(1, 101):
        got = proportionality_bound(c0)
        expect = []
        for a in range(1, c0):
            if a * a >= c0:
                continue
            for b in range(1, c0):
                if b * b >= c0:
                    continue
                if gcd(a, b) == 1:
                    expect.append((a, b))
        assert got == expect
        assert all(gcd(a, b) == 1 for a, b in got)


def test_wall_certificate_examples():
    w = wall_certificate(6, 1, 3)
    assert w.tested_a == ((1, 1),)
    assert w.verdict
    w = wall_certificate(3, 1, 2)
    assert w.tested_a == ((1, 1),)
    assert w.verdict


def test_wall_certificate_precondition():
    with pytest.raises(ValueError):
        wall_certificate(2, 1, 3)   # g <= C0*C1
    with pytest.raises(ValueError):
        wall_certificate(6, 0, 3)


def test_wall_always_true_under_precondition():
    # for every admissible triple with values <= 50, the verdict is true and
    # every tested remainder is the nonzero product a*C1 itself
    for g in range(1, 51):
        for c1 in range(1, 51):
            for c0 in range(1, 51):
                if g <= c0 * c1:
                    continue
                w = wall_certificate(g, c1, c0)
                assert w.verdict
                for a, r in w.tested_a:
                    assert r == a * c1
                    assert 0 < r < g
