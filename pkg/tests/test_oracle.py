from fractions import Fraction

import numpy as np
import pytest
from conftest import B_shape

from padictri import _accel
from padictri.errors import ValidationError, WindowTooLarge
from padictri.generators import chain_shape
from padictri.oracle import SplitMix64, Window, classify_extension, enumerate_members, grid_members, sample_padic
from padictri.padic import as_padic, in_subgroup, SubgroupSpec
from padictri.polytope import INF, AffineMap, from_bounds, point_polytope, validate
from padictri.simplex import make_simplex, member


def test_splitmix_reference_values():
    # first outputs of splitmix64 seeded with 0
    rng = SplitMix64(0)
    assert rng.next() == 0xE220A8397B1DCDAF
    assert rng.next() == 0x6E789E6AA1B965F4


def test_enumerate_b_window():
    pts = enumerate_members(B_shape(), Window(3, 2))
    assert len(pts) == 10
    assert all(0 <= y <= x <= 3 for x, y in pts)


def test_empty_polytope_fails_validation_not_enumeration():
    with pytest.raises(ValidationError):
        validate(from_bounds((1, 0)))


def test_point_polytope_has_one_member():
    assert enumerate_members(point_polytope(2), Window(5, 2)) == [(INF, INF)]


def test_window_size_guard():
    with pytest.raises(WindowTooLarge):
        enumerate_members(chain_shape(6, tuple(range(6)), (0,) * 6), Window(40, 6))


@pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")
def test_backends_agree():
    for q in (1, 2, 3):
        A = chain_shape(q, tuple(reversed(range(q))), (1,) * q)
        a = grid_members(A, 12, backend="numpy")
        b = grid_members(A, 12, backend="numba")
        assert np.array_equal(a, b)


def test_sample_padic_small_simplex():
    s = make_simplex(from_bounds((0, 2)), 1)
    pts = sample_padic(s, 2, 12, seed=4, p=3)
    assert len(pts) == 12
    for (x,) in pts:
        px = as_padic(x, 3)
        assert px.valuation <= 2
        assert in_subgroup(px, SubgroupSpec.D(1))
        assert member(s, (x,), 3)


def test_sample_padic_is_deterministic():
    s = make_simplex(B_shape(), 1)
    assert sample_padic(s, 3, 8, 7, 3) == sample_padic(s, 3, 8, 7, 3)
    assert sample_padic(s, 3, 8, 7, 3) != sample_padic(s, 3, 8, 8, 3)


def test_sample_padic_of_empty_shape():
    class Empty:
        shape = from_bounds((1, 0))
        M = 1

    assert sample_padic(Empty, 2, 5, 0, 3) == []


def test_classify_extension_examples():
    B = B_shape()
    assert classify_extension(AffineMap.make(0, {1: 2, 0: -2}), B, set()).kind == "not_extendable"
    assert classify_extension(AffineMap.make(0, {0: 1}), B, {1}).kind == "infinite"
    res = classify_extension(AffineMap.make(0, {1: 1}), B, {1})
    assert res.kind == "finite"
    assert all(v == Fraction(k[0]) for k, v in res.values.items())
