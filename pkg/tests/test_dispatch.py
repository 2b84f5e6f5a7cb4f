from dataclasses import replace
from fractions import Fraction

import pytest
from conftest import three_node

from padictri.cells import CellularMonoplex, cell_member, validate_monoplex
from padictri.dispatch import (
    build_lift,
    cell_roundtrip,
    check_dispatch,
    dispatch,
    eval_Phi,
    eval_phi,
    invert_phi,
    phi_continuity,
    phi_roundtrip,
    sample_lift,
    split_forest,
)
from padictri.errors import NotInCell, PreconditionViolation
from padictri.generators import random_monoplex
from padictri.padic import as_padic
from padictri.polytope import from_bounds, same_set
from padictri.simplex import member

P = 3


def test_three_node_dispatch(spec_monoplex):
    mono, _ = spec_monoplex
    res = dispatch(mono)
    assert res.q1 == 1 and res.q2 == 2
    assert [sorted(h) for h in res.H] == [[], [1], [1, 2]]
    assert [sorted(s) for s in res.P] == [[], [1], [1]]
    assert res.sigma == [{}, {1: 1}, {1: 1}]
    assert res.r == [None, None, 2]
    check_dispatch(mono, res)


def test_three_node_lift(spec_monoplex):
    mono, _ = spec_monoplex
    lift = build_lift(mono)
    assert lift.ok, lift.certificates
    # y2 >= 2 + y1 in valuations: the fibre |t| <= |x^2| after the p^(-N M') rescaling
    assert same_set(lift.simplexes[2].shape, from_bounds((0, None), ({"const": 2, 0: 1}, None)))
    assert eval_Phi(lift, (3, 27)) == (as_padic(3, P),)
    x, t = eval_phi(lift, (3, 27))
    assert t == as_padic(9, P)
    assert cell_member(mono.cells[2], (3,), 9)
    y = invert_phi(lift, 2, (3,), 9)
    assert y == (as_padic(3, P), as_padic(27, P)) or y == (as_padic(3, P), as_padic(-27, P))
    assert member(lift.simplexes[2], y, P)


def test_invert_outside_the_cell():
    mono, _ = three_node()
    lift = build_lift(mono)
    with pytest.raises(NotInCell):
        invert_phi(lift, 2, (3,), 3)


def test_type_zero_cells_lift_to_their_socle(spec_monoplex):
    mono, _ = spec_monoplex
    lift = build_lift(mono)
    for y in [(3, 0), (Fraction(9), 0)]:
        x, t = eval_phi(lift, y, 1)
        assert t.is_zero and x == (as_padic(y[0], P),)


def test_single_point_cell():
    mono, _ = three_node()
    alone = CellularMonoplex([mono.cells[0]], [None])
    res = dispatch(alone)
    assert res.H == [frozenset()] and res.P == [frozenset()] and res.q2 == 0


def test_equal_bounds_variant():
    # nu = mu collapses the fibre to one valuation: Case 3 without a middle graph cell
    mono, _ = three_node()
    A0, _, A2 = mono.cells
    two = CellularMonoplex([A0, replace(A2, nu=A2.mu)], [None, 0])
    assert validate_monoplex(two).valid
    res = dispatch(two)
    assert [sorted(h) for h in res.H] == [[], [1, 2]]
    lift = build_lift(two)
    assert lift.ok
    assert same_set(lift.simplexes[1].shape,
                    from_bounds((0, None), ({"const": 2, 0: 1}, {"const": 2, 0: 1})))


def test_face_stricte_violation():
    mono, _ = three_node()
    A0, A1, A2 = mono.cells
    # type 1 below type 0 over the same socle
    with pytest.raises(PreconditionViolation) as err:
        dispatch(CellularMonoplex([A0, A2, A1], [None, 0, 1]))
    assert err.value.claim == "face-stricte"


def test_missing_face_cell_violates_faces_ua():
    mono, _ = three_node()
    _, A1, A2 = mono.cells
    with pytest.raises(PreconditionViolation) as err:
        dispatch(CellularMonoplex([A1, A2], [None, 0]))
    assert err.value.claim == "faces-UA"


def test_forest_is_split_into_rooted_parts():
    mono, _ = three_node()
    a, b = random_monoplex(3)[0], mono
    cells = list(a.cells) + list(b.cells)
    off = len(a.cells)
    parent = list(a.parent) + [None if q is None else q + off for q in b.parent]
    parts = split_forest(CellularMonoplex(cells, parent))
    assert [idx for _, idx in parts][1] == list(range(off, off + 3))
    for sub, _ in parts:
        assert build_lift(sub).ok


@pytest.mark.parametrize("seed", range(6))
def test_random_monoplexes_lift(seed):
    mono, _ = random_monoplex(seed)
    lift = build_lift(mono)
    assert lift.ok, lift.certificates
    assert phi_roundtrip(lift) == []
    assert cell_roundtrip(lift) == []
    assert phi_continuity(lift) == []


def test_phi_is_injective_on_samples():
    mono, _ = random_monoplex(4)
    lift = build_lift(mono)
    seen = {}
    for a in range(len(lift.simplexes)):
        for y in sample_lift(lift, a, 3, 6, a):
            x, t = eval_phi(lift, y, a)
            key = (tuple(str(c) for c in x), str(t))
            assert seen.setdefault(key, y) == y
