from fractions import Fraction

import pytest
from conftest import B_shape

from padictri.errors import EmptyTarget, NotInComplex, NotLowerSubset, ValidationError
from padictri.generators import chain_shape
from padictri.oracle import sample_padic
from padictri.padic import as_padic
from padictri.polytope import from_bounds, point_polytope
from padictri.simplex import (
    Block,
    SimplicialComplex,
    approach_point,
    build_retraction,
    complex_dot,
    coordinate_projection,
    faces_of,
    make_simplex,
    member,
    retraction_certificate,
    validate_complex,
)

P = 3


def S_example():
    """{0 < |x| <= |y| <= 1} in D^1 R^2, i.e. valuations 0 <= a2 <= a1."""
    return make_simplex(B_shape(), 1)


def closed_S_complex():
    S = S_example()
    chain = faces_of(S).chain
    return SimplicialComplex(1, (Block(2, tuple(chain), True),)), chain


def test_member_examples():
    S = S_example()
    assert member(S, (9, 3), P)
    assert not member(S, (3, 9), P)
    assert not member(S, (0, 1), P)
    # unit part outside 1 + pR
    assert not member(S, (9, 2), P)


def test_face_chain_of_the_example():
    S = S_example()
    chain = faces_of(S)
    assert [sorted(F.support) for F in chain.chain] == [[], [1], [0, 1]]
    facet = chain.facet
    assert member(facet, (0, 3), P)
    assert not member(facet, (3, 0), P)


def test_mirrored_example_has_facet_on_the_first_axis():
    # valuations a2 >= a1: |y| <= |x|, so y reaches 0 first
    S = make_simplex(from_bounds((0, None), ({0: 1}, None)), 1)
    assert sorted(faces_of(S).facet.support) == [0]
    assert member(faces_of(S).facet, (3, 0), P)


def test_closed_simplex_has_no_proper_faces():
    S = make_simplex(from_bounds((2, 2)), 1)
    assert faces_of(S).proper == []


def test_make_simplex_rejects_non_simplex():
    with pytest.raises(ValidationError):
        make_simplex(from_bounds((0, None), (0, None)), 1)


def test_validate_complex_examples():
    c, chain = closed_S_complex()
    rep = validate_complex(c)
    assert rep.is_complex and rep.is_monoplex and rep.is_closed and rep.is_well_dispatched
    alone = SimplicialComplex(1, (Block(2, (chain[-1],), True),))
    rep = validate_complex(alone)
    assert rep.is_complex and not rep.is_closed
    twice = SimplicialComplex(1, (Block(2, (chain[-1], chain[-1]), True),))
    rep = validate_complex(twice)
    assert not rep.is_complex
    assert any("not disjoint" in v for v in rep.violations)


def test_unrooted_block_is_reported():
    a = make_simplex(from_bounds((1, 1)), 1)
    b = make_simplex(from_bounds((2, 2)), 1)
    rep = validate_complex(SimplicialComplex(1, (Block(1, (a, b), True),)))
    assert rep.is_complex and not rep.is_monoplex
    assert validate_complex(SimplicialComplex(1, (Block(1, (a, b), False),))).is_monoplex


def test_json_round_trip_and_dot():
    c, _ = closed_S_complex()
    again = SimplicialComplex.from_json(c.to_json())
    assert again.to_json() == c.to_json()
    dot = complex_dot(c)
    assert dot.startswith("digraph") and 'label="Supp={2}"' in dot and "n0_0 -> n0_1;" in dot


def test_retraction_onto_facet():
    c, chain = closed_S_complex()
    r = build_retraction(c, [(0, 0), (0, 1)], P)
    assert r(0, (9, 3)) == (0, (0, 3))
    assert r(0, (0, 3)) == (0, (0, 3))
    assert r(0, (0, 0)) == (0, (0, 0))
    assert retraction_certificate(r) == []


def test_retraction_onto_everything_is_identity():
    c, _ = closed_S_complex()
    r = build_retraction(c, c.refs(), P)
    for x in [(9, 3), (0, 3), (0, 0)]:
        assert r(0, x) == (0, x)


def test_retraction_of_clopen_simplex_is_constant():
    point = make_simplex(point_polytope(1), 1)
    S = make_simplex(from_bounds((2, 2)), 1)
    c = SimplicialComplex(1, (Block(1, (point, S), False),))
    r = build_retraction(c, [(0, 0)], P)
    images = {r(0, x) for x in [(9,), (36,), (Fraction(9 * 31),)]}
    assert images == {(0, (Fraction(0),))}


def test_retraction_errors():
    c, _ = closed_S_complex()
    with pytest.raises(NotLowerSubset):
        build_retraction(c, [(0, 2)], P)
    with pytest.raises(EmptyTarget):
        build_retraction(c, [], P)
    r = build_retraction(c, [(0, 0)], P)
    with pytest.raises(NotInComplex):
        r(0, (3, 9))


def test_retraction_laws_on_chain_complex():
    # closure of a 3-dimensional chain simplex, retracted onto its 1-skeleton part
    S = make_simplex(chain_shape(3, (2, 0, 1), (1, 0, 2)), 1)
    chain = faces_of(S).chain
    c = SimplicialComplex(1, (Block(3, tuple(chain), True),))
    r = build_retraction(c, [(0, 0), (0, 1)], P)
    assert retraction_certificate(r) == []
    for ref in c.refs():
        for x in sample_padic(c.simplex(ref), 3, 5, 9, P):
            y = r(0, x)
            assert r(*y) == y
            assert r.locate(*y) in r.target


def test_approach_point():
    S = S_example()
    for k in (2, 4, 8):
        y = approach_point(S, (0, 3), {1}, k, P)
        assert member(S, y, P)
        assert y[1] == 3 and as_padic(y[0], P).valuation >= k


def test_coordinate_projection():
    assert coordinate_projection((1, 2, 3), {0, 2}) == (1, 0, 3)
