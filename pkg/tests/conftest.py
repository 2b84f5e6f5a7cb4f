"""Shared fixtures and the acceptance summary printer."""

from __future__ import annotations

import pytest

from padictri.cells import CellularMonoplex, MonomialCell, MonomialFn, graph_cell
from padictri.padic import as_padic
from padictri.polytope import from_bounds, point_polytope
from padictri.simplex import Block, SimplicialComplex, make_simplex

# criterion number -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")


def NxN():
    return from_bounds((0, None), (0, None))


def B_shape():
    """{0 <= y <= x}: level 2 has mu = 0, nu = x."""
    return from_bounds((0, None), (0, {0: 1}))


@pytest.fixture
def nxn():
    return NxN()


@pytest.fixture
def b_shape():
    return B_shape()


def three_node(p=3, N=2, M=2):
    """A0 < A1 < A2: point graph, graph of 0 over D^M R minus 0, and the
    type-1 cell {|t| <= |x^2|, t in Q_{N,M}} over the same socle."""
    U0 = make_simplex(point_polytope(1), M)
    U1 = make_simplex(from_bounds((0, None)), M)
    U = SimplicialComplex(M, (Block(1, (U0, U1), True),))
    zero = MonomialFn.zero()
    A0 = graph_cell(U0, zero, N, M, p, (0, 0))
    A1 = graph_cell(U1, zero, N, M, p, (0, 1))
    A2 = MonomialCell(U1, zero, zero, MonomialFn.mono(1, {0: 2}, p=p), as_padic(1, p), N, M, 1, p, (0, 1))
    return CellularMonoplex([A0, A1, A2], [None, 0, 1]), U


@pytest.fixture
def spec_monoplex():
    return three_node()
