"""JSON readers for the composite inputs of the command line.

Coordinates and affine-map keys are 1-based in JSON; references to list
entries (blocks, simplexes, cells) are 0-based indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cells import CellularMonoplex, MonomialCell, MonomialFn
from .errors import ValidationError
from .padic import DEFAULT_PRECISION, PadicNumber, parse_rational
from .simplex import SimplicialComplex


@dataclass(frozen=True)
class Context:
    p: int = 3
    precision: int = DEFAULT_PRECISION
    seed: int = 0

    @classmethod
    def from_json(cls, data) -> Context:
        data = data or {}
        try:
            ctx = cls(int(data.get("p", 3)), int(data.get("precision", DEFAULT_PRECISION)), int(data.get("seed", 0)))
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"malformed context: {exc}") from exc
        if ctx.p < 2 or any(ctx.p % d == 0 for d in range(2, int(ctx.p ** 0.5) + 1)):
            raise ValidationError(f"p = {ctx.p} is not prime")
        if ctx.precision < 1:
            raise ValidationError("precision must be positive")
        return ctx

    def to_json(self) -> dict:
        return {"p": self.p, "precision": self.precision, "seed": self.seed}


def parse_ref(ref) -> tuple[int, int]:
    if isinstance(ref, int):
        return (0, ref)
    b, i = ref
    return (int(b), int(i))


def cell_from_json(data, U: SimplicialComplex, ctx: Context) -> MonomialCell:
    try:
        ref = parse_ref(data["socle"])
        socle = U.simplex(ref)
        tp = int(data.get("type", 0))
        N = int(data.get("N", 1))
        Mp = int(data.get("Mp", U.M))
        c = MonomialFn.from_json(data.get("c", "0"), ctx.p, ctx.precision)
        nu = MonomialFn.from_json(data.get("nu", "0"), ctx.p, ctx.precision)
        mu = MonomialFn.from_json(data.get("mu", "0"), ctx.p, ctx.precision)
        lam = None
        if tp == 1:
            lam = PadicNumber.from_json(data.get("lambda", "1"), ctx.p, ctx.precision)
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed cell: {exc}") from exc
    return MonomialCell(socle, c, nu, mu, lam, N, Mp, tp, ctx.p, ref)


def monoplex_from_json(data, ctx: Context) -> tuple[CellularMonoplex, SimplicialComplex]:
    try:
        U = SimplicialComplex.from_json(data["complex"])
        cells = [cell_from_json(c, U, ctx) for c in data["cells"]]
        edges = [(int(a), int(b)) for a, b in data.get("tree", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed monoplex: {exc}") from exc
    return CellularMonoplex.from_edges(cells, edges), U


def monoplex_to_json(mono: CellularMonoplex, U: SimplicialComplex) -> dict:
    return {
        "complex": U.to_json(),
        "cells": [c.to_json() for c in mono.cells],
        "tree": [list(e) for e in mono.edges()],
    }


def rational_point(data) -> tuple[Fraction, ...]:
    try:
        return tuple(parse_rational(x) for x in data)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"malformed point: {exc}") from exc
