"""Command-line front end.

Every command reads one JSON file (``-`` for stdin) whose optional
``context`` object fixes the prime, the working precision and the seed, and
writes a canonical JSON report.  Exit status: 0 valid, 1 invalid with a
report, 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Callable

from .cells import validate_monoplex
from .dispatch import build_lift, cell_roundtrip, dispatch, phi_continuity, phi_roundtrip, split_forest
from .errors import (
    BadDirection,
    CertificationFailure,
    EmptyTarget,
    NotInComplex,
    NotLowerSubset,
    PadicTriError,
    PostconditionViolation,
    PreconditionViolation,
    ValidationError,
    WindowTooLarge,
    ZeroPolynomial,
)
from .good_direction import certify_direction, find_direction, leading_form
from .oracle import Window, enumerate_members, sample_padic
from .padic import PadicNumber
from .polynomial import Polynomial
from .polytope import INF, DiscretePolytope, all_faces, is_face_of, is_simplex, validate
from .serialize import Context, monoplex_from_json, parse_ref, rational_point
from .simplex import (
    SimplicialComplex,
    build_retraction,
    complex_dot,
    fmt_support,
    make_simplex,
    retraction_certificate,
    validate_complex,
)


class Malformed(Exception):
    pass


def _gamma(pt) -> list:
    return ["+inf" if x == INF else int(x) for x in pt]


def _num(x) -> str | dict:
    if isinstance(x, PadicNumber):
        return str(x.as_rational()) if x.is_exact else x.to_json()
    return str(Fraction(x))


def _polytope(data) -> DiscretePolytope:
    try:
        return DiscretePolytope.from_json(data)
    except ValidationError as exc:
        raise Malformed(str(exc)) from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise Malformed(f"malformed polytope: {exc}") from exc


def _need(data: dict, key: str):
    if key not in data:
        raise Malformed(f"missing field {key!r}")
    return data[key]


# ---------------------------------------------------------------------------
# commands; each returns (exit code, report, dot text or None)


def cmd_validate_polytope(data, ctx, args):
    A = _polytope(_need(data, "polytope"))
    try:
        validate(A)
    except ValidationError as exc:
        return 1, {"valid": False, "error": str(exc)}, None
    return 0, {"valid": True, "q": A.q, "support": sorted(i + 1 for i in A.support)}, None


def _face_dot(faces) -> str:
    keys = sorted(faces, key=lambda J: (len(J), sorted(J)))
    lines = ["digraph faces {", "  rankdir=BT;"]
    for k, J in enumerate(keys):
        lines.append(f'  f{k} [label="Supp={fmt_support(J)}"];')
    for a, J in enumerate(keys):
        for b, K in enumerate(keys):
            if J < K and is_face_of(faces[K], faces[J]):
                between = any(J < L < K and is_face_of(faces[L], faces[J]) and is_face_of(faces[K], faces[L])
                              for L in keys)
                if not between:
                    lines.append(f"  f{a} -> f{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_faces(data, ctx, args):
    A = _polytope(_need(data, "polytope"))
    try:
        validate(A)
        faces = all_faces(A)
    except ValidationError as exc:
        return 1, {"valid": False, "error": str(exc)}, None
    rep = is_simplex(A)
    keys = sorted(faces, key=lambda J: (len(J), sorted(J)))
    report = {
        "valid": True,
        "faces": [{"support": sorted(j + 1 for j in J), "polytope": faces[J].to_json()} for J in keys],
        "is_simplex": rep.is_simplex,
    }
    return 0, report, _face_dot(faces)


def cmd_simplex_check(data, ctx, args):
    A = _polytope(_need(data, "polytope"))
    try:
        validate(A)
    except ValidationError as exc:
        return 1, {"is_simplex": False, "error": str(exc)}, None
    rep = is_simplex(A)
    dot = _face_dot(rep.faces)
    return (0 if rep.is_simplex else 1), rep.to_json(), dot


def _complex(data) -> SimplicialComplex:
    try:
        return SimplicialComplex.from_json(data)
    except (ValidationError, KeyError, TypeError, ValueError) as exc:
        raise Malformed(str(exc)) from exc


def cmd_complex_check(data, ctx, args):
    c = _complex(_need(data, "complex"))
    rep = validate_complex(c)
    return (0 if rep.is_complex else 1), rep.to_json(), complex_dot(c)


def cmd_retract(data, ctx, args):
    c = _complex(_need(data, "complex"))
    try:
        target = [parse_ref(t) for t in _need(data, "target")]
        points = [(int(pt.get("block", 0)), rational_point(pt["x"])) for pt in data.get("points", [])]
    except (KeyError, TypeError, ValueError, ValidationError) as exc:
        raise Malformed(f"malformed retraction input: {exc}") from exc
    try:
        r = build_retraction(c, target, ctx.p)
    except (NotLowerSubset, EmptyTarget, ValidationError) as exc:
        return 1, {"error": str(exc)}, None
    images = []
    for b, x in points:
        try:
            nb, y = r(b, x)
            images.append({"block": nb, "x": [_num(v) for v in y]})
        except NotInComplex as exc:
            images.append({"error": str(exc)})
    checks = []
    for ref in c.refs():
        s = c.simplex(ref)
        for x in sample_padic(s, args.depth, args.samples, ctx.seed + 31 * ref[1], ctx.p):
            once = r(ref[0], x)
            twice = r(*once)
            if twice != once:
                checks.append(f"sigma(sigma(x)) != sigma(x) for a point of {ref}")
            if ref in r.target and once != (ref[0], tuple(x)):
                checks.append(f"sigma is not the identity on target simplex {ref}")
    cert = retraction_certificate(r)
    report = {
        "base": {"block": r.base[0], "x": [_num(v) for v in r.base[1]]},
        "route": [{"from": list(k), "to": list(v) if v else "base"} for k, v in sorted(r.route.items())],
        "images": images,
        "certificate": cert,
        "sampled_violations": sorted(set(checks)),
    }
    return (0 if not cert and not checks else 1), report, complex_dot(c)


def _monoplex(data, ctx):
    try:
        return monoplex_from_json(data, ctx)
    except ValidationError as exc:
        raise Malformed(str(exc)) from exc


def cmd_dispatch(data, ctx, args):
    mono, U = _monoplex(data, ctx)
    comps = []
    for sub, idx in split_forest(mono):
        try:
            res = dispatch(sub)
        except PreconditionViolation as exc:
            return 1, {"error": {"claim": exc.claim, "detail": exc.detail}, "cells": idx}, None
        except PostconditionViolation as exc:
            return 1, {"error": {"condition": exc.condition, "detail": exc.detail}, "cells": idx}, None
        comps.append({"cells": idx, "dispatch": res.to_json()})
    return 0, {"components": comps}, None


def cmd_triangulate_cells(data, ctx, args):
    mono, U = _monoplex(data, ctx)
    rep = validate_monoplex(mono, closed=False)
    if not rep.valid:
        return 1, {"error": {"claim": "cellular-monoplex", "detail": rep.violations}}, None
    comps, blocks, ok = [], [], True
    for sub, idx in split_forest(mono):
        try:
            lift = build_lift(sub)
        except PreconditionViolation as exc:
            return 1, {"error": {"claim": exc.claim, "detail": exc.detail}, "cells": idx}, None
        except (PostconditionViolation, CertificationFailure) as exc:
            return 1, {"error": str(exc), "cells": idx}, None
        sampled = {
            "phi_roundtrip": phi_roundtrip(lift, args.samples, args.depth, ctx.seed),
            "cell_roundtrip": cell_roundtrip(lift, args.samples, args.depth, ctx.seed),
            "phi_continuity": phi_continuity(lift, count=max(1, args.samples // 2), seed=ctx.seed),
        }
        ok = ok and lift.ok and not any(sampled.values())
        comps.append({"cells": idx, **lift.to_json(), "sampled": sampled})
        blocks.append(lift.complex.blocks[0])
    lifted = SimplicialComplex(U.M, tuple(blocks))
    return (0 if ok else 1), {"components": comps, "ok": ok}, complex_dot(lifted, "lifted")


def cmd_good_direction(data, ctx, args):
    try:
        family = [Polynomial.from_json(f) for f in _need(data, "polynomials")]
        s = int(data.get("s", 0))
    except (ValidationError, TypeError, ValueError) as exc:
        raise Malformed(str(exc)) from exc
    try:
        lead = leading_form(family)
        eta = data.get("eta")
        eta = tuple(Fraction(x) for x in eta) if eta is not None else find_direction(family, s, ctx.p)
        rep = certify_direction(family, eta, seed=ctx.seed or 2024)
    except ZeroPolynomial as exc:
        return 1, {"error": str(exc)}, None
    except BadDirection as exc:
        return 1, {"certified": False, "error": str(exc), "witness": exc.witness}, None
    return 0, {"leading_form": lead.to_json(), **rep.to_json()}, None


def cmd_oracle(data, ctx, args):
    A = _polytope(_need(data, "polytope"))
    if "M" in data:
        try:
            s = make_simplex(A, int(data["M"]))
        except ValidationError as exc:
            return 1, {"error": str(exc)}, None
        pts = sample_padic(s, args.depth, args.samples, ctx.seed, ctx.p)
        return 0, {"samples": [[_num(x) for x in pt] for pt in pts]}, None
    try:
        pts = enumerate_members(A, Window(int(data.get("bound", 4)), A.q), closure=bool(data.get("closure", False)))
    except WindowTooLarge as exc:
        return 1, {"error": str(exc)}, None
    return 0, {"points": [_gamma(pt) for pt in pts], "count": len(pts)}, None


COMMANDS: dict[str, Callable] = {
    "validate-polytope": cmd_validate_polytope,
    "faces": cmd_faces,
    "simplex-check": cmd_simplex_check,
    "complex-check": cmd_complex_check,
    "retract": cmd_retract,
    "dispatch": cmd_dispatch,
    "triangulate-cells": cmd_triangulate_cells,
    "good-direction": cmd_good_direction,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="padictri", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("input", help="input JSON file, or - for stdin")
    ap.add_argument("--output", "-o", help="write the report here instead of stdout")
    ap.add_argument("--dot", help="also write a DOT digraph of the relevant specialization order")
    ap.add_argument("--samples", type=int, default=4, help="sampled points per simplex or cell")
    ap.add_argument("--depth", type=int, default=3, help="valuation depth of sampled points")
    return ap


def run(argv: list[str] | None = None) -> tuple[int, str, str | None]:
    args = build_parser().parse_args(argv)
    try:
        text = sys.stdin.read() if args.input == "-" else open(args.input, encoding="utf-8").read()
        data = json.loads(text)
        if not isinstance(data, dict):
            raise Malformed("top-level JSON value must be an object")
        ctx = Context.from_json(data.get("context"))
        code, report, dot = COMMANDS[args.command](data, ctx, args)
    except (OSError, json.JSONDecodeError, Malformed) as exc:
        code, report, dot = 2, {"error": f"malformed input: {exc}"}, None
    except ValidationError as exc:
        code, report, dot = 2, {"error": f"malformed input: {exc}"}, None
    except PadicTriError as exc:
        code, report, dot = 1, {"error": f"{type(exc).__name__}: {exc}"}, None
    out = json.dumps(report, sort_keys=True, indent=2, default=str) + "\n"
    return code, out, dot if args.dot else None


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    code, out, dot = run(argv)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    if dot is not None:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(dot)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
