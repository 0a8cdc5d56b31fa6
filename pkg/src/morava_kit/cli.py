"""Command-line front end: ``morava-kit <group> <command> [flags]``.

Every command prints a JSON report (``--format json``, the default) or a
short human-readable summary (``--format text``).  Reports are deterministic
for identical flags.  The exit status is 0 on success, 1 when a verification
fails and 2 on invalid input or insufficient truncation order.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import acceptance
from .fgl import TheoryDescriptor, check_fgl_axioms, theory
from .gkm import EquivariantClass, FixedPointModel, TorusAlgebra, TruncationError, integrate, milnor_number
from .quadric import (
    NotAUnitError,
    QuadricSpec,
    euler_characteristic,
    neza_matrix,
    quadric_model,
    tate_decomposition,
    verify_decomposition,
)
from .rr import PolynomialClass, ch_transport, integrality_report, operation_c, todd_classes, witt_hom_C
from .series import CoefficientElement, SeriesRing, TruncatedSeries
from .witt import WittVector, additive_ghost, ghost_polynomials, morava_ghost, multiplicative_ghost, sigma_polynomials

ORDER_ENV = "MORAVA_KIT_ORDER"


class CommandError(Exception):
    """Invalid input detected after argument parsing."""


# ---------------------------------------------------------------------------
# serialisation helpers
# ---------------------------------------------------------------------------


def _series_json(s: TruncatedSeries) -> dict:
    d = s.to_dict()
    d["text"] = str(s)
    return d


def _coeff_json(c: CoefficientElement) -> dict:
    return {
        "gens": list(c.ring.gens),
        "terms": [{"monomial": list(e), "num": str(v.numerator), "den": str(v.denominator)} for e, v in c.sorted_terms()],
        "text": str(c),
    }


def _point_json(x):
    if isinstance(x, tuple):
        return [_point_json(y) for y in x]
    return x


def _class_json(cls: EquivariantClass) -> dict:
    """Canonical class format: reduced value at every fixed point, in model order."""
    values = []
    for x in cls.model.points:
        v = cls[x].reduce()
        values.append(
            {
                "point": _point_json(x),
                "num": _series_json(v.num),
                "den": [[list(a), k] for a, k in sorted(v.den.items())],
            }
        )
    return {"model": cls.model.name, "values": values}


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise CommandError(f"not a rational number: {text!r}") from exc


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


def _descriptor(args) -> TheoryDescriptor:
    kind = args.theory
    p = None if kind in ("chow", "k0") else args.p
    n = args.n if kind in ("morava", "connective_morava") else None
    try:
        return TheoryDescriptor(kind, p, n)
    except ValueError as exc:
        raise CommandError(str(exc)) from exc


def _order(args, default: int) -> int:
    if args.order is not None:
        order = args.order
    elif os.environ.get(ORDER_ENV):
        try:
            order = int(os.environ[ORDER_ENV])
        except ValueError as exc:
            raise CommandError(f"{ORDER_ENV} must be an integer") from exc
    else:
        order = default
    if order < 2:
        raise CommandError("order must be at least 2")
    return order


def _config(args) -> dict:
    out = {"command": f"{args.group} {args.cmd}", "seed": args.seed}
    if args.group != "acceptance":
        desc = _descriptor(args)
        out["theory"] = {"kind": desc.kind, "p": desc.p, "n": desc.n, "label": desc.label}
        out["order"] = _order(args, 0) if (args.order is not None or os.environ.get(ORDER_ENV)) else None
    if args.group in ("gkm", "quadric"):
        out["l"] = args.l
    return out


# ---------------------------------------------------------------------------
# fgl
# ---------------------------------------------------------------------------


def cmd_fgl_show(args):
    desc = _descriptor(args)
    order = _order(args, 8)
    F = theory(desc, order=order).fgl.F
    return True, {"series": _series_json(F)}, [f"F(x, y) = {F}"]


def cmd_fgl_check(args):
    desc = _descriptor(args)
    order = _order(args, 8)
    report = check_fgl_axioms(theory(desc, order=order).fgl, order)
    checks = [
        {"name": name, "passed": r.is_zero(), "residual": _series_json(r)} for name, r in report.residuals.items()
    ]
    return report.passed, {"checks": checks}, list(report.lines())


def cmd_fgl_phi(args):
    desc = _descriptor(args)
    order = _order(args, 2 * desc.p**desc.n if desc.p else 8)
    phi = theory(desc, order=order).phi
    return True, {"series": _series_json(phi)}, [f"phi(t) = {phi}"]


# ---------------------------------------------------------------------------
# witt
# ---------------------------------------------------------------------------


def _ghost(args):
    desc = _descriptor(args)
    count = args.count if args.count is not None else (len(_parse_vector(args.a)) if getattr(args, "a", None) else 0)
    if desc.kind == "chow":
        return desc, additive_ghost(count or 4)
    if desc.kind == "k0":
        return desc, multiplicative_ghost(count or 4)
    if desc.kind != "morava":
        raise CommandError("witt commands take --theory morava, k0 or chow")
    return desc, morava_ghost(desc.p, desc.n, count or desc.p**desc.n)


def cmd_witt_ghost(args):
    desc, g = _ghost(args)
    polys = ghost_polynomials(g)
    return True, {"ghost": [_series_json(w) for w in polys]}, [f"w{i} = {_poly_text(w)}" for i, w in enumerate(polys, 1)]


def cmd_witt_sigma(args):
    desc, g = _ghost(args)
    polys = sigma_polynomials(g)
    return True, {"sigma": [_series_json(s) for s in polys]}, [f"S{i} = {_poly_text(s)}" for i, s in enumerate(polys, 1)]


def _parse_vector(text: str) -> list:
    """``"[1, 2, -1/3]"``, ``'["1", "1/2"]'`` or ``"1,1/2"`` as a list of fractions."""
    body = text.strip()
    if body.startswith("[") and body.endswith("]"):
        body = body[1:-1]
    items = [c.strip().strip('"').strip("'") for c in body.split(",") if c.strip()]
    return [_fraction(c) for c in items]


def _vector(text: str, g) -> WittVector:
    data = _parse_vector(text)
    if len(data) != g.count:
        raise CommandError(f"vector must be a list of {g.count} rationals")
    return WittVector(data, g)


def _poly_text(s: TruncatedSeries) -> str:
    return str(s).rsplit(" + O(", 1)[0]


def cmd_witt_add(args):
    if args.a is None or args.b is None:
        raise CommandError("witt add needs --a and --b")
    desc, g = _ghost(args)
    a, b = _vector(args.a, g), _vector(args.b, g)
    s = a + b
    coords = [str(c) for c in s]
    return True, {"sum": coords}, [f"a + b = ({', '.join(coords)})"]


# ---------------------------------------------------------------------------
# rr
# ---------------------------------------------------------------------------


def _morava(args) -> TheoryDescriptor:
    desc = _descriptor(args)
    if desc.kind not in ("morava", "connective_morava"):
        raise CommandError("rr commands need a Morava theory (--theory morava)")
    return desc


def _polynomial_class(args, desc) -> PolynomialClass:
    names = tuple(v.strip() for v in args.vars.split(",") if v.strip())
    if args.dim is not None:
        dim = args.dim
    elif args.order is not None or os.environ.get(ORDER_ENV):
        dim = _order(args, 0) - 1
    else:
        dim = desc.p**desc.n
    S = SeriesRing(names, dim + 1, desc.coefficient_ring())
    try:
        series = S.parse(args.cls)
    except (ValueError, SyntaxError, KeyError) as exc:
        raise CommandError(f"cannot parse class {args.cls!r}: {exc}") from exc
    return PolynomialClass(series, desc, dim)


def cmd_rr_todd(args):
    desc = _descriptor(args)
    order = _order(args, 2 * desc.p**desc.n if desc.p else 8)
    data = todd_classes(theory(desc, order=order + 1).phi)
    td, itd = data.td.truncate(order), data.itd.truncate(order)
    return True, {"td": _series_json(td), "itd": _series_json(itd)}, [f"td(t) = {td}", f"td^-1(t) = {itd}"]


def cmd_rr_transport(args):
    desc = _morava(args)
    alpha = _polynomial_class(args, desc)
    ch = ch_transport(alpha)
    return True, {"ch": _series_json(ch.series)}, [f"ch({args.cls}) = {ch}"]


def cmd_rr_c_op(args):
    desc = _morava(args)
    alpha = _polynomial_class(args, desc)
    c = operation_c(alpha)
    report = integrality_report(alpha)
    img = witt_hom_C(alpha)
    ok = all(v[0] for v in report.values())
    result = {
        "c": _series_json(c.series),
        "witt_image": [_series_json(s) for s in img],
        "integral": {k: v[0] for k, v in report.items()},
    }
    lines = [f"c({args.cls}) = {c}"] + [f"{k} integral: {v[0]}" for k, v in report.items()]
    return ok, result, lines


# ---------------------------------------------------------------------------
# gkm
# ---------------------------------------------------------------------------


def _model(args) -> FixedPointModel:
    if args.model:
        try:
            with open(args.model) as fh:
                return FixedPointModel.from_dict(json.load(fh), name=os.path.basename(args.model))
        except (OSError, KeyError, ValueError) as exc:
            raise CommandError(f"cannot read model {args.model}: {exc}") from exc
    return quadric_model(args.l)


def cmd_gkm_integrate(args):
    desc = _descriptor(args)
    M = _model(args)
    order = _order(args, 2 * M.dim + 2)
    alg = TorusAlgebra(desc, M.l, order)
    r = integrate(EquivariantClass.constant(M, alg))
    c = r.constant_term()
    return True, {"equivariant": _series_json(r.num), "value": _coeff_json(c)}, [f"integral of 1 over {M.name}: {c}"]


def cmd_gkm_euler(args):
    desc = _descriptor(args)
    M = _model(args)
    order = _order(args, 2 * M.dim + 2)
    alg = TorusAlgebra(desc, M.l, order)
    e = EquivariantClass.top_euler(M, alg)
    return True, {"top_euler": _class_json(e)}, [f"{x}: {e[x].series()}" for x in M.points]


def cmd_gkm_milnor(args):
    M = _model(args)
    order = _order(args, 2 * M.dim + 2)
    s = milnor_number(M, order)
    return True, {"milnor_number": s}, [f"s_{M.dim}({M.name}) = {s}"]


# ---------------------------------------------------------------------------
# quadric
# ---------------------------------------------------------------------------


def _quadric_spec(args) -> QuadricSpec:
    if args.l < 2:
        raise CommandError("--l must be at least 2")
    desc = _descriptor(args)
    order = _order(args, 0) if (args.order is not None or os.environ.get(ORDER_ENV)) else None
    return QuadricSpec(args.l, desc, order)


def cmd_quadric_euler(args):
    spec = _quadric_spec(args)
    c = euler_characteristic(spec).constant_term()
    return True, {"value": _coeff_json(c)}, [str(c)]


def cmd_quadric_decompose(args):
    spec = _quadric_spec(args)
    dec = tate_decomposition(spec)
    rep = verify_decomposition(dec)
    ok = rep["idempotent"] and rep["orthogonal"] and rep["complete"] and rep["count"] == 2 * spec.l
    result = {
        "summary": dec.summary(),
        "count": rep["count"],
        "idempotent": rep["idempotent"],
        "orthogonal": rep["orthogonal"],
        "complete": rep["complete"],
        "idempotents": [
            {"label": lab, "twist": tw, "class": _class_json(e)}
            for lab, tw, e in zip(dec.labels, dec.twists, dec.idempotents)
        ],
    }
    lines = [
        f"M(Q^{spec.dim}) = {dec.summary()}",
        f"{rep['count']} idempotents; idempotent={rep['idempotent']} orthogonal={rep['orthogonal']} complete={rep['complete']}",
    ]
    return ok, result, lines


def cmd_quadric_neza_rank(args):
    spec = _quadric_spec(args)
    try:
        M, det = neza_matrix(spec)
    except NotImplementedError as exc:
        raise CommandError(str(exc)) from exc
    unit = (not det.is_zero()) and det.is_unit()
    result = {"rank": len(M), "determinant": _coeff_json(det), "unit": unit}
    return unit, result, [f"rank {len(M)}, determinant {det}, unit: {unit}"]


# ---------------------------------------------------------------------------
# acceptance batch mode
# ---------------------------------------------------------------------------


def cmd_acceptance_run(args):
    rows = []
    lines = []
    for key, _, _ in acceptance.CRITERIA:
        k, name, outcome, _ = acceptance.run_one(key, seed=args.seed)
        rows.append({"criterion": k, "name": name, "passed": outcome.ok, "detail": outcome.detail})
        lines.append(f"{k} {'PASS' if outcome.ok else 'FAIL'} {name}: {outcome.detail}")
    return all(r["passed"] for r in rows), {"criteria": rows}, lines


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

COMMANDS = {
    ("fgl", "show"): cmd_fgl_show,
    ("fgl", "check"): cmd_fgl_check,
    ("fgl", "phi"): cmd_fgl_phi,
    ("witt", "ghost"): cmd_witt_ghost,
    ("witt", "sigma"): cmd_witt_sigma,
    ("witt", "add"): cmd_witt_add,
    ("rr", "todd"): cmd_rr_todd,
    ("rr", "transport"): cmd_rr_transport,
    ("rr", "c-op"): cmd_rr_c_op,
    ("gkm", "integrate"): cmd_gkm_integrate,
    ("gkm", "euler"): cmd_gkm_euler,
    ("gkm", "milnor"): cmd_gkm_milnor,
    ("quadric", "decompose"): cmd_quadric_decompose,
    ("quadric", "euler"): cmd_quadric_euler,
    ("quadric", "neza-rank"): cmd_quadric_neza_rank,
    ("acceptance", "run"): cmd_acceptance_run,
}

THEORIES = ["chow", "k0", "morava", "connective_morava", "bp"]


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=2, help="prime (default 2)")
    common.add_argument("--n", type=int, default=1, help="height (default 1)")
    common.add_argument("--order", type=int, default=None, help=f"truncation order (default: ${ORDER_ENV} or per command)")
    common.add_argument("--l", type=int, default=2, help="half the dimension of the quadratic space (default 2)")
    common.add_argument("--theory", choices=THEORIES, default="morava")
    common.add_argument("--format", choices=["json", "text"], default="json")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    common.add_argument("--out", default=None, help="also write the report to this file")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="morava-kit", description="Formal group laws, Witt vectors, Riemann-Roch and quadric motives.")
    groups = parser.add_subparsers(dest="group", required=True)
    common = _common()
    by_group = {}
    for group, cmd in COMMANDS:
        by_group.setdefault(group, []).append(cmd)
    for group, cmds in by_group.items():
        gp = groups.add_parser(group).add_subparsers(dest="cmd", required=True)
        for cmd in cmds:
            sp = gp.add_parser(cmd, parents=[common])
            if group == "witt":
                sp.add_argument("--count", type=int, default=None, help="number of Witt coordinates")
                if cmd == "add":
                    sp.add_argument("--a", default=None, help="JSON list of rationals")
                    sp.add_argument("--b", default=None, help="JSON list of rationals")
            if group == "rr" and cmd != "todd":
                sp.add_argument("--class", dest="cls", default="x", help="polynomial in the generators, e.g. 'x*y + v1*x^2'")
                sp.add_argument("--vars", default="x", help="comma-separated generator names")
                sp.add_argument("--dim", type=int, default=None, help="dimension of the variety (default p^n)")
            if group == "gkm":
                sp.add_argument("--model", default=None, help="fixed-point model JSON (default: the split quadric for --l)")
    return parser


def _render(ok: bool, config: dict, result: dict, lines, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({**config, "ok": ok, "result": result}, indent=2, sort_keys=True)
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fn = COMMANDS[(args.group, args.cmd)]
    try:
        ok, result, lines = fn(args)
    except TruncationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NotAUnitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (CommandError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    config = _config(args)
    text = _render(ok, config, result, lines, args.format)
    print(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
