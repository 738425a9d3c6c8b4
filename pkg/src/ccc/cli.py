"""Command line front end: file ingestion, dispatch, reports, figures.

Every command is a thin adapter: it parses arguments, calls one or two
library functions, and serializes the result.  No geometry is computed
here.  Reports are JSON with sorted keys and rationals rendered "p/q",
so identical inputs give byte-identical output.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .cohoracle import hom_module_oracle, refined_char_box, stalk_euler
from .errors import BoundaryPointError, CCCError, InvalidArgument
from .exactlin import complete_to_basis, matrix_inverse
from .fm import (
    ext_case2,
    ext_case3,
    fm3_region,
    fm_case1,
    fm_case2,
    fm_line_bundle_case1,
    fm_line_bundle_case2,
    pixels_contractible,
    poset_embedding_report,
    raster_bitmap,
)
from .stackyfan import (
    discrepancy_compare,
    is_complete,
    parse_contraction,
    parse_same_base,
    parse_stacky_fan,
)
from .svgfig import render_svg
from .thetapos import (
    ThetaIndex,
    format_theta,
    hom_constructible,
    lambda_skeleton,
    parse_theta,
    support,
)

_EXIT = {"ok": 0, "invalid-input": 1, "check-failed": 2}

# grid offset keeping raster pixel centers off every constraint line of the
# bundled setups, including the diagonal ones a half-step grid would hit
_RASTER_ORIGIN = (Fraction(1, 64), Fraction(1, 128))


@dataclass
class Report:
    status: str
    payload: object
    witnesses: list


def _jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    raise InvalidArgument(f"cannot serialize {type(x).__name__} into a report")


def emit_report(report: Report, format: str = "json-lines") -> str:
    doc = {
        "status": report.status,
        "payload": _jsonable(report.payload),
        "witnesses": _jsonable(report.witnesses),
    }
    if format == "json-lines":
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))
    if format == "pretty":
        return json.dumps(doc, sort_keys=True, indent=2)
    raise InvalidArgument(f"unknown report format {format!r}")


def parse_report(text: str) -> Report:
    doc = json.loads(text)
    if set(doc) != {"status", "payload", "witnesses"}:
        raise InvalidArgument("report document needs status, payload and witnesses")
    return Report(status=doc["status"], payload=doc["payload"], witnesses=doc["witnesses"])


def _load(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InvalidArgument(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"{path} is not valid JSON: {exc}") from None


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise InvalidArgument(f"expected comma-separated integers, got {text!r}") from None


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InvalidArgument(f"expected a rational like 3 or 1/8, got {text!r}") from None


def _poly_json(poly) -> dict:
    return {
        "dim": poly.dim,
        "constraints": [
            {"normal": list(n), "threshold": r, "strict": s} for n, r, s in poly.canonical()
        ],
    }


def _witness_box(fan, window: int) -> Fraction:
    """Box bound guaranteed to contain a completed-apex witness point.

    Any support non-inclusion between window thetas is witnessed by the apex
    of the first, completed by zero rows; its coordinates are bounded by the
    window times the worst row sum of the inverted ray matrices.
    """
    worst = Fraction(1)
    for cone in fan.all_cones:
        rows = complete_to_basis([fan.v(i) for i in cone.ray_indices], fan.dim)
        inverse = matrix_inverse([list(r) for r in rows])
        for row in inverse:
            worst = max(worst, sum(abs(c) for c in row))
    return window * worst + 2


def _window_thetas(fan, window: int):
    out = []
    for cone in fan.all_cones:
        for t in itertools.product(range(-window, window + 1), repeat=cone.dim):
            out.append(ThetaIndex(fan=fan, cone=cone, t=t))
    return out


def _charts(setup, window: int):
    """All (J, phi) with the extra ray in J, in deterministic order."""
    free = list(range(setup.n))
    for size in range(len(free) + 1):
        for rest in itertools.combinations(free, size):
            J = tuple(sorted(rest + (setup.extra_index,)))
            if set(setup.i_prime) <= set(J):
                continue
            for phi in itertools.product(range(-window, window + 1), repeat=len(J)):
                yield J, phi


# --- command handlers -------------------------------------------------------


def _cmd_validate(args) -> Report:
    fan = parse_stacky_fan(_load(args.file))
    payload = {
        "dim": fan.dim,
        "rays": len(fan.rays),
        "max_cones": len(fan.max_cones),
        "complete": is_complete(fan),
    }
    return Report(status="ok", payload=payload, witnesses=[])


def _cmd_hom(args) -> Report:
    fan = parse_stacky_fan(_load(args.file))
    th1 = parse_theta(fan, args.theta1)
    th2 = parse_theta(fan, args.theta2)
    res = hom_constructible(th1, th2)
    payload = {"value": res.value, "reason": res.reason}
    status, witnesses = "ok", []
    if args.oracle:
        window = max((abs(t) for th in (th1, th2) for t in th.t), default=0)
        bound = _rational(args.box) if args.box else _witness_box(fan, window)
        oracle = hom_module_oracle(th1, th2, refined_char_box(fan, bound))
        payload["oracle"] = {"value": oracle.value, "reason": oracle.reason, "box": bound}
        if oracle.value != res.value:
            status = "check-failed"
            witnesses = [[format_theta(th1), format_theta(th2)]]
    return Report(status=status, payload=payload, witnesses=witnesses)


def _cmd_fm_same_base(args) -> Report:
    setup = parse_same_base(_load(args.file))
    if args.bundle:
        image = fm_line_bundle_case1(setup, _ints(args.bundle))
        payload = {"bundle": list(image) if image is not None else None}
    else:
        theta = parse_theta(setup.fan_s, args.theta)
        payload = {"theta": format_theta(fm_case1(setup, theta))}
    return Report(status="ok", payload=payload, witnesses=[])


def _cmd_fm_contract_push(args) -> Report:
    setup = parse_contraction(_load(args.file))
    if args.bundle:
        image = fm_line_bundle_case2(setup, _ints(args.bundle))
        payload = {"bundle": list(image) if image is not None else None}
    else:
        theta = parse_theta(setup.sigma2, args.theta)
        image, terms = fm_case2(setup, theta)
        payload = {
            "image": _poly_json(image),
            "terms": [format_theta(t) for t in terms],
        }
    return Report(status="ok", payload=payload, witnesses=[])


def _cmd_fm_contract_pull(args) -> Report:
    setup = parse_contraction(_load(args.file))
    region = fm3_region(setup, _ints(args.J), _ints(args.phi))
    payload = {
        "J": list(region.J),
        "j_prime": list(region.j_prime),
        "i0": region.i0,
        "discrepancy": discrepancy_compare(setup),
        "s1": region.s1,
        "outer": _poly_json(region.outer),
        "inner": _poly_json(region.inner) if region.inner is not None else None,
    }
    return Report(status="ok", payload=payload, witnesses=[])


def _cmd_check_poset(args) -> Report:
    setup = parse_same_base(_load(args.file))
    rep = poset_embedding_report(setup, args.window)
    violations = sorted(
        [format_theta(a), format_theta(b), direction] for a, b, direction in rep.violations
    )
    payload = {
        "window": rep.window,
        "pairs_checked": rep.pairs_checked,
        "verdict": rep.verdict,
        "violations": violations,
    }
    status = "ok" if rep.verdict == "embedding" else "check-failed"
    return Report(status=status, payload=payload, witnesses=violations)


def _cmd_check_hom_oracle(args) -> Report:
    fan = parse_stacky_fan(_load(args.file))
    bound = _rational(args.box) if args.box else _witness_box(fan, args.window)
    box = refined_char_box(fan, bound)
    thetas = _window_thetas(fan, args.window)
    witnesses = []
    pairs = 0
    for th1, th2 in itertools.product(thetas, repeat=2):
        pairs += 1
        fast = hom_constructible(th1, th2)
        slow = hom_module_oracle(th1, th2, box)
        if fast.value != slow.value:
            witnesses.append(
                [format_theta(th1), format_theta(th2), fast.value, slow.value]
            )
    payload = {
        "window": args.window,
        "box": bound,
        "pairs": pairs,
        "disagreements": len(witnesses),
    }
    status = "ok" if not witnesses else "check-failed"
    return Report(status=status, payload=payload, witnesses=sorted(witnesses))


def _cmd_check_sandwich(args) -> Report:
    setup = parse_contraction(_load(args.file))
    window = args.window
    span = 2 * window + 3
    witnesses = []
    charts = 0
    points = 0
    for J, phi in _charts(setup, window):
        charts += 1
        region = fm3_region(setup, J, phi)
        for a in range(-span, span + 1):
            for b in range(-span, span + 1):
                x = (Fraction(a, 2) + Fraction(1, 16), Fraction(b, 4) + Fraction(1, 32))
                inside = region.contains(x)
                if region.inner is not None and region.inner.contains(x) and not inside:
                    witnesses.append([list(J), list(phi), str(x), "inner-escapes"])
                if inside and not region.outer.contains(x):
                    witnesses.append([list(J), list(phi), str(x), "outer-misses"])
                try:
                    euler = stalk_euler(setup, J, phi, x)
                except BoundaryPointError:
                    continue
                points += 1
                if euler != int(inside):
                    witnesses.append([list(J), list(phi), str(x), "stalk-mismatch"])
    payload = {"window": window, "charts": charts, "points": points, "violations": len(witnesses)}
    status = "ok" if not witnesses else "check-failed"
    return Report(status=status, payload=payload, witnesses=sorted(witnesses))


def _cmd_check_contractibility(args) -> Report:
    setup = parse_contraction(_load(args.file))
    if setup.sigma2.dim != 2:
        raise InvalidArgument("contractibility rasters need a two-dimensional setup")
    window = args.window
    bbox = _rational(args.box) if args.box else Fraction(6)
    step = _rational(args.step) if args.step else Fraction(1, 4)
    comparison = discrepancy_compare(setup)
    witnesses = []
    confirmed = 0
    pairs = 0
    def bitmap(obj):
        return raster_bitmap(obj, bbox, step, origin=_RASTER_ORIGIN)

    if comparison in (">=", "="):
        thetas = _window_thetas(setup.sigma2, window)
        images = {th: bitmap(fm_case2(setup, th)[0]) for th in thetas}
        for th1, th2 in itertools.product(thetas, repeat=2):
            verdict = ext_case2(setup, th1, th2)
            if verdict.value != "Zero" or verdict.reason != "contractible-difference":
                continue
            pairs += 1
            if pixels_contractible(images[th1] - images[th2]):
                confirmed += 1
            else:
                witnesses.append(["push", format_theta(th1), format_theta(th2)])
    if comparison in ("<=", "="):
        charts = list(_charts(setup, window))
        regions = {key: bitmap(fm3_region(setup, *key)) for key in charts}
        for key1, key2 in itertools.product(charts, repeat=2):
            verdict = ext_case3(setup, key1, key2)
            if verdict.value != "Zero" or verdict.reason != "contractible-difference":
                continue
            pairs += 1
            if pixels_contractible(regions[key1] - regions[key2]):
                confirmed += 1
            else:
                witnesses.append(
                    ["pull", list(key1[0]), list(key1[1]), list(key2[0]), list(key2[1])]
                )
    payload = {
        "window": window,
        "bbox": bbox,
        "step": step,
        "discrepancy": comparison,
        "pairs": pairs,
        "confirmed": confirmed,
    }
    status = "ok" if not witnesses else "check-failed"
    return Report(status=status, payload=payload, witnesses=sorted(witnesses))


def _cmd_plot_lagrangian(args) -> Report:
    fan = parse_stacky_fan(_load(args.file))
    box = _rational(args.box) if args.box else Fraction(1)
    pieces = lambda_skeleton(fan, args.window, box)
    render_svg("lagrangian", {"fan": fan, "pieces": pieces, "box": box}, args.out)
    return Report(
        status="ok",
        payload={"scene": "lagrangian", "pieces": len(pieces), "out": args.out},
        witnesses=[],
    )


def _cmd_plot_region(args) -> Report:
    doc = _load(args.file)
    box = _rational(args.box) if args.box else Fraction(6)
    if args.J or args.phi:
        if not (args.J and args.phi):
            raise InvalidArgument("staircase plots need both --J and --phi")
        setup = parse_contraction(doc)
        region = fm3_region(setup, _ints(args.J), _ints(args.phi))
        entries = [{"polyhedron": region.outer, "fill": "#4682b4"}]
        if region.inner is not None:
            entries.append({"polyhedron": region.inner, "fill": "#46b482"})
        scene = "region-2d" if setup.sigma2.dim == 2 else "region-1d"
        if setup.sigma2.dim not in (1, 2):
            raise InvalidArgument("region plots support dimensions 1 and 2 only")
        render_svg(scene, {"regions": entries, "box": box}, args.out)
        payload = {"scene": scene, "regions": len(entries), "out": args.out}
    elif args.theta:
        fan = parse_stacky_fan(doc)
        theta = parse_theta(fan, args.theta)
        if fan.dim not in (1, 2):
            raise InvalidArgument("region plots support dimensions 1 and 2 only")
        scene = f"region-{fan.dim}d"
        render_svg(
            scene,
            {"regions": [{"polyhedron": support(theta, open=True)}], "box": box},
            args.out,
        )
        payload = {"scene": scene, "regions": 1, "out": args.out}
    else:
        raise InvalidArgument("plot region needs either --theta or --J with --phi")
    return Report(status="ok", payload=payload, witnesses=[])


# --- parser and entry point -------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidArgument(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="ccc", description="Exact toric orbifold kernel")
    parser.add_argument("--pretty", action="store_true", help="indent the JSON report")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("validate", help="parse and validate a stacky fan file")
    p.add_argument("file")
    p.set_defaults(handler=_cmd_validate)

    p = sub.add_parser("hom", help="hom between two theta indices")
    p.add_argument("file")
    p.add_argument("--theta1", required=True)
    p.add_argument("--theta2", required=True)
    p.add_argument("--oracle", action="store_true", help="also run the module oracle")
    p.add_argument("--box", help="oracle box bound (rational)")
    p.set_defaults(handler=_cmd_hom)

    fm = sub.add_parser("fm", help="apply a transform").add_subparsers(
        dest="subverb", required=True
    )
    p = fm.add_parser("same-base", help="weight-change transform, s to r")
    p.add_argument("file")
    p.add_argument("--bundle", help="line bundle coefficients c1,c2,...")
    p.add_argument("--theta", help="theta index 'cone=...;t=...'")
    p.set_defaults(handler=_cmd_fm_same_base)
    p = fm.add_parser("contract-push", help="pushforward along the contraction")
    p.add_argument("file")
    p.add_argument("--bundle")
    p.add_argument("--theta")
    p.set_defaults(handler=_cmd_fm_contract_push)
    p = fm.add_parser("contract-pull", help="staircase pullback of one chart theta")
    p.add_argument("file")
    p.add_argument("--J", required=True, help="chart ray indices i,j,...")
    p.add_argument("--phi", required=True, help="thresholds c_i per index of J")
    p.set_defaults(handler=_cmd_fm_contract_pull)

    check = sub.add_parser("check", help="run a verification sweep").add_subparsers(
        dest="subverb", required=True
    )
    p = check.add_parser("poset-embedding", help="order embedding of the weight map")
    p.add_argument("file")
    p.add_argument("--window", type=int, default=4)
    p.set_defaults(handler=_cmd_check_poset)
    p = check.add_parser("hom-oracle", help="hom agreement against the module oracle")
    p.add_argument("file")
    p.add_argument("--window", type=int, default=2)
    p.add_argument("--box")
    p.set_defaults(handler=_cmd_check_hom_oracle)
    p = check.add_parser("case3-sandwich", help="staircase sandwich and stalk agreement")
    p.add_argument("file")
    p.add_argument("--window", type=int, default=1)
    p.set_defaults(handler=_cmd_check_sandwich)
    p = check.add_parser("contractibility-2d", help="raster-confirm zero verdicts")
    p.add_argument("file")
    p.add_argument("--window", type=int, default=1)
    p.add_argument("--box")
    p.add_argument("--step")
    p.set_defaults(handler=_cmd_check_contractibility)

    plot = sub.add_parser("plot", help="emit an SVG figure").add_subparsers(
        dest="subverb", required=True
    )
    p = plot.add_parser("lagrangian", help="skeleton phase plot for a 1d fan")
    p.add_argument("file")
    p.add_argument("--window", type=int, default=3)
    p.add_argument("--box")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(handler=_cmd_plot_lagrangian)
    p = plot.add_parser("region", help="support or staircase region figure")
    p.add_argument("file")
    p.add_argument("--theta")
    p.add_argument("--J")
    p.add_argument("--phi")
    p.add_argument("--box")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(handler=_cmd_plot_region)

    return parser


def run(argv) -> int:
    fmt = "pretty" if "--pretty" in argv else "json-lines"
    try:
        args = _build_parser().parse_args(argv)
        report = args.handler(args)
    except CCCError as exc:
        report = Report(status="invalid-input", payload={"error": str(exc)}, witnesses=[])
    print(emit_report(report, fmt))
    return _EXIT[report.status]


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
