"""Command-line harness.

Subcommands: green, equilibrium, sweep-chi, sweep-eq, contraction, graph,
pairing.  Tables go to --out (CSV default, JSON by extension) or stdout.
Exit codes: 0 success, 2 configuration error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from .affable import AffableError
from .graphs import GraphError, PLFunction, dirichlet_extend, graph_from_json, graph_laplacian
from .green import GreenError, lambda_limit
from .measures import MeasureError, equilibrium_arch, equilibrium_nonarch, measure_to_rows
from .places import Place, PlaceError, place_from_json
from .points import point_from_json
from .rmaps import MapError, lift_from_json
from .sweeps import (
    SweepConfig,
    SweepError,
    circle_sample,
    default_skeleton,
    report_contraction,
    sweep_chi,
    sweep_equilibrium,
)
from .measures import energy_pairing

CONFIG_ERRORS = (SweepError, PlaceError, MapError, GraphError, AffableError,
                 json.JSONDecodeError, KeyError, ValueError, OSError)
NUMERIC_ERRORS = (GreenError, MeasureError, ArithmeticError)


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _parse_place(text: str) -> Place:
    return place_from_json(json.loads(text))


def _emit(rows, header, out_path, quiet):
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    text = buf.getvalue()
    if out_path:
        if out_path.endswith(".json"):
            payload = [dict(zip(header, row)) for row in rows]
            with open(out_path, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, indent=1)
        else:
            with open(out_path, "w", encoding="utf-8") as fh:
                fh.write(text)
        if not quiet:
            print(f"wrote {out_path}")
    else:
        sys.stdout.write(text)


def _cmd_green(args) -> int:
    lift = lift_from_json(_load_json(args.map))
    place = _parse_place(args.place)
    pts = [point_from_json(p) for p in _load_json(args.points)]
    rows = []
    unit = place.log_unit
    for idx, x in enumerate(pts):
        st = lambda_limit(place, lift, x, args.tol)
        rows.append((idx, float(st.value) * unit, st.n_used, st.certified_error))
    _emit(rows, ["point_id", "lambda", "n_used", "certified_error"], args.out, args.quiet)
    return 0


def _cmd_equilibrium(args) -> int:
    lift = lift_from_json(_load_json(args.map))
    place = _parse_place(args.place)
    if args.mode == "arch":
        seed = complex(args.seed_point.replace("i", "j")) if args.seed_point else 2 + 0j
        mu = equilibrium_arch(place, lift, seed, args.n)
        report = None
    else:
        skel = graph_from_json(_load_json(args.skeleton)) if args.skeleton else default_skeleton(place)
        mu, report = equilibrium_nonarch(place, lift, skel, args.tol)
    _emit(measure_to_rows(place, mu), ["kind", "point_or_center", "logr_or_radius", "weight"],
          args.out, args.quiet)
    if report is not None and not args.quiet:
        print(f"total_mass={report.total_mass} min_atom_weight={report.min_atom_weight} "
              f"negative_atoms={report.negative_atoms}")
    return 0


def _sweep_rows(table):
    return [
        (r.place_kind, r.place_param, r.fn_id, r.value, r.cert_err, r.n_used)
        for r in table.rows
    ]


def _cmd_sweep(args, which: str) -> int:
    cfg = SweepConfig.from_json(_load_json(args.config))
    if args.seed is not None:
        cfg.rng_seed = args.seed
    table = sweep_chi(cfg) if which == "chi" else sweep_equilibrium(cfg)
    _emit(_sweep_rows(table), ["place_kind", "place_param", "fn_id", "value", "cert_err", "n_used"],
          args.out, args.quiet)
    if not args.quiet:
        for fid, diffs in table.modulus.items():
            shown = ["-" if d is None else f"{d:.3e}" for d in diffs]
            print(f"modulus {fid}: {' '.join(shown)}")
    return 0


def _cmd_contraction(args) -> int:
    lift = lift_from_json(_load_json(args.map))
    place = _parse_place(args.place)
    parts = args.sample.split(":")
    if parts[0] != "circle":
        raise SweepError(f"unknown sample format {args.sample!r}")
    count = int(parts[1]) if len(parts) > 1 else 64
    radius = float(parts[2]) if len(parts) > 2 else 1.0
    if place.is_ultrametric:
        from .sweeps import unit_sphere_sample_padic

        sample = unit_sphere_sample_padic(place, count)
    else:
        sample = circle_sample(count, radius)
    rows = []
    for n, ratio in report_contraction(lift, place, sample, args.n):
        rows.append((n, "exact-0" if ratio is None else ratio))
    _emit(rows, ["n", "ratio"], args.out, args.quiet)
    return 0


def _cmd_graph(args) -> int:
    graph = graph_from_json(_load_json(args.graph))
    if args.op == "laplacian":
        values = [Fraction(str(v)) for v in _load_json(args.values)]
        mu = graph_laplacian(PLFunction(graph, values))
        rows = [(v, str(w)) for v, w in mu.atoms]
        _emit(rows, ["vertex_id", "weight"], args.out, args.quiet)
        return 0
    if args.op == "dirichlet":
        bvals = {int(k): Fraction(str(v)) for k, v in _load_json(args.boundary_values).items()}
        u = dirichlet_extend(graph, bvals)
        rows = [(v, str(x)) for v, x in enumerate(u.values)]
        _emit(rows, ["vertex_id", "value"], args.out, args.quiet)
        return 0
    raise SweepError(f"unknown graph op {args.op!r}")


def _cmd_pairing(args) -> int:
    lift_f = lift_from_json(_load_json(args.map))
    lift_g = lift_from_json(_load_json(args.map2))
    place = _parse_place(args.place)
    skel = default_skeleton(place) if place.is_ultrametric else None
    val = energy_pairing(place, lift_f, lift_g, n=args.n, tol=args.tol, skeleton=skel)
    print(val)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="berkpot", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", help="output path (.csv or .json)")
        p.add_argument("--seed", type=int, default=None, help="probe-set RNG seed")
        p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("green", help="canonical potentials at points")
    p.add_argument("--map", required=True)
    p.add_argument("--place", required=True)
    p.add_argument("--points", required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    common(p)
    p.set_defaults(fn=_cmd_green)

    p = sub.add_parser("equilibrium", help="equilibrium measure at one place")
    p.add_argument("--map", required=True)
    p.add_argument("--place", required=True)
    p.add_argument("--mode", choices=["arch", "nonarch"], required=True)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--seed", dest="seed_point", default="2+0i",
                   help="seed point for the preimage tree, e.g. 2+0i")
    p.add_argument("--skeleton")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--out", help="output path (.csv or .json)")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(fn=_cmd_equilibrium)

    p = sub.add_parser("sweep-chi", help="circle-family sweep over the base")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(fn=lambda a: _cmd_sweep(a, "chi"))

    p = sub.add_parser("sweep-eq", help="equilibrium-family sweep over the base")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(fn=lambda a: _cmd_sweep(a, "eq"))

    p = sub.add_parser("contraction", help="metric-iteration contraction report")
    p.add_argument("--map", required=True)
    p.add_argument("--place", required=True)
    p.add_argument("--n", type=int, default=12)
    p.add_argument("--sample", default="circle:64")
    common(p)
    p.set_defaults(fn=_cmd_contraction)

    p = sub.add_parser("graph", help="metric-graph utilities")
    p.add_argument("--op", choices=["laplacian", "dirichlet"], required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--values", help="JSON list of vertex values (laplacian)")
    p.add_argument("--boundary-values", help="JSON map vertex -> value (dirichlet)")
    common(p)
    p.set_defaults(fn=_cmd_graph)

    p = sub.add_parser("pairing", help="mutual energy of two equilibrium measures")
    p.add_argument("--map", required=True)
    p.add_argument("--map2", required=True)
    p.add_argument("--place", required=True)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--tol", type=float, default=1e-8)
    common(p)
    p.set_defaults(fn=_cmd_pairing)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except NUMERIC_ERRORS as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except CONFIG_ERRORS as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
