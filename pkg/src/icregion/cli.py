"""icregion command line.

Exit status: 0 success, 1 a verification failed, 2 bad input or a size guard tripped.
Channel arguments are a file path or inline JSON.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import det_capacity as dc
from . import example_channel as ex
from . import gauss_m2o as gm
from . import gauss_o2m as go
from .det_channel import (MANY_TO_ONE, ONE_TO_MANY, ChannelError, ManyToOneGains, OneToManyGains,
                          gains_from_json)
from .region import RegionError, equals, to_json, vertices

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _load(arg: str) -> dict:
    text = arg if arg.lstrip().startswith("{") else None
    if text is None:
        try:
            text = Path(arg).read_text()
        except OSError as exc:
            raise InputError(f"cannot read {arg}: {exc}") from exc
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from exc
    if not isinstance(d, dict):
        raise InputError("channel JSON must be an object")
    return d


def _floats(s: str) -> list[float]:
    try:
        return [float(x) for x in s.split(",") if x.strip()]
    except ValueError as exc:
        raise InputError(f"bad number list {s!r}") from exc


def _fractions(s: str) -> list[Fraction]:
    try:
        return [Fraction(x.strip()) for x in s.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational list {s!r}") from exc


def _guard_k(k: int, args) -> None:
    if k > args.max_k:
        raise InputError(f"K={k} exceeds --max-k {args.max_k}")


def _emit(doc, args, out) -> None:
    if args.format == "csv":
        rows = doc if isinstance(doc, list) else [doc]
        _write_csv(rows, out)
    else:
        json.dump(doc, out, indent=2, sort_keys=True)
        out.write("\n")


def _flat(v):
    return json.dumps(v, sort_keys=True) if isinstance(v, (list, dict)) else v


def _write_csv(rows: list[dict], out, header: list[str] | None = None) -> None:
    if not rows:
        return
    w = csv.DictWriter(out, fieldnames=header or list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _flat(v) for k, v in r.items()})


# ------------------------------------------------------------ deterministic

def cmd_det_region(args, out) -> int:
    g = gains_from_json(_load(args.channel))
    _guard_k(g.k, args)
    if isinstance(g, OneToManyGains):
        outer, inner = dc.one_to_many_outer(g), dc.one_to_many_hk_region(g)
    else:
        outer, inner = dc.outer_bound(g), dc.achievable_region(g)
    same = equals(outer, inner)
    _emit({"channel": g.to_json(), "outer": to_json(outer), "inner": to_json(inner),
           "equal": same, "verdict": f"inner==outer: {str(same).lower()}"}, args, out)
    return EXIT_OK if same else EXIT_FAIL


def cmd_det_reciprocity(args, out) -> int:
    g = gains_from_json(_load(args.channel))
    _guard_k(g.k, args)
    m2o = g if isinstance(g, ManyToOneGains) else g.reversed()
    ok = dc.reciprocity_check(m2o)
    _emit({"channel": m2o.to_json(), "reversed": m2o.reversed().to_json(), "reciprocal": ok},
          args, out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_det_simulate(args, out) -> int:
    g = gains_from_json(_load(args.channel))
    if not isinstance(g, ManyToOneGains):
        raise InputError("det-simulate needs a many_to_one channel")
    _guard_k(g.k, args)
    rows, ok = [], True
    for v in vertices(dc.outer_bound(g)):
        alloc = dc.allocation_for(g, dc.tight_constraints(g, v), target=v)
        rep = dc.verify_corner_zero_error(g, alloc, args.symbols, args.seed)
        good = rep["errors"] == 0 and tuple(rep["empirical_rates"]) == tuple(v)
        ok &= good
        rows.append({"vertex": [str(x) for x in v], "errors": rep["errors"],
                     "symbols": rep["symbols"],
                     "empirical_rates": [str(x) for x in rep["empirical_rates"]],
                     "allocation": alloc.to_json(), "ok": good})
    _emit(rows if args.format == "csv" else {"channel": g.to_json(), "corners": rows, "ok": ok},
          args, out)
    return EXIT_OK if ok else EXIT_FAIL


def _grid_channels(args):
    k, top = args.k, args.max_gain
    if args.random:
        rnd = random.Random(args.seed)
        for _ in range(args.random):
            yield ManyToOneGains(k, tuple(rnd.randint(0, top) for _ in range(k + 1)),
                                 tuple(rnd.randint(0, top) for _ in range(k)))
        return
    for gains in itertools.product(range(top + 1), repeat=2 * k + 1):
        yield ManyToOneGains(k, gains[:k + 1], gains[k + 1:])


def cmd_det_grid(args, out) -> int:
    _guard_k(args.k, args)
    header = ["n_direct", "n_cross", "inner_equals_outer", "reciprocity", "incompatible_tight_sets"]
    writer = None
    if args.format == "csv":
        writer = csv.DictWriter(out, fieldnames=header, lineterminator="\n")
        writer.writeheader()
    total = fails = 0
    for g in _grid_channels(args):
        outer = dc.outer_bound(g)
        t1 = equals(outer, dc.achievable_region(g))
        rec = equals(outer, dc.one_to_many_outer(g.reversed()))
        l3 = len(dc.incompatible_tight_sets(g))
        total += 1
        fails += not (t1 and rec and l3 == 0)
        if writer:
            writer.writerow({"n_direct": " ".join(map(str, g.n_direct)),
                             "n_cross": " ".join(map(str, g.n_cross)),
                             "inner_equals_outer": t1, "reciprocity": rec, "incompatible_tight_sets": l3})
    if not writer:
        _emit({"k": args.k, "max_gain": args.max_gain, "channels": total, "failures": fails}, args, out)
    return EXIT_OK if fails == 0 else EXIT_FAIL


# ------------------------------------------------------------ Gaussian

def _gauss_params(args):
    if args.channel:
        d = _load(args.channel)
        orient = d.get("orientation", args.topology_default)
        snr, inr = d.get("snr"), d.get("inr")
        if snr is None or inr is None:
            raise InputError("Gaussian JSON needs 'snr' and 'inr'")
    else:
        if args.k is None:
            raise InputError("give a channel or --k for a random one")
        orient = args.topology_default
        snr, inr = gm.log_uniform_gains(random.Random(args.seed), args.k)
    if args.topology:
        orient = {"m2o": MANY_TO_ONE, "o2m": ONE_TO_MANY}[args.topology]
    try:
        snr, inr = [float(x) for x in snr], [float(x) for x in inr]
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad SNR/INR values: {exc}") from exc
    if args.db:
        snr = [10 ** (x / 10) for x in snr]
        inr = [10 ** (x / 10) for x in inr]
    cls = go.GaussOneToManyParams if orient == ONE_TO_MANY else gm.GaussManyToOneParams
    p = cls(tuple(snr), tuple(inr))
    _guard_k(p.k, args)
    if orient == ONE_TO_MANY and p.k > go.MAX_K:
        raise InputError(f"one-to-many regions support K <= {go.MAX_K}")
    return p


def cmd_gauss_region(args, out) -> int:
    p = _gauss_params(args)
    if isinstance(p, go.GaussOneToManyParams):
        outer, inner = go.o2m_outer_region(p), go.o2m_inner_region(p, args.scheme)
        topo = "o2m"
    else:
        outer, inner = gm.outer_region(p, args.form), gm.inner_region(p)
        topo = "m2o"
    _emit({"topology": topo, "form": args.form, "params": p.to_json(),
           "outer": to_json(outer), "inner": to_json(inner)}, args, out)
    return EXIT_OK


def cmd_gauss_gap(args, out) -> int:
    p = _gauss_params(args)
    if isinstance(p, go.GaussOneToManyParams):
        rep = go.o2m_gap_certificate(p, args.tol, args.scheme)
    else:
        rep = gm.gap_certificate(p, args.tol)
    rep = dict(rep, params=p.to_json(), certificate="pass" if rep["certified"] else "fail")
    _emit(rep, args, out)
    return EXIT_OK if rep["certified"] else EXIT_FAIL


def _region_doc(poly) -> dict:
    doc = to_json(poly)
    doc["vertices_float"] = [[float(x) for x in v] for v in vertices(poly)]
    return doc


def cmd_gdof(args, out) -> int:
    spec = gm.GdofSpec(tuple(_fractions(args.alpha)), tuple(_fractions(args.beta)))
    _guard_k(spec.k, args)
    reg = gm.gdof_region(spec)
    same = equals(reg, gm.gdof_scaled_deterministic(spec))
    _emit({"alpha": [str(a) for a in spec.alpha], "beta": [str(b) for b in spec.beta],
           "region": _region_doc(reg), "equals_scaled_deterministic": same}, args, out)
    return EXIT_OK if same else EXIT_FAIL


def cmd_o2m_dof(args, out) -> int:
    n, beta = _fractions(args.n), _fractions(args.beta)
    _guard_k(len(beta), args)
    reg = go.o2m_dof_region(n, beta)
    same = equals(reg, go.o2m_dof_scaled_deterministic(n, beta))
    _emit({"n": [str(x) for x in n], "beta": [str(b) for b in beta],
           "region": _region_doc(reg), "equals_scaled_deterministic": same}, args, out)
    return EXIT_OK if same else EXIT_FAIL


def cmd_example(args, out) -> int:
    ns = [int(x) for x in _floats(args.n)]
    if any(n < 1 for n in ns):
        raise InputError("--n values must be positive integers")
    if args.format == "csv":
        w = csv.DictWriter(out, fieldnames=list(ex.SWEEP_COLUMNS), lineterminator="\n")
        w.writeheader()
        for i, n in enumerate(ns):
            # one row at a time so long sweeps stream
            row = ex.example_sweep([n], args.symbols, args.seed + i)[0]
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
            out.flush()
    else:
        _emit({"rows": ex.example_sweep(ns, args.symbols, args.seed)}, args, out)
    return EXIT_OK


# ------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=1e-9, help="numeric tolerance")
    common.add_argument("--max-k", type=int, default=6, help="refuse channels with more users")
    common.add_argument("--format", choices=("json", "csv"), default=None,
                        help="json, or csv for the example sweep")

    ap = argparse.ArgumentParser(prog="icregion", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    for name, fn, hlp in (("det-region", cmd_det_region, "outer bound, achievable region, equality"),
                          ("det-reciprocity", cmd_det_reciprocity, "many-to-one vs reversed one-to-many"),
                          ("det-simulate", cmd_det_simulate, "zero-error check at every corner")):
        p = sub.add_parser(name, parents=[common], help=hlp)
        p.add_argument("channel", help="JSON file or inline JSON")
        if name == "det-simulate":
            p.add_argument("--symbols", type=int, default=1000)
        p.set_defaults(fn=fn)

    p = sub.add_parser("det-grid", parents=[common], help="exhaustive or random deterministic sweep")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--max-gain", type=int, default=3)
    p.add_argument("--random", type=int, default=0, help="draw this many channels instead")
    p.set_defaults(fn=cmd_det_grid)

    for name, fn, hlp in (("gauss-region", cmd_gauss_region, "Gaussian outer and inner regions"),
                          ("gauss-gap", cmd_gauss_gap, "constant-gap certificate")):
        p = sub.add_parser(name, parents=[common], help=hlp)
        p.add_argument("channel", nargs="?", help="JSON {snr, inr[, orientation]}")
        p.add_argument("--k", type=int, help="random log-uniform channel with K interferers")
        p.add_argument("--topology", choices=("m2o", "o2m"))
        p.add_argument("--form", choices=("loose", "tight"), default="loose")
        p.add_argument("--scheme", choices=go.SCHEMES, default="exact")
        p.add_argument("--db", action="store_true", help="SNR/INR given in dB")
        p.set_defaults(fn=fn, topology_default=MANY_TO_ONE)

    p = sub.add_parser("gdof", parents=[common], help="many-to-one GDoF region")
    p.add_argument("--alpha", required=True, help="comma list, K+1 entries")
    p.add_argument("--beta", required=True, help="comma list, K entries")
    p.set_defaults(fn=cmd_gdof)

    p = sub.add_parser("o2m-dof", parents=[common], help="one-to-many DoF region")
    p.add_argument("--n", required=True)
    p.add_argument("--beta", required=True)
    p.set_defaults(fn=cmd_o2m_dof)

    p = sub.add_parser("example", parents=[common], help="beta sweep of the three-user example")
    p.add_argument("--n", default="2,4,6", help="beta = 4^n for each n")
    p.add_argument("--symbols", type=int, default=10_000)
    p.set_defaults(fn=cmd_example, default_format="csv")
    return ap


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.format is None:
        args.format = getattr(args, "default_format", "json")
    try:
        return args.fn(args, out)
    except (InputError, ChannelError, gm.GaussError, ex.ExampleError, RegionError,
            dc.CapacityError) as exc:
        print(f"icregion: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
