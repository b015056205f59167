"""Command-line front end.

    abssep classify   --dims 3x3 --spectrum 3,1,1,1,1,1,1,1,1
    abssep robustness --dims 2x2 --preset rank2 --a 0.9
    abssep scan       --dims 3x3 --samples 1000 --seed 7 --out scan.csv
    abssep oracle     --dims 3x3 --spectrum 15,14,9,9,9,9,9,9,1 --samples 10000
    abssep catalog    verify

Exit codes: 0 computed (whatever the verdict), 2 usage or input error,
3 when the Monte-Carlo oracle rejects a spectrum the criteria accept, and 1
when ``catalog verify`` finds a failing claim.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .errors import AbsSepError
from .spectra import SystemDims, Tolerance, make_spectrum

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_DISAGREEMENT = 3

CSV_HEADER = ["spectrum", "member", "boundary", "extreme", "distinct", "l1", "l2", "purity"]

# condition names printed by the human format
CONDITION_NAMES = {
    "as2n_inequality": "2 x n inequality l1 <= l(2n-1) + 2 sqrt(l(2n-2) l(2n))",
    "L1_psd": "L1(lambda) positive semidefinite",
    "L2_psd": "L2(lambda) positive semidefinite",
    "deficient_rank": "rank-deficient spectrum (only (1,...,1,0) survives)",
    "necessary_bound": "largest-eigenvalue necessary bound violated",
    "subspectrum_3x3": "3 x 3 subspectrum fails the AP test",
    "maximal_ball": "inside the maximal ball",
    "lambda1_extreme": "largest eigenvalue at its maximum 3/(2+mn)",
    "envelope_gap": "between the necessary and sufficient envelopes",
}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# parsing helpers

def _parse_dims(text):
    try:
        return SystemDims.parse(text)
    except AbsSepError as exc:
        raise UsageError(str(exc)) from None


def _parse_spectrum(text):
    try:
        vals = [float(tok) for tok in text.replace(" ", "").split(",") if tok != ""]
    except ValueError:
        raise UsageError(f"cannot parse spectrum {text!r}; expected comma-separated numbers") from None
    if not vals:
        raise UsageError("empty spectrum")
    return np.array(vals)


def _tol(args) -> Tolerance:
    if args.tol is None:
        return Tolerance()
    try:
        return Tolerance(eq_eps=args.tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _spectrum(args, tol):
    if args.dims is None or args.spectrum is None:
        raise UsageError("--dims and --spectrum are required")
    dims = _parse_dims(args.dims)
    raw = _parse_spectrum(args.spectrum)
    total = float(raw.sum())
    if not total > 0:
        raise UsageError("spectrum must have a positive sum")
    try:
        s = make_spectrum(raw / total, dims, tol)
    except AbsSepError as exc:
        raise UsageError(f"{type(exc).__name__}: {exc}") from None
    return s, total


def _clean(obj):
    """Make a structure JSON-safe: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def _fmt_spectrum(values) -> str:
    return ",".join(f"{float(v):.12g}" for v in values)


def _emit(args, config, result, human_lines, csv_rows=None):
    fmt = args.format
    if fmt == "json":
        text = json.dumps(_clean({"tool_version": __version__, "config": config, "result": result}),
                          indent=2, allow_nan=False) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, delimiter=";", lineterminator="\n")
        rows = csv_rows if csv_rows is not None else [[k, json.dumps(_clean(v))] for k, v in result.items()]
        for row in rows:
            w.writerow(row)
        text = buf.getvalue()
    else:
        text = "\n".join(human_lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config(args, **extra):
    cfg = {"command": args.command, "dims": args.dims, "seed": args.seed, "samples": args.samples,
           "tol": args.tol, "format": args.format}
    cfg.update(extra)
    return cfg


# ---------------------------------------------------------------------------
# classify

def classify_document(s, tol):
    from .extremality import classify_extremality
    from .membership import check_membership, classify_boundary
    from .spectra import distinct_count

    mv = check_membership(s, tol)
    doc = {
        "membership": {"set": mv.set_name.value, "status": mv.status.value,
                       "criterion_trace": list(mv.criterion_trace)},
        "margins": dict(mv.margins),
        "details": dict(mv.info),
        "distinct_eigenvalues": distinct_count(s.values, tol.eq_eps),
        "boundary": None,
        "extremality": None,
        "certificates": None,
    }
    if s.dims.small <= 3:
        doc["boundary"] = classify_boundary(s, tol).value
        ev = classify_extremality(s, tol)
        doc["extremality"] = {"status": ev.status.value, "warnings": list(ev.warnings)}
        if isinstance(ev.certificate, np.ndarray):
            doc["certificates"] = {"direction": ev.certificate}
        elif ev.certificate is not None:
            doc["certificates"] = {"conditions": list(ev.certificate)}
    return doc


def cmd_classify(args):
    tol = _tol(args)
    s, total = _spectrum(args, tol)
    doc = classify_document(s, tol)
    result = {"input": _parse_spectrum(args.spectrum), "scale": total,
              "normalized_spectrum": s.values, **doc}
    lines = [
        f"dims            {s.dims}",
        f"spectrum        {_fmt_spectrum(s.values)}  (input scale {total:.12g})",
        f"membership      {doc['membership']['status']} in {doc['membership']['set']}",
    ]
    for tag in doc["membership"]["criterion_trace"]:
        lines.append(f"  condition     {CONDITION_NAMES.get(tag, tag)}")
    for k, v in doc["margins"].items():
        lines.append(f"  margin {k:<8s} {v:.6g}")
    lines.append(f"boundary        {doc['boundary'] or 'undecided for min(m, n) >= 4'}")
    if doc["extremality"]:
        lines.append(f"extremality     {doc['extremality']['status']}")
        for w in doc["extremality"]["warnings"]:
            lines.append(f"  warning       {w}")
    cert = doc["certificates"]
    if cert and "conditions" in cert:
        lines.append(f"  conditions    {', '.join(cert['conditions'])}")
    elif cert:
        lines.append(f"  split along   {_fmt_spectrum(cert['direction'])}")
    lines.append(f"distinct        {doc['distinct_eigenvalues']}")
    rows = [CSV_HEADER, _csv_row(s, tol)]
    _emit(args, _config(args, spectrum=args.spectrum), result, lines, rows)
    return EXIT_OK


# ---------------------------------------------------------------------------
# robustness

def cmd_robustness(args):
    from . import robustness as rb

    tol = _tol(args)
    if args.dims is None:
        raise UsageError("--dims is required")
    dims = _parse_dims(args.dims)
    try:
        if args.preset is not None:
            if args.spectrum is not None:
                raise UsageError("give either --preset or --spectrum, not both")
            if args.preset == "pure":
                res = rb.ar_pure(dims)
            elif args.preset == "uniform-k":
                if args.k is None:
                    raise UsageError("--preset uniform-k needs --k")
                res = rb.ar_uniform_rank_k(dims, args.k)
            elif args.preset == "uniform-2n-2":
                res = rb.ar_uniform_rank_2n_minus_2(dims)
            else:  # rank2
                if args.a is None:
                    raise UsageError("--preset rank2 needs --a")
                if dims.total != 4:
                    raise UsageError("--preset rank2 is for 2x2 systems")
                res = rb.ar_rank2_2x2(args.a)
        else:
            s, _ = _spectrum(args, tol)
            if not args.estimate:
                raise UsageError("arbitrary spectra need --estimate (closed forms come from --preset)")
            res = rb.ar_estimate(s, tol)
    except (AbsSepError, ValueError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"{type(exc).__name__}: {exc}") from None
    result = {
        "value": res.value,
        "method": res.method.value,
        "upper_bound_only": res.upper_bound_only,
        "reference_set": res.reference_set,
        "bisection_width": res.bisection_width,
        "optimal_sigma": res.optimal_sigma,
        "resulting_state": res.resulting_state.values,
    }
    lines = [
        f"robustness      {res.value:.12g}",
        f"method          {res.method.value} (relative to {res.reference_set})",
        f"upper bound only {res.upper_bound_only}",
        f"bisection width {res.bisection_width:.3g}",
        f"optimal sigma   {_fmt_spectrum(res.optimal_sigma) if res.optimal_sigma is not None else 'none (already a member)'}",
        f"resulting state {_fmt_spectrum(res.resulting_state.values)}",
    ]
    _emit(args, _config(args, preset=args.preset, a=args.a, k=args.k, spectrum=args.spectrum),
          result, lines)
    return EXIT_OK


# ---------------------------------------------------------------------------
# scan

def _csv_row(s, tol):
    from .extremality import classify_extremality
    from .membership import build_L, check_membership, classify_boundary
    from .spectra import compress_3n, distinct_count

    mv = check_membership(s, tol)
    member = mv.member
    if s.dims.small <= 3:
        boundary = classify_boundary(s, tol).value == "Boundary"
        extreme = classify_extremality(s, tol).extreme if member else False
    else:
        boundary, extreme = "", ""
    if s.dims.small == 2:
        l1, l2 = mv.info["drt_det"], ""
    elif s.dims.small == 3:
        lp = build_L(compress_3n(s), tol)
        l1, l2 = lp.l1, lp.l2
    else:
        l1 = l2 = ""
    purity = float(np.dot(s.values, s.values))
    return [_fmt_spectrum(s.values), _b(member), _b(boundary), _b(extreme),
            distinct_count(s.values, tol.eq_eps), _g(l1), _g(l2), _g(purity)]


def _b(x):
    return x if x == "" else ("true" if x else "false")


def _g(x):
    return x if x == "" else f"{float(x):.12g}"


def scan_rows(dims, samples, seed, tol):
    """Rows for ``samples`` Dirichlet(1, ..., 1) spectra; sample i uses substream (seed, i)."""
    from .oracle import sample_rng

    rows = []
    for i in range(samples):
        raw = sample_rng(seed, i).dirichlet(np.ones(dims.total))
        rows.append(_csv_row(make_spectrum(raw, dims, tol), tol))
    return rows


def cmd_scan(args):
    tol = _tol(args)
    if args.dims is None:
        raise UsageError("--dims is required")
    dims = _parse_dims(args.dims)
    if dims.small > 3:
        raise UsageError("scan needs exact criteria, so min(m, n) must be at most 3")
    samples = 1000 if args.samples is None else args.samples
    if samples < 0:
        raise UsageError("--samples must be nonnegative")
    rows = scan_rows(dims, samples, args.seed, tol)
    n_member = sum(r[1] == "true" for r in rows)
    n_extreme = sum(r[3] == "true" for r in rows)
    summary = {"samples": samples, "members": n_member, "boundary": sum(r[2] == "true" for r in rows),
               "extreme": n_extreme}
    result = {"summary": summary, "rows": [dict(zip(CSV_HEADER, r)) for r in rows]}
    lines = [f"{k:<10s} {v}" for k, v in summary.items()]
    try:
        _emit(args, _config(args, samples=samples), result, lines, [CSV_HEADER] + rows)
    except OSError as exc:
        raise UsageError(f"cannot write output: {exc}") from None
    return EXIT_OK


# ---------------------------------------------------------------------------
# oracle

def cmd_oracle(args):
    from .membership import BoundaryClass, check_membership, classify_boundary
    from .oracle import mc_ap_check, nonextreme_witness_search

    tol = _tol(args)
    s, _ = _spectrum(args, tol)
    if s.dims.total > 16:
        raise UsageError("the oracle handles m*n <= 16 only")
    samples = 10_000 if args.samples is None else args.samples
    mv = check_membership(s, tol)
    mc = mc_ap_check(s, samples, args.seed)
    disagreement = mc.violated and mv.member
    result = {
        "criterion": mv.status.value,
        "oracle_min_pt_eigenvalue": mc.min_over_samples,
        "oracle_violated": mc.violated,
        "samples": samples,
        "disagreement": disagreement,
        "witness": None,
    }
    lines = [
        f"criterion       {mv.status.value} ({mv.set_name.value})",
        f"oracle min      {mc.min_over_samples:.6g} over {samples} samples"
        f" -> {'violated' if mc.violated else 'no violation'}",
    ]
    if mv.member and s.dims.small <= 3 and classify_boundary(s, tol) is BoundaryClass.Boundary:
        found = nonextreme_witness_search(s, tries=min(samples, 10_000), seed=args.seed, tol=tol)
        result["witness"] = None if found is None else {"alpha": found[0], "beta": found[1]}
        lines.append(f"witness         {'found' if found is not None else 'none found'}")
    if disagreement:
        lines.append("DISAGREEMENT    the oracle rejects a spectrum the criteria accept")
    _emit(args, _config(args, spectrum=args.spectrum, samples=samples), result, lines)
    return EXIT_DISAGREEMENT if disagreement else EXIT_OK


# ---------------------------------------------------------------------------
# catalog

def cmd_catalog(args):
    from . import catalog

    if args.action == "list":
        items = [{"name": e.name, "dims": str(e.spectrum.dims), "spectrum": e.spectrum.values,
                  "claims": list(e.claims), "source": e.source} for e in catalog.entries()]
        lines = [f"{e['name']:<22s} {e['dims']:<5s} {', '.join(e['claims'])}" for e in items]
        rows = [["name", "dims", "spectrum", "claims"]] + [
            [e["name"], e["dims"], _fmt_spectrum(e["spectrum"]), ",".join(e["claims"])] for e in items]
        _emit(args, _config(args, action="list"), {"entries": items}, lines, rows)
        return EXIT_OK
    tol = _tol(args)
    results = catalog.verify_all(tol)
    failed = [r for r in results if not r.passed]
    items = [{"name": r.name, "claim": r.claim, "passed": r.passed, "detail": r.detail} for r in results]
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.name:<22s} {r.claim:<26s} {r.detail}" for r in results]
    lines.append(f"{len(results) - len(failed)}/{len(results)} claims verified")
    rows = [["name", "claim", "passed", "detail"]] + [
        [r.name, r.claim, _b(r.passed), r.detail] for r in results]
    _emit(args, _config(args, action="verify"), {"claims": items, "failed": len(failed)}, lines, rows)
    return EXIT_FAIL if failed else EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dims", help="local dimensions as MxN, e.g. 3x3")
    common.add_argument("--spectrum", help="comma-separated eigenvalues (normalized automatically)")
    common.add_argument("--seed", type=int, default=0, help="base seed for random streams (default 0)")
    common.add_argument("--samples", type=int, default=None,
                        help="sample count (scan default 1000, oracle default 10000)")
    common.add_argument("--tol", type=float, default=None, help="equality tolerance eq_eps (default 1e-9)")
    common.add_argument("--format", choices=["json", "csv", "human"], default="human",
                        help="output format (default human; scan is usually run with csv)")
    common.add_argument("--out", help="write output to this path instead of stdout")

    parser = argparse.ArgumentParser(prog="abssep",
                                     description="Absolute separability / absolute PPT spectral toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("classify", parents=[common], help="membership, boundary and extremality verdicts")

    p = sub.add_parser("robustness", parents=[common], help="robustness of nonabsolute separability")
    p.add_argument("--preset", choices=["pure", "uniform-k", "uniform-2n-2", "rank2"])
    p.add_argument("--k", type=int, help="rank for --preset uniform-k")
    p.add_argument("--a", type=float, help="largest eigenvalue for --preset rank2")
    p.add_argument("--estimate", action="store_true", help="run the numerical estimator on --spectrum")

    sub.add_parser("scan", parents=[common], help="classify random Dirichlet spectra into CSV rows")
    sub.add_parser("oracle", parents=[common], help="Monte-Carlo cross-check of a spectrum")

    p = sub.add_parser("catalog", parents=[common], help="list or verify the named spectra")
    p.add_argument("action", choices=["list", "verify"])
    return parser


COMMANDS = {
    "classify": cmd_classify,
    "robustness": cmd_robustness,
    "scan": cmd_scan,
    "oracle": cmd_oracle,
    "catalog": cmd_catalog,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"abssep {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
