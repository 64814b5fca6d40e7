"""Command-line entry point: ``cluster``, ``generate`` and ``validate``.

Reports are single JSON documents carrying ``schema_version``.  On failure
the document holds an ``error`` object with a stable code and the process
exits with 2 (usage/input) or 3 (solver failure).
"""

import argparse
import json
import logging
import math
import os
import sys
import time
from dataclasses import asdict

from . import gen, validate
from .data import CenterSet, assign, load_csv, load_labels, write_csv
from .errors import ClustError, DimensionMismatch, TooFewClusters
from .splitter import SplitConfig, run

SCHEMA_VERSION = "1"
SUMMARY_COLUMNS = ("k", "f_k", "E_k", "DBI", "DI", "t_k")

log = logging.getLogger("clust_splitter")


def _error_object(exc):
    if isinstance(exc, ClustError):
        err = {"code": exc.code, "message": str(exc)}
        if getattr(exc, "row", None) is not None:
            err["row"] = exc.row
            err["col"] = exc.col
        return err, exc.exit_code
    if isinstance(exc, FileNotFoundError):
        return {"code": "E_IO_NOT_FOUND", "message": f"file not found: {exc.filename}"}, 2
    if isinstance(exc, OSError):
        return {"code": "E_IO", "message": str(exc)}, 2
    if isinstance(exc, ValueError):
        return {"code": "E_USAGE", "message": str(exc)}, 2
    raise exc


def _finite_or_none(v):
    if v is None or not math.isfinite(v):
        return None
    return float(v)


def write_json(path, doc):
    text = json.dumps(doc, indent=2, allow_nan=False)
    if path in (None, "-"):
        sys.stdout.write(text + "\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def load_fbest(path, scale=1.0):
    """``k,f_best`` rows (header and blank lines allowed) scaled by ``scale``."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = [p.strip() for p in line.split(",")]
            if len(parts) < 2 or not parts[0]:
                continue
            try:
                out[int(parts[0])] = float(parts[1]) * scale
            except ValueError:
                continue
    return out


def _indices(dataset, centers):
    """DBI and DI (None when undefined) plus a status string."""
    if centers.k < 2:
        return None, None, TooFewClusters.code
    try:
        rep = validate.validity_report(dataset, centers)
    except ClustError as exc:
        return None, None, exc.code
    if rep.di_status == "zero_radius":
        return rep.dbi, None, "ZERO_RADIUS"
    return rep.dbi, rep.di, "ok"


def _external(dataset, centers, labels):
    if labels.shape[0] != dataset.m:
        raise validate.LengthMismatch(f"{labels.shape[0]} labels for {dataset.m} points")
    pred = assign(dataset, centers).labels
    return {"k": centers.k, "accuracy": validate.accuracy(labels, pred),
            "ARI": validate.adjusted_rand(labels, pred)}


def cmd_cluster(args):
    t0 = time.perf_counter()
    dataset = load_csv(args.input, delimiter=args.delimiter, has_header=args.header)
    t_init = time.perf_counter() - t0
    labels = load_labels(args.labels) if args.labels else None
    fbest = load_fbest(args.fbest, args.fbest_scale) if args.fbest else {}

    cfg = SplitConfig(k_max=args.kmax, p=args.starts, M1=args.m1, M2=args.m2,
                      min_split_size=args.min_split, seed=args.seed)
    result = run(dataset, cfg)

    levels = []
    for lv in result.levels:
        row = {"k": lv.k, "f_k": lv.f, "t_k": lv.elapsed_seconds,
               "split_cluster_index": lv.split_cluster_index,
               "degenerate_split": lv.degenerate_split, "solver_status": lv.solver_status,
               "E_k": None, "DBI": None, "DI": None}
        if lv.k in fbest:
            row["E_k"] = validate.relative_error(lv.f, fbest[lv.k])
        if args.indices:
            dbi, di, status = _indices(dataset, lv.centers)
            row.update(DBI=_finite_or_none(dbi), DI=_finite_or_none(di), indices_status=status)
        levels.append(row)

    errors = {row["k"]: row["E_k"] for row in levels if row["E_k"] is not None}
    summary = {}
    if all(k in errors for k in validate.K_LEVELS):
        summary["E_aver"] = validate.average_relative_error(errors)

    final = result.levels[-1]
    doc = {
        "schema_version": SCHEMA_VERSION,
        "status": result.status,
        "run": {
            "dataset": os.path.abspath(args.input), "m": dataset.m, "n": dataset.n,
            "config": {k: v for k, v in asdict(cfg).items() if k != "solver"},
            "seed": cfg.seed, "threads": os.environ.get("CLUST_THREADS", "0"),
            "t_init": t_init, "t_total": t_init + final.elapsed_seconds,
        },
        "levels": levels,
        "summary": summary,
        "warnings": list(result.warnings),
    }
    if labels is not None:
        doc["external"] = _external(dataset, final.centers, labels)
    if args.centers_out:
        write_csv(args.centers_out, final.centers.coords, args.delimiter)
    if args.summary:
        _write_summary(args.summary, levels)
    if args.plots:
        from .plotting import write_run_figures
        doc["figures"] = write_run_figures(args.plots, dataset, levels, final.centers)
    write_json(args.out, doc)
    return 0


def _write_summary(path, levels):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(SUMMARY_COLUMNS) + "\n")
        for row in levels:
            cells = ["" if row.get(c) is None else repr(row[c]) for c in SUMMARY_COLUMNS]
            fh.write(",".join(cells) + "\n")


def cmd_generate(args):
    cfg = gen.GenConfig(outlier_fraction=args.outliers, n_datasets=args.count, seed=args.seed)
    os.makedirs(args.outdir, exist_ok=True)
    written = []
    for i in range(cfg.n_datasets):
        ds, labels = gen.generate(cfg, i)
        stem = os.path.join(args.outdir, f"data_{i:02d}")
        write_csv(stem + ".csv", ds.points)
        with open(stem + "_labels.txt", "w", encoding="utf-8") as fh:
            fh.write("\n".join(str(int(v)) for v in labels) + "\n")
        written.append(stem + ".csv")
    write_json(args.out, {"schema_version": SCHEMA_VERSION, "status": "ok",
                          "outlier_fraction": cfg.outlier_fraction, "seed": cfg.seed,
                          "files": written})
    return 0


def cmd_validate(args):
    dataset = load_csv(args.input, delimiter=args.delimiter, has_header=args.header)
    centers = CenterSet(load_csv(args.centers, delimiter=args.delimiter).points)
    if centers.n != dataset.n:
        raise DimensionMismatch(f"centers have n={centers.n}, dataset has n={dataset.n}")
    dbi, di, status = _indices(dataset, centers)
    doc = {"schema_version": SCHEMA_VERSION, "status": "ok", "k": centers.k,
           "f_k": float(assign(dataset, centers).sq_dists.sum()),
           "DBI": _finite_or_none(dbi), "DI": _finite_or_none(di), "indices_status": status}
    if args.labels:
        doc["external"] = _external(dataset, centers, load_labels(args.labels))
    write_json(args.out, doc)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="clust-splitter",
                                     description="Incremental minimum sum-of-squares clustering.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def io_flags(p):
        p.add_argument("--input", required=True, help="numeric CSV, one point per row")
        p.add_argument("--delimiter", default=",")
        p.add_argument("--header", action="store_true", help="skip the first row")
        p.add_argument("--labels", help="reference labels, one integer per line")
        p.add_argument("--out", default="-", help="report path (default: stdout)")

    p = sub.add_parser("cluster", help="run the incremental clustering")
    io_flags(p)
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--starts", type=int, default=3, help="starting points per split (p)")
    p.add_argument("--m1", type=int, default=10)
    p.add_argument("--m2", type=int, default=7)
    p.add_argument("--min-split", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fbest", help="CSV of k,f_best reference values")
    p.add_argument("--fbest-scale", type=float, default=1.0)
    p.add_argument("--indices", action="store_true", help="compute DBI and DI per level")
    p.add_argument("--centers-out", help="write the final centers as CSV")
    p.add_argument("--summary", help="write a k,f_k,E_k,DBI,DI,t_k CSV table")
    p.add_argument("--plots", help="directory for PNG figures")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("generate", help="write synthetic three-cluster datasets")
    p.add_argument("--outliers", type=float, default=0.0)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--outdir", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("validate", help="score stored centers")
    io_flags(p)
    p.add_argument("--centers", required=True, help="CSV, one center per row")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - every failure becomes an error object
        err, code = _error_object(exc)
        doc = {"schema_version": SCHEMA_VERSION, "status": "error", "error": err}
        out = getattr(args, "out", None)
        try:
            write_json(out, doc)
        except OSError:
            write_json(None, doc)
        if out not in (None, "-"):
            sys.stderr.write(json.dumps(err) + "\n")
        return code


if __name__ == "__main__":
    sys.exit(main())
