"""Command-line interface.

Subcommands: synth, phi, tune, metrics, baseline, experiment.
Exit codes: 0 success, 1 usage error, 2 data/validation error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .correlation import adjustment_count, adjustment_proportion, contingency, phi
from .errors import CotuneError, ParseError, SchemaError, UndefinedCorrelationError
from .harness import ExperimentConfig, Method, emit_report, run_experiment
from .metrics import MetricsBundle, group_fairness, intersectional_fairness, performance
from .tabular import (
    SynthSpec,
    load_csv,
    schema_from_json,
    synth_schema,
    synthesize,
    write_csv,
    write_schema_json,
)
from .tradeoff import build_baseline, classify
from .tuning import LossKind, MultiMethod, OptConfig, tune_analytic, tune_optimized, tune_sequential

USAGE_EXIT = 1
DATA_EXIT = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage problems; the contract here is exit 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def _attr_list(text: str) -> list[str]:
    attrs = [a.strip() for a in text.split(",") if a.strip()]
    if not attrs:
        raise argparse.ArgumentTypeError("expected a comma-separated attribute list")
    return attrs


def _build_parser() -> _Parser:
    parser = _Parser(prog="cotune", description=__doc__)
    parser.add_argument("--version", action="version", version=f"cotune {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("synth", parents=[], help="generate a synthetic dataset from a recipe JSON")
    p.add_argument("--spec", required=True, help="recipe JSON (counts, feature_dim, group_signal, noise_sd, seed)")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--schema-out", default=None, help="also write the matching schema JSON here")

    p = sub.add_parser("phi", help="report contingency counts, phi, and the analytic flip count")
    p.add_argument("--data", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--attr", default=None, help="restrict to one sensitive attribute")

    p = sub.add_parser("tune", help="write a tuned copy of a dataset plus a JSON sidecar")
    p.add_argument("--data", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--method", required=True, choices=["phi", "opt"])
    p.add_argument("--attrs", required=True, type=_attr_list, metavar="A[,B]")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--loss", choices=["single", "intersectional"], default="single")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("metrics", help="score a predictions CSV (y_true, y_pred, attribute columns)")
    p.add_argument("--data", required=True)
    p.add_argument("--attrs", required=True, type=_attr_list, metavar="A[,B]")
    p.add_argument("--true-col", default="y_true")
    p.add_argument("--pred-col", default="y_pred")

    p = sub.add_parser("baseline", help="build a trade-off baseline curve from a predictions CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--attr", required=True)
    p.add_argument("--fairness", choices=["spd", "aod", "eod"], default="aod")
    p.add_argument("--performance", choices=["accuracy", "precision", "recall", "f1", "mcc"], default="accuracy")
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--true-col", default="y_true")
    p.add_argument("--pred-col", default="y_pred")
    p.add_argument("--candidate", nargs=2, type=float, default=None, metavar=("FAIRNESS", "PERFORMANCE"))
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("experiment", help="run the repeated-split experiment and write report files")
    p.add_argument("--data", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--method", required=True, choices=["original", "phi", "opt"])
    p.add_argument("--attrs", required=True, type=_attr_list, metavar="A[,B]")
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--train-fraction", type=float, default=0.7)
    p.add_argument("--loss", choices=["single", "intersectional"], default="single")
    p.add_argument("--out", required=True, help="output directory")

    return parser


def _read_predictions(path, true_col: str, pred_col: str, attrs: list[str]):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file, header row required")
        for col in (true_col, pred_col, *attrs):
            if col not in reader.fieldnames:
                raise SchemaError(f"{path}: column {col!r} not present in header")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")

    def column(name):
        out = np.empty(len(rows), dtype=np.int64)
        for i, row in enumerate(rows):
            try:
                value = int(row[name])
            except ValueError:
                raise ParseError(f"{path}: row {i}, column {name!r}: expected 0/1") from None
            if value not in (0, 1):
                raise ParseError(f"{path}: row {i}, column {name!r}: expected 0/1, got {value}")
            out[i] = value
        return out

    return column(true_col), column(pred_col), {a: column(a) for a in attrs}


def _json_safe(value):
    if isinstance(value, float) and (np.isnan(value) or np.isinf(value)):
        return None
    return value


def _cmd_synth(args) -> int:
    doc = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    try:
        spec = SynthSpec(
            counts=tuple(int(c) for c in doc["counts"]),
            feature_dim=int(doc.get("feature_dim", 2)),
            group_signal=float(doc.get("group_signal", 1.0)),
            noise_sd=float(doc.get("noise_sd", 1.0)),
            seed=int(doc.get("seed", 0)),
            attr_name=str(doc.get("attr_name", "group")),
            label_name=str(doc.get("label_name", "outcome")),
        )
    except KeyError as e:
        raise SchemaError(f"synth recipe missing key: {e}") from e
    data = synthesize(spec)
    write_csv(data, args.out)
    if args.schema_out:
        write_schema_json(synth_schema(spec), args.schema_out)
    print(f"wrote {data.n_rows} rows to {args.out}")
    return 0


def _cmd_phi(args) -> int:
    schema = schema_from_json(args.schema)
    data = load_csv(args.data, schema)
    attrs = [args.attr] if args.attr else list(schema.sensitive_columns)
    report = {}
    for attr in attrs:
        t = contingency(data, attr)
        entry = {
            "counts": {"n11": t.n11, "n10": t.n10, "n01": t.n01, "n00": t.n00},
            "total": t.total,
        }
        try:
            entry["phi"] = phi(t)
            entry["adjustment_count"] = adjustment_count(t)
            entry["adjustment_proportion"] = adjustment_proportion(t) if t.n11 else None
        except UndefinedCorrelationError as e:
            entry.update({"phi": None, "adjustment_count": None, "adjustment_proportion": None, "note": str(e)})
        report[attr] = entry
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def _cmd_tune(args) -> int:
    schema = schema_from_json(args.schema)
    data = load_csv(args.data, schema)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    loss_kind = LossKind(args.loss)
    opt_cfg = OptConfig(loss_kind=loss_kind)

    if len(args.attrs) == 1:
        attr = args.attrs[0]
        if args.method == "phi":
            result = tune_analytic(data, attr, args.seed)
        else:
            result = tune_optimized(data, attr, opt_cfg, args.seed)
        sidecar = {
            "method": args.method,
            "phi_before": _json_safe(result.phi_before),
            "phi_after": _json_safe(result.phi_after),
            "flips": int(result.flipped_indices.size),
            "proportion": result.proportion_applied,
        }
        tuned = result.dataset
    else:
        multi = MultiMethod(args.method)
        result = tune_sequential(data, args.attrs, multi, opt_cfg, args.seed)
        sidecar = {
            "method": args.method,
            "stages": [
                {
                    "attr": attr,
                    "phi_before": _json_safe(r.phi_before),
                    "phi_after": _json_safe(r.phi_after),
                    "flips": int(r.flipped_indices.size),
                    "proportion": r.proportion_applied,
                }
                for attr, r in result.stages
            ],
        }
        tuned = result.dataset

    data_path = out / "tuned.csv"
    write_csv(tuned, data_path)
    (out / "tuning.json").write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {data_path}")
    return 0


def _cmd_metrics(args) -> int:
    y_true, y_pred, attr_cols = _read_predictions(args.data, args.true_col, args.pred_col, args.attrs)
    perf = performance(y_true, y_pred)
    fair = group_fairness(y_true, y_pred, attr_cols[args.attrs[0]])
    inter = {}
    if len(args.attrs) >= 2:
        ids = np.zeros(y_true.size, dtype=np.int64)
        for attr in args.attrs:
            ids = ids * 2 + attr_cols[attr]
        inter = intersectional_fairness(y_true, y_pred, ids)
    bundle = MetricsBundle(**perf, **fair, **inter)
    print(json.dumps(bundle.as_dict(), indent=2, sort_keys=True))
    return 0


def _cmd_baseline(args) -> int:
    y_true, y_pred, attr_cols = _read_predictions(args.data, args.true_col, args.pred_col, [args.attr])
    curve = build_baseline(
        y_true,
        y_pred,
        attr_cols[args.attr],
        fairness_metric=args.fairness,
        performance_metric=args.performance,
        repeats=args.repeats,
        seed=args.seed,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    doc = {
        "fairness_metric": curve.fairness_metric,
        "performance_metric": curve.performance_metric,
        "points": [
            {"mutation_rate": p.mutation_rate, "fairness": p.fairness, "performance": p.performance}
            for p in curve.points
        ],
    }
    if args.candidate is not None:
        region = classify((args.candidate[0], args.candidate[1]), curve)
        doc["candidate"] = {
            "fairness": args.candidate[0],
            "performance": args.candidate[1],
            "region": region.value,
        }
    (out / "curve.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    with open(out / "curve.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["mutation_rate", "fairness", "performance"])
        for p in curve.points:
            writer.writerow([repr(p.mutation_rate), repr(p.fairness), repr(p.performance)])
    print(f"wrote {out / 'curve.json'}")
    return 0


def _cmd_experiment(args) -> int:
    cfg = ExperimentConfig(
        data_path=args.data,
        schema_path=args.schema,
        method=Method(args.method),
        attrs=tuple(args.attrs),
        runs=args.runs,
        train_fraction=args.train_fraction,
        seed_base=args.seed_base,
        opt=OptConfig(loss_kind=LossKind(args.loss)),
        output_path=args.out,
    )
    report = run_experiment(cfg)
    report_path, csv_path = emit_report(report, args.out)
    print(f"wrote {report_path} and {csv_path}")
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "phi": _cmd_phi,
    "tune": _cmd_tune,
    "metrics": _cmd_metrics,
    "baseline": _cmd_baseline,
    "experiment": _cmd_experiment,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return USAGE_EXIT
    try:
        return _COMMANDS[args.command](args)
    except CotuneError as e:
        print(f"cotune {args.command}: {e}", file=sys.stderr)
        return DATA_EXIT
    except (OSError, json.JSONDecodeError) as e:
        print(f"cotune {args.command}: {e}", file=sys.stderr)
        return DATA_EXIT


def entrypoint():  # console script hook
    raise SystemExit(main())
