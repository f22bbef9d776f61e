"""Repeated-run experiment driver and report serialization.

Protocol per run i (seed = seed_base + i): split the dataset 70/30 (seeded),
fit the classifier on the raw training part, apply the configured tuning
method to the same training part and fit again, then evaluate both models on
the identical test part. Trade-off regions are computed for all fifteen
fairness x performance metric pairs against a baseline rebuilt from that
run's original test predictions, so no information crosses runs.

Aggregation reports per-metric means and changes; fairness changes across the
run samples are additionally tested with the rank statistics. Everything
downstream of the config is deterministic, so two runs of the same config
serialize to byte-identical files.
"""

from __future__ import annotations

import csv
import enum
import json
import platform
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import classifier as clf
from . import metrics as mx
from . import stats
from .errors import ConfigError, CotuneError, ExperimentError
from .tabular import Dataset, load_csv, schema_from_json, split
from .tradeoff import (
    FAIRNESS_METRICS,
    PERFORMANCE_METRICS,
    BaselineCurve,
    build_baseline,
    classify,
)
from .tuning import (
    LossKind,
    MultiMethod,
    OptConfig,
    tune_analytic,
    tune_optimized,
    tune_sequential,
)


class Method(enum.Enum):
    ORIGINAL = "original"
    PHI = "phi"
    OPT = "opt"


@dataclass(frozen=True)
class ExperimentConfig:
    data_path: str
    schema_path: str
    method: Method
    attrs: tuple[str, ...]
    runs: int = 20
    train_fraction: float = 0.7
    seed_base: int = 0
    classifier: clf.ClassifierConfig = field(default_factory=clf.ClassifierConfig)
    opt: OptConfig = field(default_factory=OptConfig)
    output_path: str = "."

    def __post_init__(self):
        if not self.attrs:
            raise ConfigError("at least one sensitive attribute is required")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")


def _config_echo(cfg: ExperimentConfig) -> dict:
    return {
        "data_path": str(cfg.data_path),
        "schema_path": str(cfg.schema_path),
        "method": cfg.method.value,
        "attrs": list(cfg.attrs),
        "runs": cfg.runs,
        "train_fraction": cfg.train_fraction,
        "seed_base": cfg.seed_base,
        "classifier": {
            "learning_rate": cfg.classifier.learning_rate,
            "epochs": cfg.classifier.epochs,
            "l2": cfg.classifier.l2,
            "threshold": cfg.classifier.threshold,
            "include_sensitive_as_features": cfg.classifier.include_sensitive_as_features,
        },
        "opt": {
            "particles": cfg.opt.pso.particles,
            "iterations": cfg.opt.pso.iterations,
            "inertia": cfg.opt.pso.inertia,
            "cognitive": cfg.opt.pso.cognitive,
            "social": cfg.opt.pso.social,
            "validation_fraction": cfg.opt.validation_fraction,
            "loss_kind": cfg.opt.loss_kind.value,
        },
    }


def _tuned_train(cfg: ExperimentConfig, train: Dataset, seed: int) -> Dataset:
    if cfg.method is Method.ORIGINAL:
        return train
    if len(cfg.attrs) == 1:
        attr = cfg.attrs[0]
        if cfg.method is Method.PHI:
            return tune_analytic(train, attr, seed).dataset
        return tune_optimized(train, attr, cfg.opt, seed).dataset
    multi = MultiMethod.PHI if cfg.method is Method.PHI else MultiMethod.OPT
    return tune_sequential(train, list(cfg.attrs), multi, cfg.opt, seed).dataset


def _run_once(cfg: ExperimentConfig, data: Dataset, run_index: int) -> dict:
    seed = cfg.seed_base + run_index

    def stage(name, fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except CotuneError as e:
            raise ExperimentError(run_index, name, str(e)) from e

    train, test = stage("split", split, data, cfg.train_fraction, seed)
    original_model = stage("fit_original", clf.fit, train, cfg.classifier, seed)
    original_pred = stage("predict_original", clf.predict, original_model, test)
    original = stage("evaluate_original", mx.evaluate, test, original_pred, list(cfg.attrs))

    tuned = stage("tune", _tuned_train, cfg, train, seed)
    method_model = stage("fit_method", clf.fit, tuned, cfg.classifier, seed)
    method_pred = stage("predict_method", clf.predict, method_model, test)
    method = stage("evaluate_method", mx.evaluate, test, method_pred, list(cfg.attrs))

    method_dict = method.as_dict()
    a = test.sensitive[cfg.attrs[0]]
    tradeoff = {}
    for fm in FAIRNESS_METRICS:
        for pm in PERFORMANCE_METRICS:
            curve = stage(
                "baseline",
                build_baseline,
                test.labels,
                original_pred,
                a,
                fairness_metric=fm,
                performance_metric=pm,
                seed=seed,
            )
            region = classify((method_dict[fm], method_dict[pm]), curve)
            tradeoff[f"{fm}|{pm}"] = {
                "fairness": method_dict[fm],
                "performance": method_dict[pm],
                "region": region.value,
            }

    return {
        "run_index": run_index,
        "original": original.as_dict(),
        "method": method_dict,
        "tradeoff": tradeoff,
    }


def _aggregate(per_run: list[dict]) -> dict:
    keys = sorted(per_run[0]["original"].keys())
    original_mean = {k: float(np.mean([r["original"][k] for r in per_run])) for k in keys}
    method_mean = {k: float(np.mean([r["method"][k] for r in per_run])) for k in keys}
    change = {}
    for k in keys:
        absolute = method_mean[k] - original_mean[k]
        if original_mean[k] != 0.0:
            change[k] = {
                "absolute": absolute,
                "relative": absolute / original_mean[k],
                "relative_fallback": False,
            }
        else:
            change[k] = {"absolute": absolute, "relative": None, "relative_fallback": True}
    return {"original_mean": original_mean, "method_mean": method_mean, "change": change}


def _statistics(per_run: list[dict]) -> dict:
    if len(per_run) < 2:
        return {"insufficient_sample": True, "fairness": None}
    fairness_keys = [k for k in ("spd", "aod", "eod", "ispd", "iaod", "ieod") if k in per_run[0]["original"]]
    out = {}
    for k in fairness_keys:
        original = [r["original"][k] for r in per_run]
        method = [r["method"][k] for r in per_run]
        t = stats.compare(original, method)
        out[k] = {
            "u_statistic": t.u_statistic,
            "p_value": t.p_value,
            "significant": t.significant,
            "delta": t.delta,
            "large_effect": t.large_effect,
        }
    return {"insufficient_sample": False, "fairness": out}


def run_experiment(cfg: ExperimentConfig, data: Dataset | None = None) -> dict:
    """Execute all runs and assemble the report structure."""
    if data is None:
        schema = schema_from_json(cfg.schema_path)
        data = load_csv(cfg.data_path, schema)
    for attr in cfg.attrs:
        if attr not in data.sensitive:
            raise ConfigError(f"attribute {attr!r} not declared in the schema")

    per_run = [_run_once(cfg, data, i) for i in range(cfg.runs)]
    return {
        "config_echo": _config_echo(cfg),
        "per_run": per_run,
        "aggregate": _aggregate(per_run),
        "statistics": _statistics(per_run),
        "versions": {
            "cotune": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
    }


def emit_report(report: dict, out_dir) -> tuple[Path, Path]:
    """Write report.json and tradeoff.csv with stable ordering and bytes."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / "report.json"
    csv_path = out / "tradeoff.csv"

    report_path.write_text(
        json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n",
        encoding="utf-8",
    )

    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["run_index", "fairness_metric", "performance_metric", "fairness", "performance", "region"]
        )
        for run in report["per_run"]:
            for pair in sorted(run["tradeoff"].keys()):
                fm, pm = pair.split("|")
                cell = run["tradeoff"][pair]
                writer.writerow(
                    [run["run_index"], fm, pm, repr(cell["fairness"]), repr(cell["performance"]), cell["region"]]
                )
    return report_path, csv_path
