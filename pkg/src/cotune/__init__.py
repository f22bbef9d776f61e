"""Correlation tuning for binary tabular data.

Measure the phi-coefficient between a sensitive attribute and the label,
flip the attribute on a computed subset of favorable-label rows (analytic
count or searched proportion), and evaluate the result with a full fairness,
performance, statistics, and trade-off harness.
"""

__version__ = "0.1.0"

from .correlation import (
    ContingencyTable,
    adjustment_count,
    adjustment_proportion,
    contingency,
    phi,
)
from .errors import CotuneError
from .tabular import (
    Dataset,
    Schema,
    SensitiveAttribute,
    SynthSpec,
    contaminate,
    load_csv,
    schema_from_json,
    split,
    subsample,
    synthesize,
    write_csv,
)
from .tuning import (
    LossKind,
    MultiMethod,
    OptConfig,
    TuneDirection,
    TuneResult,
    apply_proportion,
    loss_intersectional,
    loss_single,
    tune_analytic,
    tune_optimized,
    tune_sequential,
)

__all__ = [
    "__version__",
    "ContingencyTable",
    "CotuneError",
    "Dataset",
    "LossKind",
    "MultiMethod",
    "OptConfig",
    "Schema",
    "SensitiveAttribute",
    "SynthSpec",
    "TuneDirection",
    "TuneResult",
    "adjustment_count",
    "adjustment_proportion",
    "apply_proportion",
    "contaminate",
    "contingency",
    "load_csv",
    "loss_intersectional",
    "loss_single",
    "phi",
    "schema_from_json",
    "split",
    "subsample",
    "synthesize",
    "tune_analytic",
    "tune_optimized",
    "tune_sequential",
    "write_csv",
]
