"""Exception hierarchy.

Everything raised on purpose derives from :class:`CotuneError`, so callers
(and the CLI) can distinguish data/validation problems from genuine bugs.
"""


class CotuneError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(CotuneError):
    """A column is missing, undeclared, or the schema itself is inconsistent."""


class CardinalityError(CotuneError):
    """A binary-encoded column holds more than two distinct raw tokens."""


class ParseError(CotuneError):
    """A cell could not be parsed as a number; message carries the row index."""


class SizeError(CotuneError):
    """An operation received too few (or too many) rows to be meaningful."""


class UndefinedCorrelationError(CotuneError):
    """A contingency-table marginal is zero, so the phi-coefficient is undefined."""


class ProportionError(CotuneError):
    """The adjustment proportion has a zero denominator (no privileged-favorable rows)."""


class CandidateError(CotuneError):
    """A flip was requested but the candidate set is empty."""


class TrainingError(CotuneError):
    """The training set does not contain both label classes."""


class ShapeError(CotuneError):
    """Vector lengths or feature dimensions do not line up."""


class GroupSupportError(CotuneError):
    """A group/subgroup conditioning cell needed by a fairness rate is empty."""


class ConfigError(CotuneError):
    """An optimizer or experiment configuration value is invalid."""


class TuningStageError(CotuneError):
    """A stage of a multi-attribute tuning chain failed; names the attribute."""

    def __init__(self, attr: str, message: str):
        super().__init__(f"tuning stage for attribute {attr!r}: {message}")
        self.attr = attr


class ExperimentError(CotuneError):
    """A repeated-run experiment failed; names the run index and stage."""

    def __init__(self, run_index: int, stage: str, message: str):
        super().__init__(f"run {run_index}, stage {stage!r}: {message}")
        self.run_index = run_index
        self.stage = stage
