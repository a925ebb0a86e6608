"""Exception types shared across the package."""


class SpentFuelError(Exception):
    """Base class for every error raised by this package."""


class ChainError(SpentFuelError):
    """Nuclide-chain data is missing, unreadable, or inconsistent."""


class HistoryError(SpentFuelError):
    """Irradiation history is malformed or degenerate (zero totals)."""


class DepletionError(SpentFuelError):
    """Bad state vector or non-finite matrix during depletion."""


class DatasetError(SpentFuelError):
    """Dataset file or shape problem; carries the offending line if known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
        self.line = line


class ModelIOError(SpentFuelError):
    """Model file is malformed or has an unsupported format version."""


class TrainingDiverged(SpentFuelError):
    """Training loss became non-finite; carries the partial report."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class SearchFailure(SpentFuelError):
    """Every hyperparameter trial diverged."""


class MetricError(SpentFuelError):
    """Metric undefined for the given data (e.g. zero target variance)."""


class AnalysisError(SpentFuelError):
    """Evaluator failed during UQ/SA; carries the sample index if known."""

    def __init__(self, message: str, sample_index: int | None = None):
        if sample_index is not None:
            message = f"{message} (sample {sample_index})"
        super().__init__(message)
        self.sample_index = sample_index


class BenchError(SpentFuelError):
    """Timing or comparison harness cannot proceed."""
