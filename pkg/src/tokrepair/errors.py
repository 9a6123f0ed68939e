"""Error types shared across the pipeline."""


class TokRepairError(Exception):
    """Base class for all pipeline errors."""


class CorpusSchemaError(TokRepairError):
    """A corpus file violates the record schema. Message names offending lines."""


class SplitError(TokRepairError):
    """Invalid split ratios or an empty corpus."""


class MismatchedSourceError(TokRepairError):
    """Two token streams do not come from the same source string."""


class DegeneratePairError(TokRepairError):
    """Buggy and fixed functions are token-identical; there is no edit to learn."""


class RegionMismatchError(TokRepairError):
    """A region or decomposition does not belong to the given function."""


class MaskEmptyError(TokRepairError):
    """A context mask excludes every candidate token."""


class ConfigError(TokRepairError):
    """Invalid run configuration value."""


class CheckpointError(TokRepairError):
    """A checkpoint file is missing, unversioned, or structurally invalid."""


class DivergenceError(TokRepairError):
    """Training produced a non-finite loss."""


class BackendError(TokRepairError):
    """Base class for fix-generation backend failures."""


class BackendUnavailableError(BackendError):
    """The backend could not be reached; retryable."""


class MalformedResponseError(BackendError):
    """The backend answered outside the wire contract; not retryable."""


class SampleFailedError(BackendError):
    """All retries for one sample were exhausted; the run continues."""


class RemoteUnavailableError(TokRepairError):
    """The remote embedding endpoint could not be reached; retryable."""
