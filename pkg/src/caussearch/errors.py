"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, DataError and
ParseError -> 3, IncompatibilityError and NotADagError -> 4.
"""


class CausSearchError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(CausSearchError):
    """Invalid configuration: unknown setting, out-of-range value, bad shape."""


class DataError(CausSearchError):
    """Malformed input data: ragged rows, bad tokens, missing values."""


class ParseError(CausSearchError):
    """Malformed graph text handed to one of the parsers."""


class KnowledgeError(CausSearchError):
    """Background knowledge that fails validation against a dataset."""


class IncompatibilityError(CausSearchError):
    """A test or score was paired with a data kind it does not support."""

    def __init__(self, component: str, detail: str):
        self.component = component
        self.detail = detail
        super().__init__(f"{component}: {detail}")


class NotADagError(CausSearchError):
    """An operation that requires a DAG received something else."""


class SingularityError(CausSearchError):
    """A linear system was singular; names the collinear variables."""

    def __init__(self, variables, message: str | None = None):
        self.variables = tuple(variables)
        msg = message or "singular system over variables: " + ", ".join(self.variables)
        super().__init__(msg)
