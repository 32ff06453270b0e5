"""Exception hierarchy.

Every error carries a machine-readable ``code`` and the process exit status
the CLI maps it to (2 parse error, 3 domain error, 4 resource cap).
"""


class EquidistError(Exception):
    code = "error"
    exit_status = 3

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field

    def to_dict(self):
        out = {"error": self.code, "message": str(self)}
        if self.field is not None:
            out["field"] = self.field
        return out


class SpecParseError(EquidistError):
    """Malformed input document; ``field`` names the offending path."""

    code = "parse-error"
    exit_status = 2

    def __init__(self, message, field=None, line=None, column=None):
        super().__init__(message, field)
        self.line = line
        self.column = column

    def to_dict(self):
        out = super().to_dict()
        if self.line is not None:
            out["line"] = self.line
            out["column"] = self.column
        return out


class InvalidSpecError(EquidistError, ValueError):
    code = "invalid-spec"


class MissingLevelError(EquidistError, KeyError):
    code = "missing-level"

    def __str__(self):
        return self.args[0]


class ExactnessUnavailableError(EquidistError, TypeError):
    code = "exactness-unavailable"


class EmptyInputError(EquidistError, ValueError):
    code = "empty-input"


class OutOfWindowError(EquidistError, ValueError):
    code = "out-of-window"


class CoprimalityError(EquidistError, ValueError):
    code = "coprimality"


class ArityError(EquidistError, ValueError):
    code = "arity"


class InvalidChainError(EquidistError, ValueError):
    code = "invalid-chain"


class InvalidPartitionError(EquidistError, ValueError):
    code = "invalid-partition"


class DegenerateBlockError(EquidistError, ZeroDivisionError):
    code = "degenerate-block"


class StrategyUnavailableError(EquidistError):
    """Exact covering search refused: too many candidate progressions."""

    code = "strategy-unavailable"
    exit_status = 4


class ResourceCapError(EquidistError):
    code = "resource-cap"
    exit_status = 4
