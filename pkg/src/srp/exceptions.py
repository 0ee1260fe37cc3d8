"""Exception types shared across the library."""


class ContractViolation(ValueError):
    """An argument breaks a documented precondition (shape, symmetry, range)."""


class NumericalError(RuntimeError):
    """A computation failed numerically (singular matrix, no convergence)."""


class DataError(ValueError):
    """A dataset could not be read or is structurally invalid."""


class ParseError(DataError):
    """CSV parse failure, carrying the 1-based file location."""

    def __init__(self, message, row=None, column=None):
        loc = ""
        if row is not None:
            loc = f" (row {row}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.row = row
        self.column = column
