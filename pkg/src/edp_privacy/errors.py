"""Exception types raised across the package."""


class EDPError(Exception):
    """Base class for all package errors."""


class InputError(EDPError, ValueError):
    """Malformed or out-of-contract input (shapes, non-finite values, zero records)."""


class InsufficientDataError(InputError):
    """Too few records/samples for the requested estimate."""


class InfeasibleAttackError(EDPError):
    """The attack cannot proceed, e.g. nothing could be linked or the links are inconsistent."""


class BudgetError(EDPError):
    """Requested work exceeds a configured computational budget."""


class CsvFormatError(InputError):
    """A CSV cell or row could not be parsed."""

    def __init__(self, message, row=None, column=None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.row = row
        self.column = column
