"""Exception hierarchy shared by all modules and the CLI."""


class VariaforgeError(Exception):
    """Base class; carries the process exit code for its error family."""

    exit_code = 2


class UserError(VariaforgeError):
    """Bad invocation, flag, or configuration supplied by the caller."""

    exit_code = 1


class DataError(VariaforgeError):
    """Malformed or inconsistent input data."""

    exit_code = 2


class InternalInvariantError(VariaforgeError):
    """A guaranteed invariant failed; indicates a bug, not bad input."""

    exit_code = 3
