"""Exception types shared across the package.

The CLI maps these onto process exit codes: InputError -> 2,
ConvergenceError -> 3.
"""


class InputError(ValueError):
    """Malformed or out-of-contract input (bad edge list, bad spec, ...)."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed to reach its tolerance."""
