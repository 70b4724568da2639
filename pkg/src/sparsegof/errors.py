"""Exception types shared across the package.

Validation problems subclass ``ValueError`` so callers that only care about
"bad input" can catch that. Refusals due to size guards or simulation budgets
subclass ``GuardError``; the CLI maps the two families to distinct exit codes.
"""


class RangeError(ValueError):
    """An argument lies outside its admissible range."""


class ShapeError(ValueError):
    """Vectors that must align have different lengths."""


class ContractError(ValueError):
    """An input violates a documented precondition (e.g. not standardized)."""


class DegenerateProfileError(ValueError):
    """A statistic profile has zero scale, so standardization is undefined."""


class GuardError(RuntimeError):
    """Work refused because it exceeds a configured size or budget guard."""


class TooLargeError(GuardError):
    pass


class BudgetError(GuardError):
    pass


class OracleFailure(RuntimeError):
    """A brute-force summation did not converge within its term guard."""
