"""Exception types and resource budgets shared across the package."""
import os
from contextlib import contextmanager


class CoarseLabError(Exception):
    """Base class for all package errors."""


class BudgetError(CoarseLabError):
    """A configured resource budget (points, simplices, matrix cells) was exceeded."""

    def __init__(self, budget, limit, detail=""):
        self.budget = budget
        self.limit = limit
        msg = f"{budget} budget of {limit} exceeded"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class DisconnectedError(CoarseLabError):
    def __init__(self, components):
        self.components = components
        shown = ", ".join(str(sorted(c)[:5]) for c in components[:4])
        super().__init__(f"space is disconnected into {len(components)} components: {shown}")


class MissingBasePointError(CoarseLabError):
    pass


class TruncationError(CoarseLabError):
    """A construction needed a point outside the truncated space."""


class InternalError(CoarseLabError):
    pass


DEFAULT_POINT_BUDGET = 200_000
DEFAULT_SIMPLEX_BUDGET = 5_000_000
DEFAULT_MATRIX_BUDGET = 50_000_000


# budgets set by a running config; explicit arguments still win
_active = {}


@contextmanager
def budgets(points=None, simplices=None, matrix_cells=None):
    saved = dict(_active)
    for key, val in (("points", points), ("simplices", simplices), ("matrix_cells", matrix_cells)):
        if val is not None:
            _active[key] = int(val)
    try:
        yield
    finally:
        _active.clear()
        _active.update(saved)


def point_budget(override=None):
    if override is not None:
        return int(override)
    env = os.environ.get("COARSE_LAB_BUDGET_POINTS")
    if env:
        return int(env)
    return _active.get("points", DEFAULT_POINT_BUDGET)


def simplex_budget(override=None):
    return int(override) if override is not None else _active.get("simplices", DEFAULT_SIMPLEX_BUDGET)


def matrix_budget():
    return _active.get("matrix_cells", DEFAULT_MATRIX_BUDGET)
