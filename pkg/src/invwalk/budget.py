"""Work-budget guard shared by the exact computation paths.

Exact DP, the binomial sum and the generating-function build can be asked
for absurdly large inputs; every such entry point estimates its cell-update
count up front and refuses jobs above the budget instead of hanging.
"""

import os

DEFAULT_BUDGET = 10**9
ENV_VAR = "INVWALK_BUDGET"


class WorkBudgetError(Exception):
    """Raised when a requested exact computation exceeds the work budget."""

    def __init__(self, estimated: int, budget: int, what: str):
        self.estimated = estimated
        self.budget = budget
        self.what = what
        super().__init__(
            f"{what}: estimated work {estimated} exceeds budget {budget} "
            f"(override with {ENV_VAR})"
        )


def work_budget() -> int:
    """Current budget in cell-updates, from the environment or the default."""
    raw = os.environ.get(ENV_VAR)
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"{ENV_VAR} must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise ValueError(f"{ENV_VAR} must be positive, got {value}")
    return value


def check_budget(estimated: int, what: str) -> None:
    budget = work_budget()
    if estimated > budget:
        raise WorkBudgetError(estimated, budget, what)
