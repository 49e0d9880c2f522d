"""
Result types of the checkers.

A CheckReport holds one (lhs, rhs_core, ratio) evaluation of an
inequality. rhs_core is the right-hand side without its unknown absolute
constant, so the ratio is an empirical lower estimate of that constant.
"""
import math
from dataclasses import dataclass, field

import numpy as np


def ratio_of(lhs, rhs_core):
    """lhs / rhs_core, with 0/0 = 0 and x/0 = inf for x > 0."""
    if rhs_core > 0:
        return lhs / rhs_core
    if lhs == 0:
        return 0.0
    return math.inf


@dataclass(frozen=True)
class CheckReport:
    """
    One evaluation of an inequality.

    Attributes:
        name (str): Checker name, e.g. "main-bound".
        lhs (float): Left-hand side.
        rhs_core (float): Right-hand side without its absolute constant.
        stderr (float): Monte Carlo standard error of the ratio.
        config (dict): Echo of everything needed to recompute the report.
        details (dict): Checker-specific intermediate values.
        passed (bool | None): Verdict of checks that must hold as stated
            (density variance, norm chain); None for ratio-only checks.
        ratio (float): lhs / rhs_core, derived.
    """
    name: str
    lhs: float
    rhs_core: float
    stderr: float = 0.0
    config: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    passed: bool = None
    ratio: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, 'lhs', float(self.lhs))
        object.__setattr__(self, 'rhs_core', float(self.rhs_core))
        object.__setattr__(self, 'stderr', float(self.stderr))
        object.__setattr__(self, 'ratio', float(ratio_of(self.lhs, self.rhs_core)))

    @property
    def failed(self):
        return self.passed is False


@dataclass(frozen=True)
class ConstantEstimate:
    """
    Empirical maximum of a checker ratio over an ensemble of cells.

    Attributes:
        d (int): Polynomial degree.
        trials (int): Number of cells.
        ratios (tuple[float, ...]): Per-cell ratios in cell order.
        c_hat (float): max(ratios).
        stability (tuple[float, ...]): Running maximum after each cell.
        config (dict): Echo of the ensemble configuration.
    """
    d: int
    trials: int
    ratios: tuple
    c_hat: float
    stability: tuple
    config: dict = field(default_factory=dict)

    @classmethod
    def from_ratios(cls, d, ratios, config=None):
        ratios = tuple(float(r) for r in ratios)
        trajectory = tuple(float(v) for v in np.maximum.accumulate(ratios)) if ratios else ()
        c_hat = trajectory[-1] if trajectory else 0.0
        return cls(d, len(ratios), ratios, c_hat, trajectory, dict(config or {}))

    def last_increase(self, window=100):
        """
        Relative growth of the running maximum over the last `window` cells.

        Shorter trajectories are measured from their first cell. Returns
        0.0 when the trajectory is flat at zero and inf when it leaves zero
        inside the window.
        """
        if not self.trials:
            return 0.0
        start = self.stability[max(0, self.trials - window - 1)]
        if start == 0.0:
            return 0.0 if self.c_hat == 0.0 else math.inf
        return (self.c_hat - start) / start


@dataclass(frozen=True)
class EpsilonSplitReport:
    """
    The three-term splitting of the integral of tanh(f) - tanh(g) over an epsilon grid.

    Attributes:
        lhs (float): Sample mean of tanh(f) - tanh(g).
        eps (tuple[float, ...]): The epsilon grid.
        parts (tuple[tuple[float, float, float], ...]): Per epsilon the
            derivative term, the cross term and the epsilon term.
        split_residual (float): max over the grid of |sum(parts) - lhs|.
        a_profile (tuple[float, ...]): ||d_e g||_2^(-1/(d-1)) eps^(1/(2d-2)).
        b_profile (tuple[float, ...]): eps^(-1/2) ||f - g||_1.
        eps_star (float): The balancing epsilon.
        bound_at_eps_star (float): A + B at eps_star.
        grid_minimizer (float): The grid epsilon minimizing A + B.
        config (dict): Echo of the inputs.
    """
    lhs: float
    eps: tuple
    parts: tuple
    split_residual: float
    a_profile: tuple
    b_profile: tuple
    eps_star: float
    bound_at_eps_star: float
    grid_minimizer: float
    config: dict = field(default_factory=dict)
    name: str = 'epsilon-split'

    @property
    def ratio(self):
        return ratio_of(abs(self.lhs), self.bound_at_eps_star)
