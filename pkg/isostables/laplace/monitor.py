"""
Convergence bookkeeping for the limit forms of the Laplace averages.

The checkpoint sequence g_k = exp(-sigma1 t_k) f(phi_{t_k}(x)) approaches its limit
through transients exp(m sigma1 t_k), m = 1, 2, ... coming from the higher Koopman
modes of f. Their ratios are known, so they are removed by Richardson elimination
before the convergence test. Past a certain horizon exp(-sigma1 t) amplifies
integration error faster than the transients decay; the guard stops there.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from isostables.laplace.models import Status


@dataclass(frozen=True)
class Verdict:
    status: Status
    value: complex
    time: float
    change: float
    abs_change: float
    reason: Optional[str] = None


class RichardsonAccelerator:
    """Known-ratio Richardson elimination of geometric transients q_m^k, q_m = ratio**m."""

    def __init__(self, ratio: float, passes: int):
        self.ratios = [ratio ** m for m in range(1, passes + 1)]
        self._last: List[Optional[complex]] = [None] * (passes + 1)

    def push(self, value: complex) -> Optional[complex]:
        """Feed the next raw term; returns the fully eliminated estimate once enough terms are in."""
        carry = value
        for level, previous in enumerate(list(self._last)):
            self._last[level] = carry
            if level == len(self.ratios):
                return carry
            if previous is None:
                return None
            q = self.ratios[level]
            carry = (carry - q * previous) / (1.0 - q)
        return carry


class ConvergenceMonitor:
    """
    Tracks the relative change between successive estimates.

    Converged once the change stays below `tol` for `window` checkpoints. Once the
    change has dropped below `activation`, `patience` consecutive increases stop the
    run and the estimate where the increase began is returned as Truncated.
    """

    def __init__(self, tol: float, window: int, activation: float, patience: int, floor: float = 1e-14):
        self.tol = tol
        self.window = window
        self.activation = activation
        self.patience = patience
        self.floor = floor

        self._value: Optional[complex] = None
        self._time: Optional[float] = None
        self._change: Optional[float] = None
        self._abs_change = np.inf
        self._streak = 0
        self._rising = 0
        self._armed = False
        self._candidate: Optional[Verdict] = None

    @property
    def has_estimate(self) -> bool:
        return self._value is not None

    def update(self, t: float, value: complex) -> Optional[Verdict]:
        if self._value is None:
            self._value, self._time = value, t
            return None

        abs_change = abs(value - self._value)
        change = abs_change / max(abs(value), self.floor)

        self._streak = self._streak + 1 if change < self.tol else 0
        if self._streak >= self.window:
            return Verdict(Status.CONVERGED, value, t, change, abs_change)

        if self._armed and self._change is not None and change > self._change:
            if self._rising == 0:
                self._candidate = Verdict(Status.TRUNCATED, self._value, self._time, self._change,
                                          self._abs_change, reason="guard")
            self._rising += 1
            if self._rising >= self.patience:
                return self._candidate
        else:
            self._rising = 0
        if change < self.activation:
            self._armed = True

        self._value, self._time = value, t
        self._change, self._abs_change = change, abs_change
        return None

    def finish(self) -> Optional[Verdict]:
        """Verdict when the horizon is reached without convergence."""
        if self._value is None:
            return None
        change = np.inf if self._change is None else self._change
        return Verdict(Status.TRUNCATED, self._value, self._time, change, self._abs_change, reason="horizon")
