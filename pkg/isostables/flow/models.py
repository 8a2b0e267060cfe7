from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np


class Termination(str, Enum):
    COMPLETED = "Completed"
    ESCAPED = "Escaped"
    STALLED = "Stalled"


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    terminated: Termination = Termination.COMPLETED
    escape_point: Optional[np.ndarray] = None
    stop_time: Optional[float] = None

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def __len__(self) -> int:
        return self.times.size
