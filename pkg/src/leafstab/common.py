"""Small shared pieces used by both system modules."""

from __future__ import annotations

from enum import Enum

import numpy as np

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


class Verdict(Enum):
    STABLE_SUFFICIENT = "StableSufficient"
    INCONCLUSIVE = "Inconclusive"
