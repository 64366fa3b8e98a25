import math
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator


class LsiConstants(BaseModel):
    weight_kind: str
    alpha: float
    beta: float
    c_weighted: Optional[float] = None
    c_classical: Optional[float] = None
    available: bool
    edge_trending: bool = False
    window: Tuple[float, float]

    @model_validator(mode="after")
    def _check_order(self):
        # alpha and beta are the inf and sup of the same weight here
        if self.weight_kind in ("kbar", "khat") and math.isfinite(self.alpha) and math.isfinite(self.beta) \
                and self.alpha > self.beta:
            raise ValueError("alpha cannot exceed beta")
        if self.c_classical is not None and not math.isfinite(self.beta):
            raise ValueError("c_classical needs a finite beta")
        return self


class BakryEmeryResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    alpha_max: float
    a_coeff: np.ndarray
    gamma2_residual: np.ndarray
    min_residual: float
    holds: bool
    window: Tuple[float, float]


class ImageLawResult(BaseModel):
    statistic: float
    pvalue: float
    critical_value: float
    samples: int
    seed: int
    passes: bool
