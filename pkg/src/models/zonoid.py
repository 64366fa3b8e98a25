from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator


class LiftSupportQuery(BaseModel):
    """Direction (t, u) in R^{d+1} at which a lift-zonoid support function is evaluated."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    t: float
    u: np.ndarray

    @field_validator("u", mode="before")
    @classmethod
    def _as_vector(cls, value):
        arr = np.atleast_1d(np.array(value, dtype=float))
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def _check_nonzero(self):
        if self.u.ndim != 1:
            raise ValueError("u must be a vector")
        if not (np.isfinite(self.t) and np.all(np.isfinite(self.u))):
            raise ValueError("query must be finite")
        if self.t == 0.0 and not np.any(self.u):
            raise ValueError("(t, u) must not be the zero vector")
        return self

    def scaled(self, factor: float) -> "LiftSupportQuery":
        return LiftSupportQuery(t=self.t * factor, u=self.u * factor)


class OrderCertificate(BaseModel):
    c: float
    dominated: bool
    worst_ratio: float
    witness_alpha: Optional[float] = None
    witness_direction: Optional[List[float]] = None
    n_dirs: int
    n_alphas: int
    # True when d >= 2: directions are sampled, so domination is only a necessary test
    sampled_directions: bool = False
    # weighted mean subtracted from the atoms before the sweep
    mean_offset: Optional[List[float]] = None


class MomentSearchResult(BaseModel):
    eps: float
    c_lower: float
    c_upper: float
    moment: float
