from typing import ClassVar, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class TestBump(BaseModel):
    """Smooth compactly supported test function height * exp(1 - 1/(1 - s^2)), s = (x - center)/width."""

    __test__: ClassVar[bool] = False

    center: float
    width: float = Field(..., gt=0.0)
    height: float = Field(..., gt=0.0, le=1.0)

    def evaluate(self, x) -> Tuple[np.ndarray, np.ndarray]:
        """Values and first derivative at x."""
        x = np.asarray(x, dtype=float)
        s = (x - self.center) / self.width
        inside = np.abs(s) < 1.0
        f = np.zeros_like(x)
        df = np.zeros_like(x)
        si = s[inside]
        gap = 1.0 - si * si
        f[inside] = self.height * np.exp(1.0 - 1.0 / gap)
        df[inside] = f[inside] * (-2.0 * si / (gap * gap)) / self.width
        return f, df

    def describe(self) -> dict:
        return {"kind": "bump", "center": self.center, "width": self.width, "height": self.height}


class ConstantProfile(BaseModel):
    """f == level."""

    level: float = Field(..., ge=0.0, le=1.0)

    def evaluate(self, x) -> Tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        return np.full_like(x, self.level), np.zeros_like(x)

    def describe(self) -> dict:
        return {"kind": "constant", "level": self.level}


class FlowResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    grid_map: np.ndarray
    step_count: int
    max_step_error_estimate: float


class InequalityReport(BaseModel):
    name: str
    trials: int
    worst_margin: float
    violated: bool
    witness: Optional[dict] = None
    seed: Optional[int] = None
    tolerances: Dict[str, float] = {}
    grid: Dict[str, float] = {}
    inconclusive: bool = False


class EntropyLimitResult(BaseModel):
    eps: List[float]
    quotients: List[float]
    target: float
    monotone: bool


class PunctureRow(BaseModel):
    R: float
    C_R: float
    sup_khat: float
    c_hat: float


class PunctureSweep(BaseModel):
    rows: List[PunctureRow]
    max_c_hat: float
