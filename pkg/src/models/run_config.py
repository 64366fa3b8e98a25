from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from ..config.settings import settings

Command = Literal["constants", "order", "verify", "puncture-sweep", "example1"]

DEFAULT_R_VALUES = [0.0, 0.25, 0.5, 1.0, 2.0, 5.0]


class RunConfig(BaseModel):
    command: Command
    input: Optional[Path] = None
    measure: Literal["gaussian", "uniform", "exp1", "laplace"] = "gaussian"
    x_min: Optional[float] = None
    x_max: Optional[float] = None
    n: Optional[int] = Field(default=None, ge=3)
    c: Optional[float] = Field(default=None, gt=0.0)
    alpha: float = Field(default=1.0, gt=0.0)
    weight: Literal["identity", "kbar", "khat"] = "identity"
    seed: int = Field(default_factory=lambda: settings.default_seed)
    trials: int = Field(default_factory=lambda: settings.default_trials, ge=1)
    R: List[float] = Field(default_factory=lambda: list(DEFAULT_R_VALUES))
    radius: float = Field(default=1.0, gt=0.0)
    a: float = Field(default=2.0, gt=0.0)
    b: float = Field(default=0.5, gt=0.0)
    amplitude: float = Field(default=0.75, ge=0.0)
    out: Optional[Path] = None
    format: Literal["json", "csv"] = "json"

    @field_validator("R")
    @classmethod
    def _check_radii(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("R list must not be empty")
        if any(r < 0.0 for r in value):
            raise ValueError("R values must be nonnegative")
        return value

    @model_validator(mode="after")
    def _check_command(self):
        if self.x_min is not None and self.x_max is not None and self.x_min >= self.x_max:
            raise ValueError("x_min must be below x_max")
        if self.command == "verify" and self.c is None:
            self.c = 1.0
        if self.command == "example1" and self.b > self.a:
            raise ValueError("example1 needs b <= a")
        return self
