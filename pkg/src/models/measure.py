from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator


def _frozen_array(value, ndim: Optional[int] = None) -> np.ndarray:
    arr = np.array(value, dtype=float)
    if ndim == 2 and arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    arr.setflags(write=False)
    return arr


class GridDensity1D(BaseModel):
    """Density samples on the uniform grid x_min = x_0 < ... < x_{n-1} = x_max."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    x_min: float
    x_max: float
    n: int
    values: np.ndarray
    log_values: Optional[np.ndarray] = None
    strictly_positive: bool = False
    label: str = "custom"

    @field_validator("values", "log_values", mode="before")
    @classmethod
    def _as_array(cls, value):
        if value is None:
            return None
        return _frozen_array(value)

    @model_validator(mode="after")
    def _check_grid(self):
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max)) or self.x_max <= self.x_min:
            raise ValueError("x_max must be finite and exceed x_min")
        if self.n < 3:
            raise ValueError("n must be at least 3")
        if self.values.shape != (self.n,):
            raise ValueError(f"values must hold n={self.n} samples, got {self.values.size}")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0.0):
            raise ValueError("values must be finite and nonnegative")
        if self.log_values is not None:
            if self.log_values.shape != (self.n,):
                raise ValueError("log_values must hold n samples")
            if np.any(np.isnan(self.log_values)) or np.any(self.log_values == np.inf):
                raise ValueError("log_values must not contain NaN or +inf")
        if self.strictly_positive:
            positive = self.values > 0.0
            if self.log_values is not None:
                positive |= np.isfinite(self.log_values)
            if not np.all(positive):
                raise ValueError("density declared strictly positive has zero samples")
        return self

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    def log_density(self) -> np.ndarray:
        if self.log_values is not None:
            return self.log_values
        with np.errstate(divide="ignore"):
            return np.log(self.values)

    def grid_info(self) -> dict:
        return {"x_min": self.x_min, "x_max": self.x_max, "n": self.n}


class DiscreteMeasure(BaseModel):
    """Weighted atoms in R^d; atoms has shape (m, d)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    atoms: np.ndarray
    weights: np.ndarray

    @field_validator("atoms", mode="before")
    @classmethod
    def _atoms_as_matrix(cls, value):
        return _frozen_array(value, ndim=2)

    @field_validator("weights", mode="before")
    @classmethod
    def _weights_as_vector(cls, value):
        return _frozen_array(value)

    @model_validator(mode="after")
    def _check_weights(self):
        if self.atoms.ndim != 2 or self.atoms.shape[0] == 0:
            raise ValueError("atoms must be a non-empty (m, d) array")
        if self.weights.shape != (self.atoms.shape[0],):
            raise ValueError("weights must hold one entry per atom")
        if not np.all(np.isfinite(self.atoms)):
            raise ValueError("atoms must be finite")
        if not np.all(np.isfinite(self.weights)) or np.any(self.weights <= 0.0):
            raise ValueError("weights must be finite and positive")
        if abs(float(np.sum(self.weights)) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        return self

    @property
    def d(self) -> int:
        return self.atoms.shape[1]

    @property
    def size(self) -> int:
        return self.atoms.shape[0]

    def mean(self) -> np.ndarray:
        return self.weights @ self.atoms

    @classmethod
    def from_points(cls, points, weights=None) -> "DiscreteMeasure":
        """Build a measure from raw points, normalising the weights."""
        pts = np.array(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.shape[0] == 0:
            raise ValueError("a discrete measure needs at least one atom")
        if weights is None:
            w = np.full(pts.shape[0], 1.0 / pts.shape[0])
        else:
            w = np.array(weights, dtype=float)
            if w.shape != (pts.shape[0],) or not np.all(np.isfinite(w)) or np.any(w <= 0.0):
                raise ValueError("weights must be finite, positive and match the points")
            w = w / w.sum()
        return cls(atoms=pts, weights=w)


class WeightPair(BaseModel):
    """Scalar weight K on the grid together with its mu-divergence v."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    K: np.ndarray
    v: np.ndarray
    kind: str = "custom"

    @field_validator("K", "v", mode="before")
    @classmethod
    def _as_array(cls, value):
        return _frozen_array(value)

    @model_validator(mode="after")
    def _check_shapes(self):
        if self.K.ndim != 1 or self.K.shape != self.v.shape:
            raise ValueError("K and v must be 1-D arrays of equal length")
        if not np.all(np.isfinite(self.K)):
            raise ValueError("K must be finite")
        return self
