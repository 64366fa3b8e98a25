from pydantic_settings import BaseSettings
from typing import Optional


class Settings(BaseSettings):
    # Default grid window (measure1d)
    grid_x_min: float = -10.0
    grid_x_max: float = 10.0
    grid_n: int = 20001

    # Tolerances
    tol_mass: float = 1e-6
    tol_order: float = 1e-9
    tol_report: float = 1e-6
    tol_fd: float = 1e-3

    # Drop in log-density that marks the usable part of a truncated tail
    edge_log_margin: float = 12.0

    # Lift-zonoid order engine
    n_alphas: int = 512
    n_dirs: int = 64
    direction_seed: int = 0
    moment_eps_floor: float = 1e-12

    # Flow integration
    flow_dt: float = 1e-2
    flow_max_steps: int = 1_000_000

    # Verification runs
    default_seed: int = 1
    default_trials: int = 50
    sweep_workers: int = 4

    # Logging
    log_level: str = "INFO"
    log_file: Optional[str] = None

    class Config:
        env_file = ".env"
        env_prefix = "LIFTZONOID_"


settings = Settings()
