from typing import Tuple

from ...models.run_config import RunConfig
from ...services.example_measure_service import ExampleMeasureService
from ...services.lsi_weight_service import LsiWeightService
from ...services.measure_service import MeasureService
from ...utils.response_formatter import format_lsi_constants
from . import EXIT_OK

# rows kept in the emitted profile
PROFILE_ROWS = 200


def run(config: RunConfig) -> Tuple[dict, int]:
    """Oscillating-drift density, its bar weight and the failing curvature bound."""
    measures = MeasureService()
    weights = LsiWeightService(measures)
    examples = ExampleMeasureService(measures, weights)
    grid = {k: v for k, v in (("x_min", config.x_min), ("x_max", config.x_max), ("n", config.n)) if v is not None}
    density = examples.example1_density(config.a, config.b, config.radius, config.amplitude, **grid)
    kbar = weights.kbar(density)
    stride = max(1, density.n // PROFILE_ROWS)
    x = density.grid
    profile = [
        {"x": float(x[i]), "density": float(density.values[i]), "kbar": float(kbar[i])}
        for i in range(0, density.n, stride)
    ]
    payload = {
        "parameters": {"a": config.a, "b": config.b, "R": config.radius, "amplitude": config.amplitude},
        "curvature_floor": examples.curvature_floor(density),
        "constants": format_lsi_constants(weights.lsi_constants(density, "kbar")),
        "grid": density.grid_info(),
        "profile": profile,
    }
    return payload, EXIT_OK
