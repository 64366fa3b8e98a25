from typing import Tuple

from ...models.run_config import RunConfig
from ...services.lsi_weight_service import LsiWeightService
from ...services.measure_service import MeasureService
from ...utils.response_formatter import format_lsi_constants
from . import EXIT_OK, resolve_density


def run(config: RunConfig) -> Tuple[dict, int]:
    """LSI constants of the bar and hat weights."""
    measures = MeasureService()
    weights = LsiWeightService(measures)
    density = resolve_density(config, measures)
    constants = [format_lsi_constants(weights.lsi_constants(density, kind)) for kind in ("kbar", "khat")]
    return {"measure": density.label, "grid": density.grid_info(), "constants": constants}, EXIT_OK
