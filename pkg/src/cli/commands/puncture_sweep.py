from typing import Tuple

from ...models.run_config import RunConfig
from ...services.example_measure_service import ExampleMeasureService
from ...utils.response_formatter import format_puncture_sweep
from . import EXIT_OK


def run(config: RunConfig) -> Tuple[dict, int]:
    sweep = ExampleMeasureService().puncture_sweep(config.R)
    return format_puncture_sweep(sweep), EXIT_OK
