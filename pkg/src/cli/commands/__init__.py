from ...models.measure import GridDensity1D
from ...models.run_config import RunConfig
from ...services.measure_service import MeasureService
from ...utils.input_loader import load_density

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT_ERROR = 2


def resolve_density(config: RunConfig, measures: MeasureService) -> GridDensity1D:
    """The --input density if given, otherwise the named measure on the requested grid."""
    if config.input is not None:
        return measures.normalize(load_density(config.input))
    return measures.named(config.measure, x_min=config.x_min, x_max=config.x_max, n=config.n)
