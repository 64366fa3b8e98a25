from typing import Tuple

from ...models.run_config import RunConfig
from ...services.lsi_weight_service import LsiWeightService
from ...services.measure_service import MeasureService
from ...services.verification_service import VerificationService
from ...utils.response_formatter import format_inequality_report
from . import EXIT_OK, EXIT_VIOLATION, resolve_density


def run(config: RunConfig) -> Tuple[dict, int]:
    measures = MeasureService()
    weights = LsiWeightService(measures)
    verifier = VerificationService(measures, weights)
    density = resolve_density(config, measures)
    pair = weights.weight_pair(density, config.weight)
    reports = verifier.gaussian_suite(density, pair, c=config.c, seed=config.seed,
                                      trials=config.trials, alpha=config.alpha)
    payload = {
        "measure": density.label,
        "weight": config.weight,
        "c": config.c,
        "alpha": config.alpha,
        "reports": [format_inequality_report(report) for report in reports],
    }
    violated = any(report.violated for report in reports)
    return payload, EXIT_VIOLATION if violated else EXIT_OK
