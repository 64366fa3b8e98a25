import logging
from typing import Tuple

from ...models.run_config import RunConfig
from ...services.measure_service import MeasureService
from ...services.zonoid_service import ZonoidService
from ...utils.input_loader import load_discrete
from ...utils.response_formatter import format_order_certificate
from . import EXIT_OK, EXIT_VIOLATION

logger = logging.getLogger(__name__)


def run(config: RunConfig) -> Tuple[dict, int]:
    """Lift-zonoid order test against gamma_c; the minimal c is reported when none is given."""
    zonoids = ZonoidService()
    if config.input is not None:
        nu = load_discrete(config.input)
        source = str(config.input)
    else:
        measures = MeasureService()
        density = measures.named(config.measure, x_min=config.x_min, x_max=config.x_max, n=config.n)
        nu = measures.pushforward(density, measures.log_gradient(density))
        source = f"log-gradient law of {density.label}"

    minimal_c = zonoids.minimal_dominating_c(nu)
    c = config.c if config.c is not None else minimal_c
    if c <= 0.0:
        # a point mass at the origin sits inside every gamma_c
        c = 1.0
    certificate = zonoids.order_check(nu, c)
    payload = format_order_certificate(certificate)
    payload.update({"minimal_c": minimal_c, "source": source})
    logger.info("order test on %s finished", source)
    return payload, EXIT_OK if certificate.dominated else EXIT_VIOLATION
