import pytest

from src.services.lsi_weight_service import LsiWeightService
from src.services.measure_service import MeasureService


@pytest.fixture(scope="session")
def measure_service():
    return MeasureService()


@pytest.fixture(scope="session")
def weight_service(measure_service):
    return LsiWeightService(measure_service)


@pytest.fixture(scope="session")
def gaussian(measure_service):
    """Standard Gaussian on [-10, 10] with 20001 nodes."""
    return measure_service.gaussian()
