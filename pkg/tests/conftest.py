import math

import numpy as np
import pytest

from twistedhodge.fourier import FourierScalar
from twistedhodge.model import carriere, p_from_triples, product, suspension, taut_model

LOG_LAMBDA = math.log((3 + math.sqrt(5)) / 2)


def perturbed():
    """The coupled test model: c = log 2, p = 0.2 cos(2 pi t)."""
    return suspension(math.log(2), FourierScalar.cos(1, 0.2), name="perturbed")


def bandwidth3():
    return suspension(math.log(2), p_from_triples([[1, 0.2, 0.0], [2, -0.1, 0.05], [3, 0.1, 0.0]]),
                      name="bandwidth3")


def taut_perturbed():
    return suspension(0.0, FourierScalar.cos(1, 0.1), name="taut-perturbed")


EXACT_MODELS = {
    "carriere3": lambda: carriere(3),
    "taut": taut_model,
    "carriere3xS": lambda: product(carriere(3), suspension(0.3)),
    "tautxtaut": lambda: product(taut_model(), taut_model()),
}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=sorted(EXACT_MODELS))
def exact_model(request):
    return EXACT_MODELS[request.param]()


def random_coeffs(rng, K, E, scale=1.0):
    return scale * (rng.normal(size=(K, E)) + 1j * rng.normal(size=(K, E)))


# criterion -> (verdict, detail); filled by test_acceptance, printed at the end
ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        verdict, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {verdict}  {detail}")
