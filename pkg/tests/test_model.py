import json
import math

import numpy as np
import pytest

from twistedhodge.fourier import FourierScalar, evaluate
from twistedhodge.model import (
    InvalidModelError,
    bandwidth,
    carriere,
    geometry,
    is_mode_diagonal,
    is_taut,
    load_model,
    model_from_dict,
    model_to_dict,
    p_from_triples,
    product,
    suspension,
    taut_model,
)

from .conftest import LOG_LAMBDA, perturbed


def test_carriere_constant():
    assert carriere(3).c == pytest.approx(0.9624236501192069, abs=1e-15)
    assert carriere(3).c == pytest.approx(LOG_LAMBDA)


@pytest.mark.parametrize("trace", [2, 1, -3])
def test_non_hyperbolic_trace_rejected(trace):
    with pytest.raises(InvalidModelError):
        carriere(trace)


def test_carriere_geometry():
    g = geometry(carriere(3))
    assert g.factors[0].gauss_curvature.allclose(FourierScalar.constant(-LOG_LAMBDA ** 2))
    assert g.kappa_norm_sq.allclose(FourierScalar.constant(LOG_LAMBDA ** 2))


def test_perturbed_curvature():
    g = geometry(perturbed()).factors[0]
    t = np.linspace(0, 1, 7)
    hp = math.log(2) + 0.2 * np.cos(2 * np.pi * t)
    hpp = -0.2 * 2 * np.pi * np.sin(2 * np.pi * t)
    assert np.allclose(evaluate(g.h_prime, t), hp, atol=1e-14)
    assert np.allclose(evaluate(g.gauss_curvature, t), -(hpp + hp ** 2), atol=1e-12)


def test_tautness_and_bandwidth():
    assert is_taut(taut_model()) and not is_taut(carriere(3))
    assert is_taut(suspension(0.0, FourierScalar.cos(2, 0.1)))
    assert not is_taut(product(taut_model(), carriere(3)))
    assert bandwidth(perturbed()) == 1 and not is_mode_diagonal(perturbed())
    assert is_mode_diagonal(product(carriere(3), taut_model()))


def test_p_must_be_real_and_mean_free():
    with pytest.raises(InvalidModelError):
        suspension(0.1, FourierScalar.from_modes({1: 1.0}))
    with pytest.raises(InvalidModelError):
        suspension(0.1, FourierScalar.constant(0.2))
    with pytest.raises(InvalidModelError):
        p_from_triples([[0, 1.0, 0.0]])


def test_json_roundtrip(tmp_path):
    m = product(carriere(3), suspension(0.5, p_from_triples([[2, 0.1, -0.05]])))
    path = tmp_path / "m.json"
    path.write_text(json.dumps(model_to_dict(m)))
    m2 = load_model(path)
    assert m2.key == m.key
    with pytest.raises(InvalidModelError):
        model_from_dict({"variant": "torus"})
    with pytest.raises(InvalidModelError):
        model_from_dict({})


def test_shipped_model_files():
    from pathlib import Path
    root = Path(__file__).resolve().parent.parent / "models"
    assert load_model(root / "carriere3.json").c == pytest.approx(LOG_LAMBDA)
    assert load_model(root / "taut_x_taut.json").n == 2
    assert bandwidth(load_model(root / "bandwidth3.json")) == 3
