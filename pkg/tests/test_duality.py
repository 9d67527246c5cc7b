import numpy as np
import pytest

from twistedhodge.duality import (
    duality_suite,
    hard_lefschetz_check,
    kodaira_serre_check,
    negative_control_report,
    negative_controls,
    orth,
    poincare_check,
    primitive_decomposition_check,
    projector_distance,
    tautness_check,
)
from twistedhodge.model import carriere, product, suspension, taut_model

from .conftest import bandwidth3, perturbed, taut_perturbed

MODELS = {
    "carriere": lambda: carriere(3),
    "taut": taut_model,
    "tautxtaut": lambda: product(taut_model(), taut_model()),
    "perturbed": perturbed,
    "taut-perturbed": taut_perturbed,
    "carrierexS": lambda: product(carriere(3), suspension(0.4)),
}


@pytest.mark.parametrize("name", sorted(MODELS))
def test_duality_suite(name):
    for rep in duality_suite(MODELS[name](), 6):
        assert rep.passed, (rep.suite, [c.name for c in rep.checks if not c.passed])


def test_untwisted_dualities_fail_on_carriere():
    pb, ksb = negative_controls(carriere(3), 8)
    assert not pb.passed and not ksb.passed
    assert not pb["h^0 = h^2"].passed
    assert not ksb["h^0,0 = h^1,1"].passed
    assert negative_control_report(carriere(3), 8).passed


def test_untwisted_dualities_hold_when_taut():
    pb, ksb = negative_controls(taut_model(), 8)
    assert pb.passed and ksb.passed
    assert all(c.verdict == "n/a" for c in negative_control_report(taut_model(), 8).checks)


def test_tautness_equivalence_across_constants():
    for c in (0.0, 0.3, -1.2):
        for p in (None, bandwidth3().p):
            m = suspension(c, p)
            assert tautness_check(m, 6).passed


def test_lefschetz_on_taut_product():
    rep = hard_lefschetz_check(product(taut_model(), taut_model()), 4)
    assert rep.passed
    c = rep["L^1: H^1 -> H^3 injective"]
    assert c.observed == 4 and c.expected == 4
    c = rep["L^2: H^0 -> H^4 injective"]
    assert c.observed == 1
    assert rep.data["primitive_dims"] == {0: 1, 1: 4, 2: 5}


def test_primitive_counts_n2():
    rep = primitive_decomposition_check(product(taut_model(), taut_model()), 1)
    assert rep.passed
    assert rep.data["primitive_dims_per_mode"] == {0: 1, 1: 4, 2: 5, 3: 0, 4: 0}


def test_poincare_maps_taut_harmonics():
    rep = poincare_check(taut_model(), 6)
    assert rep["star: H^1 -> H^1 has full rank"].observed == 2


def test_kodaira_serre_on_product_with_carriere():
    assert kodaira_serre_check(product(carriere(3), taut_model()), 4).passed


def test_projector_distance():
    rng = np.random.default_rng(1)
    A = rng.normal(size=(6, 2)) + 0j
    U = orth(A)
    assert projector_distance(U, orth(A @ np.array([[1, 2], [3, 4]]))) <= 1e-12
    assert projector_distance(U, orth(rng.normal(size=(6, 2)) + 0j)) > 1e-3
    assert projector_distance(U, orth(A[:, :1])) == 1.0
