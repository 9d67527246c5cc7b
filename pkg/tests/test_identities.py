import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistedhodge.identities import TOL_COUPLED, TOL_EXACT, identity_suite
from twistedhodge.model import carriere, suspension, taut_model
from twistedhodge.operators import get_assembler, residual

from .conftest import EXACT_MODELS, perturbed


@pytest.mark.parametrize("name", sorted(EXACT_MODELS))
def test_identity_suite_exact_models(name):
    rep = identity_suite(EXACT_MODELS[name](), 8)
    bad = [(c.name, c.residual) for c in rep.checks if not c.passed]
    assert not bad
    assert rep.max_residual() <= TOL_EXACT


def test_identity_suite_perturbed():
    rep = identity_suite(perturbed(), 20)
    assert rep.passed, [c.name for c in rep.checks if not c.passed]
    assert rep.max_residual() <= TOL_COUPLED


def test_suite_covers_the_catalogue():
    names = {c.name for c in identity_suite(carriere(3), 4).checks}
    for must in ["d_kappa^2=0", "Lambda=star^-1 L star", "[L,Lambda]=(deg-n)"]:
        assert must in names
    assert any("Delta_kappa" in n and "L" in n for n in names)
    assert len(names) > 60


@settings(max_examples=15, deadline=None)
@given(st.floats(-2, 2), st.floats(-0.3, 0.3), st.floats(-0.3, 0.3))
def test_twisted_identities_hold_for_random_suspensions(c, a1, b2):
    from twistedhodge.model import p_from_triples
    m = suspension(c, p_from_triples([[1, a1, 0.0], [2, 0.0, b2]]))
    rep = identity_suite(m, 14)
    assert rep.passed, [(x.name, x.residual) for x in rep.checks if not x.passed]


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3))
def test_d_kappa_squares_to_zero_for_constant_curvature(c):
    a = get_assembler(suspension(c), 6)
    D = a["d_kappa"]
    assert residual(D @ D, a.zero()) <= 1e-12


@pytest.mark.parametrize("t", [0.0, 0.25, 0.5, 0.75, 1.0])
def test_only_half_twist_closes_kahler_identity(t):
    # [L, partial_B* - t H10|] = -i (dbar_B - (1 - t) kappa01^), so the same
    # twist on both sides forces t = 1/2
    a = get_assembler(carriere(3), 6)
    L = a["L"]
    Ks = a["partial_B_star"] - t * a["H10_contract"]
    lhs = L @ Ks - Ks @ L
    assert residual(lhs, -1j * (a["dbar_B"] - (1 - t) * a["kappa01_wedge"])) <= 1e-12
    same = residual(lhs, -1j * (a["dbar_B"] - t * a["kappa01_wedge"]))
    assert (same <= 1e-12) == (t == 0.5)


def test_taut_model_identities_at_n32():
    assert identity_suite(taut_model(), 32).max_residual() <= TOL_EXACT


def test_psd_checks_present():
    rep = identity_suite(carriere(3), 4)
    psd = [c for c in rep.checks if "PSD" in c.name]
    assert psd and all(c.passed for c in psd)
    herm = [c for c in rep.checks if "Hermitian" in c.name]
    assert herm and all(c.passed for c in herm)
