import numpy as np
import pytest

from twistedhodge.model import carriere, product, suspension
from twistedhodge.operators import (
    OPERATOR_NAMES,
    Assembler,
    frame_change_n1,
    get_assembler,
    mode_blocks_closed_form_n1,
    residual,
    volume_TS_n1,
)

from .conftest import LOG_LAMBDA, perturbed, random_coeffs


def _closed_form(N):
    a = get_assembler(carriere(3), N)
    k = a.modes[:, 0]
    return a, mode_blocks_closed_form_n1(LOG_LAMBDA, k)


def test_closed_form_d_kappa_degree0():
    a, cf = _closed_form(16)
    F = frame_change_n1()  # orthonormal columns S*, T*
    blk = a["d_kappa"].blocks[:, :, 0]           # image of the function 1 per mode
    coords = np.einsum("ei,ke->ki", F.conj(), blk)
    assert np.max(np.abs(coords - cf["d_kappa_0"][:, :, 0])) <= 1e-12


def test_closed_form_d_kappa_degree1():
    a, cf = _closed_form(16)
    F = frame_change_n1()
    vol = volume_TS_n1()
    blk = a["d_kappa"].blocks @ F                # (K, E, 2)
    coords = np.einsum("e,kei->ki", vol.conj(), blk)
    assert np.max(np.abs(coords - cf["d_kappa_1"][:, 0, :])) <= 1e-12


def test_closed_form_laplacian_degree0():
    a, cf = _closed_form(16)
    for name in ("Delta_kappa", "Delta_B"):
        got, want = a[name].blocks[:, 0, 0], cf[f"{name}_0"][:, 0, 0]
        assert np.max(np.abs(got - want) / np.maximum(1, np.abs(want))) <= 1e-12
    assert a["Delta_kappa"].blocks[a.modes[:, 0] == 0, 0, 0][0] == pytest.approx(LOG_LAMBDA ** 2 / 4)


@pytest.mark.parametrize("name", ["d_kappa", "Delta_kappa", "boxbar_kappa", "L", "star"])
def test_coupled_assembly_matches_mode_diagonal(name):
    m = carriere(3)
    diag = Assembler(m, 5)
    full = Assembler(m, 5, coupled=True)
    assert np.max(np.abs(diag[name].to_dense() - full[name].to_dense())) <= 1e-12


@pytest.mark.parametrize("model", [carriere(3), perturbed(), product(carriere(3), suspension(0.2))],
                         ids=["carriere", "perturbed", "product"])
@pytest.mark.parametrize("d,dstar", [("d_kappa", "delta_kappa"), ("dbar_kappa", "dbar_kappa_star"),
                                     ("partial_B", "partial_B_star")])
def test_adjoints_by_parseval(model, d, dstar, rng):
    a = get_assembler(model, 4)
    u, v = random_coeffs(rng, a.K, a.E), random_coeffs(rng, a.K, a.E)
    lhs = np.vdot(v, a[d].apply(u))
    rhs = np.vdot(a[dstar].apply(v), u)
    assert abs(lhs - rhs) <= 1e-12 * max(1, abs(lhs))


def test_all_named_operators_build():
    a = get_assembler(perturbed(), 6)
    for name in OPERATOR_NAMES:
        assert a[name].blocks.shape == (1, a.K * a.E, a.K * a.E)


def test_lambda_with_literal_minus_star_convention_fails():
    a = get_assembler(carriere(3), 6)
    S = a["star"]
    deg_sign = a.sign_by_degree(lambda r: (-1) ** r)
    assert residual(a["Lambda"], (S @ deg_sign) @ a["L"] @ S) <= 1e-12
    assert residual(a["Lambda"], -1 * (S @ a["L"] @ S)) > 0.5


def test_sign_flipped_codifferential_is_caught():
    a = get_assembler(carriere(3), 6)
    wrong = a["delta_B"] + 0.5 * a["kappa_contract"]   # should be a minus
    assert residual(a["delta_kappa"], a["delta_B"] - 0.5 * a["kappa_contract"]) <= 1e-12
    assert residual(a["delta_kappa"], wrong) > 0.1


def test_unknown_operator():
    with pytest.raises(KeyError):
        get_assembler(carriere(3), 2)["nonsense"]
    with pytest.raises(ValueError):
        Assembler(carriere(3), 0)


def test_coupled_residual_uses_interior():
    a = get_assembler(perturbed(), 10)
    assert a.interior.sum() == 2 * (10 - 6) + 1
    small = get_assembler(perturbed(), 3)
    assert small.interior.sum() == 1
