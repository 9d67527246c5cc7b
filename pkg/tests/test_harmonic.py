import math

import numpy as np
import pytest

from twistedhodge.harmonic import (
    NotHermitianError,
    check_flavor,
    cohomology,
    hodge_decomposition_check,
    kernel_basis,
    spectrum,
)
from twistedhodge.model import carriere, product, suspension, taut_model
from twistedhodge.operators import get_assembler

from .conftest import LOG_LAMBDA, bandwidth3, perturbed, taut_perturbed


def test_carriere_tables():
    m = carriere(3)
    k = cohomology(m, 16, "kappa")
    assert k.graded == [0, 0, 0] and not any(k.bigraded.values())
    B = cohomology(m, 16, "B")
    assert B.graded == [1, 1, 0]
    assert B.bigraded == {(0, 0): 1, (0, 1): 1, (1, 0): 0, (1, 1): 0}
    assert cohomology(m, 16, "T").graded == [0, 1, 1]


def test_carriere_kappa_gap():
    # smallest eigenvalue of boxbar_kappa is c^2 / 8 at k = 0
    assert cohomology(carriere(3), 8, "kappa").gap == pytest.approx(LOG_LAMBDA ** 2 / 8, rel=1e-12)


@pytest.mark.parametrize("factory,graded", [
    (taut_model, [1, 2, 1]),
    (lambda: product(taut_model(), taut_model()), [1, 4, 6, 4, 1]),
    (lambda: product(carriere(3), taut_model()), [0, 0, 0, 0, 0]),
    (perturbed, [0, 0, 0]),
    (taut_perturbed, [1, 2, 1]),
    (bandwidth3, [0, 0, 0]),
])
def test_twisted_tables(factory, graded):
    t = cohomology(factory(), 8, "kappa")
    assert t.graded == graded
    assert t.sum_consistent


def test_taut_bigraded():
    t = cohomology(product(taut_model(), taut_model()), 6, "kappa")
    assert t.bigraded[(1, 1)] == 4 and t.bigraded[(2, 0)] == 1 and t.bigraded[(0, 2)] == 1


def test_kernel_basis_is_orthonormal_and_harmonic():
    m = taut_model()
    a = get_assembler(m, 6)
    res = kernel_basis(a["Delta_kappa"], a.basis.slot(1))
    V = np.array([v.ravel() for v in res.vectors])
    assert np.allclose(V.conj() @ V.T, np.eye(res.dim))
    for v in res.vectors:
        assert np.max(np.abs(a["Delta_kappa"].apply(v))) <= 1e-12


def test_non_hermitian_rejected():
    a = get_assembler(carriere(3), 3)
    with pytest.raises(NotHermitianError):
        kernel_basis(a["d_kappa"])
    with pytest.raises(NotHermitianError):
        spectrum(carriere(3), 3, "d_kappa")


def test_flavor_aliases():
    assert check_flavor("κ") == "kappa"
    with pytest.raises(ValueError):
        check_flavor("Q")


def test_spectrum_minimum():
    vals = spectrum(carriere(3), 32, "Delta_kappa", 3, key=0)
    assert vals[0] == pytest.approx(LOG_LAMBDA ** 2 / 4, abs=1e-12)
    assert vals[0] == pytest.approx(0.2316, abs=5e-5)
    assert vals[1] == pytest.approx(4 * math.pi ** 2 + LOG_LAMBDA ** 2 / 4)


@pytest.mark.parametrize("model", [carriere(3), taut_model(), perturbed()], ids=["carriere", "taut", "perturbed"])
@pytest.mark.parametrize("key", [0, 1, 2, (0, 0), (1, 0), (0, 1), (1, 1)])
def test_hodge_decomposition(model, key):
    assert hodge_decomposition_check(model, 6, key).passed


def test_dims_stable_in_N():
    for m in (carriere(3), suspension(0.7)):
        dims = {N: cohomology(m, N, "kappa").graded for N in (1, 2, 4, 8)}
        assert len({tuple(d) for d in dims.values()}) == 1
    dims = [cohomology(bandwidth3(), N, "B").rows() for N in (5, 6, 8, 10)]
    assert all(d == dims[0] for d in dims)


def test_cutoff_mode():
    t = cohomology(carriere(3), 16, "kappa")
    assert t.cutoff_mode == 0
    assert cohomology(perturbed(), 6, "kappa").cutoff_mode is None
