import math

import numpy as np
import pytest

from twistedhodge.harmonic import kernel_basis
from twistedhodge.model import carriere, product, taut_model
from twistedhodge.operators import anticommutator, get_assembler, residual
from twistedhodge.report import NA, PASS
from twistedhodge.weitzenbock import (
    ROUGH_VARIANTS,
    curvature_endomorphism,
    gauge_defect,
    kappa_norm_sq,
    lie_correction,
    ricci_summary,
    rough_laplacian,
    vanishing_probe,
    weitzenbock_residuals,
)

from .conftest import EXACT_MODELS, LOG_LAMBDA, perturbed, taut_perturbed

GAUGE_ROWS = ("twisted Weitzenbock", "dbar_B* kappa01^ = -nabla_H10", "boxbar_kappa via Tbar rough Laplacian on (")


def test_curvature_endomorphism_on_carriere():
    a = get_assembler(carriere(3), 4)
    F = curvature_endomorphism(carriere(3), 4)
    for r, want in ((0, 0.0), (1, -LOG_LAMBDA ** 2), (2, 0.0)):
        idx = a.basis.slot(r)
        blk = F.blocks[:, idx][:, :, idx]
        assert np.allclose(blk, want * np.eye(len(idx))[None], atol=1e-12)


def test_rough_laplacian_on_functions():
    m = carriere(3)
    a = get_assembler(m, 8)
    R = rough_laplacian(m, 8)
    k = a.modes[:, 0]
    assert np.allclose(R.blocks[:, 0, 0], 4 * math.pi ** 2 * k ** 2, rtol=1e-13, atol=1e-12)


@pytest.mark.parametrize("variant", ROUGH_VARIANTS)
def test_rough_laplacians_psd(variant):
    for m in (carriere(3), perturbed()):
        R = rough_laplacian(m, 6, variant)
        w = np.linalg.eigvalsh(R.blocks)
        assert w.min() >= -1e-12 * max(1, np.abs(w).max())
    with pytest.raises(ValueError):
        rough_laplacian(carriere(3), 2, "X")


def test_lie_correction_is_zeroth_order():
    A = lie_correction(carriere(3), 6)
    assert np.allclose(A.blocks, A.blocks[:1], atol=1e-12)  # same block for every mode


@pytest.mark.parametrize("name", sorted(EXACT_MODELS))
def test_weitzenbock_suite_exact(name):
    rep = weitzenbock_residuals(EXACT_MODELS[name](), 6)
    assert all(c.verdict == PASS for c in rep.checks), [c.name for c in rep.checks if c.verdict != PASS]
    assert rep.max_residual() <= 1e-10


def test_weitzenbock_suite_coupled_gauge_rows_not_applicable():
    rep = weitzenbock_residuals(perturbed(), 24)
    assert rep.passed
    assert rep.data["gauge_defect"] == pytest.approx(0.1 * math.pi, rel=1e-10)
    na = [c for c in rep.checks if c.verdict == NA]
    assert {c.name for c in na} - {"gauge dbar_B* kappa01 = 0"}
    for c in na:
        assert c.name.startswith(GAUGE_ROWS) or c.name.startswith("gauge")
        assert c.residual > 1e-8  # genuinely false, not merely skipped
    for c in rep.checks:
        if c.verdict == PASS and c.residual is not None:
            assert c.residual <= 1e-8


def test_gauge_defect_value():
    # dbar_B^* kappa^{0,1} = -(1/2) h''; h'' = -0.4 pi sin(2 pi t) has coefficients of size 0.2 pi
    assert gauge_defect(get_assembler(carriere(3), 4)) <= 1e-15
    assert gauge_defect(get_assembler(perturbed(), 8)) == pytest.approx(0.1 * math.pi, rel=1e-10)


def test_quarter_not_half_kappa01_coefficient():
    a = get_assembler(carriere(3), 6)
    k01 = 0.5 * kappa_norm_sq(a)
    e01, i01 = a["kappa01_wedge"], a["H01_contract"]
    dB, dBs = a["dbar_B"], a["dbar_B_star"]
    base = a["boxbar_B"] - 0.5 * anticommutator(e01, dBs) - 0.5 * anticommutator(dB, i01)
    assert residual(a["boxbar_kappa"], base + 0.25 * k01) <= 1e-12
    assert residual(a["boxbar_kappa"], base + 0.5 * k01) > 1e-3


def test_ricci_summary():
    assert ricci_summary(carriere(3))["sign"] == "negative"
    assert ricci_summary(taut_model())["sign"] == "flat"
    assert ricci_summary(perturbed())["sign"] == "mixed"
    assert ricci_summary(product(taut_model(), carriere(3)))["sign"] == "nonpositive"


def test_vanishing_probe_carriere():
    rep = vanishing_probe(carriere(3), 8)
    assert rep.passed
    assert rep.data["positivity"][0] == pytest.approx(LOG_LAMBDA ** 2 / 4)
    assert rep.data["positivity"][1] < 0


def test_vanishing_probe_flat_taut_product():
    rep = vanishing_probe(product(taut_model(), taut_model()), 4)
    assert rep.passed
    assert rep.data["ricci"]["sign"] == "flat"


def test_harmonic_10_forms_need_not_be_antiholomorphically_parallel():
    # taut but not minimal: harmonic (r,0) forms satisfy the energy balance
    # |nabla_Vbar phi|^2 = 1/4 <|kappa01|^2 phi, phi> and so are not parallel
    m = taut_perturbed()
    rep = vanishing_probe(m, 16)
    for r in (0, 1):
        par = rep[f"harmonic ({r},0) forms satisfy nabla_Vbar phi = 0"]
        bal = rep[f"harmonic ({r},0): |nabla_Vbar phi|^2 = 1/4 <|kappa01|^2 phi, phi>"]
        assert not par.passed and par.residual > 1e-2
        assert bal.passed
    a = get_assembler(m, 16)
    phi = kernel_basis(a["Delta_kappa"], a.basis.slot((0, 0))).vectors[0]
    grad = a.nabla_Vb(0).apply(phi)
    energy = np.linalg.norm(grad) ** 2
    quarter = 0.25 * np.vdot(phi, (0.5 * kappa_norm_sq(a)).apply(phi)).real
    assert energy == pytest.approx(quarter, rel=1e-9)
    assert energy > 1e-4


def test_harmonic_10_forms_parallel_when_minimal():
    rep = vanishing_probe(taut_model(), 8)
    assert rep["harmonic (1,0) forms satisfy nabla_Vbar phi = 0"].passed
