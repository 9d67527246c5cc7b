"""Rough Laplacians, curvature terms, and Weitzenbock-type identities.

Conventions on each suspension factor: ``nabla_S S = -h' T``,
``nabla_S T = h' S``, ``nabla_T = d/dt`` on frame coefficients.  With
``V = (S - iT)/sqrt2`` one has ``H^{1,0} = (i/2) h' (S - iT)`` and
``H^{0,1} = -(i/2) h' (S + iT)``.

Several identities below only hold when the mean curvature is
Dolbeault-coclosed (``dbar_B^* kappa^{0,1} = 0``).  That gauge is measured,
and when it fails those identities are reported as ``n/a`` with their
residual recorded so the failure stays visible.
"""
from __future__ import annotations

import numpy as np

from .identities import PSD_TOL, default_tolerance, min_relative_eigenvalue
from .model import ModelSpec, is_taut
from .operators import Assembler, OperatorMatrix, anticommutator, get_assembler, residual
from .report import NA, Check, CheckReport

ROUGH_VARIANTS = ("tr", "T", "Tbar")


# ---------------------------------------------------------------------------
# building blocks


def _h(a: Assembler):
    return [a.h(j) for j in range(a.n)]


def _half_gauss_defect(a: Assembler, j: int):
    """Mode operator for ``(h'' + h'^2)/2 = -K/2`` on factor ``j``."""
    H = a.h(j)
    if a.coupled:
        return 0.5 * (a.mode_mult(j, a.geom.factors[j].h_second) + H @ H)
    return 0.5 * H * H


def kappa_norm_sq(a: Assembler) -> OperatorMatrix:
    """Multiplication by ``|kappa_B|^2``."""
    return a._sum(a.term(a.mm(H, H), a.basis.identity) for H in _h(a))


def nabla_H01(a: Assembler) -> OperatorMatrix:
    return a._sum(a.nabla_along(j, -0.5j * H, 0.5 * H) for j, H in enumerate(_h(a)))


def nabla_H10(a: Assembler) -> OperatorMatrix:
    return a._sum(a.nabla_along(j, 0.5j * H, 0.5 * H) for j, H in enumerate(_h(a)))


def nabla_kappa(a: Assembler) -> OperatorMatrix:
    return a._sum(a.nabla_along(j, 0 * H, H) for j, H in enumerate(_h(a)))


def curvature_VVbar(a: Assembler) -> OperatorMatrix:
    """``sum_a R(V_a, Vbar_a) = i sum_a R(S_a, T_a)``."""
    return a._sum(1j * a.curvature_ST(j) for j in range(a.n))


def div_H01(a: Assembler) -> OperatorMatrix:
    return a._sum(a.term(_half_gauss_defect(a, j), a.basis.identity) for j in range(a.n))


def _rough_from_frame(a: Assembler, variant: str) -> OperatorMatrix:
    """Tensorial second-derivative expression, independent of any adjoint."""
    H = _h(a)
    out = a.zero()
    for j in range(a.n):
        if variant == "tr":
            # -nabla_S nabla_S + nabla_{nabla_S S} - nabla_T nabla_T, nabla_S S = -h' T
            out = out - a.nabla_S(j) @ a.nabla_S(j) - a.nabla_T(j) @ a.nabla_T(j) \
                + a.nabla_along(j, 0 * H[j], -1 * H[j])
        elif variant == "T":
            # -nabla_V nabla_Vbar + nabla_{nabla_V Vbar}, nabla_V Vbar = (i h'/2)(S + iT)
            out = out - a.nabla_V(j) @ a.nabla_Vb(j) + a.nabla_along(j, 0.5j * H[j], -0.5 * H[j])
        elif variant == "Tbar":
            out = out - a.nabla_Vb(j) @ a.nabla_V(j) + a.nabla_along(j, -0.5j * H[j], -0.5 * H[j])
        else:
            raise ValueError(f"unknown rough Laplacian variant {variant!r}; use one of {ROUGH_VARIANTS}")
    if variant == "tr":
        return out + nabla_kappa(a)
    return out + (nabla_H01(a) if variant == "T" else nabla_H10(a))


def _rough_from_adjoints(a: Assembler, variant: str) -> OperatorMatrix:
    if variant == "tr":
        return a._sum(a.nabla_S(j).H @ a.nabla_S(j) + a.nabla_T(j).H @ a.nabla_T(j) for j in range(a.n))
    if variant == "T":
        return a._sum(a.nabla_Vb(j).H @ a.nabla_Vb(j) for j in range(a.n))
    if variant == "Tbar":
        return a._sum(a.nabla_V(j).H @ a.nabla_V(j) for j in range(a.n))
    raise ValueError(f"unknown rough Laplacian variant {variant!r}; use one of {ROUGH_VARIANTS}")


def rough_laplacian(m: ModelSpec, N: int, variant: str = "tr") -> OperatorMatrix:
    """``nabla^* nabla`` over the real frame (``tr``), over ``Vbar`` (``T``) or ``V`` (``Tbar``)."""
    op = _rough_from_frame(get_assembler(m, N), variant)
    op.name = f"rough_{variant}"
    return op


def curvature_endomorphism(m: ModelSpec, N: int) -> OperatorMatrix:
    """``F = sum theta^a ^ E_b _| R(E_b, E_a)``; equals Gauss curvature on 1-forms."""
    a = get_assembler(m, N)
    b = a.basis
    op = a._sum(a.ext(b.eps_T(j) @ b.iota_S(j) - b.eps_S(j) @ b.iota_T(j)) @ a.curvature_ST(j)
                for j in range(a.n))
    op.name = "F"
    return op


def lie_derivative_kappa(a: Assembler) -> OperatorMatrix:
    """``L_{kappa#} = d_B i(kappa#) + i(kappa#) d_B`` (Cartan)."""
    return anticommutator(a["d_B"], a["kappa_contract"])


def lie_correction(m: ModelSpec, N: int) -> OperatorMatrix:
    """``A = L_{kappa#} - nabla_{kappa#}``, a zeroth-order derivation."""
    a = get_assembler(m, N)
    op = lie_derivative_kappa(a) - nabla_kappa(a)
    op.name = "A_kappa"
    return op


def gauge_defect(a: Assembler) -> float:
    """``max |dbar_B^* kappa^{0,1}|`` over Fourier coefficients."""
    one = np.zeros((a.K, a.E), dtype=complex)
    one[np.all(a.modes == 0, axis=1), 0] = 1.0
    k01 = a["kappa01_wedge"].apply(one)
    return float(np.max(np.abs(a["dbar_B_star"].apply(k01))))


# ---------------------------------------------------------------------------
# identity catalogue


def _weitzenbock_table(a: Assembler):
    m = a.model
    n = a.n
    b = a.basis
    rough = {v: _rough_from_frame(a, v) for v in ROUGH_VARIANTS}
    F = curvature_endomorphism(m, a.N)
    A = lie_correction(m, a.N)
    Lk = lie_derivative_kappa(a)
    k2 = kappa_norm_sq(a)
    k01 = 0.5 * k2  # |kappa^{0,1}|^2 = i(H^{0,1}) kappa^{0,1}
    nH01, nH10, RVV, divH = nabla_H01(a), nabla_H10(a), curvature_VVbar(a), div_H01(a)
    nT, nTb = rough["T"], rough["Tbar"]
    e01, i01 = a["kappa01_wedge"], a["H01_contract"]
    dB, dBs, bB, bk = a["dbar_B"], a["dbar_B_star"], a["boxbar_B"], a["boxbar_kappa"]

    curv_term = a._sum(a.ext(b.eps_wb(j) @ b.iota_Vb(j)) @ (1j * a.curvature_ST(j)) for j in range(n))
    dH_term = a._sum(a.term(_half_gauss_defect(a, j), b.eps_wb(j) @ b.iota_Vb(j)) for j in range(n))
    twist01 = -0.5 * anticommutator(e01, dBs) - 0.5 * anticommutator(dB, i01) + 0.25 * k01

    rows = []
    for v in ROUGH_VARIANTS:
        rows.append((f"rough {v}: frame formula = sum nabla^* nabla", "rough Laplacian",
                     rough[v], _rough_from_adjoints(a, v), None))
    rows += [
        ("Delta_B = rough + A + F", "generalised Weitzenbock formula", a["Delta_B"], rough["tr"] + A + F, None),
        ("twisted Weitzenbock: Delta_kappa = rough + F + 1/4|kappa|^2", "twisted Weitzenbock formula",
         a["Delta_kappa"], rough["tr"] + F + 0.25 * k2, None, True),
        ("Delta_kappa = Delta_B - 1/2(L + L*) + 1/4|kappa|^2", "twisted basic Laplacian",
         a["Delta_kappa"], a["Delta_B"] - 0.5 * (Lk + Lk.H) + 0.25 * k2, None),
        ("nabla_T*nabla_T = Tbar rough + nabla_(H01-H10) - R(V,Vbar)", "difference of complex rough Laplacians",
         nT, nTb + nH01 - nH10 - RVV, None),
        ("boxbar_B = rough T + curvature + nabla H01 term", "Dolbeault Weitzenbock formula",
         bB, nT + curv_term + dH_term, None),
        ("boxbar_kappa = boxbar_B + twist terms", "twisted Dolbeault Laplacian",
         bk, bB + twist01, None),
        ("boxbar_kappa full expansion", "twisted Dolbeault Weitzenbock formula",
         bk, nT + curv_term + dH_term + twist01, None),
    ]
    for r in range(n + 1):
        c = b.slot((r, 0))
        rows += [
            (f"boxbar_B = rough T on ({r},0)", "Dolbeault Laplacian on (r,0)", bB, nT, c),
            (f"boxbar_B = Tbar form on ({r},0)", "Dolbeault Laplacian on (r,0)", bB, nTb + nH01 - nH10 - RVV, c),
            (f"dbar_B* kappa01^ = -nabla_H10 on ({r},0)", "contraction of the mean curvature",
             dBs @ e01, -1 * nH10, c, True),
            (f"boxbar_kappa via T rough Laplacian on ({r},0)", "twisted Weitzenbock on (r,0)",
             bk, nT - 0.5 * dBs @ e01 - 0.5 * i01 @ dB + 0.25 * k01, c),
            (f"boxbar_kappa via Tbar rough Laplacian on ({r},0)", "twisted Weitzenbock on (r,0)",
             bk, nTb - RVV + nH01 + 0.5 * dBs @ e01 - 0.5 * i01 @ dB + 0.25 * k01, c, True),
        ]
        c = b.slot((r, n))
        rows += [
            (f"boxbar_B = rough T + R(V,Vbar) + div on ({r},{n})", "Dolbeault Laplacian on (r,n)",
             bB, nT + RVV + divH, c),
            (f"boxbar_B = Tbar form + div on ({r},{n})", "Dolbeault Laplacian on (r,n)",
             bB, nTb + nH01 - nH10 + divH, c),
            (f"boxbar_kappa via Tbar rough Laplacian on ({r},{n})", "twisted Weitzenbock on (r,n)",
             bk, nTb - nH10 + 0.5 * nH01 + 0.5 * divH - 0.5 * e01 @ dBs + 0.25 * k01, c),
            (f"boxbar_kappa via T rough Laplacian on ({r},{n})", "twisted Weitzenbock on (r,n)",
             bk, nT + RVV - 0.5 * nH01 - 0.5 * e01 @ dBs + 0.5 * divH + 0.25 * k01, c),
        ]
    # rows flagged True need dbar_B^* kappa^{0,1} = 0
    return [r if len(r) == 6 else r + (False,) for r in rows], rough


def weitzenbock_residuals(m: ModelSpec, N: int, tol: float | None = None) -> CheckReport:
    """Check every Weitzenbock-type identity as a matrix residual."""
    a = get_assembler(m, N)
    tol = default_tolerance(a) if tol is None else tol
    rep = CheckReport("weitzenbock", m.label, N)
    defect = gauge_defect(a)
    gauge_ok = defect <= tol
    rep.add(Check("gauge dbar_B* kappa01 = 0", "coclosed mean curvature", defect, tol,
                  verdict="" if gauge_ok else NA,
                  note="" if gauge_ok else "mean curvature not coclosed; gauge-dependent identities not applicable"))
    rows, rough = _weitzenbock_table(a)
    for name, anchor, lhs, rhs, cols, needs_gauge in rows:
        res = residual(lhs, rhs, cols=cols)
        if needs_gauge and not gauge_ok:
            rep.add(Check(name, anchor, res, tol, verdict=NA, note=f"gauge defect {defect:.3e}"))
        else:
            rep.add(Check(name, anchor, res, tol))
    for v in ROUGH_VARIANTS:
        mev = min_relative_eigenvalue(rough[v])
        rep.add(Check(f"rough {v} PSD", "non-negative rough Laplacian", max(0.0, -mev), PSD_TOL,
                      note=f"min relative eigenvalue {mev:.3e}"))
    rep.data["gauge_defect"] = defect
    return rep


# ---------------------------------------------------------------------------
# vanishing theorems


def ricci_summary(m: ModelSpec, samples: int = 256) -> dict:
    """Sign of the transverse Ricci curvature, sampled per factor."""
    from .model import geometry
    vals = np.concatenate([f.gauss_curvature.samples(samples).real for f in geometry(m).factors])
    lo, hi = float(vals.min()), float(vals.max())
    eps = 1e-12
    if abs(lo) <= eps and abs(hi) <= eps:
        sign = "flat"
    elif lo >= -eps and hi > eps:
        sign = "nonnegative, positive somewhere"
    elif hi < -eps:
        sign = "negative"
    elif hi <= eps:
        sign = "nonpositive"
    else:
        sign = "mixed"
    # a product with a flat factor is nonnegative only if every factor is
    per_factor = [float(f.gauss_curvature.samples(samples).real.min()) for f in geometry(m).factors]
    if sign == "nonnegative, positive somewhere" and min(per_factor) < -eps:
        sign = "mixed"
    return {"sign": sign, "min": lo, "max": hi}


def vanishing_probe(m: ModelSpec, N: int, tol_kernel: float = 1e-9, positivity_tol: float = 1e-9) -> CheckReport:
    """Evaluate vanishing-theorem hypotheses and compare with computed dimensions."""
    from .harmonic import cohomology, kernel_basis

    a = get_assembler(m, N)
    n = a.n
    b = a.basis
    rep = CheckReport("vanishing", m.label, N)
    table = cohomology(m, N, "kappa", tol=tol_kernel)
    F = curvature_endomorphism(m, N)
    P = F + 0.25 * kappa_norm_sq(a)
    positivity = {}
    for r in range(2 * n + 1):
        idx = b.slot(r)
        blk = P.blocks[:, idx][:, :, idx] if not P.coupled else P.blocks[0][np.ix_(P.global_index(idx), P.global_index(idx))][None]
        lam = float(np.min(np.linalg.eigvalsh(0.5 * (blk + np.conj(np.swapaxes(blk, 1, 2))))))
        positivity[r] = lam
        predicted = lam > positivity_tol
        dim = table.graded[r]
        rep.add(Check(f"F + 1/4|kappa|^2 > 0 on degree {r}", "positivity vanishing",
                      observed=dim if predicted else None, expected=0 if predicted else None,
                      note=f"min eigenvalue {lam:.6e}; " + ("predicts vanishing" if predicted else "inconclusive")))
    ric = ricci_summary(m)
    taut = is_taut(m)
    hyp1 = ric["sign"] == "nonnegative, positive somewhere"
    hyp2 = ric["sign"] == "flat" and not taut
    slots = []
    if hyp1 or hyp2:
        for r in range(1, n + 1):
            slots += [(r, 0), (0, r)]
        for s in range(0, n):
            slots += [(n, s), (s, n)]
    reason = "Ricci nonnegative and positive somewhere" if hyp1 else (
        "Ricci flat and non-taut" if hyp2 else f"hypotheses fail (Ricci {ric['sign']}, taut={taut})")
    rep.add(Check("Ricci vanishing hypotheses", "Ricci vanishing", note=reason))
    for key in sorted(set(slots)):
        rep.add(Check(f"h_kappa^{key} = 0 predicted by Ricci", "Ricci vanishing",
                      observed=table.bigraded[key], expected=0))
    # harmonic (r,0) forms: parallel along Q^{0,1}, and the energy balance
    # |nabla_T phi|^2 = 1/4 <|kappa^{0,1}|^2 phi, phi> that integrating the
    # (r,0) Weitzenbock formula gives
    Dk = a["Delta_kappa"]
    k01 = 0.5 * kappa_norm_sq(a)
    scale = max(1.0, float(np.sqrt(np.max(np.abs(np.linalg.eigvalsh(Dk.blocks))))))
    tol = default_tolerance(a) * scale
    for r in range(n + 1):
        vecs = kernel_basis(Dk, b.slot((r, 0)), tol=tol_kernel).vectors
        worst, balance = 0.0, 0.0
        for coeffs in vecs:
            grads = [a.nabla_Vb(j).apply(coeffs) for j in range(n)]
            worst = max(worst, float(np.sqrt(sum(np.linalg.norm(g) ** 2 for g in grads))))
            energy = sum(np.linalg.norm(g) ** 2 for g in grads)
            balance = max(balance, abs(energy - 0.25 * np.vdot(coeffs, k01.apply(coeffs)).real))
        rep.add(Check(f"harmonic ({r},0) forms satisfy nabla_Vbar phi = 0", "parallel harmonic (r,0) forms",
                      worst, tol, note=f"{len(vecs)} harmonic forms"))
        rep.add(Check(f"harmonic ({r},0): |nabla_Vbar phi|^2 = 1/4 <|kappa01|^2 phi, phi>",
                      "energy balance of harmonic (r,0) forms", balance, tol))
    rep.data.update({"ricci": ric, "positivity": positivity, "dims": table.graded})
    return rep
