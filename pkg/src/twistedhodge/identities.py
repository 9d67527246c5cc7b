"""Catalogue of operator identities, checked as matrix residuals."""
from __future__ import annotations

import numpy as np

from .model import ModelSpec, is_taut
from .operators import (
    HERMITIAN_NAMES,
    Assembler,
    OperatorMatrix,
    commutator,
    get_assembler,
    residual,
)
from .report import Check, CheckReport

TOL_EXACT = 1e-10
TOL_COUPLED = 1e-8
PSD_TOL = 1e-12


def default_tolerance(asm: Assembler) -> float:
    return TOL_COUPLED if asm.coupled else TOL_EXACT


def grading_leak(asm: Assembler, A: OperatorMatrix, dr: int, ds: int) -> float:
    """Relative size of the part of ``A`` that does not shift bidegree by (dr, ds)."""
    b = asm.basis
    ok = ((b.r[:, None] - b.r[None, :]) == dr) & ((b.s[:, None] - b.s[None, :]) == ds)
    if A.coupled:
        ok = np.tile(ok, (asm.K, asm.K))[None]
    leak = np.linalg.norm(np.where(ok, 0, A.blocks))
    return float(leak / max(1.0, np.linalg.norm(A.blocks)))


def min_relative_eigenvalue(A: OperatorMatrix) -> float:
    """``min(lambda) / max(1, max |lambda|)`` over all blocks."""
    w = np.linalg.eigvalsh(A.blocks)
    return float(np.min(w) / max(1.0, np.max(np.abs(w))))


def _identity_table(a: Assembler):
    """(name, anchor, lhs, rhs[, cols]) for every identity in the catalogue."""
    S = a["star"]
    Z = a.zero()
    deg_sign = a.sign_by_degree(lambda r: (-1) ** r)
    deg_sign1 = a.sign_by_degree(lambda r: (-1) ** (r + 1))
    bideg_sign = a.sign_by_bidegree(lambda r, s: (-1) ** (r + s))
    bideg_sign1 = a.sign_by_bidegree(lambda r, s: (-1) ** (r + s + 1))
    star_inv = S @ deg_sign  # star^2 = (-1)^deg
    I = 1j
    rows = [
        # twisted de Rham complex
        ("d_B^2=0", "basic complex", a["d_B"] @ a["d_B"], Z),
        ("d_T^2=0", "closed mean curvature", a["d_T"] @ a["d_T"], Z),
        ("d_kappa^2=0", "twisted differential squares to zero", a["d_kappa"] @ a["d_kappa"], Z),
        ("delta_kappa^2=0", "twisted codifferential squares to zero", a["delta_kappa"] @ a["delta_kappa"], Z),
        ("[d_kappa,Delta_kappa]=0", "twisted Laplacian commutes", a["d_kappa"] @ a["Delta_kappa"], a["Delta_kappa"] @ a["d_kappa"]),
        ("[Delta_kappa,delta_kappa]=0", "twisted Laplacian commutes", a["Delta_kappa"] @ a["delta_kappa"], a["delta_kappa"] @ a["Delta_kappa"]),
        ("[Delta_kappa,star]=0", "twisted Laplacian commutes with star", a["Delta_kappa"] @ S, S @ a["Delta_kappa"]),
        ("d_kappa star=(-1)^r star delta_kappa", "star intertwines twisted operators", a["d_kappa"] @ S, S @ a["delta_kappa"] @ deg_sign),
        ("star d_kappa=(-1)^(r+1) delta_kappa star", "star intertwines twisted operators", S @ a["d_kappa"], a["delta_kappa"] @ S @ deg_sign1),
        ("Delta_B star=star Delta_T", "basic/twisted Laplacian duality", a["Delta_B"] @ S, S @ a["Delta_T"]),
        ("star^2=(-1)^deg", "transverse star involution", S @ S, deg_sign),
        # adjoints: conjugate transpose vs formula
        ("delta_B=-star d_T star", "basic codifferential via star", a["delta_B"], -1 * (S @ a["d_T"] @ S)),
        ("delta_T=-star d_B star", "basic codifferential via star", a["delta_T"], -1 * (S @ a["d_B"] @ S)),
        ("delta_T=-sum E_a|nabla_E_a", "codifferential in a frame", a["delta_T"], a.delta_T_coordinate()),
        ("delta_B=delta_T+kappa#|", "codifferential mean curvature shift", a["delta_B"], a["delta_T"] + a["kappa_contract"]),
        ("delta_kappa=delta_B-1/2 kappa#|", "twisted codifferential", a["delta_kappa"], a["delta_B"] - 0.5 * a["kappa_contract"]),
        # type decomposition
        ("d_B=partial_B+dbar_B", "type decomposition of d_B", a["d_B"], a["partial_B"] + a["dbar_B"]),
        ("d_kappa=partial_kappa+dbar_kappa", "type decomposition of d_kappa", a["d_kappa"], a["partial_kappa"] + a["dbar_kappa"]),
        ("kappa=kappa10+kappa01", "type decomposition of kappa", a["kappa_wedge"], a["kappa10_wedge"] + a["kappa01_wedge"]),
        ("partial_T*=-star dbar_B star", "Dolbeault adjoints via star", a["partial_T_star"], -1 * (S @ a["dbar_B"] @ S)),
        ("dbar_T*=-star partial_B star", "Dolbeault adjoints via star", a["dbar_T_star"], -1 * (S @ a["partial_B"] @ S)),
        ("partial_B*=-star dbar_T star", "Dolbeault adjoints via star", a["partial_B_star"], -1 * (S @ a["dbar_T"] @ S)),
        ("dbar_B*=-star partial_T star", "Dolbeault adjoints via star", a["dbar_B_star"], -1 * (S @ a["partial_T"] @ S)),
        ("star(kappa01^phi)=(-1)^(r+s) H10|star phi", "star conjugates wedge to contraction", S @ a["kappa01_wedge"], a["H10_contract"] @ S @ bideg_sign),
        ("star dbar_B=(-1)^(r+s+1) partial_T* star", "star conjugates Dolbeault operators", S @ a["dbar_B"], a["partial_T_star"] @ S @ bideg_sign1),
        ("partial_B*=partial_T*+H10|", "mean curvature shift of Dolbeault adjoints", a["partial_B_star"], a["partial_T_star"] + a["H10_contract"]),
        ("dbar_B*=dbar_T*+H01|", "mean curvature shift of Dolbeault adjoints", a["dbar_B_star"], a["dbar_T_star"] + a["H01_contract"]),
        ("partial_T*=-sum V_a|nabla_Vbar_a", "Dolbeault adjoints in a frame", a["partial_T_star"], a.partial_T_star_coordinate()),
        ("dbar_T*=-sum Vbar_a|nabla_V_a", "Dolbeault adjoints in a frame", a["dbar_T_star"], a.dbar_T_star_coordinate()),
        ("partial_kappa*=partial_B*-1/2 H10|", "twisted Dolbeault adjoints", a["partial_kappa_star"], a["partial_B_star"] - 0.5 * a["H10_contract"]),
        ("dbar_kappa*=dbar_B*-1/2 H01|", "twisted Dolbeault adjoints", a["dbar_kappa_star"], a["dbar_B_star"] - 0.5 * a["H01_contract"]),
        ("delta_kappa=partial_kappa*+dbar_kappa*", "twisted Dolbeault adjoints", a["delta_kappa"], a["partial_kappa_star"] + a["dbar_kappa_star"]),
        # Lefschetz
        ("Lambda=star^-1 L star", "contraction with the Kahler form", a["Lambda"], star_inv @ a["L"] @ S),
        ("[L,Lambda]=(deg-n)", "sl2 commutator", commutator(a["L"], a["Lambda"]), a.sign_by_degree(lambda r: r - a.n)),
        # untwisted Kahler identities
        ("[L,d_B]=0", "basic Kahler identities", a["L"] @ a["d_B"], a["d_B"] @ a["L"]),
        ("[Lambda,delta_B]=0", "basic Kahler identities", a["Lambda"] @ a["delta_B"], a["delta_B"] @ a["Lambda"]),
        ("[L,partial_B]=0", "basic Kahler identities", a["L"] @ a["partial_B"], a["partial_B"] @ a["L"]),
        ("[L,dbar_B]=0", "basic Kahler identities", a["L"] @ a["dbar_B"], a["dbar_B"] @ a["L"]),
        ("[Lambda,partial_B*]=0", "basic Kahler identities", a["Lambda"] @ a["partial_B_star"], a["partial_B_star"] @ a["Lambda"]),
        ("[Lambda,dbar_B*]=0", "basic Kahler identities", a["Lambda"] @ a["dbar_B_star"], a["dbar_B_star"] @ a["Lambda"]),
        ("[L,partial_B*]=-i dbar_T", "basic Kahler identities", commutator(a["L"], a["partial_B_star"]), -I * a["dbar_T"]),
        ("[L,dbar_B*]=i partial_T", "basic Kahler identities", commutator(a["L"], a["dbar_B_star"]), I * a["partial_T"]),
        ("[Lambda,partial_B]=-i dbar_T*", "basic Kahler identities", commutator(a["Lambda"], a["partial_B"]), -I * a["dbar_T_star"]),
        ("[Lambda,dbar_B]=i partial_T*", "basic Kahler identities", commutator(a["Lambda"], a["dbar_B"]), I * a["partial_T_star"]),
        # twisted Kahler identities
        ("[L,d_kappa]=0", "twisted Kahler identities", a["L"] @ a["d_kappa"], a["d_kappa"] @ a["L"]),
        ("[Lambda,delta_kappa]=0", "twisted Kahler identities", a["Lambda"] @ a["delta_kappa"], a["delta_kappa"] @ a["Lambda"]),
        ("[L,partial_kappa]=0", "twisted Kahler identities", a["L"] @ a["partial_kappa"], a["partial_kappa"] @ a["L"]),
        ("[L,dbar_kappa]=0", "twisted Kahler identities", a["L"] @ a["dbar_kappa"], a["dbar_kappa"] @ a["L"]),
        ("[Lambda,partial_kappa*]=0", "twisted Kahler identities", a["Lambda"] @ a["partial_kappa_star"], a["partial_kappa_star"] @ a["Lambda"]),
        ("[Lambda,dbar_kappa*]=0", "twisted Kahler identities", a["Lambda"] @ a["dbar_kappa_star"], a["dbar_kappa_star"] @ a["Lambda"]),
        ("[L,partial_kappa*]=-i dbar_kappa", "twisted Kahler identities", commutator(a["L"], a["partial_kappa_star"]), -I * a["dbar_kappa"]),
        ("[L,dbar_kappa*]=i partial_kappa", "twisted Kahler identities", commutator(a["L"], a["dbar_kappa_star"]), I * a["partial_kappa"]),
        ("[Lambda,partial_kappa]=-i dbar_kappa*", "twisted Kahler identities", commutator(a["Lambda"], a["partial_kappa"]), -I * a["dbar_kappa_star"]),
        ("[Lambda,dbar_kappa]=i partial_kappa*", "twisted Kahler identities", commutator(a["Lambda"], a["dbar_kappa"]), I * a["partial_kappa_star"]),
        # Laplacians
        ("box_kappa=boxbar_kappa", "twisted Laplacians agree", a["box_kappa"], a["boxbar_kappa"]),
        ("Delta_kappa=2 boxbar_kappa", "twisted Laplacians agree", a["Delta_kappa"], 2 * a["boxbar_kappa"]),
        ("Delta_kappa=2 box_kappa", "twisted Laplacians agree", a["Delta_kappa"], 2 * a["box_kappa"]),
        ("partial_kappa dbar_kappa=-dbar_kappa partial_kappa", "twisted Dolbeault complex", a["partial_kappa"] @ a["dbar_kappa"], -1 * (a["dbar_kappa"] @ a["partial_kappa"])),
        ("dbar_kappa partial_kappa*=-partial_kappa* dbar_kappa", "twisted Laplacians agree", a["dbar_kappa"] @ a["partial_kappa_star"], -1 * (a["partial_kappa_star"] @ a["dbar_kappa"])),
        ("star dbar_kappa=(-1)^(r+s+1) partial_kappa* star", "star conjugates twisted Dolbeault operators", S @ a["dbar_kappa"], a["partial_kappa_star"] @ S @ bideg_sign1),
        ("star dbar_kappa*=(-1)^(r+s) partial_kappa star", "star conjugates twisted Dolbeault operators", S @ a["dbar_kappa_star"], a["partial_kappa"] @ S @ bideg_sign),
        ("star boxbar_kappa=box_kappa star", "star conjugates twisted Dolbeault Laplacians", S @ a["boxbar_kappa"], a["box_kappa"] @ S),
        # the d^c operator
        ("C*=C^-1", "the operator C", a["C_inv"] @ a["C"], a["identity"]),
        ("d_kappa^c=i(dbar_kappa-partial_kappa)", "twisted d^c", a["d_kappa_c"], I * (a["dbar_kappa"] - a["partial_kappa"])),
        ("d_kappa d_kappa^c=-d_kappa^c d_kappa", "twisted d^c", a["d_kappa"] @ a["d_kappa_c"], -1 * (a["d_kappa_c"] @ a["d_kappa"])),
        ("delta_kappa^c=(d_kappa^c)*", "twisted d^c", a["delta_kappa_c"], a["d_kappa_c"].H),
        ("d_kappa^c delta_kappa=-delta_kappa d_kappa^c", "twisted d^c", a["d_kappa_c"] @ a["delta_kappa"], -1 * (a["delta_kappa"] @ a["d_kappa_c"])),
        ("Delta_kappa^c=Delta_kappa", "twisted d^c", a["Delta_kappa_c"], a["Delta_kappa"]),
        ("[L,Delta_kappa]=0", "hard Lefschetz commutation", a["L"] @ a["Delta_kappa"], a["Delta_kappa"] @ a["L"]),
    ]
    # contraction identities for the real frame vectors
    b = a.basis
    J = {}
    for j in range(a.n):
        # J S = T, J T = -S
        J[f"S{j + 1}"] = (b.eps_S(j), b.iota_S(j), b.eps_T(j), b.iota_T(j))
        J[f"T{j + 1}"] = (b.eps_T(j), b.iota_T(j), -b.eps_S(j), -b.iota_S(j))
    L, Lam = a["L"], a["Lambda"]
    for X, (flat, contr, Jflat, Jcontr) in J.items():
        rows += [
            (f"[L,{X}|]=J{X}^", "contraction identities", commutator(L, a.ext(contr)), a.ext(Jflat)),
            (f"[Lambda,{X}^]=-J{X}|", "contraction identities", commutator(Lam, a.ext(flat)), -1 * a.ext(Jcontr)),
            (f"[L,{X}^]=0", "contraction identities", commutator(L, a.ext(flat)), Z),
            (f"[Lambda,{X}|]=0", "contraction identities", commutator(Lam, a.ext(contr)), Z),
        ]
    if is_taut(a.model):
        rows += [
            ("taut: Delta_B=Delta_T", "taut collapse", a["Delta_B"], a["Delta_T"]),
            ("taut: Delta_B=Delta_kappa", "taut collapse", a["Delta_B"], a["Delta_kappa"]),
            ("taut: Delta_B=2 boxbar_B", "taut collapse", a["Delta_B"], 2 * a["boxbar_B"]),
        ]
    return rows


GRADINGS = [
    ("d_kappa", 1), ("delta_kappa", -1), ("d_B", 1), ("d_T", 1), ("Delta_B", 0), ("Delta_T", 0),
]
BIGRADINGS = [
    ("partial_kappa", 1, 0), ("dbar_kappa", 0, 1), ("partial_kappa_star", -1, 0), ("dbar_kappa_star", 0, -1),
    ("Delta_kappa", 0, 0), ("box_kappa", 0, 0), ("boxbar_kappa", 0, 0),
    ("L", 1, 1), ("Lambda", -1, -1),
]


def identity_suite(m: ModelSpec, N: int, tol: float | None = None, asm: Assembler | None = None) -> CheckReport:
    """Run the full identity catalogue on ``m`` at Fourier order ``N``."""
    a = asm or get_assembler(m, N)
    tol = default_tolerance(a) if tol is None else tol
    rep = CheckReport("identities", m.label, N)
    for row in _identity_table(a):
        name, anchor, lhs, rhs = row[:4]
        rep.add(Check(name, anchor, residual(lhs, rhs), tol))
    for name, dr in GRADINGS:
        A = a[name]
        b = a.basis
        ok = (b.degree[:, None] - b.degree[None, :]) == dr
        if A.coupled:
            ok = np.tile(ok, (a.K, a.K))[None]
        leak = float(np.linalg.norm(np.where(ok, 0, A.blocks)) / max(1.0, np.linalg.norm(A.blocks)))
        rep.add(Check(f"grading {name}: degree {dr:+d}", "grading", leak, tol))
    for name, dr, ds in BIGRADINGS:
        rep.add(Check(f"grading {name}: bidegree ({dr:+d},{ds:+d})", "grading",
                      grading_leak(a, a[name], dr, ds), tol))
    for name in sorted(HERMITIAN_NAMES - {"identity"}):
        A = a[name]
        rep.add(Check(f"{name} Hermitian", "self-adjoint Laplacians", residual(A, A.H), tol))
        mev = min_relative_eigenvalue(A)
        rep.add(Check(f"{name} PSD", "non-negative Laplacians", max(0.0, -mev), PSD_TOL,
                      note=f"min relative eigenvalue {mev:.3e}"))
    return rep
