"""Harmonic spaces, cohomology tables, Hodge decomposition counts and spectra."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import ModelSpec
from .operators import HERMITIAN_NAMES, Assembler, OperatorMatrix, get_assembler
from .report import Check, CheckReport

KERNEL_TOL = 1e-9
HERMITIAN_TOL = 1e-8
FLAVORS = ("B", "T", "kappa")

_LAPLACIAN = {"B": "Delta_B", "T": "Delta_T", "kappa": "Delta_kappa"}
_DOLBEAULT_LAPLACIAN = {"B": "boxbar_B", "T": "boxbar_T", "kappa": "boxbar_kappa"}
_DIFFERENTIAL = {"B": "d_B", "T": "d_T", "kappa": "d_kappa"}
_DBAR = {"B": "dbar_B", "T": "dbar_T", "kappa": "dbar_kappa"}


class NotHermitianError(ValueError):
    pass


def check_flavor(flavor: str) -> str:
    flavor = {"κ": "kappa", "k": "kappa"}.get(flavor, flavor)
    if flavor not in FLAVORS:
        raise ValueError(f"unknown flavor {flavor!r}; expected one of {FLAVORS}")
    return flavor


def slot_blocks(A: OperatorMatrix, idx) -> tuple[np.ndarray, np.ndarray]:
    """Restrict ``A`` to frame slot ``idx``; returns blocks and their global column map.

    The map has shape ``(B, len)``: entry ``[b, i]`` is the flat index into
    ``(K, E)`` coefficients for column ``i`` of block ``b``.
    """
    idx = np.asarray(idx, dtype=int)
    if A.coupled:
        g = A.global_index(idx)
        return A.blocks[0][np.ix_(g, g)][None], g[None]
    cols = np.arange(A.K)[:, None] * A.E + idx[None, :]
    return A.blocks[:, idx][:, :, idx], cols


def _require_hermitian(A: OperatorMatrix):
    num = np.linalg.norm(A.blocks - np.conj(np.swapaxes(A.blocks, 1, 2)))
    if num > HERMITIAN_TOL * max(1.0, np.linalg.norm(A.blocks)):
        raise NotHermitianError(f"operator {A.name or '?'} is not Hermitian (defect {num:.3e})")


@dataclass
class KernelResult:
    dim: int
    vectors: list            # (K, E) coefficient arrays, orthonormal
    gap: float               # smallest eigenvalue above the kernel threshold
    per_block: np.ndarray    # kernel count per block
    eigenvalues: np.ndarray  # (B, len) sorted per block

    def as_forms(self, m: ModelSpec, N: int):
        from .forms import BasicForm
        return [BasicForm(m, N, v) for v in self.vectors]


def kernel_basis(A: OperatorMatrix, idx=None, tol: float = KERNEL_TOL, vectors: bool = True) -> KernelResult:
    """Kernel of a Hermitian PSD operator on a frame slot.

    An eigenvalue counts as zero when it is below ``tol * max(1, lambda_max)``
    of its block.
    """
    _require_hermitian(A)
    if idx is None:
        idx = np.arange(A.E)
    idx = np.asarray(idx, dtype=int)
    KE = A.K * A.E
    if len(idx) == 0:
        return KernelResult(0, [], math.inf, np.zeros(max(1, A.blocks.shape[0]), int), np.zeros((0, 0)))
    blocks, cols = slot_blocks(A, idx)
    blocks = 0.5 * (blocks + np.conj(np.swapaxes(blocks, 1, 2)))
    w, V = np.linalg.eigh(blocks)
    thresh = tol * np.maximum(1.0, np.abs(w).max(axis=1))
    zero = w < thresh[:, None]
    per_block = zero.sum(axis=1)
    above = np.where(zero, np.inf, w)
    gap = float(above.min()) if above.size else math.inf
    vecs = []
    if vectors:
        for b in np.nonzero(per_block)[0]:
            for i in np.nonzero(zero[b])[0]:
                v = np.zeros(KE, dtype=complex)
                v[cols[b]] = V[b][:, i]
                vecs.append(v.reshape(A.K, A.E))
    return KernelResult(int(per_block.sum()), vecs, gap, per_block, w)


def _mode_label(modes: np.ndarray, b: int) -> str:
    return ",".join(str(int(x)) for x in modes[b])


@dataclass
class CohomologyTable:
    model: str
    N: int
    flavor: str
    tol: float
    graded: list[int]
    bigraded: dict
    per_mode: dict = field(default_factory=dict)
    gap: float = math.inf
    cutoff_mode: int | None = None
    sum_consistent: bool = True

    def h(self, r: int, s: int | None = None) -> int:
        return self.graded[r] if s is None else self.bigraded[(r, s)]

    def to_dict(self) -> dict:
        return {
            "model": self.model, "N": self.N, "flavor": self.flavor, "kernel_tol": self.tol,
            "graded": list(self.graded),
            "bigraded": {f"{r},{s}": d for (r, s), d in sorted(self.bigraded.items())},
            "per_mode": self.per_mode, "gap": self.gap, "cutoff_mode": self.cutoff_mode,
            "sum_consistent": self.sum_consistent,
        }

    def rows(self):
        """Flat ``(r, s, dim)`` rows; graded rows have ``s = None``."""
        out = [(r, None, d) for r, d in enumerate(self.graded)]
        out += [(r, s, d) for (r, s), d in sorted(self.bigraded.items())]
        return out


def _cutoff_mode(a: Assembler, name: str) -> int | None:
    """Largest |k| that can carry kernel: beyond it 4 pi^2 k^2 exceeds the zeroth-order norm + 1."""
    if a.coupled:
        return None
    k0 = np.all(a.modes == 0, axis=1)
    bound = float(np.linalg.norm(a[name].blocks[k0][0], 2)) + 1.0
    return int(math.floor(math.sqrt(bound) / (2 * math.pi)))


def _count(a: Assembler, A: OperatorMatrix, key, tol: float, per_mode: dict, label: str):
    res = kernel_basis(A, a.basis.slot(key), tol=tol, vectors=False)
    if not a.coupled:
        nz = {_mode_label(a.modes, b): int(c) for b, c in enumerate(res.per_block) if c}
        if nz:
            per_mode[label] = nz
    return res


def cohomology(m: ModelSpec, N: int, flavor: str = "kappa", tol: float = KERNEL_TOL) -> CohomologyTable:
    """Graded dims from the Laplacian, bigraded dims from the Dolbeault Laplacian."""
    flavor = check_flavor(flavor)
    a = get_assembler(m, N)
    n = a.n
    per_mode: dict = {}
    gap = math.inf
    graded = []
    D = a[_LAPLACIAN[flavor]]
    for r in range(2 * n + 1):
        res = _count(a, D, r, tol, per_mode, f"{r}")
        graded.append(res.dim)
        gap = min(gap, res.gap)
    bigraded = {}
    Db = a[_DOLBEAULT_LAPLACIAN[flavor]]
    for r in range(n + 1):
        for s in range(n + 1):
            res = _count(a, Db, (r, s), tol, per_mode, f"{r},{s}")
            bigraded[(r, s)] = res.dim
            gap = min(gap, res.gap)
    consistent = all(graded[l] == sum(d for (r, s), d in bigraded.items() if r + s == l)
                     for l in range(2 * n + 1))
    cut = _cutoff_mode(a, _LAPLACIAN[flavor])
    return CohomologyTable(m.label, N, flavor, tol, graded, bigraded, per_mode, gap, cut, consistent)


def _rank(M: np.ndarray, scale: float, tol: float) -> int:
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s * s >= tol * max(1.0, scale)))


def _orth(M: np.ndarray, scale: float, tol: float) -> np.ndarray:
    if M.size == 0:
        return np.zeros((M.shape[0], 0))
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    return U[:, s * s >= tol * max(1.0, scale)]


def hodge_decomposition_check(m: ModelSpec, N: int, key=1, flavor: str = "kappa",
                              tol: float = KERNEL_TOL, orth_tol: float = 1e-10) -> CheckReport:
    """Per block: slot dimension = harmonic + exact + coexact, with mutual orthogonality.

    ``key`` is a degree (graded complex) or ``(r, s)`` (Dolbeault complex).
    """
    flavor = check_flavor(flavor)
    a = get_assembler(m, N)
    b = a.basis
    if isinstance(key, tuple):
        r, s = key
        d, lap = a[_DBAR[flavor]], a[_DOLBEAULT_LAPLACIAN[flavor]]
        prev, nxt = (r, s - 1), (r, s + 1)
        label = f"({r},{s})"
    else:
        d, lap = a[_DIFFERENTIAL[flavor]], a[_LAPLACIAN[flavor]]
        prev, nxt = key - 1, key + 1
        label = f"degree {key}"
    here, src, dst = b.slot(key), b.slot(prev), b.slot(nxt)
    rep = CheckReport("hodge decomposition", m.label, N)
    if a.coupled:
        gh, gs, gd = (a.zero().global_index(i) for i in (here, src, dst))
        dense = lambda A, rows, cols: A.blocks[0][np.ix_(rows, cols)][None]
        rows_here, rows_src, rows_dst = gh, gs, gd
    else:
        dense = lambda A, rows, cols: A.blocks[:, rows][:, :, cols]
        rows_here, rows_src, rows_dst = here, src, dst
    d_in = dense(d, rows_here, rows_src)        # exact part: image of d from prev
    dstar_in = dense(d.H, rows_here, rows_dst)  # coexact part: image of d* from next
    L = dense(lap, rows_here, rows_here)
    mismatch = 0
    worst = 0.0
    for blk in range(L.shape[0]):
        w, V = np.linalg.eigh(0.5 * (L[blk] + L[blk].conj().T))
        scale = max(1.0, float(np.abs(w).max()) if len(w) else 1.0)
        ker = V[:, w < tol * scale]
        Qd = _orth(d_in[blk], scale, tol)
        Qs = _orth(dstar_in[blk], scale, tol)
        if ker.shape[1] + Qd.shape[1] + Qs.shape[1] != L.shape[1]:
            mismatch += 1
        for X, Y in ((ker, Qd), (ker, Qs), (Qd, Qs)):
            if X.size and Y.size:
                worst = max(worst, float(np.linalg.norm(X.conj().T @ Y, 2)))
    rep.add(Check(f"{flavor} {label}: dim = harmonic + exact + coexact", "Hodge decomposition",
                  observed=mismatch, expected=0, note=f"{L.shape[0]} blocks"))
    rep.add(Check(f"{flavor} {label}: summands orthogonal", "Hodge decomposition", worst, orth_tol))
    return rep


def spectrum(m: ModelSpec, N: int, name: str, count: int = 10, key=None) -> list[float]:
    """Lowest ``count`` eigenvalues of a Hermitian operator, optionally on a grading slot."""
    if name not in HERMITIAN_NAMES:
        raise NotHermitianError(f"{name!r} is not a Hermitian operator; choose from {sorted(HERMITIAN_NAMES)}")
    a = get_assembler(m, N)
    A = a[name]
    _require_hermitian(A)
    idx = a.basis.slot(key)
    blocks, _ = slot_blocks(A, idx)
    w = np.linalg.eigvalsh(0.5 * (blocks + np.conj(np.swapaxes(blocks, 1, 2)))).ravel()
    return [float(x) for x in np.sort(w)[:count]]
