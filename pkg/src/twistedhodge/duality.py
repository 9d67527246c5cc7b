"""Dualities and structure theorems as rank / subspace statements on harmonic spaces.

Maps between harmonic spaces (star, conjugation, powers of L) are composed
with the orthogonal projection onto the target harmonic space before ranks
are counted; the commutation relations that make this legitimate are part
of the identity catalogue.
"""
from __future__ import annotations

import numpy as np

from .harmonic import KERNEL_TOL, check_flavor, cohomology, kernel_basis
from .model import ModelSpec, is_taut
from .operators import Assembler, get_assembler
from .report import Check, CheckReport

SUBSPACE_TOL = 1e-10
MAP_TOL = 1e-8

_LAP = {"B": "Delta_B", "T": "Delta_T", "kappa": "Delta_kappa"}
_BOXBAR = {"B": "boxbar_B", "T": "boxbar_T", "kappa": "boxbar_kappa"}


# ---------------------------------------------------------------------------
# helpers


def harmonic_matrix(a: Assembler, op: str, key, tol: float = KERNEL_TOL) -> np.ndarray:
    """Orthonormal kernel basis as columns of a ``(K E) x dim`` matrix."""
    res = kernel_basis(a[op], a.basis.slot(key), tol=tol)
    if not res.vectors:
        return np.zeros((a.K * a.E, 0), dtype=complex)
    return np.stack([v.reshape(-1) for v in res.vectors], axis=1)


def conjugate_columns(a: Assembler, X: np.ndarray) -> np.ndarray:
    """Complex conjugation of forms stored as flat columns."""
    P = a.basis.conjugation
    out = []
    for j in range(X.shape[1]):
        v = X[:, j].reshape(a.K, a.E)
        out.append((np.conj(v[::-1]) @ P.T).reshape(-1))
    return np.stack(out, axis=1) if out else np.zeros_like(X)


def apply_columns(a: Assembler, name: str, X: np.ndarray, power: int = 1) -> np.ndarray:
    A = a[name]
    out = []
    for j in range(X.shape[1]):
        v = X[:, j].reshape(a.K, a.E)
        for _ in range(power):
            v = A.apply(v)
        out.append(v.reshape(-1))
    return np.stack(out, axis=1) if out else np.zeros_like(X)


def map_rank(image: np.ndarray, target: np.ndarray, tol: float = MAP_TOL) -> tuple[int, float]:
    """Rank of ``image`` projected onto span(``target``) and the size of what leaks out."""
    if image.shape[1] == 0:
        return 0, 0.0
    coords = target.conj().T @ image
    leak = float(np.linalg.norm(image - target @ coords)) / max(1.0, float(np.linalg.norm(image)))
    if coords.size == 0:
        return 0, leak
    s = np.linalg.svd(coords, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s.max()))), leak


def orth(M: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    if M.size == 0 or M.shape[1] == 0:
        return np.zeros((M.shape[0], 0), dtype=complex)
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((M.shape[0], 0), dtype=complex)
    return U[:, s > rtol * s[0]]


def null_space(M: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    n = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(n, dtype=complex)
    _, s, Vh = np.linalg.svd(M, full_matrices=True)
    scale = s[0] if s.size and s[0] > 0 else 1.0
    rank = int(np.sum(s > rtol * scale))
    return Vh[rank:].conj().T


def intersection(U: np.ndarray, W: np.ndarray, rtol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis of span(U) ∩ span(W) for orthonormal U, W."""
    if U.shape[1] == 0 or W.shape[1] == 0:
        return np.zeros((U.shape[0], 0), dtype=complex)
    R = U - W @ (W.conj().T @ U)
    _, s, Vh = np.linalg.svd(R, full_matrices=True)
    s = np.concatenate([s, np.zeros(U.shape[1] - len(s))])
    C = Vh[s <= rtol].conj().T
    return orth(U @ C)


def projector_distance(U: np.ndarray, W: np.ndarray) -> float:
    """Operator-norm distance between orthogonal projectors onto span(U), span(W)."""
    if U.shape[1] == 0 and W.shape[1] == 0:
        return 0.0
    if U.shape[1] != W.shape[1]:
        return 1.0
    D = U @ U.conj().T - W @ W.conj().T
    return float(np.linalg.norm(D, 2))


def _blocks(a: Assembler):
    """Yield ``(block, sub)`` with ``sub(name, rows, cols)`` a dense submatrix on frame slots.

    Mode-diagonal operators give one block per Fourier mode; coupled ones a
    single block spanning all modes.  ``block`` indexes rows of a flat
    ``(K E)`` vector through :func:`_flat`.
    """
    if a.coupled:
        def sub(name, rows, cols):
            op = a[name]
            return op.blocks[0][np.ix_(op.global_index(rows), op.global_index(cols))]
        yield None, sub
        return
    for k in range(a.K):
        yield k, (lambda name, rows, cols, k=k: a[name].blocks[k][np.ix_(rows, cols)])


def _flat(a: Assembler, block, idx) -> np.ndarray:
    idx = np.asarray(idx, dtype=int)
    if block is None:
        return a.zero().global_index(idx)
    return block * a.E + idx


# ---------------------------------------------------------------------------
# checks


def poincare_check(m: ModelSpec, N: int, flavor: str = "kappa", tol: float = KERNEL_TOL) -> CheckReport:
    """``h^r = h^{q-r}`` with star mapping harmonic r-forms onto harmonic (q-r)-forms."""
    flavor = check_flavor(flavor)
    a = get_assembler(m, N)
    q = 2 * a.n
    rep = CheckReport(f"poincare ({flavor})", m.label, N)
    H = {r: harmonic_matrix(a, _LAP[flavor], r, tol) for r in range(q + 1)}
    for r in range(q + 1):
        rank, leak = map_rank(apply_columns(a, "star", H[r]), H[q - r])
        rep.add(Check(f"h^{r} = h^{q - r}", "Poincare duality",
                      observed=H[r].shape[1], expected=H[q - r].shape[1]))
        rep.add(Check(f"star: H^{r} -> H^{q - r} has full rank", "Poincare duality",
                      leak, MAP_TOL, observed=rank, expected=H[r].shape[1]))
    return rep


def twisted_duality_check(m: ModelSpec, N: int, tol: float = KERNEL_TOL) -> CheckReport:
    """``h_B^r = h_T^{q-r}`` through the star operator."""
    a = get_assembler(m, N)
    q = 2 * a.n
    rep = CheckReport("basic/twisted duality", m.label, N)
    for r in range(q + 1):
        HB = harmonic_matrix(a, "Delta_B", r, tol)
        HT = harmonic_matrix(a, "Delta_T", q - r, tol)
        rank, leak = map_rank(apply_columns(a, "star", HB), HT)
        rep.add(Check(f"h_B^{r} = h_T^{q - r}", "basic/twisted duality",
                      observed=HB.shape[1], expected=HT.shape[1]))
        rep.add(Check(f"star: H_B^{r} -> H_T^{q - r} has full rank", "basic/twisted duality",
                      leak, MAP_TOL, observed=rank, expected=HB.shape[1]))
    return rep


def kodaira_serre_check(m: ModelSpec, N: int, flavor: str = "kappa", tol: float = KERNEL_TOL) -> CheckReport:
    """``sharp = star . conj`` maps harmonic (r,s)-forms onto harmonic (n-r,n-s)-forms."""
    flavor = check_flavor(flavor)
    a = get_assembler(m, N)
    n = a.n
    rep = CheckReport(f"kodaira-serre ({flavor})", m.label, N)
    H = {(r, s): harmonic_matrix(a, _BOXBAR[flavor], (r, s), tol) for r in range(n + 1) for s in range(n + 1)}
    for (r, s), X in sorted(H.items()):
        Y = H[(n - r, n - s)]
        img = apply_columns(a, "star", conjugate_columns(a, X))
        rank, leak = map_rank(img, Y)
        rep.add(Check(f"h^{r},{s} = h^{n - r},{n - s}", "Kodaira-Serre duality",
                      observed=X.shape[1], expected=Y.shape[1]))
        rep.add(Check(f"sharp: H^{r},{s} -> H^{n - r},{n - s} has full rank", "Kodaira-Serre duality",
                      leak, MAP_TOL, observed=rank, expected=X.shape[1]))
    return rep


def hodge_sum_check(m: ModelSpec, N: int, tol: float = KERNEL_TOL) -> CheckReport:
    """Graded dims split over bidegrees; conjugation swaps (r,s) and (s,r)."""
    a = get_assembler(m, N)
    n = a.n
    rep = CheckReport("hodge sum", m.label, N)
    table = cohomology(m, N, "kappa", tol)
    for l in range(2 * n + 1):
        parts = [table.bigraded[(r, l - r)] for r in range(n + 1) if 0 <= l - r <= n]
        rep.add(Check(f"h^{l} = sum over r+s={l}", "Hodge decomposition of twisted cohomology",
                      observed=table.graded[l], expected=sum(parts)))
    for r in range(n + 1):
        for s in range(n + 1):
            X = harmonic_matrix(a, "boxbar_kappa", (r, s), tol)
            Y = harmonic_matrix(a, "boxbar_kappa", (s, r), tol)
            rank, leak = map_rank(conjugate_columns(a, X), Y)
            rep.add(Check(f"h^{r},{s} = h^{s},{r}", "Hodge symmetry", observed=X.shape[1], expected=Y.shape[1]))
            rep.add(Check(f"conj: H^{r},{s} -> H^{s},{r} has full rank", "Hodge symmetry",
                          leak, MAP_TOL, observed=rank, expected=X.shape[1]))
    return rep


def tautness_check(m: ModelSpec, N: int, tol: float = KERNEL_TOL) -> CheckReport:
    a = get_assembler(m, N)
    q = 2 * a.n
    rep = CheckReport("tautness", m.label, N)
    table = cohomology(m, N, "kappa", tol)
    taut = is_taut(m)
    rep.add(Check("taut <=> h_kappa^0 != 0", "tautness criterion", observed=table.graded[0] != 0, expected=taut,
                  note=f"taut={taut}, h^0={table.graded[0]}"))
    rep.add(Check(f"taut <=> h_kappa^{q} != 0", "tautness criterion", observed=table.graded[q] != 0, expected=taut,
                  note=f"h^{q}={table.graded[q]}"))
    return rep


def hard_lefschetz_check(m: ModelSpec, N: int, tol: float = KERNEL_TOL) -> CheckReport:
    """Ranks of ``L^s`` between harmonic spaces and the primitive splitting of each ``H^r``."""
    a = get_assembler(m, N)
    n = a.n
    q = 2 * n
    rep = CheckReport("hard lefschetz", m.label, N)
    H = {r: harmonic_matrix(a, "Delta_kappa", r, tol) for r in range(q + 1)}
    for r in range(q + 1):
        for s in range(1, (q - r) // 2 + 1):
            rank, leak = map_rank(apply_columns(a, "L", H[r], power=s), H[r + 2 * s])
            if s <= n - r:
                rep.add(Check(f"L^{s}: H^{r} -> H^{r + 2 * s} injective", "hard Lefschetz",
                              leak, MAP_TOL, observed=rank, expected=H[r].shape[1]))
            if s >= n - r:
                rep.add(Check(f"L^{s}: H^{r} -> H^{r + 2 * s} surjective", "hard Lefschetz",
                              leak, MAP_TOL, observed=rank, expected=H[r + 2 * s].shape[1]))
    # primitive harmonic classes: kernel of Lambda on H^k, k <= n
    prim = {}
    for k in range(n + 1):
        img = apply_columns(a, "Lambda", H[k])
        prim[k] = int(H[k].shape[1] - (np.linalg.matrix_rank(img, tol=1e-8) if img.size else 0))
    for r in range(q + 1):
        total = sum(prim[r - 2 * s] for s in range(max(r - n, 0), r // 2 + 1) if r - 2 * s <= n)
        rep.add(Check(f"H^{r} = sum of L^s primitive classes", "Lefschetz decomposition",
                      observed=H[r].shape[1], expected=total))
    rep.data["primitive_dims"] = prim
    return rep


def primitive_decomposition_check(m: ModelSpec, N: int) -> CheckReport:
    """sl2 bookkeeping for ``L`` and ``Lambda`` on the exterior algebra.

    ``L`` and ``Lambda`` act on frame monomials only, so every Fourier mode
    carries the same decomposition; counts are reported per mode.
    """
    a = get_assembler(m, N)
    b = a.basis
    n = a.n
    L, Lam = b.kahler, b.kahler.conj().T
    rep = CheckReport("primitive decomposition", m.label, N)
    prim = {}
    for r in range(2 * n + 1):
        src, dst = b.slot(r), b.slot(r - 2)
        ker = len(src) - (np.linalg.matrix_rank(Lam[np.ix_(dst, src)]) if len(dst) else 0)
        prim[r] = int(ker)
        if r > n:
            rep.add(Check(f"no primitive {r}-forms (r > n)", "primitive forms", observed=ker, expected=0))
    for r in range(2 * n + 1):
        total = sum(prim[r - 2 * s] for s in range(max(r - n, 0), r // 2 + 1))
        rep.add(Check(f"dim Omega^{r} = sum of dim L^s Omega_P^(r-2s)", "Lefschetz decomposition of forms",
                      observed=len(b.slot(r)), expected=total))
    for r in range(n + 1):
        for s in range(0, 2 * n - r + 1):
            if r + 2 * s > 2 * n:
                continue
            M = np.linalg.matrix_power(L, s)[np.ix_(b.slot(r + 2 * s), b.slot(r))]
            rank = np.linalg.matrix_rank(M)
            if s <= n - r:
                rep.add(Check(f"L^{s} injective on Omega^{r}", "Lefschetz on forms", observed=rank, expected=len(b.slot(r))))
            if s >= n - r:
                rep.add(Check(f"L^{s} onto Omega^{r + 2 * s}", "Lefschetz on forms",
                              observed=rank, expected=len(b.slot(r + 2 * s))))
    rep.data["primitive_dims_per_mode"] = prim
    rep.data["modes"] = a.K
    return rep


def ddc_lemma_check(m: ModelSpec, N: int, tol: float = SUBSPACE_TOL) -> CheckReport:
    """``ker d_kappa ∩ im d_kappa^c = im d_kappa d_kappa^c`` per degree, by projector distance."""
    a = get_assembler(m, N)
    b = a.basis
    rep = CheckReport("ddc lemma", m.label, N)
    for r in range(2 * a.n + 1):
        worst, dims = 0.0, 0
        here, prev, prev2, nxt = b.slot(r), b.slot(r - 1), b.slot(r - 2), b.slot(r + 1)
        for _, sub in _blocks(a):
            ker = null_space(sub("d_kappa", nxt, here)) if len(nxt) else None
            if ker is None:  # top degree: everything is closed
                ker = np.eye(sub("identity", here, here).shape[0], dtype=complex)
            empty = np.zeros((ker.shape[0], 0), complex)
            im_c = orth(sub("d_kappa_c", here, prev)) if len(prev) else empty
            lhs = intersection(orth(ker), im_c)
            if len(prev2):
                ddc = sub("d_kappa", here, prev) @ sub("d_kappa_c", prev, prev2)
                rhs = orth(ddc)
            else:
                rhs = empty
            worst = max(worst, projector_distance(lhs, rhs))
            dims += rhs.shape[1]
        rep.add(Check(f"degree {r}: ker d ∩ im d^c = im d d^c", "ddc lemma", worst, tol,
                      note=f"total dim {dims}"))
    return rep


def holomorphic_harmonic_check(m: ModelSpec, N: int, tol: float = SUBSPACE_TOL,
                               kernel_tol: float = KERNEL_TOL) -> CheckReport:
    """On (r,0)-forms the kernel of the twisted dbar equals the twisted harmonic space."""
    a = get_assembler(m, N)
    b = a.basis
    rep = CheckReport("holomorphic = harmonic", m.label, N)
    for r in range(a.n + 1):
        worst, dims = 0.0, 0
        Hh = harmonic_matrix(a, "Delta_kappa", (r, 0), kernel_tol)
        here, up = b.slot((r, 0)), b.slot((r, 1))
        for block, sub in _blocks(a):
            rows = _flat(a, block, here)
            hol = null_space(sub("dbar_kappa", up, here)) if len(up) else np.eye(len(rows), dtype=complex)
            harm = orth(Hh[rows]) if Hh.shape[1] else np.zeros((len(rows), 0), complex)
            worst = max(worst, projector_distance(orth(hol), harm))
            dims += harm.shape[1]
        rep.add(Check(f"({r},0): ker dbar_kappa = ker Delta_kappa", "holomorphic forms are harmonic",
                      worst, tol, note=f"dim {dims}"))
    return rep


def duality_suite(m: ModelSpec, N: int, tol: float = KERNEL_TOL) -> list[CheckReport]:
    """All positive duality/structure checks (negative controls are separate)."""
    return [
        poincare_check(m, N, "kappa", tol),
        twisted_duality_check(m, N, tol),
        kodaira_serre_check(m, N, "kappa", tol),
        hodge_sum_check(m, N, tol),
        tautness_check(m, N, tol),
        hard_lefschetz_check(m, N, tol),
        primitive_decomposition_check(m, N),
        ddc_lemma_check(m, N),
        holomorphic_harmonic_check(m, N, kernel_tol=tol),
    ]


def negative_controls(m: ModelSpec, N: int, tol: float = KERNEL_TOL) -> list[CheckReport]:
    """Untwisted Poincare and Kodaira-Serre comparisons; expected to fail when non-taut."""
    return [poincare_check(m, N, "B", tol), kodaira_serre_check(m, N, "B", tol)]


def negative_control_report(m: ModelSpec, N: int, tol: float = KERNEL_TOL) -> CheckReport:
    """Passes when the untwisted comparisons break on a non-taut model."""
    rep = CheckReport("negative controls", m.label, N)
    taut = is_taut(m)
    for r in negative_controls(m, N, tol):
        failed = [c.name for c in r.checks if not c.passed]
        if taut:
            rep.add(Check(f"untwisted {r.suite} on a taut model", "untwisted dualities",
                          verdict="n/a", note=f"{len(failed)} failing checks"))
        else:
            rep.add(Check(f"untwisted {r.suite} fails", "untwisted dualities",
                          observed=r.passed, expected=False,
                          note="; ".join(failed[:3])))
    return rep
