"""Matrix realisations of the basic operators on a model.

A global basic form is stored as coefficients ``(K, E)``: ``K`` Fourier
multi-indices (lexicographic over ``{-N..N}^n``) times ``E = 4^n`` frame
monomials.  An :class:`OperatorMatrix` is either

* mode-diagonal: ``blocks[k]`` is the ``E x E`` matrix acting at mode ``k``
  (every model with constant mean curvature), or
* coupled: a single ``(K E) x (K E)`` matrix, mode-major.

Every operator is built from four ingredients: ``d/dt_j``, multiplication by
``h_j'`` (a Hermitian Toeplitz matrix), frame wedges/contractions, and the
frame rotation of the Levi-Civita connection.  Multiplication is a Galerkin
truncation, so compositions that pass through more than one multiplication
are only exact on modes far enough from the cutoff; coupled residuals are
therefore measured on the interior columns ``|k_j| <= N - margin``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .exterior import SQRT2, BidegreeBasis, basis
from .fourier import FourierScalar, derivative_matrix, multiplication_matrix
from .model import ModelSpec, bandwidth, geometry, is_mode_diagonal

# number of truncated multiplications an identity may chain
INTERIOR_DEPTH = 6


@dataclass
class OperatorMatrix:
    blocks: np.ndarray          # (B, m, n)
    E: int                      # frame monomials per mode
    K: int                      # number of Fourier modes
    coupled: bool
    name: str = ""
    interior: np.ndarray | None = field(default=None, repr=False)  # bool (K,) for coupled

    @property
    def shape(self):
        return self.blocks.shape

    def __matmul__(self, other):
        return compose(self, other)

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, other, (1.0, -1.0))

    def __neg__(self):
        return self.scaled(-1.0)

    def __mul__(self, a):
        return self.scaled(a)

    __rmul__ = __mul__

    def scaled(self, a) -> "OperatorMatrix":
        return self._like(a * self.blocks)

    @property
    def H(self) -> "OperatorMatrix":
        return adjoint(self)

    def _like(self, blocks, name="") -> "OperatorMatrix":
        return OperatorMatrix(blocks, self.E, self.K, self.coupled, name, self.interior)

    def global_index(self, ext_idx) -> np.ndarray:
        """Indices into the coupled matrix for given frame monomials, all modes."""
        ext_idx = np.asarray(ext_idx, dtype=int)
        return (np.arange(self.K)[:, None] * self.E + ext_idx[None, :]).ravel()

    def to_dense(self) -> np.ndarray:
        """Full ``(K E) x (K E)`` matrix (mode-diagonal ops are expanded)."""
        if self.coupled:
            return self.blocks[0]
        from scipy.linalg import block_diag
        return block_diag(*self.blocks)

    def apply(self, coeffs: np.ndarray) -> np.ndarray:
        """Act on form coefficients of shape ``(K, E)``."""
        if self.coupled:
            return (self.blocks[0] @ coeffs.reshape(-1)).reshape(self.K, self.E)
        return np.einsum("kij,kj->ki", self.blocks, coeffs)


def _check_compat(A: OperatorMatrix, B: OperatorMatrix):
    if A.coupled != B.coupled or A.K != B.K or A.E != B.E:
        raise ValueError("operators live on different discretisations")


def adjoint(A: OperatorMatrix) -> OperatorMatrix:
    return A._like(np.conj(np.swapaxes(A.blocks, -1, -2)), name=f"({A.name})*")


def compose(A: OperatorMatrix, B: OperatorMatrix) -> OperatorMatrix:
    _check_compat(A, B)
    if A.blocks.shape[-1] != B.blocks.shape[-2]:
        raise ValueError(f"shape mismatch {A.blocks.shape} @ {B.blocks.shape}")
    return A._like(A.blocks @ B.blocks)


def add(A: OperatorMatrix, B: OperatorMatrix, weights=(1.0, 1.0)) -> OperatorMatrix:
    _check_compat(A, B)
    if A.blocks.shape != B.blocks.shape:
        raise ValueError(f"shape mismatch {A.blocks.shape} + {B.blocks.shape}")
    return A._like(weights[0] * A.blocks + weights[1] * B.blocks)


def commutator(A: OperatorMatrix, B: OperatorMatrix) -> OperatorMatrix:
    return compose(A, B) - compose(B, A)


def anticommutator(A: OperatorMatrix, B: OperatorMatrix) -> OperatorMatrix:
    return compose(A, B) + compose(B, A)


def residual(A: OperatorMatrix, B: OperatorMatrix, cols=None) -> float:
    """Max over blocks of ``|A - B|_F / max(1, |A|_F)``.

    ``cols`` optionally restricts to a grading slot (frame monomial indices).
    For coupled operators only interior columns are compared.
    """
    _check_compat(A, B)
    if A.blocks.shape != B.blocks.shape:
        raise ValueError("shape mismatch")
    a, b = A.blocks, B.blocks
    if A.coupled:
        ext = np.arange(A.E) if cols is None else np.asarray(cols, dtype=int)
        idx = A.global_index(ext)
        if A.interior is not None:
            keep = np.repeat(A.interior, len(ext))
            idx = idx[keep]
        a, b = a[:, :, idx], b[:, :, idx]
    elif cols is not None:
        a, b = a[:, :, cols], b[:, :, cols]
    num = np.linalg.norm(a - b, axis=(1, 2))
    den = np.maximum(1.0, np.linalg.norm(a, axis=(1, 2)))
    return float(np.max(num / den)) if len(num) else 0.0


def restrict(A: OperatorMatrix, rows=None, cols=None) -> np.ndarray:
    """Blocks restricted to frame-monomial slots, as an array ``(B, m, n)``."""
    rows = np.arange(A.E) if rows is None else np.asarray(rows, dtype=int)
    cols = np.arange(A.E) if cols is None else np.asarray(cols, dtype=int)
    if A.coupled:
        return A.blocks[:, A.global_index(rows)][:, :, A.global_index(cols)]
    return A.blocks[:, rows][:, :, cols]


# ----------------------------------------------------------------------------
# assembly

OPERATOR_NAMES = (
    "d_B", "d_T", "d_kappa", "delta_B", "delta_T", "delta_kappa",
    "partial_B", "dbar_B", "partial_T", "dbar_T", "partial_kappa", "dbar_kappa",
    "partial_B_star", "dbar_B_star", "partial_T_star", "dbar_T_star",
    "partial_kappa_star", "dbar_kappa_star",
    "Delta_B", "Delta_T", "Delta_kappa", "box_B", "boxbar_B", "box_T", "boxbar_T",
    "box_kappa", "boxbar_kappa",
    "L", "Lambda", "star", "C", "C_inv", "d_kappa_c", "delta_kappa_c", "Delta_kappa_c",
    "kappa_wedge", "kappa_contract", "kappa10_wedge", "kappa01_wedge",
    "H10_contract", "H01_contract", "identity",
)

HERMITIAN_NAMES = {
    "Delta_B", "Delta_T", "Delta_kappa", "box_B", "boxbar_B", "box_T", "boxbar_T",
    "box_kappa", "boxbar_kappa", "Delta_kappa_c", "identity",
}


class Assembler:
    """Builds and caches operator matrices for one model at Fourier order N."""

    def __init__(self, model: ModelSpec, N: int, coupled: bool | None = None):
        if N < 1:
            raise ValueError("N must be >= 1")
        self.model = model
        self.N = N
        self.n = model.n
        self.basis: BidegreeBasis = basis(self.n)
        self.E = self.basis.dim
        self.geom = geometry(model)
        self.coupled = (not is_mode_diagonal(model)) if coupled is None else coupled
        self.bandwidth = bandwidth(model)
        self.modes = np.array(list(itertools.product(range(-N, N + 1), repeat=self.n)), dtype=int)
        self.K = len(self.modes)
        self._cache: dict[str, OperatorMatrix] = {}
        margin = INTERIOR_DEPTH * self.bandwidth
        self.interior = np.all(np.abs(self.modes) <= N - margin, axis=1) if self.coupled else None
        if self.coupled and not self.interior.any():
            # too small to have a truncation-free interior; compare at k = 0 only
            self.interior = np.all(self.modes == 0, axis=1)

    # mode-space pieces ------------------------------------------------------
    # mode-diagonal: a vector of length K; coupled: a K x K matrix
    def _kron_factor(self, j: int, M1: np.ndarray) -> np.ndarray:
        size = 2 * self.N + 1
        out = np.ones((1, 1))
        for i in range(self.n):
            out = np.kron(out, M1 if i == j else np.eye(size))
        return out

    def mode_identity(self):
        return np.ones(self.K) if not self.coupled else np.eye(self.K)

    def mode_deriv(self, j: int):
        if not self.coupled:
            return 2j * np.pi * self.modes[:, j]
        return self._kron_factor(j, derivative_matrix(self.N))

    def mode_mult(self, j: int, f: FourierScalar):
        if not self.coupled:
            if f.bandwidth:
                raise ValueError("non-constant coefficient in a mode-diagonal assembly")
            return np.full(self.K, f.mean, dtype=complex)
        return self._kron_factor(j, multiplication_matrix(f, self.N))

    def h(self, j: int):
        return self.mode_mult(j, self.geom.factors[j].h_prime)

    def mm(self, a, b):
        """Compose two mode operators."""
        return a * b if not self.coupled else a @ b

    def term(self, mode_op, ext: np.ndarray, name: str = "") -> OperatorMatrix:
        if not self.coupled:
            blocks = mode_op[:, None, None] * ext[None, :, :]
        else:
            blocks = np.kron(mode_op, ext)[None]
        return OperatorMatrix(blocks, self.E, self.K, self.coupled, name, self.interior)

    def ext(self, M: np.ndarray, name: str = "") -> OperatorMatrix:
        return self.term(self.mode_identity(), M, name)

    def zero(self) -> OperatorMatrix:
        return self.ext(np.zeros((self.E, self.E)), "0")

    # connection -------------------------------------------------------------
    def nabla_S(self, j: int) -> OperatorMatrix:
        """nabla along S_j: coefficients are s-independent, frame rotates by h'."""
        return self.term(self.h(j), self.basis.rotation(j), f"nabla_S{j}")

    def nabla_T(self, j: int) -> OperatorMatrix:
        return self.term(self.mode_deriv(j), self.basis.identity, f"nabla_T{j}")

    def nabla_V(self, j: int) -> OperatorMatrix:
        return (self.nabla_S(j) - 1j * self.nabla_T(j)) * (1 / SQRT2)

    def nabla_Vb(self, j: int) -> OperatorMatrix:
        return (self.nabla_S(j) + 1j * self.nabla_T(j)) * (1 / SQRT2)

    def nabla_along(self, j: int, a_S, a_T) -> OperatorMatrix:
        """nabla_X for X = a_S S_j + a_T T_j with mode-operator coefficients."""
        b = self.basis
        return (self.term(self.mm(a_S, self.h(j)), b.rotation(j))
                + self.term(self.mm(a_T, self.mode_deriv(j)), b.identity))

    def curvature_ST(self, j: int) -> OperatorMatrix:
        """R(S_j, T_j) = [nabla_S, nabla_T] - nabla_[S,T], with [S,T] = h' S."""
        br = self.nabla_along(j, self.h(j), 0 * self.h(j))
        return commutator(self.nabla_S(j), self.nabla_T(j)) - br

    # the catalogue -------------------------------------------------------------
    def __getitem__(self, name: str) -> OperatorMatrix:
        return self.get(name)

    def get(self, name: str) -> OperatorMatrix:
        if name not in self._cache:
            builder = getattr(self, "_build_" + name, None)
            if builder is None:
                raise KeyError(f"unknown operator {name!r}")
            op = builder()
            op.name = name
            self._cache[name] = op
        return self._cache[name]

    def clear(self):
        self._cache.clear()

    def _sum(self, ops) -> OperatorMatrix:
        out = self.zero()
        for op in ops:
            out = out + op
        return out

    def _bidegree_part(self, A: OperatorMatrix, dr: int, ds: int) -> OperatorMatrix:
        b = self.basis
        mask = ((b.r[:, None] - b.r[None, :]) == dr) & ((b.s[:, None] - b.s[None, :]) == ds)
        if not A.coupled:
            return A._like(A.blocks * mask[None])
        big = np.tile(mask, (self.K, self.K))
        return A._like(A.blocks * big[None])

    def _build_identity(self):
        return self.ext(self.basis.identity)

    def _build_d_B(self):
        b = self.basis
        terms = []
        for j in range(self.n):
            terms.append(self.term(self.mode_deriv(j), b.eps_T(j)))
            # d S* = h' T* ^ S*
            terms.append(self.term(self.h(j), b.eps_T(j) @ b.eps_S(j) @ b.iota_S(j)))
        return self._sum(terms)

    def _build_kappa_wedge(self):
        return self._sum(self.term(self.h(j), self.basis.eps_T(j)) for j in range(self.n))

    def _build_kappa_contract(self):
        return self._sum(self.term(self.h(j), self.basis.iota_T(j)) for j in range(self.n))

    def _build_kappa10_wedge(self):
        # kappa^{1,0} = 1/2 (kappa + i J kappa) = -(i/sqrt2) h' w
        return self._sum(self.term(self.h(j), -1j / SQRT2 * self.basis.eps_w(j)) for j in range(self.n))

    def _build_kappa01_wedge(self):
        return self._sum(self.term(self.h(j), 1j / SQRT2 * self.basis.eps_wb(j)) for j in range(self.n))

    def _build_H10_contract(self):
        # H^{1,0} = 1/2 (kappa# - i J kappa#) = (i/sqrt2) h' V
        return self._sum(self.term(self.h(j), 1j / SQRT2 * self.basis.iota_V(j)) for j in range(self.n))

    def _build_H01_contract(self):
        return self._sum(self.term(self.h(j), -1j / SQRT2 * self.basis.iota_Vb(j)) for j in range(self.n))

    def _build_d_T(self):
        return self["d_B"] - self["kappa_wedge"]

    def _build_d_kappa(self):
        return self["d_B"] - 0.5 * self["kappa_wedge"]

    def _build_delta_B(self):
        return adjoint(self["d_B"])

    def _build_delta_T(self):
        return adjoint(self["d_T"])

    def _build_delta_kappa(self):
        return adjoint(self["d_kappa"])

    def _build_partial_B(self):
        return self._bidegree_part(self["d_B"], 1, 0)

    def _build_dbar_B(self):
        return self._bidegree_part(self["d_B"], 0, 1)

    def _build_partial_T(self):
        return self["partial_B"] - self["kappa10_wedge"]

    def _build_dbar_T(self):
        return self["dbar_B"] - self["kappa01_wedge"]

    def _build_partial_kappa(self):
        return self["partial_B"] - 0.5 * self["kappa10_wedge"]

    def _build_dbar_kappa(self):
        return self["dbar_B"] - 0.5 * self["kappa01_wedge"]

    def _build_partial_B_star(self):
        return adjoint(self["partial_B"])

    def _build_dbar_B_star(self):
        return adjoint(self["dbar_B"])

    def _build_partial_T_star(self):
        return adjoint(self["partial_T"])

    def _build_dbar_T_star(self):
        return adjoint(self["dbar_T"])

    def _build_partial_kappa_star(self):
        return adjoint(self["partial_kappa"])

    def _build_dbar_kappa_star(self):
        return adjoint(self["dbar_kappa"])

    def _laplacian(self, d: str, dstar: str) -> OperatorMatrix:
        return anticommutator(self[d], self[dstar])

    def _build_Delta_B(self):
        return self._laplacian("d_B", "delta_B")

    def _build_Delta_T(self):
        return self._laplacian("d_T", "delta_T")

    def _build_Delta_kappa(self):
        return self._laplacian("d_kappa", "delta_kappa")

    def _build_box_B(self):
        return self._laplacian("partial_B", "partial_B_star")

    def _build_boxbar_B(self):
        return self._laplacian("dbar_B", "dbar_B_star")

    def _build_box_T(self):
        return self._laplacian("partial_T", "partial_T_star")

    def _build_boxbar_T(self):
        return self._laplacian("dbar_T", "dbar_T_star")

    def _build_box_kappa(self):
        return self._laplacian("partial_kappa", "partial_kappa_star")

    def _build_boxbar_kappa(self):
        return self._laplacian("dbar_kappa", "dbar_kappa_star")

    def _build_L(self):
        return self.ext(self.basis.kahler)

    def _build_Lambda(self):
        return adjoint(self["L"])

    def _build_star(self):
        return self.ext(self.basis.star)

    def _build_C(self):
        return self.ext(self.basis.c_operator)

    def _build_C_inv(self):
        return adjoint(self["C"])

    def _build_d_kappa_c(self):
        return self["C_inv"] @ self["d_kappa"] @ self["C"]

    def _build_delta_kappa_c(self):
        return self["C_inv"] @ self["delta_kappa"] @ self["C"]

    def _build_Delta_kappa_c(self):
        return self._laplacian("d_kappa_c", "delta_kappa_c")

    def projector(self, key) -> OperatorMatrix:
        return self.ext(self.basis.projector(key))

    def sign_by_degree(self, f) -> OperatorMatrix:
        """Diagonal operator multiplying the degree-r slot by ``f(r)``."""
        return self.ext(np.diag([f(int(r)) for r in self.basis.degree]).astype(complex))

    def sign_by_bidegree(self, f) -> OperatorMatrix:
        b = self.basis
        return self.ext(np.diag([f(int(r), int(s)) for r, s in zip(b.r, b.s)]).astype(complex))

    # formula realisations, kept independent of the adjoint route -------------
    def delta_T_coordinate(self) -> OperatorMatrix:
        """-sum_a E_a _| nabla_{E_a}."""
        b = self.basis
        return -self._sum(self.ext(b.iota_S(j)) @ self.nabla_S(j) + self.ext(b.iota_T(j)) @ self.nabla_T(j)
                          for j in range(self.n))

    def partial_T_star_coordinate(self) -> OperatorMatrix:
        """-sum_a V_a _| nabla_{Vbar_a}."""
        return -self._sum(self.ext(self.basis.iota_V(j)) @ self.nabla_Vb(j) for j in range(self.n))

    def dbar_T_star_coordinate(self) -> OperatorMatrix:
        return -self._sum(self.ext(self.basis.iota_Vb(j)) @ self.nabla_V(j) for j in range(self.n))


_ASSEMBLERS: dict = {}
_ASSEMBLER_SLOTS = 4


def get_assembler(m: ModelSpec, N: int) -> Assembler:
    """Shared assembler per (model, N); a few are kept alive to reuse caches."""
    key = (m.key, N)
    asm = _ASSEMBLERS.pop(key, None)
    if asm is None:
        asm = Assembler(m, N)
    _ASSEMBLERS[key] = asm
    while len(_ASSEMBLERS) > _ASSEMBLER_SLOTS:
        _ASSEMBLERS.pop(next(iter(_ASSEMBLERS)))
    return asm


def assemble(m: ModelSpec, N: int, name: str) -> OperatorMatrix:
    return get_assembler(m, N)[name]


def mode_blocks_closed_form_n1(c: float, k: np.ndarray) -> dict[str, np.ndarray]:
    """Closed-form mode-k blocks on the n = 1 complex in (S*, T*) coordinates.

    Independent of the assembly path: derived by hand from
    ``d f = f' T*``, ``d(a S* + b T*) = (a' + c a) T* ^ S*``, ``kappa = c T*``.
    Returns blocks indexed ``[mode, row, col]``.
    """
    ik = 2j * np.pi * np.asarray(k, dtype=float)
    z = np.zeros_like(ik)
    d0 = np.stack([z, ik - c / 2], axis=-1)[:, :, None]            # 0-forms -> (S*, T*)
    # d_kappa(a S* + b T*) = (a' + c a - c a / 2) T*^S*
    d1 = np.stack([ik + c / 2, z], axis=-1)[:, None, :]
    out = {"d_kappa_0": d0, "d_kappa_1": d1}
    out["delta_kappa_1"] = np.conj(np.swapaxes(d0, 1, 2))
    out["delta_kappa_2"] = np.conj(np.swapaxes(d1, 1, 2))
    out["Delta_kappa_0"] = (4 * np.pi ** 2 * np.asarray(k, float) ** 2 + c * c / 4)[:, None, None]
    out["Delta_B_0"] = (4 * np.pi ** 2 * np.asarray(k, float) ** 2)[:, None, None]
    return out


def frame_change_n1() -> np.ndarray:
    """Columns: S*, T* expressed in the (w, wbar) basis of the n = 1 algebra."""
    b = basis(1)
    one = np.zeros(4, dtype=complex)
    one[0] = 1
    return np.stack([b.eps_S(0) @ one, b.eps_T(0) @ one], axis=1)


def volume_TS_n1() -> np.ndarray:
    b = basis(1)
    one = np.zeros(4, dtype=complex)
    one[0] = 1
    return b.eps_T(0) @ b.eps_S(0) @ one
