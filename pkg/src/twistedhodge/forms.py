"""Basic forms on a model as Fourier coefficient arrays.

A :class:`BasicForm` holds coefficients of shape ``(K, E)`` in the layout of
:class:`~twistedhodge.operators.Assembler`: rows are Fourier multi-indices,
columns are frame monomials of :class:`~twistedhodge.exterior.BidegreeBasis`.
Every generator here is the matrix from the assembler applied to the
coefficients, so the form-level and matrix-level views cannot drift apart.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fourier import FourierScalar
from .model import ModelSpec
from .operators import Assembler, get_assembler

_PARTS = {"full": "", "(1,0)": "10", "(0,1)": "01", (1, 0): "10", (0, 1): "01"}


@dataclass(frozen=True, eq=False)
class BasicForm:
    model: ModelSpec
    N: int
    coeffs: np.ndarray

    def __post_init__(self):
        a = self.assembler
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (a.K, a.E):
            raise ValueError(f"coefficients must have shape {(a.K, a.E)}, got {c.shape}")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # construction ----------------------------------------------------------
    @property
    def assembler(self) -> Assembler:
        return get_assembler(self.model, self.N)

    @classmethod
    def zeros(cls, m: ModelSpec, N: int) -> "BasicForm":
        a = get_assembler(m, N)
        return cls(m, N, np.zeros((a.K, a.E), dtype=complex))

    @classmethod
    def from_components(cls, m: ModelSpec, N: int, comps: dict) -> "BasicForm":
        """``comps`` maps a monomial name (``"1"``, ``"w1"``, ``"w1^wb1"``) or mask to coefficients.

        Coefficients may be a :class:`FourierScalar` (n = 1), or an array of
        length ``K`` in assembler mode order.
        """
        a = get_assembler(m, N)
        b = a.basis
        names = {b.name(mask): mask for mask in range(b.dim)}
        out = np.zeros((a.K, a.E), dtype=complex)
        for key, val in comps.items():
            mask = names[key] if isinstance(key, str) else int(key)
            if isinstance(val, FourierScalar):
                if a.n != 1:
                    raise ValueError("FourierScalar coefficients need a single-factor model")
                val = val.resize(N).coeffs
            out[:, mask] = np.asarray(val, dtype=complex)
        return cls(m, N, out)

    @classmethod
    def constant(cls, m: ModelSpec, N: int, value: complex = 1.0) -> "BasicForm":
        f = cls.zeros(m, N)
        c = np.array(f.coeffs)
        c[np.all(f.assembler.modes == 0, axis=1), 0] = value
        return cls(m, N, c)

    # inspection -------------------------------------------------------------
    def component(self, r: int, s: int) -> np.ndarray:
        """Coefficients of the (r, s) slot, shape ``(K, C(n,r) C(n,s))``."""
        idx = self.assembler.basis.slot((r, s))
        return self.coeffs[:, idx] if len(idx) else np.zeros((self.coeffs.shape[0], 0), complex)

    def fourier_scalar(self, mask: int) -> FourierScalar:
        if self.model.n != 1:
            raise ValueError("coefficient functions are multivariate on products")
        return FourierScalar(self.N, self.coeffs[:, mask])

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def inner(self, other: "BasicForm") -> complex:
        """Global L^2 pairing (Parseval over modes, unit frame pointwise)."""
        return complex(np.vdot(other.coeffs, self.coeffs))

    def _new(self, c) -> "BasicForm":
        return BasicForm(self.model, self.N, c)

    def __add__(self, other):
        return self._new(self.coeffs + other.coeffs)

    def __sub__(self, other):
        return self._new(self.coeffs - other.coeffs)

    def __mul__(self, a):
        return self._new(a * self.coeffs)

    __rmul__ = __mul__

    def allclose(self, other: "BasicForm", atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.coeffs, other.coeffs, atol=atol, rtol=0))

    def apply(self, name: str) -> "BasicForm":
        """Apply an assembled operator by name."""
        return self._new(self.assembler[name].apply(self.coeffs))


def d_B(phi: BasicForm) -> BasicForm:
    return phi.apply("d_B")


def wedge_kappa(phi: BasicForm, part="full") -> BasicForm:
    return phi.apply(f"kappa{_PARTS[part]}_wedge")


def contract_H(phi: BasicForm, part="full") -> BasicForm:
    p = _PARTS[part]
    return phi.apply(f"H{p}_contract" if p else "kappa_contract")


def bar_star(phi: BasicForm) -> BasicForm:
    return phi.apply("star")


def bidegree_project(phi: BasicForm, r: int, s: int) -> BasicForm:
    out = np.zeros_like(phi.coeffs)
    idx = phi.assembler.basis.slot((r, s))
    if len(idx):
        out[:, idx] = phi.coeffs[:, idx]
    return phi._new(out)


def lefschetz(phi: BasicForm) -> BasicForm:
    return phi.apply("L")


def contract_omega(phi: BasicForm) -> BasicForm:
    return phi.apply("Lambda")


def covariant_derivative(phi: BasicForm, factor: int, direction: str) -> BasicForm:
    a = phi.assembler
    if not 0 <= factor < a.n:
        raise ValueError(f"factor {factor} out of range for n = {a.n}")
    ops = {"S": a.nabla_S, "T": a.nabla_T, "V": a.nabla_V, "Vbar": a.nabla_Vb}
    if direction not in ops:
        raise ValueError(f"direction must be one of {sorted(ops)}")
    return phi._new(ops[direction](factor).apply(phi.coeffs))


def conjugate(phi: BasicForm) -> BasicForm:
    """Complex conjugate form: mode ``k -> -k``, coefficients conjugated, ``w <-> wbar``."""
    P = phi.assembler.basis.conjugation
    return phi._new(np.conj(phi.coeffs[::-1]) @ P.T)


def sharp(phi: BasicForm) -> BasicForm:
    """The conjugate-linear star ``phi -> star(conj(phi))``."""
    return bar_star(conjugate(phi))
