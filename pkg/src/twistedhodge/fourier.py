"""Truncated Fourier arithmetic for 1-periodic coefficient functions.

A :class:`FourierScalar` of order ``N`` stores ``c_{-N}, ..., c_N`` for
``f(t) = sum_k c_k exp(2 pi i k t)``.  Index ``k`` lives at array position
``k + N``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import toeplitz

TWO_PI = 2.0 * np.pi
REAL_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class FourierScalar:
    order: int
    coeffs: np.ndarray
    real_flag: bool = field(default=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).copy()
        if self.order < 0:
            raise ValueError("order must be nonnegative")
        if c.shape != (2 * self.order + 1,):
            raise ValueError(f"expected {2 * self.order + 1} coefficients, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        if self.real_flag and not _is_hermitian(c):
            raise ValueError("real_flag set but c_{-k} != conj(c_k)")

    # construction helpers
    @classmethod
    def zeros(cls, order: int) -> "FourierScalar":
        return cls(order, np.zeros(2 * order + 1), True)

    @classmethod
    def constant(cls, value, order: int = 0) -> "FourierScalar":
        c = np.zeros(2 * order + 1, dtype=complex)
        c[order] = value
        return cls(order, c, bool(np.isreal(value)))

    @classmethod
    def from_modes(cls, modes: dict, order: int | None = None) -> "FourierScalar":
        """Build from ``{k: c_k}``; the result is flagged real when it is."""
        if order is None:
            order = max((abs(k) for k in modes), default=0)
        c = np.zeros(2 * order + 1, dtype=complex)
        for k, v in modes.items():
            if abs(k) <= order:
                c[k + order] += v
        return cls(order, c, _is_hermitian(c))

    @classmethod
    def cos(cls, k: int, amplitude: float = 1.0) -> "FourierScalar":
        return cls.from_modes({k: amplitude / 2, -k: amplitude / 2})

    @classmethod
    def sin(cls, k: int, amplitude: float = 1.0) -> "FourierScalar":
        return cls.from_modes({k: amplitude / 2j, -k: -amplitude / 2j})

    @classmethod
    def from_samples(cls, values, order: int) -> "FourierScalar":
        """Least-aliasing transform of equispaced samples on [0, 1)."""
        values = np.asarray(values)
        m = len(values)
        if m < 2 * order + 1:
            raise ValueError("need at least 2N+1 samples")
        fft = np.fft.fft(values) / m
        k = np.arange(-order, order + 1)
        c = fft[k % m]
        return cls(order, c, bool(np.isrealobj(values)) or _is_hermitian(c))

    # basic accessors
    def __getitem__(self, k: int) -> complex:
        if abs(k) > self.order:
            return 0j
        return complex(self.coeffs[k + self.order])

    @property
    def mean(self) -> complex:
        return self[0]

    @property
    def bandwidth(self) -> int:
        """Largest |k| with a nonzero coefficient (0 for constants and zero)."""
        nz = np.nonzero(np.abs(self.coeffs) > 0)[0]
        if len(nz) == 0:
            return 0
        return int(np.max(np.abs(nz - self.order)))

    def resize(self, order: int) -> "FourierScalar":
        """Pad with zeros or truncate to ``order``."""
        c = np.zeros(2 * order + 1, dtype=complex)
        m = min(order, self.order)
        c[order - m:order + m + 1] = self.coeffs[self.order - m:self.order + m + 1]
        return FourierScalar(order, c, self.real_flag or _is_hermitian(c))

    def __add__(self, other):
        if not isinstance(other, FourierScalar):
            other = FourierScalar.constant(other)
        n = max(self.order, other.order)
        c = self.resize(n).coeffs + other.resize(n).coeffs
        return FourierScalar(n, c, self.real_flag and other.real_flag)

    __radd__ = __add__

    def __neg__(self):
        return FourierScalar(self.order, -self.coeffs, self.real_flag)

    def __sub__(self, other):
        return self + (-other if isinstance(other, FourierScalar) else -other)

    def scale(self, a) -> "FourierScalar":
        return FourierScalar(self.order, a * self.coeffs, self.real_flag and np.isreal(a))

    def conj(self) -> "FourierScalar":
        return FourierScalar(self.order, np.conj(self.coeffs[::-1]), self.real_flag)

    def shift(self, theta: float) -> "FourierScalar":
        """Return ``t -> f(t + theta)``."""
        k = np.arange(-self.order, self.order + 1)
        return FourierScalar(self.order, self.coeffs * np.exp(1j * TWO_PI * k * theta), self.real_flag)

    def allclose(self, other: "FourierScalar", atol: float = 1e-12) -> bool:
        n = max(self.order, other.order)
        return np.allclose(self.resize(n).coeffs, other.resize(n).coeffs, rtol=0, atol=atol)

    def samples(self, m: int) -> np.ndarray:
        """Values at ``t_j = j/m``, j = 0..m-1."""
        return evaluate(self, np.arange(m) / m)

    def __repr__(self):
        return f"FourierScalar(order={self.order}, bandwidth={self.bandwidth}, real={self.real_flag})"


def _is_hermitian(c: np.ndarray) -> bool:
    return bool(np.allclose(c[::-1], np.conj(c), rtol=0, atol=REAL_TOL))


def multiply(f: FourierScalar, g: FourierScalar, out_order: int) -> FourierScalar:
    """Truncated product; modes with |k| > out_order are dropped."""
    if out_order < 0:
        raise ValueError("out_order must be nonnegative")
    full = np.convolve(f.coeffs, g.coeffs)  # index k + f.order + g.order
    center = f.order + g.order
    c = np.zeros(2 * out_order + 1, dtype=complex)
    m = min(out_order, center)
    c[out_order - m:out_order + m + 1] = full[center - m:center + m + 1]
    return FourierScalar(out_order, c, f.real_flag and g.real_flag)


def differentiate(f: FourierScalar) -> FourierScalar:
    k = np.arange(-f.order, f.order + 1)
    return FourierScalar(f.order, 1j * TWO_PI * k * f.coeffs, f.real_flag)


def l2_inner(f: FourierScalar, g: FourierScalar) -> complex:
    """Parseval pairing on [0, 1], linear in ``f`` and antilinear in ``g``."""
    n = max(f.order, g.order)
    return complex(np.vdot(g.resize(n).coeffs, f.resize(n).coeffs))


def evaluate(f: FourierScalar, t):
    t = np.asarray(t, dtype=float)
    k = np.arange(-f.order, f.order + 1)
    out = np.exp(1j * TWO_PI * np.multiply.outer(t, k)) @ f.coeffs
    return complex(out) if out.ndim == 0 else out


def multiplication_matrix(f: FourierScalar, order: int) -> np.ndarray:
    """Galerkin matrix of ``u -> P_N(f u)`` on modes -order..order.

    Entry ``[k, l]`` is ``f_{k-l}``.  Hermitian when ``f`` is real.
    """
    col = np.array([f[d] for d in range(0, 2 * order + 1)])
    row = np.array([f[-d] for d in range(0, 2 * order + 1)])
    return toeplitz(col, row)


def derivative_matrix(order: int) -> np.ndarray:
    return np.diag(1j * TWO_PI * np.arange(-order, order + 1))
