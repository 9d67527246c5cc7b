"""Pointwise exterior algebra of the transverse space in the unit complex frame.

Generators are ordered ``w^1..w^n, wbar^1..wbar^n`` with
``w^a = (theta^a + i J theta^a)/sqrt(2)``; per factor ``theta = S*`` and
``J theta = T*``.  A monomial is a bitmask over the 2n generators, written
as the wedge of its generators in increasing order.  The frame is
orthonormal, so Hermitian adjoints of all operators below are plain
conjugate transposes.
"""
from __future__ import annotations

import math
from functools import cached_property, lru_cache
from itertools import combinations

import numpy as np

SQRT2 = math.sqrt(2.0)


def popcount(x: int) -> int:
    return bin(x).count("1")


class BidegreeBasis:
    """Monomial basis of the complexified transverse exterior algebra."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.n = n
        self.ngen = 2 * n
        self.dim = 1 << self.ngen
        low = (1 << n) - 1
        self.r = np.array([popcount(m & low) for m in range(self.dim)])
        self.s = np.array([popcount(m >> n) for m in range(self.dim)])
        self.degree = self.r + self.s

    def monomials(self, r: int, s: int) -> list[int]:
        """Masks of ``w^A ^ wbar^B`` with |A| = r, |B| = s, in a fixed order."""
        if not (0 <= r <= self.n and 0 <= s <= self.n):
            return []
        out = []
        for A in combinations(range(self.n), r):
            for B in combinations(range(self.n), s):
                out.append(sum(1 << a for a in A) + sum(1 << (self.n + b) for b in B))
        return out

    def slot(self, key) -> np.ndarray:
        """Indices of a grading slot: ``None`` (all), a degree, or ``(r, s)``."""
        if key is None:
            return np.arange(self.dim)
        if isinstance(key, tuple):
            r, s = key
            return np.array(self.monomials(r, s), dtype=int)
        return np.nonzero(self.degree == key)[0]

    def name(self, mask: int) -> str:
        parts = [f"w{a + 1}" for a in range(self.n) if mask >> a & 1]
        parts += [f"wb{a + 1}" for a in range(self.n) if mask >> (self.n + a) & 1]
        return "^".join(parts) or "1"

    # generator operators -------------------------------------------------
    def creation(self, g: int) -> np.ndarray:
        """Left wedge by generator ``g`` (0..2n-1)."""
        E = np.zeros((self.dim, self.dim), dtype=complex)
        for m in range(self.dim):
            if m >> g & 1:
                continue
            sign = -1.0 if popcount(m & ((1 << g) - 1)) % 2 else 1.0
            E[m | (1 << g), m] = sign
        return E

    def eps_w(self, a: int) -> np.ndarray:
        return self.creation(a)

    def eps_wb(self, a: int) -> np.ndarray:
        return self.creation(self.n + a)

    def iota_V(self, a: int) -> np.ndarray:
        """Contraction with V_a = (E_a - i J E_a)/sqrt(2)."""
        return self.eps_w(a).conj().T

    def iota_Vb(self, a: int) -> np.ndarray:
        return self.eps_wb(a).conj().T

    def eps_S(self, a: int) -> np.ndarray:
        return (self.eps_w(a) + self.eps_wb(a)) / SQRT2

    def eps_T(self, a: int) -> np.ndarray:
        return -1j * (self.eps_w(a) - self.eps_wb(a)) / SQRT2

    def iota_S(self, a: int) -> np.ndarray:
        return self.eps_S(a).conj().T

    def iota_T(self, a: int) -> np.ndarray:
        return self.eps_T(a).conj().T

    def rotation(self, a: int) -> np.ndarray:
        """Infinitesimal frame rotation ``S* -> -T*``, ``T* -> S*`` as a derivation."""
        return self.eps_S(a) @ self.iota_T(a) - self.eps_T(a) @ self.iota_S(a)

    @cached_property
    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    @cached_property
    def kahler(self) -> np.ndarray:
        """Left wedge by ``omega = -1/2 sum theta^a ^ J theta^a = -i sum w^a ^ wbar^a``."""
        return sum(-1j * self.eps_w(a) @ self.eps_wb(a) for a in range(self.n))

    @cached_property
    def volume(self) -> np.ndarray:
        """Coefficient vector of ``nu = omega^n / n!``."""
        one = np.zeros(self.dim, dtype=complex)
        one[0] = 1.0
        v = one
        for _ in range(self.n):
            v = self.kahler @ v
        return v / math.factorial(self.n)

    @cached_property
    def conjugation(self) -> np.ndarray:
        """Signed permutation ``P`` with ``conj(phi) = P @ conj(coeffs)``."""
        P = np.zeros((self.dim, self.dim))
        for m in range(self.dim):
            # conj swaps w^a <-> wbar^a; re-sort the generator word
            word = [g for g in range(self.ngen) if m >> g & 1]
            swapped = [(g + self.n) % self.ngen for g in word]
            P[_mask(swapped), m] = _sort_sign(swapped)
        return P

    @cached_property
    def star(self) -> np.ndarray:
        """Complex-linear transverse star, defined by ``phi ^ *conj(psi) = <phi, psi> nu``."""
        full = self.dim - 1
        nu = self.volume[full]
        X = np.zeros((self.dim, self.dim), dtype=complex)
        for m in range(self.dim):
            comp = full ^ m
            word = [g for g in range(self.ngen) if m >> g & 1] + [g for g in range(self.ngen) if comp >> g & 1]
            s = _sort_sign(word)
            # star(conj(u_m)) = (nu / s) u_comp ; conj(u_m) = P[:, m]
            X[comp, m] = nu / s
        # X maps conj(u_m) coordinates -> so star = X @ P^{-1} (P real orthogonal)
        return X @ self.conjugation.T

    @cached_property
    def c_operator(self) -> np.ndarray:
        """``C = sum_{r,s} i^{r-s} P_{r,s}``."""
        return np.diag((1j) ** (self.r - self.s))

    def projector(self, key) -> np.ndarray:
        P = np.zeros((self.dim, self.dim))
        idx = self.slot(key)
        P[idx, idx] = 1.0
        return P


def _mask(word) -> int:
    return sum(1 << g for g in word)


def _sort_sign(word) -> float:
    inv = sum(1 for i in range(len(word)) for j in range(i + 1, len(word)) if word[i] > word[j])
    return -1.0 if inv % 2 else 1.0


@lru_cache(maxsize=None)
def basis(n: int) -> BidegreeBasis:
    return BidegreeBasis(n)


# Half-normalised holomorphic coframe Z* = (S* + i T*)/2 = w / sqrt(2).
Z_STAR_IN_UNIT_FRAME = 1.0 / SQRT2
