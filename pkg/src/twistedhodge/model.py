"""Model foliations: suspension flows of a torus and their products.

Each suspension factor contributes a transverse plane with orthonormal
coframe ``S* = exp(h(t)) ds``, ``T* = dt`` where ``h' = c + p(t)``.  The
Carriere flow on the hyperbolic torus is ``c = log(lambda)``, ``p = 0``.

Models with ``p != 0`` are defined through their basic complex only; they
are a consistency testbed and are not claimed to come from a compact
foliated manifold.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fourier import FourierScalar, differentiate, multiply


class InvalidModelError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Suspension:
    c: float
    p: FourierScalar
    name: str = ""

    @property
    def n(self) -> int:
        return 1

    @property
    def q(self) -> int:
        return 2

    def factors(self) -> list["Suspension"]:
        return [self]

    @property
    def key(self) -> str:
        if self.p.bandwidth == 0:
            return f"S(c={self.c!r})"
        pk = ",".join(f"{k}:{self.p[k].real!r}{self.p[k].imag:+}j"
                      for k in range(1, self.p.bandwidth + 1))
        return f"S(c={self.c!r};p={pk})"

    @property
    def label(self) -> str:
        return self.name or self.key


@dataclass(frozen=True, eq=False)
class Product:
    left: "ModelSpec"
    right: "ModelSpec"

    @property
    def n(self) -> int:
        return self.left.n + self.right.n

    @property
    def q(self) -> int:
        return 2 * self.n

    def factors(self) -> list[Suspension]:
        return self.left.factors() + self.right.factors()

    @property
    def key(self) -> str:
        return f"({self.left.key})x({self.right.key})"

    @property
    def label(self) -> str:
        return f"{self.left.label} x {self.right.label}"


ModelSpec = Suspension | Product


@dataclass(frozen=True)
class FactorGeometry:
    h_prime: FourierScalar
    h_second: FourierScalar
    gauss_curvature: FourierScalar
    # d/dt-free connection coefficients: nabla_S S = -h' T, nabla_S T = h' S,
    # nabla_T S = nabla_T T = 0.


@dataclass(frozen=True)
class FrameGeometry:
    factors: tuple[FactorGeometry, ...]

    @property
    def kappa_norm_sq(self) -> FourierScalar:
        """|kappa_B|^2 as a sum of per-factor squares (each in its own t)."""
        total = FourierScalar.zeros(0)
        for f in self.factors:
            total = total + multiply(f.h_prime, f.h_prime, 2 * f.h_prime.order)
        return total

    @property
    def gauss_curvature(self) -> list[FourierScalar]:
        return [f.gauss_curvature for f in self.factors]

    @property
    def h_prime(self) -> list[FourierScalar]:
        return [f.h_prime for f in self.factors]


def carriere(trace_a: int) -> Suspension:
    """Carriere flow for a hyperbolic matrix in SL(2, Z) of the given trace."""
    if trace_a <= 2:
        raise InvalidModelError(f"trace {trace_a} <= 2: A is not hyperbolic")
    lam = (trace_a + math.sqrt(trace_a * trace_a - 4)) / 2
    return Suspension(math.log(lam), FourierScalar.zeros(0), name=f"carriere{trace_a}")


def taut_model() -> Suspension:
    return Suspension(0.0, FourierScalar.zeros(0), name="taut")


def suspension(c: float, p: FourierScalar | None = None, name: str = "") -> Suspension:
    if p is None:
        p = FourierScalar.zeros(0)
    if not p.real_flag and not np.allclose(p.coeffs[::-1], np.conj(p.coeffs), atol=1e-12):
        raise InvalidModelError("p must be real")
    if abs(p.mean) > 1e-14:
        raise InvalidModelError(f"p must have zero mean (got {p.mean})")
    p = p.resize(max(p.bandwidth, 0))
    p = FourierScalar(p.order, p.coeffs, True)
    return Suspension(float(c), p, name=name)


def product(a: ModelSpec, b: ModelSpec) -> Product:
    return Product(a, b)


def _factor_geometry(f: Suspension) -> FactorGeometry:
    hp = FourierScalar.constant(f.c) + f.p
    hpp = differentiate(hp)
    k = -(hpp + multiply(hp, hp, 2 * hp.order))
    return FactorGeometry(hp, hpp, k)


def geometry(m: ModelSpec) -> FrameGeometry:
    return FrameGeometry(tuple(_factor_geometry(f) for f in m.factors()))


def is_taut(m: ModelSpec) -> bool:
    """Taut iff every factor's mean curvature class ``c [dt]`` vanishes."""
    return all(f.c == 0 for f in m.factors())


def bandwidth(m: ModelSpec) -> int:
    return max(f.p.bandwidth for f in m.factors())


def is_mode_diagonal(m: ModelSpec) -> bool:
    return bandwidth(m) == 0


# ----------------------------------------------------------------------------
# model spec files (JSON)
#
#   {"variant": "carriere", "trace": 3}
#   {"variant": "taut"}
#   {"variant": "suspension", "c": 0.693, "p": [[1, 0.1, 0.0]]}
#   {"variant": "product", "left": {...}, "right": {...}}
#
# "p" lists (k, re, im) for k >= 1; the k < 0 modes follow by reality.

def model_from_dict(d: dict) -> ModelSpec:
    try:
        variant = d["variant"]
    except KeyError:
        raise InvalidModelError("model spec needs a 'variant'") from None
    if variant == "carriere":
        return carriere(int(d["trace"]))
    if variant == "taut":
        return taut_model()
    if variant == "suspension":
        return suspension(float(d.get("c", 0.0)), p_from_triples(d.get("p", [])), name=d.get("name", ""))
    if variant == "product":
        return product(model_from_dict(d["left"]), model_from_dict(d["right"]))
    raise InvalidModelError(f"unknown variant {variant!r}")


def p_from_triples(triples) -> FourierScalar:
    modes = {}
    for k, re, im in triples:
        k = int(k)
        if k == 0:
            raise InvalidModelError("p must have zero mean; drop the k = 0 triple")
        if k < 0:
            k, im = -k, -im
        modes[k] = modes.get(k, 0) + complex(re, im)
        modes[-k] = modes.get(-k, 0) + complex(re, -im)
    return FourierScalar.from_modes(modes)


def model_to_dict(m: ModelSpec) -> dict:
    if isinstance(m, Product):
        return {"variant": "product", "left": model_to_dict(m.left), "right": model_to_dict(m.right)}
    triples = [[k, m.p[k].real, m.p[k].imag] for k in range(1, m.p.bandwidth + 1) if m.p[k] != 0]
    return {"variant": "suspension", "c": m.c, "p": triples, "name": m.name}


def load_model(path) -> ModelSpec:
    with open(Path(path)) as fh:
        return model_from_dict(json.load(fh))
