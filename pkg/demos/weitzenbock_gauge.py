"""Weitzenbock formulas and the coclosed-mean-curvature gauge.

Several twisted formulas use dbar_B^* kappa^{0,1} = 0, which holds exactly
when h'' = 0.  With a non-constant mean curvature those rows are reported
n/a, and harmonic (r,0)-forms on a taut but non-minimal metric stop being
parallel along Vbar; what survives is an energy balance.
"""
import numpy as np

from twistedhodge.fourier import FourierScalar
from twistedhodge.harmonic import kernel_basis
from twistedhodge.model import carriere, suspension
from twistedhodge.operators import get_assembler
from twistedhodge.weitzenbock import kappa_norm_sq, weitzenbock_residuals

for m in (carriere(3), suspension(0.6931471805599453, FourierScalar.cos(1, 0.2), name="log2 + 0.2 cos")):
    rep = weitzenbock_residuals(m, 24)
    print(f"{m.label}: gauge defect {rep.data['gauge_defect']:.3e}")
    for c in rep.checks:
        if c.verdict != "pass":
            print(f"   {c.verdict:>4}  {c.name}  residual {c.residual:.2e}")

m = suspension(0.0, FourierScalar.cos(1, 0.1), name="taut, 0.1 cos")
a = get_assembler(m, 16)
phi = kernel_basis(a["Delta_kappa"], a.basis.slot((1, 0))).vectors[0]
grad = a.nabla_Vb(0).apply(phi)
lhs = np.linalg.norm(grad) ** 2
rhs = 0.25 * np.vdot(phi, (0.5 * kappa_norm_sq(a)).apply(phi)).real
print(f"\nharmonic (1,0)-form on {m.label}:")
print(f"  |nabla_Vbar phi|^2          = {lhs:.10f}")
print(f"  1/4 <|kappa01|^2 phi, phi>  = {rhs:.10f}")
