"""Why the twist is exactly one half.

The Kahler identity [L, partial*] = -i dbar holds on a non-taut model only if
both sides are twisted by the same multiple of the mean curvature, and
[L, partial_B* - t H10|] = -i (dbar_B - (1 - t) kappa01^) forces t = 1/2.
"""
from twistedhodge.fourier import FourierScalar
from twistedhodge.identities import identity_suite
from twistedhodge.model import carriere, suspension
from twistedhodge.operators import get_assembler, residual

a = get_assembler(carriere(3), 12)
L = a["L"]
print("t      [L, d'_t*] vs -i dbar_t")
for t in (0.0, 0.25, 0.5, 0.75, 1.0):
    Ks = a["partial_B_star"] - t * a["H10_contract"]
    res = residual(L @ Ks - Ks @ L, -1j * (a["dbar_B"] - t * a["kappa01_wedge"]))
    print(f"{t:<5}  {res:.3e}")

# The full catalogue on a model whose mean curvature is not constant.
m = suspension(0.6931471805599453, FourierScalar.cos(1, 0.2), name="log2 + 0.2 cos")
rep = identity_suite(m, 32)
print(f"\n{len(rep.checks)} identities on {m.label} at N = 32: {rep.verdict}, max residual {rep.max_residual():.2e}")
