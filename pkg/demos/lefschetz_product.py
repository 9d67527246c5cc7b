"""Hard Lefschetz and the primitive splitting on the flat product of two taut flows."""
from twistedhodge.duality import hard_lefschetz_check, primitive_decomposition_check
from twistedhodge.harmonic import cohomology
from twistedhodge.model import product, taut_model

m = product(taut_model(), taut_model())
t = cohomology(m, 8, "kappa")
print(f"{m.label}: twisted Betti numbers {t.graded}")
for r in range(3):
    print("   " + "  ".join(f"h{r}{s}={t.h(r, s)}" for s in range(3)))

rep = hard_lefschetz_check(m, 8)
for c in rep.checks:
    print(f"{c.verdict:>4}  {c.name}: {c.observed} / {c.expected}")
print("primitive harmonic classes by degree:", rep.data["primitive_dims"])
print("primitive forms per Fourier mode:", primitive_decomposition_check(m, 1).data["primitive_dims_per_mode"])
