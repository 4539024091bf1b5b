"""Obstruction certificates: proofs that a family is NOT almost-SDC.

Two necessary conditions turn into computable certificates:
  - a triple {I, B, C} padded by fewer than rank([B,C])/2 zeros can
    never be almost-SDC, and the triple is not restricted-SDC below
    that threshold;
  - any almost-SDC family with an invertible pivot generates a real
    unital algebra of dimension at most n, so dimension > n is a proof
    of failure.
"""

import numpy as np

from sdckit.matcore import commutator
from sdckit.obstruct import (
    algebra_dimension,
    builtin_counterexamples,
    commutator_obstruction,
    not_asdc_certificate,
)

ce = builtin_counterexamples()

print("=" * 70)
print("1. The commutator-rank obstruction")
print("=" * 70)
for n in (2, 3, 5):
    fam = ce["large_commutator"]["build"](n)
    rank, threshold = commutator_obstruction(fam[1].a, fam[2].a)
    print(
        f"order {2 * n}: rank([B, C]) = {rank}; padding by fewer than "
        f"{threshold} zeros can never reach an SDC limit"
    )

print()
print("=" * 70)
print("2. The seven-matrix family of order six")
print("=" * 70)
seven = [m.a for m in ce["seven_tuple"]["matrices"]]
A1 = seven[0]
quotients = [np.linalg.solve(A1, m) for m in seven]
worst_comm = max(
    np.linalg.norm(commutator(quotients[i], quotients[j]))
    for i in range(7)
    for j in range(i + 1, 7)
)
print(f"pairwise commutators of the quotients: {worst_comm:.1e} (they commute)")
print(f"spectra are real; the naive characterization would say almost-SDC")
dim = algebra_dimension(quotients)
print(f"but the generated algebra has dimension {dim} > 6, a certificate of")
print(f"failure: the commuting-real characterization stops at triples")

rep = not_asdc_certificate(seven)
print(f"report: {rep}")
