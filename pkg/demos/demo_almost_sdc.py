"""Almost-SDC: which families become diagonalizable under arbitrarily
small perturbations, and the constructions that realize the limit.

Three behaviors for a symmetric pair:
  - defective real pencil eigenvalues: not SDC, but an eps-bump splits
    them (eigenvalues move like sqrt(eps));
  - complex pencil eigenvalues with an invertible leading matrix: not
    even almost-SDC (eigenvalues vary continuously);
  - every singular pair IS almost-SDC: a zero coordinate hosts a border
    that drags complex eigenvalues onto the real axis.
"""

import numpy as np

from sdckit.asdc import asdc_pair_check, perturb_blocks, perturb_pair
from sdckit.canonical import Block, BlockSpec
from sdckit.matcore import direct_sum, f_mat

F2 = f_mat(2)

print("=" * 70)
print("1. Defective pair: eigenvalues 1 +- sqrt(eps) after the bump")
print("=" * 70)
B = np.array([[0.0, 1.0], [1.0, 1.0]])
print("verdict:", asdc_pair_check(F2, B))
for eps in (1e-2, 1e-4, 1e-6):
    pp = perturb_pair(F2, B, eps)
    ev = np.sort(np.linalg.eigvals(np.linalg.solve(pp.A_tilde.a, pp.B_tilde.a)).real)
    print(f"  eps = {eps:.0e}: eigenvalues {ev}, distance {pp.distance:.2e}")

print()
print("=" * 70)
print("2. Complex pair: refused, with the reason")
print("=" * 70)
C = np.diag([1.0, -1.0])
print("verdict:", asdc_pair_check(F2, C))

print()
print("=" * 70)
print("3. The same pair padded by one zero row/column is almost-SDC")
print("=" * 70)
A3 = direct_sum(F2, np.zeros((1, 1)))
C3 = direct_sum(C, np.zeros((1, 1)))
print("verdict:", asdc_pair_check(A3, C3))
pp = perturb_pair(A3, C3, 1e-2)
print("perturbed pair:")
print(np.round(pp.A_tilde.a, 6))
print(np.round(pp.B_tilde.a, 6))
ev = np.sort(np.linalg.eigvals(np.linalg.solve(pp.A_tilde.a, pp.B_tilde.a)).real)
print(f"pencil eigenvalues after the border: {np.round(ev, 8)}")

print()
print("=" * 70)
print("4. Exact canonical descriptors drive the block constructions")
print("=" * 70)
spec = BlockSpec((Block(2, 1, lam=1j), Block(3, 1)))
pp = perturb_blocks(spec, 1e-2)
ev = np.sort(np.linalg.eigvals(np.linalg.solve(pp.A_tilde.a, pp.B_tilde.a)).real)
print(f"complex block borrowed a singular block's center: eigenvalues "
      f"{np.round(ev, 5)}, distance {pp.distance:.2e}")
