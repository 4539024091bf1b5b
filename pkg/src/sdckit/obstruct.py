"""Necessary-condition certificates against ASDC and RSDC.

Two obstructions: the commutator rank of a triple bounds the padding
dimension below which the zero-extended family cannot be ASDC (and the
triple cannot be d-RSDC), and the dimension of the real unital algebra
generated by S^{-1} A_i exceeds n only for families that are not ASDC.
The explicit counterexample families are built exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import errors
from .matcore import DEFAULT_TOL, SymMat, Tolerances, asmat, commutator, f_mat
from .sdc import find_max_rank_element

__all__ = [
    "ObstructionReport",
    "commutator_obstruction",
    "algebra_dimension",
    "builtin_counterexamples",
    "not_asdc_certificate",
]


@dataclass(frozen=True)
class ObstructionReport:
    commutator_rank: int | None
    rsdc_lower_bound: int | None
    algebra_dim: int
    algebra_bound_violated: bool


def commutator_obstruction(B, C, tol: Tolerances = DEFAULT_TOL) -> tuple[int, int]:
    """Commutator rank and the padding threshold it implies.

    For {I, B, C}, zero-padding by fewer than ceil(rank([B,C])/2)
    dimensions leaves a family that is not ASDC, and the triple is not
    d-RSDC below that threshold.
    """
    b, c = asmat(B), asmat(C)
    if b.shape != c.shape:
        raise errors.OrderMismatch("pair must share an order")
    K = commutator(b, c)
    s = np.linalg.svd(K, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0, 0
    rank = int(np.sum(s > tol.rank_tol * s[0]))
    return rank, math.ceil(rank / 2)


def algebra_dimension(
    generators,
    tol: Tolerances = DEFAULT_TOL,
    max_products: int | None = None,
) -> int:
    """Dimension of the real unital algebra generated by the inputs.

    Iterated span closure: seed with the identity and the generators,
    append products of the current basis with the generators, extract a
    basis by SVD rank over vectorized matrices, stop at a fixpoint.  The
    fixpoint is certified by one extra round adding nothing.
    """
    mats = [asmat(g) for g in generators]
    if not mats:
        raise errors.EmptyFamily("need at least one generator")
    n = mats[0].shape[0]
    for i, g in enumerate(mats):
        if g.shape[0] != n:
            raise errors.OrderMismatch(f"generator {i} has order {g.shape[0]} != {n}")
    if max_products is None:
        max_products = n * n

    # products whose norm is pure roundoff must not be normalized into
    # spurious directions
    gen_scale = max(1.0, max(np.linalg.norm(g, 2) for g in mats))
    zero_floor = 1e-12 * gen_scale

    def extract_basis(stack):
        rows = []
        for m in stack:
            nrm = np.linalg.norm(m.ravel())
            if nrm > zero_floor:
                rows.append(m.ravel() / nrm)
        if not rows:
            return []
        M = np.vstack(rows)
        u, s, vt = np.linalg.svd(M, full_matrices=False)
        if s.size == 0 or s[0] == 0.0:
            return []
        # generators commute only to their own rounding level, and the
        # closure amplifies that noise; true algebra directions decay
        # gradually while noise enters after a sharp spectral drop, so
        # the rank is cut at the first thousandfold gap (with an
        # absolute floor at rank_tol)
        rank = len(s)
        for i in range(1, len(s)):
            if s[i] < tol.rank_tol * s[0] or s[i] * 1e3 < s[i - 1]:
                rank = i
                break
        return [vt[i].reshape(n, n) for i in range(rank)]

    basis = extract_basis([np.eye(n)] + mats)
    for _ in range(max_products):
        extended = list(basis)
        for b in basis:
            for g in mats:
                extended.append(b @ g)
        new_basis = extract_basis(extended)
        if len(new_basis) == len(basis):
            # certified stable: one more round added nothing
            return len(basis)
        basis = new_basis
    raise errors.NoConvergence(
        f"algebra closure did not stabilize within {max_products} rounds"
    )


def _seven_tuple() -> list[SymMat]:
    """The order-6 seven-matrix family whose algebra dimension exceeds 6."""
    def e(i, j):
        m = np.zeros((6, 6))
        m[i - 1, j - 1] = 1.0
        m[j - 1, i - 1] = 1.0
        return m

    def d(i):
        m = np.zeros((6, 6))
        m[i - 1, i - 1] = 1.0
        return m

    mats = [
        f_mat(6),
        d(4),
        e(4, 5),
        e(4, 6),
        d(5),
        e(5, 6),
        d(6),
    ]
    return [SymMat(m) for m in mats]


def _large_commutator_triple(n: int) -> list[SymMat]:
    """{I_2n, I_n (+) -I_n, anti-block identity}: commutator rank 2n."""
    B = np.zeros((2 * n, 2 * n))
    B[:n, :n] = np.eye(n)
    B[n:, n:] = -np.eye(n)
    C = np.zeros((2 * n, 2 * n))
    C[:n, n:] = np.eye(n)
    C[n:, :n] = np.eye(n)
    return [SymMat(np.eye(2 * n)), SymMat(B), SymMat(C)]


def builtin_counterexamples() -> dict:
    """The explicit obstruction families, with their expected certificates.

    "seven_tuple": seven order-6 matrices with an invertible leading
    element, pairwise-commuting real-spectrum quotients, and algebra
    dimension above 6 (hence not ASDC).  "large_commutator": a family
    per n whose commutator rank is exactly 2n, so padding by fewer than
    n zeros never reaches ASDC.
    """
    return {
        "seven_tuple": {
            "matrices": _seven_tuple(),
            "expect": "algebra_dim > 6",
        },
        "large_commutator": {
            "build": _large_commutator_triple,
            "expect": "rank([B, C]) = 2n, threshold n",
        },
    }


def not_asdc_certificate(
    family, tol: Tolerances = DEFAULT_TOL, seed: int = 0
) -> ObstructionReport:
    """Necessary-condition report for a family.

    algebra_bound_violated = True proves the family is not ASDC; the
    absence of a violation proves nothing (no converse holds for wide
    families).  For triples the commutator obstruction of the two
    non-pivot elements is included.
    """
    mats = [asmat(a) for a in family]
    if not mats:
        raise errors.EmptyFamily("need at least one matrix")
    n = mats[0].shape[0]
    coeffs, S = find_max_rank_element(mats, seed=seed, tol=tol)
    s = np.linalg.svd(S.a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0 or s[-1] <= tol.rank_tol * s[0]:
        raise errors.NoInvertibleElement(
            "no certified-invertible element in the span"
        )
    gens = [np.linalg.solve(S.a, A) for A in mats]
    dim = algebra_dimension(gens, tol)

    comm_rank = None
    threshold = None
    if len(mats) == 3:
        drop = int(np.argmax(np.abs(coeffs)))
        rest = [m for i, m in enumerate(mats) if i != drop]
        comm_rank, threshold = commutator_obstruction(rest[0], rest[1], tol)

    return ObstructionReport(
        commutator_rank=comm_rank,
        rsdc_lower_bound=threshold,
        algebra_dim=dim,
        algebra_bound_violated=dim > n,
    )
