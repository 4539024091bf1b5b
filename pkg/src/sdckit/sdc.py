"""Decide simultaneous diagonalizability via congruence (SDC).

Covers nonsingular and singular families.  A family is SDC when one
invertible P makes every P^T A_i P diagonal; the certified verdict
carries either the congruence and diagonals or a named witness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import errors
from ._pencil import cluster_values, invariant_subspace, spectral_scale
from .matcore import DEFAULT_TOL, Congruence, SymMat, Tolerances, asmat

__all__ = [
    "Witness",
    "SdcResult",
    "find_max_rank_element",
    "sdc_check",
    "sdc_check_pd",
    "simdiag_commuting",
]

MAX_RANK_TRIALS = 64


@dataclass(frozen=True)
class Witness:
    """Named reason a family is not SDC.

    kind is one of "non-commuting", "non-real-eigenvalue",
    "not-diagonalizable", "range-violation"; i/j are indices into the
    family and value carries the offending magnitude or eigenvalue.
    """

    kind: str
    i: int = -1
    j: int = -1
    value: complex = 0.0


@dataclass(frozen=True)
class SdcResult:
    verdict: str  # "SDC" | "NotSDC"
    congruence: Congruence | None = None
    diagonals: tuple | None = None  # one real n-vector per input matrix
    witness: Witness | None = None

    @property
    def is_sdc(self) -> bool:
        return self.verdict == "SDC"


def find_max_rank_element(family, seed: int = 0, tol: Tolerances = DEFAULT_TOL):
    """Seeded search for a max-rank element of the span.

    Tries each family member plus MAX_RANK_TRIALS random combinations;
    generic coefficients attain the true maximum rank.  Returns
    (coefficients, S).  A family of zero matrices yields rank 0, which
    is not an error; an empty family is.
    """
    mats = [asmat(a) for a in family]
    if not mats:
        raise errors.EmptyFamily("need at least one matrix")
    n = mats[0].shape[0]
    m = len(mats)
    rng = np.random.default_rng(seed)

    def rank_of(c):
        S = sum(ci * Ai for ci, Ai in zip(c, mats))
        s = np.linalg.svd(S, compute_uv=False)
        if s.size == 0 or s[0] == 0.0:
            return 0
        return int(np.sum(s > tol.rank_tol * s[0]))

    best_c = np.zeros(m)
    best_c[0] = 1.0
    best_rank = rank_of(best_c)
    for i in range(1, m):
        c = np.zeros(m)
        c[i] = 1.0
        r = rank_of(c)
        if r > best_rank:
            best_rank, best_c = r, c
    for _ in range(MAX_RANK_TRIALS):
        if best_rank == n:
            break
        c = rng.standard_normal(m)
        r = rank_of(c)
        if r > best_rank:
            best_rank, best_c = r, c
    S = sum(ci * Ai for ci, Ai in zip(best_c, mats))
    return best_c, SymMat(0.5 * (S + S.T))


def simdiag_commuting(family, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Shared eigenbasis of commuting diagonalizable real-spectrum matrices.

    Recursive eigenspace refinement: split along the first member with a
    non-scalar spectrum on the current subspace and recurse per
    eigenvalue cluster.  Returns invertible V with V^{-1} M V diagonal
    for every member.
    """
    mats = [asmat(m) for m in family]
    if not mats:
        raise errors.EmptyFamily("need at least one matrix")
    n = mats[0].shape[0]
    for i, (Mi) in enumerate(mats):
        if Mi.shape[0] != n:
            raise errors.OrderMismatch(f"member {i} has order {Mi.shape[0]} != {n}")
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            comm = mats[i] @ mats[j] - mats[j] @ mats[i]
            scale = max(
                1.0, np.linalg.norm(mats[i], 2) * np.linalg.norm(mats[j], 2)
            )
            if np.linalg.norm(comm, 2) > tol.resid_tol * scale:
                raise errors.NotCommuting(f"members {i} and {j} do not commute")

    def refine(basis: np.ndarray, depth: int) -> list[np.ndarray]:
        d = basis.shape[1]
        if d == 1 or depth == len(mats):
            return [basis]
        M = mats[depth]
        Mloc = basis.T @ M @ basis
        w = np.linalg.eigvals(Mloc)
        scale = spectral_scale(w)
        if np.max(np.abs(w.imag)) > tol.eig_real_tol * scale:
            raise errors.NotDiagonalizable(
                f"member {depth} has non-real spectrum on a joint subspace"
            )
        wr = w.real
        diam = max(float(wr.max() - wr.min()), 1.0)
        clusters = cluster_values(wr, tol.cluster_tol * diam)
        if len(clusters) == 1:
            lam = float(np.mean(wr))
            if np.linalg.norm(Mloc - lam * np.eye(d), 2) > 100 * tol.cluster_tol * diam:
                raise errors.NotDiagonalizable(
                    f"member {depth} is not diagonalizable"
                )
            return refine(basis, depth + 1)
        out = []
        for idx in clusters:
            lam = float(np.mean(wr[idx]))
            spread = float(np.max(np.abs(wr[idx] - lam)))
            U = invariant_subspace(Mloc, lam, spread + tol.cluster_tol * diam)
            if U.shape[1] != len(idx):
                raise errors.NotDiagonalizable(
                    f"member {depth} has a defective eigenvalue near {lam}"
                )
            out.extend(refine(basis @ U, depth))
        return out

    blocks = refine(np.eye(n), 0)
    V = np.hstack(blocks)

    # certify: every member diagonal in the joint basis
    Vinv = np.linalg.inv(V)
    kappa = np.linalg.cond(V)
    for i, M in enumerate(mats):
        D = Vinv @ M @ V
        off = D - np.diag(np.diag(D))
        bound = tol.resid_tol * kappa**2 * max(1.0, np.linalg.norm(M, 2)) * 10
        if np.linalg.norm(off, 2) > bound:
            raise errors.NotDiagonalizable(
                f"member {i} resists joint diagonalization "
                f"(residual {np.linalg.norm(off, 2):.3e})"
            )
    return V


def _joint_eigenvalue_groups(diags: np.ndarray, tol: Tolerances) -> list[np.ndarray]:
    """Group coordinates by the joint eigenvalue tuple across the family."""
    m, n = diags.shape
    remaining = list(range(n))
    groups = []
    while remaining:
        i = remaining[0]
        grp = [i]
        rest = []
        for j in remaining[1:]:
            close = True
            for t in range(m):
                scale = max(1.0, float(np.max(np.abs(diags[t]))))
                if abs(diags[t, i] - diags[t, j]) > 10 * tol.cluster_tol * scale:
                    close = False
                    break
            (grp if close else rest).append(j)
        groups.append(np.array(grp, dtype=int))
        remaining = rest
    return groups


def _sdc_nonsingular(mats, S, tol: Tolerances) -> SdcResult:
    """SDC decision when S in the span is certified invertible."""
    n = S.shape[0]
    Ms = [np.linalg.solve(S, A) for A in mats]

    # commuting first: the witness order is commutation, realness,
    # diagonalizability
    for i in range(len(Ms)):
        for j in range(i + 1, len(Ms)):
            comm = Ms[i] @ Ms[j] - Ms[j] @ Ms[i]
            scale = max(1.0, np.linalg.norm(Ms[i], 2) * np.linalg.norm(Ms[j], 2))
            val = np.linalg.norm(comm, 2)
            if val > tol.resid_tol * scale:
                return SdcResult(
                    "NotSDC", witness=Witness("non-commuting", i, j, val)
                )
    for i, M in enumerate(Ms):
        w = np.linalg.eigvals(M)
        scale = spectral_scale(w)
        bad = np.abs(w.imag) > tol.eig_real_tol * scale
        if np.any(bad):
            lam = w[bad][int(np.argmax(np.abs(w[bad].imag)))]
            return SdcResult(
                "NotSDC", witness=Witness("non-real-eigenvalue", i, value=complex(lam))
            )
    try:
        V = simdiag_commuting(Ms, tol)
    except errors.NotDiagonalizable:
        # identify a defective member for the witness
        for i, M in enumerate(Ms):
            try:
                simdiag_commuting([M], tol)
            except errors.NotDiagonalizable:
                return SdcResult("NotSDC", witness=Witness("not-diagonalizable", i))
        return SdcResult("NotSDC", witness=Witness("not-diagonalizable"))

    # group coordinates by joint eigenvalue, then diagonalize each
    # symmetric block of the transformed S by an orthogonal
    # eigendecomposition
    Vinv = np.linalg.inv(V)
    diags = np.array([np.diag(Vinv @ M @ V) for M in Ms])
    groups = _joint_eigenvalue_groups(diags, tol)
    order = np.concatenate(groups)
    V = V[:, order]
    Sbar = V.T @ S @ V
    cols = []
    pos = 0
    for grp in groups:
        g = len(grp)
        blk = Sbar[pos : pos + g, pos : pos + g]
        blk = 0.5 * (blk + blk.T)
        vals, vecs = np.linalg.eigh(blk)
        # near-defective pencils have legitimately tiny local Grams; the
        # certificate's kappa^2 factor absorbs the resulting scaling, so
        # only outright zeros are fatal here
        if np.min(np.abs(vals)) <= 1e-14 * max(1.0, np.max(np.abs(vals))):
            raise errors.CertificationFailed("degenerate joint-eigenvalue block")
        cols.append(V[:, pos : pos + g] @ (vecs / np.sqrt(np.abs(vals))))
        pos += g
    P = np.hstack(cols)

    # deterministic ordering by the diagonals of the inputs
    PtAP = [P.T @ A @ P for A in mats]
    keys = np.round(np.array([np.diag(D) for D in PtAP]), 6)
    order = np.lexsort(keys[::-1])
    P = P[:, order]
    for j in range(n):
        i = int(np.argmax(np.abs(P[:, j])))
        if P[i, j] < 0:
            P[:, j] = -P[:, j]

    cong = Congruence(P)
    diagonals = []
    for i, A in enumerate(mats):
        D = P.T @ A @ P
        d = np.diag(D).copy()
        off = D - np.diag(d)
        bound = tol.resid_tol * cong.kappa**2 * max(1.0, np.linalg.norm(A, 2))
        if np.linalg.norm(off, 2) > bound:
            raise errors.CertificationFailed(
                f"off-diagonal residual {np.linalg.norm(off, 2):.3e} for member "
                f"{i} exceeds {bound:.3e}"
            )
        diagonals.append(d)
    return SdcResult("SDC", congruence=cong, diagonals=tuple(diagonals))


def sdc_check(family, tol: Tolerances = DEFAULT_TOL, seed: int = 0) -> SdcResult:
    """Certified SDC decision for a family of symmetric matrices.

    Singular families are reduced to the range of a max-rank element
    (rejecting on range violations) and the nonsingular core is decided
    through commutation, realness and joint diagonalizability of
    S^{-1} A_i.
    """
    mats = [asmat(a) for a in family]
    if not mats:
        raise errors.EmptyFamily("need at least one matrix")
    n = mats[0].shape[0]
    for i, A in enumerate(mats):
        if A.shape[0] != n:
            raise errors.OrderMismatch(f"member {i} has order {A.shape[0]} != {n}")
    if n == 0:
        return SdcResult("SDC", congruence=None, diagonals=tuple())

    # joint row equilibration: the verdict is congruence-invariant and
    # wildly different coordinate scales (border constructions) would
    # otherwise sink below the rank floor
    rowmax = np.zeros(n)
    for A in mats:
        rowmax = np.maximum(rowmax, np.max(np.abs(A), axis=1))
    if rowmax.max() > 0:
        ratio = rowmax.max() / max(rowmax[rowmax > 0].min(), 1e-300)
        if ratio > 1e4:
            d = np.where(rowmax > 0, 1.0 / np.sqrt(np.maximum(rowmax, 1e-300)), 1.0)
            D = np.diag(d)
            inner = sdc_check([D @ A @ D for A in mats], tol, seed)
            if not inner.is_sdc:
                return inner
            P = D @ inner.congruence.P
            cong = Congruence(P)
            diagonals = []
            for i, A in enumerate(mats):
                M = P.T @ A @ P
                dd = np.diag(M).copy()
                off = M - np.diag(dd)
                bound = tol.resid_tol * cong.kappa**2 * max(1.0, np.linalg.norm(A, 2))
                if np.linalg.norm(off, 2) > bound:
                    raise errors.CertificationFailed(
                        "equilibrated certificate failed at the original scale"
                    )
                diagonals.append(dd)
            return SdcResult("SDC", congruence=cong, diagonals=tuple(diagonals))

    _, S = find_max_rank_element(mats, seed=seed, tol=tol)
    s = np.linalg.svd(S.a, compute_uv=False)
    rank = int(np.sum(s > tol.rank_tol * s[0])) if s[0] > 0 else 0

    if rank == n:
        return _sdc_nonsingular(mats, S.a, tol)

    if rank == 0:
        # every member numerically zero
        return SdcResult(
            "SDC",
            congruence=Congruence(np.eye(n)),
            diagonals=tuple(np.zeros(n) for _ in mats),
        )

    # singular family: verify range inclusion, restrict, recurse
    U, sv, _ = np.linalg.svd(S.a)
    Ur = U[:, :rank]
    for i, A in enumerate(mats):
        scale = np.linalg.norm(A, 2)
        if scale == 0.0:
            continue
        resid = np.linalg.norm(A - Ur @ (Ur.T @ A), 2)
        if resid > 100 * tol.rank_tol * scale:
            return SdcResult(
                "NotSDC", witness=Witness("range-violation", i, value=resid)
            )
    reduced = [Ur.T @ A @ Ur for A in mats]
    Sbar = Ur.T @ S.a @ Ur
    inner = _sdc_nonsingular([0.5 * (R + R.T) for R in reduced], 0.5 * (Sbar + Sbar.T), tol)
    if not inner.is_sdc:
        return inner
    # lift: null-space coordinates stay zero
    Pbar = inner.congruence.P
    Un = U[:, rank:]
    P = np.hstack([Ur @ Pbar, Un])
    diagonals = tuple(
        np.concatenate([d, np.zeros(n - rank)]) for d in inner.diagonals
    )
    return SdcResult("SDC", congruence=Congruence(P), diagonals=diagonals)


def sdc_check_pd(family, pd_coefficients, tol: Tolerances = DEFAULT_TOL) -> SdcResult:
    """SDC decision through a positive definite combination.

    With S = sum c_i A_i positive definite, the family is SDC exactly
    when all S^{-1/2} A_i S^{-1/2} commute; the congruence composes the
    joint orthogonal eigenbasis with S^{-1/2}.
    """
    mats = [asmat(a) for a in family]
    if not mats:
        raise errors.EmptyFamily("need at least one matrix")
    c = np.asarray(pd_coefficients, dtype=float)
    if c.shape != (len(mats),):
        raise errors.OrderMismatch("one coefficient per family member required")
    S = sum(ci * Ai for ci, Ai in zip(c, mats))
    S = 0.5 * (S + S.T)
    vals, vecs = np.linalg.eigh(S)
    if np.min(vals) <= tol.rank_tol * max(1.0, float(np.max(np.abs(vals)))):
        raise errors.NotPositiveDefinite(
            f"combination has minimum eigenvalue {np.min(vals):.3e}"
        )
    S_isqrt = vecs @ np.diag(1.0 / np.sqrt(vals)) @ vecs.T
    Ns = [S_isqrt @ A @ S_isqrt for A in mats]
    Ns = [0.5 * (N + N.T) for N in Ns]
    for i in range(len(Ns)):
        for j in range(i + 1, len(Ns)):
            comm = Ns[i] @ Ns[j] - Ns[j] @ Ns[i]
            scale = max(1.0, np.linalg.norm(Ns[i], 2) * np.linalg.norm(Ns[j], 2))
            val = np.linalg.norm(comm, 2)
            if val > tol.resid_tol * scale:
                return SdcResult(
                    "NotSDC", witness=Witness("non-commuting", i, j, val)
                )
    # joint orthogonal eigenbasis of commuting symmetric matrices
    Q = _joint_orthobasis(Ns, tol)
    P = S_isqrt @ Q
    cong = Congruence(P)
    diagonals = []
    for i, A in enumerate(mats):
        D = P.T @ A @ P
        d = np.diag(D).copy()
        off = D - np.diag(d)
        bound = tol.resid_tol * cong.kappa**2 * max(1.0, np.linalg.norm(A, 2))
        if np.linalg.norm(off, 2) > bound:
            raise errors.CertificationFailed(
                f"off-diagonal residual for member {i} exceeds {bound:.3e}"
            )
        diagonals.append(d)
    return SdcResult("SDC", congruence=cong, diagonals=tuple(diagonals))


def _joint_orthobasis(sym_mats, tol: Tolerances) -> np.ndarray:
    """Joint orthonormal eigenbasis of commuting symmetric matrices."""
    n = sym_mats[0].shape[0]

    def refine(basis: np.ndarray, depth: int) -> list[np.ndarray]:
        if basis.shape[1] == 1 or depth == len(sym_mats):
            return [basis]
        Mloc = basis.T @ sym_mats[depth] @ basis
        Mloc = 0.5 * (Mloc + Mloc.T)
        w, V = np.linalg.eigh(Mloc)
        diam = max(float(w[-1] - w[0]), 1.0)
        clusters = cluster_values(w, tol.cluster_tol * diam)
        if len(clusters) == 1:
            return refine(basis, depth + 1)
        out = []
        for idx in clusters:
            out.extend(refine(basis @ V[:, idx], depth))
        return out

    return np.hstack(refine(np.eye(n), 0))
