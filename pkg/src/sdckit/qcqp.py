"""Diagonal reformulations of two-form QCQPs.

Instance model: minimize x^T A1 x + 2 b1^T x subject to
x^T A2 x + 2 b2^T x <= 1 and L x <= 1 over a bounded polytope.  The
random generator plants a prescribed number k of complex eigenvalue
pairs in the pencil.  Reformulations: plain SDC congruence (n vars,
k = 0 only), the restricted-SDC extensions (n+1 and n+2 vars with one
and two pinning equalities), and the double eigendecomposition (2n vars
with n coupling equalities).  Verification is pointwise function
equivalence on sampled points; no QCQP is ever solved here.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.optimize

from . import errors
from .matcore import DEFAULT_TOL, Congruence, SymMat, Tolerances, asmat, f_mat
from .rsdc import rsdc1_construct, rsdc2_construct
from .sdc import sdc_check

__all__ = [
    "QcqpInstance",
    "Reformulation",
    "generate_instance",
    "check_bounded",
    "reformulate",
    "verify_reformulation",
    "homogenize_check",
    "bench",
    "BenchConfig",
]

RESAMPLE_LIMIT = 1000
METHODS = ("sdc", "rsdc1", "rsdc2", "eig")


@dataclass(frozen=True)
class QcqpInstance:
    n: int
    A1: SymMat
    A2: SymMat
    b1: np.ndarray
    b2: np.ndarray
    L: np.ndarray
    meta: dict = field(default_factory=dict)

    def objective(self, x: np.ndarray) -> float:
        return float(x @ self.A1.a @ x + 2.0 * self.b1 @ x)

    def constraint(self, x: np.ndarray) -> float:
        return float(x @ self.A2.a @ x + 2.0 * self.b2 @ x)

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "k": self.meta.get("k"),
                "m": int(self.L.shape[0]),
                "seed": self.meta.get("seed"),
                "A1": self.A1.a.tolist(),
                "A2": self.A2.a.tolist(),
                "b1": self.b1.tolist(),
                "b2": self.b2.tolist(),
                "L": self.L.tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "QcqpInstance":
        d = json.loads(text)
        meta = {"seed": d.get("seed"), "k": d.get("k")}
        return cls(
            n=int(d["n"]),
            A1=SymMat(np.asarray(d["A1"], dtype=float)),
            A2=SymMat(np.asarray(d["A2"], dtype=float)),
            b1=np.asarray(d["b1"], dtype=float),
            b2=np.asarray(d["b2"], dtype=float),
            L=np.asarray(d["L"], dtype=float),
            meta=meta,
        )


@dataclass(frozen=True)
class Reformulation:
    method: str
    dim: int
    quad_obj: np.ndarray
    quad_con: np.ndarray
    lin_obj: np.ndarray
    lin_con: np.ndarray
    poly: np.ndarray
    equalities: tuple
    P: Congruence
    kappa: float
    aux: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "method": self.method,
                "dim": self.dim,
                "quad_obj": self.quad_obj.tolist(),
                "quad_con": self.quad_con.tolist(),
                "lin_obj": self.lin_obj.tolist(),
                "lin_con": self.lin_con.tolist(),
                "poly": self.poly.tolist(),
                "equalities": [list(map(float, r)) for r in self.equalities],
                "P": self.P.P.tolist(),
                "kappa": self.kappa,
                "aux": {k: v for k, v in self.aux.items() if k in ("P1", "P2")},
            }
        )


def recession_witness(L) -> np.ndarray | None:
    """A nonzero direction of the recession cone {d : Ld <= 0}, or None.

    Found by 2n linear programs maximizing +-e_i^T d over the cone
    intersected with the unit box; all optima zero means the cone is
    trivial and the polytope {Lx <= 1} is bounded.
    """
    L = np.asarray(L, dtype=float)
    m, n = L.shape
    for i in range(n):
        for sign in (1.0, -1.0):
            c = np.zeros(n)
            c[i] = -sign  # linprog minimizes
            res = scipy.optimize.linprog(
                c, A_ub=L, b_ub=np.zeros(m), bounds=[(-1, 1)] * n,
                method="highs",
            )
            if not res.success:
                raise errors.SdckitError(f"recession LP failed: {res.message}")
            if -res.fun > 1e-9:
                return np.asarray(res.x, dtype=float)
    return None


def check_bounded(L) -> bool:
    """True when the recession cone {d : Ld <= 0} is trivial."""
    return recession_witness(L) is None


def generate_instance(n: int, k: int, m: int, seed: int) -> QcqpInstance:
    """Random instance with exactly k complex eigenvalue pairs planted.

    An orthogonal V conjugates Diag(sigma, F_2, ..., F_2) and
    Diag(sigma mu, T_1, ..., T_k) with Rademacher signs, normal mu and
    normal 2x2 symmetric blocks; b1, b2, L are standard normal and the
    instance is resampled until the polytope is bounded.
    """
    if 2 * k > n:
        raise ValueError("need 2k <= n")
    rng = np.random.default_rng(seed)
    r = n - 2 * k
    for _ in range(RESAMPLE_LIMIT):
        M = rng.standard_normal((n, n))
        V, _, _ = np.linalg.svd(M)
        sigma = rng.choice([-1.0, 1.0], size=r)
        mu = rng.standard_normal(r)
        xy = rng.standard_normal((k, 2))
        blocks1 = ([np.diag(sigma)] if r else []) + [f_mat(2) for _ in range(k)]
        blocks2 = ([np.diag(sigma * mu)] if r else []) + [
            np.array([[x, y], [y, -x]]) for x, y in xy
        ]
        D1 = scipy.linalg.block_diag(*blocks1) if blocks1 else np.zeros((0, 0))
        D2 = scipy.linalg.block_diag(*blocks2) if blocks2 else np.zeros((0, 0))
        A1 = V.T @ D1 @ V
        A2 = V.T @ D2 @ V
        b1 = rng.standard_normal(n)
        b2 = rng.standard_normal(n)
        L = rng.standard_normal((m, n))
        if check_bounded(L):
            return QcqpInstance(
                n=n,
                A1=SymMat(0.5 * (A1 + A1.T)),
                A2=SymMat(0.5 * (A2 + A2.T)),
                b1=b1,
                b2=b2,
                L=L,
                meta={"seed": seed, "k": k, "generator": 1},
            )
    raise errors.ResampleLimitExceeded(
        f"no bounded polytope within {RESAMPLE_LIMIT} draws"
    )


def reformulate(
    inst: QcqpInstance, method: str, tol: Tolerances = DEFAULT_TOL
) -> Reformulation:
    """Build the diagonal reformulation for the requested method."""
    n = inst.n
    A1, A2 = inst.A1.a, inst.A2.a
    if method == "sdc":
        res = sdc_check([A1, A2], tol)
        if not res.is_sdc:
            raise errors.MethodInapplicable(
                f"pair is not SDC ({res.witness}); sdc reformulation needs k = 0"
            )
        P = res.congruence
        return Reformulation(
            method="sdc",
            dim=n,
            quad_obj=res.diagonals[0],
            quad_con=res.diagonals[1],
            lin_obj=P.P.T @ inst.b1,
            lin_con=P.P.T @ inst.b2,
            poly=inst.L @ P.P,
            equalities=tuple(),
            P=P,
            kappa=P.kappa,
        )
    if method in ("rsdc1", "rsdc2"):
        build = rsdc1_construct if method == "rsdc1" else rsdc2_construct
        try:
            cert = build(A1, A2, tol=tol)
        except errors.SdckitError as exc:
            raise errors.MethodInapplicable(str(exc)) from exc
        d = cert.order_added
        P = cert.congruence
        bt1 = np.concatenate([inst.b1, np.zeros(d)])
        bt2 = np.concatenate([inst.b2, np.zeros(d)])
        Lt = np.hstack([inst.L, np.zeros((inst.L.shape[0], d))])
        dA1 = np.diag(P.P.T @ cert.A_tilde.a @ P.P).copy()
        dA2 = np.diag(P.P.T @ cert.B_tilde.a @ P.P).copy()
        equalities = tuple(P.P[n + i, :].copy() for i in range(d))
        return Reformulation(
            method=method,
            dim=n + d,
            quad_obj=dA1,
            quad_con=dA2,
            lin_obj=P.P.T @ bt1,
            lin_con=P.P.T @ bt2,
            poly=Lt @ P.P,
            equalities=equalities,
            P=P,
            kappa=cert.kappa,
            aux={"certificate": cert},
        )
    if method == "eig":
        w1, P1 = np.linalg.eigh(A1)
        A2t = P1.T @ A2 @ P1
        w2, P2 = np.linalg.eigh(0.5 * (A2t + A2t.T))
        # variables (y, z) with the coupling y = P2 z
        eqs = tuple(
            np.concatenate([row, -P2[i, :]])
            for i, row in enumerate(np.eye(n))
        )
        return Reformulation(
            method="eig",
            dim=2 * n,
            quad_obj=w1,
            quad_con=w2,
            lin_obj=P1.T @ inst.b1,
            lin_con=P1.T @ inst.b2,
            poly=inst.L @ P1,
            equalities=eqs,
            P=Congruence(P1 @ P2),
            kappa=float(np.linalg.cond(P2)),
            aux={"P1": P1.tolist(), "P2": P2.tolist()},
        )
    raise ValueError(f"unknown method {method!r}")


def _polytope_box(L: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-coordinate bounds of the polytope {Lx <= 1}."""
    m, n = L.shape
    lo = np.empty(n)
    hi = np.empty(n)
    for i in range(n):
        for sign, out in ((1.0, hi), (-1.0, lo)):
            c = np.zeros(n)
            c[i] = -sign
            res = scipy.optimize.linprog(
                c, A_ub=L, b_ub=np.ones(m), bounds=[(None, None)] * n,
                method="highs",
            )
            if not res.success:
                raise errors.SdckitError(f"box LP failed: {res.message}")
            out[i] = sign * (-res.fun)
    return lo, hi


def _solve_refined(P: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve P w = b with extended-precision iterative refinement.

    The verification compares values that agree exactly in exact
    arithmetic; an ill-conditioned congruence (1-RSDC at larger k) would
    otherwise cost kappa^2 eps of spurious deviation.
    """
    Pl = P.astype(np.longdouble)
    bl = b.astype(np.longdouble)
    w = np.linalg.solve(P, b).astype(np.longdouble)
    for _ in range(3):
        r = bl - Pl @ w
        w = w + np.linalg.solve(P, r.astype(float)).astype(np.longdouble)
    return w


def _reformulated_values(inst, ref: Reformulation, x: np.ndarray):
    n = inst.n
    if ref.method == "eig":
        P1 = np.asarray(ref.aux["P1"], dtype=float)
        P2 = np.asarray(ref.aux["P2"], dtype=float)
        y = P1.T @ x
        z = P2.T @ y
        obj = float(y @ (ref.quad_obj * y) + 2.0 * ref.lin_obj @ y)
        con = float(z @ (ref.quad_con * z) + 2.0 * ref.lin_con @ y)
        return obj, con
    d = ref.dim - n
    w = _solve_refined(ref.P.P, np.concatenate([x, np.zeros(d)]))
    qo = ref.quad_obj.astype(np.longdouble)
    qc = ref.quad_con.astype(np.longdouble)
    lo = ref.lin_obj.astype(np.longdouble)
    lc = ref.lin_con.astype(np.longdouble)
    obj = float(w @ (qo * w) + 2.0 * lo @ w)
    con = float(w @ (qc * w) + 2.0 * lc @ w)
    return obj, con


def verify_reformulation(
    inst: QcqpInstance, ref: Reformulation, samples: int = 100, seed: int = 0,
    box=None,
) -> float:
    """Max deviation between original and reformulated values.

    Points are drawn uniformly in the polytope's bounding box and mapped
    into the reformulation's variables respecting its equalities.  The
    returned value is the largest absolute difference of objective and
    constraint values relative to the sampled value scale.  A
    precomputed (lo, hi) box can be passed to amortize the bound LPs
    across repeated verifications of one instance.
    """
    rng = np.random.default_rng(seed)
    lo, hi = box if box is not None else _polytope_box(inst.L)
    worst = 0.0
    scale = 1.0
    for _ in range(samples):
        x = lo + (hi - lo) * rng.uniform(size=inst.n)
        o0, c0 = inst.objective(x), inst.constraint(x)
        o1, c1 = _reformulated_values(inst, ref, x)
        worst = max(worst, abs(o0 - o1), abs(c0 - c1))
        scale = max(scale, abs(o0), abs(c0))
    return worst / scale


def homogenize_check(
    A_list, b_list, c_list, tol: Tolerances = DEFAULT_TOL, seed: int = 0
) -> tuple[bool, bool]:
    """Homogenization implication data: (premise, conclusion).

    premise: the bordered forms Q_i = [[A_i, b_i], [b_i^T, c_i]]
    together with the corner unit form are SDC.  conclusion: {A_i} is
    SDC.  When the A-span contains a positive definite element, premise
    implies conclusion; the caller asserts the implication.
    """
    mats = [asmat(a) for a in A_list]
    if not (len(mats) == len(b_list) == len(c_list)):
        raise errors.OrderMismatch("A, b, c lists must align")
    n = mats[0].shape[0]
    rng = np.random.default_rng(seed)
    found_pd = False
    for trial in range(64):
        if trial < len(mats):
            c = np.zeros(len(mats))
            c[trial] = 1.0
        else:
            c = rng.standard_normal(len(mats))
        S = sum(ci * Ai for ci, Ai in zip(c, mats))
        vals = np.linalg.eigvalsh(0.5 * (S + S.T))
        if np.min(vals) > tol.rank_tol * max(1.0, float(np.max(np.abs(vals)))):
            found_pd = True
            break
        if np.max(vals) < -tol.rank_tol * max(1.0, float(np.max(np.abs(vals)))):
            found_pd = True  # negative definite works equally well
            break
    if not found_pd:
        raise errors.NoPdElement("no definite element found in the A-span")

    Qs = []
    for A, b, cc in zip(mats, b_list, c_list):
        b = np.asarray(b, dtype=float)
        Q = np.zeros((n + 1, n + 1))
        Q[:n, :n] = A
        Q[:n, n] = b
        Q[n, :n] = b
        Q[n, n] = float(cc)
        Qs.append(Q)
    corner = np.zeros((n + 1, n + 1))
    corner[n, n] = 1.0
    premise = sdc_check(Qs + [corner], tol).is_sdc
    conclusion = sdc_check(mats, tol).is_sdc
    return premise, conclusion


@dataclass(frozen=True)
class BenchConfig:
    n_values: tuple
    k_values: tuple
    seeds: int
    methods: tuple = METHODS
    m: int = 100
    samples: int = 100
    n_jobs: int = 1


def _bench_cell(args):
    n, k, seed, methods, m, samples, tol = args
    rows = []
    t0 = time.perf_counter()
    try:
        inst = generate_instance(n, k, m, seed)
    except errors.SdckitError as exc:
        return [
            {
                "n": n, "k": k, "seed": seed, "method": meth, "dim": None,
                "kappa": None, "deviation": None, "eig_residual": None,
                "gen_ms": None, "reform_ms": None, "error": str(exc),
            }
            for meth in methods
        ]
    gen_ms = 1000.0 * (time.perf_counter() - t0)
    for meth in methods:
        row = {
            "n": n, "k": k, "seed": seed, "method": meth,
            "gen_ms": round(gen_ms, 3), "error": "",
            "dim": None, "kappa": None, "deviation": None,
            "eig_residual": None, "reform_ms": None,
        }
        t1 = time.perf_counter()
        try:
            ref = reformulate(inst, meth, tol)
            row["reform_ms"] = round(1000.0 * (time.perf_counter() - t1), 3)
            row["dim"] = ref.dim
            row["kappa"] = ref.kappa
            row["deviation"] = verify_reformulation(inst, ref, samples, seed)
            cert = ref.aux.get("certificate")
            row["eig_residual"] = cert.eig_residual if cert is not None else 0.0
        except errors.SdckitError as exc:
            row["error"] = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    return rows


def bench(config: BenchConfig, tol: Tolerances = DEFAULT_TOL) -> dict:
    """Grid run: per-cell generation, reformulation and verification.

    Returns {"rows": [...], "medians": [...], "csv": text}; per-cell
    failures are recorded in their rows and the run continues.  Cells
    own independent seeds, so any execution order gives identical
    output; rows are ordered by (n, k, seed, method).
    """
    cells = [
        (n, k, seed, tuple(config.methods), config.m, config.samples, tol)
        for n in config.n_values
        for k in config.k_values
        for seed in range(config.seeds)
    ]
    rows = []
    if config.n_jobs > 1:
        import concurrent.futures

        with concurrent.futures.ProcessPoolExecutor(config.n_jobs) as pool:
            # map preserves cell order, so reports are identical under
            # any parallelism
            for cell_rows in pool.map(_bench_cell, cells):
                rows.extend(cell_rows)
    else:
        for cell in cells:
            rows.extend(_bench_cell(cell))

    medians = []
    for n in config.n_values:
        for k in config.k_values:
            for meth in config.methods:
                sel = [
                    r for r in rows
                    if r["n"] == n and r["k"] == k and r["method"] == meth
                    and r["kappa"] is not None
                ]
                if not sel:
                    continue
                medians.append(
                    {
                        "n": n, "k": k, "method": meth, "cells": len(sel),
                        "median_kappa": float(np.median([r["kappa"] for r in sel])),
                        "median_deviation": float(
                            np.median([r["deviation"] for r in sel])
                        ),
                    }
                )

    buf = io.StringIO()
    fields = [
        "n", "k", "seed", "method", "dim", "kappa", "deviation",
        "eig_residual", "gen_ms", "reform_ms", "error",
    ]
    writer = csv.DictWriter(buf, fieldnames=fields)
    writer.writeheader()
    for r in rows:
        writer.writerow({f: r.get(f) for f in fields})
    return {"rows": rows, "medians": medians, "csv": buf.getvalue()}
