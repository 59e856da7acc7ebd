"""Incidence and Laplacian assembly, singular solves, and induced norms.

The signed incidence matrix B is n x m with B[tail, e] = -1 and
B[head, e] = +1 for edge e = (tail, head). The Laplacian L = B W B^T is
solved only on the sum-zero subspace; the pseudo-inverse is never formed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import scipy.sparse as sp

from .errors import ConvergenceError, DisconnectedError
from .graphs import Multigraph

__all__ = [
    "SolveReport",
    "incidence",
    "laplacian",
    "solve_laplacian",
    "induced_norm_1",
    "induced_norm_inf",
    "induced_pnorm_nonneg",
    "write_coordinate_text",
    "read_coordinate_text",
]

Matrix = Union[np.ndarray, sp.sparray]


@dataclass(frozen=True)
class SolveReport:
    """Solution vector plus the residual and iteration count that produced it."""

    solution: np.ndarray
    residual_norm: float
    iterations: int


def incidence(g: Multigraph) -> sp.csr_array:
    """Signed incidence matrix, n x m, column e carrying -1 at the tail and +1
    at the head."""
    cols = np.arange(g.m, dtype=np.int64)
    rows = np.concatenate([g.tails, g.heads])
    vals = np.concatenate([-np.ones(g.m), np.ones(g.m)])
    mat = sp.coo_array((vals, (rows, np.concatenate([cols, cols]))), shape=(g.n, g.m))
    out = mat.tocsr()
    out.sum_duplicates()
    out.eliminate_zeros()
    return out

def laplacian(g: Multigraph) -> sp.csr_array:
    """Weighted Laplacian B W B^T, assembled directly (parallel edges merge)."""
    rows = np.concatenate([g.tails, g.heads, g.tails, g.heads])
    cols = np.concatenate([g.tails, g.heads, g.heads, g.tails])
    vals = np.concatenate([g.weights, g.weights, -g.weights, -g.weights])
    out = sp.coo_array((vals, (rows, cols)), shape=(g.n, g.n)).tocsr()
    out.sum_duplicates()
    out.eliminate_zeros()
    return out


def _iteration_cap(g: Multigraph, max_iter: Optional[int]) -> int:
    if max_iter is not None:
        return max_iter
    # crude condition estimate; only the order of magnitude matters for a cap
    w = g.weights
    kappa_hat = g.n * (float(w.max()) / float(w.min())) if g.m else 1.0
    return max(10_000, int(np.ceil(10 * g.n * np.sqrt(kappa_hat))))


def solve_laplacian(
    g: Multigraph,
    b: np.ndarray,
    tol: float = 1e-10,
    max_iter: Optional[int] = None,
) -> SolveReport:
    """Solve L x = b on the sum-zero subspace with 1^T x = 0.

    Preconditioned conjugate gradient with the diagonal (weighted degree)
    preconditioner, re-orthogonalized against the all-ones vector every
    iteration. b is projected onto the sum-zero subspace first; drift beyond
    10 * tol * ||b|| is an error. Convergence means the true residual
    satisfies ||L x - b|| <= tol * ||b||.

    The default iteration cap is max(1e4, 10 n sqrt(kappa_hat)) with
    kappa_hat = n * w_max / w_min, a deliberately crude condition-number
    heuristic; hitting the cap raises a convergence error carrying the best
    iterate.
    """
    if not g.is_connected:
        raise DisconnectedError("Laplacian solve needs a connected graph")
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (g.n,):
        raise ValueError(f"demand must have length n={g.n}")
    nb = float(np.linalg.norm(b))
    if nb == 0.0:
        return SolveReport(np.zeros(g.n), 0.0, 0)
    drift = abs(float(b.sum()))
    if drift > 10.0 * tol * nb:
        raise ValueError(
            f"demand must sum to zero (|sum| = {drift:.3e} vs allowance "
            f"{10.0 * tol * nb:.3e})"
        )
    b = b - b.mean()
    nb = float(np.linalg.norm(b))
    if nb == 0.0:
        return SolveReport(np.zeros(g.n), 0.0, 0)

    lap = laplacian(g)
    dinv = 1.0 / g.weighted_degrees
    cap = _iteration_cap(g, max_iter)

    x = np.zeros(g.n)
    r = b.copy()
    z = dinv * r
    z -= z.mean()
    p = z.copy()
    rz = float(r @ z)
    best_x = x.copy()
    best_res = nb
    target = tol * nb
    iterations = 0
    while iterations < cap:
        iterations += 1
        lp = lap @ p
        denom = float(p @ lp)
        if denom <= 0.0:
            break
        alpha = rz / denom
        x += alpha * p
        r -= alpha * lp
        x -= x.mean()
        r -= r.mean()
        res = float(np.linalg.norm(r))
        if res < best_res:
            best_res = res
            best_x = x.copy()
        if res <= target:
            true_r = b - lap @ x
            true_res = float(np.linalg.norm(true_r))
            if true_res <= target:
                x -= x.mean()
                return SolveReport(x, true_res, iterations)
            r = true_r
            r -= r.mean()
        z = dinv * r
        z -= z.mean()
        rz_new = float(r @ z)
        beta = rz_new / rz
        rz = rz_new
        p = z + beta * p
    true_res = float(np.linalg.norm(b - lap @ best_x))
    raise ConvergenceError(
        f"conjugate gradient missed tolerance {tol:g} after {iterations} "
        f"iterations (residual {true_res:.3e})",
        best=best_x,
        residual=true_res,
        iterations=iterations,
    )


def _abs_axis_sums(mat: Matrix, axis: int) -> np.ndarray:
    if sp.issparse(mat):
        sums = np.abs(mat).sum(axis=axis)
        return np.asarray(sums).ravel()
    return np.abs(np.asarray(mat)).sum(axis=axis)


def induced_norm_1(mat: Matrix) -> float:
    """Exact 1 -> 1 induced norm: maximum absolute column sum."""
    sums = _abs_axis_sums(mat, axis=0)
    return float(sums.max()) if sums.size else 0.0


def induced_norm_inf(mat: Matrix) -> float:
    """Exact inf -> inf induced norm: maximum absolute row sum."""
    sums = _abs_axis_sums(mat, axis=1)
    return float(sums.max()) if sums.size else 0.0


def induced_pnorm_nonneg(
    mat: Matrix,
    p: float,
    tol: float = 1e-8,
    max_iter: int = 100_000,
) -> float:
    """p -> p induced norm of an entrywise nonnegative matrix.

    Nonlinear power iteration x <- normalize(psi_q(M^T psi_p(M x))) with
    psi_p(v) = v^(p-1) and q the dual exponent, started from the uniform
    positive vector; for nonnegative matrices the Rayleigh-style estimate
    ||M x||_p climbs monotonically to the norm. If the estimate stalls before
    iteration 50 the iteration restarts once from a deterministically
    perturbed start (guards reducible matrices). p within 1e-9 of 2 runs the
    p = 2 path; p outside (1, inf) falls back to the exact row/column-sum
    formulas.
    """
    if sp.issparse(mat):
        data = mat.data
        if data.size and float(data.min()) < 0.0:
            raise ValueError("matrix must be entrywise nonnegative")
        dense_or_sparse = mat
        ncols = mat.shape[1]
    else:
        arr = np.asarray(mat, dtype=np.float64)
        if arr.size and float(arr.min()) < 0.0:
            raise ValueError("matrix must be entrywise nonnegative")
        dense_or_sparse = arr
        ncols = arr.shape[1]
    if np.isinf(p):
        return induced_norm_inf(dense_or_sparse)
    if p <= 1.0:
        if p == 1.0:
            return induced_norm_1(dense_or_sparse)
        raise ValueError("p must be in [1, inf]")
    if abs(p - 2.0) <= 1e-9:
        p = 2.0
    if ncols == 0:
        return 0.0

    q = p / (p - 1.0)
    mat_t = dense_or_sparse.T

    def pnorm(v):
        return float(np.power(v, p).sum() ** (1.0 / p))

    x = np.full(ncols, 1.0)
    x /= pnorm(x)
    est_prev = 0.0
    streak = 0
    restarted = False
    for it in range(1, max_iter + 1):
        y = dense_or_sparse @ x
        est = pnorm(y)
        if est == 0.0:
            return 0.0
        yn = y / y.max()
        z = np.power(yn, p - 1.0)
        w = mat_t @ z
        if w.max() > 0.0:
            wn = w / w.max()
            x = np.power(wn, q - 1.0)
            x /= pnorm(x)
        rel = abs(est - est_prev) / est
        est_prev = est
        if rel <= tol / 10.0:
            streak += 1
        else:
            streak = 0
        if streak >= 3:
            if it < 50 and not restarted:
                restarted = True
                streak = 0
                x = x + 1e-6 * (1.0 + np.arange(ncols)) / ncols
                x /= pnorm(x)
                continue
            return est
    raise ConvergenceError(
        f"p-norm power iteration missed tolerance {tol:g} in {max_iter} iterations",
        best=est_prev,
        iterations=max_iter,
    )


def write_coordinate_text(mat: Matrix, path) -> None:
    """Serialize a matrix as 'rows cols nnz' then one 'row col value' triplet
    per line (debugging format)."""
    coo = sp.coo_array(mat)
    coo.sum_duplicates()
    coo.eliminate_zeros()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w") as fh:
        fh.write(f"{coo.shape[0]} {coo.shape[1]} {coo.nnz}\n")
        for i in order:
            fh.write(f"{int(coo.row[i])} {int(coo.col[i])} {repr(float(coo.data[i]))}\n")


def read_coordinate_text(path) -> sp.csr_array:
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append(line.split())
    if not rows:
        raise ValueError(f"{path}: empty matrix file")
    nr, nc, nnz = (int(tok) for tok in rows[0])
    if len(rows) - 1 != nnz:
        raise ValueError(f"{path}: header says {nnz} entries, found {len(rows) - 1}")
    rr = np.array([int(r[0]) for r in rows[1:]], dtype=np.int64)
    cc = np.array([int(r[1]) for r in rows[1:]], dtype=np.int64)
    vv = np.array([float(r[2]) for r in rows[1:]], dtype=np.float64)
    out = sp.coo_array((vv, (rr, cc)), shape=(nr, nc)).tocsr()
    out.sum_duplicates()
    out.eliminate_zeros()
    return out
