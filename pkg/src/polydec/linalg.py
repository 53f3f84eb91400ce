"""Thin sparse arithmetic and linear solves on top of scipy.sparse.

Matrices are ``scipy.sparse`` arrays in CSR form; arithmetic helpers only add
dimension checks so that mistakes surface as :class:`DimensionMismatch`
instead of broadcasting surprises.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp
import scipy.sparse.linalg as spla

log = logging.getLogger(__name__)

METHODS = ("direct", "iterative-symmetric", "least-squares")


class DimensionMismatch(ValueError):
    pass


class SingularMatrix(np.linalg.LinAlgError):
    pass


class NoConvergence(RuntimeError):
    """Iteration budget exhausted; ``x`` and ``report`` hold the best iterate."""

    def __init__(self, msg: str, x: np.ndarray, report: "SolveReport"):
        super().__init__(msg)
        self.x = x
        self.report = report


@dataclass
class SolveReport:
    method: str
    iterations: int
    residual: float            # relative: ||A x - b|| / ||b||
    converged: bool
    history: list = field(default_factory=list)


def as_csr(M) -> sp.csr_matrix:
    """Float CSR copy with sorted indices and duplicates summed."""
    M = sp.csr_matrix(M, dtype=float)
    M.sum_duplicates()
    M.sort_indices()
    return M


def matvec(M, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"matrix {M.shape} times vector of length {x.shape[0]}")
    return M @ x


def transpose(M) -> sp.csr_matrix:
    return as_csr(M.T)


def multiply(M, N) -> sp.csr_matrix:
    if M.shape[1] != N.shape[0]:
        raise DimensionMismatch(f"cannot multiply {M.shape} by {N.shape}")
    return as_csr(M @ N)


def add(M, N) -> sp.csr_matrix:
    if M.shape != N.shape:
        raise DimensionMismatch(f"cannot add {M.shape} and {N.shape}")
    return as_csr(M + N)


def scale(M, c: float) -> sp.csr_matrix:
    return as_csr(float(c) * M)


def _rel_residual(A, x, b, bnorm) -> float:
    return float(np.linalg.norm(A @ x - b) / bnorm)


def solve(A, b, method: str = "direct", tol: float = 1e-10, max_iter: int | None = None):
    """Solve ``A x = b``; returns ``(x, SolveReport)``.

    ``direct`` factorizes (SuperLU), ``iterative-symmetric`` runs MINRES for
    symmetric (semi)definite systems, ``least-squares`` runs LSMR and returns
    the minimal-norm least-squares solution.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    A = as_csr(A)
    b = np.asarray(b, dtype=float)
    if b.shape != (A.shape[0],):
        raise DimensionMismatch(f"rhs of shape {b.shape} for matrix {A.shape}")
    if not (np.all(np.isfinite(A.data)) and np.all(np.isfinite(b))):
        raise ValueError("solve needs finite A and b")
    n = A.shape[1]
    max_iter = 10 * n if max_iter is None else int(max_iter)
    bnorm = float(np.linalg.norm(b)) or 1.0

    if method == "direct":
        if A.shape[0] != A.shape[1]:
            raise DimensionMismatch("direct solve needs a square matrix")
        try:
            x = spla.splu(A.tocsc()).solve(b)
        except RuntimeError as exc:     # "Factor is exactly singular"
            raise SingularMatrix(str(exc)) from None
        res = _rel_residual(A, x, b, bnorm)
        if not np.isfinite(res):
            raise SingularMatrix("factorization produced non-finite values")
        return x, SolveReport(method, 1, res, res <= max(tol, 1e-8))

    if method == "iterative-symmetric":
        if A.shape[0] != A.shape[1]:
            raise DimensionMismatch("iterative-symmetric solve needs a square matrix")
        history = [1.0 if np.any(b) else 0.0]

        def track(xk):
            history.append(_rel_residual(A, xk, b, bnorm))

        # MINRES stops on its own residual estimate; restart from the iterate
        # until the true relative residual meets tol or the budget runs out
        x = np.zeros(n)
        res = _rel_residual(A, x, b, bnorm)
        while res > tol and len(history) - 1 < max_iter:
            budget = max_iter - (len(history) - 1)
            x, _ = spla.minres(A, b, x0=x, rtol=tol, maxiter=budget, callback=track)
            before, res = res, _rel_residual(A, x, b, bnorm)
            if res >= before:
                break
        report = SolveReport(method, len(history) - 1, res, res <= tol, history)
    else:
        x, istop, itn = spla.lsmr(A, b, atol=tol, btol=tol, maxiter=max_iter)[:3]
        res = _rel_residual(A, x, b, bnorm)
        history = [res]
        # LSMR's test includes ||A|| ||x||, which is loose for large-norm A.
        # Correct with the residual; updates stay in range(A^T), so the
        # minimal-norm solution is kept.
        while res > tol and itn < max_iter:
            dx, istop, k = spla.lsmr(A, b - A @ x, atol=tol, btol=tol,
                                     maxiter=max_iter - itn)[:3]
            itn += k
            before, res = res, _rel_residual(A, x + dx, b, bnorm)
            if res >= before:
                res = before
                break
            x = x + dx
            history.append(res)
            if res > 0.5 * before:
                break
        # istop 1: Ax = b solved; 2: least-squares optimum reached
        report = SolveReport(method, int(itn), res, res <= tol or istop in (1, 2, 4, 5),
                             history)
    if not report.converged:
        raise NoConvergence(f"{method} stopped after {report.iterations} iterations "
                            f"with relative residual {res:.3e}", x, report)
    return x, report


# -- Matrix Market -------------------------------------------------------------

def write_mtx(path, M, comment: str = "") -> None:
    scipy.io.mmwrite(str(path), sp.coo_matrix(M), comment=comment, precision=17)


def read_mtx(path) -> sp.csr_matrix:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(path)
    return as_csr(scipy.io.mmread(str(path)))
