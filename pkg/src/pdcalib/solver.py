"""Minimum-norm least squares followed by a null-space QP for bounded micromoduli.

Step one computes the pseudoinverse solution c of min |x c - target|.
Step two finds the point c + v of least Euclidean norm with x v = 0 and
c + v >= lower_bound, which leaves the residual untouched.

Two realizations of step two are provided:

``"dual"`` (default)
    Semi-smooth Newton iteration on the concave dual of the projection
    problem. Its active set lives in the row space of x (at most 15
    dimensions), so each iteration is cheap regardless of the bond count.
``"nullspace"``
    Parametrizes v = Z y over an orthonormal null-space basis Z and solves
    the least-distance problem min |y| s.t. Z y >= lower_bound - c through a
    Lawson-Hanson NNLS dual. Exact infeasibility detection; slower.

If the dual iteration fails to converge within ``max_iterations`` the
null-space method decides the case.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .assembly import CoefficientSystem

log = logging.getLogger(__name__)

_EPS = np.finfo(float).eps


class SolverInfeasible(RuntimeError):
    """No micromoduli satisfy the bounds while reproducing the least-squares fit."""

    def __init__(self, message: str, diagnostics: Optional[dict] = None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


@dataclass(frozen=True)
class SolverOptions:
    rank_tolerance: Optional[float] = None
    lower_bound: Union[float, np.ndarray] = 0.0
    kkt_tolerance: float = 1e-8
    max_iterations: Optional[int] = None
    method: str = "dual"

    def __post_init__(self):
        lb = np.asarray(self.lower_bound, dtype=float)
        if not np.all(np.isfinite(lb)):
            raise ValueError("lower bound must be finite")
        if self.rank_tolerance is not None and not self.rank_tolerance > 0:
            raise ValueError("rank tolerance must be positive")
        if not self.kkt_tolerance > 0:
            raise ValueError("KKT tolerance must be positive")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.method not in ("dual", "nullspace"):
            raise ValueError(f"unknown method {self.method!r}")

    def rtol(self, shape) -> float:
        if self.rank_tolerance is not None:
            return self.rank_tolerance
        return _EPS * max(shape)

    def bounds(self, m: int) -> np.ndarray:
        lb = np.asarray(self.lower_bound, dtype=float)
        if lb.ndim == 0:
            return np.full(m, float(lb))
        if lb.shape != (m,):
            raise ValueError(f"lower bound has {lb.size} entries, expected {m}")
        return lb.copy()

    def iteration_limit(self, m: int) -> int:
        return self.max_iterations if self.max_iterations is not None else 50 * m

    def describe(self) -> dict:
        lb = np.asarray(self.lower_bound, dtype=float)
        return {
            "rank_tolerance": self.rank_tolerance,
            "lower_bound": float(lb) if lb.ndim == 0 else lb.tolist(),
            "kkt_tolerance": self.kkt_tolerance,
            "max_iterations": self.max_iterations,
            "method": self.method,
        }


@dataclass(frozen=True, eq=False)
class MicromoduliSolution:
    c: np.ndarray
    residual_norm: float
    solution_norm: float
    active_set_size: int
    converged: bool
    rank: int
    iterations: int = 0
    method: str = "dual"
    unconstrained_min: float = 0.0
    kkt: dict = field(default_factory=dict)


def _svd(sys: CoefficientSystem, opts: SolverOptions, full: bool = False):
    u, s, vt = np.linalg.svd(sys.x, full_matrices=full)
    if s.size == 0 or s[0] == 0:
        return u, s, vt, 0
    r = int(np.sum(s > opts.rtol(sys.x.shape) * s[0]))
    return u, s, vt, r


def min_norm_least_squares(sys: CoefficientSystem, opts: Optional[SolverOptions] = None) -> np.ndarray:
    """Pseudoinverse solution of x c ~ target (may contain negative entries)."""
    opts = opts or SolverOptions()
    u, s, vt, r = _svd(sys, opts)
    if r == 0:
        return np.zeros(sys.bond_count)
    return vt[:r].T @ ((u[:, :r].T @ sys.target) / s[:r])


def null_space_basis(sys: CoefficientSystem, opts: Optional[SolverOptions] = None) -> np.ndarray:
    """Orthonormal basis (M x (M - rank)) of the null space of x."""
    opts = opts or SolverOptions()
    _, _, vt, r = _svd(sys, opts, full=True)
    return vt[r:].T.copy()


def nnls(a: np.ndarray, b: np.ndarray, maxiter: Optional[int] = None, tol: Optional[float] = None):
    """Lawson-Hanson active-set solution of min |a x - b| subject to x >= 0.

    Returns ``(x, residual_norm)``. Raises RuntimeError when the inner loop
    exceeds ``maxiter`` (default 3 n).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = a.shape
    if maxiter is None:
        maxiter = 3 * n
    if tol is None:
        tol = 10 * _EPS * np.abs(a).sum(axis=0).max(initial=0.0) * max(m, n)
    x = np.zeros(n)
    passive = np.zeros(n, dtype=bool)
    w = a.T @ b
    it = 0

    def _ls(mask):
        s = np.zeros(n)
        s[mask] = np.linalg.lstsq(a[:, mask], b, rcond=None)[0]
        return s

    while (~passive).any() and np.max(np.where(passive, -np.inf, w)) > tol:
        j = int(np.argmax(np.where(passive, -np.inf, w)))
        passive[j] = True
        s = _ls(passive)
        while passive.any() and s[passive].min() <= 0:
            it += 1
            if it > maxiter:
                raise RuntimeError("nnls: iteration limit reached")
            blocking = passive & (s <= 0)
            alpha = np.min(x[blocking] / (x[blocking] - s[blocking]))
            x = x + alpha * (s - x)
            passive &= x > tol
            x[~passive] = 0.0
            s = _ls(passive)
        x = s
        w = a.T @ (b - a @ x)
    return x, float(np.linalg.norm(a @ x - b))


def _dual_projection(A, d, lb, maxiter):
    """min 1/2 |u|^2 s.t. A u = d, u >= lb, for A with orthonormal rows.

    Returns (u, mu, iterations) or None when the iteration does not converge.
    The optimal u equals max(A^T mu, lb) for the dual maximizer mu.
    """
    r = A.shape[0]
    scale = max(np.linalg.norm(d), np.linalg.norm(A @ lb), np.linalg.norm(lb) * 1e-3, 1e-300)
    gtol = 1e-13 * scale

    def evaluate(mu):
        t = A.T @ mu
        u = np.maximum(t, lb)
        value = mu @ d + np.sum(0.5 * u * u - t * u)
        return value, d - A @ u, u, t

    mu = d.copy()
    value, grad, u, t = evaluate(mu)
    for it in range(1, maxiter + 1):
        if np.linalg.norm(grad) <= gtol:
            return u, mu, it - 1
        free = t > lb
        af = A[:, free]
        h = af @ af.T
        h[np.diag_indices(r)] += 1e-12 * max(np.trace(h) / r, 1.0)
        step = np.linalg.solve(h, grad)
        slope = grad @ step
        s = 1.0
        while True:
            trial = evaluate(mu + s * step)
            # allow for rounding in the objective once the iteration has converged locally
            if trial[0] >= value + 1e-4 * s * slope - 16 * _EPS * abs(value):
                break
            s *= 0.5
            if s < 1e-14:
                return None
        mu = mu + s * step
        value, grad, u, t = trial
        if not np.isfinite(value) or np.linalg.norm(mu) > 1e15 * (1 + np.linalg.norm(d)):
            return None
    if np.linalg.norm(grad) <= gtol:
        return u, mu, maxiter
    return None


def _nullspace_ldp(c, z, lb, maxiter):
    """min |c + z y| s.t. c + z y >= lb with c orthogonal to range(z); None if infeasible."""
    h = lb - c
    k = z.shape[1]
    if k == 0:
        return (c.copy(), 0) if np.all(h <= 0) else None
    e = np.vstack([z.T, h[None, :]])
    f = np.zeros(k + 1)
    f[-1] = 1.0
    w, _ = nnls(e, f, maxiter=maxiter)
    res = e @ w - f
    if np.linalg.norm(res) <= 1e-10 or abs(res[-1]) <= 1e-12:
        return None
    y = -res[:k] / res[-1]
    return c + z @ y, int(np.count_nonzero(w))


def _certainly_infeasible(a, c, lb, maxiter) -> bool:
    """True when no u >= lb satisfies a u = a c.

    Shifting by lb turns this into non-negative least squares on the
    rank-sized system, whose passive set never exceeds the rank; a residual
    clearly above roundoff certifies infeasibility.
    """
    d = a @ (c - lb)
    scale = np.linalg.norm(d)
    if scale == 0:
        return False
    try:
        _, res = nnls(a, d, maxiter=maxiter)
    except RuntimeError:
        return False
    return res > 1e-9 * scale


def check_kkt(sys: CoefficientSystem, c_star: np.ndarray, lb: np.ndarray, opts: SolverOptions) -> dict:
    """Optimality residuals of c_star for min |c| s.t. x c = x c_ls, c >= lb.

    Stationarity requires c_star = x^T mu + lam with lam >= 0 and
    lam_i (c_star_i - lb_i) = 0. mu is recovered by least squares on the
    free bonds and lam from the bound bonds.
    """
    _, s, vt, r = _svd(sys, opts)
    a = vt[:r]
    norm = max(np.linalg.norm(c_star), 1e-300)
    tol = opts.kkt_tolerance * max(np.abs(c_star).max(initial=0.0), 1.0)
    at_bound = c_star - lb <= tol
    free = ~at_bound
    if free.any():
        mu = np.linalg.lstsq(a[:, free].T, c_star[free], rcond=None)[0]
    else:
        mu = np.zeros(r)
    lam = c_star - a.T @ mu
    stationarity = float(np.linalg.norm(lam[free]) / norm)
    dual_feasibility = float(max(0.0, -lam[at_bound].min(initial=0.0)) / norm)
    complementarity = float(abs(np.sum(lam * (c_star - lb))) / norm**2)
    primal = float(max(0.0, (lb - c_star).max(initial=0.0)))
    return {
        "stationarity": stationarity,
        "dual_feasibility": dual_feasibility,
        "complementarity": complementarity,
        "bound_violation": primal,
        "ok": bool(
            stationarity <= opts.kkt_tolerance
            and dual_feasibility <= opts.kkt_tolerance
            and complementarity <= opts.kkt_tolerance
            and primal <= opts.kkt_tolerance * max(np.abs(c_star).max(initial=0.0), 1.0)
        ),
    }


def constrained_min_norm(sys: CoefficientSystem, opts: Optional[SolverOptions] = None) -> MicromoduliSolution:
    """Least-norm micromoduli above the lower bound with the least-squares residual.

    Raises SolverInfeasible when the bound cannot be met without changing the
    least-squares fit.
    """
    opts = opts or SolverOptions()
    m = sys.bond_count
    lb = opts.bounds(m)
    u_svd, s, vt, r = _svd(sys, opts)
    if r == 0:
        c = np.zeros(m)
    else:
        c = vt[:r].T @ ((u_svd[:, :r].T @ sys.target) / s[:r])
    base_residual = float(np.linalg.norm(sys.x @ c - sys.target))
    maxiter = opts.iteration_limit(m)
    diagnostics = {"bond_count": m, "rank": r, "unconstrained_min": float(c.min(initial=0.0))}

    c_star = None
    iterations = 0
    method = opts.method
    if np.all(c >= lb):
        # the pseudoinverse solution already satisfies the bounds
        c_star = c.copy()
    elif r > 0 and _certainly_infeasible(vt[:r], c, lb, maxiter):
        raise SolverInfeasible(
            "infeasible: the neighborhood cannot reproduce the least-squares stiffness "
            f"with micromoduli >= lower bound ({m} bonds, rank {r})",
            diagnostics,
        )
    elif opts.method == "dual" and r > 0:
        a = vt[:r]
        out = _dual_projection(a, a @ c, lb, maxiter)
        if out is not None:
            c_star, _, iterations = out
        else:
            log.info("dual iteration did not converge; deciding feasibility in the null space")
            method = "nullspace"
    else:
        method = "nullspace"

    if c_star is None:
        z = null_space_basis(sys, opts)
        try:
            out = _nullspace_ldp(c, z, lb, maxiter)
        except RuntimeError as exc:
            raise SolverInfeasible(f"no converged solution: {exc}", diagnostics) from exc
        if out is None:
            raise SolverInfeasible(
                "infeasible: the neighborhood cannot reproduce the least-squares stiffness "
                f"with micromoduli >= lower bound ({m} bonds, rank {r})",
                diagnostics,
            )
        c_star, iterations = out
        # clip rounding below the bound
        c_star = np.maximum(c_star, lb)

    residual = float(np.linalg.norm(sys.x @ c_star - sys.target))
    if abs(residual - base_residual) > 1e-6 * max(base_residual, np.linalg.norm(sys.target)):
        raise SolverInfeasible(
            "infeasible: constrained solution changes the least-squares residual "
            f"({residual:.6g} vs {base_residual:.6g})",
            diagnostics,
        )
    kkt = check_kkt(sys, c_star, lb, opts)
    tol = opts.kkt_tolerance * max(np.abs(c_star).max(initial=0.0), 1.0)
    return MicromoduliSolution(
        c=c_star,
        residual_norm=residual,
        solution_norm=float(np.linalg.norm(c_star)),
        active_set_size=int(np.sum(c_star - lb <= tol)),
        converged=True,
        rank=r,
        iterations=iterations,
        method=method,
        unconstrained_min=float(c.min(initial=0.0)),
        kkt=kkt,
    )
