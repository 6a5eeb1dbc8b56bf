"""Dense Levenberg-Marquardt least squares.

Small and self-contained on purpose: every fit in this package runs through
lm_minimize so the convergence rules stay in one place. Residual functions
must return real 1-D arrays; complex data is fit by stacking real and
imaginary parts.

Convergence: an accepted step whose relative size and relative cost
decrease are both below ``tol`` (default 1e-10), or a rejected step that
has shrunk below ``tol``. Hard cap of 200 iterations. Singular normal
equations escalate the damping; if damping maxes out the result is
returned with ``converged=False`` rather than raising.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_ITER_DEFAULT = 200
TOL_DEFAULT = 1e-10
_LAMBDA_INIT = 1e-3
_LAMBDA_MAX = 1e12
_TINY = 1e-300


@dataclass
class FitResult:
    """Optimizer output: named parameter vector plus diagnostics."""

    names: list[str]
    params: np.ndarray
    errors: np.ndarray
    covariance: np.ndarray
    iterations: int
    converged: bool
    chi2: float
    message: str = ""

    def param(self, name: str) -> float:
        return float(self.params[self.names.index(name)])

    def error(self, name: str) -> float:
        return float(self.errors[self.names.index(name)])

    def to_dict(self) -> dict:
        def clean(x):
            x = float(x)
            return x if np.isfinite(x) else None

        return {
            "params": {n: clean(v) for n, v in zip(self.names, self.params)},
            "errors": {n: clean(e) for n, e in zip(self.names, self.errors)},
            "chi2": clean(self.chi2),
            "converged": bool(self.converged),
            "iterations": int(self.iterations),
            "message": self.message,
        }


def numeric_jacobian(fn, x, args=(), central: bool = False, rel_step: float | None = None):
    """Finite-difference Jacobian of a residual function at x."""
    x = np.asarray(x, dtype=float)
    if rel_step is None:
        rel_step = 6.06e-6 if central else 1.49e-8  # eps**(1/3), sqrt(eps)
    r0 = None if central else np.asarray(fn(x, *args), dtype=float)
    cols = []
    for i in range(x.size):
        h = rel_step * max(abs(x[i]), 1.0)
        xp = x.copy()
        xp[i] += h
        rp = np.asarray(fn(xp, *args), dtype=float)
        if central:
            xm = x.copy()
            xm[i] -= h
            rm = np.asarray(fn(xm, *args), dtype=float)
            cols.append((rp - rm) / (2.0 * h))
        else:
            cols.append((rp - r0) / h)
    return np.column_stack(cols)


def _covariance(jac: np.ndarray, chi2: float) -> tuple[np.ndarray, np.ndarray]:
    m, n = jac.shape
    dof = max(m - n, 1)
    try:
        cov = np.linalg.inv(jac.T @ jac)
    except np.linalg.LinAlgError:
        cov = np.linalg.pinv(jac.T @ jac)
    cov = cov * (chi2 / dof)
    cov = (cov + cov.T) / 2.0
    errors = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    return cov, errors


def lm_minimize(
    fn,
    x0,
    args=(),
    names: list[str] | None = None,
    jac=None,
    max_iter: int = MAX_ITER_DEFAULT,
    tol: float = TOL_DEFAULT,
) -> FitResult:
    """Minimize sum(fn(x, *args)**2) from x0.

    ``fn(x, *args)`` returns the residual vector; ``jac(x, *args)``, when
    given, its analytic Jacobian (otherwise forward differences are used).
    Non-finite residuals at the start raise ValueError; anywhere later they
    reject the trial step.
    """
    x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()
    if names is None:
        names = [f"x{i}" for i in range(x.size)]
    if len(names) != x.size:
        raise ValueError("names length does not match parameter count")
    if not np.all(np.isfinite(x)):
        raise ValueError("initial parameters must be finite")

    def residuals(xv):
        r = np.asarray(fn(xv, *args))
        if np.iscomplexobj(r):
            raise ValueError("residual function must return real values")
        return r.astype(float).ravel()

    def jacobian(xv):
        if jac is not None:
            return np.asarray(jac(xv, *args), dtype=float)
        return numeric_jacobian(fn, xv, args=args)

    r = residuals(x)
    if not np.all(np.isfinite(r)):
        raise ValueError("residuals are not finite at the initial point")
    cost = float(r @ r)

    lam = _LAMBDA_INIT
    iterations = 0
    converged = False
    message = "max iterations reached"

    if cost == 0.0:
        converged, message = True, "zero cost at start"

    while not converged and iterations < max_iter:
        iterations += 1
        j = jacobian(x)
        if not np.all(np.isfinite(j)):
            message = "Jacobian not finite"
            break
        a = j.T @ j
        g = j.T @ r
        d = np.diag(a).copy()
        floor = max(d.max(), 1.0) * 1e-14
        d[d < floor] = floor

        stalled = False
        while True:
            try:
                step = np.linalg.solve(a + lam * np.diag(d), -g)
            except np.linalg.LinAlgError:
                step = None
            if step is None or not np.all(np.isfinite(step)):
                lam *= 10.0
                if lam > _LAMBDA_MAX:
                    message = "singular normal equations; damping exhausted"
                    stalled = True
                    break
                continue
            x_try = x + step
            step_rel = np.linalg.norm(step) / max(np.linalg.norm(x_try), _TINY)
            try:
                r_try = residuals(x_try)
            except (ValueError, FloatingPointError):
                r_try = None
            if r_try is None or not np.all(np.isfinite(r_try)):
                cost_try = np.inf
            else:
                # a wild trial step may overflow the cost; treat as rejected
                with np.errstate(over="ignore"):
                    cost_try = float(r_try @ r_try)
            if cost_try < cost:
                cost_rel = (cost - cost_try) / max(cost, _TINY)
                x, r, cost = x_try, r_try, cost_try
                lam = max(lam / 3.0, 1e-14)
                if (step_rel < tol and cost_rel < tol) or cost == 0.0:
                    converged = True
                    message = "step and cost decrease below tolerance"
                break
            # rejected step: a tiny one means we sit at the minimum already
            if step_rel < tol:
                converged = True
                message = "proposed step below tolerance"
                break
            lam *= 10.0
            if lam > _LAMBDA_MAX:
                message = "damping exhausted without cost decrease"
                stalled = True
                break
        if stalled:
            break

    j = jacobian(x)
    cov, errors = _covariance(j, cost)
    return FitResult(
        names=list(names),
        params=x,
        errors=errors,
        covariance=cov,
        iterations=iterations,
        converged=converged,
        chi2=cost,
        message=message,
    )
