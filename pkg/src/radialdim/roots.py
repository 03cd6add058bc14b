"""Polynomial root finding.

Aberth-Ehrlich simultaneous iteration with a companion-matrix fallback,
for dense complex polynomials given by ascending-degree coefficient
arrays.
"""

from __future__ import annotations

import numpy as np

from .errors import RootFindingFailure

RESIDUAL_TOL = 1e-10


def trim(coeffs) -> np.ndarray:
    """Drop trailing (high-degree) zero coefficients."""
    c = np.asarray(coeffs, dtype=complex)
    if c.ndim != 1 or c.size == 0:
        raise ValueError("coefficient array must be 1-d and nonempty")
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        return c[:1]
    return c[: nz[-1] + 1]


def polyval(coeffs, z):
    """Evaluate ascending-degree coefficients at z (scalar or array)."""
    c = np.asarray(coeffs, dtype=complex)
    z = np.asarray(z, dtype=complex)
    out = np.zeros_like(z)
    for ck in c[::-1]:
        out = out * z + ck
    return out


def polyder(coeffs) -> np.ndarray:
    c = np.asarray(coeffs, dtype=complex)
    if c.size <= 1:
        return np.zeros(1, dtype=complex)
    return c[1:] * np.arange(1, c.size)


def _aberth(c, maxit=200, tol=1e-14):
    n = c.size - 1
    dc = polyder(c)
    # initial guesses on a circle of radius from the Cauchy bound
    r = 1.0 + np.max(np.abs(c[:-1])) / abs(c[-1])
    ang = 2.0 * np.pi * (np.arange(n) + 0.35) / n
    z = r ** (np.arange(n) % 3 * 0.3 + 0.4) * np.exp(1j * ang)
    for _ in range(maxit):
        p = polyval(c, z)
        dp = polyval(dc, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = np.where(dp != 0, p / np.where(dp == 0, 1, dp), 0)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            s = np.sum(1.0 / diff, axis=1)
            denom = 1.0 - newton * s
            step = np.where(denom != 0, newton / np.where(denom == 0, 1, denom), newton)
        z = z - step
        if not np.all(np.isfinite(z)):
            return None
        if np.max(np.abs(step)) < tol * (1.0 + np.max(np.abs(z))):
            return z
    return z


def _residual_ok(c, roots):
    scale = np.max(np.abs(c))
    # compare |p(r)| against the size of the evaluated terms, so large
    # roots of high-degree polynomials are not penalized
    for r in roots:
        terms = np.abs(c) * np.abs(r) ** np.arange(c.size)
        bound = RESIDUAL_TOL * max(scale, np.max(terms))
        if abs(polyval(c, r)) > bound:
            return False
    return True


def poly_roots(coeffs) -> np.ndarray:
    """All complex roots of the polynomial, with multiplicity.

    Tries Aberth-Ehrlich first; if the iteration stalls or leaves a
    large residual, falls back to the companion-matrix eigenvalues.
    Raises RootFindingFailure if neither produces residuals below
    1e-10 (relative).
    """
    c = trim(coeffs)
    if c.size == 1:
        return np.array([], dtype=complex)
    roots = _aberth(c)
    if roots is not None and _residual_ok(c, roots):
        return roots
    roots = np.roots(c[::-1])
    if _residual_ok(c, roots):
        return np.asarray(roots, dtype=complex)
    raise RootFindingFailure(
        f"root residuals exceed {RESIDUAL_TOL:g} for degree {c.size - 1} polynomial"
    )


def cluster_roots(roots, tol=1e-7):
    """Group nearby roots; returns list of (representative, multiplicity)."""
    roots = list(np.asarray(roots, dtype=complex))
    out = []
    used = [False] * len(roots)
    for i, r in enumerate(roots):
        if used[i]:
            continue
        group = [r]
        used[i] = True
        for j in range(i + 1, len(roots)):
            if not used[j] and abs(roots[j] - r) < tol * (1.0 + abs(r)):
                group.append(roots[j])
                used[j] = True
        out.append((complex(np.mean(group)), len(group)))
    return out
