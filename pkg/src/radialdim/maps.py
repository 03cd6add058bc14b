"""Holomorphic self-maps of the sphere: rational maps and the
exponential family lambda * e^z.

Coefficient arrays are ascending degree: (a0, a1, a2) means
a0 + a1 z + a2 z^2.  Map evaluation and the spherical derivative are
chart-aware (points with |z| > 1 are handled through the 1/z chart), so
nothing overflows near infinity.
"""

from __future__ import annotations

import math
import re

import numpy as np

from .errors import DomainError
from .roots import cluster_roots, poly_roots, polyder, polyval, trim
from .sphere import INF, is_inf, normalize_point

_COPRIME_TOL = 1e-12


def _sylvester_resultant(p, q):
    p = trim(p)
    q = trim(q)
    m, n = p.size - 1, q.size - 1
    if m == 0 or n == 0:
        return 1.0 + 0j
    s = np.zeros((m + n, m + n), dtype=complex)
    for i in range(n):
        s[i, i : i + m + 1] = p[::-1]
    for i in range(m):
        s[n + i, i : i + n + 1] = q[::-1]
    return np.linalg.det(s)


def _parse_complex(tok: str) -> complex:
    tok = tok.strip().replace(" ", "").replace("i", "j")
    if tok in ("j", "+j"):
        return 1j
    if tok == "-j":
        return -1j
    return complex(tok)


class RationalMap:
    """Quotient of two coprime polynomials, as a map of the sphere."""

    def __init__(self, num, den, _validate=True):
        self.num = trim(num)
        self.den = trim(den)
        if np.all(self.den == 0):
            raise DomainError("denominator is identically zero")
        dn, dd = self.num.size - 1, self.den.size - 1
        self.degree = max(dn, dd)
        if _validate:
            if self.degree < 1:
                raise DomainError("constant maps are not admitted")
            res = _sylvester_resultant(self.num, self.den)
            scale = (max(np.max(np.abs(self.num)), 1e-300) ** dd
                     * max(np.max(np.abs(self.den)), 1e-300) ** dn)
            if abs(res) <= _COPRIME_TOL * scale:
                raise DomainError("numerator and denominator share a root")
        # the map written in the 1/z chart at the source:
        # f(1/w) = w^(L-dn) rev(num) / (w^(L-dd) rev(den))
        L = self.degree
        pn = np.concatenate([np.zeros(L - dn, dtype=complex), self.num[::-1]])
        pd = np.concatenate([np.zeros(L - dd, dtype=complex), self.den[::-1]])
        self._num_inv = trim(pn)
        self._den_inv = trim(pd)
        # Wronskian n'd - nd' in both charts
        self._w0 = _wronskian(self.num, self.den)
        self._w1 = _wronskian(self._num_inv, self._den_inv)

    # -- evaluation ---------------------------------------------------

    def __call__(self, z):
        z = normalize_point(z)
        return complex(self.evaluate(np.array([z]))[0])

    def evaluate(self, zs) -> np.ndarray:
        """Vectorized evaluation; infinite inputs and poles are handled."""
        zs = np.asarray(zs, dtype=complex)
        out = np.empty_like(zs)
        fin = np.isfinite(zs)
        near = fin & (np.abs(zs) <= 1.0)
        far = ~near
        w = np.where(fin, zs, 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            winv = np.where(far & fin & (zs != 0), 1.0 / np.where(zs == 0, 1, w), 0)
        # |z| <= 1: direct chart
        n0 = polyval(self.num, w[near])
        d0 = polyval(self.den, w[near])
        out[near] = _safe_div(n0, d0)
        # |z| > 1 (or infinite): evaluate f(1/w) at w = 1/z (w = 0 at inf)
        n1 = polyval(self._num_inv, winv[far])
        d1 = polyval(self._den_inv, winv[far])
        out[far] = _safe_div(n1, d1)
        return out

    def spherical_derivative(self, z) -> float:
        z = normalize_point(z)
        return float(self.spherical_derivative_arr(np.array([z]))[0])

    def spherical_derivative_arr(self, zs) -> np.ndarray:
        """Norm of the derivative in the round metric, ||Df||.

        In a chart, ||Df||(w) = |W(w)| (1 + |w|^2) / (|n(w)|^2 + |d(w)|^2)
        with W = n'd - nd'; the formula is insensitive to which target
        chart the value lands in, so only the source chart is switched.
        """
        zs = np.asarray(zs, dtype=complex)
        out = np.empty(zs.shape, dtype=float)
        fin = np.isfinite(zs)
        near = fin & (np.abs(zs) <= 1.0)
        far = ~near
        w = np.where(fin, zs, 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            winv = np.where(far & fin & (zs != 0), 1.0 / np.where(zs == 0, 1, w), 0)
        out[near] = _chart_sph_deriv(self.num, self.den, self._w0, w[near])
        out[far] = _chart_sph_deriv(self._num_inv, self._den_inv, self._w1, winv[far])
        return out

    def derivative_arr(self, zs) -> np.ndarray:
        """Plain complex derivative f'(z) = W(z)/den(z)^2 (finite z)."""
        zs = np.asarray(zs, dtype=complex)
        d = polyval(self.den, zs)
        w = polyval(self._w0, zs)
        return _safe_div(w, d * d)

    # -- structure ----------------------------------------------------

    def critical_points(self):
        """Critical points with multiplicities: list of (point, mult).

        A degree-d map has 2d - 2 critical points counted with
        multiplicity; any deficit of the finite Wronskian roots sits at
        infinity.
        """
        w = trim(self._w0)
        finite = cluster_roots(poly_roots(w)) if w.size > 1 else []
        total = 2 * self.degree - 2
        found = sum(m for _, m in finite)
        pts = [(normalize_point(p), m) for p, m in finite]
        if found < total:
            pts.append((INF, total - found))
        return pts

    def singular_values(self):
        """Critical values (the singular values of a rational map)."""
        vals = []
        for p, _ in self.critical_points():
            v = self(p)
            if not any(abs_diff_sphere(v, u) < 1e-9 for u in vals):
                vals.append(v)
        return vals

    def __repr__(self):
        return f"RationalMap(num={list(self.num)}, den={list(self.den)})"


def _wronskian(num, den):
    w = np.polysub(np.polymul(polyder(num)[::-1], den[::-1]),
                   np.polymul(num[::-1], polyder(den)[::-1]))[::-1]
    return trim(w)


def _safe_div(n, d):
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(d != 0, n / np.where(d == 0, 1, d), np.inf + 0j)
    big = ~np.isfinite(out)
    out = np.where(big, np.inf + 0j, out)
    return out


def _chart_sph_deriv(num, den, wron, w):
    nw = polyval(num, w)
    dw = polyval(den, w)
    ww = polyval(wron, w)
    denom = np.abs(nw) ** 2 + np.abs(dw) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.abs(ww) * (1.0 + np.abs(w) ** 2) / denom
    return np.where(denom == 0, np.inf, out).real.astype(float)


def abs_diff_sphere(a, b):
    from .sphere import spherical_distance
    return spherical_distance(a, b)


class ExpFamily:
    """The map z -> lam * e^z.  Infinity is an essential singularity,
    so evaluation there is refused; overflowing orbits saturate to the
    point at infinity and are flagged as truncated."""

    def __init__(self, lam):
        lam = complex(lam)
        if lam == 0 or not np.isfinite(lam):
            raise DomainError("parameter must be finite and nonzero")
        self.lam = lam
        self.degree = None  # transcendental

    def __call__(self, z):
        z = normalize_point(z)
        if is_inf(z):
            raise DomainError("e^z has no limit at infinity")
        if z.real > 700.0:
            return INF
        return normalize_point(self.lam * np.exp(z))

    def evaluate(self, zs) -> np.ndarray:
        zs = np.asarray(zs, dtype=complex)
        if np.any(~np.isfinite(zs)):
            raise DomainError("e^z has no limit at infinity")
        big = zs.real > 700.0
        safe = np.where(big, 0, zs)
        out = self.lam * np.exp(safe)
        return np.where(big, np.inf + 0j, out)

    def spherical_derivative(self, z) -> float:
        z = normalize_point(z)
        return float(self.spherical_derivative_arr(np.array([z]))[0])

    def spherical_derivative_arr(self, zs) -> np.ndarray:
        zs = np.asarray(zs, dtype=complex)
        if np.any(~np.isfinite(zs)):
            raise DomainError("e^z has no limit at infinity")
        big = zs.real > 700.0
        safe = np.where(big, 0, zs)
        fz = np.abs(self.lam) * np.exp(safe.real)
        out = fz * (1.0 + np.abs(zs) ** 2) / (1.0 + fz ** 2)
        # overflowed points: derivative norm decays like 1/|f|
        return np.where(big, 0.0, out).astype(float)

    def derivative_arr(self, zs) -> np.ndarray:
        return self.evaluate(zs)

    def singular_values(self):
        # asymptotic values of lam e^z: the omitted value 0 and infinity
        return [0j, INF]

    def __repr__(self):
        return f"ExpFamily(lam={self.lam})"


def orbit(f, z0, n):
    """Forward orbit [z0, f(z0), ..., f^n(z0)].

    Returns (points, truncated); truncated is True when an exponential
    orbit overflowed and was cut short at the saturation step.
    """
    pts = [normalize_point(z0)]
    truncated = False
    for _ in range(n):
        z = pts[-1]
        if is_inf(z) and isinstance(f, ExpFamily):
            truncated = True
            break
        pts.append(f(z))
    return pts, truncated


def compose(f: RationalMap, g: RationalMap) -> RationalMap:
    """The rational map f(g(z)), by homogeneous substitution."""
    ng, dg = g.num, g.den
    L = max(f.num.size, f.den.size) - 1

    def subst(coeffs):
        acc = np.zeros(1, dtype=complex)
        for k, a in enumerate(coeffs):
            term = np.array([a], dtype=complex)
            for _ in range(k):
                term = np.convolve(term, ng)
            for _ in range(L - k):
                term = np.convolve(term, dg)
            m = max(acc.size, term.size)
            acc = np.pad(acc, (0, m - acc.size)) + np.pad(term, (0, m - term.size))
        return acc

    return RationalMap(subst(f.num), subst(f.den), _validate=False)


def parse_map(text: str):
    """Parse a map literal.

    Grammar:  "rational: (a0,a1,...)/(b0,b1,...)"  with ascending-degree
    coefficient tuples, or  "exp: <lam>"  for lam * e^z.  Coefficients
    accept complex values written with i, e.g. "0.5+0i".
    """
    from .errors import ConfigParseError

    text = text.strip()
    if ":" not in text:
        raise ConfigParseError(f"map literal missing kind prefix: {text!r}")
    kind, _, body = text.partition(":")
    kind = kind.strip().lower()
    body = body.strip()
    if kind == "exp":
        try:
            return ExpFamily(_parse_complex(body))
        except (ValueError, DomainError) as e:
            raise ConfigParseError(f"bad exp parameter {body!r}: {e}")
    if kind == "rational":
        m = re.fullmatch(r"\(([^()]*)\)\s*/\s*\(([^()]*)\)", body)
        if not m:
            raise ConfigParseError(f"bad rational literal: {body!r}")
        try:
            num = [_parse_complex(t) for t in m.group(1).split(",") if t.strip()]
            den = [_parse_complex(t) for t in m.group(2).split(",") if t.strip()]
            return RationalMap(num, den)
        except (ValueError, DomainError) as e:
            raise ConfigParseError(f"bad rational literal {body!r}: {e}")
    raise ConfigParseError(f"unknown map kind {kind!r}")
