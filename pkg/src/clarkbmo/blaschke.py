"""Finite Blaschke products: evaluation, derivatives, boundary root finding.

A product gamma * prod_k (z - a_k) / (1 - conj(a_k) z) with |a_k| < 1 and
|gamma| = 1 is unimodular on the circle and extends across it as a rational
function; the extension automatically satisfies theta(z) = 1/conj(theta(1/conj(z))).
The boundary argument is strictly increasing with total increase 2*pi*degree,
which makes level-set root finding a certified bisection problem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import jsonio
from .circle import TAU, CirclePoint

MAX_ZERO_RADIUS = 1.0 - 1e-9   # zeros closer to the circle are rejected
POLE_TOL = 1e-12
NEAR_ZERO = 1e-8               # switch to the product-rule derivative path


@dataclass(frozen=True)
class BlaschkeProduct:
    zeros: np.ndarray
    gamma: complex = 1.0 + 0.0j

    def __post_init__(self):
        zeros = np.asarray(self.zeros, dtype=complex).reshape(-1)
        gamma = complex(self.gamma)
        if zeros.size and np.max(np.abs(zeros)) > MAX_ZERO_RADIUS:
            raise ValueError("zero too close to the unit circle")
        if abs(abs(gamma) - 1.0) > 1e-12:
            raise ValueError("leading constant must be unimodular")
        object.__setattr__(self, "zeros", zeros)
        object.__setattr__(self, "gamma", gamma)

    @property
    def degree(self) -> int:
        return self.zeros.size

    @cached_property
    def _poles(self) -> np.ndarray:
        nz = self.zeros[np.abs(self.zeros) > 0]
        return 1.0 / np.conj(nz)

    def __call__(self, z):
        return evaluate(self, z)

    def squared(self) -> "BlaschkeProduct":
        return BlaschkeProduct(np.concatenate([self.zeros, self.zeros]), self.gamma**2)

    def to_json_obj(self) -> dict:
        return {
            "zeros": [jsonio.complex_pair(a) for a in self.zeros],
            "gamma": jsonio.complex_pair(self.gamma),
        }

    @classmethod
    def from_json_obj(cls, obj) -> "BlaschkeProduct":
        if not isinstance(obj, dict) or "zeros" not in obj or "gamma" not in obj:
            raise ValueError("expected {'zeros': [[re,im],...], 'gamma': [re,im]}")
        zeros = np.array([jsonio.pair_complex(p) for p in obj["zeros"]], dtype=complex)
        return cls(zeros, jsonio.pair_complex(obj["gamma"]))


def _check_poles(theta: BlaschkeProduct, z: np.ndarray) -> None:
    if theta.degree == 0:
        return
    den = 1.0 - np.conj(theta.zeros)[..., :] * z[..., None]
    if np.min(np.abs(den)) < POLE_TOL:
        raise ValueError("evaluation at pole")


def evaluate(theta: BlaschkeProduct, z):
    """theta(z) = gamma * prod (z - a_k)/(1 - conj(a_k) z), vectorized in z."""
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if theta.degree == 0:
        out = np.full(z.shape, theta.gamma)
    else:
        _check_poles(theta, z)
        num = z[..., None] - theta.zeros
        den = 1.0 - np.conj(theta.zeros) * z[..., None]
        out = theta.gamma * np.prod(num / den, axis=-1)
    return complex(out[0]) if scalar else out


def _derivs_at_point(theta: BlaschkeProduct, z: complex):
    """(theta, theta', theta'') at one point, stable at and near zeros.

    Factors vanishing at z are multiplied out by the Leibniz rule; the
    remaining nonvanishing part is differentiated logarithmically.
    """
    a = theta.zeros
    close = np.abs(z - a) <= NEAR_ZERO
    far = ~close
    af = a[far]
    # nonvanishing part W and its log-derivatives
    if af.size:
        num = z - af
        den = 1.0 - np.conj(af) * z
        w = np.prod(num / den)
        lr = np.sum(1.0 / num + np.conj(af) / den)
        lr1 = np.sum(-1.0 / num**2 + np.conj(af) ** 2 / den**2)
    else:
        w, lr, lr1 = 1.0 + 0.0j, 0.0j, 0.0j
    w0, w1, w2 = w, w * lr, w * (lr * lr + lr1)
    # vanishing part V via Leibniz accumulation
    v0, v1, v2 = 1.0 + 0.0j, 0.0j, 0.0j
    for ak in a[close]:
        den = 1.0 - np.conj(ak) * z
        b0 = (z - ak) / den
        b1 = (1.0 - abs(ak) ** 2) / den**2
        b2 = 2.0 * np.conj(ak) * (1.0 - abs(ak) ** 2) / den**3
        v0, v1, v2 = (
            v0 * b0,
            v1 * b0 + v0 * b1,
            v2 * b0 + 2.0 * v1 * b1 + v0 * b2,
        )
    g = theta.gamma
    return (
        g * v0 * w0,
        g * (v1 * w0 + v0 * w1),
        g * (v2 * w0 + 2.0 * v1 * w1 + v0 * w2),
    )


def derivatives(theta: BlaschkeProduct, z):
    """(theta, theta', theta'') vectorized in z; exact rational derivatives."""
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    zf = np.atleast_1d(z).ravel()
    if theta.degree == 0:
        th = np.full(zf.shape, theta.gamma)
        zero = np.zeros(zf.shape, dtype=complex)
        out = (th, zero, zero.copy())
    else:
        _check_poles(theta, zf)
        num = zf[:, None] - theta.zeros
        den = 1.0 - np.conj(theta.zeros) * zf[:, None]
        near = np.min(np.abs(num), axis=1) <= NEAR_ZERO
        th = theta.gamma * np.prod(num / den, axis=1)
        lr = np.sum(1.0 / num + np.conj(theta.zeros) / den, axis=1)
        lr1 = np.sum(-1.0 / num**2 + np.conj(theta.zeros) ** 2 / den**2, axis=1)
        d1 = th * lr
        d2 = th * (lr * lr + lr1)
        if np.any(near):
            for i in np.nonzero(near)[0]:
                th[i], d1[i], d2[i] = _derivs_at_point(theta, complex(zf[i]))
        out = (th, d1, d2)
    shape = np.atleast_1d(z).shape
    out = tuple(o.reshape(shape) for o in out)
    if scalar:
        return tuple(complex(o[0]) for o in out)
    return out


def derivative(theta: BlaschkeProduct, z):
    return derivatives(theta, z)[1]


def second_derivative(theta: BlaschkeProduct, z):
    return derivatives(theta, z)[2]


def boundary_phase_bound(theta: BlaschkeProduct) -> float:
    """Upper bound for |theta'| on the circle: sum (1+|a|)/(1-|a|)."""
    r = np.abs(theta.zeros)
    return float(np.sum((1.0 + r) / (1.0 - r))) if theta.degree else 0.0


def solve_level_set(theta: BlaschkeProduct, alpha: complex) -> list[CirclePoint]:
    """All degree(theta) boundary solutions of theta(xi) = alpha.

    The continuous boundary argument of theta is strictly increasing with
    total increase 2*pi*degree, so each solution is found by bisection on
    the unwrapped phase.  Residuals are validated to 1e-11.
    """
    alpha = complex(alpha)
    if abs(abs(alpha) - 1.0) > 1e-12:
        raise ValueError("level must be unimodular")
    n = theta.degree
    if n < 1:
        raise ValueError("constant product has no level set")

    # grid fine enough that the phase increment per cell is below pi
    bound = boundary_phase_bound(theta)
    k = int(min(max(64, 8 * n, math.ceil(TAU * bound / math.pi)), 2**20))
    t = np.linspace(0.0, TAU, k + 1)
    w = evaluate(theta, np.exp(1j * t))
    pa = np.angle(w)
    inc = np.mod(np.diff(pa), TAU)
    phase = np.concatenate([[pa[0]], pa[0] + np.cumsum(inc)])
    total = phase[-1] - phase[0]
    if abs(total - TAU * n) > 1e-6:
        raise ValueError("boundary winding mismatch; zeros too close to the circle")

    base = math.atan2(alpha.imag, alpha.real)
    m0 = math.ceil((phase[0] - base) / TAU - 1e-13)
    targets = base + TAU * (m0 + np.arange(n))

    idx = np.searchsorted(phase, targets)
    idx = np.clip(idx, 1, k)
    lo, hi = t[idx - 1].copy(), t[idx].copy()
    plo, phi_ = phase[idx - 1].copy(), phase[idx].copy()
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        pm = np.angle(evaluate(theta, np.exp(1j * mid)))
        lift = np.round((0.5 * (plo + phi_) - pm) / TAU)
        pmid = np.clip(pm + TAU * lift, plo, phi_)
        left = pmid >= targets
        hi = np.where(left, mid, hi)
        phi_ = np.where(left, pmid, phi_)
        lo = np.where(left, lo, mid)
        plo = np.where(left, plo, pmid)
    roots = 0.5 * (lo + hi)

    # one Newton polish step on the phase error, kept only if it helps
    xi = np.exp(1j * roots)
    th, d1, _ = derivatives(theta, xi)
    err = np.angle(th * np.conj(alpha))
    speed = np.abs(d1)
    cand = roots - err / np.maximum(speed, 1e-300)
    res_old = np.abs(evaluate(theta, xi) - alpha)
    res_new = np.abs(evaluate(theta, np.exp(1j * cand)) - alpha)
    roots = np.where(res_new < res_old, cand, roots)

    residual = np.abs(evaluate(theta, np.exp(1j * roots)) - alpha)
    if np.max(residual) > 1e-11:
        raise ValueError("level-set residual too large")
    pts = sorted(CirclePoint(r) for r in roots)
    pts = sorted(pts, key=lambda p: p.angle)
    if len({round(p.angle, 12) for p in pts}) != n:
        raise ValueError("level-set roots collapsed")
    return pts


def argument_derivative(theta: BlaschkeProduct, xi: CirclePoint) -> float:
    """conj(theta(xi)) * xi * theta'(xi), checked to be a positive real.

    This is the boundary phase speed |theta'(xi)|.
    """
    z = xi.value if isinstance(xi, CirclePoint) else complex(xi)
    th, d1, _ = derivatives(theta, z)
    val = np.conj(th) * z * d1
    if abs(val.imag) > 1e-9 * abs(val) or val.real <= 0.0:
        raise ValueError("argument derivative is not positive real")
    return float(val.real)
