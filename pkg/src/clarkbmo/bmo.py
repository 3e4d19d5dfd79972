"""Mean oscillation norms over atom runs, dual pairing, and atoms.

The oscillation supremum depends only on which atoms an arc contains, so it
is taken over canonical runs (including the full circle).  Arc masses and
means come from prefix sums over the doubled atom array; deviation sums are
evaluated with vectorized windows.  A plain triple-loop version is kept as
an independent test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circle import (
    Arc,
    DiscreteMeasure,
    SampledFunction,
    atoms_in_arc,
    measure_of_arc,
    run_arc,
    run_indices,
    same_measure,
)


@dataclass(frozen=True)
class BmoResult:
    norm: float
    extremal_arc: Arc
    extremal_run: tuple[int, int]


def _run_oscillations(mu: DiscreteMeasure, values: np.ndarray):
    """Oscillation and mass of every canonical run.

    Returns (osc, mass, runs) as parallel lists; runs are (start, length).
    """
    n = mu.n_atoms
    w2 = np.concatenate([mu.masses, mu.masses])
    v2 = np.concatenate([values, values])
    pw = np.concatenate([[0.0], np.cumsum(w2)])
    pvw = np.concatenate([[0.0], np.cumsum(v2 * w2)])

    oscs, masses, runs = [], [], []
    starts = np.arange(n)
    for length in range(1, n):
        mass = pw[starts + length] - pw[starts]
        mean = (pvw[starts + length] - pvw[starts]) / mass
        idx = starts[:, None] + np.arange(length)[None, :]
        dev = np.abs(v2[idx] - mean[:, None]) * w2[idx]
        osc = dev.sum(axis=1) / mass
        oscs.append(osc)
        masses.append(mass)
        runs.extend((s, length) for s in range(n))
    total = mu.total_mass
    mean = np.sum(values * mu.masses) / total
    osc_full = float(np.sum(np.abs(values - mean) * mu.masses) / total)
    oscs.append(np.array([osc_full]))
    masses.append(np.array([total]))
    runs.append((0, n))
    return np.concatenate(oscs), np.concatenate(masses), runs


def bmo_norm(b: SampledFunction) -> BmoResult:
    """Supremum over positive-mass arcs of the mean deviation from the mean."""
    osc, _, runs = _run_oscillations(b.measure, b.values)
    i = int(np.argmax(osc))
    s, ln = runs[i]
    return BmoResult(float(osc[i]), run_arc(b.measure, s, ln), (s, ln))


def bmo_norm_naive(b: SampledFunction) -> float:
    """Triple-loop enumeration oracle; O(N^3), direct sums, no prefix sums."""
    mu, v = b.measure, b.values
    n = mu.n_atoms
    best = 0.0
    for length in range(1, n + 1):
        for start in range(n if length < n else 1):
            idx = [(start + j) % n for j in range(length)]
            mass = sum(mu.masses[i] for i in idx)
            mean = sum(v[i] * mu.masses[i] for i in idx) / mass
            osc = sum(abs(v[i] - mean) * mu.masses[i] for i in idx) / mass
            best = max(best, osc)
    return best


def vmo_modulus(b: SampledFunction, eps: float) -> float:
    """Same supremum restricted to arcs of mass at most eps (0 if none)."""
    if eps <= 0.0:
        return 0.0
    osc, mass, _ = _run_oscillations(b.measure, b.values)
    keep = mass <= eps + 1e-15
    return float(np.max(osc[keep])) if np.any(keep) else 0.0


def dual_pairing(f: SampledFunction, b: SampledFunction) -> complex:
    """Integral of f*b against the shared measure (bilinear, no conjugation)."""
    if not same_measure(f.measure, b.measure):
        raise ValueError("measure mismatch")
    return complex(np.sum(f.values * b.values * f.measure.masses))


@dataclass(frozen=True)
class MuAtom:
    """Arc-supported, zero-mean function with sup norm at most 1/mass(arc)."""

    measure: DiscreteMeasure
    arc: Arc
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex).reshape(-1)
        if v.size != self.measure.n_atoms:
            raise ValueError("value count must match atom count")
        object.__setattr__(self, "values", v)

    def arc_mass(self) -> float:
        return measure_of_arc(self.measure, self.arc)

    def is_valid(self, tol: float = 1e-10) -> bool:
        mass = self.arc_mass()
        if mass <= 0.0:
            return False
        bound = 1.0 / mass
        if np.max(np.abs(self.values)) > bound * (1.0 + tol) + tol:
            return False
        inside = atoms_in_arc(self.measure, self.arc)
        outside = np.setdiff1d(np.arange(self.measure.n_atoms), inside)
        if outside.size and np.max(np.abs(self.values[outside])) > tol * bound:
            return False
        mean = np.sum(self.values * self.measure.masses)
        return bool(abs(mean) <= tol * bound * max(mass, 1.0))


def extremal_atom(b: SampledFunction, run: tuple[int, int] | None = None) -> MuAtom:
    """Sign-pattern atom whose pairing with b is half the arc oscillation.

    With a0 the unimodular function aligning b - <b> on the arc, the atom
    (a0 - <a0>) / (2 mass) pairs with b to exactly oscillation/2.
    """
    mu = b.measure
    if run is None:
        run = bmo_norm(b).extremal_run
    start, length = run
    idx = run_indices(start, length, mu.n_atoms)
    w = mu.masses[idx]
    mass = float(w.sum())
    mean = np.sum(b.values[idx] * w) / mass
    dev = b.values[idx] - mean
    a0 = np.where(np.abs(dev) > 0, np.conj(dev) / np.maximum(np.abs(dev), 1e-300), 1.0)
    a0_mean = np.sum(a0 * w) / mass
    vals = np.zeros(mu.n_atoms, dtype=complex)
    vals[idx] = (a0 - a0_mean) / (2.0 * mass)
    return MuAtom(mu, run_arc(mu, start, length), vals)
