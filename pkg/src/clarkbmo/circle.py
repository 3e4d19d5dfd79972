"""Points, arcs, and finitely-atomic measures on the unit circle.

Arcs of positive measure are quotiented by atom content: every arc with the
same atoms has the same mass and the same means, so one canonical
representative per contiguous run of atoms is enough.  Runs are indexed by
(start, length) with circular wrap; the full circle is the run of length N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import jsonio

TAU = 2.0 * math.pi

ANGLE_TOL = 1e-12       # angle comparisons
MIN_ATOM_GAP = 1e-10    # measures with closer atoms are rejected


class MeasureFormatError(ValueError):
    """Malformed measure JSON."""


def normalize_angle(t: float) -> float:
    t = math.fmod(float(t), TAU)
    if t < 0.0:
        t += TAU
    if t >= TAU:
        t = 0.0
    return t


@dataclass(frozen=True)
class CirclePoint:
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "angle", normalize_angle(self.angle))

    @property
    def value(self) -> complex:
        return complex(math.cos(self.angle), math.sin(self.angle))

    @classmethod
    def from_complex(cls, z: complex) -> "CirclePoint":
        z = complex(z)
        if abs(abs(z) - 1.0) > 1e-9:
            raise ValueError("point is not on the unit circle")
        return cls(math.atan2(z.imag, z.real))

    def rotated(self, delta: float) -> "CirclePoint":
        return CirclePoint(self.angle + delta)


def chord(p: CirclePoint, q: CirclePoint) -> float:
    """Chordal distance |p - q| between two circle points."""
    return abs(p.value - q.value)


@dataclass(frozen=True)
class Arc:
    """Closed arc starting at `start` and extending `extent` counterclockwise.

    extent = 2*pi is the full circle; extent = 0 is the degenerate one-point
    arc (the canonical arc of a single-atom run).
    """

    start: CirclePoint
    extent: float

    def __post_init__(self):
        e = float(self.extent)
        if not (-ANGLE_TOL <= e <= TAU + ANGLE_TOL):
            raise ValueError("arc extent must lie in [0, 2*pi]")
        object.__setattr__(self, "extent", min(max(e, 0.0), TAU))

    @classmethod
    def full_circle(cls, start: CirclePoint | None = None) -> "Arc":
        return cls(start or CirclePoint(0.0), TAU)

    @property
    def is_full_circle(self) -> bool:
        return self.extent >= TAU - ANGLE_TOL

    @property
    def end(self) -> CirclePoint:
        return CirclePoint(self.start.angle + self.extent)

    def contains(self, p: CirclePoint) -> bool:
        if self.is_full_circle:
            return True
        d = normalize_angle(p.angle - self.start.angle)
        return d <= self.extent + ANGLE_TOL or d >= TAU - ANGLE_TOL

    def rotated(self, delta: float) -> "Arc":
        return Arc(self.start.rotated(delta), self.extent)

    def to_json_obj(self) -> dict:
        return {"start_angle": self.start.angle, "extent": self.extent}


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely many atoms on the circle, strictly increasing in angle."""

    angles: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=float).reshape(-1)
        masses = np.asarray(self.masses, dtype=float).reshape(-1)
        if angles.size == 0:
            raise ValueError("empty measure")
        if angles.size != masses.size:
            raise ValueError("angles and masses must have the same length")
        for i, m in enumerate(masses):
            if not (m > 0.0) or not math.isfinite(m):
                raise ValueError(f"nonpositive mass at index {i}")
        for i, t in enumerate(angles):
            if not (0.0 <= t < TAU):
                raise ValueError(f"angle out of range at index {i}")
            if i > 0 and t <= angles[i - 1]:
                raise ValueError(f"non-increasing angles at index {i}")
        if angles.size >= 2:
            gaps = np.diff(angles, append=angles[0] + TAU)
            j = int(np.argmin(gaps))
            if gaps[j] <= MIN_ATOM_GAP:
                raise ValueError(f"duplicate atom at index {j}")
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "masses", masses)

    @property
    def n_atoms(self) -> int:
        return self.angles.size

    @cached_property
    def points(self) -> np.ndarray:
        return np.exp(1j * self.angles)

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    @property
    def atoms(self) -> list[CirclePoint]:
        return [CirclePoint(t) for t in self.angles]

    def neighbor_chords(self) -> tuple[np.ndarray, np.ndarray]:
        """Chordal distances to the previous and next atom (circularly).

        A single atom is assigned the full-circle diameter 2 for both
        neighbours, so condition ratios stay well defined.
        """
        if self.n_atoms == 1:
            two = np.array([2.0])
            return two, two
        pts = self.points
        nxt = np.abs(np.roll(pts, -1) - pts)
        prv = np.roll(nxt, 1)
        return prv, nxt

    def neighbor_arclengths(self) -> tuple[np.ndarray, np.ndarray]:
        """Normalized arclength (m(circle) = 1) to the previous/next atom."""
        if self.n_atoms == 1:
            one = np.array([1.0])
            return one, one
        gaps = np.diff(self.angles, append=self.angles[0] + TAU) / TAU
        return np.roll(gaps, 1), gaps

    def rotated(self, delta: float) -> "DiscreteMeasure":
        ang = np.array([normalize_angle(t + delta) for t in self.angles])
        order = np.argsort(ang)
        return DiscreteMeasure(ang[order], self.masses[order])


@dataclass(frozen=True)
class SampledFunction:
    """Complex values attached to the atoms of a measure."""

    measure: DiscreteMeasure
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex).reshape(-1)
        if v.size != self.measure.n_atoms:
            raise ValueError("value count must match atom count")
        object.__setattr__(self, "values", v)

    def weighted_mean(self) -> complex:
        mu = self.measure
        return complex(np.sum(self.values * mu.masses) / mu.total_mass)


def same_measure(a: DiscreteMeasure, b: DiscreteMeasure) -> bool:
    return a is b or (
        a.n_atoms == b.n_atoms
        and np.array_equal(a.angles, b.angles)
        and np.array_equal(a.masses, b.masses)
    )


def iter_runs(n: int):
    """Yield (start, length) for every canonical run; full circle last."""
    for length in range(1, n):
        for start in range(n):
            yield start, length
    yield 0, n


def run_indices(start: int, length: int, n: int) -> np.ndarray:
    return np.arange(start, start + length) % n


def run_arc(mu: DiscreteMeasure, start: int, length: int) -> Arc:
    """Minimal closed arc with endpoints at atoms covering the given run."""
    n = mu.n_atoms
    if length >= n:
        return Arc.full_circle(CirclePoint(mu.angles[0]))
    a0 = mu.angles[start]
    a1 = mu.angles[(start + length - 1) % n]
    return Arc(CirclePoint(a0), normalize_angle(a1 - a0))


def arcs_with_positive_mass(mu: DiscreteMeasure) -> list[Arc]:
    """One canonical arc per contiguous run of atoms (full circle included)."""
    return [run_arc(mu, s, ln) for s, ln in iter_runs(mu.n_atoms)]


def measure_of_arc(mu: DiscreteMeasure, arc: Arc) -> float:
    """Total mass of the atoms lying in the closed arc."""
    if arc.is_full_circle:
        return mu.total_mass
    d = np.mod(mu.angles - arc.start.angle, TAU)
    inside = (d <= arc.extent + ANGLE_TOL) | (d >= TAU - ANGLE_TOL)
    return float(mu.masses[inside].sum())


def atoms_in_arc(mu: DiscreteMeasure, arc: Arc) -> np.ndarray:
    if arc.is_full_circle:
        return np.arange(mu.n_atoms)
    d = np.mod(mu.angles - arc.start.angle, TAU)
    inside = (d <= arc.extent + ANGLE_TOL) | (d >= TAU - ANGLE_TOL)
    return np.nonzero(inside)[0]


def serialize_measure(mu: DiscreteMeasure) -> str:
    atoms = [{"angle": float(t), "mass": float(m)} for t, m in zip(mu.angles, mu.masses)]
    return jsonio.dumps({"atoms": atoms})


def deserialize_measure(text: str) -> DiscreteMeasure:
    try:
        obj = jsonio.loads(text)
    except ValueError as exc:
        raise MeasureFormatError(f"malformed JSON: {exc}") from exc
    if not isinstance(obj, dict) or "atoms" not in obj:
        raise MeasureFormatError("missing field 'atoms'")
    atoms = obj["atoms"]
    if not isinstance(atoms, list):
        raise MeasureFormatError("field 'atoms' must be a list")
    angles, masses = [], []
    for i, entry in enumerate(atoms):
        if not isinstance(entry, dict) or "angle" not in entry or "mass" not in entry:
            raise MeasureFormatError(f"missing angle or mass at index {i}")
        try:
            angles.append(float(entry["angle"]))
            masses.append(float(entry["mass"]))
        except (TypeError, ValueError) as exc:
            raise MeasureFormatError(f"non-numeric atom at index {i}") from exc
    try:
        return DiscreteMeasure(np.array(angles), np.array(masses))
    except ValueError as exc:
        raise MeasureFormatError(str(exc)) from exc
