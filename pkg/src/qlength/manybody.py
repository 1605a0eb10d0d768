"""Lengths and densities of N noninteracting identical particles in a box.

Natural units throughout (hbar = m = 1); only widths carry a length scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np
from scipy.integrate import trapezoid
from scipy.special import zeta

from .errors import EmptyFilling, InvalidIndex, OddElectronCount
from .moments import PI2, Sampled, box_x2_matrix_element, box_x_matrix_element

DEFAULT_GRID = 4096
# direct summation up to here, Hurwitz-zeta tail beyond
_DIRECT_SUM_LIMIT = 100_000


class Statistics(str, Enum):
    FERMION = "fermion"
    BOSON = "boson"


@dataclass(frozen=True)
class BoxSystem:
    """Infinite well of width ``lattice * cells``.

    A fixed-width box is one cell whose lattice constant is the width.
    """

    lattice: float
    cells: int = 1

    def __post_init__(self):
        if not self.lattice > 0:
            raise ValueError("lattice constant must be positive")
        if int(self.cells) != self.cells or self.cells < 1:
            raise ValueError("a box needs at least one unit cell")

    @classmethod
    def fixed(cls, width: float) -> "BoxSystem":
        return cls(width, 1)

    @classmethod
    def unit_cells(cls, a0: float, cells: int) -> "BoxSystem":
        return cls(a0, cells)

    @property
    def width(self) -> float:
        return self.lattice * self.cells

    @property
    def center(self) -> float:
        return 0.5 * self.width


@dataclass(frozen=True)
class FillingPlan:
    statistics: Statistics
    occupations: tuple[tuple[int, int], ...]

    def __post_init__(self):
        stats = Statistics(self.statistics)
        object.__setattr__(self, "statistics", stats)
        occ = tuple(sorted((int(n), int(k)) for n, k in self.occupations))
        object.__setattr__(self, "occupations", occ)
        levels = [n for n, _ in occ]
        if len(set(levels)) != len(levels):
            raise ValueError("each level may appear once in a filling plan")
        for n, k in occ:
            if n < 1:
                raise InvalidIndex(f"level index must be >= 1, got {n}")
            if k < 1:
                raise ValueError(f"occupancy of level {n} must be >= 1")
            if stats is Statistics.FERMION and k > 2:
                raise ValueError(f"level {n} holds {k} fermions; at most 2 (spin up and down)")

    @property
    def particle_count(self) -> int:
        return sum(k for _, k in self.occupations)

    @property
    def highest_level(self) -> int:
        return max((n for n, _ in self.occupations), default=0)

    @classmethod
    def fermion_ground(cls, n_particles: int) -> "FillingPlan":
        """Aufbau filling, two per level; an odd count leaves the top level half filled."""
        if n_particles < 1:
            raise EmptyFilling("need at least one particle")
        pairs, single = divmod(n_particles, 2)
        occ = [(n, 2) for n in range(1, pairs + 1)]
        if single:
            occ.append((pairs + 1, 1))
        return cls(Statistics.FERMION, tuple(occ))

    @classmethod
    def boson_ground(cls, n_particles: int) -> "FillingPlan":
        if n_particles < 1:
            raise EmptyFilling("need at least one particle")
        return cls(Statistics.BOSON, ((1, n_particles),))

    @classmethod
    def paired(cls, statistics, n_particles: int) -> "FillingPlan":
        """Levels 1..N/2 with two particles each, for either statistics."""
        if n_particles < 2 or n_particles % 2:
            raise OddElectronCount(f"paired filling needs an even count, got {n_particles}")
        return cls(statistics, tuple((n, 2) for n in range(1, n_particles // 2 + 1)))


@dataclass(frozen=True, eq=False)
class DensityProfile:
    grid: np.ndarray
    values: np.ndarray
    particle_count: int
    highest_level: int

    @property
    def norm(self) -> float:
        return float(trapezoid(self.values, self.grid))

    def symmetry_error(self) -> float:
        """Largest |rho(x) - rho(mirror x)| about the middle of the grid."""
        return float(np.max(np.abs(self.values - self.values[::-1])))

    def to_density(self) -> Sampled:
        return Sampled(self.grid, self.values)


def zeta2_partial(m: int) -> float:
    """Sum of 1/n**2 for n = 1..m; uses the Hurwitz-zeta tail for large m."""
    if m < 0:
        raise ValueError("m must be non-negative")
    if m == 0:
        return 0.0
    if m <= _DIRECT_SUM_LIMIT:
        return math.fsum(1.0 / (n * n) for n in range(1, m + 1))
    return PI2 / 6.0 - float(zeta(2.0, m + 1))


def _length_from_inverse_square_sum(a: float, n_particles: int, s: float) -> float:
    # L^2 = a^2 (1 - 6 s / (pi^2 N)), s = sum over particles of 1/n^2
    return a * math.sqrt(1.0 - 6.0 * s / (PI2 * n_particles))


def fermion_length(box: BoxSystem | float, n_particles: int) -> float:
    """Length of N fermions filling the lowest N/2 levels two at a time."""
    a = box.width if isinstance(box, BoxSystem) else float(box)
    if n_particles < 2 or n_particles % 2:
        raise OddElectronCount(
            f"closed-shell length needs an even electron count, got {n_particles}; "
            "use plan_length with an explicit FillingPlan"
        )
    return _length_from_inverse_square_sum(a, n_particles, 2.0 * zeta2_partial(n_particles // 2))


def excited_state_length(a: float, n: int) -> float:
    if int(n) != n or n < 1:
        raise InvalidIndex(f"level index must be a positive integer, got {n}")
    return a * math.sqrt(1.0 - 6.0 / (PI2 * n * n))


def boson_length(a: float, n_particles: int) -> float:
    """Ground-state length of N bosons; the same for every N."""
    if n_particles < 1:
        raise EmptyFilling("need at least one boson")
    return a * math.sqrt(1.0 - 6.0 / PI2)


def plan_length(plan: FillingPlan, box: BoxSystem | float) -> float:
    """Length of an arbitrary filling of a box (closed form)."""
    a = box.width if isinstance(box, BoxSystem) else float(box)
    if plan.particle_count < 1:
        raise EmptyFilling("filling plan holds no particles")
    s = math.fsum(k / (n * n) for n, k in plan.occupations)
    return _length_from_inverse_square_sum(a, plan.particle_count, s)


def many_body_spread(plan: FillingPlan, box: BoxSystem | float) -> float:
    """Position variance of any one particle, built from single-particle
    matrix elements <n|x|n> and <n|x^2|n>; no centrosymmetry is assumed."""
    a = box.width if isinstance(box, BoxSystem) else float(box)
    N = plan.particle_count
    if N < 1:
        raise EmptyFilling("filling plan holds no particles")
    x2 = math.fsum(k * box_x2_matrix_element(a, n) for n, k in plan.occupations) / N
    x1 = math.fsum(k * box_x_matrix_element(a, n) for n, k in plan.occupations) / N
    return x2 - x1 * x1


def level_densities(levels: Iterable[tuple[int, int]], a: float, t: np.ndarray) -> np.ndarray:
    """Occupancy-weighted sum of (2/a) sin^2(n pi t) on the reduced grid t = x/a."""
    out = np.zeros_like(t)
    for n, k in levels:
        out += k * np.sin(n * math.pi * t) ** 2
    return out * (2.0 / a)


def electron_density(box: BoxSystem | float, plan: FillingPlan,
                     grid_points: int = DEFAULT_GRID) -> DensityProfile:
    """One-particle density of a filled box on a uniform grid over [0, a]."""
    a = box.width if isinstance(box, BoxSystem) else float(box)
    if grid_points < 16:
        raise ValueError("grid_points must be at least 16")
    N = plan.particle_count
    if N < 1:
        raise EmptyFilling("filling plan holds no particles")
    t = np.linspace(0.0, 1.0, grid_points)
    rho = level_densities(plan.occupations, a, t) / N
    return DensityProfile(a * t, rho, N, plan.highest_level)
