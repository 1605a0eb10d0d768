"""Segmented rulers: lengths after cutting, cutting energies, the best
number of rulings, and the self-consistent length of stacked segments.

Energies here are in units with h = m = 1 (Planck's constant, not hbar), so
a box of width w has levels n**2 / (8 w**2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import oracle
from .errors import ExcessiveOverlap, IndivisibleSegmentation, NoConvergence, NoSignChange
from .manybody import (
    DensityProfile,
    Statistics,
    boson_length,
    fermion_length,
    zeta2_partial,
)
from .moments import PI2, MixtureOfShiftedWells, box_x2_matrix_element, l2_from_variance

FIXED_POINT_TOL = 1e-10
FIXED_POINT_MAX_ITER = 100
MIXTURE_QUAD_TOL = 1e-13


@dataclass(frozen=True)
class RulerSpec:
    """A rod of ``N`` particles cut into ``R`` equal segments.

    Fermions: two electrons per unit cell of length ``a0``, so each segment
    holds N/R electrons in N/(2R) cells; a cell cannot be split.
    Bosons: one spin-0 boson per cell, each segment holds N/R of them.
    """

    a0: float
    N: int
    R: int = 1
    statistics: Statistics = Statistics.FERMION

    def __post_init__(self):
        object.__setattr__(self, "statistics", Statistics(self.statistics))
        if not self.a0 > 0:
            raise ValueError("lattice constant must be positive")
        check_admissible(self.N, self.R, self.statistics)

    @property
    def cells(self) -> int:
        return self.N // 2 if self.statistics is Statistics.FERMION else self.N

    @property
    def rod_width(self) -> float:
        return self.cells * self.a0


def check_admissible(N: int, R: int, statistics=Statistics.FERMION) -> None:
    statistics = Statistics(statistics)
    if statistics is Statistics.FERMION:
        if N < 2 or N % 2:
            raise IndivisibleSegmentation(f"a fermion ruler needs an even N >= 2, got {N}")
        if R < 1 or R > N // 2 or (N // 2) % R:
            raise IndivisibleSegmentation(
                f"R={R} does not split {N // 2} unit cells into whole cells per segment"
            )
    else:
        if N < 1 or R < 1 or R > N or N % R:
            raise IndivisibleSegmentation(f"R={R} does not divide N={N} bosons evenly")


def admissible_rulings(N: int, statistics=Statistics.FERMION) -> list[int]:
    """All R that split the rod into whole unit cells, ascending."""
    cells = N // 2 if Statistics(statistics) is Statistics.FERMION else N
    small, large = [], []
    d = 1
    while d * d <= cells:
        if cells % d == 0:
            small.append(d)
            if d * d != cells:
                large.append(cells // d)
        d += 1
    return small + large[::-1]


@dataclass(frozen=True)
class SegmentedLengthResult:
    per_segment: float
    total: float
    monolithic: float

    @property
    def overestimate(self) -> float:
        return self.monolithic - self.total


def segment_length(spec: RulerSpec) -> SegmentedLengthResult:
    N, R, a0 = spec.N, spec.R, spec.a0
    if spec.statistics is Statistics.FERMION:
        per = fermion_length(N * a0 / (2 * R), N // R)
        mono = fermion_length(N * a0 / 2, N)
    else:
        per = boson_length(N * a0 / R, N // R)
        mono = boson_length(N * a0, N)
        # boson length is linear in width and the R pieces tile the rod, so
        # the sum is the whole-rod value; avoids an R-dependent rounding ulp
        return SegmentedLengthResult(per, mono, mono)
    total = R * per
    return SegmentedLengthResult(per, total, mono)


@dataclass(frozen=True)
class CuttingEnergy:
    E_G: float
    E_G_prime: float
    ratio: float

    @property
    def work(self) -> float:
        return self.E_G_prime - self.E_G


def cutting_energy(spec: RulerSpec) -> CuttingEnergy:
    """Ground-state energy of the whole rod and of the rod cut into R pieces."""
    N, R, a0 = spec.N, spec.R, spec.a0
    if spec.statistics is Statistics.FERMION:
        scale = 1.0 / (24.0 * N * a0 * a0)
        e_full = (N + 2) * (N + 1) * scale
        e_cut = (N + 2 * R) * (N + R) * scale
        ratio = Fraction((N + 2 * R) * (N + R), (N + 2) * (N + 1))
    else:
        scale = 1.0 / (8.0 * N * a0 * a0)
        e_full = scale
        e_cut = R * R * scale
        ratio = Fraction(R * R)
    return CuttingEnergy(e_full, e_cut, float(ratio))


def precision_condition_residual(N: int, R: int) -> float:
    """Fractional quantum shortfall of an R-segment ruler minus the
    resolution 1/R. Negative: resolution limits; positive: the shortfall does."""
    check_admissible(N, R)
    x = 12.0 / PI2 * (R / N) * zeta2_partial(N // (2 * R))
    shortfall = x / (1.0 + math.sqrt(1.0 - x))  # 1 - sqrt(1 - x) without cancellation
    return shortfall - 1.0 / R


@dataclass(frozen=True)
class OptimalRuling:
    N: int
    R_closed_form: float
    R_star: int
    delta_L: float
    R_sweep: int
    delta_L_sweep: float


def optimal_ruling(N: int, a0: float = 1.0) -> OptimalRuling:
    """Best number of rulings: the closed form R = sqrt(N) with ruling size
    sqrt(a0 L / 2), alongside the admissible R found by sweeping the exact
    precision condition."""
    if N < 4 or N % 2:
        raise IndivisibleSegmentation(f"need an even N >= 4, got {N}")
    L = N * a0 / 2
    r = math.sqrt(N)
    cands = admissible_rulings(N)

    def f(R):
        return precision_condition_residual(N, R)

    try:
        r_sweep = oracle.find_sign_change(f, cands[0], cands[-1], cands)
    except NoSignChange:
        r_sweep = min(cands, key=lambda R: abs(f(R)))
    return OptimalRuling(N, r, int(round(r)), math.sqrt(a0 * L / 2), r_sweep, L / r_sweep)


# ---------------------------------------------------------------------------
# Stacked segments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SelfConsistencyReport:
    N: int
    a: float
    L1_solved: float
    L1_numeric: float
    L1_alternate_coefficient: float
    coefficient_discrepancy_flag: bool
    L_direct: float
    iterations: int
    quadratic: tuple[float, float, float]


def _mixture_length_by_quadrature(a: float, L1: float, N: int) -> float:
    d = MixtureOfShiftedWells(a, L1, N)
    lo, hi = d.support()
    bp = d.breakpoints()

    def quad(f):
        return oracle.integrate(f, oracle.QuadratureSpec(lo, hi, MIXTURE_QUAD_TOL, breakpoints=bp))

    norm = quad(d.pdf)
    mean = quad(lambda x: x * d.pdf(x)) / norm
    var = quad(lambda x: (x - mean) ** 2 * d.pdf(x)) / norm
    return l2_from_variance(var)


def _stacked_length_quadratic(a: float, N: int) -> tuple[float, float, float]:
    """Coefficients (c0, c1, c2) with L^2 = c0 + c1 L1 + c2 L1^2 for N
    ground-state wells spaced by L1.

    Built term by term: each well contributes <y^2> + 2 (i-1) L1 <y> +
    (i-1)^2 L1^2 to <x^2>, and the overall mean is ((N-1) L1 + a) / 2.
    """
    y2 = box_x2_matrix_element(a, 1)
    y1 = 0.5 * a
    s1 = math.fsum(i - 1 for i in range(1, N + 1)) / N
    s2 = math.fsum((i - 1) ** 2 for i in range(1, N + 1)) / N
    mean_x2 = (y2, 2.0 * y1 * s1, s2)
    # 12 <x^2> - 12 <x>^2 with <x> = ((N-1) L1 + a) / 2
    c0 = 12.0 * mean_x2[0] - 3.0 * a * a
    c1 = 12.0 * mean_x2[1] - 6.0 * (N - 1) * a
    c2 = 12.0 * mean_x2[2] - 3.0 * (N - 1) ** 2
    return c0, c1, c2


def self_consistent_segment_length(a: float, N: int) -> SelfConsistencyReport:
    """Solve for the spacing L1 of N stacked one-particle wells such that the
    stack's length equals N * L1.

    Two routes: the quadratic L^2(L1) assembled from single-well moments,
    and a fixed-point iteration L1 <- L(L1) / N on direct quadrature of the
    mixture density (Steffensen-accelerated, since the plain map contracts
    only by (N^2 - 1) / N^2 per step).
    """
    if N < 2:
        raise ValueError("need at least two segments")
    if not a > 0:
        raise ValueError("well width must be positive")

    c0, c1, c2 = _stacked_length_quadratic(a, N)
    # N^2 L1^2 = c0 + c1 L1 + c2 L1^2
    qa, qb, qc = N * N - c2, -c1, -c0
    L1_solved = (-qb + math.sqrt(qb * qb - 4 * qa * qc)) / (2 * qa)

    def g(L1):
        return _mixture_length_by_quadrature(a, L1, N) / N

    x = a
    for it in range(1, FIXED_POINT_MAX_ITER + 1):
        x1 = g(x)
        x2 = g(x1)
        denom = x2 - 2.0 * x1 + x
        x_new = x - (x1 - x) ** 2 / denom if denom != 0 else x2
        if not (x_new > 0 and math.isfinite(x_new)):
            x_new = x2
        if abs(x_new - x) <= FIXED_POINT_TOL * a:
            x = x_new
            break
        x = x_new
    else:
        raise NoConvergence(f"segment length did not settle in {FIXED_POINT_MAX_ITER} iterations")

    L1_alt = a * math.sqrt(1.0 / 3.0 - 1.0 / (2.0 * PI2))
    return SelfConsistencyReport(
        N=N,
        a=a,
        L1_solved=L1_solved,
        L1_numeric=x,
        L1_alternate_coefficient=L1_alt,
        coefficient_discrepancy_flag=abs(L1_solved - L1_alt) > 1e-9 * a,
        L_direct=_mixture_length_by_quadrature(a, x, N),
        iterations=it,
        quadratic=(c0, c1, c2),
    )


def entangled_segment_density(N: int, a: float, L1: float,
                              grid_points: int = 4096) -> DensityProfile:
    """One-particle density of N one-particle wells of width ``a`` stacked
    with spacing ``L1``: the plain average of the shifted well densities."""
    if N < 1:
        raise ValueError("need at least one segment")
    if not L1 > 0:
        raise ValueError("segment spacing must be positive")
    if N > 1 and a - L1 >= L1:
        raise ExcessiveOverlap(
            f"spacing {L1} lets a well reach past its neighbour (width {a})"
        )
    d = MixtureOfShiftedWells(a, L1, N)
    lo, hi = d.support()
    x = np.linspace(lo, hi, grid_points)
    return DensityProfile(x, d.pdf(x), N, 1)
