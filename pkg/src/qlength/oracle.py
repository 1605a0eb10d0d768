"""Independent brute-force verifiers.

Nothing here imports the closed-form modules. The quadrature, grid and
series routines are the reference against which the analytic paths are
checked, so they must stay separate from them.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateLevelForFermions,
    InvalidIndex,
    MaxSubdivisionsExceeded,
    NoSignChange,
    QuantumLengthError,
)

# Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss nodes are the odd-indexed Kronrod nodes.
_GAUSS = np.zeros(15)
_GAUSS[1:7:2] = _WG[:3]
_GAUSS[7] = _WG[3]
_GAUSS[9:15:2] = _WG[2::-1]


@dataclass(frozen=True)
class QuadratureSpec:
    lo: float
    hi: float
    tol: float = 1e-10
    max_subdivisions: int = 2000
    breakpoints: tuple[float, ...] = ()

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("quadrature tolerance must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")


def _eval(f, x):
    y = np.asarray(f(x), dtype=float)
    if y.shape != x.shape:
        y = np.array([float(f(xi)) for xi in x])
    return y


def _gk15(f, lo, hi):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    y = _eval(f, mid + half * _NODES)
    k = half * float(y @ _KRONROD)
    g = half * float(y @ _GAUSS)
    return k, abs(k - g)


def integrate(f: Callable, spec: QuadratureSpec) -> float:
    """Globally adaptive Gauss-Kronrod (7, 15) quadrature of ``f`` over
    ``[spec.lo, spec.hi]``.

    The interval with the largest error estimate is bisected until the
    summed estimate drops below ``spec.tol``. ``f`` should accept a numpy
    array; scalar-only callables are evaluated point by point.
    """
    lo, hi = float(spec.lo), float(spec.hi)
    if lo == hi:
        return 0.0
    sign = 1.0
    if hi < lo:
        lo, hi, sign = hi, lo, -1.0
    cuts = sorted({lo, hi, *(b for b in spec.breakpoints if lo < b < hi)})

    heap = []
    total = 0.0
    err = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        k, e = _gk15(f, a, b)
        heapq.heappush(heap, (-e, a, b, k))
        total += k
        err += e
    n_intervals = len(heap)
    while err > spec.tol:
        if n_intervals >= spec.max_subdivisions:
            raise MaxSubdivisionsExceeded(
                f"error estimate {err:.3e} above tolerance {spec.tol:.3e} "
                f"after {n_intervals} subintervals"
            )
        neg_e, a, b, k = heapq.heappop(heap)
        m = 0.5 * (a + b)
        if not a < m < b:
            # interval collapsed to adjacent floats; nothing left to refine
            raise MaxSubdivisionsExceeded("subinterval width reached machine precision")
        k1, e1 = _gk15(f, a, m)
        k2, e2 = _gk15(f, m, b)
        heapq.heappush(heap, (-e1, a, m, k1))
        heapq.heappush(heap, (-e2, m, b, k2))
        total += k1 + k2 - k
        err += e1 + e2 + neg_e
        n_intervals += 1
    # re-sum to shed the drift accumulated by incremental updates
    total = math.fsum(item[3] for item in heap)
    return sign * total


# ---------------------------------------------------------------------------
# Brute-force many-particle grid wavefunctions
# ---------------------------------------------------------------------------

def _box_orbital(n: int, a: float, x: np.ndarray) -> np.ndarray:
    return math.sqrt(2.0 / a) * np.sin(n * math.pi * x / a)


def _perm_parity(perm: Sequence[int]) -> int:
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def _normalization(levels: Sequence[int]) -> float:
    counts = 1
    for _, grp in itertools.groupby(sorted(levels)):
        counts *= math.factorial(len(list(grp)))
    return 1.0 / math.sqrt(math.factorial(len(levels)) * counts)


def _check_levels(levels, statistics):
    levels = [int(n) for n in levels]
    if not levels:
        raise InvalidIndex("at least one level is required")
    if any(n < 1 for n in levels):
        raise InvalidIndex(f"levels must be >= 1, got {levels}")
    if statistics not in ("fermion", "boson"):
        raise ValueError(f"unknown statistics {statistics!r}")
    if statistics == "fermion" and len(set(levels)) != len(levels):
        raise DuplicateLevelForFermions(
            f"two fermions share a level in {levels}; the determinant vanishes"
        )
    return levels


def midpoint_grid(a: float, points: int) -> np.ndarray:
    h = a / points
    return (np.arange(points) + 0.5) * h


@dataclass(frozen=True)
class GridWavefunction:
    """Explicit (anti)symmetrized product state sampled on a P-dimensional
    midpoint grid over ``[0, a]^P``."""

    levels: tuple[int, ...]
    statistics: str
    width: float
    grid_size: int
    amplitudes: np.ndarray

    @property
    def particles(self) -> int:
        return len(self.levels)

    @property
    def spacing(self) -> float:
        return self.width / self.grid_size

    def norm(self) -> float:
        return float(np.sum(self.amplitudes ** 2)) * self.spacing ** self.particles

    def swap(self, i: int, j: int) -> np.ndarray:
        return np.swapaxes(self.amplitudes, i, j)


def build_grid_wavefunction(levels: Sequence[int], a: float, statistics: str = "fermion",
                            grid_size: int = 64) -> GridWavefunction:
    levels = _check_levels(levels, statistics)
    x = midpoint_grid(a, grid_size)
    psi = _product_sum(levels, statistics, [x] * len(levels), a)
    return GridWavefunction(tuple(levels), statistics, a, grid_size, psi)


def _product_sum(orbitals, statistics, axes, a, spins=None, orbital_spins=None, labels=None):
    """Sum over permutations of outer products of orbitals evaluated on
    ``axes``. With spin labels, permutations assigning an orbital to a
    particle of the opposite spin contribute nothing."""
    P = len(orbitals)
    shape = tuple(len(ax) for ax in axes)
    psi = np.zeros(shape)
    cache = {}
    for perm in itertools.permutations(range(P)):
        if spins is not None and any(spins[k] != orbital_spins[perm[k]] for k in range(P)):
            continue
        sign = _perm_parity(perm) if statistics == "fermion" else 1
        term = None
        for k in range(P):
            key = (k, orbitals[perm[k]])
            if key not in cache:
                cache[key] = _box_orbital(orbitals[perm[k]], a, axes[k])
            vec = cache[key].reshape([-1 if d == k else 1 for d in range(P)])
            term = vec if term is None else term * vec
        psi += sign * term
    return psi * _normalization(orbitals if labels is None else labels)


def brute_force_spread(levels: Sequence[int], a: float = 1.0, statistics: str = "fermion",
                       grid_size: int = 256, spin_orbitals: bool = False,
                       slab: int = 32) -> float:
    """Position variance of particle 1 from the explicit many-particle grid
    wavefunction.

    With ``spin_orbitals=True`` the entries of ``levels`` are spin-orbital
    labels: odd ``k`` is spin up in spatial level ``(k + 1) // 2`` and even
    ``k`` is spin down in level ``k // 2``. Spin is summed over, never
    sampled on the grid.
    """
    levels = _check_levels(levels, statistics)
    P = len(levels)
    if not 1 <= P <= 3:
        raise ValueError("the grid oracle supports 1 to 3 particles")
    if grid_size < 2 * max(levels):
        raise ValueError("grid too coarse for the highest level")

    if spin_orbitals:
        spatial = [(k + 1) // 2 for k in levels]
        orb_spins = [k % 2 for k in levels]
        spin_configs = list(itertools.product((0, 1), repeat=P))
    else:
        spatial = levels
        orb_spins = None
        spin_configs = [None]

    x = midpoint_grid(a, grid_size)
    h = a / grid_size
    rho1 = np.zeros(grid_size)
    for spins in spin_configs:
        for start in range(0, grid_size, slab):
            xs = x[start:start + slab]
            psi = _product_sum(spatial, statistics, [xs] + [x] * (P - 1), a,
                               spins=spins, orbital_spins=orb_spins, labels=levels)
            prob = psi ** 2
            rho1[start:start + slab] += prob.reshape(len(xs), -1).sum(axis=1) * h ** (P - 1)

    norm = float(rho1.sum() * h)
    if abs(norm - 1.0) > 1e-8:
        raise QuantumLengthError(f"grid wavefunction norm {norm!r} deviates from 1")
    m1 = float(np.sum(x * rho1) * h)
    m2 = float(np.sum(x * x * rho1) * h)
    return m2 - m1 * m1


# ---------------------------------------------------------------------------
# Series and integer searches
# ---------------------------------------------------------------------------

def partial_zeta2(m: int) -> float:
    """Direct sum of 1/n**2 for n = 1..m, correctly rounded."""
    if m < 1:
        raise InvalidIndex("partial_zeta2 needs m >= 1")
    return math.fsum(1.0 / (n * n) for n in range(1, m + 1))


def zeta2_tail_bounds(m: int) -> tuple[float, float]:
    """Bounds (lower, upper) on pi**2/6 - partial_zeta2(m)."""
    return 1.0 / (m + 1), 1.0 / m


def find_sign_change(f: Callable[[int], float], lo: int, hi: int,
                     admissible: Iterable[int] | None = None) -> int:
    """Bisect over admissible integers in ``[lo, hi]`` for the point where
    ``f`` changes sign; return whichever bracketing integer has the smaller
    ``|f|``.

    ``f`` need not be monotone, but only one crossing is located.
    """
    if admissible is None:
        pts = list(range(lo, hi + 1))
    else:
        pts = sorted(r for r in set(admissible) if lo <= r <= hi)
    if not pts:
        raise NoSignChange("no admissible integers in range")
    i, j = 0, len(pts) - 1
    fi, fj = f(pts[i]), f(pts[j])
    if fi == 0:
        return pts[i]
    if fj == 0:
        return pts[j]
    if (fi > 0) == (fj > 0):
        raise NoSignChange(f"f({pts[i]}) and f({pts[j]}) have the same sign")
    while j - i > 1:
        k = (i + j) // 2
        fk = f(pts[k])
        if fk == 0:
            return pts[k]
        if (fk > 0) == (fi > 0):
            i, fi = k, fk
        else:
            j, fj = k, fk
    return pts[i] if abs(fi) <= abs(fj) else pts[j]
