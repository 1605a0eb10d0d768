"""Object and ruler boxes brought into contact: Fermi-level matching,
electron transfer between the two, and the resulting length ratios.

Energies are in natural units (hbar = m = 1). Box widths are set by the
nuclei and never change; only the occupations move.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

from .errors import EmptySubsystem, InvalidIndex, OddElectronCount
from .manybody import (
    DEFAULT_GRID,
    BoxSystem,
    DensityProfile,
    FillingPlan,
    Statistics,
    electron_density,
    plan_length,
)

PI2 = math.pi ** 2


class TransferPolicy(str, Enum):
    NONE = "none"
    PAIRWISE = "pairwise"
    SINGLE = "single"


def _aufbau(electrons: int) -> tuple[tuple[int, int], ...]:
    pairs, single = divmod(electrons, 2)
    occ = [(n, 2) for n in range(1, pairs + 1)]
    if single:
        occ.append((pairs + 1, 1))
    return tuple(occ)


@dataclass(frozen=True)
class MaterialBox:
    """A one-dimensional crystal of ``cells`` unit cells of size ``lattice``.

    ``occupations`` maps level to electron count (1 or 2) as sorted pairs.
    """

    lattice: float
    cells: int
    occupations: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if not self.lattice > 0:
            raise ValueError("lattice constant must be positive")
        if int(self.cells) != self.cells or self.cells < 1:
            raise ValueError("a box needs at least one unit cell")
        occ = tuple(sorted((int(n), int(k)) for n, k in self.occupations if k))
        for n, k in occ:
            if n < 1:
                raise InvalidIndex(f"level index must be >= 1, got {n}")
            if not 0 < k <= 2:
                raise ValueError(f"level {n} holds {k} electrons; allowed 1 or 2")
        if len({n for n, _ in occ}) != len(occ):
            raise ValueError("each level may appear once")
        object.__setattr__(self, "occupations", occ)

    @classmethod
    def ground_state(cls, lattice: float, electrons: int) -> "MaterialBox":
        """Neutral box: two electrons per cell, filled from the bottom."""
        if electrons < 2 or electrons % 2:
            raise OddElectronCount(f"a neutral box holds an even electron count, got {electrons}")
        return cls(lattice, electrons // 2, _aufbau(electrons))

    @property
    def width(self) -> float:
        return self.lattice * self.cells

    @property
    def electrons(self) -> int:
        return sum(k for _, k in self.occupations)

    def occupancy(self) -> dict[int, int]:
        return dict(self.occupations)

    def energy(self) -> float:
        return math.fsum(k * level_energy(self, n) for n, k in self.occupations)

    def length(self) -> Optional[float]:
        """Quantum length of the box's electrons, or None when it is empty."""
        if not self.occupations:
            return None
        plan = FillingPlan(Statistics.FERMION, self.occupations)
        return plan_length(plan, self.width)

    def with_occupancy(self, occ: dict[int, int]) -> "MaterialBox":
        return replace(self, occupations=tuple((n, k) for n, k in occ.items() if k))


def level_energy(box: MaterialBox, n: int) -> float:
    """Single-electron level energy pi^2 n^2 / (2 W^2) for the box's fixed width."""
    if int(n) != n or n < 1:
        raise InvalidIndex(f"level index must be a positive integer, got {n}")
    return PI2 * n * n / (2.0 * box.width ** 2)


def fermi_matching_ratio(object_N: int, ruler_N: int, ruler_level: int | None = None) -> float:
    """Critical a0/b0 at which a ruler level meets the object's lowest empty level.

    By default the ruler level is its Fermi level; pass ``ruler_level=1`` for
    the threshold above which even the ruler's lowest level lies higher.
    """
    for N in (object_N, ruler_N):
        if N < 2 or N % 2:
            raise OddElectronCount(f"electron counts must be even and >= 2, got {N}")
    k = ruler_N // 2 if ruler_level is None else int(ruler_level)
    if not 1 <= k <= ruler_N // 2:
        raise InvalidIndex(f"ruler level {k} is not occupied in a {ruler_N}-electron ruler")
    lowest_empty = object_N // 2 + 1
    # n^2 / (N a0)^2 = k^2 / (N_r b0)^2
    return (lowest_empty / object_N) * (ruler_N / k)


@dataclass(frozen=True)
class MeasurementScenario:
    object: MaterialBox
    ruler: MaterialBox
    policy: TransferPolicy = TransferPolicy.PAIRWISE

    def __post_init__(self):
        object.__setattr__(self, "policy", TransferPolicy(self.policy))

    @property
    def electrons(self) -> int:
        return self.object.electrons + self.ruler.electrons

    def energy(self) -> float:
        return self.object.energy() + self.ruler.energy()

    def classical_ratio(self) -> float:
        return self.object.width / self.ruler.width

    def quantum_ratio(self) -> Optional[float]:
        lo, lr = self.object.length(), self.ruler.length()
        if lo is None or lr is None:
            return None
        return lo / lr


@dataclass(frozen=True)
class Transfer:
    direction: str  # "ruler->object" or "object->ruler"
    donor_level: int
    acceptor_level: int
    photon_energy: float


@dataclass(frozen=True)
class ScenarioReport:
    classical_ratio: float
    initial_quantum_ratio: Optional[float]
    quantum_ratio: Optional[float]  # None when either box is empty
    transfers: int
    photon_energies: tuple[float, ...]
    log: tuple[Transfer, ...]
    final: MeasurementScenario
    initial_energy: float
    final_energy: float

    @property
    def final_occupations(self) -> tuple[tuple[tuple[int, int], ...], tuple[tuple[int, int], ...]]:
        return self.final.object.occupations, self.final.ruler.occupations

    @property
    def final_counts(self) -> tuple[int, int]:
        return self.final.object.electrons, self.final.ruler.electrons


def _top_level(occ: dict[int, int]) -> Optional[int]:
    return max((n for n, k in occ.items() if k), default=None)


def _lowest_vacancy(occ: dict[int, int]) -> int:
    n = 1
    while occ.get(n, 0) >= 2:
        n += 1
    return n


def _move(donor: MaterialBox, acceptor: MaterialBox, count: int):
    """Move up to ``count`` electrons from donor's top to acceptor's bottom.

    Returns the new boxes, the summed energy change and the per-electron
    (donor level, acceptor level, photon energy) steps, or None if the donor
    is empty.
    """
    d_occ, a_occ = donor.occupancy(), acceptor.occupancy()
    steps = []
    delta = 0.0
    for _ in range(count):
        top = _top_level(d_occ)
        if top is None:
            break
        low = _lowest_vacancy(a_occ)
        e_out = level_energy(donor, top)
        e_in = level_energy(acceptor, low)
        d_occ[top] -= 1
        a_occ[low] = a_occ.get(low, 0) + 1
        steps.append((top, low, e_out - e_in))
        delta += e_in - e_out
    if not steps:
        return None
    return donor.with_occupancy(d_occ), acceptor.with_occupancy(a_occ), delta, steps


def relax(scenario: MeasurementScenario) -> ScenarioReport:
    """Transfer electrons between the boxes while doing so strictly lowers
    the total energy.

    Each step moves one electron (single) or up to two (pairwise) from the
    highest occupied level of one box to the lowest vacancy of the other,
    choosing whichever direction lowers the energy more. Every moved electron
    emits a photon carrying the energy difference of the two levels.
    """
    classical = scenario.classical_ratio()
    initial_q = scenario.quantum_ratio()
    e0 = scenario.energy()
    count = {TransferPolicy.NONE: 0, TransferPolicy.PAIRWISE: 2, TransferPolicy.SINGLE: 1}[
        scenario.policy
    ]
    obj, rul = scenario.object, scenario.ruler
    log: list[Transfer] = []
    # each accepted move strictly lowers a finite set of configurations' energy
    while count:
        best = None
        for name, donor, acceptor in (("ruler->object", rul, obj), ("object->ruler", obj, rul)):
            moved = _move(donor, acceptor, count)
            if moved is None:
                continue
            new_d, new_a, delta, steps = moved
            if delta < 0 and (best is None or delta < best[0]):
                best = (delta, name, new_d, new_a, steps)
        if best is None:
            break
        _, name, new_d, new_a, steps = best
        if name == "ruler->object":
            rul, obj = new_d, new_a
        else:
            obj, rul = new_d, new_a
        log.extend(Transfer(name, d, a, e) for d, a, e in steps)

    final = MeasurementScenario(obj, rul, scenario.policy)
    if final.electrons != scenario.electrons:
        raise AssertionError("electron count changed during relaxation")
    return ScenarioReport(
        classical_ratio=classical,
        initial_quantum_ratio=initial_q,
        quantum_ratio=final.quantum_ratio(),
        transfers=len(log),
        photon_energies=tuple(t.photon_energy for t in log),
        log=tuple(log),
        final=final,
        initial_energy=e0,
        final_energy=final.energy(),
    )


def subsystem_density(scenario: MeasurementScenario, which: str,
                      grid_points: int = DEFAULT_GRID) -> DensityProfile:
    """Renormalized one-electron density of the object or the ruler alone."""
    if which not in ("object", "ruler"):
        raise ValueError(f"which must be 'object' or 'ruler', got {which!r}")
    box = scenario.object if which == "object" else scenario.ruler
    if not box.occupations:
        raise EmptySubsystem(f"the {which} holds no electrons")
    plan = FillingPlan(Statistics.FERMION, box.occupations)
    return electron_density(BoxSystem.fixed(box.width), plan, grid_points)


@dataclass(frozen=True)
class TableColumn:
    label: str
    lattice_ratio: float
    policy: TransferPolicy
    report: ScenarioReport = field(repr=False)

    @property
    def classical_ratio(self) -> float:
        return self.report.classical_ratio

    @property
    def quantum_ratio(self) -> Optional[float]:
        return self.report.quantum_ratio


def table_scenarios(object_N: int = 10, ruler_N: int = 4, epsilon: float = 1e-6,
                    ruler_lattice: float = 1.0) -> list[TableColumn]:
    """The four contact scenarios: just past the Fermi-matching ratio and
    just past the lowest-level threshold, each before and after transfer."""
    cols = []
    r_fermi = fermi_matching_ratio(object_N, ruler_N)
    r_low = fermi_matching_ratio(object_N, ruler_N, ruler_level=1)
    for label, ratio, policy in (
        ("a", r_fermi, TransferPolicy.NONE),
        ("b", r_fermi, TransferPolicy.PAIRWISE),
        ("c", r_low, TransferPolicy.NONE),
        ("d", r_low, TransferPolicy.PAIRWISE),
    ):
        lat = ratio * (1.0 + epsilon) * ruler_lattice
        sc = MeasurementScenario(
            MaterialBox.ground_state(lat, object_N),
            MaterialBox.ground_state(ruler_lattice, ruler_N),
            policy,
        )
        cols.append(TableColumn(label, ratio * (1.0 + epsilon), policy, relax(sc)))
    return cols
