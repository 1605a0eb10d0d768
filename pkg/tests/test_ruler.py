import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qlength.errors import ExcessiveOverlap, IndivisibleSegmentation
from qlength.manybody import Statistics, fermion_length
from qlength.moments import length_L2
from qlength.ruler import (
    RulerSpec,
    admissible_rulings,
    cutting_energy,
    entangled_segment_density,
    optimal_ruling,
    precision_condition_residual,
    segment_length,
    self_consistent_segment_length,
)

GROUND = math.sqrt(1 - 6 / math.pi ** 2)


def test_admissible_rulings():
    assert admissible_rulings(24) == [1, 2, 3, 4, 6, 12]
    assert admissible_rulings(12, Statistics.BOSON) == [1, 2, 3, 4, 6, 12]


@pytest.mark.parametrize("N, R", [(7, 1), (12, 4), (12, 7), (12, 0)])
def test_inadmissible_fermion_rulings(N, R):
    with pytest.raises(IndivisibleSegmentation):
        RulerSpec(1.0, N, R)


def test_segmented_lengths():
    mono = segment_length(RulerSpec(1.0, 100))
    assert mono.total == pytest.approx(49.5035543002325, abs=1e-10)
    cut = segment_length(RulerSpec(1.0, 100, 50))
    assert cut.total == pytest.approx(31.30786235700121, abs=1e-10)
    assert cut.per_segment == pytest.approx(GROUND, abs=1e-12)
    assert cut.overestimate == pytest.approx(mono.total - cut.total)


@given(N=st.integers(1, 200).map(lambda k: 2 * k))
def test_maximal_segmentation_ratio(N):
    res = segment_length(RulerSpec(1.0, N, N // 2))
    assert res.total / (N / 2) == pytest.approx(GROUND, abs=1e-12)


def test_boson_ruler_independent_of_ruling():
    N = 100
    totals = {R: segment_length(RulerSpec(1.0, N, R, "boson")).total
              for R in admissible_rulings(N, "boson")}
    assert len(set(totals.values())) == 1
    assert totals[1] == pytest.approx(62.61572471400242, abs=1e-10)


def test_cutting_energy_fermion():
    N = 10 ** 6
    en = cutting_energy(RulerSpec(1.0, N, N // 2))
    assert en.ratio == pytest.approx(2.999991000021, abs=1e-12)
    assert en.work > 0
    en1 = cutting_energy(RulerSpec(1.0, 10, 1))
    assert en1.ratio == 1.0 and en1.work == 0.0


@pytest.mark.parametrize("R", [1, 2, 10])
def test_cutting_energy_boson_ratio(R):
    en = cutting_energy(RulerSpec(0.7, 20, R, "boson"))
    assert en.ratio == R * R
    assert en.E_G == pytest.approx(1 / (8 * 20 * 0.49))


def test_precision_residual_values_and_sweep():
    assert precision_condition_residual(10 ** 4, 100) == pytest.approx(-7.1086e-05, abs=1e-8)
    assert precision_condition_residual(10 ** 4, 2) < 0 < precision_condition_residual(10 ** 4, 5000)
    assert optimal_ruling(10 ** 4).R_sweep == 100


def test_optimal_ruling_large_rod():
    opt = optimal_ruling(2 * 10 ** 9, a0=1e-10)
    assert opt.R_star == 44721
    assert opt.delta_L == pytest.approx(2.23606797749979e-06, rel=1e-12)
    assert opt.R_sweep == 50000


def test_optimal_ruling_small_rod_falls_back():
    assert optimal_ruling(4).R_sweep == 2
    with pytest.raises(IndivisibleSegmentation):
        optimal_ruling(5)


@pytest.mark.parametrize("N", [2, 3, 5, 10])
def test_self_consistent_segment_length(N):
    rep = self_consistent_segment_length(1.0, N)
    assert rep.L1_numeric == pytest.approx(GROUND, abs=1e-9)
    assert rep.L1_solved == pytest.approx(GROUND, abs=1e-12)
    assert rep.L1_alternate_coefficient == pytest.approx(0.531670, abs=1e-6)
    assert rep.coefficient_discrepancy_flag
    assert rep.L_direct == pytest.approx(N * rep.L1_numeric, abs=1e-9)
    assert rep.iterations <= 100
    c0, c1, c2 = rep.quadratic
    assert c1 == pytest.approx(0.0, abs=1e-12) and c2 == pytest.approx(N * N - 1)


def test_self_consistency_scales_with_width():
    rep = self_consistent_segment_length(3.0, 4)
    assert rep.L1_numeric == pytest.approx(3.0 * GROUND, rel=1e-9)


def test_entangled_density():
    prof = entangled_segment_density(3, 1.0, GROUND, grid_points=20001)
    assert prof.norm == pytest.approx(1.0, abs=1e-6)
    assert prof.symmetry_error() < 1e-9
    assert length_L2(prof.to_density()).L2 == pytest.approx(3 * GROUND, abs=1e-6)
    with pytest.raises(ExcessiveOverlap):
        entangled_segment_density(3, 1.0, 0.4)


def test_single_segment_density_is_box_ground_state():
    prof = entangled_segment_density(1, 1.0, 0.3, grid_points=101)
    assert np.allclose(prof.values, 2 * np.sin(math.pi * prof.grid) ** 2)
    assert length_L2(prof.to_density()).L2 == pytest.approx(fermion_length(1.0, 2), abs=1e-3)
