import math

import numpy as np
import pytest

from experiments.density import random_lengths
from graph.graph_model import flower, interval, scaled, star
from spectral.errors import GuardExceededError
from spectral.scattering import build_bond_scattering
from spectral.solver import (crossing_count, determinant_phase_error,
                             eigenphases, multiplicity, phase_speeds,
                             scale_spectrum, solve_spectrum, weyl_check)


def test_interval_spectrum_is_integers(interval_bs):
    window = solve_spectrum(interval_bs, [math.pi], 0.5, 100.5)
    assert len(window) == 100
    assert all(r.multiplicity == 1 for r in window.records)
    assert np.abs(window.ks() - np.arange(1, 101)).max() <= 1e-9
    assert max(r.residual for r in window.records) <= 1e-9


def test_equilateral_star_double_eigenvalue(equilateral_star_bs):
    window = solve_spectrum(equilateral_star_bs, [1.0, 1.0, 1.0], 1.0, 2.0)
    assert len(window) == 1
    record = window.records[0]
    assert record.k == pytest.approx(math.pi / 2, abs=1e-9)
    assert record.multiplicity == 2
    assert record.kernel_basis.shape == (6, 2)


def test_equilateral_star_low_spectrum(equilateral_star_bs):
    # cos k = 0 with multiplicity 2, sin k = 0 simple
    window = solve_spectrum(equilateral_star_bs, [1.0, 1.0, 1.0], 0.1, 7.0)
    expected = [(math.pi / 2, 2), (math.pi, 1), (3 * math.pi / 2, 2), (2 * math.pi, 1)]
    assert [(pytest.approx(k, abs=1e-9), m) for k, m in expected] == \
        [(r.k, r.multiplicity) for r in window.records]


@pytest.mark.parametrize("g", [star(random_lengths(3, seed=21)), flower([1.0, math.sqrt(2.0)])],
                         ids=["star3", "flower2"])
def test_weyl_law(g):
    bs = build_bond_scattering(g)
    k_max = 2000 * math.pi / g.total_length
    window = solve_spectrum(bs, g.lengths, 1e-6, k_max)
    report = weyl_check(window)
    assert abs(report.count - report.predicted) <= 2 * g.n_edges
    assert not report.flagged


def test_crossing_count_on_interval(interval_bs):
    assert crossing_count(interval_bs, [math.pi], 0.5, 1.2) == 1
    assert crossing_count(interval_bs, [math.pi], 1.2, 1.7) == 0
    with pytest.raises(ValueError):
        crossing_count(interval_bs, [math.pi], 0.5, 3.0)


def test_determinant_phase_identity(random_star):
    bs = build_bond_scattering(random_star)
    for k in (0.3, 2.7, 41.9):
        assert determinant_phase_error(bs, random_star.lengths, k) <= 1e-12


def test_eigenphases_sorted_in_range(random_star):
    bs = build_bond_scattering(random_star)
    phases = eigenphases(bs, random_star.lengths, 3.3)
    assert len(phases) == 6
    assert np.all(np.diff(phases) >= 0)
    assert phases.min() >= 0 and phases.max() < 2 * math.pi


def test_multiplicity_at_singular_point(equilateral_star_bs):
    dim, basis = multiplicity(equilateral_star_bs, np.full(3, 1j))
    assert dim == 2
    assert basis.shape == (6, 2)


@pytest.mark.parametrize("r", [0.5, 2.0, 3.7])
def test_spectrum_scales_inversely_with_lengths(random_star, r):
    bs = build_bond_scattering(random_star)
    base = solve_spectrum(bs, random_star.lengths, 0.1, 30.0)
    big = scaled(random_star, r)
    direct = solve_spectrum(bs, big.lengths, 0.1 / r, 30.0 / r)
    predicted = scale_spectrum(base, r)
    assert len(direct) == len(predicted)
    assert np.abs(direct.ks() - predicted.ks()).max() <= 1e-9 * (1 + 30.0 / r)


def test_workers_give_the_same_spectrum(random_star):
    bs = build_bond_scattering(random_star)
    serial = solve_spectrum(bs, random_star.lengths, 0.1, 60.0)
    parallel = solve_spectrum(bs, random_star.lengths, 0.1, 60.0, workers=4)
    assert np.array_equal(serial.ks(), parallel.ks())


def test_window_guard(random_star):
    bs = build_bond_scattering(random_star)
    with pytest.raises(GuardExceededError):
        solve_spectrum(bs, random_star.lengths, 0.1, 1e4, max_expected=100)


def test_invalid_window(interval_bs):
    with pytest.raises(ValueError):
        solve_spectrum(interval_bs, [math.pi], 2.0, 1.0)
    with pytest.raises(ValueError):
        solve_spectrum(interval_bs, [math.pi], 0.0, 1.0)


@pytest.mark.parametrize("k_max", [2.0, 3.0, 5.0, 10.0, 33.0])
def test_eigenvalue_at_k_max_is_included(interval_bs, k_max):
    window = solve_spectrum(interval_bs, [math.pi], 0.5, k_max)
    assert len(window) == int(k_max)
    assert window.records[-1].k == pytest.approx(k_max, abs=1e-9)
    assert window.records[-1].k <= k_max


@pytest.mark.parametrize("k_min", [1.0, 2.0, 3.0, 4.0])
def test_eigenvalue_at_k_min_is_excluded(interval_bs, k_min):
    window = solve_spectrum(interval_bs, [math.pi], k_min, 10.5)
    assert window.records[0].k == pytest.approx(k_min + 1.0, abs=1e-9)
    assert len(window) == 10 - int(k_min)


def test_double_eigenvalue_at_k_max(equilateral_star_bs):
    window = solve_spectrum(equilateral_star_bs, [1.0, 1.0, 1.0], 0.1, math.pi / 2)
    assert window.total_count == 2
    assert window.records[0].multiplicity == 2
    assert window.records[0].k == pytest.approx(math.pi / 2, abs=1e-9)


def test_halving_the_grid_step_finds_nothing_new(random_star):
    bs = build_bond_scattering(random_star)
    lengths = random_star.lengths
    k_max = 300 * math.pi / random_star.total_length
    coarse = solve_spectrum(bs, lengths, 0.1, k_max)
    fine = solve_spectrum(bs, lengths, 0.1, k_max, step=0.25 * math.pi / max(lengths))
    assert coarse.total_count == fine.total_count
    assert np.abs(coarse.ks() - fine.ks()).max() <= 1e-9


def test_phase_speeds_lie_between_shortest_and_longest_edge(random_star):
    bs = build_bond_scattering(random_star)
    lengths = random_star.lengths
    for k in (0.7, 3.1, 17.9):
        speeds = phase_speeds(bs, lengths, k)
        assert speeds.min() >= min(lengths) - 1e-10
        assert speeds.max() <= max(lengths) + 1e-10
        assert speeds.sum() == pytest.approx(2 * random_star.total_length, abs=1e-9)


def test_flower_spectrum_holds_both_loop_families():
    g = flower([1.0, math.sqrt(2.0)])
    window = solve_spectrum(build_bond_scattering(g), g.lengths, 0.1, 30.0)
    ks = window.ks()
    expected = [2 * math.pi * n for n in range(1, 5)]
    expected += [2 * math.pi * n / math.sqrt(2.0) for n in range(1, 7)]
    for k in expected:
        assert np.abs(ks - k).min() <= 1e-9


def test_interval_window_ends_on_integer():
    g = interval(math.pi)
    window = solve_spectrum(build_bond_scattering(g), g.lengths, 1e-6, 5.0)
    assert window.ks().tolist() == pytest.approx([1.0, 2.0, 3.0, 4.0, 5.0], abs=1e-9)
