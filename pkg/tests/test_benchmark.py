import numpy as np
import pytest

from pwlab.benchmark import PRESETS, benchmark_rmse, run_preset
from pwlab.mixture import MixingLaw, MixtureParams

P = MixtureParams(0.1, 1.0)
EXP1 = MixingLaw.exponential(1.0)
GRID = (0.5, 1.0, 2.0)


def small(seed=3, threads=1, replicates=6):
    return benchmark_rmse(P, EXP1, EXP1.density, n_list=(100, 400), N_list=(3, 5), x_grid=GRID,
                          replicates=replicates, seed=seed, threads=threads)


def test_report_layout():
    rep = small()
    assert [(c.n, c.N) for c in rep.cells] == [(100, 3), (100, 5), (400, 3), (400, 5)]
    c = rep.cell(400, 5)
    assert c.estimates.shape == (6, 3)
    assert np.array_equal(c.p_true, np.exp(-np.array(GRID)))
    assert len(list(rep.rows())) == 12
    with pytest.raises(KeyError):
        rep.cell(400, 7)


def test_cell_statistics():
    c = small().cell(100, 3)
    re = c.estimates.real
    assert np.allclose(c.mean, re.mean(axis=0))
    assert np.allclose(c.variance, re.var(axis=0, ddof=1))
    assert np.allclose(c.rmse**2, ((re - c.p_true) ** 2).mean(axis=0))
    assert c.aggregated_rmse == pytest.approx(np.sqrt(np.mean(c.rmse**2)))


def test_best_picks_smallest_aggregate():
    rep = small()
    best = rep.best(100)
    assert best.aggregated_rmse == min(rep.cell(100, N).aggregated_rmse for N in (3, 5))


def test_same_seed_same_report():
    a, b = small(), small()
    for ca, cb in zip(a.cells, b.cells):
        assert np.array_equal(ca.estimates, cb.estimates)


def test_threads_do_not_change_report():
    a, b = small(), small(threads=3)
    for ca, cb in zip(a.cells, b.cells):
        assert np.array_equal(ca.estimates, cb.estimates)


def test_seed_changes_report():
    assert not np.array_equal(small(seed=3).cells[0].estimates, small(seed=4).cells[0].estimates)


def test_replicate_streams_are_prefix_stable():
    # replicate r depends only on (seed, r)
    a, b = small(replicates=4), small(replicates=6)
    assert np.array_equal(a.cells[0].estimates, b.cells[0].estimates[:4])


def test_needs_two_replicates():
    with pytest.raises(ValueError):
        small(replicates=1)


def test_preset_with_overrides():
    rep = run_preset("figure1", replicates=2, seed=0, n_list=(200,), N_list=(4,), x_grid=(1.0,))
    assert [(c.n, c.N) for c in rep.cells] == [(200, 4)]
    assert rep.cells[0].p_true[0] == pytest.approx(np.exp(-1))


def test_preset_defaults():
    pre = PRESETS["figure1"]
    assert pre["N_list"] == (5, 10, 15, 20) and pre["n_list"] == (10000, 50000)
    assert pre["params"] == P


def test_unknown_preset():
    with pytest.raises(ValueError):
        run_preset("figure9", replicates=2, seed=0)
