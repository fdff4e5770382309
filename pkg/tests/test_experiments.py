import math

import numpy as np
import pytest

from uwbpowergame.channel import ChannelConfig, db_to_linear
from uwbpowergame.experiments import (
    AggregateStats,
    Scenario,
    closed_form,
    run_ensemble,
    run_paired,
    sweep_gain,
    sweep_loss,
)
from uwbpowergame.game import GameParams
from uwbpowergame.rake import RakeConfig

SMALL = ChannelConfig(num_users=4, num_paths=40, pdp_ratio=db_to_linear(20.0))


def small(mode="uwb", n=8, seed=1, N=200, nc=20, rho=1.0):
    return Scenario(SMALL, RakeConfig(rho, nc, N), GameParams(), mode, n, seed)


def test_scenario_validation():
    with pytest.raises(ValueError):
        Scenario(SMALL, RakeConfig(1.0, 4, 64), mode="cdma")
    with pytest.raises(ValueError):
        Scenario(SMALL, RakeConfig(1.0, 1, 64), mode="tdma")
    with pytest.raises(ValueError):
        Scenario(SMALL, RakeConfig(1.0, 1, 64), mode="cdma", n_realizations=0)
    s = small().with_gain(400, 1)
    assert s.mode == "cdma" and s.processing_gain == 400


def test_single_realization_is_deterministic():
    a = run_ensemble(small(n=1))
    b = run_ensemble(small(n=1))
    assert a.mean_normalized_utility == b.mean_normalized_utility
    assert math.isnan(a.std_error)


def test_seed_changes_result():
    assert run_ensemble(small(seed=1)).mean_normalized_utility != run_ensemble(small(seed=2)).mean_normalized_utility


def test_workers_do_not_change_results():
    serial = run_paired(SMALL, [RakeConfig(1.0, 1, 200), RakeConfig(1.0, 20, 200)], GameParams(), 12, 5, workers=1)
    parallel = run_paired(SMALL, [RakeConfig(1.0, 1, 200), RakeConfig(1.0, 20, 200)], GameParams(), 12, 5, workers=3)
    for s, p in zip(serial, parallel):
        assert s.mean_normalized_utility == p.mean_normalized_utility
        assert s.std_error == p.std_error
        assert s.mean_loss_db == p.mean_loss_db


def test_pairing_reuses_channels():
    paired = run_paired(SMALL, [RakeConfig(1.0, 1, 200), RakeConfig(1.0, 20, 200)], GameParams(), 10, 9)
    alone = run_ensemble(small(mode="cdma", nc=1, n=10, seed=9))
    assert paired[0].mean_normalized_utility == alone.mean_normalized_utility
    assert paired[0].mean_loss_db is None
    expected = 10 * math.log10(paired[1].mean_normalized_utility / paired[0].mean_normalized_utility)
    assert paired[1].mean_loss_db == pytest.approx(expected, rel=1e-14)


def test_std_error_scales_with_sqrt_n():
    a = run_ensemble(small(n=250, seed=3))
    b = run_ensemble(small(n=1000, seed=3))
    assert 1.6 < a.std_error / b.std_error < 2.5


def test_counts_and_metadata():
    st = run_ensemble(small(n=5))
    assert st.rejection_count == 0 and st.nonconverged_count == 0 and not st.failed
    assert st.metadata == {"N": 200, "Nf": 10.0, "Nc": 20, "K": 4, "L": 40,
                           "lambda_db": pytest.approx(20.0), "rho": 1.0, "mode": "uwb"}


def test_failed_flag_threshold():
    assert AggregateStats(1.0, 0.1, 100, nonconverged_count=2).failed
    assert not AggregateStats(1.0, 0.1, 100, nonconverged_count=1).failed


def test_closed_form_nan_when_infeasible():
    ch = ChannelConfig(10, 200, db_to_linear(20.0))
    assert math.isnan(closed_form(ch, RakeConfig(1.0, 1, 128), GameParams()))
    assert closed_form(ch, RakeConfig(1.0, 1, 512), GameParams()) > 0


def test_sweep_gain_empty():
    assert sweep_gain(small(), [], [1, 20]) == []


def test_sweep_gain_skips_incompatible_cells():
    rows = sweep_gain(small(n=2), [200, 210], [1, 20])
    cells = [r for r in rows if "note" not in r]
    notes = [r for r in rows if "note" in r]
    assert [(r["N"], r["Nc"]) for r in cells] == [(200, 1), (200, 20), (210, 1)]
    assert len(notes) == 1 and "210" in notes[0]["note"]
    rows = sweep_gain(small(n=2), [210], [1, 20], fractional_frames=True)
    assert [r["Nf"] for r in rows] == [210.0, 10.5]


def test_sweep_gain_closed_form_ordering_and_loss_trend():
    base = Scenario(ChannelConfig(10, 200, db_to_linear(20.0)), RakeConfig(1.0, 1, 400), n_realizations=2)
    rows = sweep_gain(base, [400, 600, 1000], [1, 10, 50], [0.2, 1.0])
    for N in (400, 600, 1000):
        for rho in (0.2, 1.0):
            cell = {r["Nc"]: r for r in rows if r["N"] == N and r["rho"] == rho}
            assert cell[50]["closed_form_util_norm"] >= cell[10]["closed_form_util_norm"] >= cell[1]["closed_form_util_norm"]
    for rho in (0.2, 1.0):
        losses = [r["loss_db"] for r in rows if r["rho"] == rho and r["Nc"] == 50]
        assert np.all(np.diff(losses) < 0)


def fig3_rows():
    base = Scenario(ChannelConfig(10, 200, db_to_linear(20.0)), RakeConfig(1.0, 50, 1000))
    return sweep_loss(base, [512, 1024, 2048], [10, 20], [200, 500], [0.2, 1.0], chips_per_frame=50)


def test_sweep_loss_small_and_decreasing_in_paths():
    rows = fig3_rows()
    assert all(r["feasible"] and 0 <= r["loss_db"] < 1.0 for r in rows)
    by_key = {(r["N"], r["K"], r["rho"], r["L"]): r["loss_db"] for r in rows}
    for (N, K, rho, L), value in by_key.items():
        if L == 200:
            assert by_key[(N, K, rho, 500)] < value


def test_sweep_loss_fixed_beta_is_identical():
    base = Scenario(ChannelConfig(10, 200, db_to_linear(20.0)), RakeConfig(1.0, 50, 1000))
    a = sweep_loss(base, [512], [10], [200], [0.2], chips_per_frame=50)[0]
    b = sweep_loss(base, [512], [10], [400], [0.2], chips_per_frame=100)[0]
    assert a["epsilon"] == b["epsilon"] and a["loss_db"] == b["loss_db"]


def test_sweep_loss_marks_infeasible():
    base = Scenario(ChannelConfig(10, 200, db_to_linear(20.0)), RakeConfig(1.0, 50, 1000))
    row = sweep_loss(base, [128], [10], [200], [1.0])[0]
    assert not row["feasible"] and math.isnan(row["loss_db"])
