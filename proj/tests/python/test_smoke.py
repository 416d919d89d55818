import json

import pytest

mineplan = pytest.importorskip("mineplan")


@pytest.fixture(scope="module")
def micro():
    return mineplan.Instance.generate("micro", seed=7)


def test_presets():
    assert set(mineplan.preset_names()) >= {"micro", "t1-like"}
    with pytest.raises(mineplan.MineplanError):
        mineplan.Instance.generate("nope")


def test_json_round_trip(micro):
    again = mineplan.Instance.from_json(micro.to_json())
    assert again.num_blocks == micro.num_blocks == 4
    assert json.loads(again.to_json()) == json.loads(micro.to_json())


def test_full_solve_matches_oracle(micro):
    sol, status, bound = mineplan.full_solve(micro, mip_gap=0.0)
    assert status == "optimal"
    assert sol.objective == pytest.approx(mineplan.oracle_optimum(micro), rel=1e-6)
    assert mineplan.validate(micro, sol, 1e-5)["clean"]
    assert bound >= sol.objective - 1e-6


def test_window_schedule():
    steps = mineplan.window_schedule(15, 3, 1)
    assert len(steps) == 8
    assert steps[0] == (1, 2) and steps[-1] == (15, 15)


def test_sliding_windows_then_lns(micro):
    start = mineplan.sliding_windows(micro, W=2, O=1)
    assert mineplan.validate(micro, start, 1e-5)["clean"]
    best, iterations, accepted = mineplan.lns(micro, start, nbar=2, rins=True, min_iters=3)
    assert iterations >= 3
    assert best.objective >= start.objective
    assert mineplan.npv(micro, best) == pytest.approx(best.objective, rel=1e-6)


def test_corrupted_solution_is_flagged(micro):
    sol = mineplan.sliding_windows(micro, W=2, O=1)
    data = json.loads(sol.to_json(micro))
    block = next(iter(data["z"]))
    data["z"][block] = [0.5] * len(data["z"][block])
    bad = mineplan.Solution.from_json(micro, json.dumps(data))
    report = mineplan.validate(micro, bad, 1e-5)
    assert not report["clean"]
    assert any(e["family"] == "integrality" for e in report["entries"])
