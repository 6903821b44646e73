import numpy as np
import pytest

import lpcscore


def test_simulate_shapes():
    d = lpcscore.simulate("sim1", seed=3)
    assert d["x"].shape == (40, 1000)
    assert sum(d["truth"]) == 50
    assert d["kind"] == "quantitative"


def test_lpc_lambda_zero_reproduces_centered_simplified_scores():
    d = lpcscore.simulate("sim1", seed=4)
    x = d["x"] - d["x"].mean(axis=0)
    out = lpcscore.lpc(x, d["values"], score_kind="simplified", lam=0.0)
    np.testing.assert_allclose(out["lpc"], x.T @ d["values"], atol=1e-8)


def test_scores_two_class_matches_numpy():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(12, 5))
    y = np.array([1, 2] * 6, dtype=float)
    t = lpcscore.scores(x, y, kind="two-class", fudge="zero")
    a, b = x[y == 2], x[y == 1]
    sp = np.sqrt(((a.var(axis=0, ddof=1) + b.var(axis=0, ddof=1)) / 2) * (2 / 6))
    expected = (a.mean(axis=0) - b.mean(axis=0)) / sp
    assert np.allclose(np.abs(t), np.abs(expected))


def test_tune_and_fdr_run():
    d = lpcscore.simulate("sim2", seed=2)
    tuned = lpcscore.tune(d["x"], d["values"], seed=2)
    assert tuned["chosen_lambda"] in tuned["grid"]
    res = lpcscore.fdr(d["x"], d["values"], seed=2, lam=tuned["chosen_lambda"], permutations=20, splits=4, max_k=10)
    assert len(res["t"]) == 10 and len(res["lpc"]) == 10
    assert 0 < res["pi0"] <= 1


def test_camp_demo():
    r = lpcscore.camp_demo(seed=1, replicates=50)
    assert r["called"] == 100
    assert r["camp_estimated_fdr"] < r["pvalue_estimated_fdr"]


def test_errors_map_to_exceptions():
    x = np.ones((4, 3))
    with pytest.raises(lpcscore.DataError):
        lpcscore.scores(x, np.array([1.0, 2.0, 3.0]))
    with pytest.raises(lpcscore.UsageError):
        lpcscore.simulate("nope", seed=1)


def test_main_entry_point():
    code, _, err = lpcscore.main(["camp-demo"])
    assert code == 2
    assert err.startswith("error[usage]")
