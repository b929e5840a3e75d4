"""End-to-end smoke tests for the python bindings."""

import math

import pytest

import gacl


def test_version_and_surface():
    assert gacl.__version__ == "0.1.0"
    assert set(gacl.__all__) <= set(dir(gacl))


def test_name_registries():
    names = gacl.experiment_names()
    assert len(names) == 11
    assert "benchmark" in names and "noise" in names
    datasets = gacl.dataset_names()
    assert datasets == ["iris-easy", "iris-hard", "mtcars", "swiss",
                        "usarrests"]


def test_choice_probabilities_normalized():
    p = gacl.choice_probabilities(tau=[1.0, 2.0, 4.0],
                                  qualities=[1.0, 0.5, 0.2])
    assert len(p) == 3
    assert math.isclose(sum(p), 1.0, rel_tol=0, abs_tol=1e-12)
    # alpha = 1, beta = 0: proportional to tau.
    assert math.isclose(p[2], 4.0 / 7.0, rel_tol=1e-12)


def test_expected_fitness_interpolates():
    lo = gacl.expected_fitness([1.0, 1e-12], [1.0, 0.2])
    hi = gacl.expected_fitness([1e-12, 1.0], [1.0, 0.2])
    mid = gacl.expected_fitness([1.0, 1.0], [1.0, 0.2])
    assert math.isclose(lo, 1.0, rel_tol=1e-9)
    assert math.isclose(hi, 0.2, rel_tol=1e-9)
    assert hi < mid < lo


def test_run_colony_shapes_and_determinism():
    kwargs = dict(qualities=[1.0, 0.5, 0.4, 0.3, 0.2], obs_sigma=0.05,
                  generations=30, seed=9,
                  config={"n_ants": 40, "gamma": 0.2})
    a = gacl.run_colony(**kwargs)
    b = gacl.run_colony(**kwargs)
    assert a == b
    assert set(a) == {"fitness", "error", "allocation_quality", "tau",
                      "visits"}
    assert len(a["fitness"]) == 30
    assert len(a["tau"][0]) == 5
    assert all(sum(v) == 40 * 5 for v in a["visits"])
    # The colony should concentrate on the best site.
    assert a["allocation_quality"][-1] > a["allocation_quality"][0]
    assert gacl.run_colony(qualities=[1.0, 0.5, 0.4, 0.3, 0.2],
                           obs_sigma=0.05, generations=30, seed=10,
                           config={"n_ants": 40, "gamma": 0.2}) != a


def test_run_colony_rejects_unknown_config_key():
    with pytest.raises(ValueError):
        gacl.run_colony(qualities=[1.0, 0.5], config={"warp": 1.0})


def test_train_mlp_learns_linear_boundary():
    import random

    rnd = random.Random(3)
    x = [[rnd.uniform(-1, 1), rnd.uniform(-1, 1)] for _ in range(200)]
    y = [1 if a + b > 0 else 0 for a, b in x]
    out = gacl.train_mlp(x, y, dims=[2, 8, 2], eta=0.3, epochs=40,
                         batch_size=8, seed=5, x_val=x, y_val=y)
    assert len(out["loss"]) == 40
    assert out["loss"][-1] < out["loss"][0]
    assert out["val_accuracy"][-1] >= 0.95
    assert len(out["predictions"]) == 200
    hits = sum(p == t for p, t in zip(out["predictions"], y))
    assert hits / 200 >= 0.95


def test_run_experiment_round_trip(tmp_path):
    res = gacl.run_experiment("noise", seed=11, replicates=2,
                              overrides={"exp.steps": 10,
                                         "colony.n_ants": 20},
                              csv_out_dir=str(tmp_path))
    assert set(res) == {"name", "rows", "meta", "all_verdicts_pass"}
    assert res["name"] == "noise"
    assert res["rows"] > 0
    assert "spearman_gacl" in res["meta"]
    csv = (tmp_path / "noise.csv").read_text()
    header = csv.splitlines()[0]
    assert header == "experiment,condition,system,replicate,step,metric,value"
    assert len(csv.splitlines()) == res["rows"] + 1


def test_run_experiment_rejects_unknown_name():
    with pytest.raises(ValueError):
        gacl.run_experiment("warp")
