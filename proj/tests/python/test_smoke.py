import numpy as np
import pytest
import scipy.linalg

import spdtraj


def random_spd(rng, n):
    a = rng.standard_normal((n, n))
    return a @ a.T + n * np.eye(n)


def test_version():
    assert spdtraj.__version__ == "0.1.0"


def test_sym_functions_match_scipy():
    rng = np.random.default_rng(0)
    p = random_spd(rng, 5)
    np.testing.assert_allclose(spdtraj.sym_log(p), scipy.linalg.logm(p).real, atol=1e-10)
    np.testing.assert_allclose(spdtraj.sym_sqrt(p), scipy.linalg.sqrtm(p).real, atol=1e-10)
    np.testing.assert_allclose(spdtraj.sym_exp(spdtraj.sym_log(p)), p, atol=1e-9)


def test_unitdet_distance_is_a_metric():
    rng = np.random.default_rng(1)
    a, b, c = (random_spd(rng, 4) for _ in range(3))
    for x in (a, b, c):
        x /= np.linalg.det(x) ** 0.25
    dab, dbc, dac = spdtraj.dist_unitdet(a, b), spdtraj.dist_unitdet(b, c), spdtraj.dist_unitdet(a, c)
    assert spdtraj.dist_unitdet(a, a) == 0.0
    assert dab == pytest.approx(spdtraj.dist_unitdet(b, a), rel=1e-12)
    assert dac <= dab + dbc + 1e-12


def test_not_positive_definite_raises():
    with pytest.raises(ValueError):
        spdtraj.sym_log(np.diag([1.0, -1.0]))


def test_ledoit_wolf_returns_spd():
    rng = np.random.default_rng(2)
    cov, diag = spdtraj.ledoit_wolf(rng.standard_normal((30, 6)))
    assert np.all(np.linalg.eigvalsh(cov) > 0)
    assert 0.0 <= diag["intensity"] <= 1.0


def test_alignment_and_classification_pipeline():
    trajs, labels = spdtraj.gen_two_class(n_per_class=6, n=3, T=8, separation=2.0, spread=0.1, seed=3)
    assert len(trajs) == 12 and trajs[0].shape == (8, 3, 3)
    al = spdtraj.align_dq(trajs[0], trajs[1])
    assert al["dq"] <= al["dc"] + 1e-8
    assert al["dc"] == pytest.approx(spdtraj.dist_dc(trajs[0], trajs[1]), rel=1e-12)
    d = spdtraj.distance_matrix(trajs, metric="dc")
    np.testing.assert_array_equal(d, d.T)
    assert spdtraj.cross_validate(d, labels, folds=3)["accuracy"] == 1.0


def test_fit_and_project():
    mats, labels = spdtraj.gen_exp1(k=2, T=4, n=8, seed=1)
    model = spdtraj.fit(mats, 3, max_iters=50)
    b = model["basis"]
    assert b.shape == (8, 3)
    np.testing.assert_allclose(b.T @ b, np.eye(3), atol=1e-10)
    trace = np.asarray(model["objective_trace"])
    assert np.all(np.diff(trace) >= -1e-9 * np.abs(trace[:-1]))
    unit, log_det = spdtraj.project(mats[0], b)
    assert np.linalg.det(unit) == pytest.approx(1.0, rel=1e-10)


def test_trajectory_file_round_trip(tmp_path):
    trajs, _ = spdtraj.gen_two_class(n_per_class=1, n=3, T=5)
    path = str(tmp_path / "t.spdt")
    spdtraj.write_trajectory(path, trajs[0])
    np.testing.assert_array_equal(spdtraj.read_trajectory(path), trajs[0])
