import math

import numpy as np
import pytest

from dtasync.estimator import (
    EstimationError,
    EstimationProtocol,
    System,
    estimate_lambda_c,
    noise_floor,
    replica_seeds,
    sweep,
)
from dtasync.netgraph import NetworkSpec

SMALL = System(network=NetworkSpec("complete", n=200), t_end=150)


def test_noise_floor_matches_rayleigh_mean():
    rng = np.random.default_rng(0)
    n = 400
    R = np.abs(np.exp(1j * rng.uniform(0, 2 * np.pi, (4000, n))).mean(axis=1))
    assert R.mean() == pytest.approx(noise_floor(n), rel=0.03)


@pytest.mark.parametrize("proto", [
    EstimationProtocol(grid=(1.0,)),
    EstimationProtocol(grid=(1.0, 0.5)),
    EstimationProtocol(grid=(0.5, 1.0), seeds=2),
    EstimationProtocol(grid=(0.5, 1.0), criterion="finite-size-crossing", sizes=(100,)),
])
def test_protocol_validation(proto):
    with pytest.raises(EstimationError):
        proto.validate()


def test_no_crossing_below_threshold():
    proto = EstimationProtocol(grid=(0.1, 0.2, 0.3), seeds=3)
    with pytest.raises(EstimationError, match="no crossing"):
        estimate_lambda_c(SMALL, proto)


def test_classical_kuramoto_estimate():
    proto = EstimationProtocol(grid=tuple(np.round(np.arange(0.5, 1.61, 0.1), 10)), seeds=4)
    est = estimate_lambda_c(SMALL, proto)
    assert proto.grid[0] <= est.lambda_c <= proto.grid[-1]
    assert abs(est.lambda_c - 1.0) <= max(est.half_width, 0.15)
    # sub-critical points stay below c times the floor
    for lam in (0.3, 0.5):
        if lam in proto.grid:
            assert est.summary(lam)[0] < est.threshold


def test_sweep_deterministic_and_single_value(tmp_path):
    tpl = System(network=NetworkSpec("watts-strogatz", n=60), coupling=1.5, t_end=40)
    a = sweep(tpl, "alpha", [0.0, 0.5], seeds=3, master_seed=9)
    b = sweep(tpl, "alpha", [0.0, 0.5], seeds=3, master_seed=9)
    assert np.array_equal(a.R, b.R)
    one = sweep(tpl, "alpha", [0.5], seeds=3, master_seed=9)
    assert one.R.shape == (1, 3)
    assert np.allclose(one.R[0], a.R[1], atol=1e-12)
    a.to_csv(tmp_path / "s.csv")
    assert (tmp_path / "s.csv").read_text().startswith("alpha,R_mean,R_std,R_sem,n_seeds")


def test_sweep_parallel_equals_serial():
    tpl = System(network=NetworkSpec("watts-strogatz", n=60), coupling=1.5, t_end=30)
    a = sweep(tpl, "coupling", [0.5, 1.5, 2.5], seeds=3, jobs=1)
    b = sweep(tpl, "coupling", [0.5, 1.5, 2.5], seeds=3, jobs=2)
    assert np.allclose(a.R, b.R, atol=1e-12)


def test_coupling_sweep_nondecreasing():
    tab = sweep(SMALL, "coupling", [0.4, 0.8, 1.2, 1.6, 2.0], seeds=4)
    for i in range(len(tab.values) - 1):
        assert tab.mean[i + 1] >= tab.mean[i] - 2 * tab.diff_sigma(i, i + 1)


def test_sweep_errors():
    with pytest.raises(EstimationError):
        sweep(SMALL, "noise", [0.1])
    with pytest.raises(EstimationError):
        sweep(SMALL, "alpha", [])


def test_replica_seeds_distinct():
    s = replica_seeds(3, 5)
    draws = [np.random.default_rng(x).integers(1 << 62) for x in s]
    assert len(set(draws)) == 5
    assert [x.entropy for x in replica_seeds(3, 5)] == [x.entropy for x in s]


def test_finite_size_estimate_runs():
    proto = EstimationProtocol(grid=(0.6, 0.8, 1.0, 1.2, 1.4), seeds=3, sizes=(100, 400),
                               criterion="finite-size-crossing")
    est = estimate_lambda_c(System(network=NetworkSpec("complete"), t_end=150), proto)
    assert 0.6 <= est.lambda_c <= 1.4
    assert math.isfinite(est.half_width)
