import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dtasync.attention import exponential_kernel_convolution
from dtasync.dynamics import (
    EnsembleState,
    FrequencyDist,
    OpinionConfig,
    SimConfig,
    SimulationError,
    SLConfig,
    order_parameter,
    sample_frequencies,
    simulate,
    simulate_batch,
    simulate_opinion,
    simulate_stuart_landau,
    step,
)
from dtasync.netgraph import NetworkSpec, generate

FC2 = generate(NetworkSpec("complete", n=2))
WS = generate(NetworkSpec("watts-strogatz", n=40, k=4, p=0.1, seed=0))


def test_sample_frequencies():
    assert sample_frequencies(FrequencyDist(), 5, 0).tolist() == [0.0] * 5
    w = sample_frequencies(FrequencyDist("normal", 0.01), 10_000, 1)
    assert 0.0094 <= w.var(ddof=1) <= 0.0106
    assert np.array_equal(w, sample_frequencies(FrequencyDist("normal", 0.01), 10_000, 1))


def test_tabulated_law_is_centred():
    d = FrequencyDist("tabulated", values=(1.0, 2.0, 3.0))
    assert d.values == (-1.0, 0.0, 1.0)


def test_order_parameter_examples():
    R, psi = order_parameter(np.full(7, 1.3))
    assert R == pytest.approx(1.0) and psi == pytest.approx(1.3)
    assert order_parameter([0, np.pi])[0] == pytest.approx(0.0, abs=1e-15)
    R, psi = order_parameter([0, np.pi / 2])
    assert R == pytest.approx(math.sqrt(2) / 2) and psi == pytest.approx(np.pi / 4)
    with pytest.raises(ValueError):
        order_parameter([])


def test_single_step_decoupled_drift():
    cfg = SimConfig(coupling=0.0, noise=0.0, dt=0.1, beta=2.0)
    th = np.array([0.1, 2.0])
    st0 = EnsembleState(th, np.zeros(2, complex), np.array([1.0, -0.5]))
    s1 = step(st0, cfg, FC2, np.random.default_rng(0))
    assert np.array_equal(s1.theta, th + st0.omega * 0.1)
    assert np.allclose(s1.M, 0.2 * np.exp(1j * th))


def test_single_step_two_oscillators():
    cfg = SimConfig(coupling=1.0, noise=0.0, dt=0.01)
    th = np.array([0.0, np.pi / 2])
    s1 = step(EnsembleState(th, np.exp(1j * th), np.zeros(2)), cfg, FC2, np.random.default_rng(0))
    assert np.allclose(s1.theta, [0.01, np.pi / 2 - 0.01], atol=1e-15)


def test_step_dimension_mismatch():
    with pytest.raises(SimulationError):
        step(EnsembleState(np.zeros(3), np.zeros(3, complex), np.zeros(3)), SimConfig(), FC2,
             np.random.default_rng(0))


def test_alpha_zero_ignores_attention():
    base = dict(coupling=1.2, alpha=0.0, noise=0.3, t_end=20, dt=0.05, seed=4)
    runs = [simulate(SimConfig(**base, beta=b, attention=m, attention_init=i), WS, keep_history=True)
            for b, m, i in [(1.0, "neighbor", "phase"), (0.01, "self", "zero"), (5.0, "none", "phase")]]
    for r in runs[1:]:
        assert np.array_equal(r.theta_history, runs[0].theta_history)


def test_deterministic():
    cfg = SimConfig(coupling=1.5, alpha=0.4, t_end=30, seed=11, freq=FrequencyDist("normal", 0.1))
    a, b = simulate(cfg, WS), simulate(cfg, WS)
    for f in ("t", "R", "psi", "theta_final", "M_final"):
        assert np.array_equal(getattr(a, f), getattr(b, f))
    assert a.R_mean == b.R_mean


def test_batch_matches_single_runs():
    seeds = [3, 8, 21]
    batch = simulate_batch(WS, seeds, coupling=[0.5, 1.0, 2.0], alpha=0.3, beta=[1.0, 0.1, 1.0],
                           noise=0.5, attention="self", t_end=15)
    for s, lam, b, out in zip(seeds, [0.5, 1.0, 2.0], [1.0, 0.1, 1.0], batch):
        one = simulate(SimConfig(coupling=lam, alpha=0.3, beta=b, attention="self", t_end=15, seed=s), WS)
        assert np.allclose(one.theta_final, out.theta_final, rtol=0, atol=1e-12)


def test_complete_graph_fast_path_matches_sparse():
    from dtasync.netgraph import Network
    fc = generate(NetworkSpec("complete", n=30))
    sparse = Network(fc.adjacency)
    kw = dict(coupling=1.3, alpha=0.5, beta=0.5, noise=0.2, t_end=10)
    a = simulate_batch(fc, [0], **kw)[0]
    b = simulate_batch(sparse, [0], **kw)[0]
    assert np.allclose(a.theta_final, b.theta_final, atol=1e-10)


def test_strong_coupling_synchronises():
    fc = generate(NetworkSpec("complete", n=500))
    out = simulate(SimConfig(coupling=5.0, noise=0.5, t_end=100, seed=0), fc)
    assert out.R_mean > 0.8


def test_uncoupled_at_noise_floor():
    fc = generate(NetworkSpec("complete", n=1000))
    out = simulate(SimConfig(coupling=0.0, noise=0.5, t_end=100, seed=0), fc)
    assert out.R_mean < 3 * math.sqrt(math.pi / 4000)


@settings(max_examples=10, deadline=None)
@given(lam=st.floats(0, 4), alpha=st.floats(0, 1), beta=st.floats(0.01, 5), mode=st.sampled_from(["neighbor", "self"]),
       seed=st.integers(0, 10**6))
def test_order_parameter_and_attention_bounds(lam, alpha, beta, mode, seed):
    cfg = SimConfig(coupling=lam, alpha=alpha, beta=beta, attention=mode, t_end=10, dt=0.05, seed=seed,
                    record_every=1)
    out = simulate(cfg, WS, keep_history=True)
    assert np.all((out.R >= 0) & (out.R <= 1))
    assert np.abs(out.M_history).max() <= 1 + 5 * cfg.dt


def test_attention_matches_kernel_convolution():
    dt = 1e-3
    cfg = SimConfig(coupling=1.5, alpha=0.5, beta=1.0, attention="self", dt=dt, t_end=5, seed=2,
                    freq=FrequencyDist("normal", 1.0))
    out = simulate(cfg, WS, keep_history=True)
    t = np.arange(out.theta_history.shape[0]) * dt
    oracle = exponential_kernel_convolution(out.theta_history, t, cfg.beta, out.M_history[0])
    assert np.abs(oracle - out.M_history).max() < 10 * dt


def test_noise_variance_calibration():
    fc = generate(NetworkSpec("complete", n=200))
    T, D = 2.0, 0.5
    outs = simulate_batch(fc, list(range(5)), coupling=0.0, alpha=0.0, beta=1.0, noise=D, t_end=T,
                          dt=0.05, keep_history=True)
    disp = np.concatenate([o.theta_history[-1] - o.theta_history[0] for o in outs])
    assert disp.size == 1000
    assert 0.9 * 2 * D * T <= disp.var() <= 1.1 * 2 * D * T


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_nan_aborts():
    with pytest.raises(SimulationError, match="non-finite"):
        simulate(SimConfig(coupling=0.0, noise=0.0, dt=0.05, t_end=1, freq=FrequencyDist("tabulated", values=(-np.inf, np.inf))), WS)


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(alpha=1.5)
    with pytest.raises(ValueError):
        SimConfig(beta=0)
    assert SimConfig(alpha=0.7, attention="none").alpha == 0.0


def test_opinion_rho_zero_reduces_to_phase_model():
    cfg = SimConfig(coupling=1.5, alpha=0.3, attention="self", t_end=20, seed=5)
    a = simulate_opinion(OpinionConfig(cfg, rho=0.0), WS)
    b = simulate(cfg, WS)
    assert np.array_equal(a.theta_final, b.theta_final)


def test_opinion_converges_to_inherent():
    phi = np.linspace(0.1, 6.0, WS.n)
    cfg = SimConfig(coupling=0.0, noise=0.0, t_end=30, seed=1)
    out = simulate_opinion(OpinionConfig(cfg, rho=1.0, phi=phi), WS)
    d = np.angle(np.exp(1j * (out.theta_final - phi)))
    assert np.abs(d).max() < 1e-6


def test_stuart_landau_amplitude():
    out = simulate_stuart_landau(SLConfig(amplitude0=0.1, t_end=20, dt=0.01), WS)
    assert abs(out.amplitude_mean[-1] - 1.0) < 1e-3


def test_stuart_landau_rotation():
    z0 = np.exp(1j * np.linspace(0, 1, WS.n))
    out = simulate_stuart_landau(SLConfig(omega=2.0, t_end=5, dt=1e-3, record_every=100), WS, z0=z0,
                                 keep_history=True)
    dphi = np.unwrap(out.theta_history[:, 0])
    rate = np.diff(dphi) / np.diff(out.t)
    assert np.allclose(rate, 2.0, atol=1e-6)
    # explicit Euler inflates the rotating circle by O(omega^2 dt)
    assert np.allclose(out.amplitude_mean, 1.0, atol=4.0 * 1e-3)
    assert np.ptp(out.amplitude_mean[10:]) < 1e-3


def test_csv_and_sidecar(tmp_path):
    cfg = SimConfig(t_end=5)
    out = simulate(cfg, WS)
    out.to_csv(tmp_path / "r.csv")
    out.write_sidecar(tmp_path / "r.json", cfg.to_dict(), WS)
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "t,R,psi" and len(lines) == out.t.size + 1
    assert WS.content_hash() in (tmp_path / "r.json").read_text()
