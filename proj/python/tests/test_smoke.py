import math

import numpy as np
import pytest

import smoothnorm as sn


def test_power_norm_matches_numpy():
    rng = np.random.default_rng(0)
    for p in (1.0, 2.0, 4.0):
        x = rng.normal(size=7)
        assert sn.power_norm(x.tolist(), p) == pytest.approx(np.linalg.norm(x, p), rel=1e-9)


def test_constants():
    assert sn.epsilon_n(0.96, 0) == 0.01
    assert sn.psi_from_indices(0.1, [0]) == 1.0625


def test_orlicz_function():
    f = sn.make_orlicz(0.5, 1.0)
    assert f.value(0.25) == 0.0
    assert f.value(1.0) == pytest.approx(1.5, rel=1e-12)
    assert f.first_derivative(0.75) > 0.0


def test_spaces():
    x = [0.3, -2.0, 1.0]
    assert sn.ModelSpace.sup(3).norm(x) == 2.0
    assert sn.ModelSpace.euclidean(3).norm(x) == pytest.approx(math.sqrt(5.09))
    lp = sn.ModelSpace.lorentz_predual([1.0, 0.5, 0.25])
    assert lp.kind == "lorentz_predual"
    y = [v / lp.norm(x) for v in x]
    sigma = sn.find_norming_support(lp, y)
    assert sigma is not None
    with pytest.raises(sn.ParameterError):
        sn.ModelSpace.lorentz([0.5, 1.0])


def test_phi_norm_approximates_sup():
    X = sn.ModelSpace.sup(3)
    phi = sn.build_renorm(X, [], 0.1, sn.ModelSpace.euclidean(1))
    assert phi.net_size == 6
    rng = np.random.default_rng(1)
    for _ in range(50):
        u = rng.normal(size=3).tolist()
        base = phi.base_norm(u)
        assert base < phi(u) <= 1.1 * base * (1 + 1e-9)
    points, margin = phi.active_set([1.0, 0.2, 0.0])
    assert margin > 0.0
    assert len(points) >= 1


def test_injective_norm():
    X = sn.ModelSpace.sup(2)
    Y = sn.ModelSpace.euclidean(2)
    assert sn.injective_norm(X, Y, [3.0, 4.0, 0.0, 1.0]) == 5.0


def test_run_is_deterministic():
    cfg = {
        "space": {"kind": "sup", "dim": 2},
        "epsilon": 0.1,
        "seed": 3,
        "samples": {"approx": 50, "claim2d": 50, "localdep_points": 5, "tensor": 10},
    }
    a = sn.run(cfg)
    b = sn.run(cfg)
    assert a == b
    assert a["pass"] is True
    assert set(sn.run(cfg, suites=["smooth"])["suites"]) == {"smooth"}


def test_config_errors():
    with pytest.raises(sn.ConfigError):
        sn.run({"space": {"kind": "sup", "dim": 2}, "seed": 1})
