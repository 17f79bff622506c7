import math
import os
import subprocess

import numpy as np
import pytest

import quasijoint as qj


def test_vacuum_wigner_peak():
    out = qj.wigner_joint(0.0, 0.0, n=121)
    values = np.asarray(out["values"])
    peak = values[60, 60]  # grid center
    assert peak == pytest.approx(1.0 / math.pi, abs=1e-6)
    assert values.min() > -1e-9


def test_colormap_roundtrip():
    rng = np.random.default_rng(3)
    z = rng.uniform(-0.45, 0.45, size=(32, 32))
    r, g, b = qj.encode(z, "wigner")
    dec = qj.decode(r, g, b, "wigner")
    assert dec["gamut_fraction"] == 0.0
    assert np.abs(np.asarray(dec["values"]) - z).max() <= 0.005 * 0.9


def test_synth_marginals_normalized():
    out = qj.synth_marginals(11, 5, "cher-superohmic")
    x = np.asarray(out["x"])
    for key in ("m1", "m13", "mu"):
        assert np.trapz(np.asarray(out[key]), x) == pytest.approx(1.0, abs=1e-3)


def test_l2_uniform_offset():
    side = 256
    a = [np.zeros((side, side))] * 3
    b = [np.ones((side, side))] * 3
    value = qj.l2_image(*a, *b)
    assert value == pytest.approx(math.sqrt(3 * side * side) / (3 * side * side), rel=1e-12)


def test_cat_marginals_interfere():
    out = qj.wigner_marginals(2.0, 0.0, mu=1.0, nbar=0.0, theta=0.0)
    m1 = np.asarray(out["m1"])
    x = np.asarray(out["x"])
    assert np.trapz(m1, x) == pytest.approx(1.0, abs=1e-3)
    # the momentum-side marginal of an even cat carries interference fringes,
    # so the position marginal here must show the two coherent humps
    assert m1.max() > 0.3


def test_cli_runs(tmp_path):
    cli = os.environ.get("QJ_CLI")
    if not cli:
        pytest.skip("QJ_CLI not set")
    out = tmp_path / "ds"
    subprocess.run(
        [cli, "gen-data", "--preset", "cher-superohmic", "--seed", "3", "--out", str(out),
         "--train-plain", "2", "--train-signed", "2", "--test-plain", "1", "--test-signed", "1",
         "--image-size", "32"],
        check=True,
    )
    assert (out / "manifest.txt").exists()
    assert (out / "train_features.f32").exists()
    result = subprocess.run(
        [cli, "solve-ftog", "--preset", "cher-superohmic", "--out", str(tmp_path / "ftog"),
         "--temperatures", ""],
        capture_output=True, text=True,
    )
    assert result.returncode == 0
    assert "empty temperature list" in result.stderr
