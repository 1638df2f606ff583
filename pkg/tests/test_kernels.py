"""The numba kernels must agree with the pure-numpy fallback."""

import os
import subprocess
import sys

import numpy as np
import pytest

from taskweb._kernels import backend_name, nb_backend, np_backend


def random_problem(rng, n):
    scores = rng.normal(scale=0.05, size=(n, n))
    present = rng.random(size=(n, n)) < 0.8
    np.fill_diagonal(present, False)
    return scores, present


def test_transitive_counts_backends_agree():
    rng = np.random.default_rng(0)
    thresholds = np.array([-0.05, 0.0, 0.01, 0.04, 0.1])
    for _ in range(25):
        n = int(rng.integers(2, 12))
        scores, present = random_problem(rng, n)
        e_np, p_np = np_backend.transitive_counts(scores, present, thresholds)
        e_nb, p_nb = nb_backend.transitive_counts(scores, present, thresholds)
        assert np.array_equal(e_np, e_nb)
        assert np.array_equal(p_np, p_nb)


def test_pivot_scores_backends_agree():
    rng = np.random.default_rng(1)
    for _ in range(25):
        n = int(rng.integers(2, 15))
        tw, mask = random_problem(rng, n)
        f_vals = rng.normal(size=n)
        lam = float(rng.random())
        s_np = np_backend.pivot_scores(tw, mask, f_vals, lam)
        s_nb = nb_backend.pivot_scores(tw, mask, f_vals, lam)
        assert np.allclose(s_np, s_nb, atol=1e-12, equal_nan=True)


def test_pivot_scores_nan_marks_pivotless_rows():
    tw = np.zeros((2, 2))
    mask = np.zeros((2, 2), dtype=bool)
    mask[0, 1] = True
    out = np_backend.pivot_scores(tw, mask, np.array([0.5, 0.25]), 0.5)
    assert not np.isnan(out[0])
    assert np.isnan(out[1])


def test_transitive_counts_ignores_diagonal_and_missing():
    scores = np.array([
        [0.0, 0.05, 0.02],
        [0.0, 0.0, 0.05],
        [0.0, 0.0, 0.0],
    ])
    present = np.array([
        [False, True, True],
        [False, False, True],
        [False, False, False],
    ])
    eligible, positive = np_backend.transitive_counts(
        scores, present, np.array([0.01])
    )
    assert eligible.tolist() == [1]
    assert positive.tolist() == [1]


def test_default_backend_is_numba_here():
    assert backend_name() == "numba"


@pytest.mark.parametrize("flag,expected", [("0", "numpy"), ("", "numba")])
def test_env_flag_selects_backend(flag, expected):
    code = (
        "import taskweb._kernels as k; print(k.backend_name())"
    )
    env = dict(os.environ, TASKWEB_NUMBA=flag)
    out = subprocess.run(
        [sys.executable, "-c", code], env=env,
        capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == expected


def test_numpy_fallback_runs_pipeline():
    code = (
        "from taskweb.fixtures import published_web\n"
        "from taskweb.structure import transitivity_curve\n"
        "import taskweb._kernels as k\n"
        "assert k.backend_name() == 'numpy'\n"
        "curve = transitivity_curve(published_web(), [0.01, 0.04])\n"
        "print(curve.eligible_triples)\n"
    )
    env = dict(os.environ, TASKWEB_NUMBA="0")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env,
        capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "(2661, 447)"
