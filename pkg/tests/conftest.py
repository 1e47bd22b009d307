"""Shared fixtures, plus the acceptance-verdict terminal summary."""

from __future__ import annotations

import pytest

from burnout.dataset import apply_preprocess, fit_preprocess, generate_synthetic
from burnout.models.knn import train_knn
from burnout.models.svr import train_svr
from burnout.modelstore import Bundle

# Populated by the acceptance tests; printed after capture ends so the
# verdict lines always reach the terminal (and any tee'd log).
ACCEPTANCE_VERDICTS: list[tuple[str, str]] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in ACCEPTANCE_VERDICTS:
        terminalreporter.write_line(f"[ACCEPTANCE] {name}: {status}")


@pytest.fixture(scope="session")
def synth_table():
    """Desk-scale table matching the documented generative model."""
    return generate_synthetic(10_000, seed=1)


@pytest.fixture(scope="session")
def small_table():
    return generate_synthetic(80, seed=3)


@pytest.fixture(scope="session")
def svr_bundle(small_table):
    params = fit_preprocess(small_table)
    features, targets = apply_preprocess(small_table, params)
    model = train_svr(features, targets, c=1.0, epsilon=0.1)
    return Bundle(
        model=model,
        preprocess=params,
        training_meta={
            "n_rows": int(targets.size),
            "mean_cv_r2": None,
            "c": 1.0,
            "epsilon": 0.1,
            "gamma": model.kernel.gamma,
            "seed": 0,
        },
    )


@pytest.fixture(scope="session")
def knn_bundle(small_table):
    params = fit_preprocess(small_table)
    features, targets = apply_preprocess(small_table, params)
    model = train_knn(features, targets, k=5)
    return Bundle(
        model=model,
        preprocess=params,
        training_meta={
            "n_rows": int(targets.size),
            "mean_cv_r2": 0.9,
            "c": None,
            "epsilon": None,
            "gamma": None,
            "seed": 0,
        },
    )
