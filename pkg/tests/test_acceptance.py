"""Release gate: every shipping criterion prints one PASS/FAIL/SKIP line.

The verdict lines are written to the real stdout so they survive
pytest's output capture.  Criteria that need the original survey CSV
are skipped unless BURNOUT_REAL_CSV points at the file; everything else
runs self-contained on generated data against the independent oracles.
"""

from __future__ import annotations

import json
import os
import sys
import time
from collections import Counter
from contextlib import contextmanager
from functools import lru_cache

import numpy as np
import pytest
from fastapi.testclient import TestClient

from burnout.app.cli import main
from burnout.app.pipeline import predict_pipeline, validate_request
from burnout.app.service import create_app
from burnout.dataset import (
    COMPANY_TYPES,
    GENDERS,
    IMPUTE_MEDIAN,
    WFH_VALUES,
    PreprocessParams,
    Table,
    encode_supervised,
    fit_preprocess,
    load_csv,
)
from burnout.evaluation import (
    ModelSpec,
    compare_models,
    cross_validate,
    make_folds,
    paired_t_test,
    predict_model,
    r2_score,
)
from burnout.models.forest import best_split, train_forest
from burnout.models.kernels import LINEAR, RBF, KernelSpec, kernel_matrix
from burnout.models.knn import predict_knn, train_knn
from burnout.models.svr import SmoConfig, SvrModel, predict_svr, train_svr
from burnout.modelstore import Bundle, load_bundle, save_bundle
from burnout.stats import group_medians, pca, pearson, student_t_cdf, welch_t_test
from oracles import (
    brute_knn,
    exhaustive_best_split,
    svr_dual_objective,
    svr_dual_pgd,
    svr_kkt_report,
    t_cdf_quadrature,
)

from conftest import ACCEPTANCE_VERDICTS

REAL_CSV_ENV = "BURNOUT_REAL_CSV"


def _report(name: str, status: str) -> None:
    """Record one verdict for the terminal summary and echo it live."""
    ACCEPTANCE_VERDICTS.append((name, status))
    print(f"[ACCEPTANCE] {name}: {status}", file=sys.__stdout__, flush=True)


@contextmanager
def criterion(name: str):
    """Print the verdict for one criterion, then let pytest see the error."""
    try:
        yield
    except BaseException:
        _report(name, "FAIL")
        raise
    _report(name, "PASS")


def _real_csv_or_skip(name: str) -> str:
    path = os.environ.get(REAL_CSV_ENV)
    if path:
        return path
    _report(name, f"SKIP (set {REAL_CSV_ENV} to run)")
    pytest.skip("real dataset not supplied")


def _identity_preprocess() -> PreprocessParams:
    return PreprocessParams(
        strategy=IMPUTE_MEDIAN,
        medians={},
        feature_means=(0.0,) * 6,
        feature_sds=(1.0,) * 6,
    )


# --- solver batteries -------------------------------------------------


def _svr_instance(seed: int):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 26))
    d = int(rng.integers(1, 5))
    x = rng.normal(0.0, 1.0, size=(n, d))
    w = rng.normal(0.0, 1.0, size=d)
    y = np.tanh(x @ w) + 0.3 * rng.normal(size=n)
    c = float(10.0 ** rng.uniform(-1.0, 1.0))
    eps = float(rng.uniform(0.0, 0.5))
    if rng.random() < 0.25:
        kernel = KernelSpec(LINEAR)
    else:
        kernel = KernelSpec(RBF, float(rng.uniform(0.1, 2.0)))
    return x, y, c, eps, kernel


def _full_coefs(model: SvrModel, x: np.ndarray) -> np.ndarray:
    beta = np.zeros(x.shape[0])
    for sv, coef in zip(model.support_vectors, model.dual_coefs):
        idx = int(np.where((x == sv).all(axis=1))[0][0])
        beta[idx] = coef
    return beta


def test_svr_solver_matches_qp_oracle():
    with criterion("svr-qp-oracle-equivalence"):
        # Tight tolerance and a lifted iteration valve: the battery
        # verifies the solver at convergence, not the default budget.
        cfg = SmoConfig(tol=1e-5, max_iters=500_000)
        for seed in range(200):
            x, y, c, eps, kernel = _svr_instance(seed)
            model = train_svr(x, y, c=c, epsilon=eps, kernel=kernel, config=cfg)
            gram = kernel_matrix(kernel, x, x)
            reference = svr_dual_pgd(gram, y, c, eps)
            beta = _full_coefs(model, x)
            ours = svr_dual_objective(gram, y, c, eps, beta)
            scale = max(1.0, abs(reference.objective))
            assert ours >= reference.objective - 1e-3 * scale, seed
            assert abs(ours - reference.objective) <= 1e-3 * scale, seed

            fresh = np.random.default_rng(10_000 + seed).normal(size=(8, x.shape[1]))
            grid = np.vstack([x, fresh])
            ref_pred = kernel_matrix(kernel, grid, x) @ reference.beta + reference.bias
            assert np.max(np.abs(predict_svr(model, grid) - ref_pred)) <= 1e-3, seed

            report = svr_kkt_report(gram, y, c, eps, beta, model.bias, tol=cfg.tol)
            assert report == [], (seed, report)


def test_knn_matches_brute_force():
    with criterion("knn-brute-force-equivalence"):
        for seed in range(100):
            rng = np.random.default_rng(300 + seed)
            n = int(rng.integers(1, 30))
            d = int(rng.integers(1, 5))
            if seed % 4 == 0:
                # integer grids force exact distance ties
                x = rng.integers(0, 3, size=(n, d)).astype(np.float64)
                queries = rng.integers(0, 3, size=(5, d)).astype(np.float64)
            else:
                x = rng.normal(size=(n, d))
                queries = rng.normal(size=(5, d))
            y = rng.normal(size=n)
            for k in sorted({1, min(3, n), min(5, n), n}):
                model = train_knn(x, y, k=k)
                for q in queries:
                    assert predict_knn(model, q) == brute_knn(x, y, k, q), seed


def _split_instance(seed: int):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 13))
    d = int(rng.integers(1, 5))
    if rng.random() < 0.5:
        feats = rng.integers(0, 4, size=(n, d)).astype(np.float64)
    else:
        feats = np.round(rng.normal(size=(n, d)), 1)
    if rng.random() < 0.5:
        targs = rng.integers(0, 4, size=n).astype(np.float64)
    else:
        targs = rng.normal(size=n)
    k = int(rng.integers(1, d + 1))
    cands = sorted(rng.choice(d, size=k, replace=False).tolist())
    msl = int(rng.integers(1, 4))
    return feats, targs, cands, msl


def test_best_split_matches_exhaustive_search():
    with criterion("best-split-exhaustive-match"):
        for seed in range(400):
            feats, targs, cands, msl = _split_instance(seed)
            engine = best_split(feats, targs, cands, msl)
            oracle = exhaustive_best_split(feats, targs, cands, msl)
            assert engine == oracle, seed


# --- statistics -------------------------------------------------------


def test_statistics_reference_values():
    with criterion("stats-reference-values"):
        assert pearson([1, 2, 3], [1, 3, 2]) == pytest.approx(0.5, abs=1e-12)

        welch = welch_t_test([1, 2, 3, 4], [2, 3, 4, 5])
        assert welch.t == pytest.approx(-1.0954, abs=5e-5)
        assert welch.df == pytest.approx(6.0, abs=1e-9)
        assert welch.p_value == pytest.approx(
            2.0 * t_cdf_quadrature(-abs(welch.t), welch.df), abs=1e-6
        )

        paired = paired_t_test([1, 2, 3], [1.1, 2.1, 2.9])
        assert paired.t == pytest.approx(-0.5, abs=1e-9)
        assert paired.df == 2.0
        assert paired.p_value == pytest.approx(0.667, abs=5e-4)
        assert paired.p_value == pytest.approx(
            2.0 * t_cdf_quadrature(-abs(paired.t), paired.df), abs=1e-6
        )

        r2 = r2_score(np.array([1.0, 2.0, 3.0]), np.array([1.1, 1.9, 3.2]))
        assert r2 == pytest.approx(0.97, abs=1e-12)

        for t in (0.5, 1.0, 2.0, 2.5):
            for df in (2.0, 10.0, 29.0):
                for signed in (t, -t):
                    ours = student_t_cdf(signed, df)
                    assert ours == pytest.approx(
                        t_cdf_quadrature(signed, df), abs=1e-6
                    ), (signed, df)


def test_fold_partition_properties():
    with criterion("fold-partition-properties"):
        rng = np.random.default_rng(77)
        for _ in range(1000):
            n = int(rng.integers(2, 3000))
            k = int(rng.integers(2, n + 1))
            seed = int(rng.integers(0, 2**31))
            plan = make_folds(n, k, seed)
            counts = np.bincount(plan.fold_assignments, minlength=k)
            assert plan.fold_assignments.shape == (n,)
            assert counts.sum() == n and len(counts) == k
            assert counts.min() >= 1
            assert counts.max() - counts.min() <= 1
            again = make_folds(n, k, seed)
            assert np.array_equal(plan.fold_assignments, again.fold_assignments)

        big = np.bincount(make_folds(22_750, 30, 123).fold_assignments)
        assert Counter(big.tolist()) == {759: 10, 758: 20}


def test_pca_spectral_checks():
    with criterion("pca-spectral-checks"):
        rng = np.random.default_rng(5)
        cloud = rng.normal(size=(40, 5)) @ rng.normal(size=(5, 5))
        full = pca(cloud, 5)
        gram = full.components @ full.components.T
        assert np.max(np.abs(gram - np.eye(5))) <= 1e-9
        assert float(full.explained_variance_ratio.sum()) == pytest.approx(1.0, abs=1e-9)

        t = rng.normal(size=30)
        line = np.outer(t, np.array([2.0, -1.0, 0.5]))
        assert float(pca(line, 1).explained_variance_ratio[0]) == pytest.approx(
            1.0, abs=1e-9
        )

        pts = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 0.5], [0.0, -0.5]])
        four = pca(pts, 2)
        assert float(four.explained_variance_ratio[0]) == pytest.approx(0.8, abs=1e-9)
        assert np.allclose(four.components[0], [1.0, 0.0], atol=1e-9)


# --- persistence and serving -----------------------------------------


def test_bundle_persistence(tmp_path_factory):
    with criterion("bundle-persistence-roundtrip"):
        root = tmp_path_factory.mktemp("bundles")
        kinds = ("svr", "forest", "knn")
        for trial in range(100):
            rng = np.random.default_rng(9000 + trial)
            kind = kinds[trial % 3]
            n = int(rng.integers(10, 41))
            x = rng.normal(size=(n, 6))
            y = rng.uniform(0.0, 1.0, size=n)
            if kind == "svr":
                model = train_svr(x, y, c=1.0, epsilon=0.05)
                extras = {"c": 1.0, "epsilon": 0.05, "gamma": model.kernel.gamma}
            elif kind == "forest":
                model = train_forest(x, y, n_trees=3, seed=trial)
                extras = {"c": None, "epsilon": None, "gamma": None}
            else:
                model = train_knn(x, y, k=min(5, n))
                extras = {"c": None, "epsilon": None, "gamma": None}
            bundle = Bundle(
                model=model,
                preprocess=_identity_preprocess(),
                training_meta={"n_rows": n, "mean_cv_r2": None, "seed": 0, **extras},
            )
            path = root / f"trial{trial}.bnl.json"
            save_bundle(bundle, path)
            loaded = load_bundle(path)

            queries = rng.normal(size=(20, 6))
            assert np.array_equal(
                predict_model(bundle.model, queries),
                predict_model(loaded.model, queries),
            ), trial

            again = root / f"trial{trial}-again.bnl.json"
            save_bundle(loaded, again)
            assert again.read_bytes() == path.read_bytes(), trial


def _random_payload(rng: np.random.Generator) -> dict:
    return {
        "designation": int(rng.integers(0, 6)),
        "resource_allocation": int(rng.integers(1, 11)),
        "mental_fatigue_score": round(float(rng.uniform(0.0, 10.0)), 1),
        "gender": str(rng.choice(GENDERS)),
        "company_type": str(rng.choice(COMPANY_TYPES)),
        "wfh_setup": str(rng.choice(WFH_VALUES)),
    }


def test_pipeline_route_parity(svr_bundle, tmp_path_factory, capsys):
    """CLI, HTTP, and direct calls answer every request bit-identically."""
    with criterion("pipeline-route-parity"):
        path = tmp_path_factory.mktemp("parity") / "svr.bnl.json"
        save_bundle(svr_bundle, path)
        rng = np.random.default_rng(2024)
        with TestClient(create_app(bundle_path=path)) as client:
            for _ in range(50):
                payload = _random_payload(rng)
                direct = predict_pipeline(svr_bundle, validate_request(payload))

                flags = [
                    "predict",
                    "--bundle", str(path),
                    "--designation", str(payload["designation"]),
                    "--resource", str(payload["resource_allocation"]),
                    "--fatigue", str(payload["mental_fatigue_score"]),
                    "--gender", payload["gender"],
                    "--company", payload["company_type"],
                    "--wfh", payload["wfh_setup"],
                ]
                assert main(flags) == 0
                out = capsys.readouterr().out.strip().splitlines()[-1]
                cli_raw = json.loads(out)["burn_rate_raw"]

                http = client.post("/api/v1/predict", json=payload)
                assert http.status_code == 200
                http_raw = http.json()["burn_rate_raw"]

                assert cli_raw == direct.burn_rate_raw, payload
                assert http_raw == direct.burn_rate_raw, payload


def test_synthetic_end_to_end(tmp_path_factory):
    """Generate 5000 rows, run the full 30-fold comparison, check scores."""
    with criterion("synthetic-end-to-end"):
        root = tmp_path_factory.mktemp("e2e")
        csv = root / "staff.csv"
        report = root / "comparison.json"
        start = time.monotonic()
        assert main(["synth", "--rows", "5000", "--seed", "1", "--out", str(csv)]) == 0
        code = main(["compare", "--csv", str(csv), "--folds", "30", "--out", str(report)])
        elapsed = time.monotonic() - start
        assert code == 0
        assert elapsed < 600.0, f"took {elapsed:.1f}s"
        body = json.loads(report.read_text())
        means = {entry["name"]: entry["mean_r2"] for entry in body["models"]}
        assert means["svr"] >= 0.80, means
        for name in ("knn", "forest", "svr"):
            assert 0.5 <= means[name] <= 1.0, means


# --- original-survey criteria (need the CSV on disk) ------------------


@lru_cache(maxsize=1)
def _real_comparison(path: str):
    table = load_csv(path)
    params = fit_preprocess(table)
    features, targets = encode_supervised(table, params)
    plan = make_folds(len(targets), 30, 0)
    specs = [ModelSpec(name=k, kind=k) for k in ("knn", "forest", "svr")]
    return compare_models(specs, features, targets, plan)


def test_real_data_cv_table():
    path = _real_csv_or_skip("real-data-cv-table")
    with criterion("real-data-cv-table"):
        report = _real_comparison(path)
        means = {r.model_name: r.mean_r2 for r in report.cv_reports}
        assert means["svr"] == pytest.approx(0.84, abs=0.02), means
        assert means["knn"] == pytest.approx(0.83, abs=0.02), means
        assert means["forest"] == pytest.approx(0.83, abs=0.02), means
        assert means["svr"] > means["knn"], means
        assert means["svr"] > means["forest"], means


def test_real_data_pairwise_significance():
    path = _real_csv_or_skip("real-data-pairwise-significance")
    with criterion("real-data-pairwise-significance"):
        report = _real_comparison(path)
        verdicts = {
            frozenset((p.model_a, p.model_b)): p.significant for p in report.pairwise
        }
        assert verdicts[frozenset(("svr", "knn"))] is True
        assert verdicts[frozenset(("svr", "forest"))] is True
        assert verdicts[frozenset(("knn", "forest"))] is False


def test_real_data_fast_mode():
    path = _real_csv_or_skip("real-data-fast-mode")
    with criterion("real-data-fast-mode"):
        table = load_csv(path)
        rng = np.random.default_rng(1)
        pick = rng.choice(len(table.records), size=5000, replace=False)
        sub = Table(records=tuple(table.records[i] for i in pick), source=table.source)
        start = time.monotonic()
        params = fit_preprocess(sub)
        features, targets = encode_supervised(sub, params)
        plan = make_folds(len(targets), 5, 1)
        cv = cross_validate(ModelSpec(name="svr", kind="svr"), features, targets, plan)
        elapsed = time.monotonic() - start
        assert elapsed < 300.0, f"took {elapsed:.1f}s"
        assert cv.mean_r2 >= 0.80, cv.mean_r2


def test_real_data_fatigue_correlation():
    path = _real_csv_or_skip("real-data-fatigue-correlation")
    with criterion("real-data-fatigue-correlation"):
        table = load_csv(path)
        pairs = [
            (rec.mental_fatigue_score, rec.burn_rate)
            for rec in table.records
            if rec.mental_fatigue_score is not None and rec.burn_rate is not None
        ]
        r = pearson([p[0] for p in pairs], [p[1] for p in pairs])
        assert r == pytest.approx(0.94, abs=0.01), r


def test_real_data_wfh_contrast():
    path = _real_csv_or_skip("real-data-wfh-contrast")
    with criterion("real-data-wfh-contrast"):
        table = load_csv(path)
        medians = group_medians(table, "wfh_setup", "burn_rate")
        assert medians["No"] == pytest.approx(0.6, abs=0.05), medians
        assert medians["Yes"] == pytest.approx(0.4, abs=0.05), medians
        no = [r.burn_rate for r in table.records
              if r.wfh_setup == "No" and r.burn_rate is not None]
        yes = [r.burn_rate for r in table.records
               if r.wfh_setup == "Yes" and r.burn_rate is not None]
        assert welch_t_test(no, yes).p_value < 0.01
