"""Bundle persistence: canonical bytes, round trips, and validation."""

from __future__ import annotations

import json

import numpy as np
import pytest

from burnout.dataset import FEATURE_COLUMNS, fit_preprocess, apply_preprocess
from burnout.evaluation import predict_model
from burnout.models.forest import train_forest
from burnout.models.knn import train_knn
from burnout.models.svr import SmoConfig, train_svr
from burnout.modelstore import (
    MAGIC,
    Bundle,
    BundleError,
    load_bundle,
    model_dim,
    save_bundle,
)
from burnout.dataset import generate_synthetic


def trained_bundle(kind: str, n_rows: int = 40, seed: int = 5) -> Bundle:
    table = generate_synthetic(n_rows, seed=seed)
    params = fit_preprocess(table)
    features, targets = apply_preprocess(table, params)
    if kind == "svr":
        model = train_svr(features, targets, config=SmoConfig(tol=1e-4))
    elif kind == "forest":
        model = train_forest(features, targets, n_trees=5, seed=seed)
    else:
        model = train_knn(features, targets, k=5)
    return Bundle(
        model=model,
        preprocess=params,
        training_meta={
            "n_rows": int(targets.size),
            "mean_cv_r2": 0.87,
            "c": 1.0 if kind == "svr" else None,
            "epsilon": 0.1 if kind == "svr" else None,
            "gamma": model.kernel.gamma if kind == "svr" else None,
            "seed": seed,
        },
    )


def rewrite_bundle(path, mutate):
    """Apply a JSON-level mutation to a saved bundle file."""
    body = path.read_bytes()[len(MAGIC) :]
    payload = json.loads(body)
    mutate(payload)
    path.write_bytes(
        MAGIC
        + json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
        + b"\n"
    )


@pytest.mark.parametrize("kind", ["svr", "forest", "knn"])
class TestRoundTrip:
    def test_deep_equality(self, tmp_path, kind):
        bundle = trained_bundle(kind)
        path = tmp_path / "m.bnl.json"
        save_bundle(bundle, path)
        loaded = load_bundle(path)
        assert loaded.model_kind == bundle.model_kind
        assert loaded.preprocess == bundle.preprocess
        assert loaded.training_meta == bundle.training_meta
        assert loaded.created_at == bundle.created_at
        assert type(loaded.model) is type(bundle.model)

    def test_predictions_survive_serialization(self, tmp_path, kind):
        bundle = trained_bundle(kind)
        path = tmp_path / "m.bnl.json"
        save_bundle(bundle, path)
        loaded = load_bundle(path)
        queries = np.random.default_rng(0).normal(size=(100, len(FEATURE_COLUMNS)))
        original = predict_model(bundle.model, queries)
        restored = predict_model(loaded.model, queries)
        assert np.array_equal(original, restored)

    def test_double_save_byte_identical(self, tmp_path, kind):
        bundle = trained_bundle(kind)
        first = tmp_path / "a.bnl.json"
        second = tmp_path / "b.bnl.json"
        save_bundle(bundle, first)
        save_bundle(bundle, second)
        assert first.read_bytes() == second.read_bytes()


class TestSaveValidation:
    def test_suffix_enforced(self, tmp_path):
        bundle = trained_bundle("knn")
        with pytest.raises(BundleError, match="bnl.json"):
            save_bundle(bundle, tmp_path / "m.json")

    def test_dimension_mismatch_rejected(self, tmp_path):
        narrow = train_knn(np.zeros((4, 3)), np.arange(4.0), k=1)
        donor = trained_bundle("knn")
        bundle = Bundle(
            model=narrow,
            preprocess=donor.preprocess,
            training_meta=donor.training_meta,
        )
        with pytest.raises(BundleError, match="dimension|features"):
            save_bundle(bundle, tmp_path / "m.bnl.json")

    def test_bad_training_meta_rejected(self, tmp_path):
        donor = trained_bundle("knn")
        meta = dict(donor.training_meta)
        del meta["gamma"]
        bundle = Bundle(model=donor.model, preprocess=donor.preprocess, training_meta=meta)
        with pytest.raises(BundleError, match="gamma"):
            save_bundle(bundle, tmp_path / "m.bnl.json")

    def test_created_at_is_isoformat(self):
        from datetime import datetime

        bundle = trained_bundle("knn")
        datetime.fromisoformat(bundle.created_at)


class TestLoadValidation:
    def write(self, tmp_path, kind="knn"):
        path = tmp_path / "m.bnl.json"
        save_bundle(trained_bundle(kind), path)
        return path

    def test_magic_required(self, tmp_path):
        path = tmp_path / "m.bnl.json"
        path.write_bytes(b'{"format_version": 1}')
        with pytest.raises(BundleError, match="magic|bundle"):
            load_bundle(path)

    def test_truncated_file_rejected(self, tmp_path):
        path = self.write(tmp_path)
        data = path.read_bytes()
        path.write_bytes(data[: len(data) // 2])
        with pytest.raises(BundleError):
            load_bundle(path)

    def test_unknown_format_version(self, tmp_path):
        path = self.write(tmp_path)
        rewrite_bundle(path, lambda p: p.__setitem__("format_version", 99))
        with pytest.raises(BundleError, match="format_version|version"):
            load_bundle(path)

    def test_unknown_model_kind(self, tmp_path):
        path = self.write(tmp_path)
        rewrite_bundle(path, lambda p: p.__setitem__("model_kind", "Perceptron"))
        with pytest.raises(BundleError, match="model_kind"):
            load_bundle(path)

    def test_negative_c_named(self, tmp_path):
        path = self.write(tmp_path, kind="svr")
        rewrite_bundle(path, lambda p: p["model"].__setitem__("c", -1.0))
        with pytest.raises(BundleError, match="model.c"):
            load_bundle(path)

    def test_dual_coef_beyond_box_rejected(self, tmp_path):
        path = self.write(tmp_path, kind="svr")

        def bump(payload):
            coefs = payload["model"]["dual_coefs"]
            if not coefs:
                coefs.append(0.0)
            coefs[0] = payload["model"]["c"] * 5.0

        rewrite_bundle(path, bump)
        with pytest.raises(BundleError, match="dual_coefs"):
            load_bundle(path)

    def test_tree_child_cycle_rejected(self, tmp_path):
        path = self.write(tmp_path, kind="forest")

        def corrupt(payload):
            tree = payload["model"]["trees"][0]
            for i, feature in enumerate(tree["feature"]):
                if feature >= 0:
                    tree["left"][i] = 0
                    return
            raise AssertionError("expected an internal node")

        rewrite_bundle(path, corrupt)
        with pytest.raises(BundleError, match="left|child"):
            load_bundle(path)

    def test_leaf_without_value_rejected(self, tmp_path):
        path = self.write(tmp_path, kind="forest")

        def corrupt(payload):
            tree = payload["model"]["trees"][0]
            for i, feature in enumerate(tree["feature"]):
                if feature < 0:
                    tree["value"][i] = None
                    return
            raise AssertionError("expected a leaf")

        rewrite_bundle(path, corrupt)
        with pytest.raises(BundleError, match="value"):
            load_bundle(path)

    def test_feature_columns_pinned(self, tmp_path):
        path = self.write(tmp_path)
        rewrite_bundle(
            path, lambda p: p["preprocess"]["feature_columns"].__setitem__(0, "rank")
        )
        with pytest.raises(BundleError, match="feature_columns"):
            load_bundle(path)

    def test_missing_meta_key_named(self, tmp_path):
        path = self.write(tmp_path)
        rewrite_bundle(path, lambda p: p["training_meta"].pop("seed"))
        with pytest.raises(BundleError, match="seed"):
            load_bundle(path)

    def test_negative_sd_rejected(self, tmp_path):
        path = self.write(tmp_path)
        rewrite_bundle(
            path, lambda p: p["preprocess"]["feature_sds"].__setitem__(0, -1.0)
        )
        with pytest.raises(BundleError, match="sds"):
            load_bundle(path)

    def test_bad_created_at_rejected(self, tmp_path):
        path = self.write(tmp_path)
        rewrite_bundle(path, lambda p: p.__setitem__("created_at", "yesterday"))
        with pytest.raises(BundleError, match="created_at"):
            load_bundle(path)

    def test_knn_k_out_of_range_rejected(self, tmp_path):
        path = self.write(tmp_path, kind="knn")
        rewrite_bundle(path, lambda p: p["model"].__setitem__("k", 10_000))
        with pytest.raises(BundleError, match="k"):
            load_bundle(path)


class TestModelKind:
    def test_kind_labels(self):
        assert trained_bundle("svr").model_kind == "Svr"
        assert trained_bundle("forest").model_kind == "Forest"
        assert trained_bundle("knn").model_kind == "Knn"

    def test_model_dim(self):
        for kind in ("svr", "forest", "knn"):
            assert model_dim(trained_bundle(kind).model) == len(FEATURE_COLUMNS)
