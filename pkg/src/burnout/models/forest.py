"""Random forest regression with exact variance-minimizing splits.

Split rule: over the node's candidate features, consider midpoints
between consecutive sorted distinct values and minimize
SSE(left) + SSE(right); ties resolve to the lowest feature index, then
the lowest threshold.  Rows route left when x[feature] <= threshold.

Trees grow level by level with segmented prefix-sum scans, which keeps
training vectorized across all nodes of a depth instead of paying numpy
call overhead per node.  The public best_split runs the same scan on a
single segment, so both paths share one split definition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True, slots=True)
class Tree:
    """Flat node arrays; feature < 0 marks a leaf, value is the leaf mean."""

    feature: np.ndarray  # int32
    threshold: np.ndarray  # float64, nan at leaves
    left: np.ndarray  # int32, -1 at leaves
    right: np.ndarray  # int32, -1 at leaves
    value: np.ndarray  # float64, nan at internal nodes


@dataclass(frozen=True, slots=True)
class ForestModel:
    trees: tuple[Tree, ...]
    n_features: int
    n_trees: int
    max_depth: int | None
    min_samples_leaf: int
    max_features: int
    seed: int
    bootstrap: bool


def _scan_segments(
    xs: np.ndarray,
    ys: np.ndarray,
    seg_starts: np.ndarray,
    seg_lens: np.ndarray,
    min_samples_leaf: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Best (score, threshold) per segment for one feature.

    xs/ys hold concatenated segments, each sorted by value with stable
    order.  Returns +inf score where a segment has no valid split.
    Within a segment ties take the lowest threshold because positions
    scan in ascending value with strict improvement.
    """
    m = xs.size
    n_seg = seg_starts.size
    seg_id = np.repeat(np.arange(n_seg), seg_lens)
    start_of = seg_starts[seg_id]
    len_of = seg_lens[seg_id]

    cum_y = np.cumsum(ys)
    cum_y2 = np.cumsum(ys * ys)
    prev = np.maximum(start_of - 1, 0)
    off_y = np.where(start_of > 0, cum_y[prev], 0.0)
    off_y2 = np.where(start_of > 0, cum_y2[prev], 0.0)
    pre_y = cum_y - off_y
    pre_y2 = cum_y2 - off_y2

    seg_ends = seg_starts + seg_lens - 1
    tot_y = (cum_y[seg_ends] - np.where(seg_starts > 0, cum_y[np.maximum(seg_starts - 1, 0)], 0.0))[seg_id]
    tot_y2 = (cum_y2[seg_ends] - np.where(seg_starts > 0, cum_y2[np.maximum(seg_starts - 1, 0)], 0.0))[seg_id]

    pos = np.arange(m) - start_of
    left_cnt = pos + 1.0
    right_cnt = len_of - left_cnt

    next_differs = np.empty(m, dtype=bool)
    next_differs[:-1] = xs[:-1] != xs[1:]
    next_differs[-1] = False
    valid = (
        (pos < len_of - 1)
        & next_differs
        & (left_cnt >= min_samples_leaf)
        & (right_cnt >= min_samples_leaf)
    )

    with np.errstate(divide="ignore", invalid="ignore"):
        sse_left = pre_y2 - pre_y * pre_y / left_cnt
        right_sum = tot_y - pre_y
        sse_right = (tot_y2 - pre_y2) - right_sum * right_sum / right_cnt
        score = np.where(valid, sse_left + sse_right, np.inf)

    thresholds = np.empty(m)
    thresholds[:-1] = 0.5 * (xs[:-1] + xs[1:])
    thresholds[-1] = np.nan

    best_score = np.full(n_seg, np.inf)
    best_thr = np.full(n_seg, np.nan)
    seg_min = np.minimum.reduceat(score, seg_starts)
    hit = np.flatnonzero((score == seg_min[seg_id]) & np.isfinite(score))
    if hit.size:
        segs, first = np.unique(seg_id[hit], return_index=True)
        best_score[segs] = score[hit[first]]
        best_thr[segs] = thresholds[hit[first]]
    return best_score, best_thr


def best_split(
    features: np.ndarray,
    targets: np.ndarray,
    candidate_features: Sequence[int],
    min_samples_leaf: int,
) -> tuple[int, float] | None:
    """Best (feature, threshold) over the candidates, or None.

    None when every target is equal or no split leaves both children
    with at least min_samples_leaf rows.
    """
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(targets, dtype=np.float64)
    if x.ndim != 2 or y.ndim != 1 or x.shape[0] != y.size:
        raise ValueError("features must be (n, d) with matching 1-d targets")
    if min_samples_leaf < 1:
        raise ValueError("min_samples_leaf must be at least 1")
    candidates = sorted(set(int(f) for f in candidate_features))
    if not candidates:
        raise ValueError("need at least one candidate feature")
    if candidates[0] < 0 or candidates[-1] >= x.shape[1]:
        raise ValueError("candidate feature index out of range")
    if y.size == 0 or np.all(y == y[0]):
        return None

    starts = np.array([0])
    lens = np.array([y.size])
    best: tuple[int, float] | None = None
    best_score = math.inf
    for f in candidates:
        column = x[:, f]
        order = np.argsort(column, kind="stable")
        score, thr = _scan_segments(column[order], y[order], starts, lens, min_samples_leaf)
        if score[0] < best_score:
            best_score = float(score[0])
            best = (f, float(thr[0]))
    return best


def _grow_tree(
    x: np.ndarray,
    y: np.ndarray,
    max_depth: int | None,
    min_samples_leaf: int,
    max_features: int,
    rng: np.random.Generator,
) -> Tree:
    """Level-wise growth; all nodes of a depth are scanned in one pass."""
    n_rows, n_features = x.shape
    feature: list[int] = [-2]  # placeholder, filled when the node resolves
    threshold: list[float] = [math.nan]
    left: list[int] = [-1]
    right: list[int] = [-1]
    value: list[float] = [math.nan]

    act_rows = np.arange(n_rows)
    act_nodes = np.zeros(n_rows, dtype=np.int64)
    level_ids = [0]
    depth = 0
    while level_ids:
        level_start = level_ids[0]
        n_level = len(level_ids)
        slot_of_row = act_nodes - level_start

        order = np.argsort(act_nodes, kind="stable")
        sorted_y = y[act_rows[order]]
        sorted_nodes = act_nodes[order]
        starts_mask = np.empty(sorted_nodes.size, dtype=bool)
        starts_mask[0] = True
        starts_mask[1:] = sorted_nodes[1:] != sorted_nodes[:-1]
        seg_starts = np.flatnonzero(starts_mask)
        counts = np.diff(np.append(seg_starts, sorted_nodes.size))
        sums = np.add.reduceat(sorted_y, seg_starts)
        y_min = np.minimum.reduceat(sorted_y, seg_starts)
        y_max = np.maximum.reduceat(sorted_y, seg_starts)

        depth_ok = max_depth is None or depth < max_depth
        splittable = depth_ok & (counts >= 2 * min_samples_leaf) & (y_min < y_max)

        has_f = np.zeros((n_level, n_features), dtype=bool)
        split_slots = np.flatnonzero(splittable)
        if split_slots.size:
            # One uniform draw per splittable node: random subset of
            # max_features features via argsort of uniforms.
            draws = np.argsort(rng.random((split_slots.size, n_features)), axis=1)[
                :, :max_features
            ]
            has_f[np.repeat(split_slots, max_features), draws.ravel()] = True

        best_score = np.full(n_level, np.inf)
        best_feat = np.full(n_level, -1, dtype=np.int64)
        best_thr = np.full(n_level, np.nan)
        for f in range(n_features):
            slots_f = splittable & has_f[:, f]
            if not slots_f.any():
                continue
            row_mask = slots_f[slot_of_row]
            rr = act_rows[row_mask]
            nn = act_nodes[row_mask]
            xv = x[rr, f]
            yv = y[rr]
            sub = np.lexsort((xv, nn))
            xs = xv[sub]
            ys = yv[sub]
            ns = nn[sub]
            smask = np.empty(ns.size, dtype=bool)
            smask[0] = True
            smask[1:] = ns[1:] != ns[:-1]
            f_starts = np.flatnonzero(smask)
            f_lens = np.diff(np.append(f_starts, ns.size))
            score, thr = _scan_segments(xs, ys, f_starts, f_lens, min_samples_leaf)
            slots = ns[f_starts] - level_start
            improve = score < best_score[slots]
            upd = slots[improve]
            best_score[upd] = score[improve]
            best_feat[upd] = f
            best_thr[upd] = thr[improve]

        child_left = np.full(n_level, -1, dtype=np.int64)
        child_right = np.full(n_level, -1, dtype=np.int64)
        next_ids: list[int] = []
        for slot in range(n_level):
            node_id = level_start + slot
            if best_feat[slot] < 0:
                feature[node_id] = -1
                value[node_id] = float(sums[slot] / counts[slot])
                continue
            feature[node_id] = int(best_feat[slot])
            threshold[node_id] = float(best_thr[slot])
            lid = len(feature)
            for _ in range(2):
                feature.append(-2)
                threshold.append(math.nan)
                left.append(-1)
                right.append(-1)
                value.append(math.nan)
            left[node_id] = lid
            right[node_id] = lid + 1
            child_left[slot] = lid
            child_right[slot] = lid + 1
            next_ids.extend((lid, lid + 1))

        went_internal = best_feat[slot_of_row] >= 0
        if went_internal.any():
            rr = act_rows[went_internal]
            slots = slot_of_row[went_internal]
            xvals = x[rr, best_feat[slots]]
            goes_left = xvals <= best_thr[slots]
            act_rows = rr
            act_nodes = np.where(goes_left, child_left[slots], child_right[slots])
        else:
            act_rows = act_rows[:0]
            act_nodes = act_nodes[:0]
        level_ids = next_ids
        depth += 1

    return Tree(
        feature=np.array(feature, dtype=np.int32),
        threshold=np.array(threshold, dtype=np.float64),
        left=np.array(left, dtype=np.int32),
        right=np.array(right, dtype=np.int32),
        value=np.array(value, dtype=np.float64),
    )


def train_forest(
    features: np.ndarray,
    targets: np.ndarray,
    n_trees: int = 100,
    max_depth: int | None = 16,
    min_samples_leaf: int = 2,
    max_features: int | None = None,
    seed: int = 0,
    bootstrap: bool = True,
) -> ForestModel:
    """Fit a forest; each tree's resample and feature draws are
    deterministic functions of (seed, tree index).

    bootstrap=False (test hook) trains every tree on the full sample.
    max_features defaults to max(1, d // 3); max_depth None removes the
    depth cap.
    """
    x = np.ascontiguousarray(features, dtype=np.float64)
    y = np.ascontiguousarray(targets, dtype=np.float64)
    if x.ndim != 2 or y.ndim != 1 or x.shape[0] != y.size:
        raise ValueError("features must be (n, d) with matching 1-d targets")
    if x.shape[0] < 1:
        raise ValueError("need at least one training row")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise ValueError("training data must be finite")
    if n_trees < 1:
        raise ValueError("n_trees must be at least 1")
    if max_depth is not None and max_depth < 1:
        raise ValueError("max_depth must be at least 1 (or None for unlimited)")
    if min_samples_leaf < 1:
        raise ValueError("min_samples_leaf must be at least 1")
    d = x.shape[1]
    if max_features is None:
        max_features = max(1, d // 3)
    if not 1 <= max_features <= d:
        raise ValueError(f"max_features must lie in [1, {d}]")

    trees = []
    for k in range(n_trees):
        rng = np.random.default_rng([seed, k])
        if bootstrap:
            rows = rng.integers(0, x.shape[0], x.shape[0])
            xb, yb = x[rows], y[rows]
        else:
            xb, yb = x, y
        trees.append(_grow_tree(xb, yb, max_depth, min_samples_leaf, max_features, rng))
    return ForestModel(
        trees=tuple(trees),
        n_features=d,
        n_trees=n_trees,
        max_depth=max_depth,
        min_samples_leaf=min_samples_leaf,
        max_features=max_features,
        seed=seed,
        bootstrap=bootstrap,
    )


def _tree_predict(tree: Tree, queries: np.ndarray) -> np.ndarray:
    idx = np.zeros(queries.shape[0], dtype=np.int64)
    rows = np.arange(queries.shape[0])
    while True:
        feat = tree.feature[idx]
        at_leaf = feat < 0
        if at_leaf.all():
            return tree.value[idx]
        xval = queries[rows, np.maximum(feat, 0)]
        goes_left = xval <= tree.threshold[idx]
        step = np.where(goes_left, tree.left[idx], tree.right[idx])
        idx = np.where(at_leaf, idx, step)


def predict_forest(model: ForestModel, x: np.ndarray) -> float | np.ndarray:
    """Mean of per-tree predictions; float for a single vector input."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    queries = np.atleast_2d(x)
    if queries.shape[1] != model.n_features:
        raise ValueError(f"expected {model.n_features} features, got {queries.shape[1]}")
    acc = np.zeros(queries.shape[0])
    for tree in model.trees:
        acc += _tree_predict(tree, queries)
    values = acc / len(model.trees)
    return float(values[0]) if single else values
