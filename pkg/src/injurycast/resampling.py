"""ADASYN adaptive synthetic oversampling of the minority (injury) class."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import TooFewMinority
from .features import TrainingTable


@dataclass(frozen=True)
class ResamplingConfig:
    k_neighbors: int = 5
    balance_ratio: float = 1.0  # fraction of the class gap to fill
    seed: int = 0

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise ValueError("k_neighbors must be >= 1")
        if not (0 < self.balance_ratio <= 1):
            raise ValueError("balance_ratio must be in (0, 1]")


def _standardize(X: np.ndarray) -> np.ndarray:
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    sd[sd == 0] = 1.0
    return (X - mu) / sd


def _nearest(dist_row: np.ndarray, self_idx: int, k: int) -> np.ndarray:
    order = np.argsort(dist_row, kind="stable")
    return np.array([j for j in order if j != self_idx][:k])


def adasyn(table: TrainingTable, cfg: ResamplingConfig) -> TrainingTable:
    """Append synthetic minority examples along segments between minority neighbors.

    The number of synthetics per minority point is proportional to the fraction
    of majority examples among its k nearest neighbors, so harder-to-learn
    points receive more. Deterministic for a fixed seed; originals are never
    mutated and synthetic rows carry label 1 and a synthetic flag.
    """
    y = table.y
    minority = np.flatnonzero(y == 1)
    majority = np.flatnonzero(y == 0)
    if len(minority) < 2:
        raise TooFewMinority(
            f"ADASYN needs at least 2 minority examples, got {len(minority)}")
    if len(majority) < 1:
        raise TooFewMinority("ADASYN needs at least 1 majority example")

    n_new = int(round(cfg.balance_ratio * (len(majority) - len(minority))))
    if n_new <= 0:
        return table

    rng = np.random.default_rng(cfg.seed)
    Z = _standardize(table.X)
    Zmin = Z[minority]

    # majority fraction among the k nearest neighbors in the full table
    k_full = min(cfg.k_neighbors, len(table) - 1)
    dists_full = np.linalg.norm(Zmin[:, None, :] - Z[None, :, :], axis=2)
    r = np.empty(len(minority))
    for i, row_idx in enumerate(minority):
        nbrs = _nearest(dists_full[i], row_idx, k_full)
        r[i] = np.mean(y[nbrs] == 0)
    if r.sum() == 0:
        # pure-minority neighborhoods everywhere: fall back to uniform allocation
        r_hat = np.full(len(minority), 1.0 / len(minority))
    else:
        r_hat = r / r.sum()

    # integer allocation summing exactly to n_new (largest-remainder rounding)
    raw = r_hat * n_new
    alloc = np.floor(raw).astype(int)
    remainder = n_new - alloc.sum()
    if remainder > 0:
        order = np.argsort(-(raw - alloc), kind="stable")
        alloc[order[:remainder]] += 1

    # interpolation partners come from minority points only
    k_min = min(cfg.k_neighbors, len(minority) - 1)
    dists_min = np.linalg.norm(Zmin[:, None, :] - Zmin[None, :, :], axis=2)
    if np.all(dists_min == 0):
        warnings.warn("all minority points are identical; ADASYN will duplicate them")

    role_col = (table.feature_names.index("role")
                if "role" in table.feature_names else None)

    new_rows = []
    for i, g in enumerate(alloc):
        if g == 0:
            continue
        nbrs = _nearest(dists_min[i], i, k_min)
        xi = table.X[minority[i]]
        for _ in range(g):
            partner = table.X[minority[nbrs[rng.integers(len(nbrs))]]]
            lam = rng.uniform()
            row = xi + lam * (partner - xi)
            if role_col is not None:
                row[role_col] = np.clip(np.rint(row[role_col]), 0, 4)
            new_rows.append(row)

    X = np.vstack([table.X, np.array(new_rows)])
    y_out = np.concatenate([y, np.ones(len(new_rows), dtype=int)])
    return TrainingTable(
        list(table.feature_names), X, y_out,
        list(table.player_ids) + ["synthetic"] * len(new_rows),
        list(table.dates) + [None] * len(new_rows),
        np.concatenate([table.synthetic, np.ones(len(new_rows), dtype=bool)]),
    )
