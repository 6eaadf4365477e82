"""Input checks shared by the estimator classes."""

from __future__ import annotations

import numpy as np
from sklearn.utils.validation import column_or_1d

from .eptas import Epsilon
from .instance import MAX_PROCESSING_TIME as MAX_P


def check_processing_times(X) -> tuple[int, ...]:
    """Accept a 1-d array-like (or a single-column 2-d one) of positive integers."""
    arr = np.asarray(X)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    arr = column_or_1d(arr)
    if arr.size == 0:
        raise ValueError("need at least one job")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.issubdtype(arr.dtype, np.floating) or not np.all(np.mod(arr, 1) == 0):
            raise ValueError("processing times must be integers")
    if np.any(arr < 1) or np.any(arr > MAX_P):
        raise ValueError(f"processing times must lie in [1, {MAX_P}]")
    return tuple(int(v) for v in arr)


def check_machines(n_machines) -> int:
    if isinstance(n_machines, bool) or int(n_machines) != n_machines or n_machines < 1:
        raise ValueError(f"n_machines must be a positive integer, got {n_machines!r}")
    return int(n_machines)


def check_epsilon(eps) -> Epsilon:
    if isinstance(eps, Epsilon):
        return eps
    return Epsilon.parse(eps)


def check_mode(mode) -> str:
    if mode not in ("paper", "oracle"):
        raise ValueError(f"mode must be 'paper' or 'oracle', got {mode!r}")
    return mode
