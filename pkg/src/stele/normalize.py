"""Two-stage metric standardization: z-score, then sigmoid compression.

Raw author metrics span four orders of magnitude, so direct visual
mapping would be dominated by the outliers. Standardizing first and
then squashing through a sigmoid keeps mid-range differences legible
while bounding the extremes.

Conventions used throughout the package:

* z-scores use the population standard deviation (ddof=0): the cohort
  under study is the whole population, not a sample;
* a zero-variance vector standardizes to all zeros, which the sigmoid
  maps to 0.5 (an all-equal cohort renders at half height).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["CompressionParams", "zscore", "sigmoid_compress", "standardize_metric"]


@dataclass(frozen=True)
class CompressionParams:
    """Sigmoid steepness per metric family.

    Productivity counts get the gentler curve; public-attention volumes
    are more volatile and use a slightly stronger compression.
    """

    k_productivity: float = 0.5
    k_attention: float = 0.7

    def __post_init__(self):
        if not (self.k_productivity > 0 and self.k_attention > 0):
            raise ValueError("compression coefficients must be > 0")


def zscore(values) -> np.ndarray:
    """Population z-scores of ``values``.

    Zero-variance input yields all zeros rather than dividing by zero.
    """
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("zscore: empty input")
    if not np.all(np.isfinite(arr)):
        raise ValueError("zscore: input contains non-finite values")
    # all-equal input is the zero-variance case; checked exactly because
    # float mean subtraction can report a spurious std of ~1 ulp, which
    # would blow degenerate inputs up to +-1 instead of 0
    if np.all(arr == arr[0]):
        return np.zeros_like(arr)
    std = arr.std()  # ddof=0
    if std == 0.0:
        return np.zeros_like(arr)
    return (arr - arr.mean()) / std


def sigmoid_compress(x: float, k: float) -> float:
    """1 / (1 + e^(-k*x)), strictly inside (0, 1).

    Evaluated branch-wise so both tails keep full float precision.
    """
    if not math.isfinite(x):
        raise ValueError(f"sigmoid_compress: non-finite input {x!r}")
    if k <= 0:
        raise ValueError("sigmoid_compress: k must be > 0")
    t = k * x
    if t >= 0:
        return 1.0 / (1.0 + math.exp(-t))
    e = math.exp(t)
    return e / (1.0 + e)


def standardize_metric(values, k: float) -> np.ndarray:
    """Elementwise ``sigmoid_compress(zscore(values), k)``.

    Both stages are strictly monotone, so the output rank order equals
    the input rank order.
    """
    z = zscore(values)
    return np.array([sigmoid_compress(float(v), k) for v in z])
