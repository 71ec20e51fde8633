"""Hot-loop kernel selection plus shared weight-vector helpers.

The compiled extension is preferred when importable; set SPINCHAOS_NO_EXT
to any non-empty value to force the pure-numpy fallback.  ``KERNEL_BACKEND``
records which one is active.
"""

from __future__ import annotations

import math
import os

import numpy as np
from scipy import stats

if os.environ.get("SPINCHAOS_NO_EXT"):
    from ._speedups_py import phase_weighted_sum

    KERNEL_BACKEND = "python"
else:
    try:
        from ._speedups import phase_weighted_sum

        KERNEL_BACKEND = "cython"
    except ImportError:
        from ._speedups_py import phase_weighted_sum

        KERNEL_BACKEND = "python"


def binomial_weights(m: int, p: float, sigma_window: float | None = None):
    """Binomial(m, p) mass function, renormalized to unit total.

    Returns ``(j0, w)`` where ``w[i]`` is the weight of count ``j0 + i``.
    With ``sigma_window`` set, only counts within that many standard
    deviations of the mean are kept (never fewer than one point); the
    retained mass is renormalized to 1 so truncation never biases totals.
    """
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0,1], got {p}")
    if m == 0:
        return 0, np.ones(1)
    if sigma_window is None:
        j0, j1 = 0, m
    else:
        if sigma_window <= 0:
            raise ValueError(f"sigma_window must be positive, got {sigma_window}")
        center = m * p
        half = sigma_window * math.sqrt(m * p * (1.0 - p))
        j0 = max(0, int(math.floor(center - half)))
        j1 = min(m, int(math.ceil(center + half)))
    j = np.arange(j0, j1 + 1)
    w = stats.binom.pmf(j, m, p)
    total = math.fsum(w)
    if total <= 0.0:
        # window missed all the mass (possible only for extreme p); fall back
        # to the single most likely count
        jstar = min(m, max(0, int(round(m * p))))
        return jstar, np.ones(1)
    return j0, w / total


__all__ = ["phase_weighted_sum", "binomial_weights", "KERNEL_BACKEND"]
