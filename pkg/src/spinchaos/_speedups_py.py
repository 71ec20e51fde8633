"""Pure-numpy fallback for the compiled kernels in ``_speedups``.

Same signatures, same semantics; selected by ``kernels`` when the extension
is unavailable or disabled via the SPINCHAOS_NO_EXT environment variable.
"""

import numpy as np


def phase_weighted_sum(weights, theta0: float, dtheta: float) -> complex:
    """Return sum_j weights[j] * exp(i*(theta0 + j*dtheta))."""
    w = np.asarray(weights, dtype=float)
    theta = theta0 + dtheta * np.arange(w.shape[0])
    return complex(float(w @ np.cos(theta)), float(w @ np.sin(theta)))
