"""Order-statistic quantiles with linear interpolation."""

import numpy as np

from .errors import ValidationError


def empirical_quantile(values, q):
    """Quantile ``q`` of ``values`` by linear interpolation between order statistics.

    The fractional index is ``(m - 1) * q`` into the sorted sample, so
    ``q = 0`` gives the minimum and ``q = 1`` the maximum. ``q`` may be an
    array. Input need not be pre-sorted.
    """
    v = np.sort(np.asarray(values, dtype=float).ravel())
    m = v.size
    if m == 0:
        raise ValidationError("empirical quantile of an empty sample", module="inference")
    q = np.asarray(q, dtype=float)
    if np.any((q < 0) | (q > 1)):
        raise ValidationError("quantile level must lie in [0, 1]", module="inference")
    pos = (m - 1) * q
    lo = np.floor(pos).astype(int)
    hi = np.minimum(lo + 1, m - 1)
    frac = pos - lo
    out = v[lo] + frac * (v[hi] - v[lo])
    return float(out) if out.ndim == 0 else out


def iqr(values):
    lo, hi = empirical_quantile(values, [0.25, 0.75])
    return hi - lo
