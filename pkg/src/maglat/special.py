"""Complex digamma function.

Upward recurrence psi(z) = psi(z+1) - 1/z until Re z >= 10, then the
asymptotic series  ln z - 1/(2z) - sum_k B_2k / (2k z^2k)  through B_14.
"""

from __future__ import annotations

import numpy as np

# B_2k / (2k) for k = 1..7
_ASYMPTOTIC = np.array([
    1.0 / 6 / 2,
    -1.0 / 30 / 4,
    1.0 / 42 / 6,
    -1.0 / 30 / 8,
    5.0 / 66 / 10,
    -691.0 / 2730 / 12,
    7.0 / 6 / 14,
])

_SHIFT_TO = 10.0


def _asymptotic(z):
    inv2 = 1.0 / (z * z)
    acc = np.zeros_like(z)
    for c in _ASYMPTOTIC[::-1]:
        acc = (acc + c) * inv2
    return np.log(z) - 0.5 / z - acc


def digamma(z):
    """psi(z) for complex (or real) array input; raises at the poles z = 0, -1, -2, ..."""
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z).copy()
    pole = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if np.any(pole):
        raise ValueError(f"digamma pole at {z[pole][0].real:g}")
    acc = np.zeros_like(z)
    n_shift = np.maximum(0, np.ceil(_SHIFT_TO - z.real)).astype(int)
    for i in range(int(n_shift.max(initial=0))):
        m = n_shift > i
        acc[m] -= 1.0 / z[m]
        z[m] += 1.0
    out = acc + _asymptotic(z)
    return out[0] if scalar else out
