"""Window-membership kernels for the brute-force oracle.

Two interchangeable backends evaluate an integer-scaled polytope presentation
over every point of a grid ``{0..B}^s``:

* ``numba``: a compiled loop (default when numba imports cleanly);
* ``numpy``: a vectorised fallback.

Set ``PADICTRI_BACKEND=numpy`` to force the fallback (``numba`` forces the
compiled path and fails loudly if numba is missing).  Both backends are exact:
rational bounds are scaled to integers before they reach the kernel.
"""

from __future__ import annotations

import os

import numpy as np

_REQUESTED = os.environ.get("PADICTRI_BACKEND", "").strip().lower()

try:  # pragma: no cover - exercised according to the environment
    if _REQUESTED == "numpy":
        raise ImportError("numpy backend requested")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    if _REQUESTED == "numba":
        raise
    HAVE_NUMBA = False


def members_mask_numpy(B, mu_c, mu_a, mu_d, nu_c, nu_a, nu_d, nu_inf):
    s = mu_a.shape[0]
    if s == 0:
        return np.ones(1, dtype=np.bool_)
    pts = np.indices((B + 1,) * s, dtype=np.int64).reshape(s, -1)
    ok = np.ones(pts.shape[1], dtype=np.bool_)
    for k in range(s):
        lo = mu_c[k] + mu_a[k] @ pts
        ok &= mu_d[k] * pts[k] >= lo
        if not nu_inf[k]:
            hi = nu_c[k] + nu_a[k] @ pts
            ok &= nu_d[k] * pts[k] <= hi
    return ok


def _members_mask_loop(B, mu_c, mu_a, mu_d, nu_c, nu_a, nu_d, nu_inf):
    s = mu_a.shape[0]
    total = 1
    for _ in range(s):
        total *= B + 1
    out = np.zeros(total, dtype=np.bool_)
    x = np.zeros(s, dtype=np.int64)
    for idx in range(total):
        rem = idx
        for k in range(s - 1, -1, -1):
            x[k] = rem % (B + 1)
            rem //= B + 1
        good = True
        for k in range(s):
            lo = mu_c[k]
            for i in range(k):
                lo += mu_a[k, i] * x[i]
            if mu_d[k] * x[k] < lo:
                good = False
                break
            if not nu_inf[k]:
                hi = nu_c[k]
                for i in range(k):
                    hi += nu_a[k, i] * x[i]
                if nu_d[k] * x[k] > hi:
                    good = False
                    break
        out[idx] = good
    return out


if HAVE_NUMBA:
    members_mask_numba = njit(cache=False)(_members_mask_loop)
    BACKEND = "numba"
    members_mask = members_mask_numba
else:  # pragma: no cover
    members_mask_numba = None
    BACKEND = "numpy"
    members_mask = members_mask_numpy
