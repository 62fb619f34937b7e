"""Hot numeric kernels for the separability optimizer.

Everything here is called thousands of times per optimization run: the
partial reflection of a 4x4 matrix, the hyperspherical chart for pure-state
vectors, and the one-dimensional solve for the largest feasible separable
weight of a fixed pure part.  The functions are written in plain
numba-compatible numpy and compiled with ``@njit`` at import time; setting
the environment variable ``QPAIR_PURE_NUMPY=1`` (before import) skips the
compilation and runs the identical source uncompiled.  The compiled
eigensolver may round differently in the last ulp, so the two backends
agree to rounding level, not bit for bit.

The feasible set of the weight lam is an interval: the smallest eigenvalue
of an affine Hermitian pencil is a concave function of lam, and so is the
minimum of two of them, so {lam : margin(lam) >= threshold(lam)} with an
affine threshold is convex.  The solver exploits this: golden-section
search on the concave margin finds an interior feasible point even when
the interval degenerates to a single touching point, and bisection then
pins the upper boundary.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "BACKEND",
    "reflect4",
    "chart_amplitudes",
    "lam_margin",
    "max_feasible_lambda",
    "neg_lambda_objective",
]

# absolute eigenvalue noise floor, below any meaningful feasibility slack
_FLOOR = 1e-14

_GOLDEN = 0.6180339887498949


def reflect4(m):
    """Partial reflection of a 4x4 matrix: 1 (x) tr_1(m) - m.

    Written out entry by entry (no kron) so it compiles to straight-line
    code.  Equals the density matrix of the parameter map
    (s, t, C) -> (-s, t, -C) and shares its spectrum with the partial
    transpose.
    """
    out = -m.copy()
    r00 = m[0, 0] + m[2, 2]
    r01 = m[0, 1] + m[2, 3]
    r10 = m[1, 0] + m[3, 2]
    r11 = m[1, 1] + m[3, 3]
    out[0, 0] += r00
    out[0, 1] += r01
    out[1, 0] += r10
    out[1, 1] += r11
    out[2, 2] += r00
    out[2, 3] += r01
    out[3, 2] += r10
    out[3, 3] += r11
    return out


def chart_amplitudes(th):
    """Hyperspherical chart: 2(r-1) real angles -> r complex amplitudes.

    The first r-1 entries of ``th`` are magnitude angles (nested
    sin/cos chain, unit norm by construction), the rest are phases on
    components 1..r-1; component 0 stays real.  This fixes normalization
    and global phase, leaving exactly the physical degrees of freedom.
    """
    r = th.shape[0] // 2 + 1
    amp = np.zeros(r, dtype=np.complex128)
    prod = 1.0
    for k in range(r - 1):
        amp[k] = prod * np.cos(th[k])
        prod = prod * np.sin(th[k])
    amp[r - 1] = prod
    for k in range(1, r):
        amp[k] = amp[k] * np.exp(1j * th[r - 2 + k])
    return amp


def lam_margin(rho, rrho, proj, rproj, lam):
    """Smallest eigenvalue over both positivity constraints at weight lam.

    The candidate separable part (unnormalized) is rho - (1-lam) proj; it
    must be positive and stay positive under partial reflection.  rrho and
    rproj are the pre-reflected rho and projector (reflection is linear,
    so the pencil reflects term by term).
    """
    m1 = rho - (1.0 - lam) * proj
    m2 = rrho - (1.0 - lam) * rproj
    e1 = np.linalg.eigvalsh(m1)[0]
    e2 = np.linalg.eigvalsh(m2)[0]
    return min(e1, e2)


def _feasible(rho, rrho, proj, rproj, lam, feas_tol):
    m = lam_margin(rho, rrho, proj, rproj, lam)
    return m >= -(feas_tol * lam + _FLOOR)


def _max_margin(rho, rrho, proj, rproj, tilt):
    """Maximize lam_margin + tilt*lam over lam in (0, 1] by golden section.

    Valid because the margin is concave in lam.  Returns (argmax, value);
    a nonnegative value means some weight is feasible at slack ``tilt``.
    """
    a = 1e-9
    b = 1.0
    c1 = b - _GOLDEN * (b - a)
    c2 = a + _GOLDEN * (b - a)
    f1 = lam_margin(rho, rrho, proj, rproj, c1) + tilt * c1
    f2 = lam_margin(rho, rrho, proj, rproj, c2) + tilt * c2
    for _ in range(70):
        if f1 < f2:
            a = c1
            c1 = c2
            f1 = f2
            c2 = a + _GOLDEN * (b - a)
            f2 = lam_margin(rho, rrho, proj, rproj, c2) + tilt * c2
        else:
            b = c2
            c2 = c1
            f2 = f1
            c1 = b - _GOLDEN * (b - a)
            f1 = lam_margin(rho, rrho, proj, rproj, c1) + tilt * c1
    best = 0.5 * (a + b)
    return best, lam_margin(rho, rrho, proj, rproj, best) + tilt * best


def max_feasible_lambda(rho, rrho, proj, rproj, feas_tol, lam_tol):
    """Largest lam in (0, 1] whose separable part is positive and PPT.

    Returns 0.0 when no positive weight is feasible.  feas_tol is the
    eigenvalue slack allowed on the normalized separable part (hence
    scaled by lam); lam_tol is the bisection resolution.  The feasible
    set is an interval, possibly a single point; golden section on the
    concave margin finds a member, bisection pins the upper boundary.
    """
    if _feasible(rho, rrho, proj, rproj, 1.0, feas_tol):
        return 1.0
    lo, val = _max_margin(rho, rrho, proj, rproj, feas_tol)
    if val < -_FLOOR:
        return 0.0
    hi = 1.0
    while hi - lo > lam_tol:
        mid = 0.5 * (lo + hi)
        if _feasible(rho, rrho, proj, rproj, mid, feas_tol):
            lo = mid
        else:
            hi = mid
    return lo


def neg_lambda_objective(th, u_support, rho, rrho, feas_tol, lam_tol):
    """Minimization objective: minus the best weight for the pure part
    parameterized by chart angles ``th`` within the support basis.

    Where no weight is feasible the value is minus the best achievable
    tilted margin (a positive number shrinking to zero at feasibility),
    so the search has a gradient signal toward feasible pure parts.
    Rank deficient states need this: their feasible set in the pure part
    can have measure zero, with the margin peaking at exactly zero.
    """
    amp = chart_amplitudes(th)
    psi = u_support @ amp
    proj = np.outer(psi, np.conj(psi))
    rproj = reflect4(proj)
    if _feasible(rho, rrho, proj, rproj, 1.0, feas_tol):
        return -1.0
    lo, val = _max_margin(rho, rrho, proj, rproj, feas_tol)
    if val < -_FLOOR:
        return -val
    hi = 1.0
    while hi - lo > lam_tol:
        mid = 0.5 * (lo + hi)
        if _feasible(rho, rrho, proj, rproj, mid, feas_tol):
            lo = mid
        else:
            hi = mid
    return -lo


BACKEND = "numpy"
if os.environ.get("QPAIR_PURE_NUMPY", "").strip() in ("", "0"):
    try:
        from numba import njit
    except ImportError:
        pass
    else:
        # leaf functions first so the callers pick up compiled versions
        reflect4 = njit(cache=True)(reflect4)
        chart_amplitudes = njit(cache=True)(chart_amplitudes)
        lam_margin = njit(cache=True)(lam_margin)
        _feasible = njit(cache=True)(_feasible)
        _max_margin = njit(cache=True)(_max_margin)
        max_feasible_lambda = njit(cache=True)(max_feasible_lambda)
        neg_lambda_objective = njit(cache=True)(neg_lambda_objective)
        BACKEND = "numba"
