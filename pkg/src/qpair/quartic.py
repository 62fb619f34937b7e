"""Robust real-rooted quartic solver.

The eigenvalue quartics handled here come from Hermitian 4x4 matrices, so
all four roots are real, but they are frequently multiple: pure states give
a triple root and rank-2 states a double root.  A rootfinder working from
the coefficients alone smears an exact k-fold root over a disk of radius
~eps^(1/k) times the coefficient condition, observed beyond 1e-3 for k >= 3,
which is far too coarse here.  Triple and quadruple roots are therefore
found analytically as common zeros of p and its derivatives before any
general rootfinding.  Double roots smear narrowly enough to be caught by
clustering and are projected onto the nearby critical point of p, which is
simple and well-conditioned there.  Clusters whose polynomial residual
shows they are not exactly multiple are instead split by a local quadratic
model and re-polished, so nearly-degenerate simple roots are not damaged.
Exactness is judged against the coefficient backward-error floor evaluated
at the candidate point itself: a floor taken at the polynomial's global
scale would merge any separated roots sitting near zero.
"""

from __future__ import annotations

import cmath

import numpy as np

from .errors import NumericalInconsistencyError

__all__ = ["real_quartic_roots"]

_EPS = float(np.finfo(np.float64).eps)


def _horner(coeffs, z):
    p = 0.0
    for c in coeffs:
        p = p * z + c
    return p


def _polish(coeffs, dcoeffs, z, iters=6):
    """A few Newton steps; quadratic convergence at simple roots.

    The input is already a good approximation, so a large step means the
    local model is degenerate (p and p' both at noise level near a
    multiple root); bail out rather than jump away.
    """
    for _ in range(iters):
        dp = _horner(dcoeffs, z)
        if abs(dp) < 1e-300:
            break
        step = _horner(coeffs, z) / dp
        if abs(step) > 0.05 * (1.0 + abs(z)):
            break
        z = z - step
        if abs(step) <= 4 * _EPS * (1.0 + abs(z)):
            break
    return z


def _critical_point(d1, d2, z0):
    """Real Newton iteration for the root of p' nearest z0."""
    z = float(z0)
    for _ in range(40):
        dd = _horner(d2, z)
        if abs(dd) < 1e-300:
            return float(z0)
        step = _horner(d1, z) / dd
        if abs(step) > 0.05 * (1.0 + abs(z)):
            break
        z -= step
        if abs(step) <= 4 * _EPS * (1.0 + abs(z)):
            break
    return z


def _inflection_point(a3, a2, z0):
    """Root of p'' = 12 z^2 + 6 a3 z + 2 a2 nearest z0, if real."""
    disc = 9.0 * a3 * a3 - 24.0 * a2
    if disc < 0.0:
        return None
    r = disc**0.5
    cands = ((-3.0 * a3 + r) / 12.0, (-3.0 * a3 - r) / 12.0)
    return min(cands, key=lambda z: abs(z - z0))


def real_quartic_roots(a3, a2, a1, a0, imag_error: float = 1e-6) -> np.ndarray:
    """All four roots of z^4 + a3 z^3 + a2 z^2 + a1 z + a0, descending.

    Expects a polynomial whose roots are real (a Hermitian characteristic
    polynomial).  Residual imaginary parts after refinement are truncated;
    if any exceeds ``imag_error`` the input was not real-rooted to working
    precision and a ``NumericalInconsistencyError`` is raised.

    Returns
    -------
    ndarray, shape (4,)
        Real roots sorted in descending order.
    """
    coeffs = (1.0, float(a3), float(a2), float(a1), float(a0))
    d1 = (4.0, 3.0 * coeffs[1], 2.0 * coeffs[2], coeffs[3])
    d2 = (12.0, 6.0 * coeffs[1], 2.0 * coeffs[2])

    def _floor(z, magnitudes):
        # coefficient-level backward error at the evaluation point; judged
        # at the point's own scale, since a floor taken at the global
        # polynomial magnitude would swallow every cluster near zero
        s = abs(z)
        deg = len(magnitudes) - 1
        return 64.0 * _EPS * sum(m * s ** (deg - i) for i, m in enumerate(magnitudes))

    def _vanishes(poly, z, magnitudes):
        return abs(_horner(poly, z)) <= _floor(z, magnitudes)

    mag0 = tuple(abs(c) for c in coeffs)
    mag1 = tuple(abs(c) for c in d1)
    mag2 = tuple(abs(c) for c in d2)

    # Roots of multiplicity 3 and 4 defeat clustering outright: the
    # companion-matrix smear of a k-fold root grows like eps^(1/k) times
    # the coefficient condition and is observed beyond 1e-3, wider than
    # any cluster window that keeps distinct roots apart.  Both cases are
    # detected analytically instead.  A quadruple root sits at -a3/4; a
    # triple root is a root of p'' at which p and p' also vanish.
    z4 = -coeffs[1] / 4.0
    if (
        _vanishes(coeffs, z4, mag0)
        and _vanishes(d1, z4, mag1)
        and _vanishes(d2, z4, mag2)
    ):
        return np.full(4, z4)
    disc = 9.0 * coeffs[1] ** 2 - 24.0 * coeffs[2]
    if disc >= 0.0:
        rdisc = disc**0.5
        for w in ((-3.0 * coeffs[1] + rdisc) / 12.0, (-3.0 * coeffs[1] - rdisc) / 12.0):
            if _vanishes(coeffs, w, mag0) and _vanishes(d1, w, mag1):
                # remaining simple root from the coefficient sum
                other = float(_polish(coeffs, d1, -coeffs[1] - 3.0 * w).real)
                return np.sort(np.array([w, w, w, other]))[::-1]

    roots = np.roots(coeffs).astype(np.complex128)
    roots = np.array([_polish(coeffs, d1, z) for z in roots])
    order = np.argsort(roots.real)
    roots = roots[order]

    scale = max(1.0, float(np.max(np.abs(roots))))
    cluster_tol = 1e-4 * scale
    pscale = scale**4 + sum(abs(c) * scale ** (3 - i) for i, c in enumerate(coeffs[1:]))

    clusters = []
    start = 0
    for i in range(1, 4):
        if abs(roots[i] - roots[i - 1]) > cluster_tol:
            clusters.append((start, i))
            start = i
    clusters.append((start, 4))

    refined = []
    for i, j in clusters:
        members = list(roots[i:j])
        k = j - i
        if k == 1:
            refined.extend(members)
            continue
        z0 = float(np.mean(roots[i:j]).real)
        if k == 2:
            z = _critical_point(d1, d2, z0)
        elif k == 3:
            z = _inflection_point(coeffs[1], coeffs[2], z0)
        else:
            z = -coeffs[1] / 4.0
        if z is None:
            refined.extend(members)
            continue
        residual = abs(_horner(coeffs, complex(z)))
        if residual <= _floor(z, mag0):
            # consistent with an exact k-fold root at z
            refined.extend([complex(z)] * k)
        elif k == 2:
            # a genuinely separated close pair: split by the local
            # quadratic model around the critical point, then re-polish
            ddz = _horner(d2, z)
            if abs(ddz) < 1e-8 * pscale:
                refined.extend(members)
                continue
            h = cmath.sqrt(-2.0 * _horner(coeffs, complex(z)) / ddz)
            refined.append(_polish(coeffs, d1, z + h))
            refined.append(_polish(coeffs, d1, z - h))
        else:
            refined.extend(members)

    refined = np.asarray(refined, dtype=np.complex128)
    worst_imag = float(np.max(np.abs(refined.imag)))
    if worst_imag > imag_error:
        raise NumericalInconsistencyError(
            f"quartic expected real roots, found imaginary residue {worst_imag:.3e} "
            f"> {imag_error:.1e} (non-Hermitian input upstream?)"
        )
    return np.sort(refined.real)[::-1]
