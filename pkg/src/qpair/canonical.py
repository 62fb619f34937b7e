"""Local transformations and canonical (generic) forms.

A local transformation rotates each qubit's axis frame independently; it
is the image of a local unitary and leaves all entanglement properties
unchanged.  Canonicalization picks the frame in which the cross dyadic is
a signed diagonal, and for pure and rank-2 states extracts the few numbers
that label the whole local orbit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.spatial.transform import Rotation

from .classify import purity_rank
from .errors import ConvergenceError, NumericalInconsistencyError, PreconditionError
from .families import Rank2Params, check_rotation, rank2_family_params
from .invariants import global_invariants, local_invariants
from .state import TENSOR, TwoQubitState, to_density_matrix

__all__ = [
    "CanonicalForm",
    "apply_local",
    "diagonalize_cross",
    "pure_canonical",
    "rank2_canonical",
]

# exact z-rotations used to quotient the rank-2 frame symmetries:
# (pi, pi) flips the signs of (x1, x2); (pi/2, -pi/2) swaps the angle
# roles, mapping (g1, g2, x1, x2) -> (g2, g1, -x2, x1)
_RZ_PI = np.diag([-1.0, -1.0, 1.0])
_RZ_P90 = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
_RZ_M90 = _RZ_P90.T


@dataclass(frozen=True, eq=False)
class CanonicalForm:
    """Signed diagonalization of the cross dyadic.

    C = sign * o_ee @ diag(c) @ o_nn with both factors proper rotations,
    c1 >= c2 >= c3 >= 0, and sign = +1 exactly when det C >= 0.
    """

    o_ee: np.ndarray
    o_nn: np.ndarray
    c: np.ndarray
    sign: int


def apply_local(state: TwoQubitState, o_ee, o_nn) -> TwoQubitState:
    """Rotate the two qubit frames: (s, t, C) -> (O_ee s, O_nn^T t, O_ee C O_nn)."""
    o_ee = check_rotation(o_ee, "o_ee")
    o_nn = check_rotation(o_nn, "o_nn")
    return TwoQubitState(
        s=o_ee @ state.s,
        t=o_nn.T @ state.t,
        C=o_ee @ state.C @ o_nn,
    )


def diagonalize_cross(state: TwoQubitState) -> CanonicalForm:
    """Signed SVD of the cross dyadic with proper-rotation factors.

    Plain SVD factors may be reflections; the sign bookkeeping below makes
    both proper without touching the nonnegative singular values.  The
    column/row pair carrying the smallest singular value absorbs the
    determinant flips (for det C >= 0 with an odd reflection count that
    value is necessarily zero, so flipping its row alone is exact).
    """
    u, sv, vh = np.linalg.svd(state.C)
    u = u.copy()
    vh = vh.copy()
    if np.linalg.det(u) < 0:
        u[:, 2] *= -1.0
        vh[2, :] *= -1.0
    det_c = float(np.linalg.det(state.C))
    if det_c < 0:
        sign = -1
        vh = -vh
    else:
        sign = 1
        if np.linalg.det(vh) < 0:
            vh[2, :] *= -1.0
    for arr in (u, vh, sv):
        arr.flags.writeable = False
    return CanonicalForm(o_ee=u, o_nn=vh, c=sv, sign=sign)


def pure_canonical(state: TwoQubitState, tol: float = 1e-9) -> float:
    """The single parameter p of a pure state's generic form.

    In the canonical frame a pure state has s = (p, 0, 0), t = (-p, 0, 0),
    C = diag(-1, -q, -q) with q = sqrt(1 - p^2); p = |s| labels the whole
    local orbit.  |t| = |s| and c = (1, q, q) are asserted, not assumed.
    """
    if not purity_rank(state).pure:
        raise PreconditionError("pure_canonical requires a pure state")
    p = float(np.linalg.norm(state.s))
    t_norm = float(np.linalg.norm(state.t))
    if abs(t_norm - p) > tol:
        raise NumericalInconsistencyError(
            f"pure state with |s| = {p:.12g} but |t| = {t_norm:.12g}"
        )
    # Check c = (1, q, q) through p^2 + c2 c3 = 1 rather than against
    # q = sqrt(1 - p^2), whose sensitivity to rounding in p diverges as
    # p -> 1; the product form is well-conditioned on the whole range.
    c = diagonalize_cross(state).c
    gap = max(
        abs(float(c[0]) - 1.0),
        abs(float(c[1] - c[2])),
        abs(p * p + float(c[1] * c[2]) - 1.0),
    )
    if gap > tol:
        raise NumericalInconsistencyError(
            f"pure state with p = {p:.12g} should have characteristic values "
            f"(1, q, q) with q^2 = 1 - p^2, got {c} (worst deviation {gap:.3e})"
        )
    return p


def _projector_coefficients(rho_support):
    """Pauli coefficients (u, v, M) of the rank-2 support projector."""
    coeff = np.einsum("ijkl,lk->ij", TENSOR, rho_support).real
    return coeff[1:, 0], coeff[0, 1:], coeff[1:, 1:]


def _rank2_extract(pu, pv, pm, s, t, c):
    """Best-fit generic-form parameters in the current frame.

    The support projector fixes the angles: its Pauli coefficients are
    u = (0, 0, 2 cos g1 cos g2), v = (0, 0, 2 sin g1 sin g2),
    M = 2 diag(sin g1 cos g2, cos g1 sin g2, 0).  The x are then linear
    least squares over the state entries they multiply.
    """
    a = 0.5 * pu[2]
    b = 0.5 * pv[2]
    cc = 0.5 * pm[0, 0]
    d = 0.5 * pm[1, 1]
    g1 = math.atan2(math.hypot(cc, b), math.hypot(a, d))
    g2 = math.atan2(math.hypot(d, b), math.hypot(a, cc))
    s1, c1 = math.sin(g1), math.cos(g1)
    s2, c2 = math.sin(g2), math.cos(g2)
    x3 = 0.5 * float(
        b * (s[2] - a)
        + a * (t[2] - b)
        + d * (cc - c[0, 0])
        + cc * (d - c[1, 1])
        + c[2, 2]
    )
    x1 = 0.5 * float(s[0] * s1 + t[0] * c2 + c[0, 2] * s2 + c[2, 0] * c1)
    x2 = 0.5 * float(s[1] * s2 + t[1] * c1 + c[1, 2] * s1 + c[2, 1] * c2)
    return g1, g2, x1, x2, x3


def _rotation_to_z(w):
    w = np.asarray(w, dtype=np.float64)
    w = w / np.linalg.norm(w)
    axis = np.cross(w, np.array([0.0, 0.0, 1.0]))
    norm_axis = float(np.linalg.norm(axis))
    if norm_axis < 1e-12:
        if w[2] > 0:
            return np.eye(3)
        return np.diag([1.0, -1.0, -1.0])
    angle = math.atan2(norm_axis, w[2])
    return Rotation.from_rotvec(axis / norm_axis * angle).as_matrix()


def _embed_z(r2):
    out = np.eye(3)
    out[:2, :2] = r2
    return out


def _initial_frame(pu, pv, pm):
    """Analytic first guess: align u and v with +z, then diagonalize the
    in-plane block of M by a 2x2 SVD embedded as z-rotations."""
    if np.linalg.norm(pu) > 1e-8:
        we = pu
    else:
        we = np.linalg.eigh(pm @ pm.T)[1][:, 0]
    if np.linalg.norm(pv) > 1e-8:
        wn = pv
    else:
        wn = np.linalg.eigh(pm.T @ pm)[1][:, 0]
    oe = _rotation_to_z(we)
    on = _rotation_to_z(wn).T
    m_mid = oe @ pm @ on
    u2, _, v2h = np.linalg.svd(m_mid[:2, :2])
    u2 = u2 @ np.diag([1.0, np.linalg.det(u2)])
    v2h = np.diag([1.0, np.linalg.det(v2h)]) @ v2h
    return _embed_z(u2).T @ oe, on @ _embed_z(v2h).T


def rank2_canonical(
    state: TwoQubitState,
    tol: float = 1e-9,
    restarts: int = 32,
    seed: int = 0,
    return_frame: bool = False,
):
    """Recover the generic-form parameters of a rank-2 state.

    Searches over rotation pairs (two rotation vectors, 6 parameters) for
    the frame in which the state matches the rank-2 family construction;
    the per-frame parameters are not free but extracted from the support
    projector and linear least squares, so the search only has to find the
    frame.  The first start is an analytic alignment that already solves
    generic inputs; the remaining starts are random.

    Returns the ``Rank2Params``, or ``(params, o_ee, o_nn)`` with
    ``return_frame=True``, where applying (o_ee, o_nn) to the input
    reproduces the family state.  Output is normalized to
    g1 >= g2 and x1 > 0 (x2 >= 0 when x1 vanishes), quotienting the
    frame symmetries.
    """
    if purity_rank(state, tol).rank != 2:
        raise PreconditionError("rank2_canonical requires a rank-2 state")
    s0, t0, c0 = state.s, state.t, state.C
    eigs, vecs = np.linalg.eigh(to_density_matrix(state))
    support = vecs[:, 2:] @ vecs[:, 2:].conj().T
    pu0, pv0, pm0 = _projector_coefficients(support)

    def frame_of(theta):
        oe = Rotation.from_rotvec(theta[:3]).as_matrix()
        on = Rotation.from_rotvec(theta[3:]).as_matrix()
        return oe, on

    def mismatch(oe, on):
        s = oe @ s0
        t = on.T @ t0
        c = oe @ c0 @ on
        pu = oe @ pu0
        pv = on.T @ pv0
        pm = oe @ pm0 @ on
        params = _rank2_extract(pu, pv, pm, s, t, c)
        sp, tp, cp = rank2_family_params(*params)
        diff = np.concatenate([s - sp, t - tp, (c - cp).ravel()])
        return params, diff

    def objective(theta):
        _, diff = mismatch(*frame_of(theta))
        return float(diff @ diff)

    oe_init, on_init = _initial_frame(pu0, pv0, pm0)
    starts = [
        np.concatenate(
            [
                Rotation.from_matrix(oe_init).as_rotvec(),
                Rotation.from_matrix(on_init).as_rotvec(),
            ]
        )
    ]
    rng = np.random.default_rng(seed)
    for _ in range(max(0, restarts - 1)):
        starts.append(rng.uniform(-math.pi, math.pi, 6))

    best = None
    for theta0 in starts:
        res = minimize(
            objective,
            theta0,
            method="Nelder-Mead",
            options={"maxiter": 2000, "maxfev": 3000, "xatol": 1e-13, "fatol": 1e-22},
        )
        if best is None or res.fun < best.fun:
            best = res
        if best.fun < 1e-16:
            break

    oe, on = frame_of(best.x)
    params, diff = mismatch(oe, on)
    # quotient the discrete frame symmetries (exact integer rotations)
    if params[1] > params[0] + 1e-9:
        oe, on = _RZ_P90 @ oe, on @ _RZ_M90
        params, diff = mismatch(oe, on)
    if params[2] < -1e-12 or (abs(params[2]) <= 1e-12 and params[3] < -1e-12):
        oe, on = _RZ_PI @ oe, on @ _RZ_PI
        params, diff = mismatch(oe, on)

    residual = float(np.max(np.abs(diff)))
    if residual > 1e-6:
        raise ConvergenceError(
            f"rank-2 canonicalization residual {residual:.3e} above 1e-6 "
            f"after {len(starts)} starts",
            residual=residual,
        )

    g1, g2, x1, x2, x3 = params
    g1 = min(max(g1, 0.0), math.pi / 2)
    g2 = min(max(g2, 0.0), g1)
    result = Rank2Params(gamma1=g1, gamma2=g2, x1=x1, x2=x2, x3=x3)

    glob = global_invariants(local_invariants(state))
    x_sq_expected = (glob.A2 - 2.0) / 4.0
    if abs(result.x_sq - x_sq_expected) > 1e-6:
        raise NumericalInconsistencyError(
            f"recovered x^2 = {result.x_sq:.12g} but the invariants give "
            f"(A2 - 2)/4 = {x_sq_expected:.12g}"
        )
    if return_frame:
        return result, oe, on
    return result
