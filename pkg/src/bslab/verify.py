"""Numerical checks of the relation, displacement bounds and transverse measures.

The isotopy from the identity to ``f`` is the straight-line one,
``f_t(x) = (1-t) x + t f(x)``.  The coordinate measures ``dx`` and ``dy`` only
see the endpoints of an arc, so ``nu(gamma^k_x)`` is a coordinate of
``f^k(x) - x``; the angle about the origin is tracked along the polyline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .actions import (
    BsAction,
    Composed,
    ConjugatedStrangeRotation,
    PlanarMap,
    Phi,
    StrangeRotation,
    as_points,
    fast_power,
    naive_power,
)

__all__ = [
    "CLOSED_FORM_TOL",
    "FLOW_TOL",
    "DEFAULT_SHELLS",
    "CheckReport",
    "WindingError",
    "standard_samples",
    "shell_points",
    "tolerance_for",
    "relation_residual",
    "displacement_sup",
    "transverse_measure",
    "measure_scaling_check",
    "measure_decay_bound",
    "recurrence_norm",
    "foliation_invariance",
    "orientation_check",
    "angular_displacement",
    "conjugation_direction_report",
]

CLOSED_FORM_TOL = 1e-9
FLOW_TOL = 1e-6
DEFAULT_SHELLS = (1e-3, 1e-1, 1.0, 10.0, 1e3, 1e6)
MAX_STEPS = 10**6
STANDARD_SIZE = 10_000


@dataclass
class CheckReport:
    check: str
    params: dict
    observed: float
    bound: float
    passed: bool
    samples_id: str = "standard"
    tolerance: float = 0.0
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        params = dict(self.params)
        params["tolerance"] = self.tolerance
        if self.details:
            params["details"] = self.details
        return {
            "check": self.check,
            "params": params,
            "observed": self.observed,
            "bound": self.bound,
            "pass": self.passed,
            "samples_id": self.samples_id,
        }

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.check}: observed={self.observed:.6g} bound={self.bound:.6g}"


def _report(check, params, observed, bound, tol, samples_id, details=None) -> CheckReport:
    observed = float(observed)
    bound = float(bound)
    return CheckReport(
        check=check,
        params=params,
        observed=observed,
        bound=bound,
        passed=bool(observed <= bound + tol),
        samples_id=samples_id,
        tolerance=tol,
        details=details or {},
    )


def tolerance_for(action: BsAction) -> float:
    return FLOW_TOL if action.flow_based else CLOSED_FORM_TOL


def shell_points(radius: float, count: int = 100, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng([seed, int(round(math.log10(radius) * 1000)) & 0xFFFF])
    theta = rng.uniform(0.0, 2 * math.pi, count)
    return radius * np.column_stack([np.cos(theta), np.sin(theta)])


def standard_samples(seed: int = 0) -> np.ndarray:
    """The fixed 10^4-point sample set.

    100 angles on each shell of :data:`DEFAULT_SHELLS`, a 64x64 grid on
    ``[-10, 10]^2``, and log-uniform random points filling up to 10^4.
    """
    shells = [shell_points(r, 100, seed) for r in DEFAULT_SHELLS]
    g = np.linspace(-10.0, 10.0, 64)
    gx, gy = np.meshgrid(g, g)
    grid = np.column_stack([gx.ravel(), gy.ravel()])
    rng = np.random.default_rng(seed)
    rest = STANDARD_SIZE - 100 * len(DEFAULT_SHELLS) - grid.shape[0]
    r = 10 ** rng.uniform(-3.0, 6.0, rest)
    theta = rng.uniform(0.0, 2 * math.pi, rest)
    fill = r[:, None] * np.column_stack([np.cos(theta), np.sin(theta)])
    return np.concatenate(shells + [grid, fill])


def relation_residual(action: BsAction, samples=None, tol: float | None = None,
                      samples_id: str = "standard") -> CheckReport:
    """``sup |h f h^-1 (p) - f^n (p)|`` with ``f^n`` by n-fold iteration."""
    pts = standard_samples() if samples is None else as_points(samples)
    tol = tolerance_for(action) if tol is None else tol
    lhs = action.h._apply(action.f._apply(action.h.inverse()._apply(pts)))
    rhs = naive_power(action.f, action.n, pts)
    observed = np.max(np.linalg.norm(lhs - rhs, axis=-1))
    return _report("relation_residual", {"action": action.name, "n": action.n},
                   observed, 0.0, tol, samples_id)


def displacement_sup(f: PlanarMap, shells: Sequence[float] = DEFAULT_SHELLS,
                     bound: float | None = None, count: int = 100, seed: int = 0,
                     tol: float = 1e-6) -> CheckReport:
    """Per-shell and global sup of ``|f(p) - p|`` on circles of the given radii."""
    bound = f.displacement_bound() if bound is None else bound
    per_shell = {}
    for r in shells:
        pts = shell_points(r, count, seed)
        per_shell[repr(float(r))] = float(np.max(np.linalg.norm(f._apply(pts) - pts, axis=-1)))
    observed = max(per_shell.values())
    return _report("displacement_sup", {"map": f.kind, "shells": [float(r) for r in shells]},
                   observed, bound, tol, f"shells/{count}", {"per_shell": per_shell})


def _coord(kind: str) -> int:
    if kind == "dx":
        return 0
    if kind == "dy":
        return 1
    raise ValueError(f"measure kind must be 'dx' or 'dy', got {kind!r}")


def transverse_measure(kind: str, f: PlanarMap, x, k: int) -> np.ndarray:
    """``nu(gamma^k_x)``: the ``kind`` coordinate of ``f^k(x) - x``."""
    i = _coord(kind)
    if k < 0:
        raise ValueError("k must be non-negative")
    if k > MAX_STEPS:
        raise ValueError(
            f"{k} steps exceeds the direct-iteration budget of {MAX_STEPS}; "
            "use the scaling identity nu(gamma^(n^m)_x) = a^m nu(gamma_(h^-m x)) instead"
        )
    pts = as_points(x)
    return naive_power(f, k, pts)[..., i] - pts[..., i]


def measure_scaling_check(action: BsAction, kind: str, m: int, x,
                          tol: float = CLOSED_FORM_TOL) -> CheckReport:
    """Compare ``a^m nu(gamma_{h^-m x})`` with ``nu(gamma^{n^m}_x)`` by direct iteration."""
    steps = action.n**m
    if steps > MAX_STEPS:
        raise ValueError(f"n^m = {steps} exceeds the direct-iteration budget of {MAX_STEPS}")
    a = action.scaling(kind)
    pts = as_points(x)
    pulled = pts
    h_inv = action.h.inverse()
    for _ in range(m):
        pulled = h_inv._apply(pulled)
    left = a**m * transverse_measure(kind, action.f, pulled, 1)
    right = transverse_measure(kind, action.f, pts, steps)
    observed = np.max(np.abs(left - right))
    return _report("measure_scaling", {"action": action.name, "kind": kind, "m": m, "a": a},
                   observed, 0.0, tol, f"points/{pts.reshape(-1, 2).shape[0]}")


def _measure_sup(f, kind, pts) -> float:
    i = _coord(kind)
    return float(np.max(np.abs(f._apply(pts)[..., i] - pts[..., i])))


def measure_decay_bound(action: BsAction, kind: str, m_max: int, samples=None,
                        tol: float = CLOSED_FORM_TOL, samples_id: str = "standard") -> CheckReport:
    """``sup |nu(gamma_{h^-m x})|`` against ``(n/a)^m C`` for ``m = 0..m_max``.

    ``C`` is the sampled sup of ``|nu(gamma_x)|``.  When ``a > n`` the bound
    decays to zero, which is what forces ``nu(gamma_x) = 0``.
    """
    pts = standard_samples() if samples is None else as_points(samples)
    a = action.scaling(kind)
    C = _measure_sup(action.f, kind, pts)
    h_inv = action.h.inverse()
    pulled = pts
    observed, bounds, worst_excess = [], [], -math.inf
    for m in range(m_max + 1):
        if m:
            pulled = h_inv._apply(pulled)
        obs = _measure_sup(action.f, kind, pulled)
        bnd = (action.n / a) ** m * C
        observed.append(obs)
        bounds.append(bnd)
        worst_excess = max(worst_excess, obs - bnd)
    details = {"observed_by_m": observed, "bound_by_m": bounds, "rate": action.n / a, "C": C}
    # observed is the worst excess of the measure over its bound
    return _report("measure_decay", {"action": action.name, "kind": kind, "m_max": m_max, "a": a},
                   worst_excess, 0.0, tol, samples_id, details)


def recurrence_norm(action: BsAction, m: int, samples=None, tol: float | None = None,
                    samples_id: str = "standard") -> CheckReport:
    """``sup |f^{n^m}(p) - p|`` via :func:`fast_power`.

    The bound is ``|(C_x lam^m, C_y mu^m)|`` where ``C_x``, ``C_y`` bound the
    measures of ``gamma_{h^-m p}``; it tends to zero when both factors are < 1.
    """
    pts = standard_samples() if samples is None else as_points(samples)
    tol = tolerance_for(action) if tol is None else tol
    moved = fast_power(action, m, pts)
    observed = float(np.max(np.linalg.norm(moved - pts, axis=-1)))
    pulled = pts
    h_inv = action.h.inverse()
    for _ in range(m):
        pulled = h_inv._apply(pulled)
    cx = _measure_sup(action.f, "dx", pulled)
    cy = _measure_sup(action.f, "dy", pulled)
    bound = math.hypot(cx * action.lam**m, cy * action.mu**m)
    # 2m scalings by h^-1 and h each round once per coordinate; both sides can
    # also be large when lam or mu exceeds 1
    scale = float(np.max(np.abs(pts)))
    tol = tol * max(1.0, bound) + 4 * m * np.finfo(float).eps * scale
    return _report("recurrence_norm", {"action": action.name, "m": m}, observed, bound, tol,
                   samples_id, {"C_x": cx, "C_y": cy})


def foliation_invariance(f: PlanarMap, direction: str, samples=None, tol: float = 1e-12,
                         samples_id: str = "standard") -> CheckReport:
    """Vertical: ``f`` keeps ``x``; horizontal: ``f`` keeps ``y``."""
    if direction not in ("vertical", "horizontal"):
        raise ValueError(f"direction must be 'vertical' or 'horizontal', got {direction!r}")
    pts = standard_samples() if samples is None else as_points(samples)
    i = 0 if direction == "vertical" else 1
    observed = float(np.max(np.abs(f._apply(pts)[..., i] - pts[..., i])))
    return _report("foliation_invariance", {"map": f.kind, "direction": direction},
                   observed, 0.0, tol, samples_id)


def orientation_check(f: PlanarMap, count: int = 100, seed: int = 0, size: float = 1e-3) -> CheckReport:
    """Signed area of images of small positive triangles at random locations.

    Observed is the number of triangles whose image is not positively oriented.
    """
    rng = np.random.default_rng(seed)
    base = rng.uniform(-10.0, 10.0, (count, 2))
    tri = np.stack([base, base + [size, 0.0], base + [0.0, size]], axis=1)
    img = f._apply(tri)
    e1 = img[:, 1] - img[:, 0]
    e2 = img[:, 2] - img[:, 0]
    area = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    bad = int(np.sum(~(area > 0)))
    return _report("orientation", {"map": f.kind, "triangle_size": size}, bad, 0, 0.0,
                   f"triangles/{count}", {"min_signed_area": float(area.min())})


class WindingError(ValueError):
    """The isotopy passes too close to the origin for the angle to be defined."""


def _segment_origin_distance(p, q):
    d = q - p
    dd = np.einsum("...i,...i->...", d, d)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.clip(-np.einsum("...i,...i->...", p, d) / dd, 0.0, 1.0)
    t = np.where(dd > 0, t, 0.0)
    closest = p + t[..., None] * d
    return np.hypot(closest[..., 0], closest[..., 1])


def _signed_angles(p, q):
    cross = p[..., 0] * q[..., 1] - p[..., 1] * q[..., 0]
    dot = p[..., 0] * q[..., 0] + p[..., 1] * q[..., 1]
    return np.arctan2(cross, dot)


def _segment_angle(p, q, depth=0):
    step = float(_signed_angles(p, q))
    if abs(step) < math.pi / 2 or depth > 60:
        return step
    mid = 0.5 * (p + q)
    return _segment_angle(p, mid, depth + 1) + _segment_angle(mid, q, depth + 1)


def angular_displacement(f: PlanarMap, x, k: int, margin: float = 1e-12) -> float:
    """Total continuous angle swept about the origin by ``gamma^k_x``.

    Each straight segment ``x_i -> x_{i+1}`` is bisected until every increment
    is below pi/2, so the sum of principal angles is the true winding.
    """
    x = as_points(x).reshape(2)
    if k < 0:
        raise ValueError("k must be non-negative")
    if k > MAX_STEPS:
        raise ValueError(f"{k} steps exceeds the direct-iteration budget of {MAX_STEPS}")
    orbit = np.empty((k + 1, 2))
    orbit[0] = x
    for i in range(k):
        orbit[i + 1] = f._apply(orbit[i])
    if k == 0:
        return 0.0
    starts, ends = orbit[:-1], orbit[1:]
    dist = _segment_origin_distance(starts, ends)
    if np.any(dist <= margin):
        i = int(np.argmax(dist <= margin))
        raise WindingError(f"isotopy segment {i} passes within {margin} of the origin")
    steps = _signed_angles(starts, ends)
    wide = np.abs(steps) >= math.pi / 2
    for i in np.flatnonzero(wide):
        steps[i] = _segment_angle(starts[i], ends[i])
    return float(math.fsum(steps))


def conjugation_direction_report(n: int, lam: float, mu: float,
                                 shells: Sequence[float] = DEFAULT_SHELLS) -> dict:
    """Displacement per shell for both ways of conjugating the strange rotation.

    ``Phi f Phi^-1`` (the construction used here) against ``Phi^-1 f Phi``.
    """
    f1 = ConjugatedStrangeRotation(n, lam, mu)
    base = StrangeRotation(n, max(lam, mu))
    phi = f1.phi
    other = Composed((phi.inverse(), base, phi))
    return {
        "phi_f_phi_inv": displacement_sup(f1, shells, bound=math.inf).details["per_shell"],
        "phi_inv_f_phi": displacement_sup(other, shells, bound=math.inf).details["per_shell"],
        "beta": phi.beta if phi.beta < 1 else 1 / phi.beta,
    }

