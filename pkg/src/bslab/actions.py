"""Planar maps and planar BS(1,n) actions ``(f, h)`` with ``h f h^-1 = f^n``.

Maps act on arrays of points of shape ``(..., 2)``.  Every kind has a closed
form inverse and a JSON description ``{"kind": ..., "params": {...}}`` whose
real parameters are stored as round-trippable decimal strings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .line import (
    FlowBuilt,
    LineAction,
    LineMap,
    line_map_from_json,
    make_affine_line_action,
    make_trivial_line_action,
)

__all__ = [
    "PlanarMap",
    "Diagonal",
    "TranslationProduct",
    "StrangeRotation",
    "ConjugatedStrangeRotation",
    "Phi",
    "Product",
    "Composed",
    "Constant",
    "Sine",
    "BsAction",
    "as_points",
    "make_diagonal",
    "make_translation_product",
    "make_strange_rotation",
    "make_phi",
    "make_strange_rotation_action",
    "make_conjugated_strange_rotation",
    "make_product_action",
    "make_affine_product",
    "evaluate",
    "inverse_evaluate",
    "fast_power",
    "naive_power",
    "map_from_json",
    "action_from_json",
]

# below this radius the strange rotation is the identity: r^-alpha would overflow
# and the true displacement (< 2r) is far below double resolution
TINY_RADIUS = 1e-300


def _real(value: float) -> str:
    return repr(float(value))


def as_points(p) -> np.ndarray:
    pts = np.asarray(p, dtype=float)
    if pts.shape[-1:] != (2,):
        raise ValueError(f"points must have a trailing axis of length 2, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    return pts


class PlanarMap:
    kind = "map"

    def __call__(self, p):
        return self.evaluate(p)

    def evaluate(self, p) -> np.ndarray:
        return self._apply(as_points(p))

    def _apply(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def inverse(self) -> PlanarMap:
        raise NotImplementedError

    def displacement_bound(self) -> float:
        """A declared upper bound for ``|f(p) - p|`` over the plane (``inf`` if none)."""
        return math.inf

    def params(self) -> dict:
        raise NotImplementedError

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": self.params()}


def evaluate(f: PlanarMap, p) -> np.ndarray:
    return f.evaluate(p)


def inverse_evaluate(f: PlanarMap, p) -> np.ndarray:
    return f.inverse().evaluate(p)


@dataclass(frozen=True)
class Diagonal(PlanarMap):
    lam: float
    mu: float
    kind = "diagonal"

    def __post_init__(self):
        if not (self.lam > 0 and self.mu > 0):
            raise ValueError(f"eigenvalues must be positive, got lam={self.lam}, mu={self.mu}")

    def _apply(self, pts):
        return pts * np.array([self.lam, self.mu])

    def inverse(self):
        return Diagonal(1.0 / self.lam, 1.0 / self.mu)

    def displacement_bound(self):
        return 0.0 if self.lam == 1 and self.mu == 1 else math.inf

    def params(self):
        return {"lam": _real(self.lam), "mu": _real(self.mu)}


# bounded functions c for f(x, y) = (x, y + c(x))


@dataclass(frozen=True)
class Constant:
    value: float

    def __call__(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.value)

    @property
    def bound(self) -> float:
        return abs(self.value)

    def __neg__(self):
        return Constant(-self.value)

    def to_json(self):
        return {"kind": "constant", "value": _real(self.value)}


@dataclass(frozen=True)
class Sine:
    amplitude: float = 1.0
    frequency: float = 1.0
    phase: float = 0.0

    def __call__(self, x):
        return self.amplitude * np.sin(self.frequency * np.asarray(x, dtype=float) + self.phase)

    @property
    def bound(self) -> float:
        return abs(self.amplitude)

    def __neg__(self):
        return Sine(-self.amplitude, self.frequency, self.phase)

    def to_json(self):
        return {
            "kind": "sine",
            "amplitude": _real(self.amplitude),
            "frequency": _real(self.frequency),
            "phase": _real(self.phase),
        }


def _c_from_json(data: dict):
    if data["kind"] == "constant":
        return Constant(float(data["value"]))
    if data["kind"] == "sine":
        return Sine(float(data["amplitude"]), float(data["frequency"]), float(data["phase"]))
    raise ValueError(f"unknown shear function kind {data['kind']!r}")


@dataclass(frozen=True)
class TranslationProduct(PlanarMap):
    """``(x, y) -> (x, y + c(x))`` for a bounded continuous ``c``."""

    c: Callable
    bound: float
    kind = "translation_product"

    def _apply(self, pts):
        out = pts.copy()
        out[..., 1] = pts[..., 1] + self.c(pts[..., 0])
        return out

    def inverse(self):
        if isinstance(self.c, (Constant, Sine)):
            neg = -self.c
        else:
            c = self.c

            def neg(x):
                return -c(x)

        return TranslationProduct(neg, self.bound)

    def displacement_bound(self):
        return self.bound

    def params(self):
        if not hasattr(self.c, "to_json"):
            raise TypeError("shear function has no JSON description; use Constant or Sine")
        return {"c": self.c.to_json(), "bound": _real(self.bound)}


@dataclass(frozen=True)
class StrangeRotation(PlanarMap):
    """``(r, theta) -> (r, theta + sign * r^-alpha)`` with ``alpha = log n / log lam``."""

    n: int
    lam: float
    sign: int = 1
    kind = "strange_rotation"

    @property
    def alpha(self) -> float:
        return math.log(self.n) / math.log(self.lam)

    def angle(self, r):
        """Rotation angle applied on the circle of radius ``r``."""
        with np.errstate(over="ignore", divide="ignore"):
            return self.sign * np.power(np.asarray(r, dtype=float), -self.alpha)

    def _apply(self, pts):
        x, y = pts[..., 0], pts[..., 1]
        r = np.hypot(x, y)
        phi = self.angle(np.maximum(r, TINY_RADIUS))
        # rotate the Cartesian vector directly; theta itself is never formed
        still = (r < TINY_RADIUS) | ~np.isfinite(phi)
        phi = np.where(still, 0.0, phi)
        s = np.sin(phi)
        cm1 = -2.0 * np.sin(0.5 * phi) ** 2  # cos(phi) - 1 without cancellation
        out = np.empty_like(pts)
        out[..., 0] = x + (x * cm1 - y * s)
        out[..., 1] = y + (x * s + y * cm1)
        return out

    def inverse(self):
        return StrangeRotation(self.n, self.lam, -self.sign)

    def displacement_bound(self):
        # <= r^(1-alpha) <= 1 for r >= 1; < 2 inside the unit disc
        return 2.0

    def params(self):
        return {"n": str(self.n), "lam": _real(self.lam), "sign": str(self.sign)}


@dataclass(frozen=True)
class Phi(PlanarMap):
    """``(x, y) -> (x, sign(y) |y|^beta)``; with ``axis="x"`` the roles swap."""

    beta: float
    axis: str = "y"
    kind = "phi"

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"exponent must be positive, got {self.beta}")
        if self.axis not in ("x", "y"):
            raise ValueError(f"axis must be 'x' or 'y', got {self.axis!r}")

    def _apply(self, pts):
        i = 1 if self.axis == "y" else 0
        out = pts.copy()
        v = pts[..., i]
        out[..., i] = np.sign(v) * np.abs(v) ** self.beta
        return out

    def inverse(self):
        return Phi(1.0 / self.beta, self.axis)

    def displacement_bound(self):
        return 0.0 if self.beta == 1 else math.inf

    def params(self):
        return {"beta": _real(self.beta), "axis": self.axis}


@dataclass(frozen=True)
class Composed(PlanarMap):
    """``maps[0] o maps[1] o ... o maps[-1]``: the last map is applied first."""

    maps: tuple
    kind = "composed"

    def _apply(self, pts):
        for m in reversed(self.maps):
            pts = m._apply(pts)
        return pts

    def inverse(self):
        return Composed(tuple(m.inverse() for m in reversed(self.maps)))

    def displacement_bound(self):
        if all(m.displacement_bound() == 0 for m in self.maps):
            return 0.0
        return math.inf

    def params(self):
        return {"maps": [m.to_json() for m in self.maps]}


@dataclass(frozen=True)
class ConjugatedStrangeRotation(PlanarMap):
    """``Phi o f o Phi^-1`` where ``f`` is the strange rotation for the uniform
    scaling by ``max(lam, mu)`` and ``Phi`` compresses the other axis.

    It satisfies the relation with ``h1 = diag(lam, mu)``.
    """

    n: int
    lam: float
    mu: float
    sign: int = 1
    kind = "conjugated_strange_rotation"

    @property
    def beta(self) -> float:
        big, small = max(self.lam, self.mu), min(self.lam, self.mu)
        return math.log(small) / math.log(big)

    @property
    def phi(self) -> Phi:
        return Phi(self.beta, "y" if self.mu < self.lam else "x")

    @property
    def base(self) -> StrangeRotation:
        return StrangeRotation(self.n, max(self.lam, self.mu), self.sign)

    def _apply(self, pts):
        phi = self.phi
        return phi._apply(self.base._apply(phi.inverse()._apply(pts)))

    def inverse(self):
        return ConjugatedStrangeRotation(self.n, self.lam, self.mu, -self.sign)

    def params(self):
        return {
            "n": str(self.n),
            "lam": _real(self.lam),
            "mu": _real(self.mu),
            "sign": str(self.sign),
        }


@dataclass(frozen=True)
class Product(PlanarMap):
    """``(x, y) -> (gx(x), gy(y))`` for line homeomorphisms ``gx``, ``gy``."""

    gx: LineMap
    gy: LineMap
    kind = "product"

    def _apply(self, pts):
        out = np.empty_like(pts)
        out[..., 0] = self.gx(pts[..., 0])
        out[..., 1] = self.gy(pts[..., 1])
        return out

    def inverse(self):
        return Product(self.gx.inverse(), self.gy.inverse())

    def displacement_bound(self):
        return math.hypot(self.gx.displacement_bound(), self.gy.displacement_bound())

    def params(self):
        return {"x": self.gx.to_json(), "y": self.gy.to_json()}


def map_from_json(data: dict) -> PlanarMap:
    kind, p = data["kind"], data.get("params", {})
    if kind == "diagonal":
        return Diagonal(float(p["lam"]), float(p["mu"]))
    if kind == "translation_product":
        return TranslationProduct(_c_from_json(p["c"]), float(p["bound"]))
    if kind == "strange_rotation":
        return StrangeRotation(int(p["n"]), float(p["lam"]), int(p.get("sign", 1)))
    if kind == "conjugated_strange_rotation":
        return ConjugatedStrangeRotation(
            int(p["n"]), float(p["lam"]), float(p["mu"]), int(p.get("sign", 1))
        )
    if kind == "phi":
        return Phi(float(p["beta"]), p.get("axis", "y"))
    if kind == "product":
        return Product(line_map_from_json(p["x"]), line_map_from_json(p["y"]))
    if kind == "composed":
        return Composed(tuple(map_from_json(m) for m in p["maps"]))
    raise ValueError(f"unknown map kind {kind!r}")


# constructors


def make_diagonal(lam: float, mu: float) -> Diagonal:
    return Diagonal(float(lam), float(mu))


def make_translation_product(c, bound: float | None = None) -> TranslationProduct:
    """``(x, y) -> (x, y + c(x))``.  A number is read as a constant shear."""
    if isinstance(c, (int, float)):
        c = Constant(float(c))
    if bound is None:
        if not hasattr(c, "bound"):
            raise ValueError("a bound K_c with |c| <= K_c is required for arbitrary callables")
        bound = c.bound
    return TranslationProduct(c, float(bound))


def make_strange_rotation(n: int, lam: float) -> StrangeRotation:
    if not 1 < lam <= n:
        raise ValueError(f"strange rotation needs 1 < lam <= n, got lam={lam}, n={n}")
    return StrangeRotation(n, float(lam))


def make_phi(beta: float) -> Phi:
    if not 0 < beta < 1:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    return Phi(float(beta))


@dataclass(frozen=True)
class BsAction:
    """A pair ``(f, h)`` meant to satisfy ``h f h^-1 = f^n`` with ``h = diag(lam, mu)``."""

    f: PlanarMap
    h: PlanarMap
    n: int
    lam: float
    mu: float
    name: str = "action"
    flow_based: bool = False

    def scaling(self, kind: str) -> float:
        """Factor by which ``h`` scales the coordinate measure ``kind``."""
        if kind == "dx":
            return self.lam
        if kind == "dy":
            return self.mu
        raise ValueError(f"measure kind must be 'dx' or 'dy', got {kind!r}")

    def to_json(self) -> dict:
        return {
            "kind": "bs_action",
            "name": self.name,
            "params": {"n": str(self.n), "lam": _real(self.lam), "mu": _real(self.mu)},
            "flow_based": self.flow_based,
            "f": self.f.to_json(),
            "h": self.h.to_json(),
        }


def action_from_json(data: dict) -> BsAction:
    if data.get("kind") != "bs_action":
        raise ValueError("not a BS action description")
    p = data["params"]
    return BsAction(
        f=map_from_json(data["f"]),
        h=map_from_json(data["h"]),
        n=int(p["n"]),
        lam=float(p["lam"]),
        mu=float(p["mu"]),
        name=data.get("name", "action"),
        flow_based=bool(data.get("flow_based", False)),
    )


def make_strange_rotation_action(n: int, lam: float) -> BsAction:
    return BsAction(
        make_strange_rotation(n, lam), make_diagonal(lam, lam), n, float(lam), float(lam),
        name="strange_rotation",
    )


def make_conjugated_strange_rotation(n: int, lam: float, mu: float) -> BsAction:
    """``f1 = Phi f Phi^-1`` and ``h1 = diag(lam, mu)`` for ``1 < mu < lam <= n``."""
    if not 1 < mu < lam <= n:
        raise ValueError(f"need 1 < mu < lam <= n, got lam={lam}, mu={mu}, n={n}")
    return conjugated_strange_rotation_action(n, lam, mu)


def conjugated_strange_rotation_action(n: int, lam: float, mu: float) -> BsAction:
    # either order; Phi acts on the axis with the smaller eigenvalue
    f1 = ConjugatedStrangeRotation(n, float(lam), float(mu))
    return BsAction(f1, make_diagonal(lam, mu), n, float(lam), float(mu), name="conjugated_strange_rotation")


def make_product_action(line_x: LineAction, line_y: LineAction, name: str = "product") -> BsAction:
    if line_x.n != line_y.n:
        raise ValueError(f"line actions disagree on n: {line_x.n} vs {line_y.n}")
    f = Product(line_x.b_image, line_y.b_image)
    flow = isinstance(line_x.b_image, FlowBuilt) or isinstance(line_y.b_image, FlowBuilt)
    return BsAction(f, make_diagonal(line_x.lam, line_y.lam), line_x.n, line_x.lam, line_y.lam,
                    name=name, flow_based=flow)


def make_affine_product(n: int, mu: float) -> BsAction:
    """``f(x, y) = (x, y + 1)``, ``h(x, y) = (mu x, n y)``."""
    return make_product_action(make_trivial_line_action(n, mu), make_affine_line_action(n), name="affine_product")


def naive_power(f: PlanarMap, k: int, p) -> np.ndarray:
    pts = as_points(p)
    for _ in range(k):
        pts = f._apply(pts)
    return pts


def fast_power(action: BsAction, m: int, p) -> np.ndarray:
    """``f^(n^m)(p)`` as ``h^m f h^-m (p)``: m inverse-h steps, one f step, m h steps."""
    if m < 0:
        raise ValueError(f"m must be non-negative, got {m}")
    pts = as_points(p)
    h, h_inv = action.h, action.h.inverse()
    for _ in range(m):
        pts = h_inv._apply(pts)
    pts = action.f._apply(pts)
    for _ in range(m):
        pts = h._apply(pts)
    return pts
