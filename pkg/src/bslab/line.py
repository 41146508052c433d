"""BS(1,n) actions on the real line.

Two constructions are provided:

* the affine action ``a: x -> n x``, ``b: x -> x + 1``;
* the fundamental-domain action for ``1 < lam <= n``: ``a: x -> lam x`` and, on
  ``D_k = [lam^k, lam^(k+1))``, ``b = a^k o phi(1/n^k) o a^-k`` where ``phi`` is a
  flow on ``[1, lam]`` fixing both endpoints.

The flow is realised by conjugating a translation through a chart
``psi: (1, lam) -> R``, so ``phi(t)(x) = psi^-1(psi(x) + t)`` is exact for any
``t``, including the astronomically long times needed deep inside ``D_k`` for
``k << 0``.

All maps act on numpy arrays elementwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FlowSpec",
    "LineMap",
    "LineIdentity",
    "LineScale",
    "LineTranslate",
    "FlowBuilt",
    "LineAction",
    "domain_index",
    "verify_dagger",
    "make_affine_line_action",
    "make_flow_line_action",
    "make_trivial_line_action",
    "line_map_from_json",
]

CHARTS = ("tan",)


@dataclass(frozen=True)
class FlowSpec:
    """A flow on ``[1, lam]`` given by a chart; only the ``tan`` chart ships.

    The default chart is ``psi(x) = tan(pi*((x-1)/(lam-1) - 1/2))``.  Its inverse
    has derivative ``(lam-1) / (pi*(1+u^2))``, so the speed of the flow never
    exceeds ``K = (lam-1)/pi`` and vanishes at both endpoints.
    """

    lam: float
    chart: str = "tan"

    def __post_init__(self):
        if not math.isfinite(self.lam) or self.lam <= 1:
            raise ValueError(f"flow domain [1, lam] needs lam > 1, got {self.lam}")
        if self.chart not in CHARTS:
            raise ValueError(f"unknown chart {self.chart!r}; available: {CHARTS}")

    @property
    def K(self) -> float:
        return (self.lam - 1) / math.pi

    def psi(self, x):
        x = np.asarray(x, dtype=float)
        width = self.lam - 1
        low = (x - 1) / width
        high = (self.lam - x) / width
        # split at the midpoint so each side is computed from its nearest endpoint
        with np.errstate(divide="ignore"):
            return np.where(low <= 0.5, -1 / np.tan(np.pi * low), 1 / np.tan(np.pi * high))

    def psi_inv(self, u):
        u = np.asarray(u, dtype=float)
        w = np.arctan2(1.0, np.abs(u)) / np.pi
        width = self.lam - 1
        return np.where(u < 0, 1 + width * w, self.lam - width * w)

    def flow(self, t, x):
        """Time-``t`` map of the flow, elementwise on ``x`` in ``[1, lam]``."""
        x = np.asarray(x, dtype=float)
        if np.any((x < 1) | (x > self.lam)):
            raise ValueError(f"flow is defined on [1, {self.lam}] only")
        return self._flow(t, x)

    def _flow(self, t, x):
        t = np.asarray(t, dtype=float)
        interior = (x > 1) & (x < self.lam)
        with np.errstate(over="ignore", invalid="ignore"):
            u = self.psi(np.where(interior, x, 0.5 * (1 + self.lam))) + t
            # psi(x) + t overflowing saturates at the approached endpoint
            u = np.where(np.isnan(u), 0.0, u)
            y = self.psi_inv(u)
        return np.where(interior, y, x)

    def to_json(self) -> dict:
        return {"lam": repr(float(self.lam)), "chart": self.chart}

    @classmethod
    def from_json(cls, data: dict) -> FlowSpec:
        return cls(float(data["lam"]), data.get("chart", "tan"))


def verify_dagger(spec: FlowSpec, n_max: int, grid_size: int = 1000) -> float:
    """Largest observed ``n * |phi(1/n)(x) - x|`` over a grid and ``n = 1, 2, 4, ..., <= n_max``."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    xs = np.linspace(1.0, spec.lam, grid_size)
    worst = 0.0
    n = 1
    while n <= n_max:
        worst = max(worst, float(np.max(n * np.abs(spec._flow(1.0 / n, xs) - xs))))
        n *= 2
    return worst


def domain_index(x, lam: float):
    """``k`` with ``lam^k <= x < lam^(k+1)`` for positive ``x`` (vectorised)."""
    x = np.asarray(x, dtype=float)
    k, _ = _split(x, lam)
    return k


def _split(x, lam):
    """Write positive ``x`` as ``lam^k * x0`` with ``x0`` in ``[1, lam)``."""
    k = np.floor(np.log(x) / math.log(lam))
    base = np.power(lam, k)
    x0 = x / base
    # log rounding can land one domain off near the boundaries
    low = x0 < 1
    k = np.where(low, k - 1, k)
    high = ~low & (x0 >= lam)
    k = np.where(high, k + 1, k)
    base = np.power(lam, k)
    x0 = np.clip(x / base, 1.0, lam)
    return k, x0


class LineMap:
    """An increasing homeomorphism of the real line."""

    kind = "line"

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        raise NotImplementedError

    def inverse(self) -> LineMap:
        raise NotImplementedError

    def displacement_bound(self) -> float:
        return math.inf

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class LineIdentity(LineMap):
    kind = "identity"

    def evaluate(self, x):
        return np.asarray(x, dtype=float)

    def inverse(self):
        return self

    def displacement_bound(self):
        return 0.0

    def to_json(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class LineScale(LineMap):
    factor: float
    kind = "scale"

    def __post_init__(self):
        if not self.factor > 0:
            raise ValueError(f"scale factor must be positive, got {self.factor}")

    def evaluate(self, x):
        return self.factor * np.asarray(x, dtype=float)

    def inverse(self):
        return LineScale(1.0 / self.factor)

    def to_json(self):
        return {"kind": self.kind, "factor": repr(float(self.factor))}


@dataclass(frozen=True)
class LineTranslate(LineMap):
    offset: float
    kind = "translate"

    def evaluate(self, x):
        return np.asarray(x, dtype=float) + self.offset

    def inverse(self):
        return LineTranslate(-self.offset)

    def displacement_bound(self):
        return abs(self.offset)

    def to_json(self):
        return {"kind": self.kind, "offset": repr(float(self.offset))}


@dataclass(frozen=True)
class FlowBuilt(LineMap):
    """``b^time`` for the fundamental-domain action built from ``spec``.

    On ``D_k`` the map is ``x -> lam^k * phi(time / n^k)(x / lam^k)``; it is the
    identity on ``x <= 0``.
    """

    spec: FlowSpec
    n: int
    time: float = 1.0
    kind = "flow_built"

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        out = x.copy()
        pos = x > 0
        if not np.any(pos):
            return out
        k, x0 = _split(x[pos], self.spec.lam)
        with np.errstate(over="ignore", under="ignore"):
            t = self.time * np.power(float(self.n), -k)
        lo = np.power(self.spec.lam, k)
        hi = np.power(self.spec.lam, k + 1)
        # keep images inside their own domain: a one-ulp overshoot past lam^(k+1)
        # would otherwise be swept across the whole next domain on the next step
        out[pos] = np.clip(lo * self.spec._flow(t, x0), lo, hi)
        return out

    def inverse(self):
        return FlowBuilt(self.spec, self.n, -self.time)

    def displacement_bound(self):
        """A rigorous sup of ``|b^time(x) - x|`` over the whole line.

        On ``D_k`` the displacement is at most ``lam^k * min(K*|time|/n^k, lam-1)``.
        For ``k >= 0`` this is ``<= K*|time|`` when ``lam <= n``; for ``k < 0`` the
        factor ``(n/lam)^|k|`` can exceed one, so those domains are scanned.
        """
        lam, n, K = self.spec.lam, self.n, self.spec.K
        t = abs(self.time)
        best = 0.0
        for k in range(-200, 200):
            # float powers: n^k overflows int->float conversion for large |k|
            cap = lam**k * (lam - 1)
            speed = K * t * (lam / n) ** k
            best = max(best, min(speed, cap))
        return best

    def to_json(self):
        return {
            "kind": self.kind,
            "flow": self.spec.to_json(),
            "n": str(self.n),
            "time": repr(float(self.time)),
        }


def line_map_from_json(data: dict) -> LineMap:
    kind = data.get("kind")
    if kind == "identity":
        return LineIdentity()
    if kind == "scale":
        return LineScale(float(data["factor"]))
    if kind == "translate":
        return LineTranslate(float(data["offset"]))
    if kind == "flow_built":
        return FlowBuilt(FlowSpec.from_json(data["flow"]), int(data["n"]), float(data["time"]))
    raise ValueError(f"unknown line map kind {kind!r}")


@dataclass(frozen=True)
class LineAction:
    """Images of the generators: ``a -> (x -> lam x)`` and ``b -> b_image``."""

    n: int
    lam: float
    b_image: LineMap

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n!r}")
        if not self.lam > 0:
            raise ValueError(f"a must act by a positive scaling, got {self.lam}")

    @property
    def a_image(self) -> LineScale:
        return LineScale(self.lam)

    @property
    def faithful(self) -> bool:
        return not isinstance(self.b_image, LineIdentity)

    def relation_residual(self, xs) -> float:
        """``sup |a b a^-1 (x) - b^n (x)|`` over ``xs``."""
        xs = np.asarray(xs, dtype=float)
        lhs = self.lam * self.b_image(xs / self.lam)
        rhs = xs
        for _ in range(self.n):
            rhs = self.b_image(rhs)
        return float(np.max(np.abs(lhs - rhs)))

    def to_json(self) -> dict:
        return {"n": str(self.n), "lam": repr(float(self.lam)), "b": self.b_image.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> LineAction:
        return cls(int(data["n"]), float(data["lam"]), line_map_from_json(data["b"]))


def make_affine_line_action(n: int) -> LineAction:
    return LineAction(n, float(n), LineTranslate(1.0))


def make_flow_line_action(spec: FlowSpec, n: int) -> LineAction:
    if not 1 < spec.lam <= n:
        raise ValueError(f"fundamental-domain action needs 1 < lam <= n, got lam={spec.lam}, n={n}")
    return LineAction(n, spec.lam, FlowBuilt(spec, n))


def make_trivial_line_action(n: int, scale: float) -> LineAction:
    """``a`` scales by ``scale``, ``b`` acts trivially (not faithful)."""
    return LineAction(n, float(scale), LineIdentity())
