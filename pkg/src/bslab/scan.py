"""Sweep of the eigenvalue plane ``(lam, mu)`` for ``h = diag(lam, mu)``.

Each cell is classified by where ``lam`` and ``mu`` sit relative to 1 and n.
Cells that admit actions get every applicable construction built and checked.
Cells without actions get a decay demonstration: the bound driving the
rigidity argument (``(n/a)^m C`` for ``a > n``, ``C a^m`` for ``a < 1``) is
tabulated against the only candidate, ``f = id``.  That is a demonstration,
not a proof of nonexistence.
"""

from __future__ import annotations

import enum
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .actions import (
    BsAction,
    Composed,
    conjugated_strange_rotation_action,
    make_diagonal,
    make_product_action,
    make_strange_rotation_action,
)
from .line import FlowSpec, LineAction, make_affine_line_action, make_flow_line_action, make_trivial_line_action
from .verify import (
    DEFAULT_SHELLS,
    CheckReport,
    displacement_sup,
    foliation_invariance,
    measure_decay_bound,
    measure_scaling_check,
    recurrence_norm,
    relation_residual,
    standard_samples,
    tolerance_for,
)

__all__ = [
    "RegionClass",
    "ScanConfig",
    "Construction",
    "CellReport",
    "TableReport",
    "classify",
    "run_cell",
    "scan_grid",
]


class RegionClass(str, enum.Enum):
    no_action_contracting = "no_action_contracting"
    no_action_mixed = "no_action_mixed"
    no_action_expanding = "no_action_expanding"
    product_only = "product_only"
    strange_and_product = "strange_and_product"
    horizontal_foliation_product = "horizontal_foliation_product"
    vertical_foliation_product = "vertical_foliation_product"
    boundary_unclassified = "boundary_unclassified"

    @property
    def has_action(self) -> bool:
        return self in _ACTION_CLASSES


_ACTION_CLASSES = {
    RegionClass.product_only,
    RegionClass.strange_and_product,
    RegionClass.horizontal_foliation_product,
    RegionClass.vertical_foliation_product,
}

LABELS = {
    RegionClass.no_action_contracting: "No action (contracting)",
    RegionClass.no_action_mixed: "No action (mixed)",
    RegionClass.no_action_expanding: "No action (expanding)",
    RegionClass.product_only: "Product action",
    RegionClass.strange_and_product: "Strange rotation + product",
    RegionClass.horizontal_foliation_product: "Horizontal foliation + product",
    RegionClass.vertical_foliation_product: "Vertical foliation + product",
    RegionClass.boundary_unclassified: "boundary",
}


def _band(v: float, n: int) -> str | None:
    if v < 1:
        return "low"
    if v == 1:
        return None
    return "mid" if v <= n else "high"


_TABLE = {
    ("low", "low"): RegionClass.no_action_contracting,
    ("low", "mid"): RegionClass.product_only,
    ("low", "high"): RegionClass.no_action_mixed,
    ("mid", "low"): RegionClass.product_only,
    ("mid", "mid"): RegionClass.strange_and_product,
    ("mid", "high"): RegionClass.horizontal_foliation_product,
    ("high", "low"): RegionClass.no_action_mixed,
    ("high", "mid"): RegionClass.vertical_foliation_product,
    ("high", "high"): RegionClass.no_action_expanding,
}


def classify(lam: float, mu: float, n: int) -> RegionClass:
    """Table cell for ``h = diag(lam, mu)``: rows ``lam``, columns ``mu``."""
    if not (lam > 0 and mu > 0):
        raise ValueError(f"eigenvalues must be positive, got lam={lam}, mu={mu}")
    if not isinstance(n, int) or n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n!r}")
    bands = (_band(lam, n), _band(mu, n))
    if None in bands:
        return RegionClass.boundary_unclassified
    return _TABLE[bands]


@dataclass(frozen=True)
class ScanConfig:
    seed: int = 0
    closed_tol: float = 1e-9
    flow_tol: float = 1e-6
    shells: tuple = DEFAULT_SHELLS
    scaling_points: int = 8
    decay_m_max: int = 12
    recurrence_m: int = 6
    jobs: int = 1


@dataclass
class Construction:
    name: str
    action: dict
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "action": self.action,
            "pass": self.passed,
            "checks": [c.to_json() for c in self.checks],
        }


@dataclass
class CellReport:
    lam: float
    mu: float
    n: int
    region: RegionClass
    constructions: list = field(default_factory=list)
    demonstrations: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    note: str = ""

    @property
    def passed(self) -> bool:
        if self.errors:
            return False
        if self.region.has_action:
            return bool(self.constructions) and all(c.passed for c in self.constructions)
        return all(d.passed for d in self.demonstrations)

    def to_json(self) -> dict:
        return {
            "lam": self.lam,
            "mu": self.mu,
            "n": self.n,
            "region": self.region.value,
            "label": LABELS[self.region],
            "pass": self.passed,
            "note": self.note,
            "constructions": [c.to_json() for c in self.constructions],
            "demonstrations": [d.to_json() for d in self.demonstrations],
            "errors": self.errors,
        }


def _line_for(n: int, v: float) -> LineAction:
    if v == n:
        return make_affine_line_action(n)
    return make_flow_line_action(FlowSpec(v), n)


def _constructions(lam: float, mu: float, n: int) -> list[BsAction]:
    out = []
    x_mid = 1 < lam <= n
    y_mid = 1 < mu <= n
    if x_mid:
        out.append(make_product_action(_line_for(n, lam), make_trivial_line_action(n, mu),
                                       name="product_x"))
    if y_mid:
        out.append(make_product_action(make_trivial_line_action(n, lam), _line_for(n, mu),
                                       name="product_y"))
    if x_mid and y_mid:
        if lam == mu:
            out.append(make_strange_rotation_action(n, lam))
        else:
            out.append(conjugated_strange_rotation_action(n, lam, mu))
    return out


def _scaling_points(config: ScanConfig) -> np.ndarray:
    rng = np.random.default_rng([config.seed, 7])
    return rng.uniform(-10.0, 10.0, (config.scaling_points, 2))


def _check_action(action: BsAction, region: RegionClass, config: ScanConfig) -> list[CheckReport]:
    samples = standard_samples(config.seed)
    tol = config.flow_tol if action.flow_based else config.closed_tol
    checks = [
        relation_residual(action, samples, tol),
        displacement_sup(action.f, config.shells, seed=config.seed),
    ]
    pts = _scaling_points(config)
    m = int(math.floor(math.log(4096) / math.log(action.n) + 1e-12))
    for kind in ("dx", "dy"):
        checks.append(measure_scaling_check(action, kind, m, pts, config.closed_tol))
    checks.append(recurrence_norm(action, config.recurrence_m, samples, tol))
    if region is RegionClass.horizontal_foliation_product:
        checks.append(foliation_invariance(action.f, "horizontal", samples))
        checks.append(measure_decay_bound(action, "dy", config.decay_m_max, samples))
    if region is RegionClass.vertical_foliation_product:
        checks.append(foliation_invariance(action.f, "vertical", samples))
        checks.append(measure_decay_bound(action, "dx", config.decay_m_max, samples))
    return checks


def _trivial_candidate(lam: float, mu: float, n: int) -> BsAction:
    return BsAction(Composed(()), make_diagonal(lam, mu), n, lam, mu, name="identity_candidate")


def _demonstrate(lam, mu, n, region, config) -> list[CheckReport]:
    candidate = _trivial_candidate(lam, mu, n)
    samples = standard_samples(config.seed)
    out = [relation_residual(candidate, samples, config.closed_tol)]
    for kind, a in (("dx", lam), ("dy", mu)):
        if a > n:
            # (n/a)^m C -> 0 forces nu(gamma_x) = 0
            out.append(measure_decay_bound(candidate, kind, config.decay_m_max, samples))
    if region is RegionClass.no_action_contracting or region is RegionClass.no_action_mixed:
        # C a^m -> 0 for a < 1: f^(n^m) -> id
        out.append(recurrence_norm(candidate, config.decay_m_max, samples, config.closed_tol))
    for d in out:
        d.details["rate"] = {"dx": n / lam if lam > n else lam, "dy": n / mu if mu > n else mu}
    return out


_NOTES = {
    RegionClass.no_action_contracting: "no faithful action with lam, mu < 1 (contracting case); decay demonstration only",
    RegionClass.no_action_mixed: "no faithful action with one eigenvalue > n and the other < 1; decay demonstration only",
    RegionClass.no_action_expanding: "no faithful action with both eigenvalues > n; decay demonstration only",
    RegionClass.boundary_unclassified: "an eigenvalue equals 1; not covered by the classification",
}


def run_cell(lam: float, mu: float, n: int, config: ScanConfig | None = None) -> CellReport:
    config = config or ScanConfig()
    region = classify(lam, mu, n)
    cell = CellReport(float(lam), float(mu), n, region, note=_NOTES.get(region, ""))
    if region is RegionClass.boundary_unclassified:
        return cell
    if not region.has_action:
        cell.demonstrations = _demonstrate(lam, mu, n, region, config)
        return cell
    try:
        actions = _constructions(lam, mu, n)
    except ValueError as exc:
        cell.errors.append(f"construction failed: {exc}")
        return cell
    for action in actions:
        try:
            checks = _check_action(action, region, config)
        except Exception as exc:  # recorded, never raised
            cell.errors.append(f"{action.name}: {type(exc).__name__}: {exc}")
            continue
        cell.constructions.append(Construction(action.name, action.to_json(), checks))
    return cell


def _run_cell_args(args):
    return run_cell(*args)


@dataclass
class TableReport:
    lams: list
    mus: list
    n: int
    cells: list  # row-major: cells[i][j] for lams[i], mus[j]

    @property
    def passed(self) -> bool:
        return all(c.passed for row in self.cells for c in row)

    def summary(self) -> dict:
        counts: dict[str, int] = {}
        for row in self.cells:
            for c in row:
                counts[c.region.value] = counts.get(c.region.value, 0) + 1
        flat = [c for row in self.cells for c in row]
        return {
            "cells": len(flat),
            "passed": sum(c.passed for c in flat),
            "failed": sum(not c.passed for c in flat),
            "regions": dict(sorted(counts.items())),
        }

    def to_json(self) -> dict:
        return {
            "grid": {"lams": self.lams, "mus": self.mus, "n": self.n},
            "summary": self.summary(),
            "cells": [[c.to_json() for c in row] for row in self.cells],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    def render_text(self) -> str:
        """Grid in the layout of the classification table (rows lam, columns mu)."""
        head = [f"lam \\ mu (n={self.n})"] + [f"mu={m:g}" for m in self.mus]
        rows = [head]
        for lam, row in zip(self.lams, self.cells):
            line = [f"lam={lam:g}"]
            for c in row:
                line.append(f"{LABELS[c.region]} [{'PASS' if c.passed else 'FAIL'}]")
            rows.append(line)
        widths = [max(len(r[i]) for r in rows) for i in range(len(head))]
        sep = "+" + "+".join("-" * (w + 2) for w in widths) + "+"
        out = [sep]
        for r in rows:
            out.append("| " + " | ".join(s.ljust(w) for s, w in zip(r, widths)) + " |")
            out.append(sep)
        s = self.summary()
        out.append(f"{s['passed']}/{s['cells']} cells pass")
        return "\n".join(out) + "\n"


def scan_grid(lams: Sequence[float], mus: Sequence[float], n: int,
              config: ScanConfig | None = None) -> TableReport:
    config = config or ScanConfig()
    lams = [float(v) for v in lams]
    mus = [float(v) for v in mus]
    if not lams or not mus:
        raise ValueError("grid must be non-empty")
    jobs = [(lam, mu, n, config) for lam in lams for mu in mus]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            flat = list(pool.map(_run_cell_args, jobs))
    else:
        flat = [_run_cell_args(j) for j in jobs]
    cells = [flat[i * len(mus):(i + 1) * len(mus)] for i in range(len(lams))]
    return TableReport(lams, mus, n, cells)
