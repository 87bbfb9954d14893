"""Best lower bound on a convex measure from measured witness expectations.

For measured values ``w_k = tr(rho W_k)`` every slope vector ``r`` gives the
affine bound ``E(rho) >= r.w - Ehat(sum_k r_k W_k)``, valid for all states.
:func:`epsilon_bound` maximizes this over ``r``.

By default the search runs in the compactified coordinate
``u = r / (1 + |r|)`` in ``(-1, 1)``, so slopes of any size are reachable;
this matters when the data sit on the edge of the attainable set (for
example ``<W_1> = -1/3`` for the W-state witness), where the supremum is
only approached as ``|r| -> infinity``.
"""

from __future__ import annotations

import dataclasses
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .legendre import (
    LegendreResult,
    ProjectorWitness,
    SolverOptions,
    legendre_roof,
    projector_transform_geometric,
)
from .measures import EntanglementOfFormation, GeometricMeasure
from .qla import DimensionError, as_dims, check_hermitian
from .search import SearchResult, search_1d, search_nd

Measure = Union[EntanglementOfFormation, GeometricMeasure]


@dataclass(frozen=True)
class WitnessRecord:
    operator: np.ndarray
    measured: float
    stderr: float = 0.0
    label: str = ""
    projector: Optional[ProjectorWitness] = None

    def __post_init__(self):
        object.__setattr__(self, "operator", check_hermitian(self.operator, self.label or "witness"))
        if self.stderr < 0:
            raise ValueError("stderr must be nonnegative")


@dataclass(frozen=True)
class MeasureSpec:
    measure: Measure
    solver: SolverOptions = SolverOptions()


@dataclass(frozen=True)
class SearchOptions:
    compact: bool = True
    # largest |r| reachable in compact mode
    max_slope: float = 1e6
    box: float = 50.0
    widen: float = 2.0
    max_widen: float = 8.0
    grid: int = 101
    xtol: float = 1e-6
    tol: float = 1e-8
    max_passes: int = 50
    threads: int = 1


@dataclass
class BoundResult:
    epsilon: float
    r_star: tuple
    c_star: float
    uncertainty: float
    certificate_valid: bool
    converged: bool
    at_boundary: bool
    consistent: bool
    analytic: bool
    measured: tuple
    evaluations: int
    nonconverged_evaluations: int
    inner: Optional[dict] = None
    audit: Optional[object] = None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {
            "epsilon": self.epsilon,
            "r_star": list(self.r_star),
            "c_star": self.c_star,
            "uncertainty": self.uncertainty,
            "certificate_valid": self.certificate_valid,
            "converged": self.converged,
            "at_boundary": self.at_boundary,
            "consistent": self.consistent,
            "analytic": self.analytic,
            "measured": list(self.measured),
            "evaluations": self.evaluations,
            "nonconverged_evaluations": self.nonconverged_evaluations,
            "inner": self.inner,
            "notes": list(self.notes),
        }
        if self.audit is not None:
            out["audit"] = self.audit.to_dict()
        return out


def to_slope(u):
    u = np.asarray(u, dtype=float)
    return u / (1.0 - np.abs(u))


def to_compact(r):
    r = np.asarray(r, dtype=float)
    return r / (1.0 + np.abs(r))


def _check_records(records, dims):
    if not records:
        raise ValueError("at least one witness record is required")
    d = int(np.prod(dims))
    for rec in records:
        if rec.operator.shape != (d, d):
            raise DimensionError(
                f"witness {rec.label!r} has shape {rec.operator.shape}, expected {(d, d)}"
            )


class ConjugateEvaluator:
    """Memoized ``r -> Ehat(sum_k r_k W_k)`` for a fixed witness set and measure.

    Uses the closed-form transform whenever ``r`` has a single nonzero
    component and that witness is a projector witness under the geometric
    measure, and the iterative solvers otherwise. The memo key is ``r``
    rounded to 1e-9; concurrent insertion is last-write-wins.
    """

    def __init__(self, records: Sequence[WitnessRecord], spec: MeasureSpec, dims):
        self.dims = as_dims(dims)
        self.records = list(records)
        _check_records(self.records, self.dims)
        spec.measure.validate(self.dims)
        self.spec = spec
        self.ops = np.array([rec.operator for rec in self.records])
        self.projectors = [None] * len(self.records)
        if isinstance(spec.measure, GeometricMeasure):
            for k, rec in enumerate(self.records):
                pw = rec.projector or ProjectorWitness.from_operator(rec.operator, self.dims)
                if pw is not None:
                    self.projectors[k] = pw.with_eg(restarts=spec.measure.restarts, tol=spec.measure.tol,
                                                    seed=spec.measure.seed)
        self._memo: dict = {}
        self._lock = threading.Lock()
        self.nonconverged = 0

    @property
    def analytic(self) -> bool:
        """Every slope is handled in closed form (a single projector witness)."""
        return len(self.records) == 1 and self.projectors[0] is not None

    def is_analytic(self, r) -> bool:
        nz = np.flatnonzero(np.atleast_1d(r))
        return nz.size == 1 and self.projectors[nz[0]] is not None

    def operator(self, r) -> np.ndarray:
        return np.tensordot(np.asarray(r, dtype=float), self.ops, axes=1)

    def result(self, r) -> Optional[LegendreResult]:
        key = tuple(round(float(x), 9) for x in np.atleast_1d(r))
        with self._lock:
            if key in self._memo:
                return self._memo[key]
        res = legendre_roof(self.operator(r), self.spec.measure, self.dims, self.spec.solver)
        with self._lock:
            self._memo[key] = res
            if not res.converged:
                self.nonconverged += 1
        return res

    def __call__(self, r) -> float:
        r = np.atleast_1d(np.asarray(r, dtype=float))
        if not np.any(r):
            return 0.0
        if self.is_analytic(r):
            k = int(np.flatnonzero(r)[0])
            return projector_transform_geometric(self.projectors[k], float(r[k]))
        return self.result(r).value

    @property
    def evaluations(self) -> int:
        return len(self._memo)


def affine_certificate(records, spec: MeasureSpec, dims, r):
    """``(r, c)`` with ``c = Ehat(sum_k r_k W_k)``, so that ``E(rho) >= r.w - c`` for every state."""
    ev = ConjugateEvaluator(records, spec, dims)
    r = tuple(float(x) for x in np.atleast_1d(r))
    if len(r) != len(ev.records):
        raise ValueError(f"need {len(ev.records)} slopes, got {len(r)}")
    return r, float(ev(r))


def propagate_uncertainty(result: BoundResult, records) -> float:
    """First-order propagation at the optimal slope: ``sqrt(sum (r_k dw_k)^2)``."""
    return float(math.sqrt(sum((rk * rec.stderr) ** 2 for rk, rec in zip(result.r_star, records))))


def _run_search(g, n, opts: SearchOptions, lo, hi):
    box = [(lo, hi)] * n
    if n == 1:
        res = search_1d(lambda t: g(np.array([t])), lo, hi, opts.grid, opts.xtol)
        res.x = np.array([res.x])
        return res
    return search_nd(g, box, grid=opts.grid, xtol=opts.xtol, tol=opts.tol,
                     max_passes=opts.max_passes)


def epsilon_bound(records: Sequence[WitnessRecord], spec: MeasureSpec, dims,
                  search: SearchOptions = SearchOptions()) -> BoundResult:
    """Maximize ``g(r) = r.w - Ehat(sum_k r_k W_k)`` over slope vectors ``r``.

    Returns the best slope with its certificate. ``at_boundary`` means the
    optimum sits at the edge of the searched region; in compact mode this
    happens when the supremum is only reached as ``|r|`` grows without
    bound, and ``consistent`` is cleared when ``g`` is still growing there,
    i.e. no state reproduces the data.
    """
    records = list(records)
    ev = ConjugateEvaluator(records, spec, dims)
    n = len(records)
    w = np.array([rec.measured for rec in records], dtype=float)

    def g(r):
        return float(r @ w - ev(r))

    notes = []
    if search.compact:
        edge = 1.0 / (1.0 + search.max_slope)
        if search.threads > 1 and not ev.is_analytic(np.eye(n)[0]):
            _prefetch(ev, to_slope(np.linspace(-1 + edge, 1 - edge, search.grid)), n, search.threads)
        res = _run_search(lambda u: g(to_slope(u)), n, search, -1.0 + edge, 1.0 - edge)
        r_star = to_slope(res.x)
        at_boundary = res.at_boundary
    else:
        half = search.box
        while True:
            res = _run_search(g, n, search, -half, half)
            if not res.at_boundary or half >= search.box * search.max_widen:
                break
            half *= search.widen
        r_star = np.asarray(res.x, dtype=float)
        at_boundary = res.at_boundary
        if at_boundary:
            notes.append(f"optimum on the search box |r| <= {half:g}; widen the box")

    if g(np.zeros(n)) >= g(r_star):
        r_star = np.zeros(n)
        at_boundary = False
    c_star = ev(r_star)
    epsilon = float(r_star @ w - c_star)

    consistent = True
    if at_boundary:
        growth = g(r_star) - g(r_star / 2)
        if growth > 1e-4:
            consistent = False
            notes.append("bound grows without limit along the slope: no state reproduces the data")
        else:
            notes.append("supremum approached only as |r| grows; data on the edge of the attainable set")

    inner = None
    converged = True
    analytic = ev.is_analytic(r_star) or not np.any(r_star)
    if not analytic:
        lr = ev.result(r_star)
        inner = lr.summary()
        converged = lr.converged
    out = BoundResult(
        epsilon=epsilon,
        r_star=tuple(float(x) for x in r_star),
        c_star=float(c_star),
        uncertainty=0.0,
        certificate_valid=converged and consistent,
        converged=converged,
        at_boundary=bool(at_boundary),
        consistent=consistent,
        analytic=bool(analytic),
        measured=tuple(float(x) for x in w),
        evaluations=res.evaluations,
        nonconverged_evaluations=ev.nonconverged,
        inner=inner,
        notes=notes,
    )
    out.uncertainty = propagate_uncertainty(out, records)
    return out


def _prefetch(ev: ConjugateEvaluator, slopes, n, threads):
    """Evaluate the first grid pass concurrently; results land in the memo."""
    points = []
    for s in slopes:
        r = np.zeros(n)
        r[0] = s
        points.append(r)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        list(pool.map(ev.result, [p for p in points if np.any(p)]))
