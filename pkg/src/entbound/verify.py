"""Oracle suites run by ``entbound verify``.

Each suite returns a list of :class:`Check`. In negative-control mode every
reference value is moved by 0.1 against the solver (audits see a claim
lowered by 0.1, comparisons a reference raised by 0.1), so every check
must fail; a suite that still passes there has no teeth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .legendre import ProjectorWitness, SolverOptions, legendre_eof, projector_transform_geometric
from .measures import EntanglementOfFormation, GeometricMeasure, geometric_pure
from .oracle import audit_legendre, grid_geometric, scan_projector_transform
from .paper import experiment_problem
from .states import basis_state, ghz_y_state, w_state

R_GRID = (-10.0, -5.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0)
SHIFT = 0.1


@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.suite}: {self.name}: {self.detail}"


def _witnesses():
    recs = {}
    for label in ("W1", "W2"):
        rec = experiment_problem("geometric", [label]).records[0]
        recs[label] = rec
    return recs


def grid_suite(negative=False, steps=48):
    shift = SHIFT if negative else 0.0
    out = []
    for name, psi, exact in (("W", w_state(3), 5 / 9), ("GHZ_y", ghz_y_state(3), 0.5),
                             ("000", basis_state("000"), 0.0)):
        g = grid_geometric(psi, steps)
        a = geometric_pure(psi)
        ref = exact + shift
        ok = abs(g - ref) <= 2e-3 and abs(a - ref) <= 1e-6 and g >= a - 1e-12
        out.append(Check("grid", f"E_G({name})", ok,
                         f"grid {g:.6f}, ascent {a:.9f}, reference {ref:.6f}"))
    return out


def projector_suite(negative=False):
    shift = SHIFT if negative else 0.0
    out = []
    for label, rec in _witnesses().items():
        scan = scan_projector_transform(rec.projector, R_GRID)
        worst = max(abs(a + shift - it) for _, a, it, _ in scan.rows)
        out.append(Check("projector", f"{label} analytic vs iterative", worst <= 1e-5,
                         f"max |delta| {worst:.2e} over r in {list(R_GRID)}"))
    return out


def audit_suite(negative=False, samples=None, seed=0):
    shift = -SHIFT if negative else 0.0
    recs = _witnesses()
    w1 = recs["W1"].operator
    dims = (2, 2, 2)
    eof = EntanglementOfFormation((0,))
    geo = GeometricMeasure()
    cases = [
        ("zero operator, E_F", np.zeros((8, 8), dtype=complex), eof, 0.0),
        ("-2 W1, E_G (closed form)", -2 * w1, geo,
         projector_transform_geometric(ProjectorWitness(2 / 3, w_state(3), 5 / 9), -2.0)),
        ("-2 W1, E_F (iterative)", -2 * w1, eof, legendre_eof(-2 * w1, dims, (0,), SolverOptions()).value),
    ]
    out = []
    for name, w, measure, claimed in cases:
        rep = audit_legendre(w, measure, dims, claimed + shift, samples=samples, seed=seed, target=name)
        out.append(Check("audit", name, rep.passed,
                         f"claimed {rep.claimed:.6g}, sampled max {rep.sampled_max:.6g}, "
                         f"violation {rep.max_violation:.2e}, {rep.samples} states"))
    return out


SUITES = {"grid": grid_suite, "projector": projector_suite, "audit": audit_suite}


def run_suites(names=None, negative=False, samples=None, seed=0):
    names = list(SUITES) if names in (None, "all") else [names] if isinstance(names, str) else list(names)
    checks = []
    for name in names:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
        if name == "audit":
            checks.extend(audit_suite(negative, samples, seed))
        else:
            checks.extend(SUITES[name](negative))
    return checks
