"""Brute-force checks that share no optimization code with the solvers.

* :func:`audit_legendre` checks a claimed conjugate value against
  ``<psi|W|psi> - E(psi)`` on Haar-random states, followed by a random-search
  refinement from the best samples. Any sample above the claim is a
  soundness violation.
* :func:`grid_geometric` evaluates the three-qubit geometric measure on a
  nested angle grid.
* :func:`scan_projector_transform` tabulates the closed-form and iterative
  transforms of a projector witness side by side.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .legendre import ProjectorWitness, SolverOptions, legendre_geometric, projector_transform_geometric
from .measures import (
    EntanglementOfFormation,
    GeometricMeasure,
    _product_sweep,
    product_overlap2,
)
from .qla import PureState, as_dims, check_hermitian, reduced_state

CHUNK = 4096


@dataclass
class AuditReport:
    target: str
    samples: int
    max_violation: float
    worst_case: str
    passed: bool
    claimed: float
    sampled_max: float
    tolerance: float

    @property
    def gap(self) -> float:
        """``claimed - sampled_max``; small and nonnegative for a tight, sound claim."""
        return self.claimed - self.sampled_max

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "samples": self.samples,
            "claimed": self.claimed,
            "sampled_max": self.sampled_max,
            "gap": self.gap,
            "max_violation": self.max_violation,
            "tolerance": self.tolerance,
            "worst_case": self.worst_case,
            "passed": self.passed,
        }

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.target}: claimed {self.claimed:.6g}, sampled max "
                f"{self.sampled_max:.6g} over {self.samples} states, violation "
                f"{self.max_violation:.3g} (tol {self.tolerance:.1g})")


def describe_state(vec, dims, terms=4) -> str:
    vec = np.asarray(vec)
    order = np.argsort(-np.abs(vec), kind="stable")[:terms]
    parts = []
    for i in order:
        if abs(vec[i]) < 1e-12:
            continue
        label = "".join(str(x) for x in np.unravel_index(i, dims))
        a = vec[i]
        parts.append(f"({a.real:+.4f}{a.imag:+.4f}j)|{label}>")
    return " + ".join(parts) + (" + ..." if np.count_nonzero(np.abs(vec) > 1e-12) > terms else "")


def _haar_chunk(rng, dim, count):
    z = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def _geometric_batch(vecs, dims, rng, extra_starts=2, tol=1e-10, max_cycles=300, warm=None):
    """Batched closest-product ascent; returns (E_G upper estimates, best factors)."""
    n = vecs.shape[0]
    psi_t = vecs.reshape((n,) + dims)
    starts = []
    first = []
    for k in range(len(dims)):
        rho = reduced_state(vecs, dims, [k])
        first.append(np.linalg.eigh(rho)[1][..., -1])
    starts.append(first)
    if warm is not None:
        starts.append([f.copy() for f in warm])
    for _ in range(extra_starts):
        starts.append([_haar_chunk(rng, dk, n) for dk in dims])
    best_ov = np.full(n, -1.0)
    best_f = [np.empty((n, dk), dtype=complex) for dk in dims]
    for fs in starts:
        ov = product_overlap2(psi_t, fs)
        act = np.arange(n)
        for _ in range(max_cycles):
            sub = [f[act] for f in fs]
            new = _product_sweep(psi_t[act], sub)[-1]
            for k in range(len(dims)):
                fs[k][act] = sub[k]
            gain = new - ov[act]
            ov[act] = new
            act = act[gain >= tol]
            if act.size == 0:
                break
        better = ov > best_ov
        best_ov = np.where(better, ov, best_ov)
        for k in range(len(dims)):
            best_f[k][better] = fs[k][better]
    return 1.0 - np.minimum(best_ov, 1.0), best_f


class _Objective:
    """``psi -> <psi|W|psi> - E(psi)`` on stacks of vectors."""

    def __init__(self, w, measure, dims, rng):
        self.w, self.measure, self.dims, self.rng = w, measure, dims, rng

    def __call__(self, vecs, warm=None):
        exp = np.real(np.einsum("ri,ij,rj->r", vecs.conj(), self.w, vecs))
        m = self.measure
        factors = None
        if isinstance(m, EntanglementOfFormation):
            p = np.linalg.eigvalsh(reduced_state(vecs, self.dims, m.left))
            p = np.where(p > 0, p, 0.0)
            ent = -(p * np.log(np.where(p > 0, p, 1.0))).sum(axis=1) / m.base.ln
        elif isinstance(m, GeometricMeasure):
            ent, factors = _geometric_batch(vecs, self.dims, self.rng, warm=warm)
        else:
            ent = np.array([m(PureState(self.dims, v)) for v in vecs])
        return exp - ent, factors


def audit_legendre(w, measure, dims, claimed, samples=None, seed=0, tol=1e-9,
                   refine=True, climbers=16, steps=400, target="") -> AuditReport:
    """Check ``claimed >= <psi|W|psi> - E(psi)`` on sampled states.

    ``samples`` Haar states are drawn in fixed-size chunks from one seeded
    stream, so a smaller run sees a prefix of a larger one. With ``refine``
    the eigenvectors of ``W`` are added to the pool and the best ``climbers``
    candidates are improved by a (1+1) evolution strategy for ``steps``
    steps, every eigenvector and proposal counting as a sample.

    The violation tolerance is ``tol`` plus a float-rounding allowance
    proportional to the operator norm.
    """
    dims = as_dims(dims)
    w = check_hermitian(w)
    d = w.shape[0]
    if samples is None:
        samples = 100_000 if d <= 8 else 10_000
    if samples < 1:
        raise ValueError("samples must be >= 1")
    allowance = tol + 1e-14 * float(np.abs(w).max(initial=0.0))
    rng_states = np.random.default_rng([seed, 0])
    objective = _Objective(w, measure, dims, np.random.default_rng([seed, 1]))

    best_vals = np.empty(0)
    best_vecs = np.empty((0, d), dtype=complex)
    done = 0
    keep = max(climbers, 1)
    while done < samples:
        vecs = _haar_chunk(rng_states, d, CHUNK)[: samples - done]
        vals, _ = objective(vecs)
        done += vecs.shape[0]
        allv = np.concatenate([best_vals, vals])
        allx = np.concatenate([best_vecs, vecs])
        top = np.argsort(-allv, kind="stable")[:keep]
        best_vals, best_vecs = allv[top], allx[top]
    count = done

    if refine and climbers > 0:
        # eigenvectors of W join the pool: when W dominates E, the supremum
        # sits at a sharp peak that random search alone never reaches
        eig = np.linalg.eigh(w)[1].T
        eig_vals, _ = objective(eig)
        count += d
        pool_v = np.concatenate([best_vals, eig_vals])
        pool_x = np.concatenate([best_vecs, eig])
        top = np.argsort(-pool_v, kind="stable")[:climbers]
        rng_es = np.random.default_rng([seed, 2])
        x = pool_x[top].copy()
        fx, factors = objective(x)
        sigma = np.full(x.shape[0], 0.2)
        for _ in range(steps):
            z = rng_es.standard_normal((x.shape[0], d)) + 1j * rng_es.standard_normal((x.shape[0], d))
            y = x + sigma[:, None] * z / np.sqrt(2 * d)
            y /= np.linalg.norm(y, axis=1, keepdims=True)
            fy, fac_y = objective(y, warm=factors)
            count += y.shape[0]
            ok = fy > fx
            x[ok], fx[ok] = y[ok], fy[ok]
            if factors is not None:
                for k in range(len(factors)):
                    factors[k][ok] = fac_y[k][ok]
            sigma = np.where(ok, sigma * 1.5, sigma * 0.9)
            sigma = np.clip(sigma, 1e-7, 1.0)
        best_vals = np.concatenate([best_vals, fx])
        best_vecs = np.concatenate([best_vecs, x])

    i = int(np.argmax(best_vals))
    sampled_max = float(best_vals[i])
    violation = max(0.0, sampled_max - claimed)
    return AuditReport(
        target=target or _describe_measure(measure),
        samples=count,
        max_violation=violation,
        worst_case=describe_state(best_vecs[i], dims),
        passed=violation <= allowance,
        claimed=float(claimed),
        sampled_max=sampled_max,
        tolerance=allowance,
    )


def _describe_measure(measure) -> str:
    describe = getattr(measure, "describe", None)
    return describe() if describe else getattr(measure, "__name__", "custom measure")


def _qubit_grid(steps):
    theta = np.linspace(0.0, np.pi / 2, steps + 1)
    phi = 2 * np.pi * np.arange(steps) / steps
    t, p = np.meshgrid(theta, phi, indexing="ij")
    t, p = t.ravel(), p.ravel()
    return np.stack([np.cos(t), np.exp(1j * p) * np.sin(t)], axis=1)


def grid_overlap(psi: PureState, steps=48) -> float:
    """Max ``|<abc|psi>|^2`` with ``a``, ``b`` on the angle grid and ``c`` optimal.

    ``a`` and ``b`` range over ``(cos t, e^{ip} sin t)`` with ``t`` on
    ``steps + 1`` points of ``[0, pi/2]`` and ``p`` on ``steps`` points of
    ``[0, 2 pi)``. For fixed ``a, b`` the best ``c`` is the normalized
    contraction, so its overlap is the squared norm of that contraction.
    Grids with ``steps`` doubling are nested.
    """
    if psi.dims != (2, 2, 2):
        raise ValueError(f"grid oracle needs exactly three qubits, got dims {psi.dims}")
    if steps < 12:
        raise ValueError("need at least 12 steps per angle")
    g = _qubit_grid(steps)
    t = psi.amplitudes.reshape(2, 2, 2)
    best = 0.0
    for start in range(0, g.shape[0], 256):
        # m[i, y, z] = <a_i|psi>; q[i] = m m^dagger, so |<a b c|psi>|^2 maximized
        # over c equals the quadratic form <b|q|b> (conjugated)
        m = np.einsum("ix,xyz->iyz", g[start:start + 256].conj(), t)
        q = m @ np.swapaxes(m.conj(), 1, 2)
        vals = np.real(np.einsum("jy,iyw,jw->ij", g.conj(), q, g))
        best = max(best, float(vals.max()))
    return best


def grid_geometric(psi: PureState, steps=48) -> float:
    """Geometric measure of a three-qubit state from :func:`grid_overlap`.

    The grid maximum never exceeds the true overlap, so this is never below
    the true measure; the excess shrinks with the grid spacing.
    """
    return 1.0 - grid_overlap(psi, steps)


@dataclass
class ProjectorScan:
    rows: list = field(default_factory=list)

    @property
    def max_delta(self) -> float:
        return max((row[3] for row in self.rows), default=0.0)

    def format(self) -> str:
        lines = [f"{'r':>8} {'analytic':>14} {'iterative':>14} {'|delta|':>10}"]
        for r, a, it, dlt in self.rows:
            lines.append(f"{r:8.3g} {a:14.9f} {it:14.9f} {dlt:10.2e}")
        lines.append(f"max |delta| = {self.max_delta:.3e}")
        return "\n".join(lines)


def scan_projector_transform(pw: ProjectorWitness, rs: Sequence[float],
                             opts: SolverOptions = SolverOptions()) -> ProjectorScan:
    """Closed-form vs. iterative geometric transform of ``r * W`` over ``rs``."""
    pw = pw.with_eg()
    op = pw.operator()
    scan = ProjectorScan()
    for r in rs:
        r = float(r)
        analytic = projector_transform_geometric(pw, r)
        iterative = 0.0 if r == 0 else legendre_geometric(r * op, pw.chi.dims, opts).value
        scan.rows.append((r, analytic, iterative, abs(analytic - iterative)))
    return scan


def audit_bound(result, records, spec, dims, samples=None, seed=0, shift=0.0) -> AuditReport:
    """Audit the certificate ``c* = Ehat(sum_k r*_k W_k)`` of a bound.

    ``shift`` is added to the claimed value; a negative shift is the
    negative control and should make the audit fail.
    """
    r = np.asarray(result.r_star, dtype=float)
    w = np.tensordot(r, np.array([rec.operator for rec in records]), axes=1)
    labels = "+".join(f"{x:.4g}*{rec.label or 'W'}" for x, rec in zip(r, records))
    return audit_legendre(w, spec.measure, dims, result.c_star + shift, samples=samples, seed=seed,
                          target=f"{_describe_measure(spec.measure)} at {labels}")


def certify(result, records, spec, dims, audit=True, samples=None, seed=0):
    """Attach an audit to ``result`` and settle ``certificate_valid``.

    A non-converged inner solve forces the audit even when ``audit`` is
    false. An audited certificate is valid iff the audit passes and the data
    are consistent.
    """
    if audit or not result.converged:
        result.audit = audit_bound(result, records, spec, dims, samples=samples, seed=seed)
        result.certificate_valid = result.audit.passed and result.consistent
        if not result.converged:
            result.notes.append("inner solver did not converge; certificate rests on the audit")
    return result
