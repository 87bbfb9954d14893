"""Conjugate transforms ``Ehat(W) = sup_psi <psi|W|psi> - E(psi)`` of convex-roof measures.

For a convex-roof measure the supremum over mixed states reduces to pure
states, so every solver here maximizes over unit vectors only. The two
specialized solvers alternate between two blocks of variables, each of
which has a closed-form maximizer:

* entanglement of formation: the entropy is written as
  ``S(rho_1) = inf_H tr(rho_1 H) - F(H)`` with ``F(H) = -log tr exp(-H)``;
  for fixed ``H`` the best ``psi`` is a top eigenvector of ``W - H (x) 1``,
  for fixed ``psi`` the best ``H`` is ``-log rho_1``.
* geometric measure: ``1 - E_G(psi) = max_phi |<phi|psi>|^2`` over product
  ``phi``; for fixed ``phi`` the best ``psi`` is a top eigenvector of
  ``W + |phi><phi|``, for fixed ``psi`` each factor of ``phi`` is updated
  by the parallel-vector rule.

All restarts run together as one batch of small dense matrices. Every
reported value is attained by the returned maximizer, hence a valid lower
bound on the true supremum; global optimality is not certified.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from .measures import (
    EntanglementOfFormation,
    GeometricMeasure,
    LogBase,
    _product_sweep,
    closest_product,
    product_overlap2,
    geometric_pure,
)
from .qla import (
    DEFAULT_LOG_FLOOR,
    DimensionError,
    PureState,
    as_dims,
    check_hermitian,
    haar_vectors,
    permute_operator,
    permute_parties,
    _check_party_set,
)


@dataclass(frozen=True)
class SolverOptions:
    restarts: int = 20
    tol: float = 1e-10
    max_iters: int = 500
    seed: int = 0
    log_floor: float = DEFAULT_LOG_FLOOR
    base: LogBase = LogBase.NATURAL

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        object.__setattr__(self, "base", LogBase(self.base))


@dataclass(frozen=True)
class LegendreResult:
    value: float
    maximizer: PureState
    iterations: int
    restart_values: tuple
    converged: bool
    restart_converged: tuple = ()
    history: tuple = field(default=(), repr=False)

    def summary(self) -> dict:
        return {
            "value": self.value,
            "iterations": self.iterations,
            "converged": self.converged,
            "restarts": len(self.restart_values),
            "restart_spread": float(max(self.restart_values) - min(self.restart_values)),
        }


@dataclass(frozen=True)
class ProjectorWitness:
    """Witness ``alpha * 1 - |chi><chi|``, optionally with ``E_G(chi)`` cached."""

    alpha: float
    chi: PureState
    eg_chi: Optional[float] = None

    def __post_init__(self):
        if self.eg_chi is not None and not -1e-12 <= self.eg_chi <= 1 + 1e-12:
            raise ValueError("eg_chi must lie in [0, 1]")

    def operator(self) -> np.ndarray:
        return self.alpha * np.eye(self.chi.dim, dtype=complex) - self.chi.projector()

    def with_eg(self, **kwargs) -> "ProjectorWitness":
        if self.eg_chi is not None:
            return self
        return dataclasses.replace(self, eg_chi=geometric_pure(self.chi, **kwargs))

    @classmethod
    def from_operator(cls, w, dims, tol=1e-9) -> Optional["ProjectorWitness"]:
        """Recognize ``alpha * 1 - |chi><chi|``; ``None`` if ``w`` is not of that form."""
        w = check_hermitian(w)
        vals, vecs = np.linalg.eigh(w)
        alpha = vals[-1]
        if abs(vals[0] - (alpha - 1.0)) > tol or np.ptp(vals[1:]) > tol:
            return None
        return cls(float(alpha), PureState.from_amplitudes(vecs[:, 0], dims))


def free_energy(h, base=LogBase.NATURAL) -> float:
    """``-log tr(base^(-H))``, shifted by the smallest eigenvalue for stability."""
    return float(_free_energy_spectrum(np.linalg.eigvalsh(check_hermitian(h)), LogBase(base).ln))


def _free_energy_spectrum(h, ln_b):
    hmin = h.min(axis=-1)
    return hmin - np.log(np.exp(-(h - hmin[..., None]) * ln_b).sum(axis=-1)) / ln_b


def _batched_entropy(rho, ln_b):
    p = np.linalg.eigvalsh(rho)
    logs = np.log(np.where(p > 0, p, 1.0))
    return -(np.where(p > 0, p, 0.0) * logs).sum(axis=-1) / ln_b


def _expect(w, psi):
    return np.real(np.einsum("ri,ij,rj->r", psi.conj(), w, psi))


def _random_starts(dim, opts: SolverOptions, first):
    vecs = [first]
    for i in range(1, opts.restarts):
        vecs.append(haar_vectors(np.random.default_rng([opts.seed, i]), dim))
    return np.array(vecs)


def _hopeless(obj, gain, idx, iters, max_iters, warmup=5):
    """Restarts that cannot reach the current best at their present rate of gain."""
    reach = obj[idx] + np.maximum(gain, 0.0) * (max_iters - iters[idx])
    return (iters[idx] >= warmup) & (reach < obj.max())


def _pick(values, iters, done, history, maximizer, dims):
    best = int(np.argmax(values))  # first index wins ties
    return LegendreResult(
        value=float(values[best]),
        maximizer=PureState.from_amplitudes(maximizer[best], dims),
        iterations=int(iters[best]),
        restart_values=tuple(float(v) for v in values),
        converged=bool(done[best]),
        restart_converged=tuple(bool(x) for x in done),
        history=tuple(np.array(h) for h in history),
    )


def legendre_eof(w, dims, left=(0,), opts: SolverOptions = SolverOptions()) -> LegendreResult:
    """``sup_psi <psi|W|psi> - S(rho_left(psi))`` by alternating ascent.

    The entropy is measured in ``opts.base``. Restart 0 starts from a top
    eigenvector of ``W`` (equivalently from ``H = 0``); the others from
    Haar-random vectors. A restart stops once one full iteration gains less
    than ``opts.tol``, or once it cannot reach the best value at its current
    rate of gain; ``converged`` refers to the winning restart.

    ``history[i]`` records the objective of restart ``i`` after every
    half-step.
    """
    dims = as_dims(dims)
    w = check_hermitian(w, "witness")
    d = int(np.prod(dims))
    if w.shape != (d, d):
        raise DimensionError(f"witness shape {w.shape} does not match dims {dims}")
    left = _check_party_set(left, len(dims))
    rest = [p for p in range(len(dims)) if p not in left]
    order = list(left) + rest
    inverse = list(np.argsort(order))
    perm_dims = tuple(dims[p] for p in order)
    dl = int(np.prod([dims[p] for p in left]))
    dr = d // dl
    ln_b = opts.base.ln

    wp = permute_operator(w, dims, order)
    psi = _random_starts(d, opts, np.linalg.eigh(wp)[1][:, -1])
    n = psi.shape[0]
    eye_r = np.eye(dr)

    m = psi.reshape(n, dl, dr)
    rho = m @ np.swapaxes(m.conj(), -1, -2)
    obj = _expect(wp, psi) - _batched_entropy(rho, ln_b)
    history = [[x] for x in obj]
    done = np.zeros(n, dtype=bool)
    retired = np.zeros(n, dtype=bool)
    iters = np.zeros(n, dtype=int)
    for _ in range(opts.max_iters):
        act = ~(done | retired)
        if not act.any():
            break
        lam, vec = np.linalg.eigh(rho[act])
        logs = -np.log(np.maximum(lam, opts.log_floor)) / ln_b
        h = (vec * logs[:, None, :]) @ np.swapaxes(vec.conj(), -1, -2)
        big = (h[:, :, None, :, None] * eye_r[None, None, :, None, :]).reshape(-1, d, d)
        ev, evec = np.linalg.eigh(wp[None] - big)
        new_psi = evec[:, :, -1]
        half = ev[:, -1] + _free_energy_spectrum(logs, ln_b)
        m = new_psi.reshape(-1, dl, dr)
        new_rho = m @ np.swapaxes(m.conj(), -1, -2)
        new_obj = _expect(wp, new_psi) - _batched_entropy(new_rho, ln_b)
        idx = np.flatnonzero(act)
        gain = new_obj - obj[idx]
        for j, i in enumerate(idx):
            history[i].extend((half[j], new_obj[j]))
        psi[idx], rho[idx], obj[idx] = new_psi, new_rho, new_obj
        iters[idx] += 1
        done[idx] = gain < opts.tol
        retired[idx] = _hopeless(obj, gain, idx, iters, opts.max_iters)
    return _pick(obj, iters, done, history, permute_parties(psi, perm_dims, inverse), dims)


def _kron_factors(factors):
    out = factors[0]
    for f in factors[1:]:
        out = (out[:, :, None] * f[:, None, :]).reshape(out.shape[0], -1)
    return out


def legendre_geometric(w, dims, opts: SolverOptions = SolverOptions()) -> LegendreResult:
    """``sup_psi <psi|W|psi> - E_G(psi)`` by alternating ascent.

    Restart 0 starts from a top eigenvector of ``W`` and its closest product
    state; the others from a Haar-random vector and one product cycle from a
    random product state. The winning vector is finally re-scored with a
    multistart closest-product search, which can only raise the value.
    """
    dims = as_dims(dims)
    w = check_hermitian(w, "witness")
    d = int(np.prod(dims))
    if w.shape != (d, d):
        raise DimensionError(f"witness shape {w.shape} does not match dims {dims}")
    if len(dims) < 2:
        raise DimensionError("geometric measure needs at least two parties")

    psi0 = np.linalg.eigh(w)[1][:, -1]
    psi = _random_starts(d, opts, psi0)
    n = psi.shape[0]
    phi0, _ = closest_product(PureState.from_amplitudes(psi0, dims),
                              restarts=opts.restarts, seed=opts.seed)
    factors = [np.empty((n, dk), dtype=complex) for dk in dims]
    for k, dk in enumerate(dims):
        factors[k][0] = phi0.factors[k]
        for i in range(1, n):
            rng = np.random.default_rng([opts.seed, i, k + 1])
            factors[k][i] = haar_vectors(rng, dk)
    if n > 1:
        tail = [f[1:] for f in factors]
        _product_sweep(psi[1:].reshape((n - 1,) + dims), tail)
        for k in range(len(dims)):
            factors[k][1:] = tail[k]
    psi_t = psi.reshape((n,) + dims)
    obj = _expect(w, psi) + product_overlap2(psi_t, factors) - 1.0
    history = [[x] for x in obj]
    done = np.zeros(n, dtype=bool)
    retired = np.zeros(n, dtype=bool)
    iters = np.zeros(n, dtype=int)
    for _ in range(opts.max_iters):
        act = np.flatnonzero(~(done | retired))
        if act.size == 0:
            break
        fs = [f[act] for f in factors]
        phi = _kron_factors(fs)
        ev, evec = np.linalg.eigh(w[None] + phi[:, :, None] * phi.conj()[:, None, :])
        new_psi = evec[:, :, -1]
        half = ev[:, -1] - 1.0
        ov = _product_sweep(new_psi.reshape((act.size,) + dims), fs)[-1]
        new_obj = _expect(w, new_psi) + ov - 1.0
        gain = new_obj - obj[act]
        for j, i in enumerate(act):
            history[i].extend((half[j], new_obj[j]))
        psi[act], obj[act] = new_psi, new_obj
        for k in range(len(dims)):
            factors[k][act] = fs[k]
        iters[act] += 1
        done[act] = gain < opts.tol
        retired[act] = _hopeless(obj, gain, act, iters, opts.max_iters)
    best = int(np.argmax(obj))
    _, ov = closest_product(PureState.from_amplitudes(psi[best], dims),
                            restarts=opts.restarts, seed=opts.seed)
    rescored = _expect(w, psi[best:best + 1])[0] + ov - 1.0
    if rescored > obj[best]:
        obj[best] = rescored
    return _pick(obj, iters, done, history, psi, dims)


def _generic_ascent(w, measure: Callable, dims, opts: SolverOptions) -> LegendreResult:
    """Multistart quasi-Newton ascent on the unit sphere with numerical gradients."""
    d = w.shape[0]

    def unpack(x):
        v = x[:d] + 1j * x[d:]
        return v / np.linalg.norm(v)

    def neg(x):
        v = unpack(x)
        return -(np.real(v.conj() @ w @ v) - measure(PureState(dims, v)))

    starts = _random_starts(d, opts, np.linalg.eigh(w)[1][:, -1])
    values, vecs, iters, done = [], [], [], []
    for s in starts:
        res = optimize.minimize(neg, np.concatenate([s.real, s.imag]), method="BFGS",
                                options={"maxiter": opts.max_iters, "gtol": 1e-8})
        v = unpack(res.x)
        values.append(-neg(res.x))
        vecs.append(v)
        iters.append(res.nit)
        done.append(res.success)
    return _pick(np.array(values), np.array(iters), np.array(done),
                 [[x] for x in values], np.array(vecs), dims)


def legendre_roof(w, measure, dims, opts: SolverOptions = SolverOptions()) -> LegendreResult:
    """Conjugate of the convex roof of ``measure`` evaluated at ``W``.

    ``measure`` is an :class:`EntanglementOfFormation`, a
    :class:`GeometricMeasure`, or any callable ``PureState -> float``; the
    last falls back to a generic multistart ascent.
    """
    dims = as_dims(dims)
    w = check_hermitian(w, "witness")
    if w.shape[0] != int(np.prod(dims)):
        raise DimensionError(f"witness shape {w.shape} does not match dims {dims}")
    if isinstance(measure, EntanglementOfFormation):
        return legendre_eof(w, dims, measure.left, dataclasses.replace(opts, base=measure.base))
    if isinstance(measure, GeometricMeasure):
        return legendre_geometric(w, dims, opts)
    return _generic_ascent(w, measure, dims, opts)


def projector_transform_geometric(pw: ProjectorWitness, r: float) -> float:
    """Closed-form ``Ehat_G(r * (alpha * 1 - |chi><chi|))``.

    For ``r > 0`` a product state orthogonal to ``chi`` is optimal, giving
    ``r * alpha``; for ``r < 0`` the optimum lies in the plane spanned by
    ``chi`` and its closest product state.
    """
    if r == 0:
        return 0.0
    if r > 0:
        return r * pw.alpha
    eg = pw.with_eg().eg_chi
    s = 1.0 - r
    # (1-r)^2 + 4 r eg >= (1+r)^2 >= 0 for eg <= 1
    root = np.sqrt(max(s * s + 4.0 * r * eg, 0.0))
    return 0.5 * s + 0.5 * root + r * pw.alpha - 1.0
