"""Pure-state entanglement measures.

Two measures are provided: the entanglement entropy across a bipartition
(the pure-state value of the entanglement of formation) and the geometric
measure, ``1 - max |<a b c ...|psi>|^2`` over product states.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .qla import PureState, _check_party_set, haar_vectors, reduced_state, tensor


class LogBase(str, enum.Enum):
    NATURAL = "natural"
    TWO = "two"

    @property
    def ln(self) -> float:
        """Natural log of the base, i.e. the divisor turning nats into this unit."""
        return 1.0 if self is LogBase.NATURAL else float(np.log(2.0))

    @property
    def unit(self) -> str:
        return "nats" if self is LogBase.NATURAL else "bits"


def entropy_of_spectrum(p, base=LogBase.NATURAL) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-(p * np.log(p)).sum() / LogBase(base).ln)


def entropy(rho, base=LogBase.NATURAL) -> float:
    """Von Neumann entropy ``-tr rho log rho`` with ``0 log 0 = 0``."""
    return entropy_of_spectrum(np.linalg.eigvalsh(np.asarray(rho, dtype=complex)), base)


def eof_pure(psi: PureState, left: Sequence[int] = (0,), base=LogBase.NATURAL) -> float:
    """Entropy of the reduced state of ``psi`` on the ``left`` parties."""
    return entropy(reduced_state(psi.amplitudes, psi.dims, left), base)


@dataclass(frozen=True)
class ProductState:
    factors: tuple

    @property
    def dims(self):
        return tuple(f.size for f in self.factors)

    def vector(self) -> np.ndarray:
        return tensor(*self.factors)

    def as_pure_state(self) -> PureState:
        return PureState.from_amplitudes(self.vector(), self.dims)


_LETTERS = "abcdefghijklmnopqrstuvwxy"


def _contract_except(psi_t, factors, k):
    """Contract a stack of state tensors with ``conj(factor_j)`` for all j != k.

    ``psi_t`` has shape ``(batch, d_0, ..., d_{n-1})`` and ``factors[j]`` has
    shape ``(batch, d_j)``; the result has shape ``(batch, d_k)``.
    """
    n = len(factors)
    idx = _LETTERS[:n]
    operands = [psi_t]
    subs = ["z" + idx]
    for j in range(n):
        if j != k:
            operands.append(factors[j].conj())
            subs.append("z" + idx[j])
    return np.einsum(",".join(subs) + "->z" + idx[k], *operands)


def _product_sweep(psi_t, factors):
    """One cycle of parallel-vector updates, in place. Returns overlap^2 after each update."""
    trace = []
    for k in range(len(factors)):
        v = _contract_except(psi_t, factors, k)
        nv = np.linalg.norm(v, axis=-1)
        ok = nv > 0
        factors[k] = np.where(ok[:, None], v / np.where(ok, nv, 1.0)[:, None], factors[k])
        trace.append(nv**2)
    return trace


def product_overlap2(psi_t, factors) -> np.ndarray:
    v = _contract_except(psi_t, factors, 0)
    return np.abs(np.einsum("zi,zi->z", factors[0].conj(), v)) ** 2


def product_ascent(psi: PureState, factors, tol=1e-12, max_cycles=10_000):
    """Closest-product ascent from a single starting product state.

    Each update replaces one party's factor by the normalized contraction of
    ``psi`` with the other factors, which maximizes the overlap in that
    factor. Cycles stop once a full cycle gains less than ``tol``.

    Returns
    -------
    (ProductState, overlap2, history)
        ``history`` lists ``|<phi|psi>|^2`` at the start and after every
        single-party update.
    """
    psi_t = psi.amplitudes.reshape((1,) + psi.dims)
    fs = [np.asarray(f, dtype=complex).reshape(1, -1) / np.linalg.norm(f) for f in factors]
    history = [float(product_overlap2(psi_t, fs)[0])]
    for _ in range(max_cycles):
        start = history[-1]
        history.extend(float(x[0]) for x in _product_sweep(psi_t, fs))
        if history[-1] - start < tol:
            break
    return ProductState(tuple(f[0] for f in fs)), history[-1], history


def _starting_factors(psi: PureState, restarts, seed):
    """Deterministic start from single-party reduced states, then Haar starts."""
    n = psi.n_parties
    starts = [[] for _ in range(n)]
    for k in range(n):
        rho = reduced_state(psi.amplitudes, psi.dims, [k])
        starts[k].append(np.linalg.eigh(rho)[1][:, -1])
    for i in range(restarts):
        rng = np.random.default_rng([seed, i])
        for k in range(n):
            starts[k].append(haar_vectors(rng, psi.dims[k]))
    return [np.array(s) for s in starts]


def closest_product(psi: PureState, restarts=20, tol=1e-12, seed=0, max_cycles=10_000):
    """Product state with the largest overlap with ``psi``.

    All starts (one deterministic plus ``restarts`` Haar-random product
    states) are iterated together until every one of them gains less than
    ``tol`` per cycle.

    Returns
    -------
    (ProductState, overlap2)
    """
    if psi.n_parties < 2:
        raise ValueError("closest_product needs at least two parties")
    fs = _starting_factors(psi, restarts, seed)
    psi_t = np.broadcast_to(psi.amplitudes.reshape((1,) + psi.dims), (fs[0].shape[0],) + psi.dims)
    ov = product_overlap2(psi_t, fs)
    for _ in range(max_cycles):
        prev = ov
        ov = _product_sweep(psi_t, fs)[-1]
        if np.all(ov - prev < tol):
            break
    best = int(np.argmax(ov))
    return ProductState(tuple(f[best] for f in fs)), float(min(ov[best], 1.0))


def geometric_pure(psi: PureState, restarts=20, tol=1e-12, seed=0) -> float:
    """``1 - max |<product|psi>|^2``."""
    _, ov = closest_product(psi, restarts=restarts, tol=tol, seed=seed)
    return max(0.0, 1.0 - ov)


@dataclass(frozen=True)
class EntanglementOfFormation:
    """Entanglement of formation across ``left | rest``."""

    left: tuple = (0,)
    base: LogBase = LogBase.NATURAL

    def __post_init__(self):
        object.__setattr__(self, "left", tuple(sorted(int(p) for p in self.left)))
        object.__setattr__(self, "base", LogBase(self.base))

    def validate(self, dims):
        _check_party_set(self.left, len(dims))

    def __call__(self, psi: PureState) -> float:
        return eof_pure(psi, self.left, self.base)

    def describe(self) -> str:
        return f"entanglement of formation, parties {list(self.left)} | rest, {self.base.unit}"


@dataclass(frozen=True)
class GeometricMeasure:
    restarts: int = 20
    tol: float = 1e-12
    seed: int = field(default=0, compare=False)

    def validate(self, dims):
        if len(dims) < 2:
            raise ValueError("geometric measure needs at least two parties")

    def __call__(self, psi: PureState) -> float:
        return geometric_pure(psi, self.restarts, self.tol, self.seed)

    def describe(self) -> str:
        return "geometric measure"
