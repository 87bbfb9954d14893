"""Dense complex linear algebra for small multipartite Hilbert spaces.

Conventions used throughout the package:

* states and operators are plain ``numpy`` arrays of dtype ``complex128``;
* ``dims`` is a tuple of per-party dimensions and party 0 is the
  slowest-varying tensor index (``np.kron`` ordering);
* eigenvalues are returned in ascending order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_RTOL = 1e-12
NORM_TOL = 1e-12
DEFAULT_LOG_FLOOR = 1e-15


class DimensionError(ValueError):
    """Raised when party indices or dimensions do not fit together."""


class ConvergenceError(ArithmeticError):
    """Raised when the Jacobi eigensolver exceeds its sweep cap."""

    def __init__(self, message, sweeps=None, off_norm=None):
        super().__init__(message)
        self.sweeps = sweeps
        self.off_norm = off_norm


def as_dims(dims: Iterable[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 2 for d in dims):
        raise DimensionError(f"party dimensions must all be >= 2, got {dims}")
    return dims


def check_hermitian(m, name="operator") -> np.ndarray:
    """Return ``m`` as a complex array, raising if it is not Hermitian."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    scale = 1.0 + (np.abs(m).max() if m.size else 0.0)
    if np.abs(m - m.conj().T).max(initial=0.0) > HERMITIAN_RTOL * scale:
        raise ValueError(f"{name} is not Hermitian")
    return m


def _check_party_set(parties: Iterable[int], n: int, proper=True) -> tuple[int, ...]:
    parties = tuple(sorted(set(int(p) for p in parties)))
    if not parties:
        raise DimensionError("party set must be nonempty")
    if any(p < 0 or p >= n for p in parties):
        raise DimensionError(f"party indices {parties} out of range for {n} parties")
    if proper and len(parties) == n:
        raise DimensionError("party set must be a strict subset of the parties")
    return parties


@dataclass(frozen=True)
class PureState:
    """Unit vector on a tensor-product space with explicit party dimensions."""

    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = as_dims(self.dims)
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != int(np.prod(dims)):
            raise DimensionError(
                f"{amps.size} amplitudes do not match dims {dims}"
            )
        if abs(np.linalg.norm(amps) - 1.0) > NORM_TOL:
            raise ValueError("amplitudes are not normalized")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes, dims) -> "PureState":
        """Build a state, normalizing the given amplitudes first."""
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("zero vector cannot be normalized")
        return cls(tuple(dims), amps / norm)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def expectation(self, op) -> float:
        v = self.amplitudes
        return float(np.real(v.conj() @ (np.asarray(op) @ v)))


@dataclass(frozen=True)
class SchmidtDecomposition:
    """``psi = sum_i coefficients[i] * kron(left_basis[i], right_basis[i])``.

    ``left_basis`` and ``right_basis`` hold the basis vectors as rows.
    """

    coefficients: np.ndarray
    left_basis: np.ndarray
    right_basis: np.ndarray

    def reassemble(self) -> np.ndarray:
        return np.einsum(
            "i,ij,ik->jk", self.coefficients, self.left_basis, self.right_basis
        ).reshape(-1)


def tensor(*ops) -> np.ndarray:
    """Kronecker product, first factor slowest."""
    out = np.asarray(ops[0])
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def permute_parties(vec, dims, order) -> np.ndarray:
    """Reorder the parties of a state vector (or a stack of them)."""
    vec = np.asarray(vec)
    lead = vec.shape[:-1]
    t = vec.reshape(lead + tuple(dims))
    k = len(lead)
    t = t.transpose(tuple(range(k)) + tuple(k + o for o in order))
    return t.reshape(lead + (-1,))


def permute_operator(op, dims, order) -> np.ndarray:
    """Reorder the parties of an operator, consistently with ``permute_parties``."""
    n = len(dims)
    t = np.asarray(op).reshape(tuple(dims) * 2)
    axes = tuple(order) + tuple(n + o for o in order)
    d = int(np.prod(dims))
    return t.transpose(axes).reshape(d, d)


def partial_trace(rho, dims, keep) -> np.ndarray:
    """Reduced operator on the parties in ``keep`` (kept in ascending order).

    Raises
    ------
    DimensionError
        If ``keep`` is empty, contains every party, or has bad indices, or if
        ``dims`` does not match the operator.
    """
    dims = as_dims(dims)
    rho = np.asarray(rho, dtype=complex)
    d = int(np.prod(dims))
    if rho.shape != (d, d):
        raise DimensionError(f"operator shape {rho.shape} does not match dims {dims}")
    keep = _check_party_set(keep, len(dims))
    n = len(dims)
    traced = [p for p in range(n) if p not in keep]
    t = rho.reshape(dims * 2)
    # contract bra and ket index of every traced party
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for p in traced:
        col[p] = row[p]
    out = "".join(row[p] for p in keep) + "".join(col[p] for p in keep)
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    dk = int(np.prod([dims[p] for p in keep]))
    return reduced.reshape(dk, dk)


def reduced_state(psi, dims, keep) -> np.ndarray:
    """Reduced density matrix of a pure state on ``keep``.

    ``psi`` may be a stack of vectors with shape ``(..., prod(dims))``; the
    result then has shape ``(..., dk, dk)``.
    """
    dims = as_dims(dims)
    keep = _check_party_set(keep, len(dims))
    rest = [p for p in range(len(dims)) if p not in keep]
    psi = np.asarray(psi)
    m = permute_parties(psi, dims, list(keep) + rest)
    dk = int(np.prod([dims[p] for p in keep]))
    m = m.reshape(psi.shape[:-1] + (dk, -1))
    return m @ np.swapaxes(m.conj(), -1, -2)


def jacobi_eigh(h, tol=1e-12, max_sweeps=100):
    """Cyclic Jacobi eigensolver for a complex Hermitian matrix.

    Each rotation zeroes one off-diagonal pair ``(p, q)``; sweeps run over
    all pairs until the off-diagonal Frobenius norm drops below
    ``tol * max(1, max|h|)``.

    Returns
    -------
    (eigenvalues, eigenvectors)
        Eigenvalues ascending; eigenvectors as columns.

    Raises
    ------
    ConvergenceError
        If ``max_sweeps`` sweeps do not reach the target.
    """
    a = np.array(h, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(float(np.abs(a).max(initial=0.0)), 1.0)
    off = 0.0
    for sweep in range(max_sweeps + 1):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= tol * scale:
            w = np.real(np.diag(a)).copy()
            order = np.argsort(w, kind="stable")
            return w[order], v[:, order]
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                ph = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(1.0 + theta * theta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * np.conj(ph) * cq
                a[:, q] = s * ph * cp + c * cq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * ph * rq
                a[q, :] = s * np.conj(ph) * rp + c * rq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * np.conj(ph) * vq
                v[:, q] = s * ph * vp + c * vq
    raise ConvergenceError(
        f"Jacobi eigensolver did not converge in {max_sweeps} sweeps "
        f"(off-diagonal norm {off:.3e}, dim {n})",
        sweeps=max_sweeps,
        off_norm=off,
    )


def eig_hermitian(h, method="lapack"):
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns).

    ``method="lapack"`` uses ``numpy.linalg.eigh``; ``method="jacobi"``
    uses :func:`jacobi_eigh`.
    """
    h = check_hermitian(h)
    if method == "jacobi":
        return jacobi_eigh(h)
    if method != "lapack":
        raise ValueError(f"unknown eigensolver {method!r}")
    try:
        return np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"LAPACK eigh failed: {exc}") from exc


def top_eigenpair(h, method="lapack") -> tuple[float, np.ndarray]:
    """Largest eigenvalue and a unit eigenvector for it.

    In a degenerate top eigenspace whichever vector the solver produces is
    returned.
    """
    w, v = eig_hermitian(h, method=method)
    return float(w[-1]), v[:, -1]


def schmidt(psi: PureState, left: Sequence[int]) -> SchmidtDecomposition:
    """Schmidt decomposition of ``psi`` across ``left | rest``."""
    dims = psi.dims
    left = _check_party_set(left, len(dims))
    rest = [p for p in range(len(dims)) if p not in left]
    dl = int(np.prod([dims[p] for p in left]))
    m = permute_parties(psi.amplitudes, dims, list(left) + rest).reshape(dl, -1)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    return SchmidtDecomposition(coefficients=s, left_basis=u.T.copy(), right_basis=vh.copy())


def log_psd(rho, floor=DEFAULT_LOG_FLOOR, base=np.e) -> np.ndarray:
    """Matrix logarithm of a PSD operator with eigenvalues clamped at ``floor``."""
    w, v = np.linalg.eigh(np.asarray(rho, dtype=complex))
    logs = np.log(np.maximum(w, floor)) / np.log(base)
    return (v * logs) @ v.conj().T


def haar_vectors(rng: np.random.Generator, dim: int, count=None) -> np.ndarray:
    """Haar-random unit vectors: normalized i.i.d. complex Gaussians."""
    shape = (dim,) if count is None else (count, dim)
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def random_pure(dims, seed=None) -> PureState:
    """Haar-random pure state; deterministic for a fixed ``seed``."""
    dims = as_dims(dims)
    rng = np.random.default_rng(seed)
    return PureState(dims, haar_vectors(rng, int(np.prod(dims))))


def haar_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (z + z.conj().T) / 2


def random_density(rng: np.random.Generator, dim: int, rank=None) -> np.ndarray:
    rank = dim if rank is None else rank
    z = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = z @ z.conj().T
    return rho / np.trace(rho).real
