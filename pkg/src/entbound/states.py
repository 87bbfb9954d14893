"""Named pure states used by witnesses and problem files."""

import numpy as np

from .qla import PureState, tensor


def basis_state(bits, dims=None) -> PureState:
    """Computational basis state, e.g. ``basis_state("010")``."""
    digits = [int(b) for b in bits]
    dims = tuple(dims) if dims is not None else (2,) * len(digits)
    amps = np.zeros(int(np.prod(dims)), dtype=complex)
    amps[np.ravel_multi_index(digits, dims)] = 1.0
    return PureState(dims, amps)


def w_state(n=3) -> PureState:
    """``(|10...0> + |01...0> + ... + |0...01>) / sqrt(n)`` on ``n`` qubits."""
    amps = np.zeros(2**n, dtype=complex)
    for k in range(n):
        amps[1 << k] = 1.0
    return PureState.from_amplitudes(amps, (2,) * n)


def ghz_state(n=3) -> PureState:
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = amps[-1] = 1.0
    return PureState.from_amplitudes(amps, (2,) * n)


def ghz_y_state(n=3) -> PureState:
    """GHZ state in the Pauli-Y eigenbasis, ``(|y+>^n - |y->^n) / sqrt(2)``.

    For three qubits this equals ``i (sqrt(3)|W> - |111>) / 2``.
    """
    yp = np.array([1.0, 1.0j]) / np.sqrt(2)
    ym = np.array([1.0, -1.0j]) / np.sqrt(2)
    amps = tensor(*[yp] * n) - tensor(*[ym] * n)
    return PureState.from_amplitudes(amps, (2,) * n)


def bell_state() -> PureState:
    return PureState.from_amplitudes([1, 0, 0, 1], (2, 2))


def projector_witness_operator(alpha, chi: PureState) -> np.ndarray:
    """``alpha * 1 - |chi><chi|``."""
    return alpha * np.eye(chi.dim, dtype=complex) - chi.projector()


NAMED = {
    "w": w_state,
    "ghz": ghz_state,
    "ghz_y": ghz_y_state,
}


def named_state(name, n_parties=3) -> PureState:
    if name == "bell":
        return bell_state()
    try:
        return NAMED[name](n_parties)
    except KeyError:
        raise ValueError(f"unknown named state {name!r}") from None
