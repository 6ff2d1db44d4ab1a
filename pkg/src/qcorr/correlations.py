"""Joint outcome distributions P(a, b | i, j) of two-qubit states.

Tables are stored densely as float arrays of shape ``(n, n, 2, 2)`` indexed
``[i, j, a, b]``: Alice's setting, Bob's setting, Alice's outcome, Bob's
outcome.  The JSON form keeps that nesting.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import TOL
from .qlinalg import BlochObservable, DensityMatrix, DimensionError, InvariantError, pauli, projector

_SIGNS = np.array([1.0, -1.0])


@dataclass(frozen=True)
class SettingPair:
    """Alice's and Bob's ordered lists of measurement settings."""

    alice: tuple[BlochObservable, ...]
    bob: tuple[BlochObservable, ...]

    def __post_init__(self) -> None:
        alice = tuple(o if isinstance(o, BlochObservable) else BlochObservable(o) for o in self.alice)
        bob = tuple(o if isinstance(o, BlochObservable) else BlochObservable(o) for o in self.bob)
        if len(alice) < 1 or len(alice) != len(bob):
            raise ValueError(f"need equal, non-zero setting counts, got {len(alice)} and {len(bob)}")
        object.__setattr__(self, "alice", alice)
        object.__setattr__(self, "bob", bob)

    @property
    def n(self) -> int:
        return len(self.alice)

    @classmethod
    def same_axes(cls, axes: Sequence[str]) -> SettingPair:
        obs = tuple(BlochObservable.axis(a) for a in axes)
        return cls(obs, obs)

    def alice_vectors(self) -> np.ndarray:
        return np.array([o.bloch for o in self.alice])

    def bob_vectors(self) -> np.ndarray:
        return np.array([o.bloch for o in self.bob])

    def to_dict(self) -> dict:
        return {"alice": [o.to_list() for o in self.alice], "bob": [o.to_list() for o in self.bob]}


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Probability table P(a, b | i, j), indexed ``table[i, j, a, b]``."""

    table: np.ndarray

    def __post_init__(self) -> None:
        t = np.array(self.table, dtype=float, copy=True)
        if t.ndim != 4 or t.shape[0] != t.shape[1] or t.shape[2:] != (2, 2) or t.shape[0] < 1:
            raise DimensionError(f"table must have shape (n, n, 2, 2), got {t.shape}")
        if np.any(t < -TOL.probability_clamp) or np.any(t > 1 + TOL.normalization):
            raise InvariantError("probabilities must lie in [0, 1]")
        t = np.clip(t, 0.0, 1.0)
        if np.max(np.abs(t.sum(axis=(2, 3)) - 1.0)) > TOL.normalization:
            raise InvariantError("each (i, j) block must sum to 1")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def n(self) -> int:
        return self.table.shape[0]

    def alice_marginals(self) -> np.ndarray:
        """``[i, j, a]`` -> sum over b."""
        return self.table.sum(axis=3)

    def bob_marginals(self) -> np.ndarray:
        """``[i, j, b]`` -> sum over a."""
        return self.table.sum(axis=2)

    def signalling_gap(self) -> float:
        """Largest dependence of either party's marginal on the partner's setting."""
        ma, mb = self.alice_marginals(), self.bob_marginals()
        gap_a = np.max(np.abs(ma - ma[:, :1, :]))
        gap_b = np.max(np.abs(mb - mb[:1, :, :]))
        return float(max(gap_a, gap_b))

    def to_dict(self) -> dict:
        return {"n": self.n, "index_order": ["i", "j", "a", "b"], "table": self.table.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> JointDistribution:
        return cls(np.asarray(data["table"], dtype=float))


def joint_distribution(state: DensityMatrix, settings: SettingPair) -> JointDistribution:
    """Born-rule table ``Tr[(Pi^{A_i}_a (x) Pi^{B_j}_b) rho]`` for every setting pair."""
    rho = state.matrix if isinstance(state, DensityMatrix) else np.asarray(state, dtype=complex)
    if rho.shape != (4, 4):
        raise DimensionError(f"joint distribution needs a 4x4 state, got {rho.shape}")
    n = settings.n
    pa = np.array([[projector(o, a) for a in (0, 1)] for o in settings.alice])
    pb = np.array([[projector(o, b) for b in (0, 1)] for o in settings.bob])
    r = rho.reshape(2, 2, 2, 2)  # [a_row, b_row, a_col, b_col]
    # Tr[(X (x) Y) rho] = sum X[p, q] Y[r, s] rho[q, s, p, r]
    raw = np.einsum("ikpq,jlrs,qspr->ijkl", pa, pb, r)
    if np.max(np.abs(raw.imag)) > TOL.imag_trace:
        raise InvariantError(
            f"Born probabilities have imaginary part {np.max(np.abs(raw.imag)):.3g}; is the state Hermitian?"
        )
    table = raw.real
    table = np.where((table < 0) & (table >= -TOL.probability_clamp), 0.0, table)
    assert table.shape == (n, n, 2, 2)
    return JointDistribution(table)


def _check_index(dist: JointDistribution, *idx: int) -> None:
    for k in idx:
        if not 0 <= k < dist.n:
            raise IndexError(f"setting index {k} out of range for n={dist.n}")


def expectation(dist: JointDistribution, i: int, j: int) -> float:
    """Correlator <A_i B_j> = sum_{a,b} (-1)^(a+b) P(a, b | i, j)."""
    _check_index(dist, i, j)
    return float(_SIGNS @ dist.table[i, j] @ _SIGNS)


def anti_corr_prob(dist: JointDistribution, i: int) -> float:
    """Probability of different outcomes, P(0,1|i,i) + P(1,0|i,i)."""
    _check_index(dist, i)
    block = dist.table[i, i]
    return float(block[0, 1] + block[1, 0])


def same_prob(dist: JointDistribution, i: int) -> float:
    _check_index(dist, i)
    block = dist.table[i, i]
    return float(block[0, 0] + block[1, 1])


def bloch_decomposition(state: DensityMatrix) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Local Bloch vectors and correlation matrix of a two-qubit state.

    Returns ``(m_a, m_b, T)`` with ``m_a[k] = Tr[rho s_k (x) I]``,
    ``m_b[l] = Tr[rho I (x) s_l]`` and ``T[k, l] = Tr[rho s_k (x) s_l]``, so
    that ``P(a,b|i,j) = (1 + s_a m_a.x_i + s_b m_b.y_j + s_a s_b x_i.T.y_j) / 4``.
    """
    rho = state.matrix if isinstance(state, DensityMatrix) else np.asarray(state, dtype=complex)
    paulis = [pauli(a) for a in "xyz"]
    eye = np.eye(2)
    m_a = np.array([np.trace(rho @ np.kron(s, eye)).real for s in paulis])
    m_b = np.array([np.trace(rho @ np.kron(eye, s)).real for s in paulis])
    t = np.array([[np.trace(rho @ np.kron(s, u)).real for u in paulis] for s in paulis])
    return m_a, m_b, t
