"""Local-uncertainty functionals F = sum V(a,b|i,j) P(a,b|i,j) and their entropy degree.

Four condition tensors are built in:

``ENTANGLEMENT``
    weight 1 on anti-correlated outcomes for equal settings, so F is the sum
    of anti-correlation probabilities.
``STEERING``
    ``(-1)^(a+b)`` for equal settings; evaluated as ``sum_i |<A_i B_i>|``.
``BELL_CHSH``
    ``(-1)^(a+b+ij)``; evaluated as the absolute value of the sum.
``BELL_3322``
    three-setting inequality with local marginal terms; evaluated signed.

Tensors are linear objects.  Absolute values are applied by :func:`functional_value`
according to the tensor's kind.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import TOL
from .correlations import JointDistribution, SettingPair, bloch_decomposition
from .qlinalg import SINGLET, BlochObservable, DensityMatrix, DimensionError

_S = np.array([1.0, -1.0])


class WitnessKind(str, enum.Enum):
    ENTANGLEMENT = "entanglement"
    STEERING = "steering"
    BELL_CHSH = "chsh"
    BELL_3322 = "bell3322"
    CUSTOM = "custom"

    @classmethod
    def parse(cls, value) -> WitnessKind:
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            names = ", ".join(k.value for k in cls if k is not cls.CUSTOM)
            raise ValueError(f"unknown witness kind {value!r}; expected one of {names}") from None


@dataclass(frozen=True, eq=False)
class ConditionTensor:
    """Weights V(a, b | i, j) stored as ``v[i, j, a, b]``.

    ``cbits`` is the classical communication Bob spends asking Alice for help
    (two decimals, as usually quoted); it is metadata only.
    """

    v: np.ndarray
    kind: WitnessKind = WitnessKind.CUSTOM
    cbits: float = 0.0

    def __post_init__(self) -> None:
        v = np.array(self.v, dtype=float, copy=True)
        if v.ndim != 4 or v.shape[0] != v.shape[1] or v.shape[2:] != (2, 2):
            raise DimensionError(f"condition tensor must have shape (n, n, 2, 2), got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("condition tensor entries must be finite")
        if self.cbits < 0:
            raise ValueError("cbits must be non-negative")
        v.setflags(write=False)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "kind", WitnessKind.parse(self.kind))

    @property
    def n(self) -> int:
        return self.v.shape[0]

    def algebraic_max(self) -> float:
        """Largest value over arbitrary (even signalling) probability tables."""
        v = self.v.reshape(self.n, self.n, 4)
        if self.kind is WitnessKind.STEERING:
            return float(np.sum(np.max(np.abs(v), axis=2).diagonal()))
        hi = float(np.sum(v.max(axis=2)))
        if self.kind is WitnessKind.BELL_CHSH:
            return max(hi, -float(np.sum(v.min(axis=2))))
        return hi


def _check_n(n: int) -> None:
    if n not in (2, 3):
        raise ValueError(f"built-in conditions support n in {{2, 3}}, got {n!r}")


def condition_entanglement(n: int) -> ConditionTensor:
    _check_n(n)
    v = np.zeros((n, n, 2, 2))
    for i in range(n):
        v[i, i, 0, 1] = v[i, i, 1, 0] = 1.0
    # Bob names one of 2n (outcome, setting) pairs
    return ConditionTensor(v, WitnessKind.ENTANGLEMENT, round(math.log2(2 * n), 2))


def condition_steering(n: int) -> ConditionTensor:
    _check_n(n)
    v = np.zeros((n, n, 2, 2))
    for i in range(n):
        v[i, i] = np.outer(_S, _S)
    return ConditionTensor(v, WitnessKind.STEERING, round(math.log2(n), 2))


def condition_chsh() -> ConditionTensor:
    v = np.empty((2, 2, 2, 2))
    for i, j, a, b in np.ndindex(2, 2, 2, 2):
        v[i, j, a, b] = (-1.0) ** (a + b + i * j)
    return ConditionTensor(v, WitnessKind.BELL_CHSH, 0.0)


# correlator coefficients of the three-setting inequality, rows = Alice
_C3322 = np.array([[1.0, 1.0, 1.0], [1.0, 1.0, -1.0], [1.0, -1.0, 0.0]])
_ALICE_MARGINAL_3322 = np.array([1.0, 1.0, 0.0])
_BOB_MARGINAL_3322 = np.array([-1.0, -1.0, 0.0])


def condition_bell3322() -> ConditionTensor:
    """Three-setting Bell condition; classical maximum 4.

    F = <A0(I + B0 + B1 + B2)> + <A1(I + B0 + B1 - B2)> + <A2(B0 - B1)>
        - <B0> - <B1>

    A single-party term such as ``<A_i>`` equals ``sum_{a,b} (-1)^a P(a,b|i,j)``
    for every ``j``, so it is spread as weight ``1/n`` over the partner's
    settings.  This keeps the functional a plain sum over the table.
    """
    n = 3
    v = np.empty((n, n, 2, 2))
    for i, j, a, b in np.ndindex(n, n, 2, 2):
        v[i, j, a, b] = (
            _C3322[i, j] * _S[a] * _S[b]
            + _ALICE_MARGINAL_3322[i] * _S[a] / n
            + _BOB_MARGINAL_3322[j] * _S[b] / n
        )
    return ConditionTensor(v, WitnessKind.BELL_3322, 0.0)


def condition_for(kind, n: int | None = None) -> ConditionTensor:
    kind = WitnessKind.parse(kind)
    if kind is WitnessKind.ENTANGLEMENT:
        return condition_entanglement(3 if n is None else n)
    if kind is WitnessKind.STEERING:
        return condition_steering(3 if n is None else n)
    if kind is WitnessKind.BELL_CHSH:
        if n not in (None, 2):
            raise ValueError("the CHSH condition has n = 2")
        return condition_chsh()
    if kind is WitnessKind.BELL_3322:
        if n not in (None, 3):
            raise ValueError("the 3322 condition has n = 3")
        return condition_bell3322()
    raise ValueError("custom conditions have no built-in tensor")


def _linear_value(tensor: ConditionTensor, table: np.ndarray) -> float:
    return float(np.sum(tensor.v * table))


def functional_value(tensor: ConditionTensor, table) -> float:
    """Value of the functional on a probability table, with the kind's absolute-value rule."""
    t = table.table if isinstance(table, JointDistribution) else np.asarray(table, dtype=float)
    if t.shape != tensor.v.shape:
        raise DimensionError(f"tensor shape {tensor.v.shape} does not match table shape {t.shape}")
    if tensor.kind is WitnessKind.STEERING:
        per_setting = np.einsum("iiab,iiab->i", tensor.v, t)
        return float(np.sum(np.abs(per_setting)))
    value = _linear_value(tensor, t)
    if tensor.kind is WitnessKind.BELL_CHSH:
        return abs(value)
    return value


def binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return float(-x * math.log2(x) - (1 - x) * math.log2(1 - x))


def entropy_degree(value: float, algebraic_max: float) -> tuple[float, float]:
    """Normalized value ``|value| / algebraic_max`` and its binary Shannon entropy."""
    if algebraic_max <= 0:
        raise ValueError(f"algebraic maximum must be positive, got {algebraic_max!r}")
    p = abs(value) / algebraic_max
    if p > 1 + TOL.normalization:
        raise ValueError(f"value {value!r} exceeds the algebraic maximum {algebraic_max!r}")
    p = min(p, 1.0)
    return p, binary_entropy(p)


@dataclass(frozen=True)
class WitnessResult:
    value: float
    bound: float
    violated: bool
    normalized: float
    entropy: float
    algebraic_max: float
    kind: str
    n: int

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "bound": self.bound,
            "violated": self.violated,
            "normalized": self.normalized,
            "entropy": self.entropy,
            "algebraic_max": self.algebraic_max,
            "kind": self.kind,
            "n": self.n,
        }


def evaluate(
    tensor: ConditionTensor,
    dist: JointDistribution,
    bound: float,
    algebraic_max: float | None = None,
) -> WitnessResult:
    if tensor.n != dist.n:
        raise DimensionError(f"tensor has n={tensor.n} but distribution has n={dist.n}")
    amax = tensor.algebraic_max() if algebraic_max is None else float(algebraic_max)
    value = functional_value(tensor, dist)
    normalized, entropy = entropy_degree(value, amax)
    return WitnessResult(
        value=value,
        bound=float(bound),
        violated=bool(value > bound + TOL.violation),
        normalized=normalized,
        entropy=entropy,
        algebraic_max=amax,
        kind=tensor.kind.value,
        n=tensor.n,
    )


# -- best responses -----------------------------------------------------------


def _reduced_weights(tensor: ConditionTensor) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    v = tensor.v
    w0 = v.sum(axis=(2, 3))
    wa = np.einsum("ijab,a->ij", v, _S)
    wb = np.einsum("ijab,b->ij", v, _S)
    wab = np.einsum("ijab,a,b->ij", v, _S, _S)
    return w0, wa, wb, wab


def linear_value_from_bloch(
    tensor: ConditionTensor, state: DensityMatrix, alice: np.ndarray, bob: np.ndarray
) -> float:
    """Signed linear form sum V.P computed from Bloch data (no absolute values)."""
    m_a, m_b, t = bloch_decomposition(state)
    w0, wa, wb, wab = _reduced_weights(tensor)
    val = w0.sum() + np.sum(wa * (alice @ m_a)[:, None]) + np.sum(wb * (bob @ m_b)[None, :])
    val += np.sum(wab * (alice @ t @ bob.T))
    return float(val / 4.0)


def best_response(
    tensor: ConditionTensor,
    state: DensityMatrix,
    fixed: np.ndarray,
    party: str,
    current: np.ndarray | None = None,
) -> np.ndarray:
    """Optimal unit Bloch vectors for one party, the other party's vectors fixed.

    The signed linear form is affine in each of the free party's Bloch vectors,
    ``const + sum_i x_i . g_i``, so each optimum is ``g_i / |g_i|``.  A
    vanishing ``g_i`` keeps the corresponding entry of ``current`` (or +z).
    """
    m_a, m_b, t = bloch_decomposition(state)
    _, wa, wb, wab = _reduced_weights(tensor)
    fixed = np.asarray(fixed, dtype=float)
    if party == "alice":
        g = wa.sum(axis=1)[:, None] * m_a[None, :] + wab @ (fixed @ t.T)
    elif party == "bob":
        g = wb.sum(axis=0)[:, None] * m_b[None, :] + wab.T @ (fixed @ t)
    else:
        raise ValueError(f"party must be 'alice' or 'bob', got {party!r}")
    norms = np.linalg.norm(g, axis=1)
    out = np.empty_like(g)
    fallback = np.tile([0.0, 0.0, 1.0], (g.shape[0], 1)) if current is None else np.asarray(current, dtype=float)
    for k in range(g.shape[0]):
        out[k] = g[k] / norms[k] if norms[k] > 1e-14 else fallback[k]
    return out


# -- canonical settings -------------------------------------------------------

_BOB_3322 = (
    np.array([0.0, 0.0, 1.0]),
    np.array([math.sin(math.pi / 3), 0.0, math.cos(math.pi / 3)]),
    np.array([math.sin(2 * math.pi / 3), 0.0, math.cos(2 * math.pi / 3)]),
)


@lru_cache(maxsize=None)
def _alice_3322() -> tuple[tuple[float, float, float], ...]:
    # Bob's set is fixed; Alice's vectors come from one best-response step on
    # the singlet, which is the see-saw fixed point for this Bob set.
    bob = np.array(_BOB_3322)
    alice = best_response(condition_bell3322(), SINGLET.density(), bob, "alice")
    return tuple(tuple(float(x) for x in row) for row in alice)


def canonical_settings(kind, n: int | None = None) -> SettingPair:
    """Default measurement settings for each built-in functional.

    Entanglement and steering measure the same Pauli axes on both sides:
    ``(x, z)`` for n = 2 and ``(x, y, z)`` for n = 3.  CHSH uses
    A = (z, x), B = ((z + x)/sqrt2, (z - x)/sqrt2).  The 3322 functional uses
    Bob's directions at 0, 60 and 120 degrees in the x-z plane and Alice's
    directions optimized against them on the singlet.
    """
    kind = WitnessKind.parse(kind)
    if kind in (WitnessKind.ENTANGLEMENT, WitnessKind.STEERING):
        n = 3 if n is None else n
        _check_n(n)
        return SettingPair.same_axes(("x", "z") if n == 2 else ("x", "y", "z"))
    if kind is WitnessKind.BELL_CHSH:
        if n not in (None, 2):
            raise ValueError("CHSH uses n = 2")
        r = 1 / math.sqrt(2)
        alice = (BlochObservable.axis("z"), BlochObservable.axis("x"))
        bob = (BlochObservable([r, 0.0, r]), BlochObservable([-r, 0.0, r]))
        return SettingPair(alice, bob)
    if kind is WitnessKind.BELL_3322:
        if n not in (None, 3):
            raise ValueError("the 3322 functional uses n = 3")
        alice = tuple(BlochObservable.from_direction(v) for v in _alice_3322())
        bob = tuple(BlochObservable.from_direction(v) for v in _BOB_3322)
        return SettingPair(alice, bob)
    raise ValueError("custom kinds have no canonical settings")
