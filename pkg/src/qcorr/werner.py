"""Werner states, their Pauli-twirl preparation, and violation thresholds.

``rho_W(p) = p |singlet><singlet| + (1 - p) I/4`` with singlet
``(|01> - |10>)/sqrt2``.  Experimentally the state is prepared as a mixture
of one-sided Pauli conjugations of ``|psi+> = (|00> + |11>)/sqrt2``:

    rho_W = sum_k w_k (I (x) s_k) |psi+><psi+| (I (x) s_k)

Conjugating by ``s_y`` gives the singlet (up to phase), so that term carries
the dominant weight ``(1 + 3p)/4``; ``I``, ``s_x`` and ``s_z`` each get
``(1 - p)/4``.  The printed form of the decomposition in the literature puts
the dominant weight on ``s_x``; :data:`PRINTED_ASSIGNMENT` reproduces that
labelling so tests can show it does not give a Werner state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bounds import classical_bound
from .correlations import joint_distribution
from .qlinalg import PSI_PLUS, SINGLET, DensityMatrix, InvariantError, pauli
from .witnesses import WitnessKind, canonical_settings, condition_for, functional_value

# thresholds that are quoted, not computed here
STEERING_INFINITE_SETTINGS_THRESHOLD = 0.5
BELL_465_SETTINGS_THRESHOLD = 0.7056

# which Pauli conjugation each weight multiplies
CANONICAL_ASSIGNMENT = {"alpha": "y", "beta": "x", "gamma": "i", "delta": "z"}
PRINTED_ASSIGNMENT = {"alpha": "x", "beta": "y", "gamma": "i", "delta": "z"}


@dataclass(frozen=True)
class WernerParams:
    p: float

    def __post_init__(self) -> None:
        _check_p(self.p)


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mixing parameter p must lie in [0, 1], got {p!r}")
    return p


def werner_state(p) -> DensityMatrix:
    p = _check_p(p.p if isinstance(p, WernerParams) else p)
    return DensityMatrix(p * SINGLET.density().matrix + (1 - p) * np.eye(4) / 4)


@dataclass(frozen=True)
class MixtureWeights:
    """Twirl weights; ``alpha`` is the dominant (singlet-producing) term."""

    alpha: float
    beta: float
    gamma: float
    delta: float
    normalized: bool = True

    def __post_init__(self) -> None:
        w = self.as_tuple()
        if min(w) < 0:
            raise InvariantError(f"mixture weights must be non-negative, got {w}")
        if self.normalized and abs(sum(w) - 1.0) > 1e-12:
            raise InvariantError(f"normalized weights sum to {sum(w)!r}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.alpha, self.beta, self.gamma, self.delta)

    def normalize(self) -> MixtureWeights:
        total = sum(self.as_tuple())
        if total <= 0:
            raise InvariantError("weights sum to zero")
        return MixtureWeights(*(w / total for w in self.as_tuple()), normalized=True)

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma, "delta": self.delta}


def weights_for_p(p: float) -> MixtureWeights:
    p = _check_p(p)
    rest = (1 - p) / 4
    return MixtureWeights((1 + 3 * p) / 4, rest, rest, rest)


# integer mixing counts used in the experiment: p -> (alpha, beta), beta = gamma = delta
_INTEGER_TABLE = {
    0.0: (5, 5),
    0.2: (8, 4),
    0.4: (11, 3),
    0.6: (14, 2),
    0.8: (17, 1),
    1.0: (20, 0),
}


def integer_weight_table() -> dict[float, tuple[int, int]]:
    return dict(_INTEGER_TABLE)


def integer_row(p: float) -> tuple[int, int] | None:
    """Integer row for one of the tabulated p values, else ``None``."""
    for key, row in _INTEGER_TABLE.items():
        if abs(key - p) < 1e-12:
            return row
    return None


def integer_row_weights(row: tuple[int, int]) -> MixtureWeights:
    a, b = row
    total = Fraction(a + 3 * b)
    return MixtureWeights(float(a / total), float(b / total), float(b / total), float(b / total))


def _conjugator(label: str) -> np.ndarray:
    local = np.eye(2) if label == "i" else pauli(label)
    return np.kron(np.eye(2), local)


def twirl_mixture_state(weights: MixtureWeights, assignment: dict[str, str] = CANONICAL_ASSIGNMENT) -> DensityMatrix:
    """``sum_k w_k (I (x) s_k) rho_psi+ (I (x) s_k)``."""
    if not weights.normalized:
        raise InvariantError("twirl mixture needs normalized weights; call normalize() first")
    if abs(sum(weights.as_tuple()) - 1.0) > 1e-12:
        raise InvariantError("weights do not sum to 1")
    base = PSI_PLUS.density().matrix
    out = np.zeros((4, 4), dtype=complex)
    for name, w in weights.to_dict().items():
        u = _conjugator(assignment[name])
        out += w * (u @ base @ u.conj().T)
    return DensityMatrix(out)


def decomposition_deviation(p: float, assignment: dict[str, str] = CANONICAL_ASSIGNMENT) -> float:
    """Max entrywise |rho_W(p) - twirl mixture(p)|."""
    diff = werner_state(p).matrix - twirl_mixture_state(weights_for_p(p), assignment).matrix
    return float(np.max(np.abs(diff)))


# -- functionals on the Werner family --------------------------------------------


def witness_value_of_p(kind, n: int | None, p: float) -> float:
    """Functional value on ``rho_W(p)`` with the kind's canonical settings."""
    tensor = condition_for(kind, n)
    settings = canonical_settings(tensor.kind, tensor.n)
    return functional_value(tensor, joint_distribution(werner_state(p), settings))


def closed_form_value(kind, n: int, p: float) -> float:
    kind = WitnessKind.parse(kind)
    if kind is WitnessKind.ENTANGLEMENT:
        return n * (1 + p) / 2
    if kind is WitnessKind.STEERING:
        return n * p
    if kind is WitnessKind.BELL_CHSH:
        return 2 * math.sqrt(2) * p
    if kind is WitnessKind.BELL_3322:
        return 5 * p
    raise ValueError(f"no closed form for {kind}")


def violation_threshold(kind, n: int | None = None, tol: float = 1e-6, bound: float | None = None) -> float | None:
    """Smallest p at which the functional on ``rho_W(p)`` exceeds its classical bound.

    Bisection on [0, 1]; the returned p violates and lies within ``tol`` of
    the crossing.  Returns ``None`` when nothing in [0, 1] violates.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    tensor = condition_for(kind, n)
    c = classical_bound(tensor.kind, tensor.n) if bound is None else bound

    def excess(p: float) -> float:
        return witness_value_of_p(tensor.kind, tensor.n, p) - c

    f0, fh, f1 = excess(0.0), excess(0.5), excess(1.0)
    if abs(fh - 0.5 * (f0 + f1)) > 1e-9 or f1 < f0:
        raise ValueError(f"{tensor.kind.value} functional is not affine increasing on the Werner family")
    if f1 <= 0:
        return None
    if f0 > 0:
        return 0.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0:
            hi = mid
        else:
            lo = mid
    return hi
