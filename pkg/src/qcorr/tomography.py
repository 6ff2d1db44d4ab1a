"""Simulated over-complete two-qubit state tomography.

Each side measures the three Pauli axes, giving 9 setting pairs and 36 joint
projectors.  Counts are sampled from the Born rule, the 15 Pauli correlators
are estimated (single-qubit terms averaged over the partner's three
settings), the state is rebuilt by linear inversion and then projected onto
the physical states.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .correlations import SettingPair, joint_distribution
from .qlinalg import DensityMatrix, PureState, fidelity, nearest_density_matrix, pauli

AXES = ("x", "y", "z")
Mode = Literal["multinomial", "poisson", "analytic"]

_S = np.array([1.0, -1.0])
_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(base_seed: int, index: int) -> int:
    """Seed for repetition ``index``: ``splitmix64(splitmix64(base) ^ index)``."""
    return splitmix64(splitmix64(base_seed & _MASK64) ^ (index & _MASK64))


@dataclass(frozen=True)
class TomographySpec:
    shots_per_setting: int = 10_000
    seed: int = 0
    mode: Mode = "multinomial"

    def __post_init__(self) -> None:
        if self.mode not in ("multinomial", "poisson", "analytic"):
            raise ValueError(f"unknown sampling mode {self.mode!r}")
        if self.mode != "analytic" and self.shots_per_setting < 1:
            raise ValueError("shots_per_setting must be positive")

    @property
    def settings(self) -> SettingPair:
        return SettingPair.same_axes(AXES)

    @staticmethod
    def joint_projectors() -> list[tuple[str, int, str, int]]:
        """The 36 (axis_A, outcome_A, axis_B, outcome_B) combinations."""
        return [(ka, a, kb, b) for ka in AXES for a in (0, 1) for kb in AXES for b in (0, 1)]


@dataclass(frozen=True, eq=False)
class CountRecord:
    """Counts indexed ``[setting_i, setting_j, a, b]`` over the Pauli axes x, y, z.

    In analytic mode the entries are the exact Born probabilities.
    """

    counts: np.ndarray
    shots_per_setting: int
    mode: Mode = "multinomial"

    def __post_init__(self) -> None:
        c = np.array(self.counts, dtype=float if self.mode == "analytic" else np.int64, copy=True)
        if c.shape != (3, 3, 2, 2):
            raise ValueError(f"counts must have shape (3, 3, 2, 2), got {c.shape}")
        if np.any(c < 0):
            raise ValueError("counts must be non-negative")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    def frequencies(self) -> np.ndarray:
        totals = self.counts.sum(axis=(2, 3), keepdims=True).astype(float)
        if np.any(totals <= 0):
            raise ValueError("every setting pair needs at least one count")
        return self.counts / totals

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["setting_i", "setting_j", "a", "b", "count"])
        for i, j, a, b in np.ndindex(3, 3, 2, 2):
            value = self.counts[i, j, a, b]
            w.writerow([AXES[i], AXES[j], a, b, repr(float(value)) if self.mode == "analytic" else int(value)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, shots_per_setting: int = 0, mode: Mode = "multinomial") -> CountRecord:
        counts = np.full((3, 3, 2, 2), np.nan)
        for row in csv.DictReader(io.StringIO(text)):
            i, j = AXES.index(row["setting_i"]), AXES.index(row["setting_j"])
            counts[i, j, int(row["a"]), int(row["b"])] = float(row["count"])
        if np.isnan(counts).any():
            raise ValueError("CSV does not cover all 9 setting pairs and 4 outcomes")
        return cls(counts, shots_per_setting, mode)


def born_table(state: DensityMatrix) -> np.ndarray:
    return joint_distribution(state, SettingPair.same_axes(AXES)).table


def simulate_counts(state: DensityMatrix, spec: TomographySpec, rng: np.random.Generator | None = None) -> CountRecord:
    probs = born_table(state)
    if spec.mode == "analytic":
        return CountRecord(probs, spec.shots_per_setting, "analytic")
    if spec.shots_per_setting < 1:
        raise ValueError("shots_per_setting must be positive")
    rng = np.random.default_rng(spec.seed) if rng is None else rng
    flat = probs.reshape(9, 4)
    flat = flat / flat.sum(axis=1, keepdims=True)
    if spec.mode == "multinomial":
        counts = np.array([rng.multinomial(spec.shots_per_setting, row) for row in flat])
    else:
        counts = rng.poisson(spec.shots_per_setting * flat)
    return CountRecord(counts.reshape(3, 3, 2, 2), spec.shots_per_setting, spec.mode)


def pauli_estimates(counts: CountRecord) -> dict[str, np.ndarray]:
    """Correlator and marginal estimates, keeping the redundant copies.

    Returns ``correlators[k, l]`` for <s_k (x) s_l>, and ``alice[k, l]`` /
    ``bob[k, l]`` for <s_k (x) I> and <I (x) s_l> estimated from setting pair (k, l).
    """
    f = counts.frequencies()
    return {
        "correlators": np.einsum("klab,a,b->kl", f, _S, _S),
        "alice": np.einsum("klab,a->kl", f, _S),
        "bob": np.einsum("klab,b->kl", f, _S),
    }


def pauli_expectations(counts: CountRecord) -> np.ndarray:
    """``E[mu, nu] = <s_mu (x) s_nu>`` with index 0 the identity."""
    est = pauli_estimates(counts)
    e = np.zeros((4, 4))
    e[0, 0] = 1.0
    e[1:, 1:] = est["correlators"]
    e[1:, 0] = est["alice"].mean(axis=1)
    e[0, 1:] = est["bob"].mean(axis=0)
    return e


@dataclass(frozen=True, eq=False)
class ReconstructionResult:
    rho_linear: np.ndarray
    rho_physical: DensityMatrix
    fidelity_to_target: float | None = None
    fidelity_std: float | None = None
    fidelities: tuple[float, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        def split(m: np.ndarray) -> dict:
            return {"real": np.real(m).tolist(), "imag": np.imag(m).tolist()}

        return {
            "rho_linear": split(self.rho_linear),
            "rho_physical": split(self.rho_physical.matrix),
            "fidelity_to_target": self.fidelity_to_target,
            "fidelity_std": self.fidelity_std,
            "fidelities": list(self.fidelities),
        }


def reconstruct(counts: CountRecord) -> ReconstructionResult:
    """Linear inversion ``rho = (1/4) sum E[mu,nu] s_mu (x) s_nu`` followed by PSD projection."""
    e = pauli_expectations(counts)
    basis = [np.eye(2)] + [pauli(a) for a in AXES]
    rho = np.zeros((4, 4), dtype=complex)
    for mu in range(4):
        for nu in range(4):
            rho += e[mu, nu] * np.kron(basis[mu], basis[nu])
    rho /= 4
    return ReconstructionResult(rho_linear=rho, rho_physical=nearest_density_matrix(rho))


def depolarized_state(target: PureState, target_fidelity: float) -> DensityMatrix:
    """``q |t><t| + (1 - q) I/4`` with fidelity ``target_fidelity`` to ``|t>``."""
    d = target.amplitudes.shape[0]
    if not 1 / d <= target_fidelity <= 1:
        raise ValueError(f"fidelity must lie in [1/{d}, 1], got {target_fidelity!r}")
    q = (d * target_fidelity - 1) / (d - 1)
    return DensityMatrix(q * target.density().matrix + (1 - q) * np.eye(d) / d)


def fidelity_experiment(
    state: DensityMatrix, target: PureState, spec: TomographySpec, repetitions: int = 20
) -> ReconstructionResult:
    """Repeat sampling and reconstruction; report mean and sample std of the fidelity.

    Repetition ``r`` draws from ``default_rng(derive_seed(spec.seed, r))``.  The
    returned matrices are the averages over repetitions.
    """
    if repetitions < 2:
        raise ValueError("need at least two repetitions for a standard deviation")
    target_rho = target.density()
    fids, linear, physical = [], [], []
    for r in range(repetitions):
        rng = np.random.default_rng(derive_seed(spec.seed, r))
        rec = reconstruct(simulate_counts(state, spec, rng))
        fids.append(fidelity(rec.rho_physical, target_rho))
        linear.append(rec.rho_linear)
        physical.append(rec.rho_physical.matrix)
    mean_phys = np.mean(physical, axis=0)
    return ReconstructionResult(
        rho_linear=np.mean(linear, axis=0),
        rho_physical=DensityMatrix(0.5 * (mean_phys + mean_phys.conj().T)),
        fidelity_to_target=float(np.mean(fids)),
        fidelity_std=float(np.std(fids, ddof=1)),
        fidelities=tuple(fids),
    )
