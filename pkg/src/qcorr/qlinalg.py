"""Small dense linear algebra for one- and two-qubit operators.

Basis order for two qubits is |00>, |01>, |10>, |11> (Alice first).  A
projective +/-1 measurement along Bloch vector ``n`` has outcome 0 for the
+1 eigenvalue and outcome 1 for the -1 eigenvalue.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .config import TOL

Axis = Literal["x", "y", "z"]

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
for _m in _PAULI.values():
    _m.setflags(write=False)


class InvariantError(ValueError):
    """An object violates a mathematical invariant (hermiticity, norm, ...)."""


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


def as_square(m, dims: tuple[int, ...] = (2, 4)) -> np.ndarray:
    """Return ``m`` as a complex square array of an allowed dimension."""
    a = np.asarray(m.matrix if isinstance(m, DensityMatrix) else m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] not in dims:
        raise DimensionError(f"expected a square matrix of size {dims}, got shape {a.shape}")
    return a


def is_hermitian(m: np.ndarray, atol: float = TOL.matrix_eq) -> bool:
    m = np.asarray(m)
    return bool(np.max(np.abs(m - m.conj().T)) <= atol)


def matrices_close(a, b, atol: float = TOL.matrix_eq) -> bool:
    a, b = as_square(a), as_square(b)
    return a.shape == b.shape and bool(np.max(np.abs(a - b)) <= atol)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite 2x2 or 4x4 matrix."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = as_square(self.matrix)
        if not is_hermitian(m):
            raise InvariantError("density matrix is not Hermitian")
        tr = np.trace(m)
        if abs(tr - 1.0) > TOL.matrix_eq:
            raise InvariantError(f"density matrix trace is {tr.real:.3g}, expected 1")
        lam = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
        if lam[0] < -TOL.psd:
            raise InvariantError(f"density matrix has negative eigenvalue {lam[0]:.3g}")
        object.__setattr__(self, "matrix", _frozen(m))

    @classmethod
    def from_pure(cls, amplitudes) -> DensityMatrix:
        psi = PureState(amplitudes).amplitudes
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int = 4) -> DensityMatrix:
        return cls(np.eye(dim) / dim)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def isclose(self, other, atol: float = TOL.matrix_eq) -> bool:
        return matrices_close(self.matrix, other, atol)


@dataclass(frozen=True, eq=False)
class BlochObservable:
    """A +/-1 valued qubit observable n.sigma given by a unit Bloch vector."""

    bloch: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.bloch, dtype=float).reshape(-1)
        if v.shape != (3,) or not np.all(np.isfinite(v)):
            raise InvariantError(f"Bloch vector must be a finite real 3-vector, got {self.bloch!r}")
        if abs(np.linalg.norm(v) - 1.0) > TOL.unit_norm:
            raise InvariantError(f"Bloch vector has norm {np.linalg.norm(v):.12g}, expected 1")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "bloch", v)

    @classmethod
    def axis(cls, name: Axis) -> BlochObservable:
        return cls(np.eye(3)[_axis_index(name)])

    @classmethod
    def from_direction(cls, v) -> BlochObservable:
        """Normalize an arbitrary non-zero direction."""
        v = np.asarray(v, dtype=float)
        return cls(v / np.linalg.norm(v))

    @classmethod
    def from_angles(cls, theta: float, phi: float = 0.0) -> BlochObservable:
        """Polar angle ``theta`` from +z, azimuth ``phi`` from +x."""
        return cls(
            np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
        )

    @property
    def matrix(self) -> np.ndarray:
        return observable_matrix(self)

    def to_list(self) -> list[float]:
        return [float(x) for x in self.bloch]


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray = field()

    def __post_init__(self) -> None:
        psi = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if psi.shape[0] not in (2, 4):
            raise DimensionError(f"pure state must have 2 or 4 amplitudes, got {psi.shape[0]}")
        if abs(np.linalg.norm(psi) - 1.0) > TOL.unit_norm:
            raise InvariantError(f"state vector has norm {np.linalg.norm(psi):.12g}, expected 1")
        object.__setattr__(self, "amplitudes", _frozen(psi))

    def density(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))


def _axis_index(axis: str) -> int:
    try:
        return "xyz".index(axis)
    except ValueError:
        raise ValueError(f"axis must be one of 'x', 'y', 'z', got {axis!r}") from None


def pauli(axis: Axis) -> np.ndarray:
    """Return the 2x2 Pauli matrix for ``axis`` (a read-only array)."""
    _axis_index(axis)
    return _PAULI[axis]


def observable_matrix(obs: BlochObservable) -> np.ndarray:
    if not isinstance(obs, BlochObservable):
        obs = BlochObservable(obs)
    nx, ny, nz = obs.bloch
    return nx * _PAULI["x"] + ny * _PAULI["y"] + nz * _PAULI["z"]


def projector(obs: BlochObservable, outcome: int) -> np.ndarray:
    """Projector onto the eigenspace of n.sigma with eigenvalue (-1)**outcome."""
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome!r}")
    sign = 1 - 2 * outcome
    return 0.5 * (np.eye(2) + sign * observable_matrix(obs))


def tensor(a, b) -> np.ndarray:
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise DimensionError(f"tensor expects two 2x2 matrices, got {a.shape} and {b.shape}")
    return np.kron(a, b)


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    """Square root of a Hermitian PSD matrix; rounding-level negative eigenvalues are zeroed."""
    lam, vec = np.linalg.eigh(0.5 * (m + m.conj().T))
    lam = np.where(lam > 0, lam, 0.0)
    return (vec * np.sqrt(lam)) @ vec.conj().T


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``.

    Evaluated as the squared trace norm of ``sqrt(rho) @ sqrt(sigma)``, which
    avoids taking square roots of rounding noise when either state is pure.
    """
    r = rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)
    s = sigma if isinstance(sigma, DensityMatrix) else DensityMatrix(sigma)
    if r.dim != s.dim:
        raise DimensionError(f"fidelity of states with dimensions {r.dim} and {s.dim}")
    sv = np.linalg.svd(psd_sqrt(r.matrix) @ psd_sqrt(s.matrix), compute_uv=False)
    return float(min(1.0, max(0.0, np.sum(sv) ** 2)))


def project_to_simplex(values: np.ndarray) -> np.ndarray:
    """Euclidean projection of a real vector onto the probability simplex."""
    v = np.asarray(values, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    k = np.arange(1, v.size + 1)
    rho = np.nonzero(u - (css - 1.0) / k > 0)[0][-1]
    shift = (css[rho] - 1.0) / (rho + 1)
    return np.maximum(v - shift, 0.0)


def nearest_density_matrix(m) -> DensityMatrix:
    """Closest unit-trace PSD matrix to a Hermitian matrix in Frobenius norm.

    Keeps the eigenvectors and projects the eigenvalues onto the probability
    simplex.  For unit-trace input this is the familiar recipe: walk the
    eigenvalues from the most negative upwards, zero them while spreading the
    accumulated deficit evenly over the ones that remain.
    """
    a = as_square(m)
    a = 0.5 * (a + a.conj().T)
    lam, vec = np.linalg.eigh(a)
    mu = project_to_simplex(lam)
    out = (vec * mu) @ vec.conj().T
    out = 0.5 * (out + out.conj().T)
    return DensityMatrix(out / np.real(np.trace(out)))


def random_unit_vector(rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def random_density_matrix(rng: np.random.Generator, dim: int = 4, rank: int | None = None) -> DensityMatrix:
    """Random state from the induced (Ginibre) measure."""
    k = dim if rank is None else rank
    g = rng.standard_normal((dim, k)) + 1j * rng.standard_normal((dim, k))
    m = g @ g.conj().T
    return DensityMatrix(m / np.real(np.trace(m)))


SINGLET = PureState(np.array([0, 1, -1, 0]) / np.sqrt(2))
PSI_PLUS = PureState(np.array([1, 0, 0, 1]) / np.sqrt(2))
