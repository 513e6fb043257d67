from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, List, Optional, Tuple, Any

import numpy as np


class AlgebraFamily(str, Enum):
    SL = "sl"
    SO = "so"
    SP = "sp"
    GL = "gl"
    ISO = "iso"
    AFF = "aff"
    ABELIAN = "abelian"
    CUSTOM = "custom"


class ConeLabel(str, Enum):
    TRIVIAL = "trivial"
    SL2_STANDARD = "sl2-standard"
    POINCARE_FORWARD = "poincare-forward"
    POINCARE_SPACELIKE = "poincare-spacelike"
    CUSTOM = "custom"


class OrderStatus(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INDETERMINATE = "indeterminate"


class CovarianceVerdict(str, Enum):
    COMPATIBLE = "covariant-compatible"
    VIOLATED = "violated"


# Lie algebra substrate

@dataclass(frozen=True, eq=False)
class LieAlgebra:
    name: str
    matrix_size: int
    basis: np.ndarray  # (n, d, d)
    structure_constants: np.ndarray  # (n, n, n), [x_i, x_j] = sum_k c[i, j, k] x_k
    tolerance: float = 1e-10
    family: AlgebraFamily = AlgebraFamily.CUSTOM
    params: Dict[str, int] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def element(self, coords) -> "AlgebraElement":
        coords = np.asarray(coords, dtype=float)
        if coords.shape != (self.dim,):
            raise ValueError(f"Expected {self.dim} coordinates for {self.name}, got shape {coords.shape}")
        return AlgebraElement(self, coords)

    def basis_element(self, index: int) -> "AlgebraElement":
        coords = np.zeros(self.dim)
        coords[index] = 1.0
        return AlgebraElement(self, coords)

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, np.zeros(self.dim))

    @cached_property
    def flat_basis(self) -> np.ndarray:
        """Basis matrices as columns of a d^2 x n matrix."""
        return self.basis.reshape(self.dim, -1).T


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    algebra: LieAlgebra
    coords: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return np.einsum("i,ijk->jk", self.coords, self.algebra.basis)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))

    def _check(self, other: "AlgebraElement"):
        if other.algebra is not self.algebra:
            from wedgekit.exceptions import DomainError
            raise DomainError(f"Elements of {self.algebra.name} and {other.algebra.name} cannot be combined")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.algebra, self.coords + other.coords)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.algebra, self.coords - other.coords)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, -self.coords)

    def __mul__(self, scalar: float) -> "AlgebraElement":
        return AlgebraElement(self.algebra, float(scalar) * self.coords)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"AlgebraElement({self.algebra.name}, {np.round(self.coords, 6).tolist()})"


@dataclass(frozen=True, eq=False)
class GroupElement:
    """Invertible matrix of the defining representation with its grading parity."""
    matrix: np.ndarray
    parity: int = 1

    @classmethod
    def identity(cls, size: int) -> "GroupElement":
        return cls(np.eye(size))

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.matrix @ other.matrix, self.parity * other.parity)

    def inverse(self) -> "GroupElement":
        return GroupElement(np.linalg.inv(self.matrix), self.parity)


# Gradings

@dataclass(frozen=True, eq=False)
class EulerGrading:
    h: AlgebraElement
    projections: Dict[int, np.ndarray]  # keys -1, 0, 1
    dims: Tuple[int, int, int]  # (dim g_-1, dim g_0, dim g_1)
    spectrum_residual: float

    @property
    def algebra(self) -> LieAlgebra:
        return self.h.algebra

    def eigenbasis(self, nu: int) -> np.ndarray:
        """Orthonormal coordinate basis of g_nu as columns."""
        index = {-1: 0, 0: 1, 1: 2}[nu]
        if self.dims[index] == 0:
            return np.zeros((self.algebra.dim, 0))
        u, _, _ = np.linalg.svd(self.projections[nu])
        return u[:, : self.dims[index]]


@dataclass(frozen=True, eq=False)
class EulerInvolution:
    matrix: np.ndarray
    grading: EulerGrading


@dataclass(frozen=True)
class OrbitInvariant:
    algebra_name: str
    dims: Tuple[int, int, int]
    killing_signature: Tuple[int, int, int]  # (positive, negative, zero) on g_0
    matrix_spectrum: Tuple[float, ...] = ()


@dataclass(frozen=True, eq=False)
class EulerDiagnosis:
    grading: Optional[EulerGrading]
    reason: str


@dataclass(frozen=True, eq=False)
class SymmetryResult:
    """Outcome of the symmetric Euler element search.

    ``symmetric`` is None when no certificate was found and no refutation applies.
    """
    symmetric: Optional[bool]
    source: str  # certificate, spectrum, classification, none
    e: Optional[AlgebraElement] = None
    f: Optional[AlgebraElement] = None
    conjugator: Optional[GroupElement] = None
    triple_residual: Optional[float] = None
    witness_residual: Optional[float] = None
    reason: str = ""


# Wedges

@dataclass(frozen=True, eq=False)
class WedgeBase:
    h: AlgebraElement
    tau: EulerInvolution
    reflection: Optional[GroupElement] = None  # odd, implements tau
    flip: Optional[GroupElement] = None  # even, maps h to -h


@dataclass(frozen=True, eq=False)
class WedgeCouple:
    h: AlgebraElement
    tau: EulerInvolution
    base: WedgeBase
    transporter: Optional[GroupElement]  # self = transporter . base


@dataclass(frozen=True, eq=False)
class ConeSpec:
    label: ConeLabel
    algebra: LieAlgebra
    generators: List[AlgebraElement]

    @property
    def generator_matrix(self) -> np.ndarray:
        if not self.generators:
            return np.zeros((self.algebra.dim, 0))
        return np.column_stack([g.coords for g in self.generators])


@dataclass(frozen=True)
class CausalPoint:
    coords: Tuple[float, ...]

    @property
    def residual(self) -> float:
        x = np.asarray(self.coords)
        return float(abs(x[0] ** 2 - np.sum(x[1:] ** 2) + 1.0))


@dataclass(frozen=True)
class OrderResult:
    status: OrderStatus
    c_plus: Optional[float] = None
    m: Optional[Tuple[float, float]] = None
    c_minus: Optional[float] = None
    reason: str = ""

    @property
    def holds(self) -> Optional[bool]:
        if self.status == OrderStatus.INDETERMINATE:
            return None
        return self.status == OrderStatus.HOLDS

    def __bool__(self) -> bool:
        if self.status == OrderStatus.INDETERMINATE:
            from wedgekit.exceptions import IndeterminateError
            raise IndeterminateError(f"Order query is indeterminate: {self.reason}")
        return self.status == OrderStatus.HOLDS


# Standard subspaces

@dataclass(frozen=True, eq=False)
class RealSubspace:
    """Real subspace of C^N in realified coordinates z <-> (Re z, Im z)."""
    ambient_dim: int
    basis: np.ndarray  # (2N, k)
    orthonormalized: bool = False

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True, eq=False)
class AntiLinearOp:
    matrix: np.ndarray  # real 2N x 2N

    @property
    def ambient_dim(self) -> int:
        return self.matrix.shape[0] // 2


@dataclass(frozen=True, eq=False)
class ModularPair:
    """Modular conjugation J and modular operator stored as A = log(Delta) / 2pi."""
    J: AntiLinearOp
    log_delta: np.ndarray  # complex Hermitian N x N

    @property
    def ambient_dim(self) -> int:
        return self.log_delta.shape[0]

    def delta_power(self, exponent: complex) -> np.ndarray:
        """Delta^exponent = exp(2 pi exponent A) via the spectral decomposition of A."""
        w, v = np.linalg.eigh(self.log_delta)
        return (v * np.exp(2.0 * np.pi * exponent * w)) @ v.conj().T

    @property
    def delta(self) -> np.ndarray:
        return self.delta_power(1.0)


@dataclass(frozen=True, eq=False)
class ModularRepData:
    generator: np.ndarray  # A, complex Hermitian
    conjugation: AntiLinearOp

    @property
    def compatibility_residual(self) -> float:
        from wedgekit.services.stdsub_service import stdsub_service
        a_r = stdsub_service.realify(self.generator)
        j = self.conjugation.matrix
        return float(np.linalg.norm(j @ a_r @ j + a_r, 2))


# Rapidity model and Fock truncation

@dataclass(frozen=True, eq=False)
class RapidityModel:
    mass: float
    n: int
    theta_max: float

    @cached_property
    def theta(self) -> np.ndarray:
        return -self.theta_max + self.spacing * np.arange(self.n)

    @property
    def spacing(self) -> float:
        return 2.0 * self.theta_max / self.n

    @cached_property
    def omega(self) -> np.ndarray:
        """Angular frequencies conjugate to rapidity on the periodic grid."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.spacing)

    @property
    def omega_max(self) -> float:
        return float(np.max(np.abs(self.omega)))

    def momentum(self, shift: complex = 0.0) -> Tuple[np.ndarray, np.ndarray]:
        t = self.theta + shift
        return self.mass * np.cosh(t), self.mass * np.sinh(t)


@dataclass(frozen=True, eq=False)
class FockTruncation:
    modes: int
    n_max: int

    @cached_property
    def single_mode_annihilation(self) -> np.ndarray:
        return np.diag(np.sqrt(np.arange(1, self.n_max, dtype=float)), 1)

    @cached_property
    def annihilation(self) -> List[np.ndarray]:
        eye = np.eye(self.n_max)
        ops = []
        for k in range(self.modes):
            op = np.array([[1.0]])
            for j in range(self.modes):
                op = np.kron(op, self.single_mode_annihilation if j == k else eye)
            ops.append(op)
        return ops

    @property
    def dimension(self) -> int:
        return self.n_max ** self.modes

    @cached_property
    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dimension, dtype=complex)
        v[0] = 1.0
        return v

    @cached_property
    def low_block(self) -> np.ndarray:
        """Indices of basis states with every occupation below n_max / 2."""
        occupations = np.indices((self.n_max,) * self.modes).reshape(self.modes, -1)
        return np.flatnonzero(np.all(occupations < self.n_max // 2, axis=0))


# Modular analysis

@dataclass(frozen=True, eq=False)
class CovariancePuzzle:
    algebra: LieAlgebra
    subalgebra: List[AlgebraElement]
    h1: AlgebraElement
    h2: AlgebraElement
    h_center: Optional[AlgebraElement] = None
    conjugator: Optional[GroupElement] = None
    h1_normal_form: Optional[AlgebraElement] = None
    h2_normal_form: Optional[AlgebraElement] = None

    @property
    def commutation_residual(self) -> float:
        m1, m2 = self.h1.matrix, self.h2.matrix
        return float(np.linalg.norm(m1 @ m2 - m2 @ m1))


@dataclass(frozen=True, eq=False)
class RegularityQuery:
    cone: ConeSpec
    grading: EulerGrading
    ideal: Optional[List[AlgebraElement]] = None
    complement: Optional[List[AlgebraElement]] = None
    attestation: Optional[bool] = None
    attestation_note: str = ""


@dataclass(frozen=True, eq=False)
class AuditSample:
    """One sampled group element exp(x): its representation matrix and tau-image."""
    x: AlgebraElement
    unitary: np.ndarray
    unitary_tau: np.ndarray
    extra: Dict[str, Any] = field(default_factory=dict)
