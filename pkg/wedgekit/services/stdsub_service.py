import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy.linalg import expm, null_space, orth, polar, subspace_angles
from scipy.stats import unitary_group

from wedgekit.config import settings
from wedgekit.exceptions import AccuracyError, ConditioningError, DomainError, UnsupportedError
from wedgekit.models import AntiLinearOp, ModularPair, RealSubspace
from wedgekit.schemas import BorchersReport, RoundtripReport

logger = logging.getLogger(__name__)

BORCHERS_T = (-1.0, -0.5, 0.5, 1.0)
BORCHERS_S = (-1.0, -0.5, 0.5, 1.0)
INVARIANCE_TIMES = (0.3, 1.7)


class StandardSubspaceService:
    """Real subspaces of C^N, Tomita operators and modular pairs in realified coordinates"""

    # Realification

    @staticmethod
    def realify(m: np.ndarray) -> np.ndarray:
        """Complex-linear N x N map as a real 2N x 2N matrix."""
        m = np.asarray(m, dtype=complex)
        return np.block([[m.real, -m.imag], [m.imag, m.real]])

    @staticmethod
    def complexify(m: np.ndarray) -> np.ndarray:
        n = m.shape[0] // 2
        return m[:n, :n] + 1j * m[n:, :n]

    @staticmethod
    def complex_structure(n: int) -> np.ndarray:
        z, eye = np.zeros((n, n)), np.eye(n)
        return np.block([[z, -eye], [eye, z]])

    @staticmethod
    def conjugation(n: int) -> np.ndarray:
        return np.diag(np.concatenate([np.ones(n), -np.ones(n)]))

    @staticmethod
    def to_real(z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return np.concatenate([z.real, z.imag], axis=0)

    @staticmethod
    def to_complex(v: np.ndarray) -> np.ndarray:
        n = v.shape[0] // 2
        return v[:n] + 1j * v[n:]

    def anti_linearity_residual(self, op: np.ndarray) -> float:
        cx = self.complex_structure(op.shape[0] // 2)
        return float(np.abs(op @ cx + cx @ op).max())

    # Subspaces

    def make_subspace(self, basis: np.ndarray, ambient_dim: Optional[int] = None) -> RealSubspace:
        basis = np.asarray(basis, dtype=float)
        n = basis.shape[0] // 2 if ambient_dim is None else ambient_dim
        if basis.shape[0] != 2 * n:
            raise DomainError(f"Realified basis needs {2 * n} rows, got {basis.shape[0]}")
        if basis.shape[1] and np.linalg.matrix_rank(basis, tol=self._rank_tol(basis)) != basis.shape[1]:
            raise DomainError("Subspace columns are not linearly independent")
        q = orth(basis) if basis.shape[1] else basis
        return RealSubspace(ambient_dim=n, basis=q, orthonormalized=True)

    def real_subspace(self, n: int) -> RealSubspace:
        """R^N inside C^N."""
        return RealSubspace(ambient_dim=n, basis=np.vstack([np.eye(n), np.zeros((n, n))]), orthonormalized=True)

    def from_complex_vectors(self, vectors: Sequence[np.ndarray]) -> RealSubspace:
        """Real span of complex vectors."""
        columns = np.column_stack([self.to_real(v) for v in vectors])
        return self.make_subspace(columns)

    @staticmethod
    def _rank_tol(m: np.ndarray) -> float:
        s = np.linalg.svd(m, compute_uv=False)
        return settings.rank_threshold * (s[0] if s.size else 1.0)

    def _stacked_rank(self, subspace: RealSubspace) -> int:
        b = subspace.basis
        stacked = np.hstack([b, self.complex_structure(subspace.ambient_dim) @ b])
        if stacked.shape[1] == 0:
            return 0
        return int(np.linalg.matrix_rank(stacked, tol=self._rank_tol(stacked)))

    def is_cyclic(self, subspace: RealSubspace) -> bool:
        return self._stacked_rank(subspace) == 2 * subspace.ambient_dim

    def is_separating(self, subspace: RealSubspace) -> bool:
        """dim(H cap iH) = 2k - rank[B | Cx B] vanishes."""
        return 2 * subspace.dim - self._stacked_rank(subspace) == 0

    def is_standard(self, subspace: RealSubspace) -> bool:
        return self.is_cyclic(subspace) and self.is_separating(subspace)

    def symplectic_complement(self, subspace: RealSubspace) -> RealSubspace:
        n = subspace.ambient_dim
        target = (self.complex_structure(n) @ subspace.basis).T
        if target.shape[0] == 0:
            complement = np.eye(2 * n)
        else:
            complement = null_space(target, rcond=settings.rank_threshold)
        return RealSubspace(ambient_dim=n, basis=complement, orthonormalized=True)

    def apply_operator(self, op: np.ndarray, subspace: RealSubspace) -> RealSubspace:
        return self.make_subspace(op @ subspace.basis, subspace.ambient_dim)

    def principal_angle(self, a: RealSubspace, b: RealSubspace) -> float:
        """Largest principal angle; pi/2 for subspaces of different dimension."""
        if a.dim != b.dim:
            return float(np.pi / 2)
        if a.dim == 0:
            return 0.0
        return float(np.max(subspace_angles(a.basis, b.basis)))

    def containment_residual(self, inner: RealSubspace, outer: RealSubspace) -> float:
        if inner.dim == 0:
            return 0.0
        q = orth(outer.basis) if outer.dim else np.zeros((inner.basis.shape[0], 0))
        b = orth(inner.basis)
        return float(np.linalg.norm(b - q @ (q.T @ b), 2))

    # Modular data

    def validate_pair(self, pair: ModularPair, tol: float = 1e-8) -> float:
        """Largest violation of the modular pair identities; raises above ``tol``."""
        j = pair.J.matrix
        n = pair.ambient_dim
        a = pair.log_delta
        a_r = self.realify(a)
        residuals = {
            "J^2": float(np.abs(j @ j - np.eye(2 * n)).max()),
            "isometry": float(np.abs(j.T @ j - np.eye(2 * n)).max()),
            "anti-linearity": self.anti_linearity_residual(j),
            "JAJ+A": float(np.abs(j @ a_r @ j + a_r).max()),
            "hermitian": float(np.abs(a - a.conj().T).max()),
        }
        worst = max(residuals, key=residuals.get)
        if residuals[worst] > tol:
            raise DomainError(f"Modular pair violates {worst} (residual {residuals[worst]:.3e})")
        return residuals[worst]

    def tomita_from_subspace(self, subspace: RealSubspace) -> Tuple[AntiLinearOp, ModularPair]:
        n = subspace.ambient_dim
        if not self.is_standard(subspace) or subspace.dim != n:
            raise DomainError("Tomita operator needs a standard subspace")
        b = subspace.basis
        m = np.hstack([b, self.complex_structure(n) @ b])
        cond = float(np.linalg.cond(m))
        if cond > settings.condition_limit:
            raise ConditioningError(f"H + iH decomposition is ill conditioned (cond {cond:.3e})")

        signs = np.concatenate([np.ones(n), -np.ones(n)])
        s = np.linalg.solve(m.T, (m * signs).T).T
        j, root = polar(s, side="right")
        delta = self.complexify(root @ root)
        delta = 0.5 * (delta + delta.conj().T)
        w, v = np.linalg.eigh(delta)
        if w.min() <= 0:
            raise ConditioningError("Modular operator is not positive definite")
        log_delta = (v * (np.log(w) / (2.0 * np.pi))) @ v.conj().T

        pair = ModularPair(J=AntiLinearOp(j), log_delta=log_delta)
        self.validate_pair(pair)
        fixed = null_space(np.eye(2 * n) - s, rcond=settings.kernel_threshold)
        angle = self.principal_angle(RealSubspace(n, fixed, True), subspace)
        if angle > settings.kernel_threshold:
            raise AccuracyError(f"Fixed points of S differ from H (angle {angle:.3e})")
        return AntiLinearOp(s), pair

    def tomita_operator(self, pair: ModularPair) -> np.ndarray:
        return pair.J.matrix @ self.realify(pair.delta_power(0.5))

    def subspace_from_pair(self, pair: ModularPair) -> RealSubspace:
        self.validate_pair(pair)
        n = pair.ambient_dim
        s = self.tomita_operator(pair)
        kernel = null_space(np.eye(2 * n) - s, rcond=settings.kernel_threshold)
        if kernel.shape[1] != n:
            raise ConditioningError(
                f"Kernel of 1 - S has dimension {kernel.shape[1]}, expected {n} (spread of Delta too large)"
            )
        return RealSubspace(ambient_dim=n, basis=kernel, orthonormalized=True)

    def pair_distance(self, p: ModularPair, q: ModularPair) -> float:
        return float(
            max(
                np.linalg.norm(p.J.matrix - q.J.matrix, 2),
                np.linalg.norm(p.delta - q.delta, 2) / max(1.0, np.linalg.norm(p.delta, 2)),
            )
        )

    def modular_group(self, pair: ModularPair, t: float) -> np.ndarray:
        """Delta^{it} as a realified unitary."""
        return self.realify(pair.delta_power(1j * t))

    def random_admissible_pair(
        self, n: int, rng: np.random.Generator, norm_bound: float = 1.0
    ) -> ModularPair:
        """J = U conj U^*, A = U (iK) U^* with K real antisymmetric."""
        if norm_bound > settings.max_log_delta_norm:
            raise DomainError(f"log Delta bound {norm_bound} exceeds {settings.max_log_delta_norm}")
        u = unitary_group.rvs(n, random_state=rng) if n > 1 else np.exp(2j * np.pi * rng.random()) * np.eye(1)
        u = np.atleast_2d(u)
        k = rng.standard_normal((n, n))
        k = k - k.T
        a = u @ (1j * k) @ u.conj().T
        size = np.linalg.norm(a, 2)
        if size > 0:
            a = a * (norm_bound * rng.uniform(0.2, 1.0) / size)
        u_r = self.realify(u)
        j = u_r @ self.conjugation(n) @ u_r.T
        return ModularPair(J=AntiLinearOp(j), log_delta=0.5 * (a + a.conj().T))

    def swap_pair(self, a: float) -> ModularPair:
        """Swap-and-conjugate J on C^2 with A = diag(a, -a)."""
        swap = np.array([[0.0, 1.0], [1.0, 0.0]])
        j = self.realify(swap) @ self.conjugation(2)
        return ModularPair(J=AntiLinearOp(j), log_delta=np.diag([a, -a]).astype(complex))

    # Covariance and Borchers relations

    def covariance_transport(
        self, op: np.ndarray, parity: int, subspace: RealSubspace
    ) -> Tuple[ModularPair, float]:
        """Modular pair of U H predicted from that of H, and its distance to the recomputed pair.

        Delta and J are conjugated by U for either parity; an anti-unitary U reverses
        the modular group, U Delta^{it} U^* = Delta_{UH}^{-it}.
        """
        n = subspace.ambient_dim
        cx = self.complex_structure(n)
        if parity == 1:
            mismatch = np.abs(op @ cx - cx @ op).max()
        elif parity == -1:
            mismatch = np.abs(op @ cx + cx @ op).max()
        else:
            raise TypeError(f"Parity must be +1 or -1, got {parity}")
        if mismatch > 1e-10:
            raise TypeError(f"Operator parity {parity} is inconsistent with its complex structure")

        _, pair = self.tomita_from_subspace(subspace)
        inverse = op.T
        a_r = op @ self.realify(pair.log_delta) @ inverse
        predicted = ModularPair(
            J=AntiLinearOp(op @ pair.J.matrix @ inverse),
            log_delta=self.complexify(0.5 * (a_r + a_r.T)),
        )
        _, recomputed = self.tomita_from_subspace(self.apply_operator(op, subspace))
        residual = self.pair_distance(predicted, recomputed)

        t = 0.3
        flow = op @ self.modular_group(pair, t) @ inverse - self.modular_group(recomputed, parity * t)
        residual = max(residual, float(np.linalg.norm(flow, 2)))
        if residual > settings.kernel_threshold:
            raise AccuracyError(f"Covariance prediction misses the recomputed pair by {residual:.3e}")
        return predicted, residual

    def borchers_relation_check(self, pair: ModularPair, generator: np.ndarray, sign: int = 1) -> BorchersReport:
        """J U(t) J = U(-t) and Delta^{-is/2pi} U(t) Delta^{is/2pi} = U(e^{sign s} t) for U(t) = e^{itP}."""
        j = pair.J.matrix

        def unitary(t: float) -> np.ndarray:
            return self.realify(expm(1j * t * generator))

        reflection = 0.0
        dilation = 0.0
        for t in BORCHERS_T:
            reflection = max(reflection, float(np.linalg.norm(j @ unitary(t) @ j - unitary(-t), 2)))
            for s in BORCHERS_S:
                forward = self.modular_group(pair, s / (2.0 * np.pi))
                backward = self.modular_group(pair, -s / (2.0 * np.pi))
                lhs = backward @ unitary(t) @ forward
                dilation = max(dilation, float(np.linalg.norm(lhs - unitary(np.exp(sign * s) * t), 2)))
        return BorchersReport(
            reflection_residual=reflection,
            dilation_residual=dilation,
            t_values=list(BORCHERS_T),
            s_values=list(BORCHERS_S),
        )

    # Property suite

    def roundtrip_suite(
        self,
        dim: int,
        trials: int,
        seed: Optional[int] = None,
        threads: Optional[int] = None,
        tolerance: Optional[float] = None,
    ) -> RoundtripReport:
        """Pair -> subspace -> pair round trips with duality and modular invariance."""
        if dim > settings.stdsub_max_dim:
            raise UnsupportedError(f"dim {dim} exceeds the conditioning envelope ({settings.stdsub_max_dim})")
        if dim < 1 or trials < 1:
            raise DomainError("dim and trials must be positive")
        seed = settings.seed if seed is None else seed
        threads = settings.threads if threads is None else threads
        tolerance = settings.kernel_threshold if tolerance is None else tolerance

        logger.info(f"Standard subspace round trips: dim {dim}, {trials} trials")
        results = Parallel(n_jobs=threads)(delayed(_roundtrip_trial)(dim, seed, index) for index in range(trials))
        finished = [r for r in results if r is not None]
        failures = trials - len(finished)
        if failures:
            logger.warning(f"{failures} of {trials} trials were ill conditioned")

        def worst(key: str) -> float:
            return max((r[key] for r in finished), default=0.0)

        report = RoundtripReport(
            dim=dim,
            trials=trials,
            conditioning_failures=failures,
            max_subspace_angle=worst("angle"),
            max_pair_residual=worst("pair"),
            max_duality_residual=worst("duality"),
            max_invariance_angle=worst("invariance"),
        )
        report.passed = (
            failures <= 0.01 * trials
            and max(report.max_subspace_angle, report.max_pair_residual, report.max_duality_residual) < tolerance
            and report.max_invariance_angle < 10 * tolerance
        )
        return report


stdsub_service = StandardSubspaceService()


def _roundtrip_trial(dim: int, seed: int, index: int) -> Optional[dict]:
    rng = np.random.default_rng([seed, index])
    pair = stdsub_service.random_admissible_pair(dim, rng)
    try:
        subspace = stdsub_service.subspace_from_pair(pair)
        _, recovered = stdsub_service.tomita_from_subspace(subspace)
        again = stdsub_service.subspace_from_pair(recovered)

        complement = stdsub_service.symplectic_complement(subspace)
        _, dual = stdsub_service.tomita_from_subspace(complement)
        expected_dual = ModularPair(J=pair.J, log_delta=-pair.log_delta)

        flowed = [
            stdsub_service.apply_operator(stdsub_service.modular_group(pair, t), subspace) for t in INVARIANCE_TIMES
        ]
        reflected = stdsub_service.apply_operator(pair.J.matrix, subspace)
    except ConditioningError as e:
        logger.debug(f"Trial {index}: {e}")
        return None
    return {
        "angle": stdsub_service.principal_angle(subspace, again),
        "pair": stdsub_service.pair_distance(pair, recovered),
        "duality": stdsub_service.pair_distance(dual, expected_dual),
        "invariance": max(
            *(stdsub_service.principal_angle(image, subspace) for image in flowed),
            stdsub_service.principal_angle(reflected, complement),
        ),
    }
