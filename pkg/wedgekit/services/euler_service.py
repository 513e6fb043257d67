import logging
from typing import List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy.linalg import expm, null_space
from scipy.optimize import minimize

from wedgekit.config import settings
from wedgekit.exceptions import ClosureError, DomainError, GradingError, NumericError, UnsupportedError
from wedgekit.models import (
    AlgebraElement,
    AlgebraFamily,
    EulerDiagnosis,
    EulerGrading,
    EulerInvolution,
    GroupElement,
    LieAlgebra,
    OrbitInvariant,
    SymmetryResult,
)
from wedgekit.services.liealg_service import liealg_service

logger = logging.getLogger(__name__)


def _als_start(tensor: np.ndarray, target: np.ndarray, seed: int, start: int, max_iter: int, threshold: float):
    """One alternating least squares run for [Q1 a, Q-1 b] = target."""
    rng = np.random.default_rng([seed, start])
    k1, km = tensor.shape[0], tensor.shape[1]
    b = rng.standard_normal(km)
    a = np.zeros(k1)
    scale = max(1.0, float(np.linalg.norm(target)))
    residual = np.inf
    for _ in range(max_iter):
        a, *_ = np.linalg.lstsq(np.einsum("ijk,j->ki", tensor, b), target, rcond=None)
        b, *_ = np.linalg.lstsq(np.einsum("ijk,i->kj", tensor, a), target, rcond=None)
        residual = float(np.linalg.norm(np.einsum("ijk,i,j->k", tensor, a, b) - target)) / scale
        if residual < threshold:
            break
    return residual, start, a, b


class EulerGradingService:
    """3-gradings, Euler involutions and Euler orbit classification"""

    def __init__(self):
        self.tolerance = settings.euler_tolerance
        self.grading_tolerance = settings.grading_tolerance

    def diagnose(self, h: AlgebraElement) -> EulerDiagnosis:
        ad = liealg_service.ad_matrix(h)
        n = ad.shape[0]
        scale = float(np.linalg.norm(ad, 2)) if n else 0.0
        if scale < h.algebra.tolerance:
            return EulerDiagnosis(None, "central")

        eigenvalues = np.linalg.eigvals(ad)
        distance = np.min(np.abs(eigenvalues[:, None] - np.array([-1.0, 0.0, 1.0])[None, :]), axis=1)
        spectrum_residual = float(distance.max())
        if spectrum_residual > self.tolerance * max(1.0, scale):
            return EulerDiagnosis(None, f"spectrum outside {{-1, 0, 1}} (residual {spectrum_residual:.3e})")

        eye = np.eye(n)
        ad2 = ad @ ad
        defect = float(np.linalg.norm(ad2 @ ad - ad)) / max(1.0, scale)
        if defect > self.tolerance:
            return EulerDiagnosis(None, f"ad h not diagonalizable (defect {defect:.3e})")

        projections = {1: 0.5 * (ad2 + ad), -1: 0.5 * (ad2 - ad), 0: eye - ad2}
        dims = tuple(int(round(np.trace(projections[nu]))) for nu in (-1, 0, 1))

        for nu, p in projections.items():
            if np.linalg.norm(p @ p - p) > self.grading_tolerance * max(1.0, scale ** 2):
                return EulerDiagnosis(None, f"projection onto g_{nu} is not idempotent")

        grading = EulerGrading(h=h, projections=projections, dims=dims, spectrum_residual=spectrum_residual)
        law = self.grading_law_residual(grading)
        if law > self.grading_tolerance * max(1.0, scale):
            return EulerDiagnosis(None, f"bracket grading law fails (residual {law:.3e})")
        return EulerDiagnosis(grading, "euler")

    def is_euler(self, h: AlgebraElement) -> Optional[EulerGrading]:
        diagnosis = self.diagnose(h)
        if diagnosis.grading is None:
            logger.debug(f"{h} is not Euler: {diagnosis.reason}")
        return diagnosis.grading

    def grading_law_residual(self, grading: EulerGrading) -> float:
        c = grading.algebra.structure_constants
        worst = 0.0
        for i in (-1, 0, 1):
            qi = grading.eigenbasis(i)
            for j in (-1, 0, 1):
                qj = grading.eigenbasis(j)
                if qi.shape[1] == 0 or qj.shape[1] == 0:
                    continue
                brackets = np.einsum("ap,bq,abk->pqk", qi, qj, c)
                if abs(i + j) >= 2:
                    outside = brackets
                else:
                    outside = brackets - brackets @ grading.projections[i + j].T
                worst = max(worst, float(np.abs(outside).max()))
        return worst

    def euler_involution(self, grading: EulerGrading) -> EulerInvolution:
        p = grading.projections
        tau = p[0] - p[1] - p[-1]
        c = grading.algebra.structure_constants
        lhs = np.einsum("ijl,kl->ijk", c, tau)
        rhs = np.einsum("ai,bj,abk->ijk", tau, tau, c)
        residual = float(np.abs(lhs - rhs).max()) if c.size else 0.0
        square = float(np.abs(tau @ tau - np.eye(tau.shape[0])).max())
        # projections inherit the conditioning of ad h
        scale = float(np.linalg.norm(liealg_service.ad_matrix(grading.h), 2)) if c.size else 0.0
        tolerance = settings.witness_tolerance * max(1.0, scale ** 2)
        if residual > tolerance or square > tolerance:
            raise GradingError(
                f"Euler involution is not an automorphism (bracket {residual:.3e}, square {square:.3e})"
            )
        return EulerInvolution(matrix=tau, grading=grading)

    def involution_from_exponential(self, grading: EulerGrading) -> np.ndarray:
        """Real part of exp(i pi ad h) from the eigendecomposition of ad h."""
        ad = liealg_service.ad_matrix(grading.h)
        w, v = np.linalg.eig(ad)
        return np.real(v @ np.diag(np.exp(1j * np.pi * w)) @ np.linalg.inv(v))

    def reflection_element(self, grading: EulerGrading) -> GroupElement:
        """Odd group element exp(i pi h) of the defining representation, made real."""
        r = expm(1j * np.pi * grading.h.matrix)
        if np.abs(r.imag).max() > self.grading_tolerance:
            k = np.unravel_index(np.argmax(np.abs(r)), r.shape)
            r = r / (r[k] / abs(r[k]))
        if np.abs(r.imag).max() > self.grading_tolerance:
            raise UnsupportedError(f"exp(i pi h) has no real form in the defining representation of {grading.algebra.name}")
        g = GroupElement(r.real, -1)
        tau = self.euler_involution(grading).matrix
        ad_g = liealg_service.adjoint_matrix(g, grading.algebra)
        if np.abs(ad_g - tau).max() > self.grading_tolerance:
            raise UnsupportedError("exp(i pi h) does not implement the Euler involution")
        return g

    # Symmetric Euler elements

    def is_symmetric(
        self,
        grading: EulerGrading,
        seed: Optional[int] = None,
        starts: Optional[int] = None,
        threads: Optional[int] = None,
    ) -> SymmetryResult:
        seed = settings.seed if seed is None else seed
        starts = settings.symmetric_starts if starts is None else starts
        threads = settings.threads if threads is None else threads
        h = grading.h

        if grading.dims[0] != grading.dims[2]:
            return SymmetryResult(False, "dimensions", reason="dim g_1 differs from dim g_-1")

        spectrum = np.sort_complex(np.round(np.linalg.eigvals(h.matrix), 8))
        mirrored = np.sort_complex(np.round(np.linalg.eigvals(-h.matrix), 8))
        if np.abs(spectrum - mirrored).max() > settings.witness_tolerance:
            return SymmetryResult(False, "spectrum", reason="-h has a different matrix spectrum than h")

        q1, qm = grading.eigenbasis(1), grading.eigenbasis(-1)
        c = grading.algebra.structure_constants
        tensor = np.einsum("ai,bj,abk->ijk", q1, qm, c)

        runs = Parallel(n_jobs=threads)(
            delayed(_als_start)(
                tensor, h.coords, seed, start, settings.symmetric_max_iter, settings.symmetric_residual
            )
            for start in range(starts)
        )
        residual, start, a, b = min(runs, key=lambda run: (run[0], run[1]))
        logger.info(f"sl2-triple search on {grading.algebra.name}: best residual {residual:.3e} at start {start}")

        if residual < settings.symmetric_residual:
            algebra = grading.algebra
            e = algebra.element(q1 @ a)
            f = algebra.element(qm @ b)
            g = liealg_service.exp_element(e - f, np.pi / np.sqrt(2.0))
            witness = (liealg_service.adjoint_action(g, h) + h).norm()
            if witness < settings.witness_tolerance:
                return SymmetryResult(
                    True,
                    "certificate",
                    e=e,
                    f=f,
                    conjugator=g,
                    triple_residual=residual,
                    witness_residual=witness,
                    reason="sl2-triple found",
                )
            logger.warning(f"Triple found but conjugator residual {witness:.3e} exceeds tolerance")

        verdict = self.classification_verdict(grading)
        logger.warning(f"No symmetric certificate for {grading.algebra.name}; table verdict {verdict}")
        return SymmetryResult(
            verdict,
            "classification" if verdict is not None else "none",
            triple_residual=residual,
            reason="no certificate found",
        )

    def classification_verdict(self, grading: EulerGrading) -> Optional[bool]:
        """Symmetric-orbit list keyed by family and node."""
        algebra = grading.algebra
        if algebra.family == AlgebraFamily.SL:
            n = algebra.params["n"]
            j = int(np.sum(np.linalg.eigvals(grading.h.matrix).real > 0))
            return 2 * j == n
        if algebra.family == AlgebraFamily.SP:
            return True
        if algebra.family == AlgebraFamily.SO:
            p, q = algebra.params["p"], algebra.params["q"]
            if min(p, q) == 1 or (p + q) % 2 == 1:
                return True
        return None

    # Orbits

    def euler_candidates(self, algebra: LieAlgebra) -> List[AlgebraElement]:
        if algebra.family == AlgebraFamily.SL:
            n = algebra.params["n"]
            mats = [
                np.diag(np.concatenate([np.full(j, (n - j) / n), np.full(n - j, -j / n)])) for j in range(1, n)
            ]
        elif algebra.family == AlgebraFamily.SO:
            p, q = algebra.params["p"], algebra.params["q"]
            if min(p, q) == 0:
                return []
            if p == q or (min(p, q) > 1 and (p + q) % 2 == 0):
                raise UnsupportedError(f"Euler orbit enumeration for so({p},{q}) is not implemented")
            d = p + q
            m = np.zeros((d, d))
            m[0, p] = m[p, 0] = 1.0
            mats = [m]
        elif algebra.family == AlgebraFamily.SP:
            n = algebra.params["n"]
            mats = [np.diag(np.concatenate([np.full(n, 0.5), np.full(n, -0.5)]))]
        else:
            raise UnsupportedError(f"Euler orbit classification is not available for {algebra.name}")
        return [liealg_service.coordinates(algebra, m) for m in mats]

    def orbit_invariant(self, grading: EulerGrading) -> OrbitInvariant:
        if grading.dims[0] != grading.dims[2]:
            raise GradingError(f"dim g_1 != dim g_-1 for {grading.algebra.name}: {grading.dims}")
        q0 = grading.eigenbasis(0)
        k0 = q0.T @ liealg_service.killing_matrix(grading.algebra) @ q0
        w = np.linalg.eigvalsh(0.5 * (k0 + k0.T)) if k0.size else np.zeros(0)
        tol = 1e-8 * max(1.0, float(np.abs(w).max()) if w.size else 0.0)
        signature = (int(np.sum(w > tol)), int(np.sum(w < -tol)), int(np.sum(np.abs(w) <= tol)))
        spectrum = tuple(sorted(float(x) for x in np.round(np.linalg.eigvals(grading.h.matrix).real, 8)))
        return OrbitInvariant(grading.algebra.name, grading.dims, signature, spectrum)

    def find_conjugator(
        self, h1: AlgebraElement, h2: AlgebraElement, restarts: Optional[int] = None, seed: Optional[int] = None
    ) -> Optional[GroupElement]:
        """Randomized descent on ||Ad(exp y) h1 - h2||^2 over y in the algebra."""
        restarts = settings.conjugator_restarts if restarts is None else restarts
        seed = settings.seed if seed is None else seed
        algebra = h1.algebra

        def objective(y):
            try:
                g = liealg_service.exp_element(algebra.element(y))
                return float(np.sum((liealg_service.adjoint_action(g, h1).coords - h2.coords) ** 2))
            except (NumericError, ClosureError, np.linalg.LinAlgError):
                return 1e6

        for start in range(restarts):
            rng = np.random.default_rng([seed, start])
            result = minimize(objective, rng.standard_normal(algebra.dim), method="BFGS")
            if result.fun < self.grading_tolerance ** 2:
                logger.info(f"Conjugator found after {start + 1} restarts (residual {np.sqrt(result.fun):.2e})")
                return liealg_service.exp_element(algebra.element(result.x))
        return None

    def classify_euler_orbits(
        self, algebra: LieAlgebra, seed: Optional[int] = None
    ) -> List[Tuple[AlgebraElement, OrbitInvariant]]:
        logger.info(f"Classifying Euler orbits of {algebra.name}")
        orbits: List[Tuple[AlgebraElement, OrbitInvariant]] = []
        for candidate in self.euler_candidates(algebra):
            grading = self.is_euler(candidate)
            if grading is None:
                logger.warning(f"Candidate {candidate} of {algebra.name} failed the Euler test")
                continue
            invariant = self.orbit_invariant(grading)
            duplicate = False
            for representative, known in orbits:
                if known == invariant and self.find_conjugator(candidate, representative, seed=seed) is not None:
                    duplicate = True
                    break
            if not duplicate:
                orbits.append((candidate, invariant))
        logger.info(f"{algebra.name}: {len(orbits)} Euler orbit(s)")
        return orbits

    # Pairs and hermitian structure

    def is_orthogonal_pair(self, ga: EulerGrading, gb: EulerGrading) -> bool:
        if ga.algebra is not gb.algebra:
            raise DomainError("Euler pair must live in one algebra")
        tau = self.euler_involution(ga).matrix
        return bool(np.linalg.norm(tau @ gb.h.coords + gb.h.coords) < self.grading_tolerance)

    def compact_center_dimension(self, algebra: LieAlgebra) -> int:
        """Dimension of the center of the fixed algebra of X -> -X^T."""
        theta = np.column_stack(
            [liealg_service.coordinates(algebra, -b.T).coords for b in algebra.basis]
        )
        k = null_space(theta - np.eye(algebra.dim))
        if k.shape[1] == 0:
            return 0
        killing = k.T @ liealg_service.killing_matrix(algebra) @ k
        if np.linalg.eigvalsh(0.5 * (killing + killing.T)).max() >= -self.grading_tolerance:
            raise DomainError(f"Killing form is not negative definite on the compact part of {algebra.name}")
        c = algebra.structure_constants
        # rows: bracket of sum_j a_j k_j with each k_i
        system = np.einsum("aj,bi,abm->imj", k, k, c).reshape(-1, k.shape[1])
        return int(null_space(system, rcond=1e-8).shape[1])

    def is_tube_type_hermitian(self, algebra: LieAlgebra, seed: Optional[int] = None) -> bool:
        if algebra.family not in (AlgebraFamily.SL, AlgebraFamily.SO, AlgebraFamily.SP):
            raise UnsupportedError(f"Hermitian test is not available for {algebra.name}")
        if not liealg_service.is_semisimple(algebra):
            raise UnsupportedError(f"{algebra.name} is not semisimple")
        if self.compact_center_dimension(algebra) == 0:
            return False
        for representative, _ in self.classify_euler_orbits(algebra, seed=seed):
            grading = self.is_euler(representative)
            if self.is_symmetric(grading, seed=seed).symmetric:
                return True
        return False


euler_service = EulerGradingService()
