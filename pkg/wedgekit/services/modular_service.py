import logging
from typing import List, Optional, Sequence

import numpy as np
from scipy.linalg import expm, null_space, orth
from scipy.optimize import linprog

from wedgekit.config import settings
from wedgekit.exceptions import (
    ConditioningError,
    ConstructionError,
    DomainError,
    UnsupportedError,
)
from wedgekit.models import (
    AlgebraElement,
    AlgebraFamily,
    AuditSample,
    CovariancePuzzle,
    CovarianceVerdict,
    EulerGrading,
    GroupElement,
    LieAlgebra,
    ModularRepData,
    RapidityModel,
    RealSubspace,
    RegularityQuery,
)
from wedgekit.schemas import (
    AntiEllipticReport,
    AuditReport,
    ConeSideResult,
    CovarianceReport,
    GaussianSum,
    RegularityReport,
    SemidirectReport,
)
from wedgekit.services.bgl_service import HK5_TIMES, bgl_service
from wedgekit.services.euler_service import euler_service
from wedgekit.services.liealg_service import liealg_service
from wedgekit.services.rapidity_service import rapidity_service
from wedgekit.services.stdsub_service import stdsub_service

logger = logging.getLogger(__name__)

DISCRETE_KERNEL = "ker(U) is discrete: the Lie algebra criterion stands in for the group-level covariance condition"
ELLIPTIC_TOLERANCE = 1e-8
SUPPORT_TOLERANCE = 1e-9


def _unit(d: int, i: int, j: int) -> np.ndarray:
    m = np.zeros((d, d))
    m[i, j] = 1.0
    return m


class ModularAnalysisService:
    """Modular covariance, regularity and anti-ellipticity criteria"""

    def __init__(self):
        self.tolerance = settings.kernel_threshold

    # Modular covariance

    def make_puzzle(
        self,
        subalgebra: Sequence[AlgebraElement],
        h1: AlgebraElement,
        h2: AlgebraElement,
        **extra,
    ) -> CovariancePuzzle:
        if not subalgebra:
            raise DomainError("The subalgebra needs a basis")
        if not liealg_service.is_subalgebra(subalgebra, self.tolerance):
            raise DomainError("Subalgebra basis is not bracket closed")
        if not liealg_service.span_contains(subalgebra, h1, self.tolerance):
            raise DomainError("h1 must lie in the subalgebra")
        puzzle = CovariancePuzzle(h1.algebra, list(subalgebra), h1, h2, **extra)
        if puzzle.commutation_residual > self.tolerance:
            raise DomainError(f"[h1, h2] = {puzzle.commutation_residual:.3e}: Euler elements must commute")
        return puzzle

    def modular_covariance_test(self, puzzle: CovariancePuzzle) -> CovarianceReport:
        """Is [h1 - h2, subalgebra] inside ker(ad h2)?"""
        diff = puzzle.h1 - puzzle.h2
        kernel = null_space(liealg_service.ad_matrix(puzzle.h2), rcond=self.tolerance)
        outside = np.eye(puzzle.algebra.dim) - kernel @ kernel.T

        norms = [float(np.linalg.norm(outside @ liealg_service.bracket(diff, y).coords)) for y in puzzle.subalgebra]
        worst = int(np.argmax(norms))
        violated = norms[worst] > self.tolerance * max(1.0, diff.norm())
        report = CovarianceReport(
            algebra=puzzle.algebra.name,
            verdict=CovarianceVerdict.VIOLATED if violated else CovarianceVerdict.COMPATIBLE,
            witness=puzzle.subalgebra[worst].coords.tolist() if violated else None,
            witness_norm=norms[worst] if violated else 0.0,
            commutation_residual=puzzle.commutation_residual,
            h1=puzzle.h1.coords.tolist(),
            h2=puzzle.h2.coords.tolist(),
            h1_normal_form=puzzle.h1_normal_form.matrix.tolist() if puzzle.h1_normal_form is not None else None,
            h2_normal_form=puzzle.h2_normal_form.matrix.tolist() if puzzle.h2_normal_form is not None else None,
            assumptions=[DISCRETE_KERNEL],
        )
        logger.info(f"Covariance test on {puzzle.algebra.name}: {report.verdict.value} (witness norm {report.witness_norm:.3e})")
        return report

    def build_covariance_counterexample(self, n: int = 3) -> CovariancePuzzle:
        """Non-symmetric node-1 Euler element of sl_n split along a gl2 subalgebra.

        h2 = h_c - h1 with h_c central in b = gl2 + trace correction and
        h1 = -diag(1/2, -1/2, 0, ...) Euler in b.
        """
        if n == 2:
            raise UnsupportedError("sl2 has only symmetric Euler elements; there is no counterexample")
        if not 3 <= n <= 6:
            raise UnsupportedError(f"Counterexample is built for sl_n with n = 3..6, got {n}")
        algebra = liealg_service.make_algebra("sl", n=n)
        rest = np.diag([0.0, 0.0] + [1.0] * (n - 2)) / (n - 2)
        b_matrices = [_unit(n, 0, 0) - rest, _unit(n, 1, 1) - rest, _unit(n, 0, 1), _unit(n, 1, 0)]
        subalgebra = [liealg_service.coordinates(algebra, m) for m in b_matrices]

        h2 = liealg_service.coordinates(algebra, np.diag([(n - 1) / n] + [-1.0 / n] * (n - 1)))
        s = liealg_service.coordinates(algebra, np.diag([0.5, -0.5] + [0.0] * (n - 2)))
        h_center = h2 - s
        h1 = -s

        rotation = (np.pi / 4.0) * (_unit(n, 0, 1) - _unit(n, 1, 0))
        g = GroupElement(expm(rotation))
        puzzle = self.make_puzzle(
            subalgebra,
            h1,
            h2,
            h_center=h_center,
            conjugator=g,
            h1_normal_form=liealg_service.adjoint_action(g, h1),
            h2_normal_form=liealg_service.adjoint_action(g, h2),
        )
        self._verify_counterexample(puzzle, b_matrices)
        return puzzle

    def build_ds2_counterexample(self) -> CovariancePuzzle:
        return self.build_covariance_counterexample(3)

    def _verify_counterexample(self, puzzle: CovariancePuzzle, b_matrices: List[np.ndarray]):
        n = puzzle.algebra.matrix_size
        b = liealg_service.from_basis("b", b_matrices, tolerance=self.tolerance)
        grading = euler_service.is_euler(puzzle.h2)
        expected = (n - 1, n * n - 1 - 2 * (n - 1), n - 1)
        checks = {
            "h2 Euler with node-1 dimensions": grading is not None and grading.dims == expected,
            "h2 not symmetric": grading is not None and euler_service.is_symmetric(grading).symmetric is False,
            "h1 Euler in the subalgebra": euler_service.is_euler(
                liealg_service.coordinates(b, puzzle.h1.matrix)
            ) is not None,
            "[h1, h2] = 0": puzzle.commutation_residual < self.tolerance,
            "covariance violated": self.modular_covariance_test(puzzle).verdict == CovarianceVerdict.VIOLATED,
        }
        failed = [name for name, ok in checks.items() if not ok]
        if failed:
            logger.error(f"Counterexample on sl{n} failed: {', '.join(failed)}")
            raise ConstructionError(f"Counterexample regression on sl{n}: {', '.join(failed)}")

    # Regularity by cones

    @staticmethod
    def _intersect(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Orthonormal basis of the intersection of two column spans."""
        if a.shape[1] == 0 or b.shape[1] == 0:
            return np.zeros((a.shape[0], 0))
        kernel = null_space(np.hstack([a, -b]), rcond=1e-8)
        if kernel.shape[1] == 0:
            return np.zeros((a.shape[0], 0))
        return orth(a @ kernel[: a.shape[1]], rcond=1e-8)

    def _cone_side(self, generators: np.ndarray, target: np.ndarray, side: int) -> ConeSideResult:
        """Does the cone meet span(target) in a generating subcone?"""
        dim_v = target.shape[1]
        k = generators.shape[1]
        if k == 0:
            return ConeSideResult(side=side, eigenspace_dim=dim_v, span_dim=0, generating=dim_v == 0, detail="no generators")
        g = side * generators
        a = g - target @ (target.T @ g)

        support = np.zeros(k)
        combos = []
        for i in range(k):
            c = np.zeros(k)
            c[i] = -1.0
            res = linprog(c, A_eq=a, b_eq=np.zeros(a.shape[0]), bounds=[(0.0, 1.0)] * k, method="highs")
            if res.status != 0:
                logger.warning(f"Cone LP for generator {i} ended with status {res.status}: {res.message}")
                return ConeSideResult(
                    side=side, eigenspace_dim=dim_v, span_dim=None, generating=None, detail=f"LP status {res.status}"
                )
            support[i] = res.x[i]
            if res.x[i] > SUPPORT_TOLERANCE:
                combos.append(g @ res.x)

        for v in combos:
            leak = np.linalg.norm(v - target @ (target.T @ v))
            if leak > self.tolerance * max(1.0, np.linalg.norm(v)):
                return ConeSideResult(
                    side=side, eigenspace_dim=dim_v, span_dim=None, generating=None, detail=f"LP point leaks {leak:.2e}"
                )

        s = np.flatnonzero(support > SUPPORT_TOLERANCE)
        if s.size == 0:
            span_dim = 0
        else:
            directions = null_space(a[:, s], rcond=1e-8)
            span_dim = int(np.linalg.matrix_rank(g[:, s] @ directions, tol=1e-8)) if directions.size else 0
        return ConeSideResult(side=side, eigenspace_dim=dim_v, span_dim=span_dim, generating=span_dim == dim_v)

    @staticmethod
    def _combine(sides: Sequence[ConeSideResult]) -> Optional[bool]:
        if any(side.generating is None for side in sides):
            return None
        return all(side.generating for side in sides)

    def regularity_cone_check(self, query: RegularityQuery) -> RegularityReport:
        generators = query.cone.generator_matrix
        sides = [self._cone_side(generators, query.grading.eigenbasis(side), side) for side in (1, -1)]
        verdict = self._combine(sides)
        if verdict is None:
            logger.warning(f"Regularity check for cone {query.cone.label.value} is indeterminate")
        return RegularityReport(cone=query.cone.label.value, sides=sides, verdict=verdict)

    def _validate_split(self, query: RegularityQuery) -> np.ndarray:
        ideal, complement = query.ideal, query.complement
        if not ideal or complement is None:
            raise DomainError("Semidirect check needs an ideal and a complement")
        algebra = query.grading.algebra
        if not liealg_service.is_ideal(ideal, self.tolerance):
            raise DomainError("The ideal part of the split is not an ideal")
        if complement and not liealg_service.is_subalgebra(complement, self.tolerance):
            raise DomainError("The complement of the split is not a subalgebra")
        r, l = liealg_service.span_rank(ideal), liealg_service.span_rank(complement)
        if r != len(ideal) or l != len(complement) or liealg_service.span_rank(list(ideal) + list(complement)) != algebra.dim or r + l != algebra.dim:
            raise DomainError("Ideal and complement do not split the algebra")
        for x in query.cone.generators:
            if not liealg_service.span_contains(ideal, x, self.tolerance):
                raise DomainError("Cone generators must lie in the ideal")
        return orth(np.column_stack([y.coords for y in ideal]))

    def semidirect_regularity_check(self, query: RegularityQuery) -> SemidirectReport:
        ideal = self._validate_split(query)
        generators = query.cone.generator_matrix
        sides = [
            self._cone_side(generators, self._intersect(query.grading.eigenbasis(side), ideal), side)
            for side in (1, -1)
        ]
        condition_a = self._combine(sides)
        condition_b = query.attestation
        if condition_a is None or condition_b is None:
            verdict = False if condition_a is False or condition_b is False else None
        else:
            verdict = condition_a and condition_b
        return SemidirectReport(
            condition_a=condition_a,
            condition_b=condition_b,
            attestation_note=query.attestation_note or "no attestation supplied for the restriction condition",
            sides=sides,
            verdict=verdict,
        )

    # Euler element theorem audits

    def affine_audit_samples(
        self, algebra: LieAlgebra, rep: ModularRepData, count: int = 8, seed: Optional[int] = None
    ) -> List[AuditSample]:
        """aff1 acting through the dilation only: U(exp(a h + b p)) = exp(-i a A)."""
        if algebra.family != AlgebraFamily.AFF:
            raise DomainError("Affine samples need the affine algebra of the line")
        seed = settings.seed if seed is None else seed
        samples = []
        for index in range(count):
            a, b = np.random.default_rng([seed, index]).uniform(-1.0, 1.0, size=2)
            u = expm(-1j * a * rep.generator)
            samples.append(AuditSample(x=algebra.element([a, b]), unitary=u, unitary_tau=u))
        return samples

    def euler_theorem_audit(
        self,
        rep: ModularRepData,
        h: AlgebraElement,
        samples: Sequence[AuditSample],
        subspace: Optional[RealSubspace] = None,
    ) -> AuditReport:
        """Residuals of U(exp th) = Delta^(-it/2pi) and J U(exp x) J = U(exp tau_h x) on given data."""
        modular = np.inf
        try:
            if subspace is None:
                subspace = bgl_service.bgl_subspace(rep)
            _, pair = stdsub_service.tomita_from_subspace(subspace)
            modular = max(
                float(
                    np.linalg.norm(
                        bgl_service.one_parameter_group(rep.generator, t)
                        - stdsub_service.modular_group(pair, -t / (2.0 * np.pi)),
                        2,
                    )
                )
                for t in HK5_TIMES
            )
        except (DomainError, ConditioningError) as e:
            logger.warning(f"No modular data for the audit: {e}")

        j = rep.conjugation.matrix
        residuals = []
        for sample in samples:
            lhs = j @ stdsub_service.realify(sample.unitary) @ j
            residuals.append(float(np.linalg.norm(lhs - stdsub_service.realify(sample.unitary_tau), 2)))
        return AuditReport(
            h_euler=euler_service.is_euler(h) is not None,
            modular_group_residual=modular,
            reflection_residuals=residuals,
            max_reflection_residual=max(residuals, default=0.0),
            samples=len(residuals),
        )

    def rapidity_theorem_audit(
        self,
        model: RapidityModel,
        functions: Sequence[GaussianSum],
        times: Sequence[float] = (-1.0, -0.5, 0.5, 1.0),
    ) -> AuditReport:
        """Boost as h on iso(1,1); translations and boosts as samples."""
        algebra = liealg_service.make_algebra("iso", d=1)
        h = algebra.basis_element(0)
        conj = rapidity_service.modular_conjugation
        modular, residuals = 0.0, []
        for function in functions:
            psi = rapidity_service.rapidity_vector(model, function).values
            size = np.linalg.norm(psi)
            if size == 0:
                continue
            for t in times:
                boosted = rapidity_service.boost(model, psi, t)
                flowed = rapidity_service.modular_group(model, psi, -t / (2.0 * np.pi))
                modular = max(modular, float(np.linalg.norm(boosted - flowed) / size))
                # tau_h negates translations and fixes the boost
                for a in ((t, t), (t, -t), (t, 0.0), (0.0, t)):
                    lhs = conj(rapidity_service.translate(model, conj(psi), a))
                    rhs = rapidity_service.translate(model, psi, (-a[0], -a[1]))
                    residuals.append(float(np.linalg.norm(lhs - rhs) / size))
                lhs = conj(rapidity_service.boost(model, conj(psi), t))
                residuals.append(float(np.linalg.norm(lhs - boosted) / size))
        return AuditReport(
            h_euler=euler_service.is_euler(h) is not None,
            modular_group_residual=modular,
            reflection_residuals=residuals,
            max_reflection_residual=max(residuals, default=0.0),
            samples=len(residuals),
        )

    # Anti-elliptic Euler elements

    def _ideal_bases(self, algebra: LieAlgebra, ideals: Optional[Sequence[Sequence[AlgebraElement]]]) -> List[np.ndarray]:
        ideals = liealg_service.summands(algebra) if ideals is None else ideals
        bases = []
        for ideal in ideals:
            if not ideal or not liealg_service.is_ideal(ideal, self.tolerance):
                raise DomainError("Decomposition contains a part that is not an ideal")
            bases.append(np.column_stack([y.coords for y in ideal]))
        stacked = np.hstack(bases)
        if stacked.shape[1] != algebra.dim or np.linalg.matrix_rank(stacked, tol=1e-8) != algebra.dim:
            raise DomainError("Ideals do not form a direct sum decomposition of the algebra")

        killing = liealg_service.killing_matrix(algebra)
        c = algebra.structure_constants
        for basis in bases:
            brackets = np.einsum("ai,bj,abk->ijk", basis, basis, c)
            abelian = np.abs(brackets).max(initial=0.0) < self.tolerance
            form = basis.T @ killing @ basis
            nondegenerate = np.linalg.svd(form, compute_uv=False).min() > settings.semisimple_threshold * max(
                1.0, np.abs(form).max()
            )
            if not (abelian or nondegenerate):
                raise UnsupportedError("Anti-ellipticity is decided for reductive decompositions only")
        return bases

    def _is_elliptic(self, ad: np.ndarray) -> bool:
        if np.abs(ad).max(initial=0.0) < ELLIPTIC_TOLERANCE:
            return True
        eigenvalues, vectors = np.linalg.eig(ad)
        if np.abs(eigenvalues.real).max() >= ELLIPTIC_TOLERANCE:
            return False
        return bool(np.linalg.cond(vectors) < 1e8)

    def anti_elliptic_report(
        self, h: AlgebraElement, ideals: Optional[Sequence[Sequence[AlgebraElement]]] = None
    ) -> AntiEllipticReport:
        algebra = h.algebra
        bases = self._ideal_bases(algebra, ideals)
        if algebra.dim <= 1:
            return AntiEllipticReport(verdict=True, ideal_dims=[b.shape[1] for b in bases], elliptic=[True] * len(bases), n_h_dim=0, quotient_dim=0)

        stacked = np.hstack(bases)
        weights = np.linalg.solve(stacked, h.coords)
        ad_full = liealg_service.ad_matrix(h)
        elliptic, n_h_dim, leftover = [], 0, 0.0
        offset = 0
        for basis in bases:
            k = basis.shape[1]
            component = basis @ weights[offset: offset + k]
            offset += k
            # ad h preserves each ideal and acts there through its own component
            restricted = np.linalg.lstsq(basis, ad_full @ basis, rcond=None)[0]
            ok = self._is_elliptic(restricted)
            elliptic.append(ok)
            if ok:
                leftover = max(leftover, float(np.linalg.norm(component)))
            else:
                n_h_dim += k
        quotient = algebra.dim - n_h_dim - (1 if leftover > self.tolerance else 0)
        return AntiEllipticReport(
            verdict=quotient == 0,
            ideal_dims=[b.shape[1] for b in bases],
            elliptic=elliptic,
            n_h_dim=n_h_dim,
            quotient_dim=quotient,
        )

    def anti_elliptic(self, h: AlgebraElement, ideals: Optional[Sequence[Sequence[AlgebraElement]]] = None) -> bool:
        return self.anti_elliptic_report(h, ideals).verdict

    def grading_consistency_check(self, grading: EulerGrading) -> bool:
        """g_0 lies in R h + [g_1, g_-1]."""
        q1, qm, q0 = grading.eigenbasis(1), grading.eigenbasis(-1), grading.eigenbasis(0)
        c = grading.algebra.structure_constants
        brackets = np.einsum("ai,bj,abk->kij", q1, qm, c).reshape(grading.algebra.dim, -1)
        span = np.hstack([grading.h.coords[:, None], brackets])
        coeffs, *_ = np.linalg.lstsq(span, q0, rcond=None)
        return bool(np.abs(span @ coeffs - q0).max(initial=0.0) < self.tolerance)


modular_service = ModularAnalysisService()
