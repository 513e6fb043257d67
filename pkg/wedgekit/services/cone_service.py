import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linprog, nnls

from wedgekit.config import settings
from wedgekit.exceptions import DomainError, UnsupportedError
from wedgekit.models import AlgebraElement, AlgebraFamily, ConeLabel, ConeSpec, EulerGrading, LieAlgebra
from wedgekit.services.liealg_service import liealg_service

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConeValidation:
    pointed: bool
    invariant: bool
    samples: int
    worst_residual: float


class ConeService:
    """Finitely generated invariant cones in a Lie algebra"""

    def make_cone(self, label: str, algebra: LieAlgebra) -> ConeSpec:
        label = ConeLabel(label)
        if label == ConeLabel.TRIVIAL:
            return ConeSpec(label, algebra, [])

        if label == ConeLabel.SL2_STANDARD:
            if algebra.family != AlgebraFamily.SL or algebra.params.get("n") != 2:
                raise UnsupportedError("The sl2-standard cone lives in sl2")
            generators = []
            for phi in np.linspace(0.0, 2.0 * np.pi, 16, endpoint=False):
                # b e + c f + a h with a^2 = -bc on the boundary
                generators.append(algebra.element([1.0 + np.cos(phi), -(1.0 - np.cos(phi)), np.sin(phi)]))
            return ConeSpec(label, algebra, generators)

        if label in (ConeLabel.POINCARE_FORWARD, ConeLabel.POINCARE_SPACELIKE):
            if algebra.family != AlgebraFamily.ISO:
                raise UnsupportedError(f"{label.value} cone lives in iso(1,d)")
            d = algebra.params["d"]
            p = [algebra.basis_element(self.translation_index(algebra, mu)) for mu in range(d + 1)]
            if label == ConeLabel.POINCARE_FORWARD:
                generators = [p[0]] + [p[0] + s * p[i] for i in range(1, d + 1) for s in (1.0, -1.0)]
            else:
                if d < 2:
                    raise UnsupportedError("The spacelike cone needs at least two spatial directions")
                generators = [p[2]]
                if d >= 3:
                    generators += [p[2] + 0.5 * p[3], p[2] - 0.5 * p[3]]
            return ConeSpec(label, algebra, generators)

        raise UnsupportedError(f"No built-in cone with label {label.value}")

    def custom_cone(self, generators) -> ConeSpec:
        if not generators:
            raise DomainError("A custom cone needs at least one generator")
        return ConeSpec(ConeLabel.CUSTOM, generators[0].algebra, list(generators))

    @staticmethod
    def translation_index(algebra: LieAlgebra, mu: int) -> int:
        d = algebra.params["d"]
        return d * (d + 1) // 2 + mu

    def contains(self, cone: ConeSpec, x: AlgebraElement, tol: float = 1e-8) -> bool:
        if x.algebra is not cone.algebra:
            raise DomainError("Cone and element live in different algebras")
        scale = max(1.0, x.norm())
        v = x.coords
        if cone.label == ConeLabel.TRIVIAL:
            return x.norm() <= tol

        if cone.label == ConeLabel.SL2_STANDARD:
            b, c, a = v
            return bool(b >= -tol * scale and c <= tol * scale and a * a <= -b * c + tol * scale ** 2)

        if cone.label == ConeLabel.POINCARE_FORWARD:
            d = cone.algebra.params["d"]
            lorentz = v[: d * (d + 1) // 2]
            t = v[d * (d + 1) // 2:]
            return bool(
                np.abs(lorentz).max(initial=0.0) <= tol * scale and t[0] >= np.linalg.norm(t[1:]) - tol * scale
            )

        weights, residual = nnls(cone.generator_matrix, v)
        return bool(residual <= tol * scale)

    def is_pointed(self, cone: ConeSpec) -> bool:
        """No nonnegative combination of generators with unit weight sum vanishes."""
        g = cone.generator_matrix
        k = g.shape[1]
        if k == 0:
            return True
        if np.any(np.linalg.norm(g, axis=0) < 1e-12):
            return False
        a_eq = np.vstack([g, np.ones((1, k))])
        b_eq = np.concatenate([np.zeros(g.shape[0]), [1.0]])
        res = linprog(np.zeros(k), A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * k, method="highs")
        if res.status == 0:
            return bool(np.linalg.norm(g @ res.x) > 1e-8)
        return True

    def validate_cone(
        self,
        cone: ConeSpec,
        grading: Optional[EulerGrading] = None,
        samples: Optional[int] = None,
        seed: Optional[int] = None,
    ) -> ConeValidation:
        """Pointedness LP plus sampled Ad^eps invariance.

        Odd samples are the reflection of ``grading`` composed with an even sample.
        """
        from wedgekit.services.euler_service import euler_service

        samples = settings.cone_samples if samples is None else samples
        seed = settings.seed if seed is None else seed
        pointed = self.is_pointed(cone)
        reflection = euler_service.reflection_element(grading) if grading is not None else None

        worst = 0.0
        invariant = True
        algebra = cone.algebra
        for index in range(samples):
            rng = np.random.default_rng([seed, index])
            x = rng.standard_normal(algebra.dim)
            g = liealg_service.exp_element(algebra.element(0.5 * x / np.linalg.norm(x)))
            if reflection is not None and index % 2 == 1:
                g = reflection @ g
            for generator in cone.generators:
                image = g.parity * liealg_service.adjoint_action(g, generator)
                if not self.contains(cone, image, tol=settings.cone_membership_tolerance):
                    invariant = False
                    weights, residual = nnls(cone.generator_matrix, image.coords)
                    worst = max(worst, float(residual))
        if not invariant:
            logger.warning(f"Cone {cone.label.value} failed the invariance sample (worst {worst:.3e})")
        return ConeValidation(pointed=pointed, invariant=invariant, samples=samples, worst_residual=worst)


cone_service = ConeService()
