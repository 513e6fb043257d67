import logging
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import expm

from wedgekit.config import settings
from wedgekit.exceptions import DomainError, NumericError, UnsupportedError
from wedgekit.models import (
    AlgebraElement,
    AlgebraFamily,
    CausalPoint,
    ConeLabel,
    ConeSpec,
    EulerGrading,
    GroupElement,
    OrderResult,
    OrderStatus,
    WedgeBase,
    WedgeCouple,
)
from wedgekit.services.euler_service import euler_service
from wedgekit.services.liealg_service import liealg_service

logger = logging.getLogger(__name__)

Interval = Tuple[float, float]
POSITIVE_HALF_LINE: Interval = (0.0, np.inf)


class WedgeService:
    """Abstract Euler wedges, their order and the de Sitter positivity region"""

    def __init__(self):
        self.tolerance = settings.grading_tolerance

    def base_couple(self, grading: EulerGrading, seed: Optional[int] = None) -> WedgeCouple:
        tau = euler_service.euler_involution(grading)
        try:
            reflection = euler_service.reflection_element(grading)
        except UnsupportedError as e:
            logger.warning(f"No reflection element for {grading.algebra.name}: {e}")
            reflection = None
        symmetry = euler_service.is_symmetric(grading, seed=seed)
        flip = symmetry.conjugator if symmetry.source == "certificate" else None
        base = WedgeBase(h=grading.h, tau=tau, reflection=reflection, flip=flip)
        return WedgeCouple(h=grading.h, tau=tau, base=base, transporter=GroupElement.identity(grading.algebra.matrix_size))

    def twisted_adjoint(self, g: GroupElement, x: AlgebraElement) -> AlgebraElement:
        return g.parity * liealg_service.adjoint_action(g, x)

    def act(self, g: GroupElement, couple: WedgeCouple) -> WedgeCouple:
        algebra = couple.h.algebra
        h = self.twisted_adjoint(g, couple.h)
        ad_g = liealg_service.adjoint_matrix(g, algebra)
        tau_matrix = ad_g @ couple.tau.matrix @ np.linalg.inv(ad_g)

        grading = euler_service.is_euler(h)
        if grading is None:
            raise NumericError("Transported element failed the Euler recheck")
        tau = euler_service.euler_involution(grading)
        residual = float(np.abs(tau.matrix - tau_matrix).max())
        if residual > self.tolerance * max(1.0, float(np.linalg.cond(ad_g))):
            raise NumericError(f"Transported involution disagrees with the grading of the image (residual {residual:.3e})")

        transporter = g @ couple.transporter if couple.transporter is not None else None
        return WedgeCouple(h=h, tau=tau, base=couple.base, transporter=transporter)

    def dual(self, couple: WedgeCouple) -> WedgeCouple:
        """(-h, tau); transporter continues through the even flip when known, else the reflection."""
        base = couple.base
        step = base.flip if base.flip is not None else base.reflection
        transporter = None
        if couple.transporter is not None and step is not None:
            transporter = couple.transporter @ step
        grading = euler_service.is_euler(-couple.h)
        tau = euler_service.euler_involution(grading)
        return WedgeCouple(h=-couple.h, tau=tau, base=base, transporter=transporter)

    def same_couple(self, w1: WedgeCouple, w2: WedgeCouple) -> bool:
        return bool(
            np.linalg.norm(w1.h.coords - w2.h.coords) < self.tolerance
            and np.abs(w1.tau.matrix - w2.tau.matrix).max() < self.tolerance
        )

    # Order

    def leq(
        self,
        w1: WedgeCouple,
        w2: WedgeCouple,
        cone: ConeSpec,
        g1: Optional[GroupElement] = None,
        g2: Optional[GroupElement] = None,
    ) -> OrderResult:
        g1 = w1.transporter if g1 is None else g1
        g2 = w2.transporter if g2 is None else g2
        if g1 is None or g2 is None:
            raise DomainError("Order queries need transporters from the base couple")
        k = g2.inverse() @ g1

        if cone.label == ConeLabel.TRIVIAL:
            return self._stabilizer_order(k, w1.base)
        if cone.label == ConeLabel.SL2_STANDARD:
            return self._sl2_order(k, w1.base)
        raise UnsupportedError(f"Order for cone {cone.label.value} is not implemented")

    def _stabilizer_order(self, k: GroupElement, base: WedgeBase) -> OrderResult:
        h = self.twisted_adjoint(k, base.h)
        ad_k = liealg_service.adjoint_matrix(k, base.h.algebra)
        tau = ad_k @ base.tau.matrix @ np.linalg.inv(ad_k)
        fixed = np.linalg.norm(h.coords - base.h.coords) < self.tolerance
        commutes = np.abs(tau - base.tau.matrix).max() < self.tolerance
        if fixed and commutes:
            return OrderResult(OrderStatus.HOLDS, reason="stabilizer")
        return OrderResult(OrderStatus.FAILS, reason="not in the stabilizer")

    def _sl2_order(self, k: GroupElement, base: WedgeBase) -> OrderResult:
        algebra = base.h.algebra
        if algebra.family != AlgebraFamily.SL or algebra.params.get("n") != 2:
            raise UnsupportedError("The sl2-standard order needs sl2")
        if np.linalg.norm(base.h.coords - np.array([0.0, 0.0, 0.5])) > self.tolerance:
            raise UnsupportedError("The sl2-standard order is anchored at h = diag(1,-1)/2")
        if k.parity != 1:
            raise UnsupportedError("Gauss decomposition is implemented for even transporters")

        det = float(np.linalg.det(k.matrix))
        if det <= 0:
            raise DomainError("Even sl2 transporters have positive determinant")
        m = k.matrix / np.sqrt(det)
        boundary = settings.boundary_tolerance
        if abs(m[1, 1]) < boundary:
            return OrderResult(OrderStatus.INDETERMINATE, reason="zero pivot")

        c_plus = float(m[0, 1] / m[1, 1])
        c_minus = float(m[1, 0] / m[1, 1])
        middle = (float(1.0 / m[1, 1]), float(m[1, 1]))
        for value in (c_plus, c_minus):
            if value != 0.0 and abs(value) <= boundary:
                return OrderResult(OrderStatus.INDETERMINATE, c_plus, middle, c_minus, reason="cone boundary")
        status = OrderStatus.HOLDS if c_plus >= 0.0 and c_minus >= 0.0 else OrderStatus.FAILS
        return OrderResult(status, c_plus, middle, c_minus, reason="gauss decomposition")

    def is_local_pair(self, w1: WedgeCouple, w2: WedgeCouple, cone: ConeSpec) -> OrderResult:
        return self.leq(w1, self.dual(w2), cone)

    # Moebius picture of sl2

    @staticmethod
    def mobius_apply(g: np.ndarray, x: float) -> float:
        a, b, c, d = g[0, 0], g[0, 1], g[1, 0], g[1, 1]
        if np.isinf(x):
            return np.inf if c == 0 else a / c
        denominator = c * x + d
        if denominator == 0:
            return np.inf
        return (a * x + b) / denominator

    def interval_image(self, g: np.ndarray, interval: Interval = POSITIVE_HALF_LINE) -> Interval:
        if np.linalg.det(g) <= 0:
            raise DomainError("Orientation reversing maps are not supported")
        return self.mobius_apply(g, interval[0]), self.mobius_apply(g, interval[1])

    @staticmethod
    def _angle(x: float) -> float:
        return np.pi if np.isinf(x) else 2.0 * np.arctan(x)

    def interval_contains(self, outer: Interval, inner: Interval, tol: float = 1e-8) -> Optional[bool]:
        """Containment of positively oriented arcs of the circle; None near the boundary."""
        two_pi = 2.0 * np.pi
        start = self._angle(outer[0])
        length = (self._angle(outer[1]) - start) % two_pi
        s = (self._angle(inner[0]) - start) % two_pi
        e = s + (self._angle(inner[1]) - self._angle(inner[0])) % two_pi
        if min(s, two_pi - s) < tol or abs(e - length) < tol:
            return None
        return bool(s < length and e < length)

    # de Sitter space

    def positivity_region_membership(self, h: AlgebraElement, point: CausalPoint) -> bool:
        algebra = h.algebra
        if algebra.family != AlgebraFamily.SO or algebra.params.get("p") != 1:
            raise DomainError("Positivity regions are computed for Euler elements of so(1,d)")
        if euler_service.is_euler(h) is None:
            raise DomainError(f"{h.coords.tolist()} is not an Euler element of {algebra.name}")
        x = np.asarray(point.coords, dtype=float)
        if x.shape != (algebra.matrix_size,):
            raise DomainError(f"Point must have {algebra.matrix_size} coordinates")
        if point.residual > 1e-8:
            raise DomainError(f"Point is off the de Sitter hyperboloid (residual {point.residual:.3e})")
        v = h.matrix @ x
        square = v[0] ** 2 - np.sum(v[1:] ** 2)
        return bool(square > 1e-10 and v[0] > 0)

    def de_sitter_reflection(self, grading: EulerGrading, point: CausalPoint) -> CausalPoint:
        # exp(i pi h) itself, no phase rescaling: the sign decides which pair of coordinates flips
        r = expm(1j * np.pi * grading.h.matrix)
        if np.abs(r.imag).max() > self.tolerance:
            raise DomainError(f"exp(i pi h) is not real on the defining space of {grading.algebra.name}")
        return CausalPoint(tuple(float(v) for v in r.real @ np.asarray(point.coords)))


wedge_service = WedgeService()
