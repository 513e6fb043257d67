import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from wedgekit.config import settings
from wedgekit.exceptions import DomainError, NumericError, QuadratureBoxError
from wedgekit.models import RapidityModel
from wedgekit.schemas import (
    BorchersReport,
    BWResidual,
    GaussianComponent,
    GaussianSum,
    GridRefinement,
    RapidityModelInfo,
    RapidityReport,
    RegularityProfile,
)

logger = logging.getLogger(__name__)

Window = Callable[[np.ndarray, np.ndarray], np.ndarray]

# exp(-40) is below double precision relative to the peak of a Gaussian spectrum
SPECTRAL_EXPONENT_CUTOFF = 40.0
OVERFLOW_EXPONENT = 700.0
BORCHERS_T = (-1.0, -0.5, 0.5, 1.0)
BORCHERS_S = (-1.0, -0.5, 0.5, 1.0)
INCLUSION_T = (0.0, 0.5, 1.0, 2.0, -10.0)

# (width, x1) of right-wedge Gaussians centered on the x1 axis
BW_FIXTURES = ((0.3, 5.0), (0.4, 5.0), (0.45, 5.0), (0.3, 4.0), (0.35, 4.5), (0.3, 3.5))
REGULARITY_FAMILY = ((0.0, 4.0), (0.2, 4.5), (-0.2, 5.0), (0.3, 5.5), (-0.3, 6.0), (0.0, 6.5))
REGULARITY_SAMPLES = ((), ((0.0, 0.1), (0.0, -0.1)), ((0.0, 10.0), (0.0, -10.0)))


@dataclass(frozen=True, eq=False)
class RapidityVector:
    values: np.ndarray
    quadrature_error: float
    label: str = "f"


@dataclass(frozen=True, eq=False)
class RindlerTomita:
    """Literal S = J Delta^(1/2) for the right wedge on the rapidity grid.

    Delta^(1/2) continues psi(theta) to psi(theta - i pi), which is the Fourier
    multiplier exp(pi omega) for numpy's transform convention. Above
    ``resolved_omega`` the multiplier lifts the round-off floor past
    ``tolerance``, so those positive frequencies are cut; a vector carrying
    spectral weight beyond it has no reliable image and raises instead.
    """

    model: RapidityModel
    multiplier: np.ndarray
    resolved_omega: float
    tolerance: float

    def apply(self, psi: np.ndarray) -> np.ndarray:
        coefficients = np.fft.fft(psi)
        total = np.linalg.norm(coefficients)
        if total == 0:
            return np.zeros(self.model.n, dtype=complex)
        peak = np.abs(coefficients).max()
        coefficients[np.abs(coefficients) <= settings.spectral_noise_floor * peak] = 0.0

        unresolved = np.abs(self.model.omega) > self.resolved_omega
        tail = np.linalg.norm(coefficients[unresolved]) / total
        if tail > self.tolerance:
            raise NumericError(
                f"{tail:.1e} of the spectrum lies beyond |omega| = {self.resolved_omega:.2f} where exp(pi omega) "
                f"amplifies round-off; use fixed_point_residual"
            )
        image = np.conj(np.fft.ifft(coefficients * self.multiplier))
        gain = np.linalg.norm(image) / np.linalg.norm(psi)
        if gain > 1.0 / self.tolerance:
            raise NumericError(f"|S psi| / |psi| = {gain:.1e}: psi is outside the numerical domain of Delta^(1/2)")
        return image


def boost_matrix(s: float) -> np.ndarray:
    return np.array([[np.cosh(s), np.sinh(s)], [np.sinh(s), np.cosh(s)]])


def right_wedge_window(translations: Sequence[Tuple[float, float]]) -> Window:
    """Indicator of the intersection of W_R + a over a and the origin."""
    shifts = [(0.0, 0.0)] + [tuple(a) for a in translations]

    def window(x0: np.ndarray, x1: np.ndarray) -> np.ndarray:
        inside = np.ones(np.broadcast(x0, x1).shape, dtype=bool)
        for a0, a1 in shifts:
            inside &= (x1 - a1) > np.abs(x0 - a0)
        return inside.astype(float)

    return window


class RapidityService:
    """Free scalar one-particle space in 1+1 dimensions, parametrized by rapidity"""

    def make_model(
        self, mass: Optional[float] = None, n: Optional[int] = None, theta_max: Optional[float] = None
    ) -> RapidityModel:
        mass = settings.mass if mass is None else float(mass)
        n = settings.grid if n is None else int(n)
        theta_max = settings.theta_max if theta_max is None else float(theta_max)
        if mass <= 0:
            raise DomainError("Mass must be positive")
        if n < 2 or n & (n - 1):
            raise DomainError(f"Grid size {n} is not a power of two")
        if theta_max < 10:
            raise DomainError("theta_max below 10 truncates the mass shell")
        logger.info(f"Rapidity model m={mass}, n={n}, theta_max={theta_max}")
        return RapidityModel(mass=mass, n=n, theta_max=theta_max)

    # Fourier transform onto the mass shell

    def _component_vector(
        self,
        model: RapidityModel,
        component: GaussianComponent,
        boost: float = 0.0,
        window: Optional[Window] = None,
        refine: int = 1,
    ) -> np.ndarray:
        c = np.asarray(component.center, dtype=float)
        radius, width = component.support_radius, component.width
        lam = boost_matrix(boost)
        corners = (c + radius * np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], dtype=float)) @ lam.T
        if np.abs(corners).max() > settings.quadrature_box:
            raise QuadratureBoxError(
                f"Support of {component.center} (radius {radius}) leaves the quadrature box {settings.quadrature_box}"
            )

        p_cut = np.sqrt(2.0 * SPECTRAL_EXPONENT_CUTOFF) / width * np.exp(abs(boost))
        step = 0.9 * np.pi / p_cut / refine
        middle = lam @ c
        half = np.abs(corners - middle).max(axis=0)
        nodes = [middle[i] + step * np.arange(-np.ceil(half[i] / step), np.ceil(half[i] / step) + 1) for i in (0, 1)]
        x0, x1 = np.meshgrid(nodes[0], nodes[1], indexing="ij")

        # (Lambda(s) g)(x) = g(Lambda(-s) x)
        y0 = np.cosh(boost) * x0 - np.sinh(boost) * x1
        y1 = -np.sinh(boost) * x0 + np.cosh(boost) * x1
        values = component.amplitude * np.exp(-((y0 - c[0]) ** 2 + (y1 - c[1]) ** 2) / (2.0 * width ** 2))
        if window is not None:
            values = values * window(x0, x1)

        rest0, rest1 = model.momentum(-boost)
        mask = width ** 2 * (rest0 ** 2 + rest1 ** 2) / 2.0 <= SPECTRAL_EXPONENT_CUTOFF
        p0, p1 = model.momentum()
        e0 = np.exp(1j * np.outer(p0[mask], nodes[0]))
        e1 = np.exp(-1j * np.outer(p1[mask], nodes[1]))
        out = np.zeros(model.n, dtype=complex)
        out[mask] = step ** 2 / (2.0 * np.pi) * np.einsum("tj,jk,tk->t", e0, values, e1)
        return out

    def _sum_vector(self, model, function: GaussianSum, boost: float, window: Optional[Window], refine: int) -> np.ndarray:
        total = np.zeros(model.n, dtype=complex)
        for component in function.components:
            total += self._component_vector(model, component, boost, window, refine)
        return total

    def rapidity_vector(
        self,
        model: RapidityModel,
        function: GaussianSum,
        boost: float = 0.0,
        window: Optional[Window] = None,
    ) -> RapidityVector:
        """f^(theta) = (2 pi)^-1 int f(x) exp(i(p0 x0 - p1 x1)) dx on the grid.

        ``boost`` transforms the boosted function Lambda(s)f by direct quadrature,
        ``window`` multiplies f by an indicator before transforming. The error
        estimate is the change under halving the quadrature step.
        """
        coarse = self._sum_vector(model, function, boost, window, 1)
        fine = self._sum_vector(model, function, boost, window, 2)
        error = float(np.abs(fine - coarse).max(initial=0.0))
        return RapidityVector(values=fine, quadrature_error=error, label=function.label)

    # Poincare action and modular objects

    def inner(self, model: RapidityModel, psi: np.ndarray, phi: np.ndarray) -> complex:
        return complex(model.spacing * np.vdot(psi, phi))

    def norm(self, model: RapidityModel, psi: np.ndarray) -> float:
        return float(np.sqrt(model.spacing) * np.linalg.norm(psi))

    def boost(self, model: RapidityModel, psi: np.ndarray, s: float) -> np.ndarray:
        """U(Lambda(s)) psi (theta) = psi(theta - s), as a spectral shift."""
        return np.fft.ifft(np.fft.fft(psi) * np.exp(-1j * model.omega * s))

    def translate(self, model: RapidityModel, psi: np.ndarray, a: Sequence[float]) -> np.ndarray:
        p0, p1 = model.momentum()
        return psi * np.exp(1j * (p0 * a[0] - p1 * a[1]))

    def lightlike_translation(self, model: RapidityModel, psi: np.ndarray, t: float) -> np.ndarray:
        return self.translate(model, psi, (t, t))

    def modular_group(self, model: RapidityModel, psi: np.ndarray, t: float) -> np.ndarray:
        """Delta^(it) = U(Lambda(-2 pi t))."""
        return self.boost(model, psi, -2.0 * np.pi * t)

    @staticmethod
    def modular_conjugation(psi: np.ndarray) -> np.ndarray:
        return np.conj(psi)

    def rindler_tomita(self, model: RapidityModel, tolerance: Optional[float] = None) -> RindlerTomita:
        if np.pi * model.omega_max > OVERFLOW_EXPONENT:
            raise NumericError(
                f"exp(pi * omega_max) overflows for n={model.n}, theta_max={model.theta_max}; use fixed_point_residual"
            )
        tolerance = settings.bw_threshold if tolerance is None else tolerance
        # exp(pi w) * noise floor stays below the tolerance up to here
        resolved = float(np.log(tolerance / settings.spectral_noise_floor) / np.pi)
        omega = model.omega
        multiplier = np.where(omega <= resolved, np.exp(np.pi * np.minimum(omega, resolved)), 0.0)
        return RindlerTomita(model=model, multiplier=multiplier, resolved_omega=resolved, tolerance=tolerance)

    def fixed_point_residual(self, model: RapidityModel, psi: np.ndarray) -> float:
        """Relative distance of psi from Fix(S) on the non-negative spectral half.

        S psi = psi is equivalent to F(w) = exp(-pi w) conj F(-w) for w >= 0,
        which never exponentiates a positive frequency. The gap is measured
        against the larger of the two sides it compares, so it equals
        |S psi - psi| / |psi| on multiples c f of a fixed vector f.
        """
        coefficients = np.fft.fft(psi)
        omega = model.omega
        half = np.flatnonzero(omega >= 0)
        mirrored = (-half) % model.n
        direct = coefficients[half]
        reflected = np.exp(-np.pi * omega[half]) * np.conj(coefficients[mirrored])
        scale = max(np.linalg.norm(direct), np.linalg.norm(reflected))
        if scale == 0:
            return 0.0
        return float(np.linalg.norm(direct - reflected) / scale)

    def grid_refinement(
        self, model: RapidityModel, functions: Sequence[GaussianSum], factor: Optional[int] = None
    ) -> List[GridRefinement]:
        """Fixed-point residuals on the model grid and on a grid ``factor`` times finer.

        The two grids agree when refining does not raise the residual by more
        than the round-off floor.
        """
        factor = settings.refinement_factor if factor is None else factor
        fine = self.make_model(model.mass, model.n * factor, model.theta_max)
        results = []
        for function in functions:
            coarse_residual = self.fixed_point_residual(model, self.rapidity_vector(model, function).values)
            fine_residual = self.fixed_point_residual(fine, self.rapidity_vector(fine, function).values)
            results.append(
                GridRefinement(
                    label=function.label,
                    coarse_n=model.n,
                    fine_n=fine.n,
                    coarse_residual=coarse_residual,
                    fine_residual=fine_residual,
                    converged=fine_residual <= coarse_residual + settings.refinement_floor,
                )
            )
        return results

    # Probes

    def locality_check(self, model: RapidityModel, f: np.ndarray, g: np.ndarray) -> float:
        return abs(self.inner(model, f, g).imag)

    def regularity_probe(
        self,
        model: RapidityModel,
        translations: Sequence[Tuple[float, float]],
        functions: Sequence[GaussianSum],
    ) -> RegularityProfile:
        """Rank of the family restricted to the intersection of translated right wedges.

        Approximation study: a rank that stays full as the family grows is the
        cyclicity proxy for the intersected subspace.
        """
        window = right_wedge_window(translations)
        scale = np.sqrt(model.spacing)
        vectors = np.column_stack([scale * self.rapidity_vector(model, function, window=window).values for function in functions])
        norms = [float(v) for v in np.linalg.norm(vectors, axis=0)]
        real = np.vstack([vectors.real, vectors.imag])
        rotated = np.vstack([-vectors.imag, vectors.real])
        if max(norms, default=0.0) < 1e-10:
            real_rank = complex_rank = 0
        else:
            real_rank = self._rank(real)
            complex_rank = self._rank(np.hstack([real, rotated]))
        logger.debug(f"Regularity probe over {list(translations)}: ranks {real_rank}/{complex_rank}")
        return RegularityProfile(
            translations=[list(map(float, a)) for a in translations],
            norms=norms,
            real_rank=real_rank,
            complex_rank=complex_rank,
        )

    @staticmethod
    def _rank(matrix: np.ndarray) -> int:
        singular = np.linalg.svd(matrix, compute_uv=False)
        if singular.size == 0 or singular[0] == 0:
            return 0
        return int(np.sum(singular > settings.rank_threshold * singular[0]))

    def borchers_probe(
        self,
        model: RapidityModel,
        functions: Sequence[GaussianSum],
        t_values: Sequence[float] = BORCHERS_T,
        s_values: Sequence[float] = BORCHERS_S,
    ) -> BorchersReport:
        """J U(t) J = U(-t) and U(Lambda(s)) U(t) U(Lambda(-s)) = U(e^s t) for P = m e^(-theta)."""
        reflection, dilation = 0.0, 0.0
        for function in functions:
            psi = self.rapidity_vector(model, function).values
            size = np.linalg.norm(psi)
            if size == 0:
                continue
            for t in t_values:
                lhs = self.modular_conjugation(self.lightlike_translation(model, self.modular_conjugation(psi), t))
                rhs = self.lightlike_translation(model, psi, -t)
                reflection = max(reflection, float(np.linalg.norm(lhs - rhs) / size))
                for s in s_values:
                    moved = self.boost(model, self.lightlike_translation(model, self.boost(model, psi, -s), t), s)
                    target = self.lightlike_translation(model, psi, np.exp(s) * t)
                    dilation = max(dilation, float(np.linalg.norm(moved - target) / size))
        return BorchersReport(
            reflection_residual=reflection,
            dilation_residual=dilation,
            t_values=list(t_values),
            s_values=list(s_values),
        )

    def borchers_inclusion_probe(
        self, model: RapidityModel, function: GaussianSum, ts: Sequence[float] = INCLUSION_T
    ) -> List[Tuple[float, float]]:
        """S-fixed-point residual of a right-wedge vector after lightlike translation by t."""
        psi = self.rapidity_vector(model, function).values
        return [(float(t), self.fixed_point_residual(model, self.lightlike_translation(model, psi, t))) for t in ts]

    # Acceptance run

    def bw_fixtures(self, mirrored: bool = False) -> List[GaussianSum]:
        sign = -1.0 if mirrored else 1.0
        prefix = "left" if mirrored else "right"
        return [
            GaussianSum.gaussian((0.0, sign * x1), width, label=f"{prefix}-w{width}-x{x1}")
            for width, x1 in BW_FIXTURES
        ]

    def regularity_family(self) -> List[GaussianSum]:
        return [GaussianSum.gaussian(center, 0.4, label=f"deep-{i}") for i, center in enumerate(REGULARITY_FAMILY)]

    def _bw_residuals(self, model: RapidityModel, functions: Sequence[GaussianSum]) -> List[BWResidual]:
        results = []
        for function in functions:
            vector = self.rapidity_vector(model, function)
            results.append(
                BWResidual(
                    label=function.label,
                    residual=self.fixed_point_residual(model, vector.values),
                    quadrature_error=vector.quadrature_error,
                )
            )
        return results

    def run_checks(
        self,
        model: RapidityModel,
        checks: Sequence[str],
        extra_functions: Sequence[GaussianSum] = (),
        tolerance: Optional[float] = None,
    ) -> RapidityReport:
        """Run the named checks; ``extra_functions`` are right-wedge functions joining the BW check."""
        unknown = set(checks) - {"bw", "locality", "regularity", "borchers"}
        if unknown:
            raise DomainError(f"Unknown rapidity checks: {', '.join(sorted(unknown))}")
        threshold = settings.bw_threshold if tolerance is None else tolerance
        report = RapidityReport(model=RapidityModelInfo(mass=model.mass, n=model.n, theta_max=model.theta_max))
        failures = []

        if "bw" in checks:
            right = self.bw_fixtures() + list(extra_functions)
            report.bw_residuals = self._bw_residuals(model, right)
            report.left_wedge_residuals = self._bw_residuals(model, self.bw_fixtures(mirrored=True))
            failures += [f"bw {r.label}: {r.residual:.3e}" for r in report.bw_residuals if r.residual >= threshold]
            failures += [f"left wedge {r.label} fixed: {r.residual:.3e}" for r in report.left_wedge_residuals if r.residual <= 0.1]

            report.refinement = self.grid_refinement(model, right)
            report.converged = all(r.converged for r in report.refinement)
            failures += [
                f"bw {r.label} at n={r.fine_n}: {r.fine_residual:.3e}"
                for r in report.refinement
                if r.fine_residual >= settings.bw_refined_threshold
            ]
            if not report.converged:
                logger.warning("Fixed-point residuals grow under grid refinement")

        if "locality" in checks:
            right = self.rapidity_vector(model, GaussianSum.gaussian((0.0, 3.0), 0.4)).values
            left = self.rapidity_vector(model, GaussianSum.gaussian((0.0, -3.0), 0.4)).values
            second = self.rapidity_vector(model, GaussianSum.gaussian((1.0, 3.2), 0.4)).values
            opposite = self.locality_check(model, right, left)
            report.locality_residuals = {
                "opposite-wedge": opposite,
                "same-wedge": self.locality_check(model, right, second),
            }
            if opposite >= settings.locality_threshold:
                failures.append(f"locality: {opposite:.3e}")

        if "regularity" in checks:
            family = self.regularity_family()
            report.regularity = [self.regularity_probe(model, sample, family) for sample in REGULARITY_SAMPLES]

        if "borchers" in checks:
            report.borchers = self.borchers_probe(model, self.bw_fixtures()[1:3])
            worst = max(report.borchers.reflection_residual, report.borchers.dilation_residual)
            if worst >= settings.locality_threshold:
                failures.append(f"borchers: {worst:.3e}")

        report.failures = failures
        report.passed = not failures
        if failures:
            logger.warning(f"Rapidity checks failing: {'; '.join(failures)}")
        return report


rapidity_service = RapidityService()
