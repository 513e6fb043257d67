import logging
from typing import Dict, Optional, Sequence

import numpy as np
from scipy.linalg import expm
from scipy.stats import poisson

from wedgekit.config import settings
from wedgekit.exceptions import AccuracyError, DomainError
from wedgekit.models import FockTruncation
from wedgekit.schemas import CutoffRefinement, WeylReport

logger = logging.getLogger(__name__)


class FockService:
    """Weyl operators on a truncated symmetric Fock space"""

    def make_truncation(self, modes: int, n_max: int) -> FockTruncation:
        if modes < 1:
            raise DomainError("At least one mode is required")
        trunc = FockTruncation(modes=modes, n_max=n_max)
        if n_max < settings.weyl_min_cutoff:
            raise AccuracyError(f"Occupation cutoff {n_max} is below {settings.weyl_min_cutoff}")
        if trunc.dimension > settings.fock_max_dimension:
            raise AccuracyError(f"Truncated Fock space of dimension {trunc.dimension} exceeds {settings.fock_max_dimension}")
        return trunc

    def _amplitude(self, trunc: FockTruncation, xi: Sequence[complex]) -> np.ndarray:
        xi = np.atleast_1d(np.asarray(xi, dtype=complex))
        if xi.shape != (trunc.modes,):
            raise DomainError(f"Amplitude must have {trunc.modes} components")
        return xi

    def field_operator(self, trunc: FockTruncation, xi: Sequence[complex]) -> np.ndarray:
        """Phi(xi) = (a(xi) + a(xi)^dagger) / sqrt 2 with a(xi) antilinear in xi."""
        xi = self._amplitude(trunc, xi)
        a_xi = sum(np.conj(x) * a for x, a in zip(xi, trunc.annihilation))
        return (a_xi + a_xi.conj().T) / np.sqrt(2.0)

    def weyl_op(self, trunc: FockTruncation, xi: Sequence[complex]) -> np.ndarray:
        xi = self._amplitude(trunc, xi)
        if np.linalg.norm(xi) > settings.weyl_max_amplitude:
            raise AccuracyError(f"|xi| = {np.linalg.norm(xi):.3f} is outside the truncation envelope")
        if trunc.n_max < settings.weyl_min_cutoff or trunc.dimension > settings.fock_max_dimension:
            raise AccuracyError("Truncation outside the Weyl accuracy envelope")
        return expm(1j * self.field_operator(trunc, xi))

    @staticmethod
    def truncation_log10_bound(n_max: int, xi: Sequence[complex]) -> float:
        """log10 of the Poisson weight of the displaced vacuum beyond n_max / 2."""
        mean = float(np.sum(np.abs(np.asarray(xi, dtype=complex)) ** 2)) / 2.0
        if mean == 0:
            return -np.inf
        return float(poisson.logsf(n_max // 2, mean) / np.log(10.0))

    def vacuum_residual(self, trunc: FockTruncation, xi: Sequence[complex]) -> float:
        xi = self._amplitude(trunc, xi)
        w = self.weyl_op(trunc, xi)
        expected = np.exp(-np.linalg.norm(xi) ** 2 / 4.0)
        return float(abs(trunc.vacuum @ w @ trunc.vacuum - expected))

    def composition_residual(self, trunc: FockTruncation, xi: Sequence[complex], eta: Sequence[complex]) -> float:
        """w(xi) w(eta) = exp(-i Im<xi, eta> / 2) w(xi + eta) on the low-occupation block."""
        xi, eta = self._amplitude(trunc, xi), self._amplitude(trunc, eta)
        phase = np.exp(-0.5j * np.vdot(xi, eta).imag)
        lhs = self.weyl_op(trunc, xi) @ self.weyl_op(trunc, eta)
        rhs = phase * self.weyl_op(trunc, xi + eta)
        block = trunc.low_block
        return float(np.linalg.norm((lhs - rhs)[np.ix_(block, block)], 2))

    def unitarity_residual(self, trunc: FockTruncation, xi: Sequence[complex]) -> float:
        w = self.weyl_op(trunc, xi)
        block = trunc.low_block
        gram = (w.conj().T @ w)[np.ix_(block, block)]
        return float(np.linalg.norm(gram - np.eye(len(block)), 2))

    def _residuals(self, trunc: FockTruncation, xi: np.ndarray, eta: np.ndarray) -> Dict[str, float]:
        return {
            "vacuum": self.vacuum_residual(trunc, xi),
            "composition": self.composition_residual(trunc, xi, eta),
            "unitarity": self.unitarity_residual(trunc, xi),
        }

    def cutoff_refinement(
        self, xi: Sequence[complex], eta: Sequence[complex], n_max: int = 64, modes: Optional[int] = None
    ) -> Optional[CutoffRefinement]:
        """Residuals at n_max and 2 n_max; each must fall strictly or already sit at round-off.

        None when the doubled truncation leaves the dimension envelope.
        """
        xi = np.atleast_1d(np.asarray(xi, dtype=complex))
        eta = np.atleast_1d(np.asarray(eta, dtype=complex))
        modes = len(xi) if modes is None else modes
        if FockTruncation(modes=modes, n_max=2 * n_max).dimension > settings.fock_max_dimension:
            logger.warning(f"No cutoff refinement for {modes} mode(s): n_max={2 * n_max} exceeds the dimension envelope")
            return None
        coarse = self._residuals(self.make_truncation(modes, n_max), xi, eta)
        fine = self._residuals(self.make_truncation(modes, 2 * n_max), xi, eta)
        amplitudes = np.concatenate([xi, eta])
        bound_decreases = bool(
            self.truncation_log10_bound(2 * n_max, amplitudes) < self.truncation_log10_bound(n_max, amplitudes)
            or np.linalg.norm(amplitudes) == 0
        )
        floor = settings.fock_roundoff_floor
        converged = bound_decreases and all(
            fine[name] < coarse[name] or max(fine[name], coarse[name]) <= floor for name in coarse
        )
        if not converged:
            logger.warning(f"Weyl residuals do not decrease from n_max={n_max} to {2 * n_max}: {coarse} -> {fine}")
        return CutoffRefinement(
            coarse_n_max=n_max,
            fine_n_max=2 * n_max,
            coarse=coarse,
            fine=fine,
            bound_decreases=bound_decreases,
            converged=converged,
        )

    def weyl_check(
        self,
        xi: Sequence[complex],
        eta: Sequence[complex],
        n_max: int = 64,
        modes: Optional[int] = None,
    ) -> WeylReport:
        xi = np.atleast_1d(np.asarray(xi, dtype=complex))
        eta = np.atleast_1d(np.asarray(eta, dtype=complex))
        modes = len(xi) if modes is None else modes
        trunc = self.make_truncation(modes, n_max)
        logger.info(f"Weyl checks on {modes} mode(s), n_max={n_max}")
        return WeylReport(
            modes=modes,
            n_max=n_max,
            xi=[[float(v.real), float(v.imag)] for v in xi],
            eta=[[float(v.real), float(v.imag)] for v in eta],
            vacuum_residual=self.vacuum_residual(trunc, xi),
            composition_residual=self.composition_residual(trunc, xi, eta),
            unitarity_residual=self.unitarity_residual(trunc, xi),
            truncation_log10_bound=self.truncation_log10_bound(n_max, np.concatenate([xi, eta])),
            refinement=self.cutoff_refinement(xi, eta, n_max, modes),
        )


fock_service = FockService()
