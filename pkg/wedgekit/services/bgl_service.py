import logging
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import expm

from wedgekit.config import settings
from wedgekit.exceptions import AccuracyError, ConditioningError, DomainError, IndeterminateError
from wedgekit.models import (
    AntiLinearOp,
    ConeSpec,
    GroupElement,
    ModularPair,
    ModularRepData,
    OrderStatus,
    RealSubspace,
    WedgeCouple,
)
from wedgekit.schemas import AxiomResult, NetAxiomReport
from wedgekit.services.stdsub_service import stdsub_service
from wedgekit.services.wedge_service import wedge_service

logger = logging.getLogger(__name__)

HK5_TIMES = (0.5, 1.0)


@dataclass(frozen=True, eq=False)
class NetEntry:
    couple: WedgeCouple
    subspace: RealSubspace
    generator: np.ndarray  # A_k with U(exp t h_k) = exp(-i t A_k)
    conjugation: np.ndarray  # realified U(tau_{h_k})
    transport: np.ndarray  # realified V_k relative to the base entry
    dual_of: Optional[int] = None


@dataclass(frozen=True, eq=False)
class BGLNet:
    entries: List[NetEntry]
    spectral_generators: List[np.ndarray] = field(default_factory=list)  # -i dU(x) for cone generators x


class BGLService:
    """Standard subspaces from representation data and the net axiom checker"""

    def bgl_pair(self, rep: ModularRepData) -> ModularPair:
        size = float(np.linalg.norm(rep.generator, 2))
        if size > settings.max_log_delta_norm:
            raise ConditioningError(f"||A|| = {size:.3f} exceeds {settings.max_log_delta_norm}; exp(2 pi A) is too ill conditioned")
        if rep.compatibility_residual > 1e-9:
            raise DomainError(f"J A J + A = {rep.compatibility_residual:.3e}: conjugation does not reverse the one-parameter group")
        pair = ModularPair(J=rep.conjugation, log_delta=rep.generator)
        stdsub_service.validate_pair(pair)
        return pair

    def bgl_subspace(self, rep: ModularRepData) -> RealSubspace:
        return stdsub_service.subspace_from_pair(self.bgl_pair(rep))

    def one_parameter_group(self, generator: np.ndarray, t: float) -> np.ndarray:
        """Realified U(exp t h) = exp(-i t A)."""
        return stdsub_service.realify(expm(-1j * t * generator))

    def build_bgl_net(
        self,
        rep: ModularRepData,
        base: WedgeCouple,
        transports: Sequence[Tuple[GroupElement, np.ndarray]],
    ) -> BGLNet:
        """Entries g_k.W with subspace V_k H and their duals with the symplectic complement.

        ``transports`` pairs each group element g_k with a unitary V_k on C^N.
        """
        n = rep.generator.shape[0]
        entries: List[NetEntry] = []
        items = [(GroupElement.identity(base.h.algebra.matrix_size), np.eye(n, dtype=complex))] + list(transports)
        for g, v in items:
            if np.abs(v.conj().T @ v - np.eye(n)).max() > 1e-10:
                raise DomainError("Transport operators must be unitary")
            couple = wedge_service.act(g, base)
            a_k = v @ rep.generator @ v.conj().T
            v_r = stdsub_service.realify(v)
            j_k = v_r @ rep.conjugation.matrix @ v_r.T
            rep_k = ModularRepData(generator=0.5 * (a_k + a_k.conj().T), conjugation=AntiLinearOp(j_k))
            index = len(entries)
            entries.append(NetEntry(couple, self.bgl_subspace(rep_k), rep_k.generator, j_k, v_r))

            dual_rep = ModularRepData(generator=-rep_k.generator, conjugation=rep_k.conjugation)
            entries.append(
                NetEntry(
                    wedge_service.dual(couple),
                    self.bgl_subspace(dual_rep),
                    dual_rep.generator,
                    j_k,
                    v_r,
                    dual_of=index,
                )
            )
        logger.info(f"Built BGL net with {len(entries)} entries on C^{n}")
        return BGLNet(entries=entries)

    def replace_subspace(self, net: BGLNet, index: int, subspace: RealSubspace) -> BGLNet:
        entries = list(net.entries)
        entries[index] = replace(entries[index], subspace=subspace)
        return BGLNet(entries=entries, spectral_generators=net.spectral_generators)

    def _safe_order(self, w1: WedgeCouple, w2: WedgeCouple, cone: ConeSpec, local: bool = False) -> Optional[bool]:
        try:
            result = wedge_service.is_local_pair(w1, w2, cone) if local else wedge_service.leq(w1, w2, cone)
        except (DomainError, IndeterminateError):
            return None
        if result.status == OrderStatus.INDETERMINATE:
            return None
        return result.status == OrderStatus.HOLDS

    def check_net_axioms(self, net: BGLNet, cone: ConeSpec) -> NetAxiomReport:
        entries = net.entries
        tol = settings.kernel_threshold
        axioms = {}

        # HK1 isotony
        pairs, worst = 0, 0.0
        for i, a in enumerate(entries):
            for j, b in enumerate(entries):
                if i == j or wedge_service.same_couple(a.couple, b.couple):
                    continue
                if self._safe_order(a.couple, b.couple, cone):
                    pairs += 1
                    worst = max(worst, stdsub_service.containment_residual(a.subspace, b.subspace))
        axioms["HK1"] = AxiomResult(
            passed=worst < tol, residual=worst, detail="vacuous" if pairs == 0 else f"{pairs} ordered pairs"
        )

        # HK2 covariance against the base entry
        base = entries[0]
        worst = 0.0
        for entry in entries:
            if entry.dual_of is not None:
                continue
            moved = stdsub_service.apply_operator(entry.transport, base.subspace)
            worst = max(worst, stdsub_service.principal_angle(moved, entry.subspace))
            predicted, residual = self._transport_residual(entry.transport, base.subspace, entry)
            worst = max(worst, residual)
        axioms["HK2"] = AxiomResult(passed=worst < tol, residual=worst)

        # HK3 spectral condition
        lowest = min((float(np.linalg.eigvalsh(p).min()) for p in net.spectral_generators), default=0.0)
        axioms["HK3"] = AxiomResult(
            passed=lowest >= -tol,
            residual=max(0.0, -lowest),
            detail="no cone generators" if not net.spectral_generators else "",
        )

        # HK4 locality
        n = base.subspace.ambient_dim
        cx = stdsub_service.complex_structure(n)
        pairs, worst = 0, 0.0
        for i, a in enumerate(entries):
            for j, b in enumerate(entries):
                if i != j and self._safe_order(a.couple, b.couple, cone, local=True):
                    pairs += 1
                    worst = max(worst, float(np.abs(a.subspace.basis.T @ cx.T @ b.subspace.basis).max()))
        axioms["HK4"] = AxiomResult(passed=worst < tol, residual=worst, detail=f"{pairs} local pairs")

        # HK5 Bisognano-Wichmann and HK8 modular reflection
        hk5, hk8 = 0.0, 0.0
        for entry in entries:
            try:
                _, pair = stdsub_service.tomita_from_subspace(entry.subspace)
            except (DomainError, ConditioningError) as e:
                logger.warning(f"Entry without modular data: {e}")
                hk5 = hk8 = np.inf
                continue
            for t in HK5_TIMES:
                lhs = self.one_parameter_group(entry.generator, t)
                rhs = stdsub_service.modular_group(pair, -t / (2.0 * np.pi))
                hk5 = max(hk5, float(np.linalg.norm(lhs - rhs, 2)))
            hk8 = max(hk8, float(np.linalg.norm(pair.J.matrix - entry.conjugation, 2)))
        axioms["HK5"] = AxiomResult(passed=hk5 < tol, residual=hk5)
        axioms["HK8"] = AxiomResult(passed=hk8 < tol, residual=hk8)

        # HK6 Haag duality
        worst = 0.0
        for entry in entries:
            if entry.dual_of is None:
                continue
            complement = stdsub_service.symplectic_complement(entries[entry.dual_of].subspace)
            worst = max(worst, stdsub_service.principal_angle(entry.subspace, complement))
        axioms["HK6"] = AxiomResult(passed=worst < tol, residual=worst)

        failed = [name for name, result in axioms.items() if not result.passed]
        if failed:
            logger.warning(f"Net axioms failing: {', '.join(failed)}")
        return NetAxiomReport(entries=len(entries), axioms=axioms)

    def _transport_residual(self, transport: np.ndarray, subspace: RealSubspace, entry: NetEntry):
        try:
            predicted, _ = stdsub_service.covariance_transport(transport, 1, subspace)
        except (AccuracyError, ConditioningError, DomainError) as e:
            logger.warning(f"Covariance transport failed: {e}")
            return None, np.inf
        target = ModularPair(J=AntiLinearOp(entry.conjugation), log_delta=entry.generator)
        return predicted, stdsub_service.pair_distance(predicted, target)


bgl_service = BGLService()
