import logging
from itertools import product
from typing import Dict, List, Sequence

import numpy as np
from scipy.linalg import block_diag, expm

from wedgekit.config import settings
from wedgekit.exceptions import ClosureError, DomainError, NumericError, UnsupportedError
from wedgekit.models import AlgebraElement, AlgebraFamily, GroupElement, LieAlgebra

logger = logging.getLogger(__name__)

# exp overflows double precision past this exponent
_EXP_LIMIT = 700.0


def _unit(d: int, i: int, j: int) -> np.ndarray:
    m = np.zeros((d, d))
    m[i, j] = 1.0
    return m


class LieAlgebraService:
    """Matrix Lie algebras given by explicit real bases"""

    def __init__(self):
        self.tolerance = settings.default_tolerance

    # Construction

    def from_basis(
        self,
        name: str,
        basis: Sequence[np.ndarray],
        tolerance: float = None,
        family: AlgebraFamily = AlgebraFamily.CUSTOM,
        params: Dict[str, int] = None,
    ) -> LieAlgebra:
        """Compute structure constants for a basis and verify every algebra invariant."""
        tol = self.tolerance if tolerance is None else tolerance
        basis = np.asarray(basis, dtype=float)
        if basis.ndim != 3 or basis.shape[1] != basis.shape[2]:
            raise DomainError(f"Basis of {name} must be a list of square matrices")
        n, d, _ = basis.shape
        flat = basis.reshape(n, -1).T
        if n and np.linalg.matrix_rank(flat, tol=1e-12 * max(1.0, np.abs(flat).max())) != n:
            raise DomainError(f"Basis of {name} is linearly dependent")

        commutators = np.einsum("iab,jbc->ijac", basis, basis)
        commutators = commutators - commutators.transpose(1, 0, 2, 3)
        rhs = commutators.reshape(n * n, d * d).T
        if n:
            coeffs, *_ = np.linalg.lstsq(flat, rhs, rcond=None)
        else:
            coeffs = np.zeros((0, 0))
        c = coeffs.T.reshape(n, n, n)
        c = 0.5 * (c - c.transpose(1, 0, 2))

        closure = np.linalg.norm(flat @ c.reshape(n * n, n).T - rhs, axis=0) if n else np.zeros(0)
        if closure.size and closure.max() > tol:
            k = int(np.argmax(closure))
            raise ClosureError(
                f"Basis of {name} is not bracket closed: [x_{k // n}, x_{k % n}] leaves the span "
                f"(residual {closure.max():.3e})"
            )

        jacobi = self._jacobi_residual(c)
        if jacobi > tol:
            raise ClosureError(f"Jacobi identity fails for {name} (residual {jacobi:.3e})")

        algebra = LieAlgebra(
            name=name,
            matrix_size=d,
            basis=basis,
            structure_constants=c,
            tolerance=tol,
            family=family,
            params=dict(params or {}),
        )
        logger.debug(f"Built {name}: dim {n}, closure {closure.max() if closure.size else 0.0:.2e}")
        return algebra

    @staticmethod
    def _jacobi_residual(c: np.ndarray) -> float:
        if c.size == 0:
            return 0.0
        term = np.einsum("ijl,lkm->ijkm", c, c)
        total = term + term.transpose(1, 2, 0, 3) + term.transpose(2, 0, 1, 3)
        return float(np.abs(total).max())

    def make_algebra(self, family: str, **params) -> LieAlgebra:
        """Build a member of a supported family with its documented basis ordering.

        sl(n): off-diagonal E_ij in row-major order, then E_kk - E_k+1,k+1.
        so(p, q): metric diag(1_p, -1_q), generators for index pairs i < j.
        sp(n): A block, then symmetric upper block, then symmetric lower block.
        gl(n): E_ij row-major.
        iso(1, d): Lorentz generators as for so(1, d), then translations P_0..P_d.
        aff: dilation E_00, translation E_01.
        abelian(n): diagonal units.
        """
        try:
            family = AlgebraFamily(family)
        except ValueError:
            raise UnsupportedError(f"Unsupported algebra family: {family}")

        builders = {
            AlgebraFamily.SL: self._make_sl,
            AlgebraFamily.SO: self._make_so,
            AlgebraFamily.SP: self._make_sp,
            AlgebraFamily.GL: self._make_gl,
            AlgebraFamily.ISO: self._make_iso,
            AlgebraFamily.AFF: self._make_aff,
            AlgebraFamily.ABELIAN: self._make_abelian,
        }
        if family not in builders:
            raise UnsupportedError(f"Family {family.value} has no built-in constructor")
        try:
            return builders[family](**params)
        except TypeError as e:
            raise DomainError(f"Bad parameters for {family.value}: {e}")

    def _make_sl(self, n: int) -> LieAlgebra:
        if not 2 <= n <= 6:
            raise UnsupportedError(f"sl_n is supported for n = 2..6, got {n}")
        basis = [_unit(n, i, j) for i, j in product(range(n), range(n)) if i != j]
        basis += [_unit(n, k, k) - _unit(n, k + 1, k + 1) for k in range(n - 1)]
        return self.from_basis(f"sl{n}", basis, family=AlgebraFamily.SL, params={"n": n})

    @staticmethod
    def _so_generators(p: int, q: int) -> List[np.ndarray]:
        d = p + q
        eta = np.concatenate([np.ones(p), -np.ones(q)])
        basis = []
        for i in range(d):
            for j in range(i + 1, d):
                if eta[i] == eta[j]:
                    basis.append(_unit(d, i, j) - _unit(d, j, i))
                else:
                    basis.append(_unit(d, i, j) + _unit(d, j, i))
        return basis

    def _make_so(self, p: int, q: int) -> LieAlgebra:
        if p < 0 or q < 0 or not 2 <= p + q <= 6:
            raise UnsupportedError(f"so(p,q) is supported for 2 <= p+q <= 6, got ({p},{q})")
        return self.from_basis(
            f"so({p},{q})", self._so_generators(p, q), family=AlgebraFamily.SO, params={"p": p, "q": q}
        )

    def _make_sp(self, n: int) -> LieAlgebra:
        if not 1 <= n <= 3:
            raise UnsupportedError(f"sp_2n is supported for n = 1..3, got {n}")
        z = np.zeros((n, n))
        basis = [np.block([[_unit(n, i, j), z], [z, -_unit(n, j, i)]]) for i, j in product(range(n), range(n))]
        sym = []
        for i in range(n):
            for j in range(i, n):
                s = _unit(n, i, j) + _unit(n, j, i) if i != j else _unit(n, i, i)
                sym.append(s)
        basis += [np.block([[z, s], [z, z]]) for s in sym]
        basis += [np.block([[z, z], [s, z]]) for s in sym]
        return self.from_basis(f"sp{2 * n}", basis, family=AlgebraFamily.SP, params={"n": n})

    def _make_gl(self, n: int) -> LieAlgebra:
        if not 1 <= n <= 4:
            raise UnsupportedError(f"gl_n is supported for n = 1..4, got {n}")
        basis = [_unit(n, i, j) for i, j in product(range(n), range(n))]
        return self.from_basis(f"gl{n}", basis, family=AlgebraFamily.GL, params={"n": n})

    def _make_iso(self, d: int, p: int = 1) -> LieAlgebra:
        if p != 1 or not 1 <= d <= 3:
            raise UnsupportedError(f"iso(1,d) is supported for d = 1..3, got ({p},{d})")
        size = d + 2
        basis = []
        for g in self._so_generators(1, d):
            m = np.zeros((size, size))
            m[: d + 1, : d + 1] = g
            basis.append(m)
        basis += [_unit(size, mu, d + 1) for mu in range(d + 1)]
        return self.from_basis(f"iso(1,{d})", basis, family=AlgebraFamily.ISO, params={"d": d})

    def _make_aff(self, n: int = 1) -> LieAlgebra:
        if n != 1:
            raise UnsupportedError("Only the affine algebra of the line is built in")
        return self.from_basis("aff1", [_unit(2, 0, 0), _unit(2, 0, 1)], family=AlgebraFamily.AFF, params={"n": 1})

    def _make_abelian(self, n: int) -> LieAlgebra:
        if n < 1:
            raise DomainError("Abelian algebra needs n >= 1")
        return self.from_basis(
            f"R{n}", [_unit(n, i, i) for i in range(n)], family=AlgebraFamily.ABELIAN, params={"n": n}
        )

    def direct_sum(self, a: LieAlgebra, b: LieAlgebra) -> LieAlgebra:
        za, zb = np.zeros((a.matrix_size,) * 2), np.zeros((b.matrix_size,) * 2)
        basis = [block_diag(x, zb) for x in a.basis] + [block_diag(za, y) for y in b.basis]
        return self.from_basis(
            f"{a.name}+{b.name}",
            basis,
            tolerance=max(a.tolerance, b.tolerance),
            params={"left_dim": a.dim, "right_dim": b.dim},
        )

    def summands(self, algebra: LieAlgebra) -> List[List[AlgebraElement]]:
        """Ideal bases of a two-term direct sum built by direct_sum."""
        if "left_dim" not in algebra.params:
            return [[algebra.basis_element(i) for i in range(algebra.dim)]]
        k = algebra.params["left_dim"]
        return [
            [algebra.basis_element(i) for i in range(k)],
            [algebra.basis_element(i) for i in range(k, algebra.dim)],
        ]

    # Brackets and forms

    def bracket(self, x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
        if x.algebra is not y.algebra:
            raise DomainError(f"Cannot bracket elements of {x.algebra.name} and {y.algebra.name}")
        c = x.algebra.structure_constants
        return AlgebraElement(x.algebra, np.einsum("i,j,ijk->k", x.coords, y.coords, c))

    def ad_matrix(self, x: AlgebraElement) -> np.ndarray:
        return np.einsum("i,ijk->kj", x.coords, x.algebra.structure_constants)

    def killing_matrix(self, algebra: LieAlgebra) -> np.ndarray:
        c = algebra.structure_constants
        return np.einsum("ikm,jmk->ij", c, c)

    def killing_form(self, x: AlgebraElement, y: AlgebraElement) -> float:
        if x.algebra is not y.algebra:
            raise DomainError("Killing form needs elements of the same algebra")
        return float(x.coords @ self.killing_matrix(x.algebra) @ y.coords)

    def is_semisimple(self, algebra: LieAlgebra) -> bool:
        s = np.linalg.svd(self.killing_matrix(algebra), compute_uv=False)
        if s.size == 0 or s[0] == 0.0:
            return False
        return bool(s[-1] / s[0] > settings.semisimple_threshold)

    # Group level

    def exp_element(self, x: AlgebraElement, t: float = 1.0) -> GroupElement:
        m = t * x.matrix
        scale = float(np.abs(np.linalg.eigvals(m)).max()) if m.size else 0.0
        if not np.isfinite(scale) or scale > _EXP_LIMIT:
            raise NumericError(f"exp overflow: spectral radius {scale:.3e} of t*x exceeds {_EXP_LIMIT}")
        g = expm(m)
        if not np.all(np.isfinite(g)):
            raise NumericError("exp produced non-finite entries")
        return GroupElement(g, 1)

    def coordinates(self, algebra: LieAlgebra, matrix: np.ndarray, tolerance: float = None) -> AlgebraElement:
        """Coordinates of a matrix in the basis; closure error when it leaves the span."""
        matrix = np.asarray(matrix, dtype=float)
        if matrix.shape != (algebra.matrix_size,) * 2:
            raise DomainError(f"Matrix shape {matrix.shape} does not match {algebra.name}")
        target = matrix.reshape(-1)
        coords, *_ = np.linalg.lstsq(algebra.flat_basis, target, rcond=None)
        residual = float(np.linalg.norm(algebra.flat_basis @ coords - target))
        tol = max(algebra.tolerance, 1e-9) if tolerance is None else tolerance
        if residual > tol * max(1.0, float(np.linalg.norm(target))):
            raise ClosureError(f"Matrix leaves the span of {algebra.name} (residual {residual:.3e})")
        return AlgebraElement(algebra, coords)

    def adjoint_action(self, g: GroupElement, x: AlgebraElement) -> AlgebraElement:
        conj = g.matrix @ np.linalg.solve(g.matrix.T, x.matrix.T).T
        cond = float(np.linalg.cond(g.matrix))
        return self.coordinates(x.algebra, conj, tolerance=max(x.algebra.tolerance, 1e-9) * max(1.0, cond))

    def adjoint_matrix(self, g: GroupElement, algebra: LieAlgebra) -> np.ndarray:
        """Matrix of Ad(g) on coordinate space."""
        return np.column_stack(
            [self.adjoint_action(g, algebra.basis_element(i)).coords for i in range(algebra.dim)]
        )

    # Subspaces

    def span_rank(self, elements: Sequence[AlgebraElement], tol: float = 1e-8) -> int:
        if not elements:
            return 0
        return int(np.linalg.matrix_rank(np.column_stack([e.coords for e in elements]), tol=tol))

    def span_contains(self, elements: Sequence[AlgebraElement], x: AlgebraElement, tol: float = 1e-8) -> bool:
        if not elements:
            return x.norm() <= tol
        basis = np.column_stack([e.coords for e in elements])
        coeffs, *_ = np.linalg.lstsq(basis, x.coords, rcond=None)
        return bool(np.linalg.norm(basis @ coeffs - x.coords) <= tol * max(1.0, x.norm()))

    def is_subalgebra(self, elements: Sequence[AlgebraElement], tol: float = 1e-8) -> bool:
        return all(
            self.span_contains(elements, self.bracket(a, b), tol) for a in elements for b in elements
        )

    def is_ideal(self, elements: Sequence[AlgebraElement], tol: float = 1e-8) -> bool:
        if not elements:
            return True
        algebra = elements[0].algebra
        return all(
            self.span_contains(elements, self.bracket(algebra.basis_element(i), y), tol)
            for i in range(algebra.dim)
            for y in elements
        )


liealg_service = LieAlgebraService()
