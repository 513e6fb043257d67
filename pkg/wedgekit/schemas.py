from datetime import datetime
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from wedgekit.models import CovarianceVerdict, OrderStatus


class ReportBase(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    format_version: int = Field(default=1, alias="formatVersion")
    generated_at: Optional[str] = Field(default=None, alias="generatedAt")

    def stamp(self) -> "ReportBase":
        self.generated_at = datetime.utcnow().isoformat(timespec="seconds") + "Z"
        return self


class RunConfig(BaseModel):
    command: str
    seed: int
    tolerance: float
    threads: int = 1
    output: Optional[str] = None
    format_version: int = 1


# Lie theory reports

class WitnessReport(BaseModel):
    e: List[float]
    f: List[float]
    conjugator: List[List[float]]
    triple_residual: float
    witness_residual: float


class SymmetryReport(ReportBase):
    algebra: str
    h: List[float]
    symmetric: Optional[bool]
    source: str
    reason: str
    witness: Optional[WitnessReport] = None
    run: Optional[RunConfig] = None


class OrbitReport(BaseModel):
    representative: List[float]
    dims: List[int]
    killing_signature: List[int]
    symmetric: Optional[bool]
    source: str
    witness: Optional[WitnessReport] = None


class ClassificationReport(ReportBase):
    algebra: str
    orbit_count: int
    orbits: List[OrbitReport]
    tube_type: Optional[bool] = None
    expected_match: Optional[bool] = None
    mismatches: List[str] = []
    run: Optional[RunConfig] = None


class GradingReport(ReportBase):
    algebra: str
    h: List[float]
    euler: bool
    reason: str
    dims: Optional[List[int]] = None
    spectrum_residual: Optional[float] = None
    involution: Optional[List[List[float]]] = None
    exponential_residual: Optional[float] = None
    run: Optional[RunConfig] = None


# Wedges

class OrderReport(ReportBase):
    status: OrderStatus
    c_plus: Optional[float] = None
    m: Optional[List[float]] = None
    c_minus: Optional[float] = None
    reason: str = ""
    oracle: Optional[bool] = None
    agrees: Optional[bool] = None
    run: Optional[RunConfig] = None


# Standard subspaces and nets

class BorchersReport(BaseModel):
    reflection_residual: float
    dilation_residual: float
    t_values: List[float]
    s_values: List[float]


class RoundtripReport(ReportBase):
    dim: int
    trials: int
    conditioning_failures: int = 0
    max_subspace_angle: float = 0.0
    max_pair_residual: float = 0.0
    max_duality_residual: float = 0.0
    max_invariance_angle: float = 0.0
    passed: bool = False
    run: Optional[RunConfig] = None


class AxiomResult(BaseModel):
    passed: bool
    residual: float
    detail: str = ""


class NetAxiomReport(ReportBase):
    entries: int
    axioms: Dict[str, AxiomResult]


class RapidityModelInfo(BaseModel):
    mass: float
    n: int
    theta_max: float


class BWResidual(BaseModel):
    label: str
    residual: float
    quadrature_error: float


class RegularityProfile(BaseModel):
    translations: List[List[float]]
    norms: List[float]
    real_rank: int
    complex_rank: int


class GridRefinement(BaseModel):
    label: str
    coarse_n: int
    fine_n: int
    coarse_residual: float
    fine_residual: float
    converged: bool


class RapidityReport(ReportBase):
    model: RapidityModelInfo
    bw_residuals: List[BWResidual] = []
    left_wedge_residuals: List[BWResidual] = []
    refinement: List[GridRefinement] = []
    converged: bool = True
    locality_residuals: Dict[str, float] = {}
    regularity: List[RegularityProfile] = []
    borchers: Optional[BorchersReport] = None
    passed: bool = True
    failures: List[str] = []
    run: Optional[RunConfig] = None


class CutoffRefinement(BaseModel):
    coarse_n_max: int
    fine_n_max: int
    coarse: Dict[str, float]
    fine: Dict[str, float]
    bound_decreases: bool
    converged: bool


class WeylReport(ReportBase):
    modes: int
    n_max: int
    xi: List[List[float]]
    eta: List[List[float]]
    vacuum_residual: float
    composition_residual: float
    unitarity_residual: float
    truncation_log10_bound: float
    refinement: Optional[CutoffRefinement] = None
    run: Optional[RunConfig] = None


# Modular analysis

class CovarianceReport(ReportBase):
    algebra: str
    verdict: CovarianceVerdict
    witness: Optional[List[float]] = None
    witness_norm: float = 0.0
    commutation_residual: float = 0.0
    h1: List[float] = []
    h2: List[float] = []
    h1_normal_form: Optional[List[List[float]]] = None
    h2_normal_form: Optional[List[List[float]]] = None
    assumptions: List[str] = []
    run: Optional[RunConfig] = None


class ConeSideResult(BaseModel):
    side: int
    eigenspace_dim: int
    span_dim: Optional[int]
    generating: Optional[bool]
    detail: str = ""


class RegularityReport(ReportBase):
    cone: str
    sides: List[ConeSideResult]
    verdict: Optional[bool]


class SemidirectReport(ReportBase):
    condition_a: Optional[bool]
    condition_b: Optional[bool]
    attestation_note: str
    sides: List[ConeSideResult]
    verdict: Optional[bool]


class AuditReport(ReportBase):
    h_euler: bool
    modular_group_residual: float
    reflection_residuals: List[float]
    max_reflection_residual: float
    samples: int


class AntiEllipticReport(ReportBase):
    verdict: bool
    ideal_dims: List[int]
    elliptic: List[bool]
    n_h_dim: int
    quotient_dim: int


# Atlas

class AtlasOrbit(BaseModel):
    dims: List[int]
    symmetric: Optional[bool]


class AtlasEntry(BaseModel):
    family: str
    params: Dict[str, int]
    orbit_count: int
    orbits: List[AtlasOrbit]
    tube_type: Optional[bool] = None
    source: Optional[str] = None


class AtlasReport(ReportBase):
    table_version: int
    entries: List[AtlasEntry]
    matches: bool
    mismatches: List[str] = []
    run: Optional[RunConfig] = None


# Gaussian test functions for the rapidity model

class GaussianComponent(BaseModel):
    amplitude: float = 1.0
    center: List[float] = Field(min_length=2, max_length=2)
    width: float = Field(gt=0)
    radius: Optional[float] = None

    @property
    def support_radius(self) -> float:
        return self.radius if self.radius is not None else 7.5 * self.width


class GaussianSum(BaseModel):
    label: str = "f"
    components: List[GaussianComponent] = []

    @classmethod
    def gaussian(cls, center, width: float, amplitude: float = 1.0, label: str = "f") -> "GaussianSum":
        return cls(label=label, components=[GaussianComponent(amplitude=amplitude, center=list(center), width=width)])
