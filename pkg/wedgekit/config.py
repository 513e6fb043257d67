from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # Logging
    log: str = "INFO"

    # Run defaults (overridable per command)
    seed: int = 20240601
    threads: int = 1
    format_version: int = 1

    # Lie algebra tolerances
    default_tolerance: float = 1e-10
    euler_tolerance: float = 1e-6
    grading_tolerance: float = 1e-8
    semisimple_threshold: float = 1e-6

    # Symmetric Euler element search
    symmetric_starts: int = 32
    symmetric_max_iter: int = 500
    symmetric_residual: float = 1e-7
    witness_tolerance: float = 1e-6
    conjugator_restarts: int = 64

    # Cones and wedges
    cone_samples: int = 64
    cone_membership_tolerance: float = 1e-6
    boundary_tolerance: float = 1e-10

    # Standard subspaces
    rank_threshold: float = 1e-9
    kernel_threshold: float = 1e-8
    condition_limit: float = 1e12
    max_log_delta_norm: float = 3.0
    stdsub_max_dim: int = 16

    # Rapidity model
    mass: float = 1.0
    grid: int = 2048
    theta_max: float = 20.0
    quadrature_box: float = 30.0
    bw_threshold: float = 1e-3
    bw_refined_threshold: float = 1e-4
    refinement_factor: int = 4
    refinement_floor: float = 1e-6
    spectral_noise_floor: float = 1e-14
    locality_threshold: float = 1e-6

    # Truncated Fock space
    weyl_max_amplitude: float = 1.0
    weyl_min_cutoff: int = 32
    fock_max_dimension: int = 1024
    fock_roundoff_floor: float = 1e-12

    class Config:
        env_file = ".env"
        env_prefix = "WEDGEKIT_"


settings = Settings()
