"""
eps-normcrm - Configuration
"""

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # Output
    output_root: str = "runs"
    log_level: str = "INFO"

    # Defaults shared by every subcommand
    default_seed: int = 20240101
    default_epsilon: float = 1e-6

    # Series evaluation (Bessel, 2F1)
    series_rel_tol: float = 1e-14
    series_max_terms: int = 10_000

    # Quadrature
    quad_abs_tol: float = 1e-12
    quad_rel_tol: float = 1e-9
    quad_limit: int = 200

    # Monte Carlo
    prior_reps: int = 10_000
    rejection_cap: int = 10_000

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"
        env_prefix = "NORMCRM_"


settings = Settings()
