"""Application configuration."""

from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8")

    # Files
    data_dir: Path = Path("data")

    # Logging
    log_level: str = "WARNING"
    log_json: bool = False

    # Reproducibility / parallelism
    seed: int = 0
    jobs: int = 1

    # MGDA training
    learning_rate: float = 0.05
    max_steps: int = 500
    patience: int = 20
    stationarity_tol: float = 1e-6

    # Frank-Wolfe min-norm solver
    fw_max_iters: int = 100
    fw_gamma_tol: float = 1e-5

    # Preference search
    pace: float = 2.0
    max_rounds: int = 30
    max_rounds_per_subset: int = 25
    eq_tol: float = 1e-3
    grid_resolution: int = 11

    # Forecasting
    quantile: float = 0.9


settings = Settings()
