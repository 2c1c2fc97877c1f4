"""Application configuration using Pydantic settings."""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Solver settings loaded from environment variables."""

    LOG_LEVEL: str = Field(
        default="INFO",
        description="Root log level for the fracdg loggers",
    )
    DEBUG: bool = Field(
        default=False,
        description="Enable debug mode (per-step diagnostics)",
    )
    OUTPUT_DIR: str = Field(
        default="results",
        description="Default directory for snapshots, tables and plot scripts",
    )

    # Nonlocal operator
    DENSE_MATVEC_MAX: int = Field(
        default=256,
        description="Largest window handled by the dense Toeplitz product in auto mode",
    )
    PERIODIC_IMAGES: int = Field(
        default=16,
        description="Periodic folding depth of the fractional stencil, in window lengths",
    )

    # Implicit solve
    IMPLICIT_TOL: float = Field(
        default=1e-10,
        description="Relative sup-norm residual target of the implicit nonlocal solve",
    )
    IMPLICIT_MAX_ITER: int = Field(
        default=10000,
        description="Iteration cap of the Jacobi sweep before the Krylov fallback",
    )

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="FRACDG_",
        case_sensitive=True,
        extra="ignore",
    )
