from pydantic_settings import BaseSettings
from dotenv import load_dotenv
import os


# Load environment variables from .env file
load_dotenv()


class Settings(BaseSettings):

    # App settings
    PROJECT_NAME: str = os.getenv("PROJECT_NAME", "isostables")
    VERSION: str = os.getenv("VERSION", "0.1.0")
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    WORKERS: int = int(os.getenv("WORKERS", os.cpu_count() or 1))
    RANDOM_SEED: int = int(os.getenv("RANDOM_SEED", 20130101))

    # Integration settings
    INTEGRATOR: str = os.getenv("INTEGRATOR", "DOP853")
    REL_TOL: float = float(os.getenv("REL_TOL", 1e-12))
    ABS_TOL: float = float(os.getenv("ABS_TOL", 1e-12))
    HORIZON: float = float(os.getenv("HORIZON", 50.0))
    ESCAPE_FACTOR: float = float(os.getenv("ESCAPE_FACTOR", 1e3))

    # Laplace average settings
    CAPTURE_FRACTION: float = float(os.getenv("CAPTURE_FRACTION", 0.05))
    CONVERGENCE_TOL: float = float(os.getenv("CONVERGENCE_TOL", 1e-6))
    GUARD_ACTIVATION: float = float(os.getenv("GUARD_ACTIVATION", 1e-3))
    EXTRAPOLATION_PASSES: int = int(os.getenv("EXTRAPOLATION_PASSES", 2))

    # Output settings
    FLOAT_DIGITS: int = int(os.getenv("FLOAT_DIGITS", 17))

    class Config:
        env_file = ".env"  # Load from .env file
        env_file_encoding = "utf-8"
        extra = "ignore"


# Create an instance of settings
settings = Settings()
