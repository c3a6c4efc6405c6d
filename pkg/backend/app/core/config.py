from pydantic_settings import BaseSettings
from typing import List

class Settings(BaseSettings):
    # Application
    APP_NAME: str = "Scale-Free Percolation Lab"
    DEBUG: bool = False
    ENVIRONMENT: str = "development"
    LOG_LEVEL: str = "INFO"

    # Model defaults
    DEFAULT_TAU: float = 2.5
    DEFAULT_LAMBDA: float = 1.0
    DEFAULT_CF: float = 1.0
    DEFAULT_N: int = 10000
    MASTER_SEED: int = 20190101

    # Experiments
    DEFAULT_REPLICATES: int = 20
    MAX_WORKERS: int = 1
    MAX_API_REPLICATES: int = 50
    LAW_DRAWS: int = 30000

    # Numerics
    EXACT_DIAMETER_LIMIT: int = 10000
    LIMIT_TAIL_THRESHOLD: float = 1e-3
    LIMIT_HORIZON: float = 30.0
    HUB_COUNT: int = 10

    # CORS for the HTTP surface, given as a JSON list in the environment
    CORS_ORIGINS: List[str] = ["http://localhost:3000", "http://127.0.0.1:3000"]

    class Config:
        env_file = ".env"
        case_sensitive = True

settings = Settings()
