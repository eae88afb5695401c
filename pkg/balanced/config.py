"""
Configuration and environment variables for the minimal balanced collections toolkit
"""

import os

VALID_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class Config:
    """Toolkit configuration"""

    def __init__(self):
        """Initialize configuration from environment variables"""
        # Logging Configuration
        self.LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
        self.LOG_FILE: str = os.getenv("LOG_FILE", "balanced.log")

        # Runtime Configuration
        self.CACHE_DIR: str = os.getenv("BALANCED_CACHE_DIR", "cache")
        self.JOBS: int = int(os.getenv("BALANCED_JOBS", str(os.cpu_count() or 1)))
        self.EXTENDED: bool = os.getenv("BALANCED_EXTENDED", "false").lower() == "true"
        self.RANDOM_SEED: int = int(os.getenv("BALANCED_SEED", "20240601"))
        self.LAMBDA_FIXPOINT_MAX_M: int = int(os.getenv("BALANCED_LAMBDA_FIXPOINT_MAX_M", "5"))

        # Size Limits
        self.MAX_N: int = 16
        self.MAX_ENUMERATION_N: int = 6
        self.MAX_EXTENDED_N: int = 7
        self.MAX_ORACLE_N: int = 5
        self.MAX_LAMBDA_ORACLE_M: int = 5
        self.MAX_LAMBDA_M: int = 7
        self.MAX_SCAN_CELLS: int = 20
        self.MAX_DEFINITION_ORACLE_SIZE: int = 12
        self.MAX_LP_GAME_N: int = 8
        self.MAX_TWO_ELEMENT_N: int = 9

    @property
    def enumeration_limit(self) -> int:
        """Largest n an exhaustive enumeration may run at"""
        return self.MAX_EXTENDED_N if self.EXTENDED else self.MAX_ENUMERATION_N

    def validate(self) -> None:
        """Validate configuration values"""
        if self.LOG_LEVEL.upper() not in VALID_LOG_LEVELS:
            raise ValueError(f"LOG_LEVEL must be one of {', '.join(VALID_LOG_LEVELS)}")

        if self.JOBS < 1:
            raise ValueError("BALANCED_JOBS must be at least 1")

        if not self.CACHE_DIR:
            raise ValueError("BALANCED_CACHE_DIR must not be empty")

        if not 1 <= self.LAMBDA_FIXPOINT_MAX_M <= self.MAX_LAMBDA_M:
            raise ValueError(f"BALANCED_LAMBDA_FIXPOINT_MAX_M must be between 1 and {self.MAX_LAMBDA_M}")


# Global config instance
config = Config()
