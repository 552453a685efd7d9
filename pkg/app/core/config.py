from functools import lru_cache
from typing import List, Optional

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    APP_ENV: str = "dev"

    QCONV_LOG: str = "WARNING"
    # numpy bit generator family; sampled runs are reproducible for a given (family, seed)
    QCONV_RNG: str = "PCG64"
    QCONV_WORKERS: int = 1
    QCONV_SHOT_SHARD: int = 25000

    ALLOWED_ORIGINS: str = "http://localhost:5173,http://localhost:3000"
    SOURCE_DATE_EPOCH: Optional[int] = None

    class Config:
        env_file = ".env"
        extra = "ignore"

    def allowed_origins_list(self) -> List[str]:
        return [o.strip() for o in self.ALLOWED_ORIGINS.split(",") if o.strip()]


@lru_cache
def get_settings() -> Settings:
    return Settings()
