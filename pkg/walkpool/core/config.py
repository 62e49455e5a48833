# walkpool/core/config.py
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict
from dotenv import load_dotenv

load_dotenv()


class Settings(BaseSettings):
    # Logging
    LOG_LEVEL: str = Field("INFO")
    LOG_JSON: bool = Field(False)

    # Runtime
    SHOW_PROGRESS: bool = Field(False)
    WORKERS: int = Field(1, ge=1)

    # Reporting
    CSV_FLOAT_FORMAT: str = Field(".6f")

    @field_validator("LOG_LEVEL", mode="before")
    @classmethod
    def normalize_level(cls, v):
        if isinstance(v, str):
            return v.strip().upper()
        return v

    model_config = SettingsConfigDict(
        env_prefix="WALKPOOL_",
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )


settings = Settings()
