from pydantic_settings import BaseSettings, SettingsConfigDict


class SolverConfig(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="SYMTENS_SOLVER__",
        env_file=".env",
        extra="ignore",
    )

    restarts: int = 32
    max_iter: int = 10_000
    tol: float = 1e-12  # stationarity of the power iterations
    seed: int = 0
    oracle_cutoff: int = 81  # brute oracle runs when prod(shape) <= this
    oracle_budget: int = 20_000  # sphere-grid points per oracle run
    workers: int = 1
    als_restarts: int = 64
    als_max_iter: int = 500
    lp_rounds: int = 200  # column-generation budget; stops earlier once no atom prices above 1


class ReportConfig(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="SYMTENS_REPORT__",
        env_file=".env",
        extra="ignore",
    )

    log_level: str = "INFO"
    indent: int = 2
    equality_tol: float = 1e-10
    include_runtime: bool = False


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", extra="ignore")

    solver: SolverConfig = SolverConfig()
    report: ReportConfig = ReportConfig()


settings = Settings()
