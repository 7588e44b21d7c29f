from pydantic import BaseModel


class DemoResult(BaseModel):
    demo: str
    summary: dict  # headline numbers (e.g. {"max_abs_error": 1e-17, "monotone": true})
    columns: list[str]  # CSV header
    rows: list[list]  # one row per series point
    warnings: list[str] = []
