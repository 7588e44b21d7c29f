from enum import Enum
from typing import Annotated, Any

import numpy as np
from pydantic import BaseModel, ConfigDict, PlainSerializer

from symtens.core import DenseTensor
from symtens.tensor_io import encode_scalar, encode_tensor, encode_vector, encode_witness

Vector = Annotated[np.ndarray, PlainSerializer(encode_vector)]
Tensor = Annotated[DenseTensor, PlainSerializer(encode_tensor)]
ScalarValue = Annotated[Any, PlainSerializer(encode_scalar)]
Witness = Annotated[Any, PlainSerializer(encode_witness)]


class _Result(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)


class NormKind(str, Enum):
    EXACT = "exact"
    LOWER_BOUND = "lower_bound"
    UPPER_BOUND = "upper_bound"


class StructureClass(str, Enum):
    COLLINEAR = "collinear"
    COPLANAR = "coplanar"
    VIOLATION = "violation"


class Parity(str, Enum):
    EVEN_J = "even_j"
    ODD_J = "odd_j"


# ── Norm engines ──


class NormEstimate(_Result):
    norm: str  # hs | injective | injective_sym | projective
    value: float
    kind: NormKind
    witness: Witness = None
    witness_vectors: list[Vector] | None = None
    iterations: int = 0
    seed: int = 0
    sign: int | None = None  # real injective_sym: sign of P_z at the maximizer
    residual: float = 0.0  # projective_upper: l1 mass of z minus the witness


class BanachCheck(_Result):
    eps_sym: float
    eps: float
    gap: float
    eps_kind: NormKind


class NuclearStructureReport(_Result):
    span_dims: list[int]
    violations: list[int]  # term indices breaking the span bound for the field
    norm_sum: float
    certificate: float
    witness_form: Tensor | None = None
    witness_eps: float | None = None
    residuals: list[float] = []
    witness_found: bool = False


# ── Rank-1 certificates ──


class Rank1Certificate(_Result):
    lam: ScalarValue
    vectors: list[Vector]
    residual_hs: float
    eps_gap: float  # | |lam| - eps estimate of z |
    lambda_gap: float  # |lam - <z, x_1 (x) ... (x) x_d>|
    eps_value: float
    eps_kind: NormKind


class SymRank1Certificate(_Result):
    lam: ScalarValue
    vectors: list[Vector]
    ratio: float  # |L_z(x_1..x_d)| / HS(x_1 v ... v x_d)
    residual_hs: float


# ── Recovery ──


class RecoveryStep(_Result):
    step: str  # I | II | III
    note: str
    vectors: list[Vector] = []
    value: float | None = None


class RecoveryReport(_Result):
    v: Vector
    w: Vector
    sign: int
    parity: Parity
    scale: float
    reconstructed: Tensor
    steps: list[RecoveryStep] = []
    max_value_drift: float = 0.0
    span_error: float | None = None


# ── Symmetric rank toolkit ──


class ImprovementResult(_Result):
    norm: str
    x: Tensor
    improvement: float
    before: float  # bound on alpha(z - y)
    after: float  # bound on alpha(z - x)
    kind: NormKind
    sym_terms: int | None = None  # v-terms of x assembled from y's CP terms
    cp_terms: int | None = None


class StrictImprovement(_Result):
    pi_upper_sigma: float
    pi_lower_w: float
    strict: bool


class NonstrictExample(_Result):
    t: float
    w: Tensor
    sigma_w: Tensor
    eps_w: float
    eps_sigma_w: float


class BorderRankInstance(_Result):
    n: int
    y_n: Tensor
    y_limit: Tensor
    gap_hs: float
    decomposition: Witness = None


class RankBounds(_Result):
    sym_upper: int  # witnessed rank_sigma <= terms
    tensor_lower: int  # largest flattening rank
    tensor_upper: int  # expanded elementary terms


class RankObstructionReport(_Result):
    image_rank: int
    image_rank_exact: int
    image_values_match: bool
    images: list[Vector]
    candidate_basis_rank: int | None = None
    candidate_image_rank: int | None = None
    candidate_bound: int | None = None
    violated_dimensions: int | None = None
    candidate_residual: float | None = None
    als_residual: float | None = None
    als_restarts: int | None = None


class Factorization(_Result):
    degree: int
    factors: list[Vector]  # phi_i(y) = a_i * y_1 + b_i * y_2, canonical coordinates
    max_error: float
    rotations: int = 0


# ── CLI ──


class Report(BaseModel):
    command: str
    inputs: dict[str, str] = {}
    results: dict[str, Any] = {}
    seed: int
    runtime_ms: int | None = None
