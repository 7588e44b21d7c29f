"""Dense tensor arithmetic over R and C.

Tensors are immutable numpy-backed values. The inner product conjugates its
second argument, <x, y> = sum(x * conj(y)), and every identification of a tensor
with a multilinear form L_z or a polynomial P_z goes through it:

    L_z(y_1, ..., y_d) = <y_1 (x) ... (x) y_d, z>
    P_z(y) = L_z(y, ..., y)
"""

import itertools
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache, reduce

import numpy as np
from scipy.linalg import svdvals

log = logging.getLogger(__name__)

MAX_ORDER = 8
DEFAULT_TOL = 1e-10

Scalar = float | complex


class Field(str, Enum):
    REAL = "real"
    COMPLEX = "complex"

    @property
    def dtype(self) -> type:
        return np.float64 if self is Field.REAL else np.complex128


def field_of(value: np.ndarray) -> Field:
    return Field.COMPLEX if np.iscomplexobj(value) else Field.REAL


def to_scalar(value, field: Field) -> Scalar:
    if field is Field.REAL:
        return float(np.real(value))
    return complex(value)


def as_vector(v, field: Field | str | None = None) -> np.ndarray:
    """Coerce `v` to a 1-D array over `field`. Real data is promoted to C freely;
    complex data with a nonzero imaginary part is rejected for R."""
    arr = np.asarray(v)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"expected a non-empty 1-D vector, got shape {arr.shape}")
    target = Field(field) if field is not None else field_of(arr)
    if target is Field.REAL and np.iscomplexobj(arr):
        if np.any(arr.imag != 0):
            raise ValueError("complex vector passed where a real vector is required")
        arr = arr.real
    return np.array(arr, dtype=target.dtype)


def common_field(vectors: Sequence, field: Field | str | None = None) -> Field:
    if field is not None:
        return Field(field)
    fields = {field_of(np.asarray(v)) for v in vectors}
    if len(fields) > 1:
        raise ValueError("mixed real and complex vectors")
    return fields.pop()


def unit(v) -> np.ndarray:
    arr = np.asarray(v)
    norm = np.linalg.norm(arr)
    if norm == 0:
        raise ValueError("cannot normalize the zero vector")
    return arr / norm


def basis_vector(n: int, i: int, field: Field | str = Field.REAL) -> np.ndarray:
    """Canonical basis vector e_{i+1} of K^n (0-based index)."""
    e = np.zeros(n, dtype=Field(field).dtype)
    e[i] = 1
    return e


class DenseTensor:
    """Order-d dense array over R or C, row-major, read-only after construction."""

    __slots__ = ("_array", "_field")

    def __init__(self, array, field: Field | str | None = None):
        arr = np.asarray(array)
        resolved = Field(field) if field is not None else field_of(arr)
        if arr.ndim < 1:
            raise ValueError("tensor order must be at least 1")
        if arr.ndim > MAX_ORDER:
            raise ValueError(f"tensor order {arr.ndim} exceeds the supported maximum {MAX_ORDER}")
        if 0 in arr.shape:
            raise ValueError(f"all dimensions must be positive, got shape {arr.shape}")
        if resolved is Field.REAL and np.iscomplexobj(arr):
            if np.any(arr.imag != 0):
                raise ValueError("complex entries in a real tensor")
            arr = arr.real
        data = np.array(arr, dtype=resolved.dtype)
        data.setflags(write=False)
        self._array = data
        self._field = resolved

    @classmethod
    def from_flat(cls, field: Field | str, shape: Sequence[int], data: Sequence) -> "DenseTensor":
        shape = tuple(int(s) for s in shape)
        flat = np.asarray(data)
        if flat.size != math.prod(shape):
            raise ValueError(f"data length {flat.size} does not match shape {list(shape)}")
        return cls(flat.reshape(shape), field)

    @classmethod
    def zeros(cls, shape: Sequence[int], field: Field | str = Field.REAL) -> "DenseTensor":
        return cls(np.zeros(tuple(shape), dtype=Field(field).dtype), field)

    @property
    def array(self) -> np.ndarray:
        return self._array

    @property
    def field(self) -> Field:
        return self._field

    @property
    def shape(self) -> tuple[int, ...]:
        return self._array.shape

    @property
    def order(self) -> int:
        return self._array.ndim

    @property
    def size(self) -> int:
        return self._array.size

    @property
    def data(self) -> np.ndarray:
        return self._array.ravel()

    @property
    def is_cubical(self) -> bool:
        return len(set(self.shape)) == 1

    @property
    def dim(self) -> int:
        if not self.is_cubical:
            raise ValueError(f"tensor of shape {list(self.shape)} is not cubical")
        return self.shape[0]

    def _check_compatible(self, other: "DenseTensor") -> None:
        if not isinstance(other, DenseTensor):
            raise TypeError(f"expected DenseTensor, got {type(other).__name__}")
        if other.field is not self.field:
            raise ValueError("cannot combine real and complex tensors")
        if other.shape != self.shape:
            raise ValueError(f"shape mismatch: {list(self.shape)} vs {list(other.shape)}")

    def _check_scalar(self, c) -> None:
        if self.field is Field.REAL and np.iscomplexobj(c) and np.imag(c) != 0:
            raise ValueError("complex scalar applied to a real tensor")

    def __add__(self, other: "DenseTensor") -> "DenseTensor":
        self._check_compatible(other)
        return DenseTensor(self._array + other._array, self.field)

    def __sub__(self, other: "DenseTensor") -> "DenseTensor":
        self._check_compatible(other)
        return DenseTensor(self._array - other._array, self.field)

    def __neg__(self) -> "DenseTensor":
        return DenseTensor(-self._array, self.field)

    def __mul__(self, c) -> "DenseTensor":
        if isinstance(c, DenseTensor):
            return NotImplemented
        self._check_scalar(c)
        return DenseTensor(c * self._array, self.field)

    __rmul__ = __mul__

    def __truediv__(self, c) -> "DenseTensor":
        self._check_scalar(c)
        return DenseTensor(self._array / c, self.field)

    def conj(self) -> "DenseTensor":
        return DenseTensor(self._array.conj(), self.field)

    def as_field(self, field: Field | str) -> "DenseTensor":
        return DenseTensor(self._array, field)

    def allclose(self, other: "DenseTensor", tol: float = DEFAULT_TOL) -> bool:
        self._check_compatible(other)
        return bool(np.max(np.abs(self._array - other._array)) <= tol)

    def __repr__(self) -> str:
        return f"DenseTensor(field={self.field.value}, shape={list(self.shape)})"


# ── Construction ──


def elementary(vectors: Sequence, field: Field | str | None = None) -> DenseTensor:
    """x_1 (x) ... (x) x_d: entry (i_1..i_d) is prod_k x_k[i_k]."""
    if len(vectors) == 0:
        raise ValueError("elementary() needs at least one vector")
    resolved = common_field(vectors, field)
    vecs = [as_vector(v, resolved) for v in vectors]
    return DenseTensor(reduce(np.multiply.outer, vecs), resolved)


@lru_cache(maxsize=None)
def _permutations(d: int) -> tuple[tuple[int, ...], ...]:
    return tuple(itertools.permutations(range(d)))


def symmetrize(x: DenseTensor) -> DenseTensor:
    """The HS-orthogonal projection onto symmetric tensors (average over S_d)."""
    if not x.is_cubical:
        raise ValueError(f"symmetrize needs a cubical tensor, got shape {list(x.shape)}")
    perms = _permutations(x.order)
    acc = np.zeros_like(x.array)
    for p in perms:
        acc += np.transpose(x.array, p)
    return DenseTensor(acc / len(perms), x.field)


def sym_decomposable(vectors: Sequence, field: Field | str | None = None) -> DenseTensor:
    """x_1 v ... v x_d."""
    if len({np.asarray(v).shape for v in vectors}) > 1:
        raise ValueError("sym_decomposable needs vectors of equal length")
    return symmetrize(elementary(vectors, field))


def sym_power_product(v, w, j: int, d: int, field: Field | str | None = None) -> DenseTensor:
    """(v^j) v (w^(d-j)), the symmetric product with j copies of v."""
    if not 0 <= j <= d:
        raise ValueError(f"j={j} outside [0, {d}]")
    return sym_decomposable([v] * j + [w] * (d - j), field)


def is_symmetric(x: DenseTensor, tol: float = DEFAULT_TOL) -> bool:
    if not x.is_cubical:
        return False
    arr = x.array
    # adjacent transpositions generate S_d
    for i in range(x.order - 1):
        if np.max(np.abs(arr - np.swapaxes(arr, i, i + 1))) > tol:
            return False
    return True


def random_tensor(shape: Sequence[int], field: Field | str, rng: np.random.Generator) -> DenseTensor:
    field = Field(field)
    arr = rng.standard_normal(tuple(shape))
    if field is Field.COMPLEX:
        arr = arr + 1j * rng.standard_normal(tuple(shape))
    return DenseTensor(arr, field)


def random_symmetric(n: int, d: int, field: Field | str, rng: np.random.Generator) -> DenseTensor:
    return symmetrize(random_tensor((n,) * d, field, rng))


def random_unit_vector(n: int, field: Field | str, rng: np.random.Generator) -> np.ndarray:
    field = Field(field)
    v = rng.standard_normal(n)
    if field is Field.COMPLEX:
        v = v + 1j * rng.standard_normal(n)
    return unit(v)


# ── Inner products and evaluations ──


def inner_product(x: DenseTensor, y: DenseTensor) -> Scalar:
    x._check_compatible(y)
    return to_scalar(np.vdot(y.array, x.array), x.field)


def hs_norm(x: DenseTensor) -> float:
    return float(np.linalg.norm(x.array))


def multilinear_eval(z: DenseTensor, args: Sequence) -> Scalar:
    """L_z(y_1, ..., y_d) = <y_1 (x) ... (x) y_d, z>."""
    if len(args) != z.order:
        raise ValueError(f"expected {z.order} arguments, got {len(args)}")
    t = z.array.conj()
    for k, a in enumerate(args):
        vec = as_vector(a, z.field)
        if vec.shape[0] != z.shape[k]:
            raise ValueError(f"argument {k} has length {vec.shape[0]}, slot expects {z.shape[k]}")
        t = np.tensordot(vec, t, axes=(0, 0))
    return to_scalar(t, z.field)


def poly_eval(u: DenseTensor, y, tol: float = DEFAULT_TOL) -> Scalar:
    """P_u(y) for a symmetric u."""
    if not is_symmetric(u, tol):
        raise ValueError("poly_eval needs a symmetric tensor")
    return multilinear_eval(u, [y] * u.order)


def contract_slots(z: DenseTensor, fixed: Sequence) -> DenseTensor:
    """The section of L_z with its leading slots bound to `fixed`:
    L_section(y...) = L_z(fixed..., y...). Requires len(fixed) < order."""
    if len(fixed) >= z.order:
        raise ValueError("a section must leave at least one free slot")
    # conj(section) = conj(z) contracted with the fixed arguments
    t = z.array.conj()
    for k, a in enumerate(fixed):
        vec = as_vector(a, z.field)
        if vec.shape[0] != z.shape[k]:
            raise ValueError(f"argument {k} has length {vec.shape[0]}, slot expects {z.shape[k]}")
        t = np.tensordot(vec, t, axes=(0, 0))
    return DenseTensor(t.conj(), z.field)


def compress(z: DenseTensor, matrix: np.ndarray) -> DenseTensor:
    """Apply `matrix` to every slot of a cubical z."""
    arr = z.array
    for k in range(z.order):
        arr = np.moveaxis(np.tensordot(matrix, arr, axes=(1, k)), 0, k)
    return DenseTensor(arr, z.field)


def permanent(matrix: np.ndarray) -> complex:
    n = matrix.shape[0]
    rows = np.arange(n)
    return sum(np.prod(matrix[rows, list(p)]) for p in _permutations(n))


def sym_inner_product(zs: Sequence, xs: Sequence, field: Field | str | None = None) -> Scalar:
    """<z_1 v ... v z_d, x_1 v ... v x_d> = perm(G) / d!, G_ij = <z_i, x_j>."""
    if len(zs) != len(xs) or not zs:
        raise ValueError("sym_inner_product needs two non-empty tuples of equal length")
    resolved = common_field(list(zs) + list(xs), field)
    a = np.stack([as_vector(v, resolved) for v in zs])
    b = np.stack([as_vector(v, resolved) for v in xs])
    gram = a @ b.conj().T
    return to_scalar(permanent(gram) / math.factorial(len(zs)), resolved)


# ── Flattenings ──


def bipartitions(d: int) -> list[tuple[int, ...]]:
    """Row-mode subsets S with 1 <= |S| <= d // 2 (complements give the same norms)."""
    if d == 1:
        return [(0,)]
    return [s for size in range(1, d // 2 + 1) for s in itertools.combinations(range(d), size)]


def flattening(z: DenseTensor, modes: Sequence[int]) -> np.ndarray:
    rest = [k for k in range(z.order) if k not in modes]
    arr = np.transpose(z.array, list(modes) + rest)
    rows = math.prod(z.shape[k] for k in modes)
    return arr.reshape(rows, -1)


def flattening_norm(z: DenseTensor, modes: Sequence[int]) -> float:
    return float(svdvals(flattening(z, modes))[0])


def numeric_rank(matrix: np.ndarray, tol: float) -> int:
    """Singular values above tol * sigma_max."""
    s = svdvals(matrix)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def flattening_rank(z: DenseTensor, tol: float = 1e-8) -> int:
    """Largest flattening rank; a certified lower bound on the tensor rank."""
    return max(numeric_rank(flattening(z, s), tol) for s in bipartitions(z.order))


# ── Decompositions ──


@dataclass(frozen=True, eq=False)
class SymTerm:
    coeff: Scalar
    vectors: tuple[np.ndarray, ...]


@dataclass(frozen=True, eq=False)
class SymDecomposition:
    """sum_i coeff_i * z_1^i v ... v z_d^i."""

    field: Field
    n: int
    d: int
    terms: tuple[SymTerm, ...]

    def __post_init__(self):
        for i, term in enumerate(self.terms):
            if len(term.vectors) != self.d:
                raise ValueError(f"term {i} has {len(term.vectors)} vectors, expected {self.d}")
            for v in term.vectors:
                if np.asarray(v).shape != (self.n,):
                    raise ValueError(f"term {i} has a vector of shape {np.asarray(v).shape}, expected ({self.n},)")

    @classmethod
    def from_terms(
        cls,
        terms: Iterable[tuple[Scalar, Sequence]],
        field: Field | str | None = None,
    ) -> "SymDecomposition":
        terms = list(terms)
        if not terms:
            raise ValueError("a decomposition needs at least one term")
        resolved = common_field([v for _, vecs in terms for v in vecs], field)
        built = tuple(
            SymTerm(to_scalar(c, resolved), tuple(as_vector(v, resolved) for v in vecs))
            for c, vecs in terms
        )
        first = built[0].vectors
        return cls(resolved, first[0].shape[0], len(first), built)

    def __len__(self) -> int:
        return len(self.terms)

    def densify(self) -> DenseTensor:
        acc = DenseTensor.zeros((self.n,) * self.d, self.field)
        for term in self.terms:
            first = term.vectors[0]
            if all(np.array_equal(v, first) for v in term.vectors[1:]):
                # powers are already symmetric
                acc = acc + term.coeff * elementary(term.vectors, self.field)
            else:
                acc = acc + term.coeff * sym_decomposable(term.vectors, self.field)
        return acc

    def norm_sum(self) -> float:
        """sum_i |coeff_i| prod_k ||z_k^i||, an upper bound on the projective norm."""
        return float(sum(abs(t.coeff) * np.prod([np.linalg.norm(v) for v in t.vectors]) for t in self.terms))

    def as_cp(self) -> "CPDecomposition":
        """Each v-term expanded into its d! elementary permutation terms, weight
        coeff / d! carried by the first vector."""
        weight = 1.0 / math.factorial(self.d)
        columns: list[list[np.ndarray]] = [[] for _ in range(self.d)]
        for term in self.terms:
            for p in _permutations(self.d):
                vecs = [term.vectors[k] for k in p]
                vecs[0] = term.coeff * weight * vecs[0]
                for k in range(self.d):
                    columns[k].append(vecs[k])
        return CPDecomposition(self.field, tuple(np.stack(c, axis=1) for c in columns))


@dataclass(frozen=True, eq=False)
class CPDecomposition:
    """sum_r A_1[:, r] (x) ... (x) A_d[:, r]; factor k has shape (n_k, r)."""

    field: Field
    factors: tuple[np.ndarray, ...]

    def __post_init__(self):
        ranks = {f.shape[1] for f in self.factors}
        if len(ranks) != 1:
            raise ValueError("factor matrices disagree on the number of terms")

    @classmethod
    def from_terms(cls, terms: Sequence[Sequence], field: Field | str | None = None) -> "CPDecomposition":
        if not terms:
            raise ValueError("a decomposition needs at least one term")
        resolved = common_field([v for vecs in terms for v in vecs], field)
        d = len(terms[0])
        if any(len(vecs) != d for vecs in terms):
            raise ValueError("all terms must have the same number of vectors")
        factors = tuple(
            np.stack([as_vector(vecs[k], resolved) for vecs in terms], axis=1) for k in range(d)
        )
        return cls(resolved, factors)

    @property
    def rank(self) -> int:
        return self.factors[0].shape[1]

    @property
    def order(self) -> int:
        return len(self.factors)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(f.shape[0] for f in self.factors)

    def terms(self) -> list[list[np.ndarray]]:
        return [[f[:, r] for f in self.factors] for r in range(self.rank)]

    def densify(self) -> DenseTensor:
        acc = np.zeros(self.shape, dtype=self.field.dtype)
        for vecs in self.terms():
            acc = acc + reduce(np.multiply.outer, vecs)
        return DenseTensor(acc, self.field)

    def norm_sum(self) -> float:
        norms = np.prod([np.linalg.norm(f, axis=0) for f in self.factors], axis=0)
        return float(np.sum(norms))

    def symmetrized(self) -> SymDecomposition:
        """sigma of the represented tensor as a v-decomposition with one term per CP term."""
        if len(set(self.shape)) != 1:
            raise ValueError("only cubical decompositions can be symmetrized")
        return SymDecomposition.from_terms(((1.0, vecs) for vecs in self.terms()), self.field)
