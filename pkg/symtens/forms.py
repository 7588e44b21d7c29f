"""Binary forms: homogeneous polynomials on C^2 and their linear factors.

A symmetric z in (x)^d C^2 is the same thing as the degree-d form
P_z(y) = <(x)^d y, z>. Every binary form splits into linear factors, so every
such z is a single v-term z_1 v ... v z_d.

Text format:

    # comment
    <b11 re> <b11 im> <b12 re> <b12 im>      optional 2x2 basis block,
    <b21 re> <b21 im> <b22 re> <b22 im>      rows of B (columns are b_1, b_2)
    d
    <re> <im>                                 d + 1 coefficient lines
    ...

Coefficient i multiplies [y]_B1^(d-i) [y]_B2^i, where [y]_B = B^-1 y.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.linalg import companion, eigvals
from scipy.stats import unitary_group

from symtens.config import SolverConfig, settings
from symtens.core import DenseTensor, Field, SymDecomposition, hs_norm, is_symmetric
from symtens.errors import ContractViolation
from symtens.models import Factorization

log = logging.getLogger(__name__)

STREAM_FORMS = 8

LEADING_TOL = 1e-12
MAX_ROTATIONS = 8
VERIFY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class BinaryForm:
    degree: int
    coeffs: np.ndarray
    basis: np.ndarray = field(default_factory=lambda: np.eye(2, dtype=complex))

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        basis = np.asarray(self.basis, dtype=complex)
        if self.degree < 1:
            raise ValueError(f"degree must be at least 1, got {self.degree}")
        if coeffs.shape != (self.degree + 1,):
            raise ValueError(f"degree {self.degree} needs {self.degree + 1} coefficients, got {coeffs.size}")
        if basis.shape != (2, 2):
            raise ValueError(f"basis must be 2x2, got shape {basis.shape}")
        if abs(np.linalg.det(basis)) < 1e-12:
            raise ValueError("basis vectors are linearly dependent")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "basis", basis)

    @property
    def is_canonical(self) -> bool:
        return bool(np.array_equal(self.basis, np.eye(2)))

    def canonical(self) -> "BinaryForm":
        """The same polynomial with coefficients in the standard basis."""
        if self.is_canonical:
            return self
        return BinaryForm(self.degree, _compose(self.coeffs, np.linalg.inv(self.basis)))

    def evaluate(self, y) -> complex:
        y = np.asarray(y, dtype=complex)
        c = np.linalg.solve(self.basis, y)
        k = np.arange(self.degree + 1)
        return complex(np.sum(self.coeffs * c[0] ** (self.degree - k) * c[1] ** k))


def _compose(coeffs: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Coefficients of sum_k c_k (m[0] . u)^(d-k) (m[1] . u)^k in monomials of u.

    Works on the dehomogenization u = (s, 1): the power of s is d - k."""
    d = len(coeffs) - 1
    first = np.array([m[0, 1], m[0, 0]])  # ascending in s
    second = np.array([m[1, 1], m[1, 0]])
    total = np.zeros(d + 1, dtype=complex)
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        term = npoly.polymul(npoly.polypow(first, d - k), npoly.polypow(second, k))
        total[: len(term)] += c * term
    return total[::-1].copy()


# ── Text format ──


def _numbers(tokens: list[str], where: str) -> list[float]:
    try:
        return [float(t) for t in tokens]
    except ValueError as exc:
        raise ValueError(f"{where}: expected numbers, got {' '.join(tokens)!r}") from exc


def parse_binary_form(text: str, source: str = "<form>") -> BinaryForm:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].split()
        if content:
            lines.append((lineno, content))
    if not lines:
        raise ValueError(f"{source}: empty form file")

    basis = np.eye(2, dtype=complex)
    if len(lines[0][1]) == 4:
        if len(lines) < 2 or len(lines[1][1]) != 4:
            raise ValueError(f"{source}:{lines[0][0]}: basis block needs two rows of four numbers")
        rows = []
        for lineno, tokens in lines[:2]:
            re1, im1, re2, im2 = _numbers(tokens, f"{source}:{lineno}")
            rows.append([complex(re1, im1), complex(re2, im2)])
        basis = np.array(rows)
        lines = lines[2:]
    if not lines:
        raise ValueError(f"{source}: missing degree line")

    lineno, tokens = lines[0]
    if len(tokens) != 1:
        raise ValueError(f"{source}:{lineno}: expected the degree, got {' '.join(tokens)!r}")
    try:
        degree = int(tokens[0])
    except ValueError as exc:
        raise ValueError(f"{source}:{lineno}: degree must be an integer, got {tokens[0]!r}") from exc
    body = lines[1:]
    if len(body) != degree + 1:
        raise ValueError(f"{source}:{lineno}: degree {degree} needs {degree + 1} coefficient lines, got {len(body)}")
    coeffs = []
    for lineno, tokens in body:
        if len(tokens) != 2:
            raise ValueError(f"{source}:{lineno}: coefficient line needs 're im', got {' '.join(tokens)!r}")
        re, im = _numbers(tokens, f"{source}:{lineno}")
        coeffs.append(complex(re, im))
    try:
        return BinaryForm(degree, np.array(coeffs), basis)
    except ValueError as exc:
        raise ValueError(f"{source}: {exc}") from exc


def format_binary_form(form: BinaryForm) -> str:
    out = []
    if not form.is_canonical:
        for row in form.basis:
            out.append(" ".join(f"{x!r}" for c in row for x in (c.real, c.imag)))
    out.append(str(form.degree))
    out.extend(f"{c.real!r} {c.imag!r}" for c in form.coeffs)
    return "\n".join(out) + "\n"


def read_binary_form(path: str | Path) -> BinaryForm:
    path = Path(path)
    return parse_binary_form(path.read_text(), str(path))


def write_binary_form(path: str | Path, form: BinaryForm) -> None:
    Path(path).write_text(format_binary_form(form))


# ── Tensors on C^2 ──


def _entry(k: int, d: int) -> tuple[int, ...]:
    return (0,) * (d - k) + (1,) * k


def form_from_tensor(z: DenseTensor) -> BinaryForm:
    """P_z in the standard basis: c_k = C(d, k) conj(z[1..1 2..2]) with k twos."""
    if z.dim != 2 or not is_symmetric(z):
        raise ValueError(f"expected a symmetric tensor on C^2, got shape {list(z.shape)}")
    d = z.order
    arr = z.array
    coeffs = np.array([math.comb(d, k) * np.conj(arr[_entry(k, d)]) for k in range(d + 1)], dtype=complex)
    return BinaryForm(d, coeffs)


def tensor_from_form(form: BinaryForm) -> DenseTensor:
    """The symmetric z in (x)^d C^2 with P_z = form."""
    canon = form.canonical()
    d = canon.degree
    arr = np.zeros((2,) * d, dtype=complex)
    for idx in np.ndindex(*arr.shape):
        k = sum(idx)
        arr[idx] = np.conj(canon.coeffs[k]) / math.comb(d, k)
    return DenseTensor(arr, Field.COMPLEX)


# ── Factorization ──


def _split(coeffs: np.ndarray) -> list[np.ndarray]:
    """Linear factors of a form with nonzero y_1^d coefficient.

    In s = y_1 / y_2 the form is sum_k c_k s^(d-k), so
    P(y) = c_0 prod_r (y_1 - s_r y_2) with s_r the companion eigenvalues."""
    roots = eigvals(companion(coeffs))
    factors = [np.array([1.0, -s], dtype=complex) for s in roots]
    factors[0] = coeffs[0] * factors[0]
    return factors


def _product(factors: list[np.ndarray], y: np.ndarray) -> complex:
    return complex(np.prod([f @ y for f in factors]))


def factor_binary_form(form: BinaryForm, cfg: SolverConfig | None = None) -> Factorization:
    """Linear forms phi_1..phi_d with P = prod phi_i; phi_i(y) = a_i y_1 + b_i y_2.

    A vanishing y_1^d coefficient means a root at infinity; the form is then
    rewritten in a random unitary basis and factored there."""
    cfg = cfg if cfg is not None else settings.solver
    canon = form.canonical()
    c = canon.coeffs
    scale = float(np.max(np.abs(c)))
    if scale == 0:
        raise ValueError("cannot factor the zero polynomial")

    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, STREAM_FORMS]))
    u = np.eye(2, dtype=complex)
    rotated = c
    rotations = 0
    while abs(rotated[0]) < LEADING_TOL * scale:
        if rotations == MAX_ROTATIONS:
            raise ContractViolation("factor-rotation", f"leading coefficient vanished in {MAX_ROTATIONS} rotated bases")
        u = unitary_group.rvs(2, random_state=rng)
        rotated = _compose(c, u)
        rotations += 1
    # factors in coordinates x = U^H y, pulled back to y
    factors = [f @ u.conj().T for f in _split(rotated)]

    samples = rng.standard_normal((canon.degree + 1, 2)) + 1j * rng.standard_normal((canon.degree + 1, 2))
    samples /= np.linalg.norm(samples, axis=1, keepdims=True)
    norm1 = float(np.sum(np.abs(c)))
    max_error = max(abs(canon.evaluate(y) - _product(factors, y)) for y in samples) / norm1
    if max_error > VERIFY_TOL:
        raise ContractViolation("factorization", "product of linear factors does not reproduce the form", max_error)
    log.debug("factored degree-%d form (%d rotations), relative error %.3e", canon.degree, rotations, max_error)
    return Factorization(degree=canon.degree, factors=factors, max_error=max_error, rotations=rotations)


def sym_rank1_on_c2(z: DenseTensor, cfg: SolverConfig | None = None, tol: float = 1e-8) -> SymDecomposition:
    """Write a symmetric z on C^2 as z_1 v ... v z_d.

    P_z(y) = prod <y, z_i> when z = z_1 v ... v z_d, so z_i = conj(phi_i)."""
    if z.dim != 2 or not is_symmetric(z):
        raise ValueError(f"expected a symmetric tensor on C^2, got shape {list(z.shape)}")
    zc = z.as_field(Field.COMPLEX)
    fac = factor_binary_form(form_from_tensor(zc), cfg)
    decomp = SymDecomposition.from_terms([(1.0, [np.conj(f) for f in fac.factors])], Field.COMPLEX)
    drift = hs_norm(decomp.densify() - zc)
    if drift > tol * max(1.0, hs_norm(zc)):
        raise ContractViolation("c2-round-trip", "v-term does not densify back to z", drift)
    return decomp
