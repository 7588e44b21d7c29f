"""Recovering a real symmetric tensor on the plane of a non-symmetric best rank-1 point.

A non-symmetric best rank-1 point x_1 (x) ... (x) x_d of a norm-one symmetric form
L spans a plane. Counter-rotations inside that plane keep the value of L at 1,
and a fixed schedule of them turns the point into an orthonormal pair (v, w)
with L(v, v, w, ..., w) = +-1. That value determines L on the whole plane:

    L = -s * sum_l C(d, 2l) (-1)^l (v^2l) v (w^(d-2l)),   s = L(v, v, w, ..., w)

For d = 2 the pair is turned so that L(v, w) = 1 and the odd formula applies.
Running the merge through every slot gives a symmetric point y (x) ... (x) y instead.

Rotations act through two orthonormal plane coordinates and a 2x2 Givens block;
the orthogonal complement of the plane is never touched.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import orth, svdvals

from symtens.config import SolverConfig
from symtens.core import (
    DenseTensor,
    Field,
    as_vector,
    compress,
    contract_slots,
    elementary,
    hs_norm,
    is_symmetric,
    multilinear_eval,
    sym_power_product,
    unit,
)
from symtens.errors import ContractViolation, DegenerateRecovery
from symtens.models import Parity, Rank1Certificate, RecoveryReport, RecoveryStep
from symtens.norms import injective_norm
from symtens.rank1 import certify_rank1, span_dimension

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8


class Direction(str, Enum):
    TOWARD_SECOND = "toward_second"
    AWAY_FROM_SECOND = "away_from_second"


@dataclass(frozen=True, eq=False)
class PlaneRotation:
    """Rotation by `angle` inside span(q1, q2), oriented from q1 toward q2."""

    q1: np.ndarray
    q2: np.ndarray
    angle: float
    direction: Direction = Direction.TOWARD_SECOND

    @classmethod
    def in_plane_of(
        cls,
        x: np.ndarray,
        y: np.ndarray,
        angle: float,
        direction: Direction = Direction.TOWARD_SECOND,
        tol: float = 1e-12,
    ) -> "PlaneRotation":
        q1 = unit(x)
        r = y - (q1 @ y) * q1
        if np.linalg.norm(r) <= tol * max(1.0, np.linalg.norm(y)):
            raise ValueError("cannot build a rotation plane from collinear vectors")
        return cls(q1, unit(r), angle, direction)

    @property
    def signed_angle(self) -> float:
        return self.angle if self.direction is Direction.TOWARD_SECOND else -self.angle

    def reversed(self) -> "PlaneRotation":
        flipped = Direction.AWAY_FROM_SECOND if self.direction is Direction.TOWARD_SECOND else Direction.TOWARD_SECOND
        return PlaneRotation(self.q1, self.q2, self.angle, flipped)

    def with_angle(self, angle: float) -> "PlaneRotation":
        return PlaneRotation(self.q1, self.q2, angle, self.direction)

    def apply(self, v: np.ndarray) -> np.ndarray:
        c1, c2 = self.q1 @ v, self.q2 @ v
        rest = v - c1 * self.q1 - c2 * self.q2
        c, s = math.cos(self.signed_angle), math.sin(self.signed_angle)
        return rest + (c * c1 - s * c2) * self.q1 + (s * c1 + c * c2) * self.q2


def angle_between(x: np.ndarray, y: np.ndarray) -> float:
    cos = float(x @ y) / (np.linalg.norm(x) * np.linalg.norm(y))
    return math.acos(min(1.0, max(-1.0, cos)))


def _real_unit(v, name: str, tol: float) -> np.ndarray:
    vec = as_vector(v, Field.REAL)
    if abs(np.linalg.norm(vec) - 1) > tol:
        raise ValueError(f"{name} must be a unit vector (norm {np.linalg.norm(vec):.12g})")
    return vec


# ── Closed forms ──


def even_series(v: np.ndarray, w: np.ndarray, d: int) -> DenseTensor:
    """sum_l C(d, 2l) (-1)^l (v^2l) v (w^(d-2l))."""
    terms = [math.comb(d, 2 * l) * (-1) ** l * sym_power_product(v, w, 2 * l, d) for l in range(d // 2 + 1)]
    return sum(terms[1:], terms[0])


def odd_series(v: np.ndarray, w: np.ndarray, d: int) -> DenseTensor:
    """sum_l C(d, 2l+1) (-1)^l (v^(2l+1)) v (w^(d-2l-1))."""
    terms = [
        math.comb(d, 2 * l + 1) * (-1) ** l * sym_power_product(v, w, 2 * l + 1, d) for l in range((d - 1) // 2 + 1)
    ]
    return sum(terms[1:], terms[0])


def explicit_form(v, w, j: int, d: int, tol: float = 1e-10) -> DenseTensor:
    """The unique norm-one symmetric tensor with best rank-1 point (v^j) (x) (w^(d-j)).

    Sign fixed so that <(v^j) (x) (w^(d-j)), z> = +1 for every j."""
    v = _real_unit(v, "v", tol)
    w = _real_unit(w, "w", tol)
    if v.shape != w.shape:
        raise ValueError("v and w must have the same length")
    if abs(v @ w) > tol:
        raise ValueError(f"v and w must be orthogonal (<v, w> = {v @ w:.3e})")
    if not 1 <= j <= d - 1:
        raise ValueError(f"j={j} outside [1, {d - 1}]")
    if j % 2 == 0:
        return (-1) ** (j // 2) * even_series(v, w, d)
    return (-1) ** ((j - 1) // 2) * odd_series(v, w, d)


def explicit_form_terms(v, w, j: int, d: int, cfg: SolverConfig | None = None) -> list[Rank1Certificate]:
    """Certificates for every elementary term (v^k) (x) (w^(d-k)) with k of j's parity.

    Each one is a best rank-1 point of explicit_form(v, w, j, d) with |lam| = 1."""
    z = explicit_form(v, w, j, d)
    eps = injective_norm(z, cfg)
    v, w = as_vector(v, Field.REAL), as_vector(w, Field.REAL)
    return [certify_rank1(z, [v] * k + [w] * (d - k), cfg, eps=eps) for k in range(j % 2, d + 1, 2)]


# ── Rotations ──


def principal_axes(
    section: DenseTensor,
    x: np.ndarray,
    y: np.ndarray,
    tol: float = DEFAULT_TOL,
) -> tuple[np.ndarray, np.ndarray]:
    """f1 = (x+y)/|x+y|, f2 = (x-y)/|x-y| for a norm-one symmetric bilinear L with
    L(x, y) = 1; then L(f1, f1) = 1 and L(f2, f2) = -1."""
    if section.order != 2 or not is_symmetric(section):
        raise ValueError("principal_axes needs a symmetric order-2 tensor")
    x, y = _real_unit(x, "x", tol), _real_unit(y, "y", tol)
    if 1 - abs(x @ y) <= tol:
        raise ValueError("x and y must be linearly independent")
    value = multilinear_eval(section, [x, y])
    if abs(value - 1) > tol:
        raise ValueError(f"L(x, y) = {value:.12g}, expected 1")
    norm = float(svdvals(section.array)[0])
    if abs(norm - 1) > tol:
        raise ValueError(f"bilinear form has norm {norm:.12g}, expected 1")

    f1, f2 = unit(x + y), unit(x - y)
    deviation = max(
        abs(f1 @ f2),
        abs(multilinear_eval(section, [f1, f1]) - 1),
        abs(multilinear_eval(section, [f2, f2]) + 1),
    )
    if deviation > tol:
        raise ContractViolation("principal-axes", "axes are not orthonormal eigen-directions", deviation)
    return f1, f2


def _value(form: DenseTensor | None, args: list[np.ndarray]) -> float | None:
    return None if form is None else float(multilinear_eval(form, args))


def counter_rotate(
    form: DenseTensor | None,
    x: np.ndarray,
    y: np.ndarray,
    alpha: float,
    fixed: tuple[np.ndarray, ...] = (),
    tol: float = DEFAULT_TOL,
) -> tuple[np.ndarray, np.ndarray]:
    """Rotate x by alpha inside span{x, y} and y by alpha the opposite way.

    L(fixed, x, y) must be 1 and stays 1; the first pairing that keeps it is
    returned. Without a form the values are not checked."""
    if form is not None and len(fixed) + 2 != form.order:
        raise ValueError(f"expected {form.order - 2} fixed arguments, got {len(fixed)}")
    before = _value(form, [*fixed, x, y])
    if before is not None and abs(before - 1) > tol:
        raise ValueError(f"L(.., x, y) = {before:.12g}, expected 1")

    rotation = PlaneRotation.in_plane_of(x, y, alpha)
    deviation = 0.0
    for rx in (rotation, rotation.reversed()):
        x2, y2 = rx.apply(x), rx.reversed().apply(y)
        after = _value(form, [*fixed, x2, y2])
        if after is None or abs(after - 1) <= tol:
            return x2, y2
        deviation = max(deviation, abs(after - 1))
    raise ContractViolation("rotation-value", "counter-rotation changed the form's value in both pairings", deviation)


def multi_counter_rotate(
    form: DenseTensor | None,
    x: np.ndarray,
    y: np.ndarray,
    k: int,
    l: int,
    alpha: float,
    fixed: tuple[np.ndarray, ...] = (),
    tol: float = DEFAULT_TOL,
    drifts: list[float] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """From L(fixed, x^k, y^l) = 1: rotate x by l*alpha toward y and y by k*alpha
    the opposite way, keeping the value at 1.

    Runs as k*l single counter-rotations of one x copy against one y copy, with
    the value asserted after each; alpha must lie in [(theta-pi)/(k+l), theta/(k+l)]."""
    if k < 1 or l < 1:
        raise ValueError("k and l must be positive")
    if form is not None and len(fixed) + k + l != form.order:
        raise ValueError(f"expected {form.order - k - l} fixed arguments, got {len(fixed)}")
    theta = angle_between(x, y)
    if min(theta, math.pi - theta) <= tol:
        raise ValueError("x and y are collinear")
    lo, hi = (theta - math.pi) / (k + l), theta / (k + l)
    if not lo - tol <= alpha <= hi + tol:
        raise ValueError(f"alpha={alpha:.12g} outside [{lo:.12g}, {hi:.12g}]")
    before = _value(form, [*fixed, *[x] * k, *[y] * l])
    if before is not None and abs(before - 1) > tol:
        raise ValueError(f"L(.., x^{k}, y^{l}) = {before:.12g}, expected 1")

    forward = PlaneRotation.in_plane_of(x, y, alpha)
    backward = forward.reversed()
    xs, ys = [x] * k, [y] * l
    for i in range(k):
        for j in range(l):
            xs[i] = forward.apply(xs[i])
            ys[j] = backward.apply(ys[j])
            value = _value(form, [*fixed, *xs, *ys])
            if value is None:
                continue
            drift = abs(value - 1)
            if drifts is not None:
                drifts.append(drift)
            if drift > tol:
                raise ContractViolation("rotation-value", f"value drifted at rotation ({i}, {j})", drift)
    return xs[0], ys[0]


# ── Recovery ──


def _prepare(
    vectors: list, form: DenseTensor | None, tol: float
) -> tuple[list[np.ndarray], float, DenseTensor | None, int]:
    """Unit slots with L(x_1, ..., x_d) > 0, the scale |L(x_1, ..., x_d)|, L / scale and the span dimension."""
    if form is not None and form.field is not Field.REAL:
        raise ValueError("recovery works over the reals")
    d = len(vectors)
    if d < 2:
        raise ValueError("recovery needs at least two vectors")
    if any(np.linalg.norm(as_vector(v, Field.REAL)) == 0 for v in vectors):
        raise ValueError("zero vector in the rank-1 point")
    xs = [unit(as_vector(v, Field.REAL)) for v in vectors]
    if form is not None:
        if form.order != d or form.shape[0] != xs[0].shape[0]:
            raise ValueError(f"vectors do not match a tensor of shape {list(form.shape)}")
        if not is_symmetric(form):
            raise ValueError("recovery needs a symmetric tensor")

    dim = span_dimension(xs, tol)
    if dim >= 3:
        raise ValueError(f"vectors span dimension {dim}; a best rank-1 point of a symmetric tensor spans at most 2")

    scale = 1.0
    normalized = None
    if form is not None:
        lam = _value(form, xs)
        if lam == 0:
            raise ValueError("the form vanishes at the given point")
        if lam < 0:
            xs[0] = -xs[0]
        scale = abs(lam)
        normalized = form / scale
    return xs, scale, normalized, dim


def _merge_slots(
    xs: list[np.ndarray],
    normalized: DenseTensor | None,
    last: int,
    tol: float,
    drifts: list[float],
    steps: list[RecoveryStep],
) -> np.ndarray:
    """Fold slots d-1, ..., last+1 into y = x_d so that L(x_1, ..., x_last, y^(d-last)) = 1."""
    d = len(xs)
    y = xs[d - 1]
    copies = 1
    for m in range(d - 2, last - 1, -1):
        x = xs[m]
        c = float(x @ y)
        if 1 - abs(c) <= tol:
            if c >= 0:
                note = f"slot {m + 1} already equals y"
            elif m > 0:
                xs[0] = -xs[0]
                note = f"slot {m + 1} is -y; x_1 negated"
            elif d % 2 == 1:
                y = -y
                note = "slot 1 is -y; y negated"
            else:
                note = "slot 1 is -y; L(y^d) = -1"
        else:
            alpha = angle_between(x, y) / (copies + 1)
            y, _ = multi_counter_rotate(
                normalized, x, y, 1, copies, alpha, fixed=tuple(xs[:m]), tol=tol, drifts=drifts
            )
            y = unit(y)
            note = f"slot {m + 1} merged with alpha={alpha:.12g}"
        copies += 1
        value = _value(normalized, [*xs[:m], *[y] * copies])
        steps.append(RecoveryStep(step="II", note=note, vectors=[y], value=value))
    return y


def symmetric_rank1_point(
    vectors: list,
    form: DenseTensor,
    cfg: SolverConfig | None = None,
    tol: float = DEFAULT_TOL,
) -> Rank1Certificate:
    """Fold every slot of a best rank-1 point of a real symmetric form into one y.

    y (x) ... (x) y is again a best rank-1 point: |L(y, ..., y)| = |L(x_1, ..., x_d)|,
    with a positive sign whenever d is odd."""
    xs, scale, normalized, _ = _prepare(vectors, form, tol)
    d = len(xs)
    y = _merge_slots(xs, normalized, 0, tol, [], [])
    cert = certify_rank1(form, [y] * d, cfg)
    gap = abs(abs(cert.lam) - scale)
    if gap > tol * max(1.0, scale):
        raise ContractViolation("symmetric-point", "merged point lost the value of the form", gap)
    log.info("symmetric best rank-1 point: lam %.12g, eps gap %.3e", float(np.real(cert.lam)), cert.eps_gap)
    return cert


def recover_from_rank1(
    vectors: list,
    form: DenseTensor | None = None,
    tol: float = DEFAULT_TOL,
) -> RecoveryReport:
    """Rebuild L on the plane of a non-symmetric best rank-1 point.

    `form` is the symmetric tensor whose best rank-1 point `vectors` is. With it,
    every rotation is checked and the result is scaled to L; without it the
    vectors alone fix L up to the normalization ||L|| = 1."""
    xs, scale, normalized, dim = _prepare(vectors, form, tol)
    d = len(xs)
    if dim == 1:
        degenerate = scale * elementary([xs[0]] * d, Field.REAL)
        raise DegenerateRecovery("vectors are collinear: the best rank-1 point is already symmetric", degenerate)

    steps: list[RecoveryStep] = []
    drifts: list[float] = []

    # Step I: x_1 and x_2 independent
    partner = next(i for i in range(1, d) if 1 - abs(xs[0] @ xs[i]) > tol)
    xs[1], xs[partner] = xs[partner], xs[1]
    steps.append(RecoveryStep(step="I", note=f"slot {partner + 1} moved to slot 2", vectors=list(xs)))

    # Step II: merge x_d, ..., x_3 into y with L(x_1, x_2, y^(d-2)) = 1
    y = _merge_slots(xs, normalized, 2, tol, drifts, steps)

    # Step III: orthonormal (v, w) and the point (v^j, w^(d-j)) that fixes the formula
    x1, x2 = xs[0], xs[1]
    if d == 2:
        f1, f2 = principal_axes(normalized, x1, x2, tol) if normalized is not None else (unit(x1 + x2), unit(x1 - x2))
        # L(f1, f1) = 1 and L(f2, f2) = -1, so the pair turned by pi/4 has L(v, w) = 1
        v, w, j, sign = unit(f1 + f2), unit(f1 - f2), 1, 1
        note = "principal axes of the bilinear form, turned by pi/4"
        steps.append(RecoveryStep(step="III", note=note, vectors=[v, w]))
    else:
        j = 2
        if normalized is not None:
            f1, f2 = principal_axes(contract_slots(normalized, [y] * (d - 2)), x1, x2, tol)
        else:
            f1, f2 = unit(x1 + x2), unit(x1 - x2)
        if 1 - abs(f1 @ y) <= tol:
            v, w, sign = f2, y, -1
            steps.append(RecoveryStep(step="III", note="f1 parallel to y; v = f2, w = y", vectors=[v, w]))
        else:
            theta = angle_between(f1, y)
            alpha = (theta - math.pi / 2) / d
            printed = (theta - math.pi / 4) / d
            log.debug(
                "step III: alpha=%.12g gives angle pi/2; alpha=%.12g would leave angle pi/4, rejected",
                alpha,
                printed,
            )
            f1t, yt = multi_counter_rotate(normalized, f1, y, 2, d - 2, alpha, tol=tol, drifts=drifts)
            v, w, sign = unit(f1t), unit(yt), 1
            steps.append(
                RecoveryStep(step="III", note=f"counter-rotated f1 and y with alpha={alpha:.12g}", vectors=[v, w])
            )

    inner = abs(float(v @ w))
    if inner > tol:
        raise ContractViolation("orthogonality", "recovered v and w are not orthogonal", inner)
    if normalized is not None:
        measured = _value(normalized, [*[v] * j, *[w] * (d - j)])
        if abs(measured - sign) > tol:
            raise ContractViolation(
                "recovery-sign", f"L(v^{j}, w^{d - j}) = {measured:.12g}, expected {sign}", abs(measured - sign)
            )
        steps[-1] = steps[-1].model_copy(update={"value": measured})

    # a point valued -1 takes the form with its sign removed
    parity = Parity.EVEN_J if j % 2 == 0 else Parity.ODD_J
    reconstructed = (sign * scale) * explicit_form(v, w, j, d, tol=max(tol, 1e-10))
    span_error = None
    if form is not None:
        q = orth(np.stack([v, w], axis=1))
        span_error = hs_norm(compress(form, q @ q.T) - reconstructed)
        if span_error > tol * max(1.0, scale):
            raise ContractViolation("recovery-span", "reconstruction disagrees with L on the plane", span_error)
    log.info("recovered plane form: j=%d, sign %+d, scale %.12g, span error %s", j, sign, scale, span_error)
    return RecoveryReport(
        v=v,
        w=w,
        sign=sign,
        parity=parity,
        scale=scale,
        reconstructed=reconstructed,
        steps=steps,
        max_value_drift=max(drifts, default=0.0),
        span_error=span_error,
    )
