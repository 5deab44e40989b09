"""Truncated Taylor (jet) arithmetic over closed-form expression trees.

A jet at t of order K is the coefficient vector c_0..c_K with
c_k = f^{(k)}(t)/k!.  Jets propagate exactly through the expression catalog
(+, -, *, /, exp, log, sin, cos, rational powers, affine reparametrization)
via the standard convolution recurrences, so high-order derivatives come out
with no truncation error beyond double rounding.  The catalog is closed-form
only; user-supplied numeric callables would break the exactness the
inequality checks downstream rely on.

Also hosted here: grid envelopes of derivative magnitudes, the scaled
suffix supremum of derivatives used by the zero-spacing machinery, the
derivative-positivity scan, and the translation estimate for the suffix sup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ConditioningError, DomainError, ValidationError
from .sequences import LogSequence, is_log_convex

K_MAX = 64  # double precision keeps convolution error ~1e-9 up to here
COEFF_CAP = 1e280

_UNARY = ("neg", "exp", "log", "sin", "cos")
_BINARY = ("add", "sub", "mul", "div")


# ---------------------------------------------------------------------------
# expression builders (the dict form doubles as the JSON wire format)

def expr_x() -> dict:
    return {"op": "x"}


def expr_const(value: float) -> dict:
    return {"op": "const", "value": float(value)}


def expr_add(left: dict, right: dict) -> dict:
    return {"op": "add", "left": left, "right": right}


def expr_sub(left: dict, right: dict) -> dict:
    return {"op": "sub", "left": left, "right": right}


def expr_mul(left: dict, right: dict) -> dict:
    return {"op": "mul", "left": left, "right": right}


def expr_div(left: dict, right: dict) -> dict:
    return {"op": "div", "left": left, "right": right}


def expr_neg(arg: dict) -> dict:
    return {"op": "neg", "arg": arg}


def expr_exp(arg: dict) -> dict:
    return {"op": "exp", "arg": arg}


def expr_log(arg: dict) -> dict:
    return {"op": "log", "arg": arg}


def expr_sin(arg: dict) -> dict:
    return {"op": "sin", "arg": arg}


def expr_cos(arg: dict) -> dict:
    return {"op": "cos", "arg": arg}


def expr_pow(arg: dict, num: int, den: int = 1) -> dict:
    return {"op": "pow", "arg": arg, "num": int(num), "den": int(den)}


def expr_affine(arg: dict, scale: float, shift: float) -> dict:
    """x |-> arg(scale * x + shift)."""
    return {"op": "affine", "arg": arg, "a": float(scale), "b": float(shift)}


def _validate_expr(node, path: str = "root") -> None:
    if not isinstance(node, Mapping) or "op" not in node:
        raise ValidationError(f"expression node at {path} must be a dict with 'op'")
    op = node["op"]
    if op == "x":
        return
    if op == "const":
        value = node.get("value")
        if not isinstance(value, (int, float)) or not math.isfinite(float(value)):
            raise ValidationError(f"const at {path} needs a finite 'value'")
        return
    if op in _BINARY:
        _validate_expr(node.get("left"), f"{path}.left")
        _validate_expr(node.get("right"), f"{path}.right")
        return
    if op in _UNARY:
        _validate_expr(node.get("arg"), f"{path}.arg")
        return
    if op == "pow":
        num, den = node.get("num"), node.get("den", 1)
        if not isinstance(num, int) or not isinstance(den, int) or den == 0:
            raise ValidationError(f"pow at {path} needs integer num/den, den != 0")
        _validate_expr(node.get("arg"), f"{path}.arg")
        return
    if op == "affine":
        for key in ("a", "b"):
            value = node.get(key)
            if not isinstance(value, (int, float)) or not math.isfinite(float(value)):
                raise ValidationError(f"affine at {path} needs finite '{key}'")
        _validate_expr(node.get("arg"), f"{path}.arg")
        return
    raise ValidationError(f"unknown op {op!r} at {path}")


@dataclass(frozen=True)
class FunctionSpec:
    """A closed-form function: expression tree plus a closed interval domain."""

    expr: dict
    domain: tuple[float, float]

    def __post_init__(self):
        _validate_expr(self.expr)
        a, b = self.domain
        if not (math.isfinite(a) and math.isfinite(b) and a < b):
            raise ValidationError(f"domain must be a finite interval [a,b], got {self.domain}")
        object.__setattr__(self, "domain", (float(a), float(b)))

    @classmethod
    def from_json(cls, doc: Mapping) -> "FunctionSpec":
        if "expr" not in doc or "domain" not in doc:
            raise ValidationError("function spec JSON needs 'expr' and 'domain'")
        return cls(expr=doc["expr"], domain=tuple(doc["domain"]))

    def to_json(self) -> dict:
        return {"expr": self.expr, "domain": list(self.domain)}


@dataclass(frozen=True)
class Jet:
    """Taylor coefficients c_k = f^{(k)}(center)/k! up to ``order``."""

    center: float
    order: int
    coeffs: tuple[float, ...]

    def derivative(self, n: int) -> float:
        """f^{(n)}(center) = n! * c_n."""
        if not (0 <= n <= self.order):
            raise ValidationError(f"derivative order {n} outside jet order {self.order}")
        return _FACT[n] * self.coeffs[n]

    @property
    def value(self) -> float:
        return self.coeffs[0]


_FACT = [1.0]
for _i in range(1, K_MAX + 2):
    _FACT.append(_FACT[-1] * _i)


def _conv(u: Sequence[float], v: Sequence[float], k_max: int) -> list[float]:
    return [
        math.fsum(u[j] * v[k - j] for j in range(k + 1)) for k in range(k_max + 1)
    ]


def _check_cap(coeffs: Sequence[float], path: str) -> list[float]:
    for c in coeffs:
        if not math.isfinite(c) or abs(c) > COEFF_CAP:
            raise ConditioningError(
                f"jet coefficient exceeded {COEFF_CAP:g} at node {path}"
            )
    return list(coeffs)


def _pow_int(u: list[float], exponent: int, k_max: int) -> list[float]:
    result = [0.0] * (k_max + 1)
    result[0] = 1.0
    base = list(u)
    e = exponent
    while e > 0:
        if e & 1:
            result = _conv(result, base, k_max)
        e >>= 1
        if e:
            base = _conv(base, base, k_max)
    return result


def _propagate(node: Mapping, t: float, k_max: int, path: str) -> list[float]:
    op = node["op"]
    if op == "x":
        out = [0.0] * (k_max + 1)
        out[0] = t
        if k_max >= 1:
            out[1] = 1.0
        return out
    if op == "const":
        out = [0.0] * (k_max + 1)
        out[0] = float(node["value"])
        return out
    if op == "affine":
        a, b = float(node["a"]), float(node["b"])
        inner = _propagate(node["arg"], a * t + b, k_max, f"{path}.arg")
        scale = 1.0
        out = []
        for k in range(k_max + 1):
            out.append(inner[k] * scale)
            scale *= a
        return _check_cap(out, path)
    if op in _BINARY:
        u = _propagate(node["left"], t, k_max, f"{path}.left")
        v = _propagate(node["right"], t, k_max, f"{path}.right")
        if op == "add":
            out = [a + b for a, b in zip(u, v)]
        elif op == "sub":
            out = [a - b for a, b in zip(u, v)]
        elif op == "mul":
            out = _conv(u, v, k_max)
        else:  # div
            if v[0] == 0.0:
                raise DomainError("division by a jet with zero constant term", path)
            out = [0.0] * (k_max + 1)
            for k in range(k_max + 1):
                acc = u[k] - math.fsum(v[j] * out[k - j] for j in range(1, k + 1))
                out[k] = acc / v[0]
        return _check_cap(out, path)

    u = _propagate(node["arg"], t, k_max, f"{path}.arg")
    if op == "neg":
        return [-a for a in u]
    if op == "exp":
        out = [0.0] * (k_max + 1)
        out[0] = math.exp(u[0])
        for k in range(1, k_max + 1):
            out[k] = math.fsum(j * u[j] * out[k - j] for j in range(1, k + 1)) / k
        return _check_cap(out, path)
    if op == "log":
        if u[0] <= 0.0:
            raise DomainError(f"log of nonpositive value {u[0]!r}", path)
        out = [0.0] * (k_max + 1)
        out[0] = math.log(u[0])
        for k in range(1, k_max + 1):
            acc = u[k] - math.fsum(j * out[j] * u[k - j] for j in range(1, k)) / k
            out[k] = acc / u[0]
        return _check_cap(out, path)
    if op in ("sin", "cos"):
        s = [0.0] * (k_max + 1)
        c = [0.0] * (k_max + 1)
        s[0], c[0] = math.sin(u[0]), math.cos(u[0])
        for k in range(1, k_max + 1):
            s[k] = math.fsum(j * u[j] * c[k - j] for j in range(1, k + 1)) / k
            c[k] = -math.fsum(j * u[j] * s[k - j] for j in range(1, k + 1)) / k
        return _check_cap(s if op == "sin" else c, path)
    if op == "pow":
        num, den = int(node["num"]), int(node["den"])
        if den < 0:
            num, den = -num, -den
        if den == 1 and num >= 0:
            return _check_cap(_pow_int(u, num, k_max), path)
        alpha = num / den
        if u[0] == 0.0 or (u[0] < 0.0 and den != 1):
            raise DomainError(
                f"pow({num}/{den}) needs a positive base, got {u[0]!r}", path
            )
        out = [0.0] * (k_max + 1)
        out[0] = math.pow(u[0], alpha)
        for k in range(1, k_max + 1):
            acc = math.fsum(
                (j * (alpha + 1.0) - k) * u[j] * out[k - j] for j in range(1, k + 1)
            )
            out[k] = acc / (k * u[0])
        return _check_cap(out, path)
    raise ValidationError(f"unknown op {op!r} at {path}")  # pragma: no cover


def jet_eval(f: FunctionSpec, t: float, order: int) -> Jet:
    """Exact Taylor coefficients of f at t up to ``order``."""
    if not (0 <= order <= K_MAX):
        raise ValidationError(f"jet order must be in [0, {K_MAX}], got {order}")
    a, b = f.domain
    if not (a - 1e-12 <= t <= b + 1e-12):
        raise ValidationError(f"evaluation point {t} outside domain [{a}, {b}]")
    coeffs = _propagate(f.expr, float(t), order, "root")
    return Jet(center=float(t), order=order, coeffs=tuple(coeffs))


def jet_derivatives(f: FunctionSpec, t: float, order: int) -> np.ndarray:
    """Vector f(t), f'(t), ..., f^{(order)}(t)."""
    jet = jet_eval(f, t, order)
    return np.array([_FACT[n] * jet.coeffs[n] for n in range(order + 1)])


# ---------------------------------------------------------------------------
# derivative envelopes

@dataclass(frozen=True)
class EnvelopeReport:
    """Grid maxima of |f^{(n)}| on the domain, stored as log values.

    A grid max is a lower bound for the true sup; -inf marks a derivative
    that vanished at every grid point.
    """

    grid: tuple[float, ...]
    m_est_log: tuple[float, ...]

    @property
    def nmax(self) -> int:
        return len(self.m_est_log) - 1

    def m_est(self, n: int) -> float:
        """Grid max of |f^{(n)}| in the linear domain."""
        return math.exp(self.m_est_log[n]) if self.m_est_log[n] > -math.inf else 0.0

    def to_json(self) -> dict:
        return {"grid": list(self.grid), "m_est_log": list(self.m_est_log)}


def derivative_envelope(
    f: FunctionSpec, nmax: int, grid_size: int = 256
) -> EnvelopeReport:
    """Grid maxima of |f^{(n)}|, n = 0..nmax, over a uniform grid."""
    if grid_size < 2:
        raise ValidationError("grid_size must be >= 2")
    a, b = f.domain
    grid = np.linspace(a, b, grid_size)
    best = [-math.inf] * (nmax + 1)
    for x in grid:
        jet = jet_eval(f, float(x), nmax)
        for n in range(nmax + 1):
            value = abs(_FACT[n] * jet.coeffs[n])
            if value > 0.0:
                best[n] = max(best[n], math.log(value))
    return EnvelopeReport(grid=tuple(float(v) for v in grid), m_est_log=tuple(best))


# ---------------------------------------------------------------------------
# scaled suffix supremum of derivatives

@dataclass(frozen=True)
class TailSup:
    """max_{n <= j <= J} |f^{(j)}(t)| e^{-j} / M_j, computed in logs.

    ``truncated`` means the max sits at the horizon j = J, so the value is
    only a lower bound for the infinite suffix supremum.
    """

    value: float
    log_value: float
    arg_j: int
    truncated: bool


def derivative_tail_sup(
    f: FunctionSpec,
    t: float,
    n: int,
    weights: LogSequence,
    horizon: int,
    jet: Jet | None = None,
) -> TailSup:
    """Suffix supremum of |f^{(j)}(t)| / (e^j M_j) over n <= j <= horizon."""
    if not (0 <= n <= horizon):
        raise ValidationError(f"need 0 <= n <= horizon, got n={n}, horizon={horizon}")
    if horizon >= weights.length:
        raise ValidationError("horizon exceeds weight sequence length")
    if jet is None:
        jet = jet_eval(f, t, horizon)
    elif jet.order < horizon:
        raise ValidationError("supplied jet order is below the horizon")
    best = -math.inf
    arg = -1
    for j in range(n, horizon + 1):
        deriv = _FACT[j] * jet.coeffs[j]
        if deriv == 0.0:
            continue
        term = math.log(abs(deriv)) - j - weights.logs[j]
        if term > best:
            best = term
            arg = j
    if arg < 0:
        return TailSup(value=0.0, log_value=-math.inf, arg_j=-1, truncated=False)
    return TailSup(
        value=math.exp(best) if best < 700 else math.inf,
        log_value=best,
        arg_j=arg,
        truncated=(arg == horizon),
    )


@dataclass(frozen=True)
class TranslationCheck:
    lhs_log: float
    rhs_log: float
    ok: bool
    truncated: bool


def translation_estimate_check(
    f: FunctionSpec,
    weights: LogSequence,
    t: float,
    tau: float,
    n: int,
    q: int,
    horizon: int,
    slack: float = 1e-9,
) -> TranslationCheck:
    """Translation bound for the suffix sup: with B_n the scaled suffix sup,

        B_n(t + tau) <= max(B_n(t), e^{-q}) * exp(e |tau| M_q / M_{q-1}),

    for any q > n, valid when M is log-convex and sup |f^{(q)}| <= M_q.
    Comparison happens in the log domain with relative ``slack``.
    """
    if not (0 <= n < q):
        raise ValidationError(f"need 0 <= n < q, got n={n}, q={q}")
    if q >= weights.length:
        raise ValidationError("q exceeds weight sequence length")
    if weights.length >= 3 and not is_log_convex(weights):
        raise ValidationError("weight sequence must be log-convex")
    base = derivative_tail_sup(f, t, n, weights, horizon)
    shifted = derivative_tail_sup(f, t + tau, n, weights, horizon)
    if base.arg_j < 0 or shifted.arg_j < 0:
        raise ValidationError("suffix sup vanished on the horizon; nothing to check")
    ratio = math.exp(weights.logs[q] - weights.logs[q - 1])
    rhs_log = max(base.log_value, -float(q)) + math.e * abs(tau) * ratio
    ok = shifted.log_value <= rhs_log + math.log1p(slack)
    return TranslationCheck(
        lhs_log=shifted.log_value,
        rhs_log=rhs_log,
        ok=ok,
        truncated=base.truncated or shifted.truncated,
    )


# ---------------------------------------------------------------------------
# derivative positivity scan and the zero-spacing experiment

@dataclass(frozen=True)
class MonotonicityResult:
    holds: bool
    witness: tuple[int, float] | None


def monotonicity_check(
    f: FunctionSpec,
    weights: LogSequence,
    nmax: int,
    grid_size: int = 256,
) -> MonotonicityResult:
    """Scan whether every f^{(n)}, n <= nmax, stays positive on the domain.

    Requires f^{(n)}(a) > 0 for all n <= nmax (rejected otherwise, listing
    the failing orders) and a log-convex weight sequence.  The witness is
    the first violation in (increasing n, then increasing x) order.
    """
    if nmax < 0 or nmax > K_MAX:
        raise ValidationError(f"nmax must be in [0, {K_MAX}]")
    if weights.length >= 3 and not is_log_convex(weights):
        raise ValidationError("weight sequence must be log-convex")
    a, _ = f.domain
    at_a = jet_derivatives(f, a, nmax)
    bad = [n for n in range(nmax + 1) if not (at_a[n] > 0.0)]
    if bad:
        raise ValidationError(
            f"derivative positivity fails at the left endpoint for n = {bad}"
        )
    grid = np.linspace(f.domain[0], f.domain[1], grid_size)
    table = np.empty((grid_size, nmax + 1))
    for i, x in enumerate(grid):
        table[i] = jet_derivatives(f, float(x), nmax)
    for n in range(nmax + 1):
        for i in range(grid_size):
            if not (table[i, n] > 0.0):
                return MonotonicityResult(holds=False, witness=(n, float(grid[i])))
    return MonotonicityResult(holds=True, witness=None)


def _refine_zero(f: FunctionSpec, n: int, lo: float, hi: float, tol: float = 1e-12) -> float:
    """Bisect a sign change of f^{(n)} down to ``tol`` in x."""
    f_lo = jet_eval(f, lo, n).derivative(n)
    if f_lo == 0.0:
        return lo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = jet_eval(f, mid, n).derivative(n)
        if f_mid == 0.0 or (hi - lo) < tol:
            return mid
        if (f_lo > 0) == (f_mid > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _zeros_from_values(
    f: FunctionSpec, n: int, grid: np.ndarray, values: np.ndarray
) -> list[float]:
    zeros: list[float] = []
    for i in range(len(grid)):
        if values[i] == 0.0:
            if not zeros or abs(zeros[-1] - grid[i]) > 1e-9:
                zeros.append(float(grid[i]))
        elif (
            i + 1 < len(grid)
            and values[i + 1] != 0.0
            and (values[i] > 0) != (values[i + 1] > 0)
        ):
            z = _refine_zero(f, n, float(grid[i]), float(grid[i + 1]))
            if not zeros or abs(zeros[-1] - z) > 1e-9:
                zeros.append(z)
    return zeros


def derivative_zeros(f: FunctionSpec, n: int, grid_size: int = 1024) -> list[float]:
    """All zeros of f^{(n)} found by sign-change scan plus bisection."""
    a, b = f.domain
    grid = np.linspace(a, b, grid_size)
    values = np.array([jet_eval(f, float(x), n).derivative(n) for x in grid])
    return _zeros_from_values(f, n, grid, values)


@dataclass(frozen=True)
class SpacingResult:
    """Zero chain of successive derivatives with both partial-sum curves."""

    x: tuple[float, ...]
    lhs_partial: tuple[float, ...]
    rhs_partial: tuple[float, ...]

    def to_json(self) -> dict:
        return {
            "x": list(self.x),
            "lhs_partial": list(self.lhs_partial),
            "rhs_partial": list(self.rhs_partial),
        }


def zero_spacing_experiment(
    f: FunctionSpec,
    weights: LogSequence,
    nmax: int,
    grid_size: int = 1024,
) -> SpacingResult:
    """Chain zeros x_n of f^{(n)} (nearest to the previous zero) and compare
    the accumulated spacing against (1/e) * sum M_{j-1}/M_j.

    Requires each f^{(n)}, n <= nmax, to vanish somewhere on the domain, M
    log-convex with |f^{(n)}| <= M_n on the grid, and f not identically zero.
    """
    if nmax < 1 or nmax > K_MAX:
        raise ValidationError(f"nmax must be in [1, {K_MAX}]")
    if nmax >= weights.length:
        raise ValidationError("nmax exceeds weight sequence length")
    if weights.length >= 3 and not is_log_convex(weights):
        raise ValidationError("weight sequence must be log-convex")

    a, b = f.domain
    grid = np.linspace(a, b, grid_size)
    table = np.empty((grid_size, nmax + 1))
    for i, x in enumerate(grid):
        table[i] = jet_derivatives(f, float(x), nmax)

    if not np.any(table[:, 0]):
        raise ValidationError("f vanishes at every grid point; nothing to chain")
    for n in range(nmax + 1):
        grid_max = float(np.max(np.abs(table[:, n])))
        if grid_max > math.exp(weights.logs[n]) * (1.0 + 1e-9):
            raise ValidationError(
                f"|f^({n})| exceeds M_{n} on the grid; the spacing bound needs "
                "the envelope hypothesis"
            )

    chain: list[float] = []
    for n in range(nmax + 1):
        zeros = _zeros_from_values(f, n, grid, table[:, n])
        if not zeros:
            raise ValidationError(f"no zero found for derivative order {n}")
        if n == 0:
            chain.append(zeros[0])
        else:
            prev = chain[-1]
            # nearest zero; ties resolved toward the smaller abscissa
            best = min(zeros, key=lambda z: (abs(z - prev), z))
            chain.append(best)

    lhs = [0.0]
    for j in range(nmax):
        lhs.append(lhs[-1] + abs(chain[j] - chain[j + 1]))
    rhs = [0.0]
    for j in range(1, nmax + 1):
        rhs.append(rhs[-1] + math.exp(weights.logs[j - 1] - weights.logs[j]) / math.e)
    return SpacingResult(
        x=tuple(chain), lhs_partial=tuple(lhs), rhs_partial=tuple(rhs)
    )
